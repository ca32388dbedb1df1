//! Top product coefficients `c_{2n−2}, …, c_{2n−1−ω}` of `f·g`.

use crate::circuit_ir::{Circuit, GateCounts, Reg, RegKind};

use super::{ArithError, Result};

/// Adds the top `ω` product coefficients into `t`, with `t[p]` receiving
/// `c_{2n−2−(ω−1−p)}`. Only the top `ω` qubits of `f` and `g` are read.
pub fn emit_correction(c: &mut Circuit, f: Reg, g: Reg, t: Reg) {
    let omega = t.len();
    let n = f.len();
    let fq = |a: usize| f.q(n - 1 - a);
    let gq = |a: usize| g.q(n - 1 - a);
    let target = |k: usize| t.q(omega - 1 - k);

    // Diagonal products f_a·g_a land in every c_k with k >= a, via a suffix-sum
    // basis change on the target.
    for p in 0..omega.saturating_sub(1) {
        c.cnot(t.q(p + 1), t.q(p));
    }
    for a in 0..omega {
        c.ccx(fq(a), gq(a), target(a));
    }
    for p in (0..omega.saturating_sub(1)).rev() {
        c.cnot(t.q(p + 1), t.q(p));
    }

    // Cross terms (f_a + f_b)(g_a + g_b) for a < b, a + b < ω.
    let mut a = 0;
    while omega >= 2 && (a == 0 || 2 * a + 2 <= omega) {
        let hi = omega - 1 - a;
        for b in a + 1..=hi {
            c.cnot(fq(a), fq(b));
            c.cnot(gq(a), gq(b));
        }
        for b in a + 1..=hi {
            c.ccx(fq(b), gq(b), target(a + b));
        }
        a += 1;
    }
    for b in 1..omega {
        let last = (b - 1).min(omega - 1 - b);
        c.cnot(fq(last), fq(b));
        c.cnot(gq(last), gq(b));
    }
}

/// Standalone correction circuit on registers `f`, `g` (`n` qubits) and
/// target `t` (`ω` qubits).
pub fn synth_correction(omega: usize, n: usize) -> Result<Circuit> {
    if omega == 0 || omega > n {
        return Err(ArithError::BadOmega { omega, n });
    }
    let mut c = Circuit::new();
    let f = c.add_register("f", n, RegKind::Input);
    let g = c.add_register("g", n, RegKind::Input);
    let t = c.add_register("t", omega, RegKind::Output);
    emit_correction(&mut c, f, g, t);
    Ok(c)
}

/// Closed-form counts: Toffoli `ω + ⌊ω²/4⌋`, CNOT `4(ω−1) + ⌊ω²/2⌋`.
pub fn correction_counts(omega: usize) -> GateCounts {
    let w = omega as u64;
    GateCounts {
        toffoli: w + w * w / 4,
        cnot: if w == 0 { 0 } else { 4 * (w - 1) + w * w / 2 },
        ..GateCounts::default()
    }
}
