//! Fits the active-volume weights file.
//!
//! CNOT, Toffoli and swap weights come from a least-squares fit of the
//! multiplier counts to target multiplier AV totals. The QROM per-bit weight
//! is then fitted to target phase-estimation AV totals with the point
//! addition costed by the first three weights.
//!
//! ```text
//! cargo run --release --example calibrate_av -- crates/core/data/av_weights.txt
//! ```

use gf2shor::arith_synth::{default_modulus_set, synth_crt_modmult_counts, AdditionChain, FormulaTable};
use gf2shor::ecc::{synth_ecpointadd_with, CurveSpec};
use gf2shor::gf2_field::FieldSpec;
use gf2shor::shor_cost::{pe_cost, AVWeights, LogicalCost};
use nalgebra::{DMatrix, DVector};

const FIELDS: [usize; 4] = [163, 233, 283, 571];
const MODMULT_AV: [f64; 4] = [4.91e5, 9.70e5, 1.38e6, 5.33e6];
/// (window size, total AV) without and with 48 precomputed bits.
const PE_AV: [[(usize, f64); 2]; 4] = [
    [(13, 9.50e8), (13, 6.43e8)],
    [(14, 2.78e9), (14, 2.24e9)],
    [(15, 5.30e9), (14, 4.31e9)],
    [(16, 4.22e10), (15, 3.78e10)],
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1);
    let formulas = FormulaTable::builtin();

    // Rows scaled by 1/target so the fit minimizes relative error.
    let mut a = DMatrix::<f64>::zeros(4, 3);
    let mut b = DVector::<f64>::zeros(4);
    for (i, &n) in FIELDS.iter().enumerate() {
        let rep = synth_crt_modmult_counts(&FieldSpec::standard(n)?, &default_modulus_set(n)?, &formulas)?;
        let c = rep.counts;
        let t = MODMULT_AV[i];
        a[(i, 0)] = c.cnot as f64 / t;
        a[(i, 1)] = c.toffoli as f64 / t;
        a[(i, 2)] = c.swap as f64 / t;
        b[i] = 1.0;
    }
    // Columns with a negative weight are pinned to zero and the rest refitted.
    let mut active: Vec<usize> = (0..3).collect();
    let x = loop {
        let sub = a.select_columns(&active);
        let y = sub.svd(true, true).solve(&b, 1e-12)?;
        match (0..active.len()).find(|&j| y[j] < 0.0) {
            Some(j) => {
                active.remove(j);
            }
            None => {
                let mut x = [0.0; 3];
                for (j, &c) in active.iter().enumerate() {
                    x[c] = y[j];
                }
                break x;
            }
        }
    };
    let (cnot, toffoli, swap) = (x[0], x[1], x[2]);
    println!("fit: cnot {cnot:.4} toffoli {toffoli:.3} swap {swap:.3}");
    for i in 0..4 {
        let fit = (a[(i, 0)] * cnot + a[(i, 1)] * toffoli + a[(i, 2)] * swap) * MODMULT_AV[i];
        println!("  n={}: {fit:.4e} vs {:.2e}", FIELDS[i], MODMULT_AV[i]);
    }

    let mut w = AVWeights {
        cnot,
        toffoli,
        swap,
        not: 0.0,
        and_uncompute: 0.0,
        qrom_bit: 0.0,
    };
    // pe_cost is affine in qrom_bit: AV(q) = base + q·slope.
    let mut num = 0.0;
    let mut den = 0.0;
    let mut rows = Vec::new();
    for (i, &n) in FIELDS.iter().enumerate() {
        let curve = CurveSpec::named(&format!("K-{n}"))?;
        let (_, rep) = synth_ecpointadd_with(
            &curve,
            &default_modulus_set(n)?,
            &AdditionChain::standard(n)?,
            &formulas,
            false,
        )?;
        let pa = LogicalCost::from_counts(&rep.lowered, &w);
        println!("point add n={n}: AV {:.3e}", pa.active_volume);
        for (p, &(s, target)) in [0, 48].iter().zip(&PE_AV[i]) {
            let base = pe_cost(n, s, &pa, *p, &w)?.active_volume;
            let one = pe_cost(n, s, &pa, *p, &AVWeights { qrom_bit: 1.0, ..w })?.active_volume;
            let slope = one - base;
            num += slope * (target - base) / (target * target);
            den += slope * slope / (target * target);
            rows.push((n, *p, s, pa, target));
        }
    }
    w.qrom_bit = (num / den).max(0.0);
    println!("fit: qrom_bit {:.4}", w.qrom_bit);
    for (n, p, s, pa, target) in rows {
        let got = pe_cost(n, s, &pa, p, &w)?.active_volume;
        println!("  n={n} precomp={p} s={s}: {got:.3e} vs {target:.2e}");
    }

    if let Some(path) = out {
        let text = format!(
            "# Calibrated by examples/calibrate_av.rs; not first-principles constants.\n{}",
            w.to_text()
        );
        std::fs::write(&path, text)?;
        println!("wrote {path}");
    }
    Ok(())
}
