//! Toffoli-free primitives: additions and GF(2)-linear maps.

use crate::circuit_ir::{Circuit, Reg, RegKind};
use crate::gf2_field::{BinaryPoly, FieldSpec};
use crate::gf2_linalg::{plu_decompose, squaring_matrix, BitMatrix, PLUFactors};

use super::Result;

/// Variants of register addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdditionMode {
    /// `|f, g⟩ → |f, f + g⟩`.
    Plain,
    /// `|g⟩ → |g + c⟩`.
    Constant(BinaryPoly),
    /// `|b, f, g⟩ → |b, f, g + b·f⟩`.
    Controlled,
    /// `|b, g⟩ → |b, g + b·c⟩`.
    ControlledConstant(BinaryPoly),
}

/// Emits an addition. `src` is ignored for the constant modes and `ctrl` for
/// the uncontrolled ones.
pub fn emit_addition(c: &mut Circuit, mode: &AdditionMode, ctrl: Option<u32>, src: Option<Reg>, dst: Reg) {
    let n = dst.len();
    match mode {
        AdditionMode::Plain => {
            let src = src.expect("plain addition needs a source");
            for i in 0..n {
                c.cnot(src.q(i), dst.q(i));
            }
        }
        AdditionMode::Constant(k) => {
            for i in k.support().into_iter().filter(|&i| i < n) {
                c.x(dst.q(i));
            }
        }
        AdditionMode::Controlled => {
            let src = src.expect("controlled addition needs a source");
            let b = ctrl.expect("controlled addition needs a control");
            for i in 0..n {
                c.ccx(b, src.q(i), dst.q(i));
            }
        }
        AdditionMode::ControlledConstant(k) => {
            let b = ctrl.expect("controlled addition needs a control");
            for i in k.support().into_iter().filter(|&i| i < n) {
                c.cnot(b, dst.q(i));
            }
        }
    }
}

/// Standalone addition circuit on `n`-qubit registers.
///
/// Register order: `ctrl` (controlled modes), `f` (non-constant modes), `g`.
pub fn synth_addition(mode: &AdditionMode, n: usize) -> Circuit {
    let mut c = Circuit::new();
    let ctrl = matches!(mode, AdditionMode::Controlled | AdditionMode::ControlledConstant(_))
        .then(|| c.add_register("ctrl", 1, RegKind::Input).q(0));
    let src = matches!(mode, AdditionMode::Plain | AdditionMode::Controlled)
        .then(|| c.add_register("f", n, RegKind::Input));
    let dst = c.add_register("g", n, RegKind::Output);
    emit_addition(&mut c, mode, ctrl, src, dst);
    c
}

/// `dst += M·src` with one CNOT per nonzero entry.
pub fn emit_out_of_place_mul(c: &mut Circuit, m: &BitMatrix, src: Reg, dst: Reg) {
    assert_eq!(m.cols(), src.len());
    assert_eq!(m.rows(), dst.len());
    for r in 0..m.rows() {
        for k in m.row_support(r) {
            c.cnot(src.q(k), dst.q(r));
        }
    }
}

/// Standalone `|g, f⟩ → |g, f + M·g⟩`.
pub fn synth_out_of_place_mul(m: &BitMatrix) -> Circuit {
    let mut c = Circuit::new();
    let g = c.add_register("g", m.cols(), RegKind::Input);
    let f = c.add_register("f", m.rows(), RegKind::Output);
    emit_out_of_place_mul(&mut c, m, g, f);
    c
}

/// A CNOT/SWAP program on local qubit indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearOps {
    /// `(a, b, swap)`: CNOT `a → b`, or SWAP when the flag is set.
    pub ops: Vec<(u32, u32, bool)>,
}

impl LinearOps {
    pub fn cnots(&self) -> usize {
        self.ops.iter().filter(|o| !o.2).count()
    }

    pub fn swaps(&self) -> usize {
        self.ops.iter().filter(|o| o.2).count()
    }

    pub fn push_cnot(&mut self, a: usize, b: usize) {
        self.ops.push((a as u32, b as u32, false));
    }

    pub fn push_swap(&mut self, a: usize, b: usize) {
        if a != b {
            self.ops.push((a as u32, b as u32, true));
        }
    }

    pub fn extend(&mut self, other: &LinearOps) {
        self.ops.extend_from_slice(&other.ops);
    }

    /// In-place `v ↦ U·v` for upper unit-triangular `U` on `v[0..U.rows]`.
    pub fn push_upper(&mut self, u: &BitMatrix) {
        for i in 0..u.rows() {
            for j in u.row_support(i) {
                if j > i {
                    self.push_cnot(j, i);
                }
            }
        }
    }

    /// In-place `v ↦ L·v` for square unit lower-triangular `L`.
    pub fn push_lower(&mut self, l: &BitMatrix) {
        for i in (0..l.rows()).rev() {
            for j in l.row_support(i) {
                if j < i {
                    self.push_cnot(j, i);
                }
            }
        }
    }

    /// Applies `P = s_0·…·s_k`, so `s_k` acts first.
    pub fn push_permutation(&mut self, swaps: &[(usize, usize)]) {
        for &(a, b) in swaps.iter().rev() {
            self.push_swap(a, b);
        }
    }

    /// In-place `v ↦ P·L·U·v`.
    pub fn from_plu(f: &PLUFactors) -> Self {
        let mut ops = Self::default();
        ops.push_upper(&f.u);
        ops.push_lower(&f.l);
        ops.push_permutation(&f.swaps);
        ops
    }

    /// Emits on `reg`, forward or as the inverse program.
    pub fn emit(&self, c: &mut Circuit, reg: Reg, inverse: bool) {
        let mut go = |&(a, b, s): &(u32, u32, bool)| {
            let (qa, qb) = (reg.q(a as usize), reg.q(b as usize));
            if s {
                c.swap(qa, qb)
            } else {
                c.cnot(qa, qb)
            }
        };
        if inverse {
            self.ops.iter().rev().for_each(&mut go);
        } else {
            self.ops.iter().for_each(&mut go);
        }
    }

    /// Applies the program to a classical vector.
    pub fn apply(&self, v: &mut [bool]) {
        for &(a, b, s) in &self.ops {
            if s {
                v.swap(a as usize, b as usize);
            } else if v[a as usize] {
                v[b as usize] ^= true;
            }
        }
    }
}

/// Emits the in-place map `reg ↦ M·reg`.
pub fn emit_in_place(c: &mut Circuit, m: &BitMatrix, reg: Reg) -> Result<()> {
    let f = plu_decompose(m)?;
    LinearOps::from_plu(&f).emit(c, reg, false);
    Ok(())
}

/// Emits the in-place map `reg ↦ M^{-1}·reg`.
pub fn emit_in_place_inverse(c: &mut Circuit, m: &BitMatrix, reg: Reg) -> Result<()> {
    let f = plu_decompose(m)?;
    LinearOps::from_plu(&f).emit(c, reg, true);
    Ok(())
}

/// Standalone in-place `|f⟩ → |M·f⟩` from CNOTs and SWAPs.
pub fn synth_in_place_mul(m: &BitMatrix) -> Result<Circuit> {
    let mut c = Circuit::new();
    let f = c.add_register("f", m.rows(), RegKind::Input);
    emit_in_place(&mut c, m, f)?;
    Ok(c)
}

/// How a `2^k`-th power map was realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareChoice {
    Fused,
    Sequential,
}

/// Cheapest program for `f ↦ f^{2^k}`: either `k` single squarings or one
/// fused matrix. Ties go to the fused form.
pub fn square_ops(field: &FieldSpec, k: usize) -> Result<(LinearOps, SquareChoice)> {
    let fused = LinearOps::from_plu(&plu_decompose(&squaring_matrix(field, k))?);
    if k <= 1 {
        return Ok((fused, SquareChoice::Fused));
    }
    let single = LinearOps::from_plu(&plu_decompose(&squaring_matrix(field, 1))?);
    if single.cnots() * k < fused.cnots() {
        let mut seq = LinearOps::default();
        for _ in 0..k {
            seq.extend(&single);
        }
        Ok((seq, SquareChoice::Sequential))
    } else {
        Ok((fused, SquareChoice::Fused))
    }
}

/// Standalone in-place `|f⟩ → |f^{2^k}⟩`.
pub fn synth_square(field: &FieldSpec, k: usize) -> Result<Circuit> {
    let (ops, choice) = square_ops(field, k)?;
    let mut c = Circuit::new();
    let f = c.add_register("f", field.n, RegKind::Input);
    ops.emit(&mut c, f, false);
    c.note(
        "square",
        match choice {
            SquareChoice::Fused => "fused",
            SquareChoice::Sequential => "sequential",
        },
    );
    Ok(c)
}
