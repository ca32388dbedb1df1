//! CRT-based modular multiplication `|f, g, h⟩ → |f, g, h + f·g mod p⟩`.

use serde::Serialize;

use crate::circuit_ir::{Circuit, GateCounts, Reg, RegKind};
use crate::gf2_field::{
    crt_constants, enumerate_irreducibles, validate_modulus_set, BinaryPoly, FieldSpec, ModulusFactor,
    ModulusSet,
};
use crate::gf2_linalg::{
    correction_matrix, crt_recombination_matrix, plu_decompose_tall, reduction_matrix, BitMatrix,
};

use super::correction::{correction_counts, emit_correction};
use super::karatsuba::{emit_kmult, reduced_r, FormulaTable, KaratsubaFormula};
use super::linear::LinearOps;
use super::{ArithError, Result};

/// Largest factor degree handled by a single Karatsuba formula; larger
/// factors recurse into an inner CRT multiplication.
pub const MAX_FORMULA_DEGREE: usize = 8;

#[derive(Clone, Debug)]
enum Product {
    Leaf {
        formula: KaratsubaFormula,
        r_red: BitMatrix,
    },
    Inner(Box<CrtPlan>),
}

#[derive(Clone, Debug)]
struct FactorPlan {
    d: usize,
    /// `G` with `G·(r, 0) = Q_i·r`; its inverse runs first.
    wrap: LinearOps,
    product: Product,
}

/// Precomputed multiplier for one `(p, modulus set)` pair, reusable across
/// emissions.
#[derive(Clone, Debug)]
pub struct CrtPlan {
    pub n: usize,
    pub p: BinaryPoly,
    pub set: ModulusSet,
    factors: Vec<FactorPlan>,
    /// `transitions[0]` reduces for the first factor, `transitions[i]` moves
    /// from factor `i−1` to `i`, the last one restores the operand.
    transitions: Vec<LinearOps>,
    correction: Option<LinearOps>,
}

fn padded_reduction(m_i: &BinaryPoly, n: usize) -> Result<BitMatrix> {
    let d = m_i.degree().unwrap_or(0);
    let red = reduction_matrix(m_i, n)?;
    let mut a = BitMatrix::zeros(n, n);
    for r in 0..d {
        for c in red.row_support(r) {
            a.set(r, d + c, true);
        }
    }
    Ok(a)
}

/// `G` for a tall full-rank `q` (`n×d`): `G·(r, 0) = q·r`.
fn wrap_ops(q: &BitMatrix, index: usize) -> Result<LinearOps> {
    let (n, d) = (q.rows(), q.cols());
    if q.rank() < d {
        return Err(ArithError::RankDeficient { index });
    }
    let f = plu_decompose_tall(q)?;
    let l_top = f.l.submatrix(0, d, 0, d);
    let tail = |ops: &mut LinearOps, m: &BitMatrix| {
        for r in 0..n - d {
            for c in m.row_support(r) {
                ops.push_cnot(c, d + r);
            }
        }
    };
    let mut a = LinearOps::default();
    let mut b = LinearOps::default();
    if n > d {
        let l_bot = f.l.submatrix(d, n, 0, d);
        tail(&mut a, &l_bot.mul(&f.u));
        a.push_upper(&f.u);
        b.push_upper(&f.u);
        tail(&mut b, &l_bot);
    } else {
        a.push_upper(&f.u);
        b.push_upper(&f.u);
    }
    for ops in [&mut a, &mut b] {
        ops.push_lower(&l_top);
        ops.push_permutation(&f.swaps);
    }
    Ok(if b.cnots() < a.cnots() { b } else { a })
}

/// Inner modulus set for a factor of degree `d`: squares of the two linear
/// irreducibles, then irreducibles of increasing degree, until the product
/// degree reaches `2d − 2`.
pub fn inner_modulus_set(d: usize) -> ModulusSet {
    let mut factors = Vec::new();
    let mut deg = 0;
    'outer: for k in 1.. {
        for base in enumerate_irreducibles(k) {
            let exp = if k == 1 { 2 } else { 1 };
            let f = ModulusFactor::new(base, exp);
            deg += f.degree();
            factors.push(f);
            if deg + 2 >= 2 * d {
                break 'outer;
            }
        }
    }
    ModulusSet::new(d, factors)
}

impl CrtPlan {
    pub fn new(field: &FieldSpec, set: &ModulusSet, table: &FormulaTable) -> Result<Self> {
        validate_modulus_set(set, field.n)?;
        Self::build(&field.p, set, table)
    }

    fn build(p: &BinaryPoly, set: &ModulusSet, table: &FormulaTable) -> Result<Self> {
        let n = p.degree().unwrap_or(0);
        if set.n != n {
            return Err(ArithError::DegreeMismatch {
                formula: set.n,
                modulus: n,
            });
        }
        let consts = crt_constants(set)?;
        let mut factors = Vec::with_capacity(set.factors.len());
        let mut transitions = Vec::with_capacity(set.factors.len() + 1);
        let mut prev: Option<BitMatrix> = None;
        for (i, (fac, q_i)) in set.factors.iter().zip(&consts).enumerate() {
            let d = fac.degree();
            let q = crt_recombination_matrix(q_i, d, &set.m, p);
            let wrap = wrap_ops(&q, i)?;
            let product = if d <= MAX_FORMULA_DEGREE {
                let formula = table.get(d)?;
                let r_red = reduced_r(&formula, &fac.modulus)?;
                Product::Leaf { formula, r_red }
            } else {
                let inner = inner_modulus_set(d);
                Product::Inner(Box::new(Self::build(&fac.modulus, &inner, table)?))
            };
            factors.push(FactorPlan { d, wrap, product });

            let a = padded_reduction(&fac.modulus, n)?;
            let step = match &prev {
                None => a.clone(),
                Some(b) => b.add(&a).add(&a.mul(b)),
            };
            let mut ops = LinearOps::default();
            ops.push_upper(&step);
            transitions.push(ops);
            prev = Some(a);
        }
        if let Some(last) = prev {
            let mut ops = LinearOps::default();
            ops.push_upper(&last);
            transitions.push(ops);
        }
        let correction = if set.omega > 0 {
            let h_inf = correction_matrix(set, p)?;
            Some(wrap_ops(&h_inf, set.factors.len())?)
        } else {
            None
        };
        Ok(Self {
            n,
            p: p.clone(),
            set: set.clone(),
            factors,
            transitions,
            correction,
        })
    }

    pub fn omega(&self) -> usize {
        self.set.omega
    }

    /// Toffoli count implied by the plan.
    pub fn toffoli(&self) -> u64 {
        let mut t = correction_counts(self.set.omega).toffoli;
        for f in &self.factors {
            t += match &f.product {
                Product::Leaf { formula, r_red } => (0..formula.v())
                    .filter(|&k| !r_red.column_support(k).is_empty())
                    .count() as u64,
                Product::Inner(inner) => inner.toffoli(),
            };
        }
        t
    }

    /// Factor degrees paired with the Toffoli cost of their sub-products.
    pub fn factor_costs(&self) -> Vec<(usize, u64)> {
        self.factors
            .iter()
            .map(|f| {
                let t = match &f.product {
                    Product::Leaf { formula, .. } => formula.v() as u64,
                    Product::Inner(inner) => inner.toffoli(),
                };
                (f.d, t)
            })
            .collect()
    }

    /// Formula sources used, by operand size.
    pub fn formula_sources(&self) -> Vec<(usize, String)> {
        let mut out: Vec<(usize, String)> = Vec::new();
        for f in &self.factors {
            match &f.product {
                Product::Leaf { formula, .. } => out.push((formula.d, formula.source.to_string())),
                Product::Inner(inner) => out.extend(inner.formula_sources()),
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Emits the multiplier on `n`-qubit registers.
    pub fn emit(&self, c: &mut Circuit, f: Reg, g: Reg, h: Reg) {
        for (i, fac) in self.factors.iter().enumerate() {
            self.transitions[i].emit(c, f, false);
            self.transitions[i].emit(c, g, false);
            fac.wrap.emit(c, h, true);
            let (fs, gs, hs) = (f.slice(0, fac.d), g.slice(0, fac.d), h.slice(0, fac.d));
            match &fac.product {
                Product::Leaf { formula, r_red } => emit_kmult(c, formula, r_red, fs, gs, hs),
                Product::Inner(inner) => inner.emit(c, fs, gs, hs),
            }
            fac.wrap.emit(c, h, false);
        }
        if let Some(last) = self.transitions.last() {
            last.emit(c, f, false);
            last.emit(c, g, false);
        }
        if let Some(wrap) = &self.correction {
            let omega = self.set.omega;
            wrap.emit(c, h, true);
            emit_correction(c, f, g, h.slice(0, omega));
            wrap.emit(c, h, false);
        }
    }
}

/// Summary of one synthesized multiplier.
#[derive(Clone, Debug, Serialize)]
pub struct ModmultReport {
    pub n: usize,
    pub factors: usize,
    pub omega: usize,
    pub counts: GateCounts,
    pub formula_sources: Vec<(usize, String)>,
}

fn modmult_registers(c: &mut Circuit, n: usize) -> (Reg, Reg, Reg) {
    let f = c.add_register("f", n, RegKind::Input);
    let g = c.add_register("g", n, RegKind::Input);
    let h = c.add_register("h", n, RegKind::Output);
    (f, g, h)
}

/// Full gate list for `|f, g, h⟩ → |f, g, h + f·g mod p⟩`.
pub fn synth_crt_modmult(field: &FieldSpec, set: &ModulusSet, formulas: &FormulaTable) -> Result<Circuit> {
    let plan = CrtPlan::new(field, set, formulas)?;
    let mut c = Circuit::new();
    let (f, g, h) = modmult_registers(&mut c, field.n);
    plan.emit(&mut c, f, g, h);
    Ok(c)
}

/// Counts of [`synth_crt_modmult`] without storing gates.
pub fn synth_crt_modmult_counts(
    field: &FieldSpec,
    set: &ModulusSet,
    formulas: &FormulaTable,
) -> Result<ModmultReport> {
    let plan = CrtPlan::new(field, set, formulas)?;
    let mut c = Circuit::counts_only();
    let (f, g, h) = modmult_registers(&mut c, field.n);
    plan.emit(&mut c, f, g, h);
    Ok(ModmultReport {
        n: field.n,
        factors: set.factors.len(),
        omega: set.omega,
        counts: c.counts(),
        formula_sources: plan.formula_sources(),
    })
}

/// Greedy modulus set for operands of `n` terms with `ω = 0` where
/// possible: squared linear factors (when `n > 2`), then irreducibles of
/// increasing degree below `n`.
pub fn auto_modulus_set(n: usize) -> ModulusSet {
    let mut factors = Vec::new();
    let mut deg = 0;
    'outer: for k in 1..n {
        for base in enumerate_irreducibles(k) {
            let exp = if k == 1 && n > 2 { 2 } else { 1 };
            let f = ModulusFactor::new(base, exp);
            deg += f.degree();
            factors.push(f);
            if deg + 1 >= 2 * n {
                break 'outer;
            }
        }
    }
    ModulusSet::new(n, factors)
}

/// The bundled set for standard sizes, otherwise [`auto_modulus_set`].
pub fn default_modulus_set(n: usize) -> Result<ModulusSet> {
    match crate::data::standard_modulus_set(n) {
        Ok(set) => Ok(set),
        Err(crate::gf2_field::FieldError::UnsupportedDegree(_)) => Ok(auto_modulus_set(n)),
        Err(e) => Err(e.into()),
    }
}
