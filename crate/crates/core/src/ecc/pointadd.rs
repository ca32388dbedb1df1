//! Exception-complete in-place point addition
//! `|x1, y1, x2, y2, λ_r⟩ → |x3, y3, x2, y2, λ_r⟩`.
//!
//! Five flags track the special cases: `f1 = [x1 = x2]`,
//! `f2 = [y1 = x2 + y2]`, `f3 = [P1 = O]`, `f4 = [P2 = O]` and
//! `ctrl = ¬f3 ∧ ¬f4 ∧ ¬(f1 ∧ f2)`, the last selecting the arithmetic path.
//! The arithmetic runs in six stages, each recorded as a gate group
//! `stage1` … `stage6`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith_synth::{
    square_ops, synth_flt_inversion_with, AdditionChain, CrtPlan, FormulaTable, LinearOps,
};
use crate::circuit_ir::{Circuit, Control, GateCounts, Reg, RegKind};
use crate::gf2_field::{BinaryPoly, ModulusSet};

use super::{CurveSpec, Result};

/// Census counter names, in reporting order.
pub const CENSUS_KEYS: [&str; 8] = [
    "eq_test",
    "ntoffoli",
    "addition",
    "ctrl_addition",
    "inversion",
    "multiplication",
    "ctrl_const_addition",
    "squaring",
];

/// Published subroutine census of the point-addition circuit.
pub fn reference_census() -> BTreeMap<String, u64> {
    CENSUS_KEYS
        .iter()
        .zip([9, 30, 8, 6, 4, 8, 1, 2])
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

/// `flag ^= [a = b]`, optionally under extra positive controls.
///
/// Register order: `a`, `b`, `ctrl` (when `extra_controls > 0`), `flag`.
pub fn synth_equality_test(n: usize, extra_controls: usize) -> Circuit {
    let mut c = Circuit::new();
    let a = c.add_register("a", n, RegKind::Input);
    let b = c.add_register("b", n, RegKind::Input);
    let ctrl = (extra_controls > 0).then(|| c.add_register("ctrl", extra_controls, RegKind::Input));
    let flag = c.add_register("flag", 1, RegKind::Flag).q(0);
    let extra: Vec<Control> = ctrl.map(|r| r.qubits().into_iter().map(Control::on).collect()).unwrap_or_default();
    emit_equality(&mut c, a, b, &extra, flag);
    c
}

fn zero_controls(r: Reg) -> impl Iterator<Item = Control> {
    r.qubits().into_iter().map(Control::off)
}

fn emit_equality(c: &mut Circuit, a: Reg, b: Reg, extra: &[Control], target: u32) {
    for i in 0..a.len() {
        c.cnot(a.q(i), b.q(i));
    }
    let mut ctl = extra.to_vec();
    ctl.extend(zero_controls(b));
    c.mcx(ctl, target);
    for i in 0..a.len() {
        c.cnot(a.q(i), b.q(i));
    }
}

/// Register placement of the point-addition circuit.
#[derive(Clone, Debug, Serialize)]
pub struct PointAddLayout {
    /// `f1, f2, f3, f4, ctrl`.
    pub flags: Reg,
    /// One extra flag used for compound conditions.
    pub temp: Reg,
    pub x1: Reg,
    pub y1: Reg,
    pub x2: Reg,
    pub y2: Reg,
    pub lambda_r: Reg,
    pub lambda: Reg,
    /// Inversion workspace; also lowers the `2n`-control gates when idle.
    pub scratch: Reg,
    /// Product register, inside `scratch` when the inversion leaves a
    /// clean slot.
    pub product: Reg,
    /// Inversion output inside `scratch`.
    pub inverse: Reg,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointAddReport {
    pub n: usize,
    /// Counts with multi-controlled gates unlowered.
    pub counts: GateCounts,
    /// Counts after MCX lowering, including its ancillas.
    pub lowered: GateCounts,
    pub census: BTreeMap<String, u64>,
    pub inversion_toffoli: u64,
    pub multiplication_toffoli: u64,
    /// `inv·T_inv + mul·T_mul + (eq + ntoffoli)(n−1) + ctrl_add·n` from the
    /// measured census.
    pub census_toffoli: u64,
    pub stages: Vec<(String, GateCounts)>,
    pub layout: PointAddLayout,
}

/// Recorded point-addition circuit.
pub fn synth_ecpointadd(
    curve: &CurveSpec,
    set: &ModulusSet,
    chain: &AdditionChain,
    formulas: &FormulaTable,
) -> Result<Circuit> {
    Ok(synth_ecpointadd_with(curve, set, chain, formulas, true)?.0)
}

/// Point addition with a report; `record = false` keeps counts only.
pub fn synth_ecpointadd_with(
    curve: &CurveSpec,
    set: &ModulusSet,
    chain: &AdditionChain,
    formulas: &FormulaTable,
    record: bool,
) -> Result<(Circuit, PointAddReport)> {
    let field = &curve.field;
    let n = field.n;
    let mm = CrtPlan::new(field, set, formulas)?;
    let (inv, inv_rep) = synth_flt_inversion_with(field, chain, true, set, formulas, record)?;
    let sq = square_ops(field, 1)?.0;

    let mut c = Circuit::with_recording(record);
    let flags = c.add_register("flags", 5, RegKind::Flag);
    let temp = c.add_register("temp", 1, RegKind::Flag);
    let x1 = c.add_register("x1", n, RegKind::Output);
    let y1 = c.add_register("y1", n, RegKind::Output);
    let x2 = c.add_register("x2", n, RegKind::Input);
    let y2 = c.add_register("y2", n, RegKind::Input);
    let lambda_r = c.add_register("lambda_r", n, RegKind::Input);
    let lambda = c.add_register("lambda", n, RegKind::AncillaClean);
    let work = inv.num_qubits() - n;
    let scratch = c.add_register("scratch", work.max(2 * n), RegKind::AncillaClean);
    let in_scratch = |r: &Reg| {
        let o = r.offset as usize - n;
        scratch.slice(o, o + n)
    };
    let inverse = in_scratch(&inv_rep.layout.output);
    let product = if inv_rep.layout.clean.len() >= n {
        in_scratch(&inv_rep.layout.clean)
    } else {
        c.add_register("product", n, RegKind::AncillaClean)
    };
    let mut inv_map: Vec<u32> = x1.qubits();
    inv_map.extend((0..work).map(|i| scratch.q(i)));

    let layout = PointAddLayout {
        flags,
        temp,
        x1,
        y1,
        x2,
        y2,
        lambda_r,
        lambda,
        scratch,
        product,
        inverse,
    };
    let mut b = Builder {
        c,
        l: layout.clone(),
        mm: &mm,
        inv: &inv,
        inv_map,
        sq,
        a: curve.a.clone(),
        stages: Vec::new(),
    };
    b.build();

    let Builder { c, stages, .. } = b;
    let census: BTreeMap<String, u64> = CENSUS_KEYS
        .iter()
        .map(|k| (k.to_string(), c.tags().get(*k).copied().unwrap_or(0)))
        .collect();
    let inv_t = inv_rep.counts.toffoli;
    let mul_t = mm.toffoli();
    let nn = n as u64;
    let census_toffoli = census["inversion"] * inv_t
        + census["multiplication"] * mul_t
        + (census["eq_test"] + census["ntoffoli"]) * (nn - 1)
        + census["ctrl_addition"] * nn;
    let report = PointAddReport {
        n,
        counts: c.counts(),
        lowered: c.lowered_counts(),
        census,
        inversion_toffoli: inv_t,
        multiplication_toffoli: mul_t,
        census_toffoli,
        stages,
        layout,
    };
    Ok((c, report))
}

struct Builder<'a> {
    c: Circuit,
    l: PointAddLayout,
    mm: &'a CrtPlan,
    inv: &'a Circuit,
    inv_map: Vec<u32>,
    sq: LinearOps,
    a: BinaryPoly,
    stages: Vec<(String, GateCounts)>,
}

impl Builder<'_> {
    fn f(&self, i: usize) -> u32 {
        self.l.flags.q(i)
    }

    fn ctrl(&self) -> u32 {
        self.l.flags.q(4)
    }

    fn e(&self) -> u32 {
        self.l.temp.q(0)
    }

    fn stage(&mut self, k: usize, body: impl FnOnce(&mut Self)) {
        let before = self.c.counts().gates_only();
        self.c.begin_group(format!("stage{k}"));
        body(self);
        self.c.end_group();
        let delta = self.c.counts().gates_only() - before;
        self.stages.push((format!("stage{k}"), delta));
    }

    fn add(&mut self, src: Reg, dst: Reg) {
        for i in 0..src.len() {
            self.c.cnot(src.q(i), dst.q(i));
        }
        self.c.tag("addition");
    }

    /// `dst ^= ctl · src` as a row of Toffolis, tagged `tag`.
    fn cadd(&mut self, ctl: u32, src: Reg, dst: Reg, tag: &str) {
        for i in 0..src.len() {
            self.c.ccx(ctl, src.q(i), dst.q(i));
        }
        self.c.tag(tag);
    }

    fn mul(&mut self, a: Reg, b: Reg, t: Reg) {
        self.mm.emit(&mut self.c, a, b, t);
        self.c.tag("multiplication");
    }

    fn inversion(&mut self, inverse: bool) {
        if inverse {
            self.c.append_inverse(self.inv, &self.inv_map);
        } else {
            self.c.append(self.inv, &self.inv_map);
        }
        self.c.tag("inversion");
    }

    fn eq(&mut self, a: Reg, b: Reg, extra: &[Control], target: u32) {
        emit_equality(&mut self.c, a, b, extra, target);
        self.c.tag("eq_test");
    }

    /// `target ^= ⋀ extra ∧ [r = 0]` for one `n`-qubit register.
    fn zero_test(&mut self, r: Reg, extra: &[Control], target: u32) {
        let mut ctl = extra.to_vec();
        ctl.extend(zero_controls(r));
        self.c.mcx(ctl, target);
        self.c.tag("ntoffoli");
    }

    /// `target ^= [r = 0 ∧ s = 0]` over `2n` controls, lowered in place with
    /// the idle scratch register as AND ancillas.
    fn wide_zero_test(&mut self, r: Reg, s: Reg, target: u32) {
        let qs: Vec<u32> = r.qubits().into_iter().chain(s.qubits()).collect();
        let anc = self.l.scratch;
        let k = qs.len();
        assert!(k >= 3 && anc.len() >= k - 1, "scratch too small for the wide test");
        for &q in &qs {
            self.c.x(q);
        }
        self.c.and(qs[0], qs[1], anc.q(0));
        for i in 2..k {
            self.c.and(anc.q(i - 2), qs[i], anc.q(i - 1));
        }
        self.c.cnot(anc.q(k - 2), target);
        for i in (2..k).rev() {
            self.c.uand(anc.q(i - 2), qs[i], anc.q(i - 1));
        }
        self.c.uand(qs[0], qs[1], anc.q(0));
        for &q in &qs {
            self.c.x(q);
        }
    }

    /// `ctrl ^= ¬f3 ∧ ¬f4 ∧ ¬(f1 ∧ f2)`.
    fn toggle_ctrl(&mut self) {
        let (f1, f2, f3, f4, ctrl) = (self.f(0), self.f(1), self.f(2), self.f(3), self.ctrl());
        self.c.mcx(vec![Control::off(f3), Control::off(f4)], ctrl);
        self.c.mcx(
            vec![Control::on(f1), Control::on(f2), Control::off(f3), Control::off(f4)],
            ctrl,
        );
    }

    fn build(&mut self) {
        let l = self.l.clone();
        let (f1, f2, f3, f4) = (self.f(0), self.f(1), self.f(2), self.f(3));
        let ctrl = self.ctrl();
        let e = self.e();
        let (x1, y1, x2, y2, lr, lam, t, inv) = (l.x1, l.y1, l.x2, l.y2, l.lambda_r, l.lambda, l.product, l.inverse);

        self.stage(1, |b| {
            b.eq(x1, x2, &[], f1);
            b.add(x2, y2);
            b.eq(y1, y2, &[], f2);
            b.add(x2, y2);
            b.wide_zero_test(x1, y1, f3);
            b.c.tag_n("ntoffoli", 2);
            b.wide_zero_test(x2, y2, f4);
            b.c.tag_n("ntoffoli", 2);
            b.toggle_ctrl();
        });

        // λ into `lam` when ctrl = 1: quotient if x1 ≠ x2, λ_r otherwise.
        self.stage(2, |b| {
            b.add(x2, x1);
            b.cadd(ctrl, y2, y1, "ctrl_addition");
            // Clear f2 when y1 = x2 + y2 held on the generic path.
            b.eq(x2, y1, &[Control::on(ctrl)], f2);
            b.c.ccx(ctrl, f1, e);
            b.cadd(e, lr, lam, "ntoffoli");
            b.c.ccx(ctrl, f1, e);
            b.zero_test(x1, &[Control::on(ctrl)], f1);
            b.inversion(false);
            b.mul(inv, y1, t);
            b.cadd(ctrl, t, lam, "ctrl_addition");
            b.mul(inv, y1, t);
            b.inversion(true);
        });

        self.stage(3, |b| {
            b.mul(lam, x1, t);
            b.add(t, y1);
            b.mul(lam, x1, t);
            b.cadd(ctrl, x2, x1, "ctrl_addition");
            for i in b.a.support().into_iter().filter(|&i| i < x1.len()) {
                b.c.cnot(ctrl, x1.q(i));
            }
            b.c.tag("ctrl_const_addition");
        });

        self.stage(4, |b| {
            b.sq.emit(&mut b.c, lam, false);
            b.c.tag("squaring");
            b.add(lam, x1);
            b.sq.emit(&mut b.c, lam, true);
            b.c.tag("squaring");
            b.add(lam, x1);
            b.mul(lam, x1, t);
            b.add(t, y1);
            b.mul(lam, x1, t);
        });

        // Uncompute λ from (x2 + x3, y2 + y3 + x3); λ_r when x2 + x3 = 0.
        self.stage(5, |b| {
            b.inversion(false);
            b.mul(inv, y1, t);
            b.cadd(ctrl, t, lam, "ctrl_addition");
            b.zero_test(x1, &[Control::on(ctrl)], e);
            b.cadd(e, lr, lam, "ntoffoli");
            b.zero_test(x1, &[Control::on(ctrl)], e);
            b.mul(inv, y1, t);
            b.inversion(true);
            b.add(x2, x1);
            b.cadd(ctrl, x1, y1, "ctrl_addition");
            b.cadd(ctrl, y2, y1, "ctrl_addition");
        });

        self.stage(6, |b| {
            b.toggle_ctrl();
            // f1 and f2 set only through a zero coordinate next to O.
            b.zero_test(x1, &[Control::on(f4), Control::off(f3)], f1);
            b.zero_test(x2, &[Control::on(f3), Control::off(f4)], f1);
            b.zero_test(y1, &[Control::on(f4), Control::off(f3)], f2);
            b.eq(x2, y2, &[], e);
            b.c.mcx(vec![Control::on(f3), Control::off(f4), Control::on(e)], f2);
            b.eq(x2, y2, &[], e);
            // O + P2.
            b.cadd(f3, x2, x1, "ntoffoli");
            b.cadd(f3, y2, y1, "ntoffoli");
            // P1 = −P2, including O + O.
            b.cadd(f1, x2, x1, "ntoffoli");
            b.cadd(f1, x2, y1, "ntoffoli");
            b.cadd(f1, y2, y1, "ntoffoli");
            b.c.cnot(f2, f1);
            b.wide_zero_test(x1, y1, f2);
            b.c.tag_n("ntoffoli", 2);
            // f3 = [P3 = P2].
            b.add_raw(x2, x1);
            b.add_raw(y2, y1);
            b.wide_zero_test(x1, y1, f3);
            b.add_raw(x2, x1);
            b.add_raw(y2, y1);
            b.c.tag_n("eq_test", 2);
            b.wide_zero_test(x2, y2, f4);
            b.c.tag_n("ntoffoli", 2);
        });
    }

    fn add_raw(&mut self, src: Reg, dst: Reg) {
        for i in 0..src.len() {
            self.c.cnot(src.q(i), dst.q(i));
        }
    }
}
