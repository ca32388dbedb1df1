//! Inversion `f ↦ f^{2^n − 2}` driven by an addition chain.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::circuit_ir::{Circuit, GateCounts, Reg, RegKind};
use crate::gf2_field::{FieldSpec, ModulusSet};

use super::chain::{AdditionChain, StepKind};
use super::crt::{default_modulus_set, CrtPlan};
use super::karatsuba::FormulaTable;
use super::linear::{square_ops, LinearOps};
use super::{ArithError, Result};

/// A register in the schedule: the input or a pool slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    Input,
    Pool(usize),
}

#[derive(Clone, Copy, Debug)]
enum Op {
    /// Apply `x ↦ x^{2^k}` (or its inverse for negative `k`).
    Square(Slot, i64),
    /// `dst ^= src`.
    Copy(Slot, Slot),
    /// `t += a·b`.
    Mult(Slot, Slot, Slot),
}

struct Schedule {
    ops: Vec<Op>,
    peak: usize,
    output: usize,
    garbage: Vec<usize>,
    clean: Vec<usize>,
    modmults: usize,
}

/// Register holding `g_ν = f^{2^ν − 1}` (up to a tracked squaring shift).
#[derive(Clone, Copy, Debug)]
struct Held {
    slot: Slot,
}

struct Planner {
    ops: Vec<Op>,
    free: Vec<bool>,
    shifts: HashMap<Slot, i64>,
    modmults: usize,
}

impl Planner {
    fn alloc(&mut self) -> usize {
        if let Some(i) = self.free.iter().position(|&f| f) {
            self.free[i] = false;
            i
        } else {
            self.free.push(false);
            self.free.len() - 1
        }
    }

    fn release(&mut self, i: usize) {
        self.free[i] = true;
        self.shifts.remove(&Slot::Pool(i));
    }

    fn shift(&self, s: Slot) -> i64 {
        self.shifts.get(&s).copied().unwrap_or(0)
    }

    fn align(&mut self, s: Slot, target: i64) {
        let cur = self.shift(s);
        if cur != target {
            self.ops.push(Op::Square(s, target - cur));
            self.shifts.insert(s, target);
        }
    }

    fn mult(&mut self, a: Slot, b: Slot, t: Slot) {
        self.ops.push(Op::Mult(a, b, t));
        self.modmults += 1;
    }

    /// Runs `t ^= product` for the given decomposition. `t` must already sit
    /// at the shift of the lower operand when clearing.
    fn product(&mut self, kind: StepKind, held: &BTreeMap<usize, Held>, t: Slot) {
        match kind {
            StepKind::Doubled { mu } => {
                let src = held[&mu].slot;
                let s = self.shift(src);
                let h = self.alloc();
                let hs = Slot::Pool(h);
                self.ops.push(Op::Copy(src, hs));
                self.shifts.insert(hs, s);
                self.align(hs, s + mu as i64);
                self.mult(src, hs, t);
                self.align(hs, s);
                self.ops.push(Op::Copy(src, hs));
                self.release(h);
            }
            StepKind::Added { alpha, beta } => {
                let a = held[&alpha].slot;
                let b = held[&beta].slot;
                let s = self.shift(a);
                self.align(b, s + alpha as i64);
                self.mult(a, b, t);
            }
        }
    }

    fn lower_operand(&self, kind: StepKind, held: &BTreeMap<usize, Held>) -> i64 {
        let v = match kind {
            StepKind::Doubled { mu } => mu,
            StepKind::Added { alpha, .. } => alpha,
        };
        self.shift(held[&v].slot)
    }
}

fn plan(chain: &AdditionChain, clearing: bool) -> Result<Schedule> {
    let mut p = Planner {
        ops: Vec::new(),
        free: Vec::new(),
        shifts: HashMap::new(),
        modmults: 0,
    };
    let mut held: BTreeMap<usize, Held> = BTreeMap::new();
    held.insert(1, Held { slot: Slot::Input });
    let mut peak = 0;
    for step in chain.steps() {
        if step.clear {
            if !clearing {
                continue;
            }
            let t = held
                .get(&step.value)
                .ok_or_else(|| ArithError::Chain(format!("clearing step {} references a dead term", step.value)))?
                .slot;
            let target = p.lower_operand(step.kind, &held);
            p.align(t, target);
            p.product(step.kind, &held, t);
            held.remove(&step.value);
            if let Slot::Pool(i) = t {
                p.release(i);
            }
        } else {
            let t = p.alloc();
            let ts = Slot::Pool(t);
            let s = p.lower_operand(step.kind, &held);
            p.shifts.insert(ts, s);
            p.product(step.kind, &held, ts);
            held.insert(step.value, Held { slot: ts });
        }
        peak = peak.max(p.free.len());
    }
    let top = chain.target();
    let out_slot = held[&top].slot;
    // f^{-1} = g_{n−1}^2.
    p.align(out_slot, 1);
    let Slot::Pool(output) = out_slot else {
        return Err(ArithError::Chain("chain never leaves the input".into()));
    };
    let mut garbage: Vec<usize> = held
        .values()
        .filter_map(|h| match h.slot {
            Slot::Pool(i) if i != output => Some(i),
            _ => None,
        })
        .collect();
    garbage.sort_unstable();
    let clean: Vec<usize> = (0..p.free.len()).filter(|i| p.free[*i]).collect();
    Ok(Schedule {
        ops: p.ops,
        peak,
        output,
        garbage,
        clean,
        modmults: p.modmults,
    })
}

/// Register placement of an inversion circuit.
#[derive(Clone, Debug, Serialize)]
pub struct InversionLayout {
    pub input: Reg,
    pub output: Reg,
    /// Concatenation of the garbage registers, possibly empty.
    pub garbage: Reg,
    /// Registers returned to zero.
    pub clean: Reg,
}

#[derive(Clone, Debug, Serialize)]
pub struct InversionReport {
    pub n: usize,
    pub clearing: bool,
    pub modmults: usize,
    /// Peak number of `n`-qubit work registers.
    pub registers: usize,
    pub modmult_toffoli: u64,
    pub counts: GateCounts,
    pub layout: InversionLayout,
}

/// Inversion with the default modulus set and bundled formulas.
pub fn synth_flt_inversion(field: &FieldSpec, chain: &AdditionChain, clearing: bool) -> Result<Circuit> {
    let set = default_modulus_set(field.n)?;
    let table = FormulaTable::builtin();
    Ok(synth_flt_inversion_with(field, chain, clearing, &set, &table, true)?.0)
}

/// Inversion with explicit multiplier configuration. With `record = false`
/// only counts are kept.
pub fn synth_flt_inversion_with(
    field: &FieldSpec,
    chain: &AdditionChain,
    clearing: bool,
    set: &ModulusSet,
    formulas: &FormulaTable,
    record: bool,
) -> Result<(Circuit, InversionReport)> {
    let n = field.n;
    chain.check_for(n)?;
    let sched = plan(chain, clearing)?;
    let mm = CrtPlan::new(field, set, formulas)?;

    let mut c = Circuit::with_recording(record);
    let input = c.add_register("f", n, RegKind::Input);
    let mut slot_reg: Vec<Option<Reg>> = vec![None; sched.peak];
    let mut place = |c: &mut Circuit, name: &str, slots: &[usize], kind: RegKind| -> Reg {
        if slots.is_empty() {
            return Reg::new(c.num_qubits() as u32, 0);
        }
        let r = c.add_register(name, n * slots.len(), kind);
        for (k, &s) in slots.iter().enumerate() {
            slot_reg[s] = Some(r.slice(k * n, (k + 1) * n));
        }
        r
    };
    let (output, garbage) = if clearing {
        let o = place(&mut c, "inv", &[sched.output], RegKind::Output);
        let g = place(&mut c, "garbage", &sched.garbage, RegKind::AncillaGarbage);
        (o, g)
    } else {
        let g = place(&mut c, "garbage", &sched.garbage, RegKind::AncillaGarbage);
        let o = place(&mut c, "inv", &[sched.output], RegKind::Output);
        (o, g)
    };
    let clean = place(&mut c, "clean", &sched.clean, RegKind::AncillaClean);
    let reg = |s: Slot| match s {
        Slot::Input => input,
        Slot::Pool(i) => slot_reg[i].expect("every slot is placed"),
    };

    let mut squares: HashMap<u64, LinearOps> = HashMap::new();
    for op in &sched.ops {
        match *op {
            Op::Square(s, k) => {
                let key = k.unsigned_abs();
                if let std::collections::hash_map::Entry::Vacant(e) = squares.entry(key) {
                    e.insert(square_ops(field, key as usize)?.0);
                }
                squares[&key].emit(&mut c, reg(s), k < 0);
            }
            Op::Copy(a, b) => {
                let (ra, rb) = (reg(a), reg(b));
                for i in 0..n {
                    c.cnot(ra.q(i), rb.q(i));
                }
            }
            Op::Mult(a, b, t) => {
                c.begin_group("modmult");
                mm.emit(&mut c, reg(a), reg(b), reg(t));
                c.end_group();
            }
        }
    }
    c.note("modmults", sched.modmults.to_string());
    let report = InversionReport {
        n,
        clearing,
        modmults: sched.modmults,
        registers: sched.peak,
        modmult_toffoli: mm.toffoli(),
        counts: c.counts(),
        layout: InversionLayout {
            input,
            output,
            garbage,
            clean,
        },
    };
    Ok((c, report))
}
