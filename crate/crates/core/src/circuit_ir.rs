//! Reversible circuit representation, counting, lowering and a basis-state
//! simulator.
//!
//! Circuits can be built in counts-only mode, in which gates are tallied but
//! not stored. Large syntheses use this to report exact totals cheaply.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("input has {got} bits, circuit has {expected} qubits")]
    LengthMismatch { expected: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("gate {index}: AND target q[{target}] was not clean")]
    DirtyAndTarget { index: usize, target: u32 },
    #[error("gate {index}: AND uncompute on q[{target}] does not match its controls")]
    BadAndUncompute { index: usize, target: u32 },
    #[error("circuit was built in counts-only mode and has no gate list")]
    NotRecorded,
    #[error("duplicate register name `{0}`")]
    DuplicateRegister(String),
}

pub type Result<T> = std::result::Result<T, CircuitError>;

/// Role of a register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegKind {
    Input,
    Output,
    AncillaClean,
    AncillaGarbage,
    Flag,
}

impl RegKind {
    fn as_str(self) -> &'static str {
        match self {
            RegKind::Input => "input",
            RegKind::Output => "output",
            RegKind::AncillaClean => "ancilla-clean",
            RegKind::AncillaGarbage => "ancilla-garbage",
            RegKind::Flag => "flag",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "input" => RegKind::Input,
            "output" => RegKind::Output,
            "ancilla-clean" => RegKind::AncillaClean,
            "ancilla-garbage" => RegKind::AncillaGarbage,
            "flag" => RegKind::Flag,
            _ => return None,
        })
    }
}

/// A named, contiguous block of qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub width: u32,
    pub kind: RegKind,
    pub offset: u32,
}

impl Register {
    pub fn reg(&self) -> Reg {
        Reg {
            offset: self.offset,
            width: self.width,
        }
    }
}

/// Lightweight handle to a qubit range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Reg {
    pub offset: u32,
    pub width: u32,
}

impl Reg {
    pub fn new(offset: u32, width: u32) -> Self {
        Self { offset, width }
    }

    #[inline]
    pub fn q(&self, i: usize) -> u32 {
        debug_assert!(i < self.width as usize, "qubit {i} outside width {}", self.width);
        self.offset + i as u32
    }

    pub fn len(&self) -> usize {
        self.width as usize
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0
    }

    /// Qubits `a..b` of this register.
    pub fn slice(&self, a: usize, b: usize) -> Reg {
        assert!(a <= b && b <= self.len());
        Reg::new(self.offset + a as u32, (b - a) as u32)
    }

    pub fn qubits(&self) -> Vec<u32> {
        (self.offset..self.offset + self.width).collect()
    }
}

/// A control line; `positive == false` is an open control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: u32,
    pub positive: bool,
}

impl Control {
    pub fn on(qubit: u32) -> Self {
        Self {
            qubit,
            positive: true,
        }
    }

    pub fn off(qubit: u32) -> Self {
        Self {
            qubit,
            positive: false,
        }
    }
}

/// Reversible gates.
///
/// `And` computes the conjunction into a clean target and `Uand` erases it
/// again by measurement, so only `And` costs a Toffoli. Both act as a CCX on
/// basis states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    X(u32),
    Cnot { control: u32, target: u32 },
    Swap(u32, u32),
    Ccx { c1: u32, c2: u32, target: u32 },
    And { c1: u32, c2: u32, target: u32 },
    Uand { c1: u32, c2: u32, target: u32 },
    Mcx { controls: Box<[Control]>, target: u32 },
}

impl Gate {
    fn remap(&self, map: &[u32]) -> Gate {
        let m = |q: u32| map[q as usize];
        match self {
            Gate::X(t) => Gate::X(m(*t)),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: m(*control),
                target: m(*target),
            },
            Gate::Swap(a, b) => Gate::Swap(m(*a), m(*b)),
            Gate::Ccx { c1, c2, target } => Gate::Ccx {
                c1: m(*c1),
                c2: m(*c2),
                target: m(*target),
            },
            Gate::And { c1, c2, target } => Gate::And {
                c1: m(*c1),
                c2: m(*c2),
                target: m(*target),
            },
            Gate::Uand { c1, c2, target } => Gate::Uand {
                c1: m(*c1),
                c2: m(*c2),
                target: m(*target),
            },
            Gate::Mcx { controls, target } => Gate::Mcx {
                controls: controls
                    .iter()
                    .map(|c| Control {
                        qubit: m(c.qubit),
                        positive: c.positive,
                    })
                    .collect(),
                target: m(*target),
            },
        }
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::And { c1, c2, target } => Gate::Uand {
                c1: *c1,
                c2: *c2,
                target: *target,
            },
            Gate::Uand { c1, c2, target } => Gate::And {
                c1: *c1,
                c2: *c2,
                target: *target,
            },
            g => g.clone(),
        }
    }

    fn qubits(&self) -> Vec<u32> {
        match self {
            Gate::X(t) => vec![*t],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Ccx { c1, c2, target } | Gate::And { c1, c2, target } | Gate::Uand { c1, c2, target } => {
                vec![*c1, *c2, *target]
            }
            Gate::Mcx { controls, target } => {
                let mut v: Vec<u32> = controls.iter().map(|c| c.qubit).collect();
                v.push(*target);
                v
            }
        }
    }
}

/// Exact gate tallies and qubit accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cnot: u64,
    pub toffoli: u64,
    pub swap: u64,
    #[serde(rename = "not")]
    pub not_: u64,
    /// Measurement-based AND uncomputations; they cost no Toffoli.
    pub and_uncompute: u64,
    /// Multi-controlled gates not yet lowered.
    pub mcx: u64,
    pub qubits: u64,
    pub ancilla_clean: u64,
    pub ancilla_garbage: u64,
}

impl GateCounts {
    /// Gate tallies only, with qubit fields cleared.
    pub fn gates_only(&self) -> Self {
        Self {
            qubits: 0,
            ancilla_clean: 0,
            ancilla_garbage: 0,
            ..*self
        }
    }

    pub fn scaled(&self, k: u64) -> Self {
        Self {
            cnot: self.cnot * k,
            toffoli: self.toffoli * k,
            swap: self.swap * k,
            not_: self.not_ * k,
            and_uncompute: self.and_uncompute * k,
            mcx: self.mcx * k,
            ..*self
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct")
    }
}

impl Add for GateCounts {
    type Output = GateCounts;
    fn add(self, o: GateCounts) -> GateCounts {
        GateCounts {
            cnot: self.cnot + o.cnot,
            toffoli: self.toffoli + o.toffoli,
            swap: self.swap + o.swap,
            not_: self.not_ + o.not_,
            and_uncompute: self.and_uncompute + o.and_uncompute,
            mcx: self.mcx + o.mcx,
            qubits: self.qubits + o.qubits,
            ancilla_clean: self.ancilla_clean + o.ancilla_clean,
            ancilla_garbage: self.ancilla_garbage + o.ancilla_garbage,
        }
    }
}

impl AddAssign for GateCounts {
    fn add_assign(&mut self, o: GateCounts) {
        *self = *self + o;
    }
}

impl Sub for GateCounts {
    type Output = GateCounts;
    fn sub(self, o: GateCounts) -> GateCounts {
        GateCounts {
            cnot: self.cnot - o.cnot,
            toffoli: self.toffoli - o.toffoli,
            swap: self.swap - o.swap,
            not_: self.not_ - o.not_,
            and_uncompute: self.and_uncompute - o.and_uncompute,
            mcx: self.mcx - o.mcx,
            qubits: self.qubits.saturating_sub(o.qubits),
            ancilla_clean: self.ancilla_clean.saturating_sub(o.ancilla_clean),
            ancilla_garbage: self.ancilla_garbage.saturating_sub(o.ancilla_garbage),
        }
    }
}

/// Aggregate shape of the unlowered multi-controlled gates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct McxStats {
    pub max_controls: u64,
    pub toffoli: u64,
    pub cnot: u64,
    pub not_: u64,
    pub and_uncompute: u64,
}

impl McxStats {
    fn record(&mut self, controls: &[Control]) {
        let k = controls.len() as u64;
        let open = controls.iter().filter(|c| !c.positive).count() as u64;
        self.not_ += 2 * open;
        match k {
            0 => self.not_ += 1,
            1 => self.cnot += 1,
            2 => self.toffoli += 1,
            _ => {
                self.toffoli += k - 1;
                self.and_uncompute += k - 1;
                self.cnot += 1;
                self.max_controls = self.max_controls.max(k);
            }
        }
    }

    fn merge(&mut self, o: &McxStats) {
        self.max_controls = self.max_controls.max(o.max_controls);
        self.toffoli += o.toffoli;
        self.cnot += o.cnot;
        self.not_ += o.not_;
        self.and_uncompute += o.and_uncompute;
    }

    /// Ancillas needed to lower every gate with one shared register.
    pub fn ancillas(&self) -> u64 {
        self.max_controls.saturating_sub(1)
    }
}

/// A labelled gate range, used for cost attribution and staged checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub label: String,
    pub depth: usize,
    pub start: usize,
    pub end: usize,
    pub counts: GateCounts,
}

/// Reversible circuit over named registers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    registers: Vec<Register>,
    num_qubits: u32,
    gates: Vec<Gate>,
    record: bool,
    tally: GateCounts,
    mcx_stats: McxStats,
    groups: Vec<Group>,
    open_groups: Vec<(String, usize, GateCounts)>,
    tags: BTreeMap<String, u64>,
    notes: BTreeMap<String, String>,
}

impl Default for Circuit {
    fn default() -> Self {
        Self::new()
    }
}

impl Circuit {
    pub fn new() -> Self {
        Self {
            registers: Vec::new(),
            num_qubits: 0,
            gates: Vec::new(),
            record: true,
            tally: GateCounts::default(),
            mcx_stats: McxStats::default(),
            groups: Vec::new(),
            open_groups: Vec::new(),
            tags: BTreeMap::new(),
            notes: BTreeMap::new(),
        }
    }

    /// A builder that tallies gates without storing them.
    pub fn counts_only() -> Self {
        Self {
            record: false,
            ..Self::new()
        }
    }

    pub fn with_recording(record: bool) -> Self {
        if record {
            Self::new()
        } else {
            Self::counts_only()
        }
    }

    pub fn is_recorded(&self) -> bool {
        self.record
    }

    pub fn add_register(&mut self, name: &str, width: usize, kind: RegKind) -> Reg {
        assert!(width >= 1, "register `{name}` has zero width");
        assert!(
            self.registers.iter().all(|r| r.name != name),
            "duplicate register `{name}`"
        );
        let reg = Register {
            name: name.to_string(),
            width: width as u32,
            kind,
            offset: self.num_qubits,
        };
        self.num_qubits += width as u32;
        let handle = reg.reg();
        self.registers.push(reg);
        handle
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<Reg> {
        self.registers.iter().find(|r| r.name == name).map(|r| r.reg())
    }

    /// Changes the declared role of a register.
    pub fn set_register_kind(&mut self, name: &str, kind: RegKind) {
        if let Some(r) = self.registers.iter_mut().find(|r| r.name == name) {
            r.kind = kind;
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits as usize
    }

    /// Stored gates.
    ///
    /// # Panics
    /// Panics for counts-only circuits.
    pub fn gates(&self) -> &[Gate] {
        assert!(self.record, "counts-only circuit has no gate list");
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tally.gates_only() == GateCounts::default() && self.mcx_stats == McxStats::default()
    }

    pub fn push(&mut self, g: Gate) {
        match &g {
            Gate::X(_) => self.tally.not_ += 1,
            Gate::Cnot { .. } => self.tally.cnot += 1,
            Gate::Swap(..) => self.tally.swap += 1,
            Gate::Ccx { .. } | Gate::And { .. } => self.tally.toffoli += 1,
            Gate::Uand { .. } => self.tally.and_uncompute += 1,
            Gate::Mcx { controls, .. } => {
                self.tally.mcx += 1;
                self.mcx_stats.record(controls);
            }
        }
        if self.record {
            debug_assert!(g.qubits().iter().all(|&q| q < self.num_qubits));
            self.gates.push(g);
        }
    }

    #[inline]
    pub fn x(&mut self, t: u32) {
        self.push(Gate::X(t));
    }

    #[inline]
    pub fn cnot(&mut self, control: u32, target: u32) {
        debug_assert_ne!(control, target);
        self.push(Gate::Cnot { control, target });
    }

    #[inline]
    pub fn swap(&mut self, a: u32, b: u32) {
        debug_assert_ne!(a, b);
        self.push(Gate::Swap(a, b));
    }

    #[inline]
    pub fn ccx(&mut self, c1: u32, c2: u32, target: u32) {
        debug_assert!(c1 != target && c2 != target && c1 != c2);
        self.push(Gate::Ccx { c1, c2, target });
    }

    pub fn and(&mut self, c1: u32, c2: u32, target: u32) {
        self.push(Gate::And { c1, c2, target });
    }

    pub fn uand(&mut self, c1: u32, c2: u32, target: u32) {
        self.push(Gate::Uand { c1, c2, target });
    }

    pub fn mcx(&mut self, controls: Vec<Control>, target: u32) {
        debug_assert!(controls.iter().all(|c| c.qubit != target));
        self.push(Gate::Mcx {
            controls: controls.into_boxed_slice(),
            target,
        });
    }

    pub fn begin_group(&mut self, label: impl Into<String>) {
        let start = self.gates.len();
        self.open_groups.push((label.into(), start, self.counts()));
    }

    pub fn end_group(&mut self) {
        let (label, start, before) = self.open_groups.pop().expect("unbalanced group");
        let counts = self.counts().gates_only() - before.gates_only();
        self.groups.push(Group {
            label,
            depth: self.open_groups.len(),
            start,
            end: self.gates.len(),
            counts,
        });
    }

    /// Runs `f` inside a labelled group.
    pub fn group<T>(&mut self, label: impl Into<String>, f: impl FnOnce(&mut Self) -> T) -> T {
        self.begin_group(label);
        let out = f(self);
        self.end_group();
        out
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Groups whose label equals `label`.
    pub fn groups_named<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a Group> + 'a {
        self.groups.iter().filter(move |g| g.label == label)
    }

    /// Increments a named census counter.
    pub fn tag(&mut self, name: &str) {
        self.tag_n(name, 1);
    }

    pub fn tag_n(&mut self, name: &str, k: u64) {
        *self.tags.entry(name.to_string()).or_insert(0) += k;
    }

    pub fn tags(&self) -> &BTreeMap<String, u64> {
        &self.tags
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.notes.insert(key.to_string(), value.into());
    }

    pub fn notes(&self) -> &BTreeMap<String, String> {
        &self.notes
    }

    /// Appends `sub` with its qubit `i` mapped to `map[i]`.
    ///
    /// Gate counts and groups carry over; census tags do not.
    pub fn append(&mut self, sub: &Circuit, map: &[u32]) {
        assert_eq!(map.len(), sub.num_qubits(), "qubit map length");
        let offset = self.gates.len();
        let depth = self.open_groups.len();
        if self.record {
            assert!(sub.record, "cannot inline a counts-only circuit into a recorded one");
            self.gates.extend(sub.gates.iter().map(|g| g.remap(map)));
        }
        self.tally += sub.tally.gates_only();
        self.mcx_stats.merge(&sub.mcx_stats);
        self.groups.extend(sub.groups.iter().map(|g| Group {
            label: g.label.clone(),
            depth: g.depth + depth,
            start: g.start + offset,
            end: g.end + offset,
            counts: g.counts,
        }));
    }

    /// Appends the inverse of `sub`.
    pub fn append_inverse(&mut self, sub: &Circuit, map: &[u32]) {
        let inv = reverse(sub);
        self.append(&inv, map);
    }

    /// Exact tallies of the stored gates together with qubit accounting.
    pub fn counts(&self) -> GateCounts {
        let mut c = self.tally;
        c.qubits = self.num_qubits as u64;
        for r in &self.registers {
            match r.kind {
                RegKind::AncillaClean => c.ancilla_clean += r.width as u64,
                RegKind::AncillaGarbage => c.ancilla_garbage += r.width as u64,
                _ => {}
            }
        }
        c
    }

    /// Tallies as they will be after [`lower_mcx`].
    pub fn lowered_counts(&self) -> GateCounts {
        let mut c = self.counts();
        let s = &self.mcx_stats;
        c.mcx = 0;
        c.toffoli += s.toffoli;
        c.cnot += s.cnot;
        c.not_ += s.not_;
        c.and_uncompute += s.and_uncompute;
        c.qubits += s.ancillas();
        c.ancilla_clean += s.ancillas();
        c
    }

    pub fn mcx_stats(&self) -> McxStats {
        self.mcx_stats
    }
}

/// Basis-state simulation on little-endian bits.
pub fn simulate(c: &Circuit, input: &[bool]) -> Result<Vec<bool>> {
    if input.len() != c.num_qubits() {
        return Err(CircuitError::LengthMismatch {
            expected: c.num_qubits(),
            got: input.len(),
        });
    }
    let mut st = BitState::from_bools(input);
    run(c, &mut st)?;
    Ok(st.to_bools())
}

/// Packed qubit state for fast repeated simulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitState {
    words: Vec<u64>,
    len: usize,
}

impl BitState {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64).max(1)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i as u32, true);
            }
        }
        s
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i as u32)).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, q: u32) -> bool {
        (self.words[(q / 64) as usize] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: u32, v: bool) {
        let w = &mut self.words[(q / 64) as usize];
        if v {
            *w |= 1 << (q % 64);
        } else {
            *w &= !(1 << (q % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, q: u32) {
        self.words[(q / 64) as usize] ^= 1 << (q % 64);
    }

    /// Writes the low `reg.width` bits of `v` into `reg`.
    pub fn write(&mut self, reg: Reg, v: &crate::gf2_field::BinaryPoly) {
        for i in 0..reg.len() {
            self.set(reg.q(i), v.coeff(i));
        }
    }

    pub fn read(&self, reg: Reg) -> crate::gf2_field::BinaryPoly {
        let bits: Vec<bool> = (0..reg.len()).map(|i| self.get(reg.q(i))).collect();
        crate::gf2_field::BinaryPoly::from_bits(&bits)
    }

    pub fn read_u64(&self, reg: Reg) -> u64 {
        (0..reg.len()).fold(0, |acc, i| acc | (u64::from(self.get(reg.q(i))) << i))
    }

    pub fn write_u64(&mut self, reg: Reg, v: u64) {
        for i in 0..reg.len() {
            self.set(reg.q(i), (v >> i) & 1 == 1);
        }
    }
}

/// Applies the circuit to `st` in place.
pub fn run(c: &Circuit, st: &mut BitState) -> Result<()> {
    run_range(c, st, 0, c.gates().len())
}

/// Applies gates `start..end`.
pub fn run_range(c: &Circuit, st: &mut BitState, start: usize, end: usize) -> Result<()> {
    for (index, g) in c.gates()[start..end].iter().enumerate() {
        let index = index + start;
        match g {
            Gate::X(t) => st.flip(*t),
            Gate::Cnot { control, target } => {
                if st.get(*control) {
                    st.flip(*target)
                }
            }
            Gate::Swap(a, b) => {
                let (va, vb) = (st.get(*a), st.get(*b));
                st.set(*a, vb);
                st.set(*b, va);
            }
            Gate::Ccx { c1, c2, target } => {
                if st.get(*c1) && st.get(*c2) {
                    st.flip(*target)
                }
            }
            Gate::And { c1, c2, target } => {
                if st.get(*target) {
                    return Err(CircuitError::DirtyAndTarget {
                        index,
                        target: *target,
                    });
                }
                st.set(*target, st.get(*c1) && st.get(*c2));
            }
            Gate::Uand { c1, c2, target } => {
                if st.get(*target) != (st.get(*c1) && st.get(*c2)) {
                    return Err(CircuitError::BadAndUncompute {
                        index,
                        target: *target,
                    });
                }
                st.set(*target, false);
            }
            Gate::Mcx { controls, target } => {
                if controls.iter().all(|c| st.get(c.qubit) == c.positive) {
                    st.flip(*target)
                }
            }
        }
    }
    Ok(())
}

/// Inverse circuit: reversed gate order with each gate inverted.
pub fn reverse(c: &Circuit) -> Circuit {
    let mut out = Circuit {
        gates: Vec::new(),
        groups: Vec::new(),
        open_groups: Vec::new(),
        ..c.clone()
    };
    if c.record {
        out.gates = c.gates.iter().rev().map(Gate::inverse).collect();
    }
    let len = c.gates.len();
    out.groups = c
        .groups
        .iter()
        .rev()
        .map(|g| Group {
            label: g.label.clone(),
            depth: g.depth,
            start: len - g.end,
            end: len - g.start,
            counts: g.counts,
        })
        .collect();
    out
}

/// Replaces every multi-controlled X by Toffoli-level gates.
///
/// A gate with `k ≥ 3` controls becomes a chain of `k − 1` ANDs into clean
/// ancillas, a CNOT onto the target and the measurement-based uncomputation
/// of the chain. Open controls are conjugated by X. All gates share one
/// ancilla register `mcx_anc` of width `max k − 1`.
pub fn lower_mcx(c: &Circuit) -> Circuit {
    assert!(c.record, "lowering needs a recorded circuit");
    let need = c.mcx_stats.ancillas() as usize;
    let mut out = Circuit {
        gates: Vec::with_capacity(c.gates.len()),
        tally: GateCounts::default(),
        mcx_stats: McxStats::default(),
        groups: Vec::new(),
        open_groups: Vec::new(),
        ..c.clone()
    };
    let anc = (need > 0).then(|| out.add_register("mcx_anc", need, RegKind::AncillaClean));
    let mut index_map = Vec::with_capacity(c.gates.len() + 1);
    for g in &c.gates {
        index_map.push(out.gates.len());
        match g {
            Gate::Mcx { controls, target } => {
                for ctl in controls.iter().filter(|c| !c.positive) {
                    out.x(ctl.qubit);
                }
                let qs: Vec<u32> = controls.iter().map(|c| c.qubit).collect();
                match qs.len() {
                    0 => out.x(*target),
                    1 => out.cnot(qs[0], *target),
                    2 => out.ccx(qs[0], qs[1], *target),
                    k => {
                        let a = anc.expect("ancilla register");
                        out.and(qs[0], qs[1], a.q(0));
                        for i in 2..k {
                            out.and(a.q(i - 2), qs[i], a.q(i - 1));
                        }
                        out.cnot(a.q(k - 2), *target);
                        for i in (2..k).rev() {
                            out.uand(a.q(i - 2), qs[i], a.q(i - 1));
                        }
                        out.uand(qs[0], qs[1], a.q(0));
                    }
                }
                for ctl in controls.iter().filter(|c| !c.positive) {
                    out.x(ctl.qubit);
                }
            }
            g => out.push(g.clone()),
        }
    }
    index_map.push(out.gates.len());
    out.groups = c
        .groups
        .iter()
        .map(|g| {
            let (start, end) = (index_map[g.start], index_map[g.end]);
            let mut counts = GateCounts::default();
            for gate in &out.gates[start..end] {
                match gate {
                    Gate::X(_) => counts.not_ += 1,
                    Gate::Cnot { .. } => counts.cnot += 1,
                    Gate::Swap(..) => counts.swap += 1,
                    Gate::Ccx { .. } | Gate::And { .. } => counts.toffoli += 1,
                    Gate::Uand { .. } => counts.and_uncompute += 1,
                    Gate::Mcx { .. } => counts.mcx += 1,
                }
            }
            Group {
                start,
                end,
                counts,
                ..g.clone()
            }
        })
        .collect();
    out
}

fn fmt_q(q: u32) -> String {
    format!("q[{q}]")
}

/// Text form: register headers followed by one gate per line.
pub fn serialize(c: &Circuit) -> String {
    let mut s = String::new();
    for r in &c.registers {
        let _ = writeln!(s, "reg {} {} {}", r.name, r.width, r.kind.as_str());
    }
    for (k, v) in &c.tags {
        let _ = writeln!(s, "tag {k} {v}");
    }
    for (k, v) in &c.notes {
        let _ = writeln!(s, "note {k} {v}");
    }
    for g in &c.groups {
        let _ = writeln!(s, "group {} {} {} {}", g.depth, g.start, g.end, g.label);
    }
    for g in c.gates() {
        let line = match g {
            Gate::X(t) => format!("X {}", fmt_q(*t)),
            Gate::Cnot { control, target } => format!("CNOT {} {}", fmt_q(*control), fmt_q(*target)),
            Gate::Swap(a, b) => format!("SWAP {} {}", fmt_q(*a), fmt_q(*b)),
            Gate::Ccx { c1, c2, target } => {
                format!("CCX {} {} {}", fmt_q(*c1), fmt_q(*c2), fmt_q(*target))
            }
            Gate::And { c1, c2, target } => {
                format!("AND {} {} {}", fmt_q(*c1), fmt_q(*c2), fmt_q(*target))
            }
            Gate::Uand { c1, c2, target } => {
                format!("UAND {} {} {}", fmt_q(*c1), fmt_q(*c2), fmt_q(*target))
            }
            Gate::Mcx { controls, target } => {
                let mut l = String::from("MCX");
                for c in controls.iter() {
                    let _ = write!(l, " {}{}", if c.positive { '+' } else { '-' }, fmt_q(c.qubit));
                }
                let _ = write!(l, " {}", fmt_q(*target));
                l
            }
        };
        s.push_str(&line);
        s.push('\n');
    }
    s
}

/// Parses the output of [`serialize`]. Blank lines and `//` comments are
/// ignored.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut c = Circuit::new();
    let mut groups = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CircuitError::Parse { line: line_no, msg };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let qubit = |t: &str| -> Result<u32> {
            let q = t
                .strip_prefix("q[")
                .and_then(|r| r.strip_suffix(']'))
                .and_then(|v| v.parse::<u32>().ok())
                .ok_or_else(|| err(format!("bad qubit reference `{t}`")))?;
            if q >= c.num_qubits {
                return Err(err(format!("qubit {q} outside the {} declared", c.num_qubits)));
            }
            Ok(q)
        };
        let arity = |n: usize| -> Result<()> {
            if toks.len() != n + 1 {
                return Err(err(format!("`{}` takes {n} operands", toks[0])));
            }
            Ok(())
        };
        match toks[0] {
            "reg" => {
                if toks.len() != 4 {
                    return Err(err("expected `reg <name> <width> <kind>`".into()));
                }
                let width: usize = toks[2].parse().map_err(|_| err("bad width".into()))?;
                let kind = RegKind::parse(toks[3]).ok_or_else(|| err(format!("unknown kind `{}`", toks[3])))?;
                if width == 0 {
                    return Err(err("zero-width register".into()));
                }
                if c.register(toks[1]).is_some() {
                    return Err(CircuitError::DuplicateRegister(toks[1].into()));
                }
                c.add_register(toks[1], width, kind);
            }
            "tag" => {
                arity(2)?;
                let v: u64 = toks[2].parse().map_err(|_| err("bad tag count".into()))?;
                c.tag_n(toks[1], v);
            }
            "note" => {
                let rest = line.splitn(3, ' ').collect::<Vec<_>>();
                if rest.len() < 3 {
                    return Err(err("expected `note <key> <value>`".into()));
                }
                c.note(rest[1], rest[2]);
            }
            "group" => {
                if toks.len() < 5 {
                    return Err(err("expected `group <depth> <start> <end> <label>`".into()));
                }
                let nums: Vec<usize> = toks[1..4]
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err("bad group bounds".into()))?;
                let label = line.splitn(5, ' ').nth(4).unwrap_or("").to_string();
                groups.push(Group {
                    label,
                    depth: nums[0],
                    start: nums[1],
                    end: nums[2],
                    counts: GateCounts::default(),
                });
            }
            "X" => {
                arity(1)?;
                c.x(qubit(toks[1])?);
            }
            "CNOT" => {
                arity(2)?;
                let (a, b) = (qubit(toks[1])?, qubit(toks[2])?);
                if a == b {
                    return Err(err("control equals target".into()));
                }
                c.push(Gate::Cnot { control: a, target: b });
            }
            "SWAP" => {
                arity(2)?;
                c.push(Gate::Swap(qubit(toks[1])?, qubit(toks[2])?));
            }
            "CCX" | "AND" | "UAND" => {
                arity(3)?;
                let (c1, c2, target) = (qubit(toks[1])?, qubit(toks[2])?, qubit(toks[3])?);
                if target == c1 || target == c2 {
                    return Err(err("control equals target".into()));
                }
                c.push(match toks[0] {
                    "CCX" => Gate::Ccx { c1, c2, target },
                    "AND" => Gate::And { c1, c2, target },
                    _ => Gate::Uand { c1, c2, target },
                });
            }
            "MCX" => {
                if toks.len() < 2 {
                    return Err(err("MCX needs a target".into()));
                }
                let mut controls = Vec::new();
                for t in &toks[1..toks.len() - 1] {
                    let (positive, rest) = match t.as_bytes().first() {
                        Some(b'+') => (true, &t[1..]),
                        Some(b'-') => (false, &t[1..]),
                        _ => return Err(err(format!("control `{t}` needs a + or - prefix"))),
                    };
                    controls.push(Control {
                        qubit: qubit(rest)?,
                        positive,
                    });
                }
                let target = qubit(toks[toks.len() - 1])?;
                if controls.iter().any(|c| c.qubit == target) {
                    return Err(err("control equals target".into()));
                }
                c.mcx(controls, target);
            }
            other => return Err(err(format!("unrecognized gate `{other}`"))),
        }
    }
    for mut g in groups {
        if g.end > c.gates.len() || g.start > g.end {
            return Err(CircuitError::Parse {
                line: 0,
                msg: format!("group `{}` exceeds the gate list", g.label),
            });
        }
        let mut counts = GateCounts::default();
        for gate in &c.gates[g.start..g.end] {
            match gate {
                Gate::X(_) => counts.not_ += 1,
                Gate::Cnot { .. } => counts.cnot += 1,
                Gate::Swap(..) => counts.swap += 1,
                Gate::Ccx { .. } | Gate::And { .. } => counts.toffoli += 1,
                Gate::Uand { .. } => counts.and_uncompute += 1,
                Gate::Mcx { .. } => counts.mcx += 1,
            }
        }
        g.counts = counts;
        c.groups.push(g);
    }
    Ok(c)
}

/// Concatenation of register qubit lists, the usual map for [`Circuit::append`].
pub fn qubit_map(regs: &[Reg]) -> Vec<u32> {
    regs.iter().flat_map(|r| r.qubits()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn wide(n: usize) -> (Circuit, Reg) {
        let mut c = Circuit::new();
        let r = c.add_register("q", n, RegKind::Input);
        (c, r)
    }

    #[test]
    fn basic_simulation() {
        let (c, _) = wide(3);
        assert_eq!(simulate(&c, &bits("101")).unwrap(), bits("101"));
        let (mut c, _) = wide(2);
        c.cnot(0, 1);
        assert_eq!(simulate(&c, &bits("10")).unwrap(), bits("11"));
        let (mut c, _) = wide(3);
        c.mcx(vec![Control::off(0), Control::off(1)], 2);
        for x in [false, true] {
            assert_eq!(simulate(&c, &[false, false, x]).unwrap(), vec![false, false, !x]);
            assert_eq!(simulate(&c, &[true, false, x]).unwrap(), vec![true, false, x]);
        }
    }

    #[test]
    fn reverse_basics() {
        let (c, _) = wide(2);
        assert!(reverse(&c).is_empty());
        let (mut c, _) = wide(3);
        c.cnot(0, 1);
        c.cnot(1, 2);
        c.cnot(2, 0);
        let r = reverse(&c);
        let rev: Vec<Gate> = c.gates().iter().rev().cloned().collect();
        assert_eq!(r.gates(), rev.as_slice());
    }

    #[test]
    fn lowering_small_and_five_control() {
        let (mut c, _) = wide(3);
        c.mcx(vec![Control::on(0), Control::on(1)], 2);
        let low = lower_mcx(&c);
        assert_eq!(low.counts().toffoli, 1);
        assert!(low.register("mcx_anc").is_none());

        let (mut c, _) = wide(6);
        c.mcx((0..5).map(Control::on).collect(), 5);
        let low = lower_mcx(&c);
        assert_eq!(low.counts().toffoli, 4);
        assert_eq!(low.register("mcx_anc").unwrap().len(), 4);
        for x in 0..64u64 {
            let input: Vec<bool> = (0..6).map(|i| (x >> i) & 1 == 1).collect();
            let mut st = BitState::zeros(low.num_qubits());
            for (i, &b) in input.iter().enumerate() {
                st.set(i as u32, b);
            }
            run(&low, &mut st).unwrap();
            let want = simulate(&c, &input).unwrap();
            assert_eq!(&st.to_bools()[..6], want.as_slice());
            assert_eq!(st.read_u64(low.register("mcx_anc").unwrap()), 0);
        }
    }

    #[test]
    fn wide_mcx_costs_n_minus_one() {
        let (mut c, _) = wide(164);
        c.mcx((0..163).map(Control::on).collect(), 163);
        assert_eq!(c.lowered_counts().toffoli, 162);
        assert_eq!(lower_mcx(&c).counts().toffoli, 162);
    }

    #[test]
    fn counts_of_simple_circuits() {
        assert_eq!(Circuit::new().counts(), GateCounts::default());
        let mut c = Circuit::new();
        let f = c.add_register("f", 7, RegKind::Input);
        let g = c.add_register("g", 7, RegKind::Input);
        for i in 0..7 {
            c.cnot(f.q(i), g.q(i));
        }
        assert_eq!(c.counts().cnot, 7);
        assert_eq!(c.counts().qubits, 14);
    }

    #[test]
    fn text_format() {
        let (mut c, _) = wide(8);
        c.cnot(3, 7);
        assert!(serialize(&c).lines().any(|l| l == "CNOT q[3] q[7]"));
        let text = serialize(&c);
        assert_eq!(serialize(&parse(&text).unwrap()), text);
        let bad = format!("{text}CNOT q[3]\n");
        let line = bad.lines().count();
        match parse(&bad) {
            Err(e) => assert!(e.to_string().contains(&line.to_string()), "{e}"),
            Ok(_) => panic!("malformed line accepted"),
        }
    }
}
