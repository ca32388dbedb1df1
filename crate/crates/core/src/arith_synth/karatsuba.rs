//! Generalized Karatsuba formulas `c = R·[(T·f)∘(T·g)]` and the reversible
//! sub-multiplier built from them.
//!
//! Formulas are symmetric: the same linear forms `T` act on both operands.
//! Shipped formulas live in `data/karatsuba/k{d}.txt`; this module also
//! contains the generators that produced them and a recursive two-way
//! fallback.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit_ir::{Circuit, Reg, RegKind};
use crate::gf2_field::BinaryPoly;
use crate::gf2_linalg::{residue_map, BitMatrix};

use super::{ArithError, Result};

/// Where a formula came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaSource {
    /// Bundled data file.
    Builtin,
    /// Loaded from a user-supplied file.
    File(String),
    /// Produced on demand by recursive two-way Karatsuba.
    Fallback,
    /// Constructed in memory by one of the generators.
    Generated(String),
}

impl fmt::Display for FormulaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaSource::Builtin => write!(f, "builtin"),
            FormulaSource::File(p) => write!(f, "file:{p}"),
            FormulaSource::Fallback => write!(f, "fallback"),
            FormulaSource::Generated(s) => write!(f, "generated:{s}"),
        }
    }
}

/// Bilinear product formula for operands with `d` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KaratsubaFormula {
    pub d: usize,
    /// `v×d` linear forms.
    pub t: BitMatrix,
    /// `(2d−1)×v` recombination.
    pub r: BitMatrix,
    pub source: FormulaSource,
}

impl KaratsubaFormula {
    pub fn new(t: BitMatrix, r: BitMatrix, source: FormulaSource) -> Result<Self> {
        let d = t.cols();
        if r.rows() != 2 * d - 1 || r.cols() != t.rows() {
            return Err(ArithError::FormulaFile {
                path: source.to_string(),
                msg: format!(
                    "shape mismatch: T is {}x{}, R is {}x{}",
                    t.rows(),
                    t.cols(),
                    r.rows(),
                    r.cols()
                ),
            });
        }
        Ok(Self { d, t, r, source })
    }

    /// The one-term product `c_0 = f_0·g_0`.
    pub fn trivial() -> Self {
        Self {
            d: 1,
            t: BitMatrix::identity(1),
            r: BitMatrix::identity(1),
            source: FormulaSource::Builtin,
        }
    }

    /// Number of bilinear products, equal to the Toffoli cost.
    pub fn v(&self) -> usize {
        self.t.rows()
    }

    fn masks(&self) -> (Vec<u64>, Vec<u64>) {
        let t = (0..self.t.rows()).map(|i| self.t.row_words(i)[0]).collect();
        let r = (0..self.r.rows()).map(|i| self.r.row_words(i)[0]).collect();
        (t, r)
    }

    /// Evaluates the formula on operands given as bit masks.
    pub fn eval(&self, f: u64, g: u64) -> u64 {
        let (t, r) = self.masks();
        eval_masks(&t, &r, f, g)
    }

    /// Checks the product identity, exhaustively for `d ≤ 6` and on 10^4
    /// seeded random pairs otherwise.
    pub fn verify(&self) -> Result<()> {
        let (t, r) = self.masks();
        let check = |f: u64, g: u64| -> Result<()> {
            if eval_masks(&t, &r, f, g) != clmul(f, g) {
                return Err(ArithError::BadFormula { d: self.d, f, g });
            }
            Ok(())
        };
        let size = 1u64 << self.d;
        if self.d <= 6 {
            for f in 0..size {
                for g in 0..size {
                    check(f, g)?;
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6b61_7261);
            for _ in 0..10_000 {
                check(rng.gen_range(0..size), rng.gen_range(0..size))?;
            }
        }
        Ok(())
    }

    /// Text form: `d v`, then the rows of `T`, then the rows of `R`.
    pub fn to_text(&self) -> String {
        let mut s = format!("# source: {}\n{} {}\n", self.source, self.d, self.v());
        for row in self.t.to_row_strings() {
            s.push_str(&row);
            s.push('\n');
        }
        for row in self.r.to_row_strings() {
            s.push_str(&row);
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str, source: FormulaSource) -> Result<Self> {
        let err = |msg: String| ArithError::FormulaFile {
            path: source.to_string(),
            msg,
        };
        let lines: Vec<&str> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect();
        let header: Vec<usize> = lines
            .first()
            .ok_or_else(|| err("empty file".into()))?
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err("bad `d v` header".into()))?;
        let [d, v] = header[..] else {
            return Err(err("bad `d v` header".into()));
        };
        if d == 0 || d > 16 || v == 0 || v >= 64 {
            return Err(err(format!("unsupported size d = {d}, v = {v}")));
        }
        if lines.len() != 1 + v + 2 * d - 1 {
            return Err(err(format!(
                "expected {} matrix rows, found {}",
                v + 2 * d - 1,
                lines.len() - 1
            )));
        }
        let t = BitMatrix::from_row_strings(&lines[1..1 + v]).map_err(|e| err(e.to_string()))?;
        let r = BitMatrix::from_row_strings(&lines[1 + v..]).map_err(|e| err(e.to_string()))?;
        if t.cols() != d {
            return Err(err(format!("T rows have {} entries, expected {d}", t.cols())));
        }
        let f = Self::new(t, r, source)?;
        f.verify()?;
        Ok(f)
    }
}

fn eval_masks(t: &[u64], r: &[u64], f: u64, g: u64) -> u64 {
    let mut prods = 0u64;
    for (i, &row) in t.iter().enumerate() {
        let a = (row & f).count_ones() & 1;
        let b = (row & g).count_ones() & 1;
        prods |= u64::from(a & b) << i;
    }
    r.iter()
        .enumerate()
        .fold(0, |acc, (k, &row)| acc | (u64::from((row & prods).count_ones() & 1) << k))
}

/// Carry-less product of two small operands.
pub fn clmul(f: u64, g: u64) -> u64 {
    let mut out = 0;
    for i in 0..64 {
        if (f >> i) & 1 == 1 {
            out ^= g << i;
        }
    }
    out
}

const BUILTIN: [(usize, &str); 7] = [
    (2, include_str!("../../data/karatsuba/k2.txt")),
    (3, include_str!("../../data/karatsuba/k3.txt")),
    (4, include_str!("../../data/karatsuba/k4.txt")),
    (5, include_str!("../../data/karatsuba/k5.txt")),
    (6, include_str!("../../data/karatsuba/k6.txt")),
    (7, include_str!("../../data/karatsuba/k7.txt")),
    (8, include_str!("../../data/karatsuba/k8.txt")),
];

/// Formulas indexed by operand size.
#[derive(Clone, Debug, Default)]
pub struct FormulaTable {
    formulas: BTreeMap<usize, KaratsubaFormula>,
    allow_fallback: bool,
}

impl FormulaTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled formulas for `d = 1..=8`, verified on first use.
    pub fn builtin() -> Self {
        static CELL: OnceLock<FormulaTable> = OnceLock::new();
        CELL.get_or_init(Self::load_builtin).clone()
    }

    fn load_builtin() -> Self {
        let mut t = Self::empty();
        t.insert(KaratsubaFormula::trivial());
        for (d, text) in BUILTIN {
            let f = KaratsubaFormula::parse(text, FormulaSource::Builtin)
                .unwrap_or_else(|e| panic!("bundled formula k{d}: {e}"));
            t.insert(f);
        }
        t
    }

    /// Loads every `k{d}.txt` in `dir` on top of the trivial `d = 1` formula.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut t = Self::empty();
        t.insert(KaratsubaFormula::trivial());
        let entries = std::fs::read_dir(dir).map_err(|e| ArithError::FormulaFile {
            path: dir.display().to_string(),
            msg: e.to_string(),
        })?;
        for entry in entries.flatten() {
            let path = entry.path();
            let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
            let Some(d) = name
                .strip_prefix('k')
                .and_then(|s| s.strip_suffix(".txt"))
                .and_then(|s| s.parse::<usize>().ok())
            else {
                continue;
            };
            let text = std::fs::read_to_string(&path).map_err(|e| ArithError::FormulaFile {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?;
            let f = KaratsubaFormula::parse(&text, FormulaSource::File(path.display().to_string()))?;
            if f.d != d {
                return Err(ArithError::FormulaFile {
                    path: path.display().to_string(),
                    msg: format!("file name says d = {d}, header says {}", f.d),
                });
            }
            t.insert(f);
        }
        Ok(t)
    }

    /// Lets [`FormulaTable::get`] synthesize missing sizes recursively.
    pub fn with_fallback(mut self, on: bool) -> Self {
        self.allow_fallback = on;
        self
    }

    pub fn insert(&mut self, f: KaratsubaFormula) {
        self.formulas.insert(f.d, f);
    }

    pub fn get(&self, d: usize) -> Result<KaratsubaFormula> {
        if let Some(f) = self.formulas.get(&d) {
            return Ok(f.clone());
        }
        if self.allow_fallback {
            return Ok(recursive_karatsuba(d));
        }
        Err(ArithError::MissingFormula(d))
    }

    pub fn contains(&self, d: usize) -> bool {
        self.formulas.contains_key(&d)
    }

    /// `(d, v, source)` for every stored formula.
    pub fn summary(&self) -> Vec<(usize, usize, String)> {
        self.formulas
            .values()
            .map(|f| (f.d, f.v(), f.source.to_string()))
            .collect()
    }

    /// Largest operand size with a stored formula.
    pub fn max_d(&self) -> usize {
        self.formulas.keys().next_back().copied().unwrap_or(0)
    }
}

/// Solves for `R` given the forms `T`, or `None` if `T` cannot express the
/// product.
pub fn solve_r(t: &BitMatrix) -> Option<BitMatrix> {
    let d = t.cols();
    let v = t.rows();
    // Columns: the d×d outer products ℓℓᵀ, flattened row-major.
    let dim = d * d;
    let mut a = BitMatrix::zeros(dim, v + 2 * d - 1);
    for (ti, row) in (0..v).map(|i| (i, t.row_support(i))) {
        for &i in &row {
            for &j in &row {
                a.set(i * d + j, ti, true);
            }
        }
    }
    for k in 0..2 * d - 1 {
        for i in 0..d {
            if k >= i && k - i < d {
                a.set(i * d + (k - i), v + k, true);
            }
        }
    }
    // Reduced row echelon form over the first v columns.
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..v {
        let Some(p) = (row..dim).find(|&r| a.get(r, col)) else {
            continue;
        };
        a.swap_rows(row, p);
        for r in 0..dim {
            if r != row && a.get(r, col) {
                a.xor_row(row, r);
            }
        }
        pivots.push(col);
        row += 1;
    }
    for r in row..dim {
        if (0..2 * d - 1).any(|k| a.get(r, v + k)) {
            return None;
        }
    }
    let mut rm = BitMatrix::zeros(2 * d - 1, v);
    for (pr, &col) in pivots.iter().enumerate() {
        for k in 0..2 * d - 1 {
            if a.get(pr, v + k) {
                rm.set(k, col, true);
            }
        }
    }
    Some(rm)
}

fn formula_from_forms(forms: &[u64], d: usize, source: FormulaSource) -> Option<KaratsubaFormula> {
    let polys: Vec<BinaryPoly> = forms.iter().map(|&m| BinaryPoly::from_u64(m)).collect();
    let t = BitMatrix::from_columns(d, &polys).transpose();
    let r = solve_r(&t)?;
    KaratsubaFormula::new(t, r, source).ok()
}

/// Recursive two-way Karatsuba on `d` terms.
pub fn recursive_karatsuba(d: usize) -> KaratsubaFormula {
    fn forms(d: usize) -> Vec<u64> {
        if d == 1 {
            return vec![1];
        }
        let lo = d.div_ceil(2);
        let hi = d - lo;
        let mut out = forms(lo);
        out.extend(forms(hi).into_iter().map(|m| m << lo));
        for m in forms(lo) {
            let mut s = 0u64;
            for i in 0..lo {
                if (m >> i) & 1 == 1 {
                    s |= 1 << i;
                    if lo + i < d {
                        s |= 1 << (lo + i);
                    }
                }
            }
            out.push(s);
        }
        out
    }
    formula_from_forms(&forms(d), d, FormulaSource::Fallback).expect("Karatsuba recursion is complete")
}

/// Searches for a symmetric formula with exactly `v` products.
///
/// The span of the rank-one forms `ℓℓᵀ` used by a formula must contain the
/// anti-diagonal product forms. The search enumerates every subspace of the
/// right dimension between those forms and the full space of symmetric
/// matrices, and accepts one that is spanned by its own rank-one members.
/// Among the accepted subspaces the one with the fewest nonzeros in `T` and
/// `R` wins. Feasible for `d ≤ 6`.
pub fn search_symmetric(d: usize, v: usize, limit: Option<u64>) -> Option<KaratsubaFormula> {
    assert!((1..=6).contains(&d), "symmetric search supports d <= 6");
    // Position index for i <= j, row-major over the upper triangle.
    let mut index = vec![vec![usize::MAX; d]; d];
    let mut next = 0;
    for i in 0..d {
        for j in i..d {
            index[i][j] = next;
            index[j][i] = next;
            next += 1;
        }
    }
    let big_d = next;
    let h_dim = 2 * d - 1;
    if v < h_dim || v > big_d {
        return None;
    }
    // Quotient coordinates: within each anti-diagonal, position p maps to p ^ p0.
    let mut quot_of: Vec<Option<(usize, usize)>> = vec![None; big_d];
    let mut q = 0;
    for k in 0..h_dim {
        let cells: Vec<usize> = (0..d)
            .filter(|&i| k >= i && k - i < d && i <= k - i)
            .map(|i| index[i][k - i])
            .collect();
        for &p in &cells[1..] {
            quot_of[p] = Some((q, cells[0]));
            q += 1;
        }
    }
    let sym = |l: u64| -> u32 {
        let mut m = 0u32;
        for i in 0..d {
            for j in i..d {
                if (l >> i) & 1 == 1 && (l >> j) & 1 == 1 {
                    m |= 1 << index[i][j];
                }
            }
        }
        m
    };
    let project = |s: u32| -> u32 {
        let mut out = 0u32;
        for (p, qo) in quot_of.iter().enumerate() {
            if let Some((qi, p0)) = qo {
                if ((s >> p) ^ (s >> p0)) & 1 == 1 {
                    out |= 1 << qi;
                }
            }
        }
        out
    };
    let ells: Vec<u64> = (1..1u64 << d).collect();
    let syms: Vec<u32> = ells.iter().map(|&l| sym(l)).collect();
    let projs: Vec<u32> = syms.iter().map(|&s| project(s)).collect();
    let k_dim = v - h_dim;
    let r_rows = q - k_dim;
    // table[a] = mask of ℓ indices whose projection is annihilated by a.
    let table: Vec<u64> = (0..1u32 << q)
        .map(|a| {
            projs
                .iter()
                .enumerate()
                .filter(|(_, &u)| (a & u).count_ones() % 2 == 0)
                .fold(0u64, |m, (i, _)| m | (1 << i))
        })
        .collect();
    let mut order: Vec<usize> = (0..ells.len()).collect();
    order.sort_by_key(|&i| (ells[i].count_ones(), ells[i]));

    let mut best: Option<(usize, KaratsubaFormula)> = None;
    let mut visited = 0u64;
    let mut consider = |good: u64| -> bool {
        visited += 1;
        if (good.count_ones() as usize) < v {
            return limit.is_some_and(|l| visited >= l);
        }
        // Greedy basis in weight order.
        let mut basis: Vec<u32> = Vec::new();
        let mut chosen = Vec::new();
        for &i in &order {
            if (good >> i) & 1 == 0 {
                continue;
            }
            let mut s = syms[i];
            for &b in &basis {
                if s & (1 << (31 - b.leading_zeros())) != 0 {
                    s ^= b;
                }
            }
            if s != 0 {
                basis.push(s);
                basis.sort_by(|a, b| b.cmp(a));
                chosen.push(ells[i]);
            }
        }
        if chosen.len() == v {
            if let Some(f) = formula_from_forms(&chosen, d, FormulaSource::Generated("search".into())) {
                let cost = f.t.popcount() * 4 + f.r.popcount();
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((cost, f));
                }
            }
        }
        limit.is_some_and(|l| visited >= l)
    };
    let all = (1u64 << ells.len()) - 1;
    if r_rows == 0 {
        consider(all);
    } else {
        for_each_rref(q, r_rows, &mut |rows: &[u32]| {
            let mut good = all;
            for &a in rows {
                good &= table[a as usize];
            }
            consider(good)
        });
    }
    best.map(|(_, f)| f)
}

/// Calls `f` on every `r×q` reduced row echelon matrix of rank `r`, rows as
/// bit masks. Stops early when `f` returns true.
fn for_each_rref(q: usize, r: usize, f: &mut dyn FnMut(&[u32]) -> bool) {
    fn combos(q: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..q {
            cur.push(c);
            combos(q, r, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut pivot_sets = Vec::new();
    combos(q, r, 0, &mut Vec::new(), &mut pivot_sets);
    for pivots in pivot_sets {
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for c in p + 1..q {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut rows = vec![0u32; r];
        for assign in 0u64..1 << free.len() {
            for (i, &p) in pivots.iter().enumerate() {
                rows[i] = 1 << p;
            }
            for (b, &(i, c)) in free.iter().enumerate() {
                if (assign >> b) & 1 == 1 {
                    rows[i] |= 1 << c;
                }
            }
            if f(&rows) {
                return;
            }
        }
    }
}

/// One residue channel of a CRT-with-infinity construction.
#[derive(Clone, Debug)]
pub enum CrtPart {
    /// Product modulo `m`, using the stored formula for `deg m` terms.
    Modulus(BinaryPoly),
    /// Product modulo `x^3` with five forms.
    ShortCube,
    /// The top `e` product coefficients.
    Infinity(usize),
}

/// Builds a formula from residue channels whose degrees sum to `2d − 1`.
pub fn crt_infinity(d: usize, parts: &[CrtPart], table: &FormulaTable) -> Result<KaratsubaFormula> {
    let mut forms: Vec<u64> = Vec::new();
    for part in parts {
        match part {
            CrtPart::Modulus(m) => {
                let e = m.degree().unwrap_or(0);
                let sub = table.get(e)?;
                let red = residue_map(m, d);
                for row in 0..sub.v() {
                    let w = sub.t.row_support(row);
                    let mut form = 0u64;
                    for k in 0..d {
                        let bit = w.iter().filter(|&&i| red.get(i, k)).count() % 2;
                        form |= (bit as u64) << k;
                    }
                    forms.push(form);
                }
            }
            CrtPart::ShortCube => forms.extend([0b001, 0b010, 0b100, 0b011, 0b101]),
            CrtPart::Infinity(e) => {
                let sub = table.get(*e)?;
                for row in 0..sub.v() {
                    let form = sub
                        .t
                        .row_support(row)
                        .into_iter()
                        .fold(0u64, |m, i| m | (1 << (d - 1 - i)));
                    forms.push(form);
                }
            }
        }
    }
    formula_from_forms(&forms, d, FormulaSource::Generated("crt-infinity".into())).ok_or(ArithError::BadFormula {
        d,
        f: 0,
        g: 0,
    })
}

/// The constructions used for the bundled `d = 7` and `d = 8` formulas.
pub fn standard_crt_parts(d: usize) -> Option<Vec<CrtPart>> {
    let p = |s: &str| CrtPart::Modulus(s.parse::<BinaryPoly>().expect("literal"));
    match d {
        7 => Some(vec![
            p("x^2"),
            p("x^2 + 1"),
            p("x^2 + x + 1"),
            p("x^3 + x + 1"),
            p("x^3 + x^2 + 1"),
            CrtPart::Infinity(1),
        ]),
        8 => Some(vec![
            CrtPart::ShortCube,
            p("x^2 + 1"),
            p("x^2 + x + 1"),
            p("x^3 + x + 1"),
            p("x^3 + x^2 + 1"),
            CrtPart::Infinity(2),
        ]),
        _ => None,
    }
}

/// Reduces `R` modulo `m_i`: `R′ = Red·R` with `Red` the `(2d−1)`-term
/// residue map.
pub fn reduced_r(formula: &KaratsubaFormula, m_i: &BinaryPoly) -> Result<BitMatrix> {
    let d = m_i.degree().unwrap_or(0);
    if d != formula.d {
        return Err(ArithError::DegreeMismatch {
            formula: formula.d,
            modulus: d,
        });
    }
    Ok(residue_map(m_i, 2 * d - 1).mul(&formula.r))
}

/// Emits `h += f·g mod m_i` on `d`-qubit registers.
pub fn emit_kmult(
    c: &mut Circuit,
    formula: &KaratsubaFormula,
    r_red: &BitMatrix,
    f: Reg,
    g: Reg,
    h: Reg,
) {
    for t in 0..formula.v() {
        let outs = r_red.column_support(t);
        if outs.is_empty() {
            continue;
        }
        let ins = formula.t.row_support(t);
        let c0 = ins[0];
        for &j in &ins[1..] {
            c.cnot(f.q(j), f.q(c0));
            c.cnot(g.q(j), g.q(c0));
        }
        let r0 = outs[0];
        for &r in &outs[1..] {
            c.cnot(h.q(r0), h.q(r));
        }
        c.ccx(f.q(c0), g.q(c0), h.q(r0));
        for &r in outs[1..].iter().rev() {
            c.cnot(h.q(r0), h.q(r));
        }
        for &j in ins[1..].iter().rev() {
            c.cnot(g.q(j), g.q(c0));
            c.cnot(f.q(j), f.q(c0));
        }
    }
}

/// Standalone `|f, g, h⟩ → |f, g, h + f·g mod m_i⟩`.
pub fn synth_kmult(formula: &KaratsubaFormula, m_i: &BinaryPoly) -> Result<Circuit> {
    let r_red = reduced_r(formula, m_i)?;
    let d = formula.d;
    let mut c = Circuit::new();
    let f = c.add_register("f", d, RegKind::Input);
    let g = c.add_register("g", d, RegKind::Input);
    let h = c.add_register("h", d, RegKind::Output);
    emit_kmult(&mut c, formula, &r_red, f, g, h);
    c.note("formula_source", formula.source.to_string());
    Ok(c)
}
