//! Logical cost model for windowed phase estimation: QROM costs, per-round
//! totals, window optimization and active-volume accounting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit_ir::GateCounts;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("QROM needs at least 2 items, got {0}")]
    TooFewItems(u64),
    #[error("window size {s} outside 1..={max}")]
    WindowOutOfRange { s: usize, max: usize },
    #[error("{precomputed} precomputed bits leave nothing of n = {n}")]
    Precomputed { n: usize, precomputed: usize },
    #[error("missing active-volume weight `{0}`")]
    MissingWeight(&'static str),
    #[error("unknown active-volume weight `{0}`")]
    UnknownWeight(String),
    #[error("weight `{key}` must be a non-negative number, got `{value}`")]
    BadWeight { key: String, value: String },
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
}

pub type Result<T> = std::result::Result<T, CostError>;

/// Toffoli-dominated cost of a circuit or composite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct LogicalCost {
    pub toffoli: f64,
    pub cnot: f64,
    pub swap: f64,
    pub qubits: u64,
    pub active_volume: f64,
}

impl LogicalCost {
    pub fn from_counts(counts: &GateCounts, weights: &AVWeights) -> Self {
        Self {
            toffoli: counts.toffoli as f64,
            cnot: counts.cnot as f64,
            swap: counts.swap as f64,
            qubits: counts.qubits,
            active_volume: active_volume(counts, weights),
        }
    }

    /// Gate totals of `self` then `other`; qubits is the larger footprint.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            toffoli: self.toffoli + other.toffoli,
            cnot: self.cnot + other.cnot,
            swap: self.swap + other.swap,
            qubits: self.qubits.max(other.qubits),
            active_volume: self.active_volume + other.active_volume,
        }
    }

    pub fn repeat(&self, times: f64) -> Self {
        Self {
            toffoli: self.toffoli * times,
            cnot: self.cnot * times,
            swap: self.swap * times,
            active_volume: self.active_volume * times,
            ..*self
        }
    }
}

/// Per-primitive active-volume weights in logical blocks.
///
/// `qrom_bit` is charged per item per expected set output bit of a QROM
/// look-up, on top of the look-up's Toffolis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AVWeights {
    pub cnot: f64,
    pub toffoli: f64,
    pub swap: f64,
    pub not: f64,
    pub and_uncompute: f64,
    pub qrom_bit: f64,
}

impl AVWeights {
    pub const KEYS: [&'static str; 6] = ["cnot", "toffoli", "swap", "not", "and_uncompute", "qrom_bit"];

    /// The bundled weights, or the data-directory override.
    pub fn builtin() -> Result<Self> {
        crate::data::av_weights_text().parse()
    }

    fn get(&self, key: &str) -> f64 {
        match key {
            "cnot" => self.cnot,
            "toffoli" => self.toffoli,
            "swap" => self.swap,
            "not" => self.not,
            "and_uncompute" => self.and_uncompute,
            _ => self.qrom_bit,
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl FromStr for AVWeights {
    type Err = CostError;

    fn from_str(text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(CostError::Syntax(i + 1))?;
            let (k, v) = (k.trim(), v.trim());
            let key = Self::KEYS
                .iter()
                .find(|&&x| x == k)
                .ok_or_else(|| CostError::UnknownWeight(k.to_string()))?;
            let val: f64 = v
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite() && *x >= 0.0)
                .ok_or_else(|| CostError::BadWeight {
                    key: k.to_string(),
                    value: v.to_string(),
                })?;
            seen.insert(*key, val);
        }
        let mut take = |k: &'static str| seen.remove(k).ok_or(CostError::MissingWeight(k));
        Ok(Self {
            cnot: take("cnot")?,
            toffoli: take("toffoli")?,
            swap: take("swap")?,
            not: take("not")?,
            and_uncompute: take("and_uncompute")?,
            qrom_bit: take("qrom_bit")?,
        })
    }
}

impl fmt::Display for AVWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in Self::KEYS {
            writeln!(f, "{k} = {}", self.get(k))?;
        }
        Ok(())
    }
}

/// Weighted primitive sum; multi-controlled gates must be lowered first.
pub fn active_volume(counts: &GateCounts, w: &AVWeights) -> f64 {
    w.cnot * counts.cnot as f64
        + w.toffoli * counts.toffoli as f64
        + w.swap * counts.swap as f64
        + w.not * counts.not_ as f64
        + w.and_uncompute * counts.and_uncompute as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QromCosts {
    pub lookup_toffoli: f64,
    pub unlookup_toffoli: f64,
    pub unlookup_av: f64,
}

/// Costs of a `k`-item look-up and its measurement-based uncomputation.
pub fn qrom_costs(k: u64) -> Result<QromCosts> {
    if k < 2 {
        return Err(CostError::TooFewItems(k));
    }
    let kf = k as f64;
    Ok(QromCosts {
        lookup_toffoli: kf - 2.0,
        unlookup_toffoli: 2.0 * kf.sqrt(),
        unlookup_av: 0.75 * kf + 120.0 * kf.sqrt(),
    })
}

/// Active volume of a `k`-item look-up writing `out_bits`-bit entries.
pub fn qrom_lookup_av(k: u64, out_bits: usize, w: &AVWeights) -> Result<f64> {
    let q = qrom_costs(k)?;
    Ok(q.lookup_toffoli * w.toffoli + k as f64 * out_bits as f64 / 2.0 * w.qrom_bit)
}

/// One window group: look-up of `2^g` points, point addition, unlookup.
fn group_cost(n: usize, g: usize, point_add: &LogicalCost, w: &AVWeights) -> Result<LogicalCost> {
    let k = 1u64 << g;
    let q = qrom_costs(k)?;
    let lookup_av = qrom_lookup_av(k, 3 * n, w)?;
    Ok(LogicalCost {
        toffoli: q.lookup_toffoli + point_add.toffoli + q.unlookup_toffoli,
        active_volume: lookup_av + point_add.active_volume + q.unlookup_av,
        ..*point_add
    })
}

/// Qubit total of the windowed circuit.
pub fn pe_qubits(n: usize) -> u64 {
    13 * n as u64 + 7
}

/// Total cost of both phase-estimation rounds with window size `s`.
///
/// Gate totals cover look-ups, point additions and unlookups; the QFT is
/// excluded.
pub fn pe_cost(
    n: usize,
    s: usize,
    point_add: &LogicalCost,
    precomputed_bits: usize,
    weights: &AVWeights,
) -> Result<LogicalCost> {
    if precomputed_bits >= n {
        return Err(CostError::Precomputed {
            n,
            precomputed: precomputed_bits,
        });
    }
    let nt = n - precomputed_bits;
    if s == 0 || s > nt || s > 62 {
        return Err(CostError::WindowOutOfRange { s, max: nt.min(62) });
    }
    let full = group_cost(n, s, point_add, weights)?.repeat((nt / s) as f64);
    let round = match nt % s {
        0 => full,
        r => full.then(&group_cost(n, r, point_add, weights)?),
    };
    Ok(LogicalCost {
        qubits: pe_qubits(n),
        ..round.repeat(2.0)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Toffoli,
    ActiveVolume,
}

impl Metric {
    pub fn of(&self, c: &LogicalCost) -> f64 {
        match self {
            Metric::Toffoli => c.toffoli,
            Metric::ActiveVolume => c.active_volume,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LandscapeRow {
    pub s: usize,
    pub cost: LogicalCost,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowChoice {
    pub s: usize,
    pub cost: LogicalCost,
    pub landscape: Vec<LandscapeRow>,
}

pub const DEFAULT_WINDOW_RANGE: (usize, usize) = (1, 24);

/// Landscape of [`pe_cost`] over `range`, clipped to valid window sizes.
pub fn landscape(
    n: usize,
    point_add: &LogicalCost,
    precomputed_bits: usize,
    weights: &AVWeights,
    range: (usize, usize),
) -> Result<Vec<LandscapeRow>> {
    let hi = range.1.min(n.saturating_sub(precomputed_bits)).min(62);
    (range.0.max(1)..=hi)
        .into_par_iter()
        .map(|s| {
            Ok(LandscapeRow {
                s,
                cost: pe_cost(n, s, point_add, precomputed_bits, weights)?,
            })
        })
        .collect()
}

/// Exhaustive scan; ties go to the smaller window.
pub fn optimize_window(
    n: usize,
    point_add: &LogicalCost,
    metric: Metric,
    precomputed_bits: usize,
    weights: &AVWeights,
    range: (usize, usize),
) -> Result<WindowChoice> {
    let rows = landscape(n, point_add, precomputed_bits, weights, range)?;
    let best = rows
        .iter()
        .fold(None::<&LandscapeRow>, |acc, r| match acc {
            Some(b) if metric.of(&b.cost) <= metric.of(&r.cost) => Some(b),
            _ => Some(r),
        })
        .ok_or(CostError::WindowOutOfRange { s: range.0, max: range.1 })?;
    Ok(WindowChoice {
        s: best.s,
        cost: best.cost,
        landscape: rows,
    })
}

/// Point-addition Toffolis from its parts: four inversions, eight
/// multiplications and the flag logic.
pub fn point_add_toffoli_decomposition(n: usize, inversion: u64, multiplication: u64) -> u64 {
    let n = n as u64;
    4 * inversion + 8 * multiplication + 39 * (n - 1) + 6 * n
}

/// `x` rounded to `digits` significant figures.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let e = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits - 1 - e);
    (x * scale).round() / scale
}

/// Scientific notation with three significant figures, e.g. `2.05e6`.
pub fn sci3(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let r = round_sig(x, 3);
    let e = r.abs().log10().floor() as i32;
    format!("{:.2}e{e}", r / 10f64.powi(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights() -> AVWeights {
        "cnot = 4\ntoffoli = 47\nswap = 3\nnot = 0\nand_uncompute = 1\nqrom_bit = 1.5"
            .parse()
            .unwrap()
    }

    fn pa(c: f64) -> LogicalCost {
        LogicalCost {
            toffoli: c,
            qubits: 0,
            ..Default::default()
        }
    }

    #[test]
    fn qrom_formulas() {
        let q = qrom_costs(4).unwrap();
        assert_eq!((q.lookup_toffoli, q.unlookup_toffoli, q.unlookup_av), (2.0, 4.0, 243.0));
        let q = qrom_costs(1 << 13).unwrap();
        assert_eq!(q.lookup_toffoli, 8190.0);
        assert!((q.unlookup_toffoli - 2f64.powf(7.5)).abs() < 1e-9);
        let q = qrom_costs(2).unwrap();
        assert_eq!(q.lookup_toffoli, 0.0);
        assert!((q.unlookup_toffoli - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(qrom_costs(1), Err(CostError::TooFewItems(1)));
    }

    #[test]
    fn pe_cost_matches_group_sum() {
        let w = weights();
        for (n, s) in [(20, 5), (20, 6), (23, 1), (17, 17)] {
            let c = 1000.0;
            let mut direct = 0.0;
            let mut left = n;
            while left > 0 {
                let g = left.min(s);
                direct += 2f64.powi(g as i32) - 2.0 + c + 2f64.powf(g as f64 / 2.0 + 1.0);
                left -= g;
            }
            let got = pe_cost(n, s, &pa(c), 0, &w).unwrap();
            assert!((got.toffoli - 2.0 * direct).abs() < 1e-6, "n={n} s={s}");
            assert_eq!(got.qubits, 13 * n as u64 + 7);
        }
    }

    #[test]
    fn pe_cost_range_errors() {
        let w = weights();
        assert!(pe_cost(20, 0, &pa(1.0), 0, &w).is_err());
        assert!(pe_cost(20, 21, &pa(1.0), 0, &w).is_err());
        assert!(pe_cost(60, 13, &pa(1.0), 48, &w).is_err());
        assert!(pe_cost(20, 1, &pa(1.0), 20, &w).is_err());
    }

    #[test]
    fn precomputed_bits_only_shorten_the_exponent() {
        let w = weights();
        let a = pe_cost(163, 13, &pa(71232.0), 48, &w).unwrap();
        let b = pe_cost(115, 13, &pa(71232.0), 0, &w).unwrap();
        assert_eq!(a.toffoli, b.toffoli);
        assert_eq!(a.qubits, pe_qubits(163));
    }

    #[test]
    fn optimizer_breaks_ties_low() {
        let w = weights();
        let flat = LogicalCost::default();
        let rows = landscape(10, &flat, 0, &w, (1, 24)).unwrap();
        assert_eq!(rows.len(), 10);
        let best = optimize_window(10, &pa(1e9), Metric::Toffoli, 0, &w, (1, 24)).unwrap();
        assert_eq!(best.s, 10);
        let best = optimize_window(10, &pa(0.0), Metric::ActiveVolume, 0, &w, (3, 4)).unwrap();
        assert_eq!(best.s, 3);
    }

    #[test]
    fn weights_parse_and_roundtrip() {
        let w = weights();
        assert_eq!(w.to_text().parse::<AVWeights>().unwrap(), w);
        assert_eq!(
            "cnot = 1".parse::<AVWeights>(),
            Err(CostError::MissingWeight("toffoli"))
        );
        assert!(matches!("cnot 1".parse::<AVWeights>(), Err(CostError::Syntax(1))));
        assert!(matches!("bogus = 1".parse::<AVWeights>(), Err(CostError::UnknownWeight(_))));
        assert!(matches!("cnot = -1".parse::<AVWeights>(), Err(CostError::BadWeight { .. })));
    }

    #[test]
    fn active_volume_is_linear() {
        let w = weights();
        assert_eq!(active_volume(&GateCounts::default(), &w), 0.0);
        let c = GateCounts {
            cnot: 10,
            toffoli: 3,
            swap: 2,
            not_: 1,
            and_uncompute: 3,
            ..Default::default()
        };
        let d = GateCounts {
            cnot: 20,
            toffoli: 6,
            swap: 4,
            not_: 2,
            and_uncompute: 6,
            ..Default::default()
        };
        assert_eq!(2.0 * active_volume(&c, &w), active_volume(&d, &w));
    }

    #[test]
    fn decomposition_and_rounding() {
        assert_eq!(point_add_toffoli_decomposition(163, 13986, 999), 71232);
        assert_eq!(round_sig(71232.0, 3), 71200.0);
        assert_eq!(sci3(2_054_321.0), "2.05e6");
        assert_eq!(sci3(365_336.0), "3.65e5");
    }
}
