//! End-to-end estimates: field size to point-addition costs, window choice
//! and physical resources per architecture.

use serde::Serialize;
use thiserror::Error;

use crate::arith_synth::{default_modulus_set, AdditionChain, ArithError, FormulaTable};
use crate::circuit_ir::GateCounts;
use crate::ecc::{synth_ecpointadd_with, CurveSpec, EcError};
use crate::phys_estimate::{av_estimate, baseline_estimate, format_runtime, AVParams, BaselineParams};
use crate::shor_cost::{
    optimize_window, point_add_toffoli_decomposition, AVWeights, CostError, LogicalCost, Metric,
    DEFAULT_WINDOW_RANGE,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Ec(#[from] EcError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Where the point-addition Toffoli count comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ToffoliSource {
    /// The lowered synthesized circuit.
    Circuit,
    /// `4·Inv + 8·Mul + 39(n−1) + 6n` from measured subroutine counts.
    Decomposition,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldCosts {
    pub n: usize,
    pub source: ToffoliSource,
    pub point_add: LogicalCost,
    pub point_add_counts: GateCounts,
    pub inversion_toffoli: u64,
    pub multiplication_toffoli: u64,
}

/// Synthesizes the point addition for `curve` in
/// counts-only mode.
pub fn field_costs(
    curve: &CurveSpec,
    formulas: &FormulaTable,
    weights: &AVWeights,
    source: ToffoliSource,
) -> Result<FieldCosts> {
    let n = curve.n();
    let (_, rep) = synth_ecpointadd_with(
        curve,
        &default_modulus_set(n)?,
        &AdditionChain::for_field(n)?,
        formulas,
        false,
    )?;
    let mut point_add = LogicalCost::from_counts(&rep.lowered, weights);
    if source == ToffoliSource::Decomposition {
        point_add.toffoli =
            point_add_toffoli_decomposition(n, rep.inversion_toffoli, rep.multiplication_toffoli) as f64;
    }
    Ok(FieldCosts {
        n,
        source,
        point_add,
        point_add_counts: rep.lowered,
        inversion_toffoli: rep.inversion_toffoli,
        multiplication_toffoli: rep.multiplication_toffoli,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// Surface code with nearest-neighbor logical operations; parameter is
    /// the code cycle time.
    Baseline,
    /// Photonic active-volume layout; parameter is the fiber delay.
    ActiveVolume,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub field: usize,
    pub precomp: usize,
    pub architecture: Architecture,
    /// Code cycle time or fiber delay, seconds.
    pub param_seconds: f64,
    pub s: usize,
    pub toffoli: f64,
    pub active_volume: f64,
    pub logical_qubits: u64,
    pub d: u32,
    pub device_size: f64,
    pub runtime_seconds: f64,
    pub runtime_display: String,
}

/// Baseline runs use the Toffoli-optimal window, active-volume runs the
/// AV-optimal one.
pub fn estimate(
    costs: &FieldCosts,
    precomp: usize,
    arch: Architecture,
    param_seconds: f64,
    weights: &AVWeights,
) -> Result<ScenarioReport> {
    let metric = match arch {
        Architecture::Baseline => Metric::Toffoli,
        Architecture::ActiveVolume => Metric::ActiveVolume,
    };
    let w = optimize_window(costs.n, &costs.point_add, metric, precomp, weights, DEFAULT_WINDOW_RANGE)?;
    let phys = match arch {
        Architecture::Baseline => baseline_estimate(
            w.cost.qubits,
            w.cost.toffoli,
            &BaselineParams::with_cycle(param_seconds),
        ),
        Architecture::ActiveVolume => {
            av_estimate(w.cost.active_volume, w.cost.qubits, &AVParams::with_delay(param_seconds))
        }
    };
    Ok(ScenarioReport {
        field: costs.n,
        precomp,
        architecture: arch,
        param_seconds,
        s: w.s,
        toffoli: w.cost.toffoli,
        active_volume: w.cost.active_volume,
        logical_qubits: w.cost.qubits,
        d: phys.distance,
        device_size: phys.device_size,
        runtime_seconds: phys.runtime_avg,
        runtime_display: format_runtime(phys.runtime_avg),
    })
}

pub fn reports_to_csv(reports: &[ScenarioReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_field_runs_end_to_end() {
        let curve = CurveSpec::toy(5, 0).unwrap();
        let w: AVWeights = "cnot = 4\ntoffoli = 40\nswap = 0\nnot = 0\nand_uncompute = 0\nqrom_bit = 1"
            .parse()
            .unwrap();
        let costs = field_costs(&curve, &FormulaTable::builtin(), &w, ToffoliSource::Circuit).unwrap();
        assert_eq!(costs.point_add.qubits, costs.point_add_counts.qubits);
        assert_eq!(costs.point_add_counts.mcx, 0);
        let r = estimate(&costs, 0, Architecture::Baseline, 1e-6, &w).unwrap();
        assert!(r.s >= 1 && r.s <= 5);
        assert!(r.d >= 3);
        let csv = reports_to_csv(&[r]).unwrap();
        assert!(csv.starts_with("field,precomp,architecture,param_seconds,s,"));
        assert_eq!(csv.lines().count(), 2);
    }
}
