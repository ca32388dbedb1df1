//! Physical resources for the windowed algorithm on a surface-code
//! baseline and on an active-volume photonic layout.
//!
//! ```text
//! cargo run --release --example physical_estimates
//! ```

use gf2shor::arith_synth::FormulaTable;
use gf2shor::ecc::CurveSpec;
use gf2shor::pipeline::{estimate, field_costs, Architecture, ToffoliSource};
use gf2shor::shor_cost::{sci3, AVWeights};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let formulas = FormulaTable::builtin();
    let weights = AVWeights::builtin()?;
    println!(
        "{:<6} {:>7} {:<13} {:>8} {:>3} {:>9} {:>9} {:>11}",
        "curve", "precomp", "architecture", "param", "s", "toffoli", "d", "runtime"
    );
    for name in ["K-163", "K-233", "K-283", "K-571"] {
        let curve = CurveSpec::named(name)?;
        let costs = field_costs(&curve, &formulas, &weights, ToffoliSource::Decomposition)?;
        for precomp in [0, 48] {
            for (arch, param) in [
                (Architecture::Baseline, 1e-6),
                (Architecture::Baseline, 1e-3),
                (Architecture::ActiveVolume, 1e-6),
                (Architecture::ActiveVolume, 1e-5),
            ] {
                let r = estimate(&costs, precomp, arch, param, &weights)?;
                let size = match arch {
                    Architecture::Baseline => format!("{} qubits", sci3(r.device_size)),
                    Architecture::ActiveVolume => format!("{} modules", r.device_size),
                };
                println!(
                    "{name:<6} {precomp:>7} {:<13} {param:>8.0e} {:>3} {:>9} {:>9} {:>11}  {size}",
                    format!("{arch:?}"),
                    r.s,
                    sci3(r.toffoli),
                    r.d,
                    r.runtime_display
                );
            }
        }
    }
    Ok(())
}
