//! Window-size optimization for the standard fields, by Toffoli count and by
//! active volume, with and without 48 precomputed key bits.
//!
//! The point-addition Toffoli count is taken both from the synthesized
//! circuit and from the inversion/multiplication decomposition.
//!
//! ```text
//! cargo run --release --example window_landscape [-- 233]
//! ```

use gf2shor::arith_synth::{default_modulus_set, AdditionChain, FormulaTable};
use gf2shor::ecc::{synth_ecpointadd_with, CurveSpec};
use gf2shor::shor_cost::{
    landscape, optimize_window, point_add_toffoli_decomposition, sci3, AVWeights, LogicalCost, Metric,
    DEFAULT_WINDOW_RANGE,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let only: Option<usize> = std::env::args().nth(1).map(|s| s.parse()).transpose()?;
    let weights = AVWeights::builtin()?;
    let formulas = FormulaTable::builtin();
    for n in [163, 233, 283, 571] {
        if only.is_some_and(|m| m != n) {
            continue;
        }
        let curve = CurveSpec::named(&format!("K-{n}"))?;
        let (_, rep) = synth_ecpointadd_with(
            &curve,
            &default_modulus_set(n)?,
            &AdditionChain::standard(n)?,
            &formulas,
            false,
        )?;
        let circuit = LogicalCost::from_counts(&rep.lowered, &weights);
        let decomposed = LogicalCost {
            toffoli: point_add_toffoli_decomposition(n, rep.inversion_toffoli, rep.multiplication_toffoli) as f64,
            ..circuit
        };
        for (label, pa) in [("circuit", circuit), ("decomposition", decomposed)] {
            for precomp in [0, 48] {
                let t = optimize_window(n, &pa, Metric::Toffoli, precomp, &weights, DEFAULT_WINDOW_RANGE)?;
                let a = optimize_window(n, &pa, Metric::ActiveVolume, precomp, &weights, DEFAULT_WINDOW_RANGE)?;
                println!(
                    "n={n} C={} ({label}) precomp={precomp}: toffoli s={} {} | AV s={} {} | qubits {}",
                    pa.toffoli,
                    t.s,
                    sci3(t.cost.toffoli),
                    a.s,
                    sci3(a.cost.active_volume),
                    t.cost.qubits
                );
            }
        }
        if only.is_some() {
            println!("s,toffoli,active_volume");
            for row in landscape(n, &circuit, 0, &weights, DEFAULT_WINDOW_RANGE)? {
                println!("{},{:.1},{:.4e}", row.s, row.cost.toffoli, row.cost.active_volume);
            }
        }
    }
    Ok(())
}
