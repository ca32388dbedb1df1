//! Gate and qubit counts of the point-addition circuit for the standard
//! fields, with the subroutine census.
//!
//! ```text
//! cargo run --release --example ecpointadd_counts
//! ```

use gf2shor::arith_synth::{default_modulus_set, AdditionChain, FormulaTable};
use gf2shor::ecc::{reference_census, synth_ecpointadd_with, CurveSpec, CENSUS_KEYS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let formulas = FormulaTable::builtin();
    let published = reference_census();
    for name in ["K-163", "K-233", "K-283", "K-571"] {
        let curve = CurveSpec::named(name)?;
        let n = curve.n();
        let set = default_modulus_set(n)?;
        let chain = AdditionChain::standard(n)?;
        let (_, rep) = synth_ecpointadd_with(&curve, &set, &chain, &formulas, false)?;
        println!(
            "{name}: toffoli {} (census estimate {}), qubits {} (12n+7 = {}), cnot {}",
            rep.lowered.toffoli,
            rep.census_toffoli,
            rep.lowered.qubits,
            12 * n + 7,
            rep.lowered.cnot
        );
    }
    let curve = CurveSpec::named("K-163")?;
    let (_, rep) = synth_ecpointadd_with(
        &curve,
        &default_modulus_set(163)?,
        &AdditionChain::standard(163)?,
        &formulas,
        false,
    )?;
    println!("\n{:<22}{:>8}{:>11}", "subroutine", "ours", "published");
    for k in CENSUS_KEYS {
        println!("{k:<22}{:>8}{:>11}", rep.census[k], published[k]);
    }
    println!("\nper-stage toffoli (unlowered multi-controlled gates excluded):");
    for (s, c) in &rep.stages {
        println!("  {s}: toffoli {} cnot {} mcx {}", c.toffoli, c.cnot, c.mcx);
    }
    Ok(())
}
