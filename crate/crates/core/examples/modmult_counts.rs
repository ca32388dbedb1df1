//! Gate counts of the CRT multiplier for the four standard binary fields.
//!
//! ```text
//! cargo run --release --example modmult_counts
//! ```

use std::time::Instant;

use gf2shor::arith_synth::{default_modulus_set, synth_crt_modmult_counts, FormulaTable};
use gf2shor::gf2_field::{FieldSpec, STANDARD_DEGREES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = FormulaTable::builtin();
    println!("{:>5} {:>8} {:>6} {:>9} {:>7} {:>9}", "n", "factors", "omega", "cnot", "swap", "toffoli");
    for n in STANDARD_DEGREES {
        let t0 = Instant::now();
        let field = FieldSpec::standard(n)?;
        let set = default_modulus_set(n)?;
        let r = synth_crt_modmult_counts(&field, &set, &table)?;
        println!(
            "{:>5} {:>8} {:>6} {:>9} {:>7} {:>9}   ({:.2?})",
            n,
            r.factors,
            r.omega,
            r.counts.cnot,
            r.counts.swap,
            r.counts.toffoli,
            t0.elapsed()
        );
    }
    Ok(())
}
