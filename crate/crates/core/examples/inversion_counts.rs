//! Inversion costs for the standard fields, with and without clearing.
//!
//! ```text
//! cargo run --release --example inversion_counts
//! ```

use gf2shor::arith_synth::{default_modulus_set, synth_flt_inversion_with, AdditionChain, FormulaTable};
use gf2shor::gf2_field::{FieldSpec, STANDARD_DEGREES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = FormulaTable::builtin();
    println!(
        "{:>5} {:>9} {:>9} {:>10} {:>8} {:>9} {:>10}",
        "n", "clearing", "modmults", "cnot", "swap", "toffoli", "registers"
    );
    for n in STANDARD_DEGREES {
        let field = FieldSpec::standard(n)?;
        let set = default_modulus_set(n)?;
        let chain = AdditionChain::standard(n)?;
        for clearing in [true, false] {
            let (_, r) = synth_flt_inversion_with(&field, &chain, clearing, &set, &table, false)?;
            println!(
                "{:>5} {:>9} {:>9} {:>10} {:>8} {:>9} {:>10}",
                n, clearing, r.modmults, r.counts.cnot, r.counts.swap, r.counts.toffoli, r.registers
            );
        }
    }
    Ok(())
}
