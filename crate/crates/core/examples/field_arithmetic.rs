//! Arithmetic in GF(2^163): products, inverses, Frobenius powers and the
//! CRT modulus set used by the multiplier.
//!
//! ```text
//! cargo run --example field_arithmetic
//! ```

use gf2shor::gf2_field::{crt_constants, enumerate_irreducibles, validate_modulus_set, BinaryPoly, FieldSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::standard(163)?;
    println!("p(x) = {}", field.p.to_hex());

    let a = BinaryPoly::from_exponents(&[162, 80, 1]);
    let b = BinaryPoly::from_hex("0x2fe13c0537bbc11acaa07d793de4e6d5e5c94eee8")?;
    let ab = field.mul(&a, &b);
    let inv = field.inv(&a)?;
    println!("a·b      = {}", ab.to_hex());
    println!("a^-1     = {}", inv.to_hex());
    println!("a·a^-1   = {}", field.mul(&a, &inv).to_hex());
    println!("a^(2^163) == a: {}", a.frobenius_mod(163, &field.p)? == a);

    for d in 1..=9 {
        println!("irreducibles of degree {d}: {}", enumerate_irreducibles(d).len());
    }

    let set = gf2shor::arith_synth::default_modulus_set(163)?;
    let omega = validate_modulus_set(&set, 163)?;
    println!(
        "modulus set: {} factors, deg m = {}, ω = {omega}, {} CRT constants",
        set.factors.len(),
        set.degree(),
        crt_constants(&set)?.len()
    );
    Ok(())
}
