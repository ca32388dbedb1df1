//! Linear maps over GF(2): a constant multiplier in GF(2^163) as a matrix,
//! its PLU factors and the in-place CNOT circuit built from them.
//!
//! ```text
//! cargo run --release --example linear_maps
//! ```

use gf2shor::arith_synth::synth_in_place_mul;
use gf2shor::circuit_ir::{run, BitState};
use gf2shor::gf2_field::{BinaryPoly, FieldSpec};
use gf2shor::gf2_linalg::{const_mul_matrix, plu_decompose, squaring_matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::standard(163)?;
    let h = BinaryPoly::from_exponents(&[161, 97, 40, 3, 0]);
    let m = const_mul_matrix(&h, &field)?;
    let plu = plu_decompose(&m)?;
    println!(
        "M: {}x{}, {} ones; L off-diagonal {}, U off-diagonal {}, {} row swaps",
        m.rows(),
        m.cols(),
        m.popcount(),
        plu.l.offdiag_popcount(),
        plu.u.offdiag_popcount(),
        plu.swap_count()
    );

    let c = synth_in_place_mul(&m)?;
    let counts = c.counts();
    println!("in-place circuit: {} CNOT, {} swap, {} Toffoli", counts.cnot, counts.swap, counts.toffoli);

    let f = BinaryPoly::from_exponents(&[150, 7, 2]);
    let mut st = BitState::zeros(c.num_qubits());
    st.write(c.register("f").ok_or("no register f")?, &f);
    run(&c, &mut st)?;
    let out = st.read(c.register("f").ok_or("no register f")?);
    println!("circuit(f) == f·h: {}", out == field.mul(&f, &h));

    for k in [1, 2, 163] {
        let s = squaring_matrix(&field, k);
        println!("squaring^{k}: {} ones", s.popcount());
    }
    Ok(())
}
