//! Simulation of the arithmetic circuits against the field oracle.

use gf2shor::arith_synth::*;
use gf2shor::circuit_ir::{run, BitState};
use gf2shor::gf2_field::{BinaryPoly, FieldSpec, ModulusSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_modmult(field: &FieldSpec, set: &ModulusSet, samples: Option<usize>) {
    let c = synth_crt_modmult(field, set, &FormulaTable::builtin()).unwrap();
    let n = field.n;
    let f = c.register("f").unwrap();
    let g = c.register("g").unwrap();
    let h = c.register("h").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases: Vec<(BinaryPoly, BinaryPoly, BinaryPoly)> = Vec::new();
    match samples {
        None => {
            for a in 0..1u64 << n {
                for b in 0..1u64 << n {
                    for k in 0..1u64 << n {
                        cases.push((field.element(a), field.element(b), field.element(k)));
                    }
                }
            }
        }
        Some(s) => {
            for _ in 0..s {
                let r = |rng: &mut ChaCha8Rng| {
                    let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                    BinaryPoly::from_bits(&bits)
                };
                cases.push((r(&mut rng), r(&mut rng), r(&mut rng)));
            }
        }
    }
    for (a, b, k) in cases {
        let mut st = BitState::zeros(c.num_qubits());
        st.write(f, &a);
        st.write(g, &b);
        st.write(h, &k);
        run(&c, &mut st).unwrap();
        assert_eq!(st.read(f), a);
        assert_eq!(st.read(g), b);
        let want = &field.mul(&a, &b) ^ &k;
        assert_eq!(st.read(h), want, "f={a} g={b} h0={k}");
    }
}

#[test]
fn modmult_toy_n4_exhaustive() {
    let field = FieldSpec::small(4).unwrap();
    let set = ModulusSet::parse("10\n11\n111\n1011\n", 4).unwrap();
    check_modmult(&field, &set, None);
}

#[test]
fn modmult_small_fields_exhaustive() {
    for n in 2..=5 {
        let field = FieldSpec::small(n).unwrap();
        check_modmult(&field, &auto_modulus_set(n), None);
    }
}

#[test]
fn modmult_n8_n16_sampled() {
    for n in [8, 16] {
        let field = FieldSpec::small(n).unwrap();
        check_modmult(&field, &auto_modulus_set(n), Some(1000));
    }
}

#[test]
fn modmult_163_sampled() {
    let field = FieldSpec::standard(163).unwrap();
    check_modmult(&field, &default_modulus_set(163).unwrap(), Some(20));
}

#[test]
fn modmult_283_571_sampled() {
    for n in [283, 571] {
        let field = FieldSpec::standard(n).unwrap();
        check_modmult(&field, &default_modulus_set(n).unwrap(), Some(3));
    }
}

fn check_inversion(n: usize, chain: &str, clearing: bool) -> InversionReport {
    let field = FieldSpec::small(n).unwrap();
    let chain: AdditionChain = chain.parse().unwrap();
    let set = auto_modulus_set(n);
    let (c, rep) = synth_flt_inversion_with(&field, &chain, clearing, &set, &FormulaTable::builtin(), true).unwrap();
    for a in 1..1u64 << n {
        let x = field.element(a);
        let mut st = BitState::zeros(c.num_qubits());
        st.write(rep.layout.input, &x);
        run(&c, &mut st).unwrap();
        assert_eq!(st.read(rep.layout.input), x);
        assert_eq!(st.read(rep.layout.output), field.inv(&x).unwrap(), "n={n} f={x}");
        if !rep.layout.clean.is_empty() {
            assert_eq!(st.read(rep.layout.clean), BinaryPoly::zero());
        }
    }
    rep
}

#[test]
fn inversion_n5_exhaustive() {
    let r = check_inversion(5, "1 2 4", true);
    assert_eq!(r.modmults, 2);
    let r = check_inversion(5, "1 2 4", false);
    assert_eq!(r.modmults, 2);
    let r = check_inversion(4, "1 2 3", true);
    assert_eq!(r.modmults, 2);
    let r = check_inversion(8, "1 2 3 6 7 6 3 2", true);
    assert_eq!(r.modmults, 7);
    let r = check_inversion(8, "1 2 3 6 7 6 3 2", false);
    assert_eq!(r.modmults, 4);
}
