//! Linear-family circuits, Karatsuba blocks and the correction circuit
//! against schoolbook `u64` arithmetic.

use gf2shor::arith_synth::*;
use gf2shor::circuit_ir::{run, BitState, Circuit};
use gf2shor::gf2_field::{enumerate_irreducibles, BinaryPoly, FieldSpec};
use gf2shor::gf2_linalg::{const_mul_matrix, residue_map};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn clmul(a: u64, b: u64) -> u64 {
    (0..32).filter(|i| (b >> i) & 1 == 1).fold(0, |acc, i| acc ^ (a << i))
}

fn reduce(mut a: u64, m: u64) -> u64 {
    let dm = 63 - m.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= dm {
        a ^= m << (63 - a.leading_zeros() - dm);
    }
    a
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    reduce(clmul(a, b), m)
}

fn modulus(field: &FieldSpec) -> u64 {
    field.p.to_u64().unwrap()
}

/// Runs `c` on register values `vals` and returns every named register.
fn exec(c: &Circuit, regs: &[&str], vals: &[u64]) -> Vec<u64> {
    let mut st = BitState::zeros(c.num_qubits());
    for (name, &v) in regs.iter().zip(vals) {
        st.write_u64(c.register(name).unwrap(), v);
    }
    run(c, &mut st).unwrap();
    regs.iter().map(|n| st.read_u64(c.register(n).unwrap())).collect()
}

/// Checks every register outside `regs` is zero after running on `vals`.
fn ancillas_clean(c: &Circuit, regs: &[&str], vals: &[u64]) -> bool {
    let mut st = BitState::zeros(c.num_qubits());
    for (name, &v) in regs.iter().zip(vals) {
        st.write_u64(c.register(name).unwrap(), v);
    }
    run(c, &mut st).unwrap();
    c.registers()
        .iter()
        .filter(|r| !regs.contains(&r.name.as_str()))
        .all(|r| st.read_u64(r.reg()) == 0)
}

fn all(bits: usize) -> impl Iterator<Item = u64> {
    0..1u64 << bits
}

#[test]
fn addition_family_exhaustive() {
    for n in 1..=5 {
        let c = synth_addition(&AdditionMode::Plain, n);
        for f in all(n) {
            for g in all(n) {
                assert_eq!(exec(&c, &["f", "g"], &[f, g]), vec![f, f ^ g]);
            }
        }
        let c = synth_addition(&AdditionMode::Controlled, n);
        for b in 0..2 {
            for f in all(n) {
                for g in all(n) {
                    let want = if b == 1 { f ^ g } else { g };
                    assert_eq!(exec(&c, &["ctrl", "f", "g"], &[b, f, g]), vec![b, f, want]);
                }
            }
        }
        for k in all(n) {
            let cst = BinaryPoly::from_u64(k);
            let c = synth_addition(&AdditionMode::Constant(cst.clone()), n);
            assert!(c.counts().cnot == 0 && c.counts().toffoli == 0);
            for g in all(n) {
                assert_eq!(exec(&c, &["g"], &[g]), vec![g ^ k]);
            }
            let c = synth_addition(&AdditionMode::ControlledConstant(cst), n);
            assert_eq!(c.counts().toffoli, 0);
            for b in 0..2 {
                for g in all(n) {
                    assert_eq!(exec(&c, &["ctrl", "g"], &[b, g]), vec![b, g ^ (b * k)]);
                }
            }
        }
    }
}

#[test]
fn reduction_maps_exhaustive() {
    for n in 2..=5 {
        for d in 1..n {
            for m in enumerate_irreducibles(d) {
                let mu = m.to_u64().unwrap();
                let c = synth_out_of_place_mul(&residue_map(&m, n));
                for g in all(n) {
                    for f in all(d) {
                        assert_eq!(exec(&c, &["g", "f"], &[g, f]), vec![g, f ^ reduce(g, mu)]);
                    }
                }
            }
        }
    }
}

#[test]
fn constant_multiplication_exhaustive() {
    for n in 2..=5 {
        let field = FieldSpec::small(n).unwrap();
        let p = modulus(&field);
        for h in 1..1u64 << n {
            let m = const_mul_matrix(&BinaryPoly::from_u64(h), &field).unwrap();
            let inplace = synth_in_place_mul(&m).unwrap();
            assert_eq!(inplace.counts().toffoli, 0);
            let outplace = synth_out_of_place_mul(&m);
            for f in all(n) {
                let want = mulmod(f, h, p);
                assert_eq!(exec(&inplace, &["f"], &[f]), vec![want], "n={n} h={h:#x} f={f:#x}");
                for acc in [0, (1 << n) - 1] {
                    assert_eq!(exec(&outplace, &["g", "f"], &[f, acc]), vec![f, acc ^ want]);
                }
            }
        }
    }
}

#[test]
fn squaring_exhaustive_small_and_sampled_large() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3, 4, 5, 8, 16] {
        let field = FieldSpec::small(n).unwrap();
        let p = modulus(&field);
        for k in [1, 2, n] {
            let c = synth_square(&field, k).unwrap();
            assert_eq!(c.counts().toffoli, 0);
            let inputs: Vec<u64> = if n <= 5 {
                all(n).collect()
            } else {
                (0..1000).map(|_| rng.gen_range(0..1u64 << n)).collect()
            };
            for f in inputs {
                let mut want = f;
                for _ in 0..k {
                    want = mulmod(want, want, p);
                }
                assert_eq!(exec(&c, &["f"], &[f]), vec![want], "n={n} k={k} f={f:#x}");
            }
        }
    }
}

#[test]
fn constant_multiplication_sampled_n8_n16() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [8, 16] {
        let field = FieldSpec::small(n).unwrap();
        let p = modulus(&field);
        for _ in 0..4 {
            let h = rng.gen_range(1..1u64 << n);
            let c = synth_in_place_mul(&const_mul_matrix(&BinaryPoly::from_u64(h), &field).unwrap()).unwrap();
            for _ in 0..250 {
                let f = rng.gen_range(0..1u64 << n);
                assert_eq!(exec(&c, &["f"], &[f]), vec![mulmod(f, h, p)]);
            }
        }
    }
}

#[test]
fn kmult_blocks_exhaustive() {
    let table = FormulaTable::builtin();
    for d in 1..=5 {
        let formula = table.get(d).unwrap();
        let mut moduli = enumerate_irreducibles(d);
        if d == 2 {
            moduli.push(BinaryPoly::from_u64(0b100));
            moduli.push(BinaryPoly::from_u64(0b101));
        }
        for m in moduli {
            let mu = m.to_u64().unwrap();
            let c = synth_kmult(&formula, &m).unwrap();
            assert!(c.counts().toffoli as usize <= formula.v());
            for f in all(d) {
                for g in all(d) {
                    for h in [0, (1 << d) - 1] {
                        let want = h ^ mulmod(f, g, mu);
                        assert_eq!(exec(&c, &["f", "g", "h"], &[f, g, h]), vec![f, g, want], "d={d} m={mu:#b}");
                    }
                }
            }
        }
    }
}

#[test]
fn correction_exhaustive() {
    for omega in 1..=4 {
        for n in omega.max(2)..=5 {
            let c = synth_correction(omega, n).unwrap();
            let counts = correction_counts(omega);
            assert_eq!(c.counts().toffoli, counts.toffoli);
            assert_eq!(c.counts().cnot, counts.cnot);
            for f in all(n) {
                for g in all(n) {
                    let prod = clmul(f, g);
                    // t[p] receives c_{2n−2−(ω−1−p)}.
                    let want = (0..omega).fold(0, |acc, p| acc | (((prod >> (2 * n - 1 - omega + p)) & 1) << p));
                    assert_eq!(exec(&c, &["f", "g", "t"], &[f, g, 0]), vec![f, g, want], "ω={omega} n={n}");
                }
            }
        }
    }
    assert!(synth_correction(0, 4).is_err());
    assert!(synth_correction(5, 4).is_err());
}

#[test]
fn modmult_ancilla_free_and_clean() {
    for n in 3..=5 {
        let field = FieldSpec::small(n).unwrap();
        let c = synth_crt_modmult(&field, &auto_modulus_set(n), &FormulaTable::builtin()).unwrap();
        assert_eq!(c.num_qubits(), 3 * n);
        assert!(ancillas_clean(&c, &["f", "g", "h"], &[1, 2, 3]));
    }
}

#[test]
fn inversion_sampled_n8_n16_both_variants() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in [8, 16] {
        let field = FieldSpec::small(n).unwrap();
        let p = modulus(&field);
        let chain = AdditionChain::binary(n).unwrap();
        for clearing in [true, false] {
            let (c, rep) = synth_flt_inversion_with(
                &field,
                &chain,
                clearing,
                &auto_modulus_set(n),
                &FormulaTable::builtin(),
                true,
            )
            .unwrap();
            for _ in 0..1000 {
                let f = rng.gen_range(1..1u64 << n);
                let mut st = BitState::zeros(c.num_qubits());
                st.write_u64(rep.layout.input, f);
                run(&c, &mut st).unwrap();
                let inv = st.read_u64(rep.layout.output);
                assert_eq!(mulmod(f, inv, p), 1, "n={n} f={f:#x} clearing={clearing}");
                assert_eq!(st.read_u64(rep.layout.input), f);
                if !rep.layout.clean.is_empty() {
                    assert_eq!(st.read(rep.layout.clean), BinaryPoly::zero());
                }
            }
        }
    }
}
