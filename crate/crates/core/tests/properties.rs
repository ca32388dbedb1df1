//! Property tests: field and matrix algebra, circuit transformations,
//! chain invariants and the curve group law.

use gf2shor::arith_synth::*;
use gf2shor::circuit_ir::{lower_mcx, parse, reverse, run, serialize, BitState, Circuit, Control, RegKind};
use gf2shor::ecc::{ec_add_classical, ec_scalar_mul, point_order, CurveSpec, ECPoint};
use gf2shor::gf2_field::{BinaryPoly, FieldSpec};
use gf2shor::gf2_linalg::{plu_decompose, plu_decompose_tall, BitMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(bits: usize) -> impl Strategy<Value = BinaryPoly> {
    proptest::collection::vec(any::<bool>(), bits).prop_map(|b| BinaryPoly::from_bits(&b))
}

fn schoolbook_mod(a: u64, b: u64, p: u64, n: usize) -> u64 {
    let mut acc = 0u64;
    let mut x = a;
    for i in 0..n {
        if (b >> i) & 1 == 1 {
            acc ^= x;
        }
        x <<= 1;
        if (x >> n) & 1 == 1 {
            x ^= p;
        }
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_mul_matches_schoolbook(a in 0u64..1 << 16, b in 0u64..1 << 16) {
        let field = FieldSpec::small(16).unwrap();
        let p = field.p.to_u64().unwrap();
        let got = field.mul(&BinaryPoly::from_u64(a), &BinaryPoly::from_u64(b));
        prop_assert_eq!(got.to_u64().unwrap(), schoolbook_mod(a, b, p, 16));
    }

    #[test]
    fn field_axioms_163(a in poly(163), b in poly(163), c in poly(163)) {
        let f = FieldSpec::standard(163).unwrap();
        prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert_eq!(f.mul(&a, &(&b ^ &c)), &f.mul(&a, &b) ^ &f.mul(&a, &c));
        prop_assert_eq!(f.square(&a), f.mul(&a, &a));
        if !a.is_zero() {
            prop_assert!(f.mul(&a, &f.inv(&a).unwrap()).is_one());
        }
    }

    #[test]
    fn div_rem_identity(a in poly(120), m in poly(40)) {
        prop_assume!(!m.is_zero());
        let (q, r) = a.div_rem(&m).unwrap();
        prop_assert_eq!(&q.mul(&m) ^ &r, a);
        prop_assert!(r.degree().is_none_or(|d| Some(d) < m.degree()));
    }

    #[test]
    fn plu_reconstructs_invertible(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Random invertible matrix as a product of elementary row operations.
        let mut m = BitMatrix::identity(n);
        for _ in 0..4 * n {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                if rng.gen() { m.xor_row(a, b) } else { m.swap_rows(a, b) }
            }
        }
        let f = plu_decompose(&m).unwrap();
        prop_assert!(f.l.is_unit_lower_triangular());
        prop_assert!(f.u.is_upper_triangular());
        prop_assert_eq!(f.reconstruct(), m.clone());
        prop_assert_eq!(m.mul(&m.inverse().unwrap()), BitMatrix::identity(n));
        prop_assert_eq!(m.rank(), n);
    }

    #[test]
    fn tall_plu_reconstructs(seed in any::<u64>(), d in 1usize..12, extra in 0usize..12) {
        let n = d + extra;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = BitMatrix::zeros(n, d);
        for r in 0..n {
            for c in 0..d {
                m.set(r, c, rng.gen());
            }
        }
        prop_assume!(m.rank() == d);
        let f = plu_decompose_tall(&m).unwrap();
        prop_assert_eq!(f.reconstruct(), m);
    }

    #[test]
    fn rank_is_transpose_invariant(seed in any::<u64>(), r in 1usize..20, c in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = BitMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, rng.gen_bool(0.3));
            }
        }
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= r.min(c));
    }

    #[test]
    fn random_circuit_reverse_and_lowering(seed in any::<u64>(), input in any::<u64>()) {
        let c = random_circuit(seed, 10, 60);
        let mut st = BitState::zeros(c.num_qubits());
        st.write_u64(c.register("q").unwrap(), input & 0x3ff);
        let start = st.clone();
        run(&c, &mut st).unwrap();
        let mid = st.clone();
        run(&reverse(&c), &mut st).unwrap();
        prop_assert_eq!(&st, &start);

        let low = lower_mcx(&c);
        prop_assert_eq!(low.counts().mcx, 0);
        prop_assert_eq!(low.counts(), c.lowered_counts());
        let mut lst = BitState::zeros(low.num_qubits());
        lst.write_u64(low.register("q").unwrap(), input & 0x3ff);
        run(&low, &mut lst).unwrap();
        let q = low.register("q").unwrap();
        prop_assert_eq!(lst.read_u64(q), mid.read_u64(c.register("q").unwrap()));
        if let Some(anc) = low.register("mcx_anc") {
            prop_assert_eq!(lst.read_u64(anc), 0);
        }

        let text = serialize(&c);
        prop_assert_eq!(serialize(&parse(&text).unwrap()), text);
    }

    #[test]
    fn counts_are_additive(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_circuit(s1, 10, 40);
        let b = random_circuit(s2, 10, 25);
        let mut joined = Circuit::new();
        let q = joined.add_register("q", 10, RegKind::Input);
        joined.append(&a, &q.qubits());
        joined.append(&b, &q.qubits());
        let sum = a.counts().gates_only() + b.counts().gates_only();
        prop_assert_eq!(joined.counts().gates_only(), sum);
        prop_assert_eq!(joined.len(), a.len() + b.len());
    }
}

fn random_circuit(seed: u64, width: u32, len: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new();
    c.add_register("q", width as usize, RegKind::Input);
    let pick = |rng: &mut ChaCha8Rng, k: usize| -> Vec<u32> {
        let mut v: Vec<u32> = (0..width).collect();
        for i in 0..k {
            let j = rng.gen_range(i..v.len());
            v.swap(i, j);
        }
        v.truncate(k);
        v
    };
    for _ in 0..len {
        match rng.gen_range(0..5) {
            0 => c.x(rng.gen_range(0..width)),
            1 => {
                let v = pick(&mut rng, 2);
                c.cnot(v[0], v[1]);
            }
            2 => {
                let v = pick(&mut rng, 2);
                c.swap(v[0], v[1]);
            }
            3 => {
                let v = pick(&mut rng, 3);
                c.ccx(v[0], v[1], v[2]);
            }
            _ => {
                let k = rng.gen_range(3..6);
                let v = pick(&mut rng, k + 1);
                let ctrls = v[..k]
                    .iter()
                    .map(|&q| if rng.gen() { Control::on(q) } else { Control::off(q) })
                    .collect();
                c.mcx(ctrls, v[k]);
            }
        }
    }
    c
}

/// `reverse(c)` undoes `c` on sampled inputs of the given registers.
fn assert_reverse_undoes(c: &Circuit, inputs: &[&str], samples: usize) {
    let inv = reverse(c);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..samples {
        let mut st = BitState::zeros(c.num_qubits());
        for name in inputs {
            let r = c.register(name).unwrap();
            for q in r.qubits() {
                st.set(q, rng.gen());
            }
        }
        let start = st.clone();
        run(c, &mut st).unwrap();
        run(&inv, &mut st).unwrap();
        assert_eq!(st, start);
    }
}

#[test]
fn shipped_circuits_reverse_to_identity() {
    let table = FormulaTable::builtin();
    for n in [5, 8, 16] {
        let field = FieldSpec::small(n).unwrap();
        let set = auto_modulus_set(n);
        assert_reverse_undoes(&synth_crt_modmult(&field, &set, &table).unwrap(), &["f", "g", "h"], 50);
        assert_reverse_undoes(&synth_square(&field, 3).unwrap(), &["f"], 50);
        for clearing in [true, false] {
            let c = synth_flt_inversion_with(&field, &AdditionChain::binary(n).unwrap(), clearing, &set, &table, true)
                .unwrap()
                .0;
            assert_reverse_undoes(&c, &["f"], 50);
        }
    }
    let field = FieldSpec::standard(163).unwrap();
    let c = synth_crt_modmult(&field, &default_modulus_set(163).unwrap(), &table).unwrap();
    assert_reverse_undoes(&c, &["f", "g", "h"], 5);
    let curve = CurveSpec::toy(5, 1).unwrap();
    let c = gf2shor::ecc::synth_ecpointadd(&curve, &auto_modulus_set(5), &AdditionChain::binary(5).unwrap(), &table)
        .unwrap();
    let low = lower_mcx(&c);
    // Valid point-addition inputs only: every pair of curve points.
    let inv = reverse(&low);
    let pts = curve.points().unwrap();
    for p1 in pts.iter().step_by(3) {
        for p2 in pts.iter().step_by(5) {
            let mut st = BitState::zeros(low.num_qubits());
            st.write(low.register("x1").unwrap(), &p1.x);
            st.write(low.register("y1").unwrap(), &p1.y);
            st.write(low.register("x2").unwrap(), &p2.x);
            st.write(low.register("y2").unwrap(), &p2.y);
            st.write(
                low.register("lambda_r").unwrap(),
                &gf2shor::ecc::lambda_r(p2, &curve.field),
            );
            let start = st.clone();
            run(&low, &mut st).unwrap();
            run(&inv, &mut st).unwrap();
            assert_eq!(st, start);
        }
    }
}

#[test]
fn standard_chains_have_five_registers() {
    for n in [163, 233, 283, 571] {
        let ch = AdditionChain::standard(n).unwrap();
        ch.check_for(n).unwrap();
        assert_eq!(ch.r(), 2 * ch.l() + 1 - ch.l_tilde());
        assert_eq!(ch.r(), 5, "n={n}");
    }
}

fn random_point(pts: &[ECPoint], rng: &mut ChaCha8Rng) -> ECPoint {
    pts[rng.gen_range(0..pts.len())].clone()
}

#[test]
fn group_law_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, a) in [(7, 1), (8, 0), (11, 1)] {
        let curve = CurveSpec::toy(n, a).unwrap();
        let pts = curve.points().unwrap();
        let add = |p: &ECPoint, q: &ECPoint| ec_add_classical(p, q, &curve).unwrap();
        let o = ECPoint::infinity();
        for p in &pts {
            assert_eq!(add(p, &o), *p);
            assert_eq!(add(&o, p), *p);
            assert!(add(p, &p.neg()).is_infinity());
            assert!(curve.contains(&add(p, p)));
        }
        for _ in 0..10_000 {
            let (p, q, r) = (
                random_point(&pts, &mut rng),
                random_point(&pts, &mut rng),
                random_point(&pts, &mut rng),
            );
            assert_eq!(add(&p, &q), add(&q, &p));
            assert_eq!(add(&add(&p, &q), &r), add(&p, &add(&q, &r)), "n={n}");
        }
        // Lagrange: every point order divides the group order.
        let order = pts.len() as u128;
        for p in pts.iter().take(20) {
            let k = point_order(p, &curve).unwrap();
            assert_eq!(order % k, 0);
            assert!(ec_scalar_mul(k, p, &curve).unwrap().is_infinity());
        }
    }
}
