use gf2shor::arith_synth::{auto_modulus_set, AdditionChain, FormulaTable};
use gf2shor::circuit_ir::{lower_mcx, run, BitState, Circuit};
use gf2shor::ecc::{
    ec_add_classical, lambda_r, synth_ecpointadd_with, synth_equality_test, CurveSpec, ECPoint,
    PointAddReport,
};

fn chain_for(n: usize) -> AdditionChain {
    match n {
        3 => "1 2",
        4 => "1 2 3",
        5 => "1 2 4",
        6 => "1 2 4 5",
        _ => unreachable!(),
    }
    .parse()
    .unwrap()
}

fn build(curve: &CurveSpec) -> (Circuit, PointAddReport) {
    let n = curve.n();
    let (c, rep) = synth_ecpointadd_with(
        curve,
        &auto_modulus_set(n),
        &chain_for(n),
        &FormulaTable::builtin(),
        true,
    )
    .unwrap();
    (lower_mcx(&c), rep)
}

/// Runs every ordered pair of group elements through the lowered circuit.
fn sweep(curve: &CurveSpec) -> usize {
    let (c, rep) = build(curve);
    let l = &rep.layout;
    let points = curve.points().unwrap();
    let mut checked = 0;
    for p1 in &points {
        for p2 in &points {
            let mut st = BitState::zeros(c.num_qubits());
            st.write(l.x1, &p1.x);
            st.write(l.y1, &p1.y);
            st.write(l.x2, &p2.x);
            st.write(l.y2, &p2.y);
            let lr = lambda_r(p2, &curve.field);
            st.write(l.lambda_r, &lr);
            run(&c, &mut st).unwrap_or_else(|e| panic!("{p1:?} + {p2:?}: {e}"));
            let want = ec_add_classical(p1, p2, curve).unwrap();
            let got = ECPoint::new(st.read(l.x1), st.read(l.y1));
            assert_eq!(got, want, "{p1:?} + {p2:?}");
            let mut expect = BitState::zeros(c.num_qubits());
            expect.write(l.x1, &want.x);
            expect.write(l.y1, &want.y);
            expect.write(l.x2, &p2.x);
            expect.write(l.y2, &p2.y);
            expect.write(l.lambda_r, &lr);
            assert_eq!(st, expect, "{p1:?} + {p2:?}: flags or ancillas left dirty");
            checked += 1;
        }
    }
    checked
}

#[test]
fn pointadd_exhaustive_gf16_a1() {
    let curve = CurveSpec::toy(4, 1).unwrap();
    assert!(sweep(&curve) > 100);
}

#[test]
fn pointadd_exhaustive_gf16_a0() {
    let curve = CurveSpec::toy(4, 0).unwrap();
    assert!(sweep(&curve) > 100);
}

#[test]
fn pointadd_exhaustive_gf32_a0() {
    let curve = CurveSpec::toy(5, 0).unwrap();
    assert!(sweep(&curve) > 100);
}

#[test]
fn pointadd_exhaustive_gf8_a1() {
    let curve = CurveSpec::toy(3, 1).unwrap();
    assert!(sweep(&curve) > 10);
}

#[test]
fn stage_groups_present() {
    let (c, _) = build(&CurveSpec::toy(4, 1).unwrap());
    for k in 1..=6 {
        assert_eq!(c.groups_named(&format!("stage{k}")).count(), 1);
    }
}

#[test]
fn equality_test_exhaustive_n3() {
    let c = lower_mcx(&synth_equality_test(3, 0));
    let counts = c.counts();
    assert_eq!(counts.toffoli, 2);
    // The lowering adds one CNOT onto the flag.
    assert_eq!(counts.cnot, 2 * 3 + 1);
    for a in 0..8u64 {
        for b in 0..8u64 {
            let mut st = BitState::zeros(c.num_qubits());
            st.write_u64(c.register("a").unwrap(), a);
            st.write_u64(c.register("b").unwrap(), b);
            run(&c, &mut st).unwrap();
            assert_eq!(st.read_u64(c.register("a").unwrap()), a);
            assert_eq!(st.read_u64(c.register("b").unwrap()), b);
            assert_eq!(st.read_u64(c.register("flag").unwrap()) == 1, a == b);
        }
    }
}

#[test]
fn controlled_equality_test_counts() {
    let c = lower_mcx(&synth_equality_test(5, 2)).counts();
    assert_eq!(c.toffoli, 5 - 1 + 2);
}
