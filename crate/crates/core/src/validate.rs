//! Oracle checks of synthesized or loaded circuits against classical field
//! and curve arithmetic, exhaustive or seeded-random.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith_synth::ArithError;
use crate::circuit_ir::{run, BitState, Circuit, CircuitError, Reg, RegKind};
use crate::ecc::{ec_add_classical, lambda_r, CurveSpec, EcError, ECPoint};
use crate::gf2_field::{BinaryPoly, FieldSpec};

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("exhaustive mode over {bits} input bits exceeds the cap of {cap}; use sampled mode")]
    CapExceeded { bits: usize, cap: usize },
    #[error("circuit has no register `{0}`")]
    MissingRegister(String),
    #[error("register `{name}` has width {got}, expected {want}")]
    Width { name: String, got: usize, want: usize },
    #[error("circuit has no gate list")]
    NotRecorded,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Ec(#[from] EcError),
}

pub type Result<T> = std::result::Result<T, ValidateError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ValidateOptions {
    pub mode: Mode,
    /// Largest input space, in bits, enumerated exhaustively.
    pub exhaustive_cap: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Exhaustive,
            exhaustive_cap: 24,
            samples: 1000,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Bitstrings, qubit 0 first.
    pub input: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub mode: Mode,
    pub cases: u64,
    pub failure: Option<Counterexample>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mode = match self.mode {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled => "sampled",
        };
        match &self.failure {
            None => write!(f, "PASS {} ({} cases, {mode})", self.name, self.cases),
            Some(cx) => write!(
                f,
                "FAIL {} after {} cases ({mode})\n  input    {}\n  expected {}\n  got      {}",
                self.name, self.cases, cx.input, cx.expected, cx.got
            ),
        }
    }
}

fn bits(st: &BitState) -> String {
    st.to_bools().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn reg(c: &Circuit, name: &str, width: usize) -> Result<Reg> {
    let r = c
        .register(name)
        .ok_or_else(|| ValidateError::MissingRegister(name.into()))?;
    if r.len() != width {
        return Err(ValidateError::Width {
            name: name.into(),
            got: r.len(),
            want: width,
        });
    }
    Ok(r)
}

/// Clears garbage registers so they drop out of the comparison.
fn mask_garbage(c: &Circuit, st: &mut BitState) {
    for r in c.registers().iter().filter(|r| r.kind == RegKind::AncillaGarbage) {
        for q in r.reg().qubits() {
            st.set(q, false);
        }
    }
}

/// Runs one case; `expect` maps the start state to the full expected state.
fn one_case(c: &Circuit, start: BitState, expect: &dyn Fn(&BitState) -> BitState) -> Result<Option<Counterexample>> {
    let mut want = expect(&start);
    let mut got = start.clone();
    if let Err(e) = run(c, &mut got) {
        return Ok(Some(Counterexample {
            input: bits(&start),
            expected: bits(&want),
            got: format!("simulation error: {e}"),
        }));
    }
    mask_garbage(c, &mut got);
    mask_garbage(c, &mut want);
    Ok((got != want).then(|| Counterexample {
        input: bits(&start),
        expected: bits(&want),
        got: bits(&got),
    }))
}

/// Checks `c` over all (or random) values of the `inputs` registers, all
/// other qubits starting at zero.
pub fn check_registers(
    name: &str,
    c: &Circuit,
    inputs: &[Reg],
    expect: &dyn Fn(&BitState) -> BitState,
    opts: &ValidateOptions,
) -> Result<CheckReport> {
    if !c.is_recorded() {
        return Err(ValidateError::NotRecorded);
    }
    let width: usize = inputs.iter().map(|r| r.len()).sum();
    let qubits: Vec<u32> = inputs.iter().flat_map(|r| r.qubits()).collect();
    let fill = |v: &dyn Fn(usize) -> bool| {
        let mut st = BitState::zeros(c.num_qubits());
        for (i, &q) in qubits.iter().enumerate() {
            st.set(q, v(i));
        }
        st
    };
    let mut report = CheckReport {
        name: name.into(),
        mode: opts.mode,
        cases: 0,
        failure: None,
    };
    match opts.mode {
        Mode::Exhaustive => {
            if width > opts.exhaustive_cap {
                return Err(ValidateError::CapExceeded {
                    bits: width,
                    cap: opts.exhaustive_cap,
                });
            }
            for x in 0..1u64 << width {
                report.cases += 1;
                if let Some(cx) = one_case(c, fill(&|i| (x >> i) & 1 == 1), expect)? {
                    report.failure = Some(cx);
                    break;
                }
            }
        }
        Mode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..opts.samples {
                report.cases += 1;
                let draw: Vec<bool> = (0..width).map(|_| rng.gen()).collect();
                if let Some(cx) = one_case(c, fill(&|i| draw[i]), expect)? {
                    report.failure = Some(cx);
                    break;
                }
            }
        }
    }
    Ok(report)
}

/// `|f, g, h⟩ → |f, g, h + f·g⟩` on registers `f`, `g`, `h`.
pub fn check_modmult(c: &Circuit, field: &FieldSpec, opts: &ValidateOptions) -> Result<CheckReport> {
    let n = field.n;
    let (f, g, h) = (reg(c, "f", n)?, reg(c, "g", n)?, reg(c, "h", n)?);
    let expect = |st: &BitState| {
        let mut out = st.clone();
        let prod = field.mul(&st.read(f), &st.read(g));
        out.write(h, &(&st.read(h) ^ &prod));
        out
    };
    check_registers(&format!("modmult n={n}"), c, &[f, g, h], &expect, opts)
}

/// In-place `|f⟩ → |f^{2^k}⟩` on register `f`.
pub fn check_square(c: &Circuit, field: &FieldSpec, k: usize, opts: &ValidateOptions) -> Result<CheckReport> {
    let f = reg(c, "f", field.n)?;
    let expect = |st: &BitState| {
        let mut v = st.read(f);
        for _ in 0..k {
            v = field.square(&v);
        }
        let mut out = st.clone();
        out.write(f, &v);
        out
    };
    check_registers(&format!("square^{k} n={}", field.n), c, &[f], &expect, opts)
}

/// `|f, 0⟩ → |f, f^{-1}⟩` on registers `f`, `inv`, with `0^{-1} = 0`.
pub fn check_inversion(c: &Circuit, field: &FieldSpec, opts: &ValidateOptions) -> Result<CheckReport> {
    let n = field.n;
    let (f, inv) = (reg(c, "f", n)?, reg(c, "inv", n)?);
    let expect = |st: &BitState| {
        let v = st.read(f);
        let mut out = st.clone();
        out.write(inv, &field.inv(&v).unwrap_or_else(|_| BinaryPoly::zero()));
        out
    };
    check_registers(&format!("inversion n={n}"), c, &[f], &expect, opts)
}

/// Point addition over every ordered pair of curve points (exhaustive) or
/// random pairs (sampled). Registers `x1, y1, x2, y2, lambda_r`.
pub fn check_ecpointadd(c: &Circuit, curve: &CurveSpec, opts: &ValidateOptions) -> Result<CheckReport> {
    if !c.is_recorded() {
        return Err(ValidateError::NotRecorded);
    }
    let n = curve.n();
    let regs: Vec<Reg> = ["x1", "y1", "x2", "y2", "lambda_r"]
        .iter()
        .map(|name| reg(c, name, n))
        .collect::<Result<_>>()?;
    let [x1, y1, x2, y2, lr] = regs[..] else { unreachable!() };
    let prepare = |p1: &ECPoint, p2: &ECPoint| {
        let mut st = BitState::zeros(c.num_qubits());
        st.write(x1, &p1.x);
        st.write(y1, &p1.y);
        st.write(x2, &p2.x);
        st.write(y2, &p2.y);
        st.write(lr, &lambda_r(p2, &curve.field));
        st
    };
    let points = curve.points()?;
    let name = format!("ecpointadd n={n} ({} points)", points.len());
    let mut report = CheckReport {
        name,
        mode: opts.mode,
        cases: 0,
        failure: None,
    };
    let mut case = |p1: &ECPoint, p2: &ECPoint| -> Result<bool> {
        report.cases += 1;
        let sum = ec_add_classical(p1, p2, curve)?;
        let expect = |st: &BitState| {
            let mut out = st.clone();
            out.write(x1, &sum.x);
            out.write(y1, &sum.y);
            out
        };
        let cx = one_case(c, prepare(p1, p2), &expect)?;
        let failed = cx.is_some();
        report.failure = cx;
        Ok(failed)
    };
    match opts.mode {
        Mode::Exhaustive => {
            if 2 * n > opts.exhaustive_cap {
                return Err(ValidateError::CapExceeded {
                    bits: 2 * n,
                    cap: opts.exhaustive_cap,
                });
            }
            'outer: for p1 in &points {
                for p2 in &points {
                    if case(p1, p2)? {
                        break 'outer;
                    }
                }
            }
        }
        Mode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..opts.samples {
                let p1 = &points[rng.gen_range(0..points.len())];
                let p2 = &points[rng.gen_range(0..points.len())];
                if case(p1, p2)? {
                    break;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith_synth::synth_square;
    use crate::circuit_ir::Gate;

    #[test]
    fn square_passes_and_corruption_is_caught() {
        let field = FieldSpec::small(4).unwrap();
        let c = synth_square(&field, 1).unwrap();
        let opts = ValidateOptions::default();
        assert!(check_square(&c, &field, 1, &opts).unwrap().passed());
        let mut bad = c.clone();
        let q = bad.register("f").unwrap().q(0);
        bad.push(Gate::X(q));
        let r = check_square(&bad, &field, 1, &opts).unwrap();
        let cx = r.failure.expect("corruption detected");
        assert_ne!(cx.expected, cx.got);
    }

    #[test]
    fn cap_refuses_exhaustive() {
        let field = FieldSpec::small(4).unwrap();
        let c = synth_square(&field, 1).unwrap();
        let opts = ValidateOptions {
            exhaustive_cap: 3,
            ..Default::default()
        };
        assert!(matches!(
            check_square(&c, &field, 1, &opts),
            Err(ValidateError::CapExceeded { bits: 4, cap: 3 })
        ));
    }
}
