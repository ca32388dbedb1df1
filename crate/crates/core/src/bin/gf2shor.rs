use std::error::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gf2shor::arith_synth::{
    default_modulus_set, synth_crt_modmult, synth_crt_modmult_counts, synth_flt_inversion_with, synth_square,
    AdditionChain, FormulaTable,
};
use gf2shor::circuit_ir::{lower_mcx, parse, serialize, Circuit, GateCounts};
use gf2shor::ecc::{synth_ecpointadd_with, CurveSpec};
use gf2shor::gf2_field::{BinaryPoly, FieldSpec, ModulusSet};
use gf2shor::pipeline::{estimate, field_costs, reports_to_csv, Architecture, ToffoliSource};
use gf2shor::shor_cost::{landscape, AVWeights};
use gf2shor::validate::{
    check_ecpointadd, check_inversion, check_modmult, check_square, CheckReport, Mode, ValidateOptions,
};

type Res<T> = Result<T, Box<dyn Error>>;

const STANDARD_FIELDS: [usize; 4] = [163, 233, 283, 571];

#[derive(Parser)]
#[command(name = "gf2shor", version, about = "Binary-field ECDLP circuit synthesis and resource estimates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a circuit and report its gate counts.
    Synth(SynthArgs),
    /// Check circuits against classical oracles.
    Validate(ValidateArgs),
    /// Logical and physical estimates per scenario.
    Estimate(EstimateArgs),
    /// Phase-estimation cost against window size.
    Landscape(LandscapeArgs),
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Field degree; 163, 233, 283 and 571 use the standard pentanomials.
    #[arg(long, conflicts_with = "poly")]
    field: Option<usize>,
    /// Reduction polynomial in hex, e.g. 0x13 for x^4 + x + 1.
    #[arg(long)]
    poly: Option<String>,
    /// Curve coefficient a (hex).
    #[arg(long)]
    a: Option<String>,
    /// Curve coefficient b (hex).
    #[arg(long)]
    b: Option<String>,
    /// Modulus-set file for the multiplier.
    #[arg(long)]
    moduli: Option<PathBuf>,
    /// Addition-chain file for inversion.
    #[arg(long)]
    chain: Option<PathBuf>,
    /// Directory with k2.txt .. k8.txt Karatsuba formulas.
    #[arg(long)]
    formulas: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Target {
    Modmult,
    Square,
    Inversion,
    Ecpointadd,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum)]
    target: Target,
    /// Squaring exponent `k` in `f^(2^k)`.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Inversion without clearing steps.
    #[arg(long)]
    no_clearing: bool,
    /// Write the circuit in text form.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Lower multi-controlled gates before emitting.
    #[arg(long)]
    lower: bool,
    /// Tally gates without storing them.
    #[arg(long, conflicts_with = "emit")]
    counts_only: bool,
    /// Counts report path; stdout when absent.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Check one target; without it the built-in small-field suite runs.
    #[arg(long, value_enum)]
    target: Option<Target>,
    /// Check a circuit file instead of a fresh synthesis.
    #[arg(long, requires = "target")]
    circuit: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Largest input space, in bits, enumerated exhaustively.
    #[arg(long, default_value_t = 24)]
    cap: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    no_clearing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum ArchArg {
    Baseline,
    Av,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Circuit,
    Decomposition,
}

impl From<SourceArg> for ToffoliSource {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Circuit => ToffoliSource::Circuit,
            SourceArg::Decomposition => ToffoliSource::Decomposition,
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    /// Comma-separated field sizes, or `all`.
    #[arg(long, default_value = "all")]
    field: String,
    #[arg(long, value_enum, default_value_t = ArchArg::Both)]
    arch: ArchArg,
    /// Comma-separated precomputed key bits.
    #[arg(long, default_value = "0,48")]
    precomp: String,
    /// Comma-separated code cycle times in seconds.
    #[arg(long, default_value = "1e-6,1e-3")]
    cycle: String,
    /// Comma-separated fiber delays in seconds.
    #[arg(long, default_value = "1e-6,1e-5")]
    delay: String,
    #[arg(long, value_enum, default_value_t = SourceArg::Circuit)]
    toffoli_source: SourceArg,
    /// Active-volume weights file.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct LandscapeArgs {
    #[arg(long)]
    field: usize,
    #[arg(long, default_value_t = 0)]
    precomp: usize,
    /// Window range `lo:hi`.
    #[arg(long, default_value = "1:24")]
    range: String,
    #[arg(long, value_enum, default_value_t = SourceArg::Circuit)]
    toffoli_source: SourceArg,
    #[arg(long)]
    weights: Option<PathBuf>,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// Writes through a temporary sibling so readers never see partial files.
fn write_atomic(path: &Path, text: &str) -> Res<()> {
    let tmp = path.with_extension("tmp~");
    std::fs::write(&tmp, text).map_err(|e| format!("{}: {e}", tmp.display()))?;
    std::fs::rename(&tmp, path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(())
}

fn output(path: Option<&Path>, text: &str) -> Res<()> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_list<T: std::str::FromStr>(s: &str, what: &str) -> Res<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("bad {what} `{t}`").into()))
        .collect()
}

fn load_weights(path: Option<&Path>) -> Res<AVWeights> {
    Ok(match path {
        Some(p) => read(p)?.parse().map_err(|e| format!("{}: {e}", p.display()))?,
        None => AVWeights::builtin()?,
    })
}

/// Everything a synthesis needs, parsed before any work starts.
struct Resolved {
    field: FieldSpec,
    curve: Option<CurveSpec>,
    set: ModulusSet,
    chain: AdditionChain,
    formulas: FormulaTable,
}

fn resolve(a: &FieldArgs, need_curve: bool) -> Res<Resolved> {
    let field = match (&a.field, &a.poly) {
        (Some(n), None) if STANDARD_FIELDS.contains(n) => FieldSpec::standard(*n)?,
        (Some(n), None) => FieldSpec::small(*n)?,
        (None, Some(p)) => FieldSpec::new(BinaryPoly::from_hex(p)?)?,
        _ => return Err("give --field or --poly".into()),
    };
    let n = field.n;
    let formulas = match &a.formulas {
        Some(dir) => {
            for d in 2..=8 {
                let f = dir.join(format!("k{d}.txt"));
                if !f.is_file() {
                    return Err(format!("missing formula file {}", f.display()).into());
                }
            }
            FormulaTable::load_dir(dir)?
        }
        None => FormulaTable::builtin(),
    };
    let set = match &a.moduli {
        Some(p) => ModulusSet::parse(&read(p)?, n).map_err(|e| format!("{}: {e}", p.display()))?,
        None => default_modulus_set(n)?,
    };
    let chain = match &a.chain {
        Some(p) => read(p)?.parse().map_err(|e| format!("{}: {e}", p.display()))?,
        None => AdditionChain::for_field(n)?,
    };
    let curve = if need_curve {
        let standard = a.poly.is_none() && STANDARD_FIELDS.contains(&n);
        Some(match (&a.a, &a.b) {
            (None, None) if standard => CurveSpec::named(&format!("K-{n}"))?,
            (ca, cb) => CurveSpec::from_hex(
                field.clone(),
                ca.as_deref().unwrap_or("1"),
                cb.as_deref().unwrap_or("1"),
            )?,
        })
    } else {
        None
    };
    Ok(Resolved {
        field,
        curve,
        set,
        chain,
        formulas,
    })
}

#[derive(Serialize)]
struct SynthReport<'a> {
    target: &'a str,
    n: usize,
    counts: GateCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    lowered: Option<GateCounts>,
}

fn cmd_synth(a: &SynthArgs) -> Res<()> {
    let r = resolve(&a.field, a.target == Target::Ecpointadd)?;
    let record = a.emit.is_some() && !a.counts_only;
    let (name, circuit, lowered): (&str, Option<Circuit>, Option<GateCounts>) = match a.target {
        Target::Modmult if !record => {
            let rep = synth_crt_modmult_counts(&r.field, &r.set, &r.formulas)?;
            return output(
                a.json.as_deref(),
                &to_json(&SynthReport {
                    target: "modmult",
                    n: r.field.n,
                    counts: rep.counts,
                    lowered: None,
                })?,
            );
        }
        Target::Modmult => ("modmult", Some(synth_crt_modmult(&r.field, &r.set, &r.formulas)?), None),
        Target::Square => ("square", Some(synth_square(&r.field, a.k)?), None),
        Target::Inversion => {
            let (c, _) =
                synth_flt_inversion_with(&r.field, &r.chain, !a.no_clearing, &r.set, &r.formulas, record)?;
            ("inversion", Some(c), None)
        }
        Target::Ecpointadd => {
            let curve = r.curve.as_ref().expect("resolved with curve");
            let (c, rep) = synth_ecpointadd_with(curve, &r.set, &r.chain, &r.formulas, record)?;
            ("ecpointadd", Some(c), Some(rep.lowered))
        }
    };
    let mut c = circuit.expect("every branch builds a circuit");
    if a.lower && c.is_recorded() {
        c = lower_mcx(&c);
    }
    if let Some(path) = &a.emit {
        write_atomic(path, &serialize(&c))?;
    }
    output(
        a.json.as_deref(),
        &to_json(&SynthReport {
            target: name,
            n: r.field.n,
            counts: c.counts(),
            lowered,
        })?,
    )
}

fn to_json<T: Serialize>(v: &T) -> Res<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn check_target(
    t: Target,
    c: &Circuit,
    field: &FieldSpec,
    curve: Option<&CurveSpec>,
    k: usize,
    opts: &ValidateOptions,
) -> Res<CheckReport> {
    Ok(match t {
        Target::Modmult => check_modmult(c, field, opts)?,
        Target::Square => check_square(c, field, k, opts)?,
        Target::Inversion => check_inversion(c, field, opts)?,
        Target::Ecpointadd => check_ecpointadd(c, curve.ok_or("point addition needs a curve")?, opts)?,
    })
}

fn suite(opts: &ValidateOptions) -> Res<Vec<CheckReport>> {
    let formulas = FormulaTable::builtin();
    let mut out = Vec::new();
    for n in 3..=5 {
        let field = FieldSpec::small(n)?;
        let set = default_modulus_set(n)?;
        let chain = AdditionChain::binary(n)?;
        out.push(check_modmult(&synth_crt_modmult(&field, &set, &formulas)?, &field, opts)?);
        for k in [1, 2, n] {
            out.push(check_square(&synth_square(&field, k)?, &field, k, opts)?);
        }
        for clearing in [true, false] {
            let (c, _) = synth_flt_inversion_with(&field, &chain, clearing, &set, &formulas, true)?;
            let mut rep = check_inversion(&c, &field, opts)?;
            rep.name += if clearing { " (clearing)" } else { " (no clearing)" };
            out.push(rep);
        }
    }
    for (n, a) in [(4, 1), (4, 0), (5, 0)] {
        let curve = CurveSpec::toy(n, a)?;
        let (c, _) = synth_ecpointadd_with(
            &curve,
            &default_modulus_set(n)?,
            &AdditionChain::binary(n)?,
            &formulas,
            true,
        )?;
        let mut rep = check_ecpointadd(&lower_mcx(&c), &curve, opts)?;
        rep.name += &format!(" a={a}");
        out.push(rep);
    }
    Ok(out)
}

fn cmd_validate(a: &ValidateArgs) -> Res<bool> {
    let opts = ValidateOptions {
        mode: match a.mode {
            ModeArg::Exhaustive => Mode::Exhaustive,
            ModeArg::Sampled => Mode::Sampled,
        },
        exhaustive_cap: a.cap,
        samples: a.samples,
        seed: a.seed,
    };
    let reports = match a.target {
        None => suite(&opts)?,
        Some(t) => {
            let r = resolve(&a.field, t == Target::Ecpointadd)?;
            let c = match &a.circuit {
                Some(p) => parse(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?,
                None => match t {
                    Target::Modmult => synth_crt_modmult(&r.field, &r.set, &r.formulas)?,
                    Target::Square => synth_square(&r.field, a.k)?,
                    Target::Inversion => {
                        synth_flt_inversion_with(&r.field, &r.chain, !a.no_clearing, &r.set, &r.formulas, true)?.0
                    }
                    Target::Ecpointadd => {
                        let curve = r.curve.as_ref().expect("resolved with curve");
                        synth_ecpointadd_with(curve, &r.set, &r.chain, &r.formulas, true)?.0
                    }
                },
            };
            vec![check_target(t, &c, &r.field, r.curve.as_ref(), a.k, &opts)?]
        }
    };
    let mut ok = true;
    for r in &reports {
        println!("{r}");
        ok &= r.passed();
    }
    Ok(ok)
}

fn fields(spec: &str) -> Res<Vec<usize>> {
    if spec.trim() == "all" {
        return Ok(STANDARD_FIELDS.to_vec());
    }
    csv_list(spec, "field")
}

fn curve_for(n: usize) -> Res<CurveSpec> {
    Ok(if STANDARD_FIELDS.contains(&n) {
        CurveSpec::named(&format!("K-{n}"))?
    } else {
        CurveSpec::new(FieldSpec::small(n)?, BinaryPoly::one(), BinaryPoly::one())?
    })
}

fn cmd_estimate(a: &EstimateArgs) -> Res<()> {
    let weights = load_weights(a.weights.as_deref())?;
    let fields = fields(&a.field)?;
    let precomps: Vec<usize> = csv_list(&a.precomp, "precomp")?;
    let cycles: Vec<f64> = csv_list(&a.cycle, "cycle time")?;
    let delays: Vec<f64> = csv_list(&a.delay, "delay")?;
    let mut scenarios: Vec<(Architecture, f64)> = Vec::new();
    if a.arch != ArchArg::Av {
        scenarios.extend(cycles.iter().map(|&c| (Architecture::Baseline, c)));
    }
    if a.arch != ArchArg::Baseline {
        scenarios.extend(delays.iter().map(|&d| (Architecture::ActiveVolume, d)));
    }
    if fields.is_empty() || precomps.is_empty() || scenarios.is_empty() {
        eprintln!("warning: empty scenario list, nothing to do");
        return Ok(());
    }
    let formulas = FormulaTable::builtin();
    let mut reports = Vec::new();
    for n in fields {
        let costs = field_costs(&curve_for(n)?, &formulas, &weights, a.toffoli_source.into())?;
        for &p in &precomps {
            for &(arch, param) in &scenarios {
                reports.push(estimate(&costs, p, arch, param, &weights)?);
            }
        }
    }
    output(a.json.as_deref(), &to_json(&reports)?)?;
    if let Some(p) = &a.csv {
        write_atomic(p, &reports_to_csv(&reports)?)?;
    }
    Ok(())
}

fn cmd_landscape(a: &LandscapeArgs) -> Res<()> {
    let weights = load_weights(a.weights.as_deref())?;
    let (lo, hi) = a
        .range
        .split_once(':')
        .and_then(|(l, h)| Some((l.trim().parse().ok()?, h.trim().parse().ok()?)))
        .ok_or_else(|| format!("bad range `{}`, expected lo:hi", a.range))?;
    let costs = field_costs(&curve_for(a.field)?, &FormulaTable::builtin(), &weights, a.toffoli_source.into())?;
    let rows = landscape(a.field, &costs.point_add, a.precomp, &weights, (lo, hi))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s", "toffoli", "active_volume"])?;
    for r in rows {
        w.write_record([
            r.s.to_string(),
            format!("{:.1}", r.cost.toffoli),
            format!("{:.1}", r.cost.active_volume),
        ])?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?;
    output(a.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Synth(a) => cmd_synth(a).map(|_| true),
        Cmd::Validate(a) => cmd_validate(a),
        Cmd::Estimate(a) => cmd_estimate(a).map(|_| true),
        Cmd::Landscape(a) => cmd_landscape(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
