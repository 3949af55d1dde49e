use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use toruslab::analysis::{
    closed_range_witness, estimate_indices, gh_witness, gs_witness, wave_classify, zero_scan, IndexOptions,
    WitnessOptions, DEFAULT_SAMPLES, DEFAULT_TAIL_SHELLS, MIN_INDEX_RADIUS,
};
use toruslab::diophantine::{mu_estimate_with, registry_lookup, registry_lookup_name, MuOptions, DEFAULT_MU_TAIL};
use toruslab::exact::parse_q;
use toruslab::lattice::{Norm, Window};
use toruslab::real::{default_pmax, CertifiedReal, RealSpec, PMAX_CEILING};
use toruslab::spectral::io::{distribution_to_json, parse_distribution};
use toruslab::spectral::solve_with;
use toruslab::symbol::{parse_symbol_with, Symbol};
use toruslab::{report, Error};

#[derive(Debug, Parser)]
#[command(name = "toruslab", version, about = "Loss-of-derivatives analysis for Fourier multipliers on the torus")]
struct Cli {
    /// Worker threads for window scans; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Precision cap in bits for certified reals (defaults to TORUSLAB_PMAX or 4096).
    #[arg(long, global = true)]
    precision: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the GH and GS indices from the log-envelope of a symbol.
    Analyze(AnalyzeArgs),
    /// Solve p(D)u = f for a finite right-hand side.
    Solve(SolveArgs),
    /// Build an explicit witness sequence.
    Witness(WitnessArgs),
    /// Zero census of a symbol over a window.
    Zeros(ZerosArgs),
    /// Classify the wave operator with a given η².
    WaveClassify(WaveArgs),
    /// Continued fraction and irrationality-measure estimate of a real.
    Dio(DioArgs),
}

#[derive(Debug, Args)]
struct WindowArgs {
    #[arg(long)]
    symbol: String,
    #[arg(long)]
    radius: i64,
    #[arg(long, default_value = "l1")]
    norm: String,
    /// Lattice dimension, needed for symbols defined in every dimension.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, default_value_t = DEFAULT_TAIL_SHELLS)]
    tail_shells: usize,
    /// Also certify a lower bound |p(ξ)| ≥ K|ξ|^{m−r} on the window.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Envelope CSV, one row per ℓ1 level.
    #[arg(long)]
    envelope: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    symbol: String,
    /// Right-hand side as a distribution JSON file.
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Writes the solution alone as a distribution file.
    #[arg(long)]
    u_out: Option<PathBuf>,
    /// Skip the window certificate for K.
    #[arg(long)]
    no_certificate: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WitnessKind {
    Gh,
    Gs,
    ClosedRange,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[arg(long)]
    symbol: String,
    #[arg(long, value_enum, default_value = "gh")]
    kind: WitnessKind,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Sobolev index for closed-range witnesses.
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    /// Largest ℓ1 norm searched.
    #[arg(long)]
    budget: Option<i64>,
    #[arg(long)]
    dim: Option<usize>,
    /// Only accept small nonzero values, never a sequence of zeros.
    #[arg(long)]
    no_zero_sequence: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ZerosArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WaveArgs {
    #[arg(long)]
    n: usize,
    /// η² as a positive rational `a/b`.
    #[arg(long)]
    eta2: String,
    /// Number of sample zeros to emit.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DioArgs {
    /// A real such as `sqrt:2`, `liouville:10`, or a registry name like `pi`.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 20)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_MU_TAIL)]
    tail_shells: usize,
    /// Samples random decimals in [0, 1) instead of reading `--alpha`.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count for the random demo.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Digits of each random decimal in the sampling demo.
const RANDOM_DIGITS: usize = 200;

struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::PrecisionExhausted { .. } => 2,
            Error::Incompatible { .. } => 3,
            _ => 1,
        };
        Failure { code, error }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = Error::InvalidArgument(e.kind().to_string());
            let _ = std::io::stdout().write_all(report::to_string(&report::error(&err)).as_bytes());
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = std::io::stdout().write_all(report::to_string(&report::error(&f.error)).as_bytes());
            eprintln!("toruslab: {}", f.error);
            if let Error::Incompatible { violations } = &f.error {
                for v in violations {
                    eprintln!("  violation at {:?}", v.coords());
                }
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidArgument("--threads must be positive".into()).into());
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let pmax = match cli.precision {
        None => default_pmax(),
        Some(p) if (64..=PMAX_CEILING).contains(&p) => p,
        Some(p) => {
            return Err(Error::InvalidArgument(format!(
                "--precision {p} is outside 64..={PMAX_CEILING}"
            ))
            .into())
        }
    };
    match cli.command {
        Command::Analyze(a) => cmd_analyze(a, pmax),
        Command::Solve(a) => cmd_solve(a, pmax),
        Command::Witness(a) => cmd_witness(a, pmax),
        Command::Zeros(a) => cmd_zeros(a, pmax),
        Command::WaveClassify(a) => cmd_wave_classify(a),
        Command::Dio(a) => cmd_dio(a, pmax),
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = report::to_string(value);
    match out {
        Some(p) => write_file(p, &text),
        None => {
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn write_file(p: &Path, text: &str) -> Result<(), Failure> {
    fs::write(p, text).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", p.display())).into())
}

fn read_file(p: &Path) -> Result<String, Failure> {
    fs::read_to_string(p).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", p.display())).into())
}

fn open_window(a: &WindowArgs, pmax: u32) -> Result<(Symbol, Window), Failure> {
    let sym = parse_symbol_with(&a.symbol, pmax)?;
    let dim = sym.dimension_for(a.dim)?;
    let norm: Norm = a.norm.parse()?;
    let w = Window::new(dim, a.radius, norm)?;
    Ok((sym, w))
}

fn cmd_analyze(a: AnalyzeArgs, pmax: u32) -> CmdResult {
    if a.window.radius < MIN_INDEX_RADIUS {
        return Err(Error::InvalidArgument(format!("analyze needs --radius ≥ {MIN_INDEX_RADIUS}")).into());
    }
    let (sym, w) = open_window(&a.window, pmax)?;
    let opts = IndexOptions { tail: a.tail_shells, r: a.r };
    let rep = estimate_indices(&sym, &w, &opts)?;
    if let Some(p) = &a.envelope {
        write_file(p, &report::envelope_csv(&rep.envelope))?;
    }
    emit(&report::index_report(&rep), a.out.as_deref())?;
    if rep.precision_dominated {
        eprintln!("toruslab: most points were undecided at {pmax} bits");
        return Ok(2);
    }
    Ok(0)
}

fn cmd_solve(a: SolveArgs, pmax: u32) -> CmdResult {
    let sym = parse_symbol_with(&a.symbol, pmax)?;
    let f = parse_distribution(&read_file(&a.rhs)?)?;
    sym.dimension_for(Some(f.dim))?;
    let sol = solve_with(&sym, &f, a.k, a.r, !a.no_certificate)?;
    if let Some(p) = &a.u_out {
        write_file(p, &report::to_string(&distribution_to_json(&sol.u)))?;
    }
    emit(&report::solution(&sol), a.out.as_deref())?;
    Ok(0)
}

fn cmd_witness(a: WitnessArgs, pmax: u32) -> CmdResult {
    let sym = parse_symbol_with(&a.symbol, pmax)?;
    let opts = WitnessOptions {
        budget: a.budget,
        allow_zero_sequence: !a.no_zero_sequence,
        dim: a.dim,
        generator: None,
    };
    let value = match a.kind {
        WitnessKind::Gh => report::gh_witness(&gh_witness(&sym, a.r, a.count, &opts)?),
        WitnessKind::Gs => report::gs_witness(&gs_witness(&sym, a.r, a.count, &opts)?),
        WitnessKind::ClosedRange => report::closed_range(&closed_range_witness(&sym, a.r, a.k, a.count, &opts)?),
    };
    emit(&value, a.out.as_deref())?;
    Ok(0)
}

fn cmd_zeros(a: ZerosArgs, pmax: u32) -> CmdResult {
    let (sym, w) = open_window(&a.window, pmax)?;
    let c = zero_scan(&sym, &w)?;
    let value = json!({ "symbol": sym.name, "census": report::census(&c) });
    emit(&value, a.out.as_deref())?;
    Ok(if c.undecided_total * 2 > c.evaluated { 2 } else { 0 })
}

fn cmd_wave_classify(a: WaveArgs) -> CmdResult {
    let eta2 = parse_q(&a.eta2)?;
    let c = wave_classify(a.n, &eta2, a.count)?;
    emit(&report::wave(&c), a.out.as_deref())?;
    Ok(0)
}

fn mu_options(a: &DioArgs, pmax: u32) -> MuOptions {
    MuOptions { tail: a.tail_shells, precision_cap: Some(pmax), ..MuOptions::default() }
}

fn cmd_dio(a: DioArgs, pmax: u32) -> CmdResult {
    if a.tail_shells == 0 {
        return Err(Error::InvalidArgument("--tail-shells must be positive".into()).into());
    }
    let value = match (&a.alpha, a.seed) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidArgument("--seed replaces --alpha; pass only one".into()).into())
        }
        (None, None) => return Err(Error::InvalidArgument("dio needs --alpha or --seed".into()).into()),
        (Some(text), None) => dio_one(text, &a, pmax)?,
        (None, Some(seed)) => dio_random(seed, &a, pmax)?,
    };
    emit(&value, a.out.as_deref())?;
    Ok(0)
}

fn dio_one(text: &str, a: &DioArgs, pmax: u32) -> Result<Value, Failure> {
    let spec = match RealSpec::parse_at(text, 0) {
        Ok(s) => s,
        Err(parse_err) => {
            // Registry-only constants have no expansion to compute.
            return match registry_lookup_name(text) {
                Ok(e) => Ok(json!({ "alpha": text, "mu": null, "registry": report::mu_entry(&e) })),
                Err(_) => Err(parse_err.into()),
            };
        }
    };
    let alpha = CertifiedReal::with_pmax(spec.clone(), pmax);
    let est = mu_estimate_with(&alpha, a.depth, mu_options(a, pmax))?;
    let registry = registry_lookup(&spec).ok().map(|e| report::mu_entry(&e));
    Ok(json!({ "alpha": text, "mu": report::mu_estimate(&est), "registry": registry }))
}

/// Random α: almost every real has μ = 2, so the sample μ̂ cluster near 2.
fn dio_random(seed: u64, a: &DioArgs, pmax: u32) -> Result<Value, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(a.count);
    for _ in 0..a.count {
        let digits: String = (0..RANDOM_DIGITS).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
        let mantissa: BigInt = digits.parse().expect("decimal digits");
        let alpha = CertifiedReal::with_pmax(RealSpec::decimal(mantissa, -(RANDOM_DIGITS as i64)), pmax);
        let est = mu_estimate_with(&alpha, a.depth, mu_options(a, pmax))?;
        samples.push(json!({
            "alpha": format!("dec:0.{digits}"),
            "mu_hat": report::real(est.mu_hat),
            "max_mu": report::real(est.max_mu),
            "status": format!("{:?}", est.status),
        }));
    }
    Ok(json!({ "seed": seed, "digits": RANDOM_DIGITS, "depth": a.depth, "samples": samples }))
}
