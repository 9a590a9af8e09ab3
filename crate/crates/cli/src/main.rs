//! `tcvm`: run the truncated Cramér-von Mises normality test on data, build
//! critical-value tables, and run power and moment studies.

mod input;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tcvm::mc::{self, ConstantEstimate, CriticalValues, MomentCheck, PowerReport};
use tcvm::rng::derive_seed;
use tcvm::{
    AlternativeSpec, BaselineKind, CriticalValueTable, Error, Provenance, QuadratureConfig, Sample,
    ScaleEstimator, StatisticSuite, TcvmKernel, TABLE_ALPHAS,
};

const DEFAULT_SEED: u64 = 20240601;

#[derive(Parser)]
#[command(
    name = "tcvm",
    version,
    about = "Truncated Cramér-von Mises normality test"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed for every simulation.
    #[arg(long, global = true, env = "TCVM_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Relative tolerance of the numerical integrals.
    #[arg(long, global = true, value_parser = positive)]
    rel_tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Test the data in a file for normality.
    Test(TestArgs),
    /// Simulate critical values of T_n* for a range of n.
    Critvals(CritvalsArgs),
    /// Estimate power against one or more alternatives.
    Power(PowerArgs),
    /// Print the embedded critical-value table.
    Tables,
    /// Estimate the centering constant from the mean of T_n* - D_n.
    ConstantC(ConstantArgs),
    /// Compare simulated E b_n²(x) b_n²(y) with its closed form.
    VerifyMoments(MomentArgs),
}

#[derive(Args)]
struct TestArgs {
    /// One value per line, or a single-column CSV with an optional header.
    file: PathBuf,
    #[arg(long, default_value_t = 0.05, value_parser = unit_interval)]
    alpha: f64,
    /// Critical-value CSV with the layout printed by `tables`.
    #[arg(long, conflicts_with = "simulate")]
    table: Option<PathBuf>,
    /// Scale estimator used to standardize the data. Defaults to the one the
    /// critical values were built with.
    #[arg(long, value_parser = parse_scale)]
    scale: Option<ScaleEstimator>,
    /// Simulate the critical value instead of reading a table; needed below
    /// n = 10 or beyond the table.
    #[arg(long)]
    simulate: bool,
    /// Replications for --simulate.
    #[arg(long, default_value_t = 50_000)]
    reps: usize,
}

#[derive(Args)]
struct CritvalsArgs {
    #[arg(long, conflicts_with = "n_range", required_unless_present = "n_range")]
    n: Option<usize>,
    /// Inclusive range `A..B`.
    #[arg(long, value_parser = parse_range)]
    n_range: Option<(usize, usize)>,
    /// Comma-separated levels, strictly decreasing.
    #[arg(long, value_delimiter = ',', value_parser = unit_interval)]
    alphas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 50_000)]
    reps: usize,
    #[arg(long, value_parser = parse_scale, default_value = "unbiased")]
    scale: ScaleEstimator,
}

#[derive(Args)]
struct PowerArgs {
    /// Alternative such as `LoConN(0.5,4)`; repeat for several rows.
    #[arg(long = "alt", required = true, value_parser = parse_alt)]
    alts: Vec<AlternativeSpec>,
    /// Comma-separated subset of TCVM, CVM, BCMR, AD, SW.
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    tests: Option<Vec<BaselineKind>>,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0.05, value_parser = unit_interval)]
    alpha: f64,
    /// Replications per alternative.
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    /// Null replications for the critical values.
    #[arg(long, default_value_t = 50_000)]
    null_reps: usize,
    #[arg(long, value_parser = parse_scale, default_value = "unbiased")]
    scale: ScaleEstimator,
}

#[derive(Args)]
struct ConstantArgs {
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [1000, 10_000])]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
}

#[derive(Args)]
struct MomentArgs {
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, allow_negative_numbers = true)]
    y: f64,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    reps: usize,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("`{s}` is not in (0, 1)")),
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("`{s}` is not a range A..B with A <= B");
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a = a.trim().parse::<usize>().map_err(|_| bad())?;
    let b = b.trim().parse::<usize>().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_scale(s: &str) -> Result<ScaleEstimator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_alt(s: &str) -> Result<AlternativeSpec, String> {
    s.parse().map_err(|e: tcvm::SpecError| e.to_string())
}

fn parse_kind(s: &str) -> Result<BaselineKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Data(_) => 3,
            Self::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Data(m) | Self::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TooFewObservations { .. }
            | Error::NonFinite { .. }
            | Error::DegenerateSample => Self::Data(e.to_string()),
            Error::Domain(_)
            | Error::TableCoverage { .. }
            | Error::UnsupportedAlpha(_)
            | Error::Spec(_)
            | Error::TableParse { .. } => Self::Usage(e.to_string()),
            Error::Convergence { .. } | Error::MissingCriticalValue(_) => {
                Self::Runtime(e.to_string())
            }
        }
    }
}

type Outcome = Result<String, Failure>;

fn quadrature(global: &Global) -> Result<QuadratureConfig, Failure> {
    let cfg = QuadratureConfig::default();
    match global.rel_tol {
        Some(t) => Ok(cfg.with_rel_tol(t)?),
        None => Ok(cfg),
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Outcome {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct TestReport {
    n: usize,
    alpha: f64,
    scale: ScaleEstimator,
    a_n: f64,
    c_n: f64,
    k: usize,
    m: usize,
    t_star: f64,
    t_centered: f64,
    critical_value: f64,
    reject: bool,
    interpolated: bool,
    critical_source: &'static str,
}

fn cmd_test(global: &Global, args: &TestArgs) -> Outcome {
    let cfg = quadrature(global)?;
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.file.display())))?;
    let values = input::parse_values(&text)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.file.display())))?;
    let sample = Sample::new(values)?;
    let n = sample.len();

    let (critical, interpolated, scale, source) = if args.simulate {
        let scale = args.scale.unwrap_or(ScaleEstimator::Unbiased);
        let row =
            mc::estimate_critical_values(n, &[args.alpha], args.reps, global.seed, &cfg, scale)?;
        (row.critical[0], false, scale, "simulated")
    } else {
        let owned;
        let table = match &args.table {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                let provenance = Provenance::File {
                    path: path.display().to_string(),
                };
                let scale = args.scale.unwrap_or(ScaleEstimator::Unbiased);
                owned = CriticalValueTable::from_csv(&text, provenance, scale)?;
                &owned
            }
            None => {
                let table = CriticalValueTable::embedded();
                if let Some(s) = args.scale.filter(|&s| s != table.scale) {
                    return Err(Failure::Usage(format!(
                        "the embedded table was built with the {} scale estimator; use --simulate for {s}",
                        table.scale
                    )));
                }
                table
            }
        };
        let lookup = table.lookup(n, args.alpha).map_err(|e| match e {
            Error::TableCoverage { .. } => Failure::Data(format!("{e}; pass --simulate")),
            other => other.into(),
        })?;
        (lookup.value, lookup.interpolated, table.scale, "table")
    };

    let result = TcvmKernel::with_scale(n, &cfg, scale)?.evaluate(&sample)?;
    let report = TestReport {
        n,
        alpha: args.alpha,
        scale,
        a_n: result.a_n,
        c_n: result.c_n,
        k: result.k,
        m: result.m,
        t_star: result.t_star,
        t_centered: result.t_centered,
        critical_value: critical,
        reject: result.t_star > critical,
        interpolated,
        critical_source: source,
    };
    match global.format {
        Format::Json => to_json(&report),
        Format::Csv => Ok(format!(
            "n,alpha,scale,a_n,C_n,k,m,t_star,t_centered,critical_value,reject,interpolated,critical_source\n\
             {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            report.n,
            report.alpha,
            report.scale,
            report.a_n,
            report.c_n,
            report.k,
            report.m,
            report.t_star,
            report.t_centered,
            report.critical_value,
            report.reject,
            report.interpolated,
            report.critical_source
        )),
    }
}

fn emit_table(global: &Global, table: &CriticalValueTable) -> Outcome {
    match global.format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => to_json(table),
    }
}

fn cmd_critvals(global: &Global, args: &CritvalsArgs) -> Outcome {
    let cfg = quadrature(global)?;
    let (lo, hi) = match (args.n, args.n_range) {
        (Some(n), _) => (n, n),
        (None, Some(r)) => r,
        (None, None) => return Err(Failure::Usage("pass --n or --n-range".into())),
    };
    let alphas = args.alphas.clone().unwrap_or_else(|| TABLE_ALPHAS.to_vec());
    if alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Failure::Usage(
            "--alphas must be strictly decreasing".into(),
        ));
    }
    if args.reps < mc::MIN_REPS {
        return Err(Failure::Usage(format!(
            "--reps must be at least {}",
            mc::MIN_REPS
        )));
    }
    let ns: Vec<usize> = (lo..=hi).collect();
    let table = mc::estimate_table(&ns, &alphas, args.reps, global.seed, &cfg, args.scale)?;
    emit_table(global, &table)
}

fn cmd_power(global: &Global, args: &PowerArgs) -> Outcome {
    let cfg = quadrature(global)?;
    let kinds = args
        .tests
        .clone()
        .unwrap_or_else(|| BaselineKind::ALL.to_vec());
    if args.null_reps < mc::MIN_REPS {
        return Err(Failure::Usage(format!(
            "--null-reps must be at least {}",
            mc::MIN_REPS
        )));
    }
    if args.reps == 0 {
        return Err(Failure::Usage("--reps must be positive".into()));
    }
    let suite = StatisticSuite::with_scale(args.n, &cfg, args.scale)?;
    let null = mc::simulate_null_with(&suite, &kinds, args.null_reps, derive_seed(global.seed, 0))?;
    let critical = CriticalValues::from_null(&null, args.alpha)?;
    let alt_seed = derive_seed(global.seed, 1);
    let reports = args
        .alts
        .iter()
        .map(|spec| {
            mc::estimate_power_with(
                &suite, &kinds, spec, args.alpha, args.reps, alt_seed, &critical,
            )
        })
        .collect::<Result<Vec<PowerReport>, Error>>()?;
    match global.format {
        Format::Json => to_json(&reports),
        Format::Csv => {
            let mut out = String::from("alternative");
            for k in &kinds {
                write!(out, ",{k}").expect("write to String");
            }
            out.push('\n');
            for r in &reports {
                out.push_str(&csv_field(&r.spec));
                for k in &kinds {
                    write!(out, ",{}", r.rates[k]).expect("write to String");
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn cmd_constant_c(global: &Global, args: &ConstantArgs) -> Outcome {
    let cfg = quadrature(global)?;
    let estimates = args
        .n
        .iter()
        .map(|&n| mc::estimate_constant_c(n, args.reps, global.seed, &cfg))
        .collect::<Result<Vec<ConstantEstimate>, Error>>()?;
    match global.format {
        Format::Json => to_json(&estimates),
        Format::Csv => {
            let mut out = String::from("n,reps,seed,c_hat,sd,se\n");
            for e in &estimates {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    e.n, e.reps, e.seed, e.c_hat, e.sd, e.se
                )
                .expect("write to String");
            }
            Ok(out)
        }
    }
}

fn cmd_verify_moments(global: &Global, args: &MomentArgs) -> Outcome {
    let check: MomentCheck =
        mc::verify_fourth_moment(args.x, args.y, args.n, args.reps, global.seed)?;
    match global.format {
        Format::Json => to_json(&check),
        Format::Csv => Ok(format!(
            "x,y,n,reps,seed,empirical,exact,std_error,z\n{},{},{},{},{},{},{},{},{}\n",
            check.x,
            check.y,
            check.n,
            check.reps,
            check.seed,
            check.empirical,
            check.exact,
            check.std_error,
            check.z
        )),
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Test(a) => cmd_test(&cli.global, a),
        Command::Critvals(a) => cmd_critvals(&cli.global, a),
        Command::Power(a) => cmd_power(&cli.global, a),
        Command::Tables => emit_table(&cli.global, CriticalValueTable::embedded()),
        Command::ConstantC(a) => cmd_constant_c(&cli.global, a),
        Command::VerifyMoments(a) => cmd_verify_moments(&cli.global, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("tcvm: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
