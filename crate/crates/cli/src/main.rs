//! `cpl-kit`: correlation-induced privacy leakage analysis from the command
//! line. Every command prints one JSON document on stdout:
//! `{"manifest": .., "schema": .., "result": ..}`.

mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cpl_core::CplError;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "cpl-kit",
    version,
    about = "Correlation-induced privacy leakage analysis"
)]
struct Cli {
    /// Root seed for every random stage.
    #[arg(long, global = true, env = "CPL_KIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Leakage from the data's empirical correlations.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Monte Carlo leakage estimate from a simulated release.
    Estimate(EstimateArgs),
    #[command(subcommand)]
    Benchmark(Benchmark),
    /// Largest uniform budget keeping every attribute's total leakage within
    /// a target.
    Calibrate(CalibrateArgs),
    /// Write the bundled synthetic datasets as CSV plus schema JSON.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Subcommand, Serialize)]
enum Analyze {
    /// Pairwise leakage matrix, per-attribute totals and correlation metrics.
    Matrix(MatrixArgs),
    /// Exact leakage under GRR or EXP for selected pairs.
    Exact(ExactArgs),
    /// Mechanism-agnostic bound for selected pairs.
    Bound(BoundArgs),
}

#[derive(Debug, Subcommand, Serialize)]
enum Benchmark {
    /// Undershoot/overshoot of each analyzer against a reference.
    Analyzers(AnalyzersArgs),
    /// Utility and normalized total leakage per mechanism.
    Utility(UtilityArgs),
}

#[derive(Debug, Args, Serialize)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: std::path::PathBuf,
    /// JSON object of per-column hints, e.g. `{"age": {"type": "numeric", "bins": 8}}`.
    #[arg(long)]
    schema: Option<std::path::PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct PairSelection {
    /// Attribute whose leakage is measured (name or index); all when omitted.
    #[arg(long)]
    target: Option<String>,
    /// Correlated attribute (name or index); all others when omitted.
    #[arg(long)]
    neighbor: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EngineArg {
    Bound,
    ExactGrr,
    ExactExp,
}

#[derive(Debug, Args, Serialize)]
struct MatrixArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, value_enum, default_value = "bound")]
    engine: EngineArg,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExactMechanism {
    Grr,
    Exp,
}

#[derive(Debug, Args, Serialize)]
struct ExactArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    pairs: PairSelection,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "grr")]
    mechanism: ExactMechanism,
}

#[derive(Debug, Args, Serialize)]
struct BoundArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    pairs: PairSelection,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
}

#[derive(Debug, Args, Serialize)]
struct EstimationArgs {
    /// Independent perturbed copies of every record.
    #[arg(long, default_value_t = 50)]
    expansion: usize,
    /// Permutation surrogates for the significance test.
    #[arg(long, default_value_t = 1000)]
    surrogates: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Debug, Args, Serialize)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    estimation: EstimationArgs,
    /// Mechanism applied to every attribute.
    #[arg(long, default_value = "grr", value_parser = parse_mechanism)]
    mechanism: cpl_core::MechanismKind,
    #[arg(long)]
    epsilon: f64,
    /// Attribute whose leakage is estimated; every ordered pair when omitted.
    #[arg(long)]
    target: Option<String>,
    /// Comma-separated neighbors whose outputs are observed jointly; every
    /// other attribute when omitted.
    #[arg(long, value_delimiter = ',')]
    neighbors: Vec<String>,
    /// Also estimate each selected target's total leakage from all outputs.
    #[arg(long)]
    tpl: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ReferenceArg {
    Bound,
    ExactGrr,
    ExactExp,
    Statistical,
}

#[derive(Debug, Args, Serialize)]
struct AnalyzersArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    epsilons: Vec<f64>,
    #[arg(long, value_enum, default_value = "bound")]
    reference: ReferenceArg,
    /// Only used by the statistical reference.
    #[arg(long, default_value_t = 50)]
    expansion: usize,
}

#[derive(Debug, Args, Serialize)]
struct UtilityArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    epsilons: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse_mechanism,
        default_value = "grr,exp,rappor,oue,blh,olh,she,ss"
    )]
    mechanisms: Vec<cpl_core::MechanismKind>,
    #[arg(long, default_value_t = 10)]
    expansion: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CalibrationEngineArg {
    Bound,
    ExactGrr,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SearchMethod {
    Stepwise,
    Bisection,
}

#[derive(Debug, Args, Serialize)]
struct CalibrateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Total leakage allowed for every attribute.
    #[arg(long)]
    budget: f64,
    #[arg(long, default_value_t = cpl_core::calibration::DEFAULT_STEP)]
    step: f64,
    #[arg(long, value_enum, default_value = "bound")]
    engine: CalibrationEngineArg,
    #[arg(long, value_enum, default_value = "stepwise")]
    method: SearchMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FixtureName {
    Saturating,
    Independent,
    Copy,
    Weak,
    Chain,
    Mixed,
}

#[derive(Debug, Args, Serialize)]
struct FixturesArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    out: std::path::PathBuf,
    #[arg(long, default_value_t = cpl_core::fixtures::SATURATING_SAMPLES)]
    rows: usize,
    /// Fixtures to write; all when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    only: Vec<FixtureName>,
}

fn parse_mechanism(s: &str) -> Result<cpl_core::MechanismKind, String> {
    s.parse().map_err(|e: CplError| e.to_string())
}

fn exit_code(e: &CplError) -> u8 {
    match e {
        CplError::Numerical(_) => 3,
        _ => 2,
    }
}

fn digest(cli: &Cli) -> String {
    let bytes = serde_json::to_vec(cli).expect("arguments serialize");
    hex::encode(Sha256::digest(bytes))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            eprintln!(
                "{}",
                json!({"error": {"kind": "usage", "message": message.trim_end()}})
            );
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!(
                "{}",
                json!({"error": {"kind": "threads", "message": e.to_string()}})
            );
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(result) => {
            let out = json!({
                "manifest": {
                    "command_line": std::env::args().collect::<Vec<_>>().join(" "),
                    "seed": cli.seed,
                    "config_digest": digest(&cli),
                    "tool_version": env!("CARGO_PKG_VERSION"),
                    "wall_time_ms": started.elapsed().as_millis() as u64,
                },
                "schema": {"units": "nats", "log_base": "e"},
                "result": result,
            });
            let text = serde_json::to_string_pretty(&out).expect("JSON output");
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let err: Value = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            eprintln!("{err}");
            ExitCode::from(exit_code(&e))
        }
    }
}
