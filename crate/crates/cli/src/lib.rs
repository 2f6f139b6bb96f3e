//! Command-line front end: every analysis is a subcommand writing CSV or
//! JSON with an embedded run manifest.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod output;

pub use output::{format_float, Cell, Report, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "balanced-gaps", version, about = "Balanced numbers, star-set densities and GPY weights")]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for Monte Carlo estimates.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ω, balance threshold and primality for one n or a window [N, 2N).
    Classify(commands::ClassifyArgs),
    /// Exact size of the star set in [N, 2N) against C₀·N/ln N.
    CountStar(commands::CountStarArgs),
    /// The density constant C₀(r, ε), its upper bound, or the tail sum over r.
    Density(commands::DensityArgs),
    /// Generate or check admissible tuples.
    Tuple(commands::TupleArgs),
    /// Truncated singular series of one or more tuples.
    SingularSeries(commands::SingularArgs),
    /// Tuple size k₀ and gap constant for a level of distribution.
    Constants(commands::ConstantsArgs),
    /// Sieve weights Λ_R(n) over a range of n.
    Weights(commands::WeightsArgs),
    /// Empirical weighted moments against their predicted main terms.
    Moments(commands::MomentsArgs),
    /// The weighted hit statistic S(N) over [N, 2N).
    SStat(commands::SStatArgs),
    /// Discrepancy of the primes up to N in progressions.
    Bv(commands::BvArgs),
    /// Discrepancy of the star set in progressions.
    BvStar(commands::BvStarArgs),
    /// Discrepancy of the bilinear sum Σ f(m)·1[mp ≡ a].
    BvWeighted(commands::BvWeightedArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::CountStar(_) => "count-star",
            Command::Density(_) => "density",
            Command::Tuple(_) => "tuple",
            Command::SingularSeries(_) => "singular-series",
            Command::Constants(_) => "constants",
            Command::Weights(_) => "weights",
            Command::Moments(_) => "moments",
            Command::SStat(_) => "s-stat",
            Command::Bv(_) => "bv",
            Command::BvStar(_) => "bv-star",
            Command::BvWeighted(_) => "bv-weighted",
        }
    }
}

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl From<balanced_gaps::Error> for CliError {
    fn from(e: balanced_gaps::Error) -> Self {
        use balanced_gaps::Error as E;
        match e {
            E::InvalidParameter { .. } | E::InvalidWindow { .. } | E::OutOfWindow { .. } => {
                CliError::Usage(e.to_string())
            }
            E::Budget(_) | E::Invariant(_) => CliError::Compute(e.to_string()),
        }
    }
}

fn now() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Parse `args` (including the program name) and run. Output goes to
/// `stdout` unless `--out` is given; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_at(args, now(), stdout, stderr)
}

/// [`run`] with a fixed manifest timestamp.
pub fn run_at<I, T>(args: I, timestamp: u64, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(&cli, timestamp) {
        Ok(bytes) => match &cli.global.out {
            Some(path) => match std::fs::write(path, &bytes) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                    EXIT_COMPUTE
                }
            },
            None => match stdout.write_all(&bytes) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_COMPUTE
                }
            },
        },
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}\n\nFor more information, try '--help'.");
            EXIT_USAGE
        }
        Err(CliError::Compute(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_COMPUTE
        }
    }
}

fn execute(cli: &Cli, timestamp: u64) -> Result<Vec<u8>, CliError> {
    let mut manifest = RunManifest::new(cli.command.name(), cli.global.seed, timestamp);
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.global.threads {
            if t == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            b = b.num_threads(t);
        }
        b.build().map_err(|e| CliError::Compute(e.to_string()))?
    };
    let report = pool.install(|| commands::dispatch(&cli.command, cli.global.seed, &mut manifest))?;
    if let Some(col) = report.non_finite_column() {
        return Err(CliError::Compute(format!("non-finite value in column `{col}`")));
    }
    let bytes = match cli.global.format {
        Format::Csv => output::to_csv(&manifest, &report),
        Format::Json => output::to_json(&manifest, &report),
    };
    bytes.map_err(CliError::Compute)
}
