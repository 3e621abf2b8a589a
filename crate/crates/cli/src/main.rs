use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entroflow::commands::{self, Invocation, DEFAULT_SEED};
use entroflow::config::{config_digest, RunConfig};
use entroflow::report::{Format, Report};
use entroflow::verify::{Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "entroflow", version, about = "Energy-transfer statistics and Rényi entropy flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rényi flow per order, total and by correspondence
    Rflow(Common),
    /// Generating functions on a ξ grid and cumulants C1..C4
    Fcs(Common),
    /// Run the self-verification suites
    Verify(VerifyArgs),
    /// Compare analytic, tilted-generator and sampled cumulants (heat engine only)
    Oracle(OracleArgs),
    /// Rényi flows along a one-parameter sweep
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    /// Defaults to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional; only its seed is used
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run one suite (correspondence, diagram-sum, closed-form, appendix-a, oracle,
    /// classical-limit, shannon-limit)
    #[arg(long)]
    suite: Option<String>,
    /// Negative control: flip the coherent sign inside the suites
    #[arg(long, hide = true)]
    corrupt_sign: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Write the sampled net-quanta histogram as CSV
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<entroflow::Error> for Failure {
    fn from(e: entroflow::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(path: &Path, cli_seed: Option<u64>) -> Result<(RunConfig, Invocation), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let cfg = RunConfig::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let seed = cli_seed.or(cfg.seed);
    Ok((cfg, Invocation { config_sha256: config_digest(&text), seed }))
}

fn emit(report: &Report, output: &Output) -> Result<(), Failure> {
    let format = match output.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            report.write(format, &mut w)?;
            w.flush().map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        }
        None => report.write(format, io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Rflow(a) => {
            let (cfg, inv) = load(&a.config, a.seed)?;
            emit(&commands::cmd_rflow(&cfg, &inv)?, &a.output)
        }
        Command::Fcs(a) => {
            let (cfg, inv) = load(&a.config, a.seed)?;
            emit(&commands::cmd_fcs(&cfg, &inv)?, &a.output)
        }
        Command::Sweep(a) => {
            let (cfg, inv) = load(&a.config, a.seed)?;
            emit(&commands::cmd_sweep(&cfg, &inv)?, &a.output)
        }
        Command::Oracle(a) => {
            let (cfg, inv) = load(&a.common.config, a.common.seed)?;
            let inv = Invocation { seed: Some(inv.seed.unwrap_or(DEFAULT_SEED)), ..inv };
            let out = commands::cmd_oracle(&cfg, &inv)?;
            if let Some(path) = &a.histogram {
                let Some(samples) = &out.samples else {
                    return Err(Failure::Usage("--histogram needs an undriven engine (rabi = 0)".into()));
                };
                let file = File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                samples.write_histogram_csv(BufWriter::new(file))?;
            }
            emit(&out.report, &a.common.output)
        }
        Command::Verify(a) => {
            let (cfg_seed, digest) = match &a.config {
                Some(p) => {
                    let (cfg, inv) = load(p, None)?;
                    (cfg.seed, inv.config_sha256)
                }
                None => (None, config_digest("")),
            };
            let suites = match &a.suite {
                Some(name) => vec![Suite::parse(name)?],
                None => Suite::ALL.to_vec(),
            };
            let seed = a.seed.or(cfg_seed).unwrap_or(DEFAULT_SEED);
            let opts = VerifyOptions { seed, corrupt_sign: a.corrupt_sign, ..VerifyOptions::default() };
            let report = commands::cmd_verify(&suites, &opts, &Invocation { config_sha256: digest, seed: Some(seed) })?;
            emit(&report, &a.output)?;
            if report.passed == Some(true) {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors already.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("entroflow: verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("entroflow: {msg}");
            ExitCode::from(2)
        }
    }
}
