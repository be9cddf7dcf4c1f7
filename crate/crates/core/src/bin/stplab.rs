//! Reproducible experiment runner: parse a config, dispatch to the
//! experiment operations, emit CSV/JSON artifacts.
//!
//! Exit codes: 0 ok, 2 config error, 3 precision/budget exhaustion
//! (partial outputs are written and flagged in the JSON when possible).

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use stplab::config::{BackendConfig, ExperimentConfig, Overrides};
use stplab::error::Error;
use stplab::runner;

#[derive(Parser)]
#[command(
    name = "stplab",
    version,
    about = "Shrinking-target experiments on circle and torus dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config for the chosen subcommand (fields of the subcommand's
    /// config object; flags override matching fields).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Horizon override (recurrence-time count for counterexample runs).
    #[arg(long, global = true)]
    horizon: Option<u64>,

    /// Monte Carlo sample count override.
    #[arg(long, global = true)]
    samples: Option<u32>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Fixed-point bit budget override.
    #[arg(long, global = true)]
    bits: Option<u32>,

    /// Numeric backend override.
    #[arg(long, global = true, value_parser = parse_backend)]
    backend: Option<BackendConfig>,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

fn parse_backend(s: &str) -> Result<BackendConfig, String> {
    match s {
        "rational" => Ok(BackendConfig::Rational),
        "fixed" => Ok(BackendConfig::Fixed),
        _ => Err("backend must be 'rational' or 'fixed'".into()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Ratio and error-exponent study of hit counts on the expanding map.
    KgsVerify,
    /// Monotone shrinking-target run with the repeat-hit proxy.
    MstpExpanding,
    /// Simultaneous expanding action on the torus over a grid of scales C.
    SimultExpanding,
    /// Divergent-sum targets on a rotation with exact tail-union collapse.
    RotationCounterexample,
    /// The rotation counterexample protocol under the Denjoy invariant
    /// measure, plus construction integrity checks.
    DenjoyCounterexample,
    /// Classify a support point of a measure (isolated sides, gap partner).
    ClassifySupport,
    /// The t_n radius sequence of a point under a measure.
    TSequence,
    /// Brute-force cross-checks of the core operations.
    OracleSuite,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let text = match &cli.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    macro_rules! build {
        ($variant:ident, $cfg:ty) => {{
            let inner: $cfg = match &text {
                Some(t) => serde_json::from_str(t)
                    .map_err(|e| Error::Config(format!("config does not validate: {e}")))?,
                None => Default::default(),
            };
            ExperimentConfig::$variant(inner)
        }};
    }
    Ok(match cli.command {
        Command::KgsVerify => build!(KgsVerify, stplab::config::KgsVerifyConfig),
        Command::MstpExpanding => build!(MstpExpanding, stplab::config::MstpExpandingConfig),
        Command::SimultExpanding => build!(SimultExpanding, stplab::config::SimultExpandingConfig),
        Command::RotationCounterexample => build!(
            RotationCounterexample,
            stplab::config::RotationCounterexampleConfig
        ),
        Command::DenjoyCounterexample => build!(
            DenjoyCounterexample,
            stplab::config::DenjoyCounterexampleConfig
        ),
        Command::ClassifySupport => build!(ClassifySupport, stplab::config::ClassifySupportConfig),
        Command::TSequence => build!(TSequence, stplab::config::TSequenceConfig),
        Command::OracleSuite => build!(OracleSuite, stplab::config::OracleSuiteConfig),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    config.apply_overrides(&Overrides {
        horizon: cli.horizon,
        samples: cli.samples,
        seed: cli.seed,
        bits: cli.bits,
        backend: cli.backend,
    });
    match runner::run(&config, &cli.out) {
        Ok(report) => {
            println!("{}", report.summary);
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            if report.partial {
                eprintln!("warning: budget limited the run; outputs are partial");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(runner::exit_code_for(&e)).unwrap_or(1))
        }
    }
}
