use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mimo_ic_cli::csv::{write_rows, CsvRow};
use mimo_ic_cli::{experiment, ExperimentSpec, RunError};

#[derive(Parser)]
#[command(name = "mimo-ic", version, about = "Robust MIMO interference-channel transceiver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sum rate and energy efficiency versus SNR for each algorithm.
    Sweep(Common),
    /// Monte Carlo mean SINR against its first-order approximation.
    Accuracy(Common),
    /// Metric trace of the proposed algorithm, one row per half-step.
    Converge(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` experiment file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Network, e.g. "(3x3,1)^4".
    #[arg(long)]
    scenario: Option<String>,
    /// SNR list in dB: "0,10,20" or "start:step:stop".
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// CSI error variances, same syntax as --snr.
    #[arg(long)]
    sigma2: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated subset of proposed, max_sinr, min_leakage.
    #[arg(long)]
    algo: Option<String>,
    /// Maximum alternations per run.
    #[arg(long)]
    iters: Option<String>,
    #[arg(long = "rel-tol")]
    rel_tol: Option<String>,
    #[arg(long = "mc-draws")]
    mc_draws: Option<String>,
    /// "true" or "estimated".
    #[arg(long = "eval-channel")]
    eval_channel: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn spec(&self) -> Result<ExperimentSpec, RunError> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::from_config_file(path)?,
            None => ExperimentSpec::default(),
        };
        let overrides = [
            ("scenario", &self.scenario),
            ("snr", &self.snr),
            ("sigma2", &self.sigma2),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("algo", &self.algo),
            ("iters", &self.iters),
            ("rel_tol", &self.rel_tol),
            ("mc_draws", &self.mc_draws),
            ("eval_channel", &self.eval_channel),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                spec.set(key, value)?;
            }
        }
        Ok(spec)
    }

    fn emit<R: CsvRow>(&self, rows: &[R]) -> Result<(), RunError> {
        let mut out: Box<dyn Write> = match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        write_rows(&mut out, rows)?;
        out.flush()?;
        Ok(())
    }
}

fn execute(command: &Command) -> Result<(), RunError> {
    match command {
        Command::Sweep(args) => args.emit(&experiment::sweep(&args.spec()?)?),
        Command::Accuracy(args) => args.emit(&experiment::accuracy(&args.spec()?)?),
        Command::Converge(args) => args.emit(&experiment::converge(&args.spec()?)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mimo-ic: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
