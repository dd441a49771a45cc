use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use mazer::experiment::config::parse_sign;
use mazer::experiment::{self, ConfigFile, TrapConfig};
use mazer::field::TrappingState;
use mazer::par::Execution;
use mazer::MazerError;

#[derive(Parser)]
#[command(name = "mazer", version, about = "m-photon mazer scattering simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a κL sweep described by a JSON config and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (1 = sequential).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check that a perfect trapping state leaves every population unchanged.
    Trap {
        /// γ as `re,im`
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        /// `+` or `-`
        #[arg(long, allow_hyphen_values = true)]
        sign: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        profile: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Reproduce the data behind figure 1, 2, 3 or 4.
    Fig {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=4))]
        figure: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = experiment::DEFAULT_POINTS)]
        points: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, MazerError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || MazerError::InvalidInput(format!("expected `re,im`, got `{s}`"));
    match parts.as_slice() {
        [re, im] => Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn run(cli: Cli) -> Result<bool, MazerError> {
    match cli.command {
        Command::Sweep { config, jobs } => {
            let execution = Execution::with_jobs(jobs)?;
            let (file, base) = ConfigFile::load(&config)?;
            let sweep = file.resolve(&base)?;
            let rows = experiment::run_sweep_with(&sweep, execution)?;
            match &sweep.output {
                Some(path) => experiment::write_csv(&rows, path)?,
                None => {
                    let stdout = std::io::stdout();
                    experiment::emit_csv(&rows, stdout.lock()).map_err(|e| MazerError::InvalidInput(e.to_string()))?;
                }
            }
            Ok(true)
        }
        Command::Trap {
            gamma,
            sign,
            m,
            profile,
            config,
            jobs,
        } => {
            let execution = Execution::with_jobs(jobs)?;
            let state = TrappingState::new(parse_complex(&gamma)?, parse_sign(&sign)?, m)?;
            let trap = TrapConfig::load(&config)?;
            if profile == "sampled" {
                return Err(MazerError::InvalidInput("trap supports mesa, sech2 and gaussian".into()));
            }
            let profile = trap.profile(&profile)?;
            let report = experiment::verify_trapping(
                &state,
                &profile,
                &trap.k_over_kappa,
                &trap.kl_grid.points(),
                trap.tol,
                trap.truncation,
                execution,
            )?;
            let mut out = std::io::stdout().lock();
            let _ = writeln!(
                out,
                "{} max|dsigma_aa|={:.3e} max|dP_n|={:.3e} R in [{:.6e}, {:.6e}] over {} points",
                if report.passed() { "PASS" } else { "FAIL" },
                report.max_delta_sigma_aa,
                report.max_delta_p,
                report.min_reflection,
                report.max_reflection,
                report.points
            );
            Ok(report.passed())
        }
        Command::Fig {
            figure,
            out,
            points,
            jobs,
        } => {
            let execution = Execution::with_jobs(jobs)?;
            for path in experiment::write_figure(figure, &out, points, execution)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { 2 } else { 1 })
        }
    }
}
