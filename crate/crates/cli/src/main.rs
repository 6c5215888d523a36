use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pdm_cli::commands::{self, SolverChoice};
use pdm_cli::{CliError, ProblemConfig};

#[derive(Parser)]
#[command(name = "pdm", version, about = "Position-dependent-mass radial spectra, orderings and PCT checks")]
struct Cli {
    /// Worker threads for independent solves; output order does not change.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Fd,
    Shoot,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Bound-state energies: n_r, E, solver, node_count, est_error.
    Solve {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        solver: SolverArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Effective potential table for one or more orderings.
    Effpot {
        config: PathBuf,
        /// Catalog name or custom:<alpha>,<beta>; repeat to compare.
        #[arg(long)]
        ordering: Vec<String>,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predicted versus numeric spectrum for a power-law mass.
    Pct {
        config: PathBuf,
        /// oscillator:k=<v> or coulomb:e2=<v>.
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the (r, Z, U_d, V_eff) table; defaults to <out>_mapping.csv.
        #[arg(long)]
        mapping_out: Option<PathBuf>,
    },
    /// Discrete operator identities, residuals and convergence orders.
    VerifyOperator {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The named ordering catalog.
    Orderings {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let jobs = cli.jobs.max(1);
    match cli.command {
        Command::Solve { config, solver, out } => {
            let cfg = ProblemConfig::load(&config)?;
            let choice = match solver {
                SolverArg::Fd => SolverChoice::Fd,
                SolverArg::Shoot => SolverChoice::Shoot,
                SolverArg::Both => SolverChoice::Both,
            };
            commands::solve(&cfg, choice, jobs)?.emit(out.as_deref())
        }
        Command::Effpot { config, ordering, points, out } => {
            let cfg = ProblemConfig::load(&config)?;
            commands::effpot(&cfg, &ordering, points)?.emit(out.as_deref())
        }
        Command::Pct { config, reference, out, mapping_out } => {
            let cfg = ProblemConfig::load(&config)?;
            let result = commands::pct(&cfg, reference.as_deref(), jobs)?;
            for note in &result.notes {
                eprintln!("{note}");
            }
            result.spectrum.emit(out.as_deref())?;
            match mapping_out.or_else(|| out.as_deref().map(commands::derived_mapping_path)) {
                Some(path) => result.mapping.emit(Some(&path)),
                None => {
                    log::info!("no --out or --mapping-out; mapping table not written");
                    Ok(())
                }
            }
        }
        Command::VerifyOperator { config, out } => {
            let cfg = ProblemConfig::load(&config)?;
            let (table, failures) = commands::verify_operator(&cfg)?;
            table.emit(out.as_deref())?;
            if failures.is_empty() {
                Ok(())
            } else {
                Err(CliError::Solver(failures.join("; ")))
            }
        }
        Command::Orderings { out } => commands::orderings().emit(out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PDM_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pdm: {e}");
            e.exit_code()
        }
    }
}
