use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use trilinear_cli::config::{self, ExperimentConfig};
use trilinear_cli::reproduce::shipped_config;
use trilinear_cli::runner::{run_experiment, RunArtifacts};
use trilinear_cli::{io_err, CliError};

#[derive(Parser)]
#[command(
    name = "trilinear",
    about = "Simulate and estimate the nonlinear phonon coupling of a two-ion crystal",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Eig,
    Krylov,
}

#[derive(clap::Args, Clone)]
struct Overrides {
    /// Override the breathing-mode cutoff from the config
    #[arg(long)]
    cutoff_b: Option<usize>,
    /// Override the rocking-mode cutoff from the config
    #[arg(long)]
    cutoff_r: Option<usize>,
    /// Override the propagation method from the config
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(b) = self.cutoff_b {
            cfg.cutoffs.n_cut_b = b;
        }
        if let Some(r) = self.cutoff_r {
            cfg.cutoffs.n_cut_r = r;
        }
        if let Some(m) = self.method {
            cfg.method = match m {
                MethodArg::Eig => trilinear::propagation::Method::Eigendecomposition,
                MethodArg::Krylov => trilinear::propagation::Method::Krylov,
            };
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Trap analysis: equilibrium geometry, mode table, coupling constant,
    /// resonance solutions
    Modes {
        /// Trap description file (trap.* / resonance.* keys)
        #[arg(long)]
        config: PathBuf,
        /// Also write modes.csv here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment described by a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for CSV files and the summary
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Sweep one numeric config key over a list of values
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted key to vary (e.g. drive.lambda_over_2pi_khz or state.motional.n)
        #[arg(long)]
        axis: String,
        /// Comma-separated values (may be omitted for a header-only table)
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Concurrent sweep points
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Re-run one of the shipped figure configurations
    Reproduce {
        /// fig1 | fig2 | fig3 | fig4a | fig4b
        figure: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Numerical hygiene checks (norm, energy, method agreement,
    /// truncation-scan convergence at the shipped cutoffs)
    Selftest,
}

fn write_artifacts(artifacts: &RunArtifacts, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir.display().to_string()))?;
    for (filename, content) in &artifacts.files {
        let path = out_dir.join(filename);
        fs::write(&path, content).map_err(io_err(path.display().to_string()))?;
    }
    let summary_path = out_dir.join(format!("{}_summary.txt", artifacts.summary.name));
    fs::write(&summary_path, artifacts.summary.render())
        .map_err(io_err(summary_path.display().to_string()))?;
    Ok(())
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path.display().to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Modes { config, out } => {
            let report = trilinear_cli::modes::modes_report(&read_config(&config)?)?;
            print!("{}", report.text);
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(io_err(dir.display().to_string()))?;
                let path = dir.join("modes.csv");
                fs::write(&path, &report.csv).map_err(io_err(path.display().to_string()))?;
            }
            Ok(())
        }
        Command::Run {
            config: path,
            out,
            overrides,
        } => {
            let mut cfg = config::parse(&read_config(&path)?)?;
            overrides.apply(&mut cfg);
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("run")
                .to_string();
            let artifacts = run_experiment(&cfg, &name)?;
            write_artifacts(&artifacts, &out)?;
            print!("{}", artifacts.summary.render());
            Ok(())
        }
        Command::Sweep {
            config: path,
            axis,
            values,
            out,
            jobs,
        } => {
            let text = read_config(&path)?;
            let table = trilinear_cli::sweep::sweep(&text, &axis, &values, jobs)?;
            fs::create_dir_all(&out).map_err(io_err(out.display().to_string()))?;
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("sweep")
                .to_string();
            let file = out.join(format!("{name}_sweep.csv"));
            fs::write(&file, table.render()).map_err(io_err(file.display().to_string()))?;
            println!("wrote {} rows to {}", table.rows.len(), file.display());
            Ok(())
        }
        Command::Reproduce {
            figure,
            out,
            overrides,
        } => {
            let mut cfg = config::parse(shipped_config(&figure)?)?;
            overrides.apply(&mut cfg);
            let artifacts = run_experiment(&cfg, &figure)?;
            write_artifacts(&artifacts, &out)?;
            print!("{}", artifacts.summary.render());
            Ok(())
        }
        Command::Selftest => {
            let lines = trilinear_cli::selftest::run_selftest()?;
            let mut all_ok = true;
            for line in &lines {
                println!(
                    "selftest {}: {} ({})",
                    line.name,
                    if line.passed { "PASS" } else { "FAIL" },
                    line.detail
                );
                all_ok &= line.passed;
            }
            if all_ok {
                Ok(())
            } else {
                Err(CliError::Numerical("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
