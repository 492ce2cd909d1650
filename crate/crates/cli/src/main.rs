use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dqdot_cli::{parse_config, run, ConfigError, NumericalFailure, Overrides, Solver, Sources, Task};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dqdot", version, about = "Two-electron double quantum dot sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run whatever the configuration asks for
    Sweep(Common),
    /// Molecular-orbital spectra, J and double occupation
    Spectrum(Common),
    /// Zero-field optimization of the fitting wells
    Variational(Common),
    /// Unrestricted Hartree-Fock splittings
    Uhf(Common),
    /// Gate times, adiabatic bounds and noise estimates
    Analyze(Common),
    /// Well depths that reproduce the target barriers
    Calibrate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in configuration (fig2..fig11, table1)
    #[arg(long)]
    preset: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Coulomb tensor cache directory
    #[arg(long)]
    cache: Option<PathBuf>,
    /// mo, uhf or hl
    #[arg(long)]
    solver: Option<String>,
    /// hm or sp
    #[arg(long)]
    basis: Option<String>,
}

fn execute(cli: Cli) -> Result<()> {
    let (common, task, solver) = match cli.command {
        Command::Sweep(c) => (c, None, None),
        Command::Spectrum(c) => (c, Some(Task::Solve), Some(Solver::Mo)),
        Command::Variational(c) => (c, Some(Task::Variational), None),
        Command::Uhf(c) => (c, Some(Task::Solve), Some(Solver::Uhf)),
        Command::Analyze(c) => (c, Some(Task::Analyze), None),
        Command::Calibrate(c) => (c, Some(Task::Calibrate), None),
    };
    if let Some(j) = common.jobs {
        if j == 0 {
            return Err(ConfigError { message: "must be at least 1".into(), line: None, flag: Some("--jobs".into()) }.into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().context("starting the worker pool")?;
    }
    let text = match &common.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| ConfigError {
            message: format!("cannot read {}: {e}", p.display()),
            line: None,
            flag: Some("--config".into()),
        })?),
        None => None,
    };
    let overrides = Overrides {
        seed: common.seed,
        output: common.out,
        cache_dir: common.cache,
        solver: common.solver.or(solver.map(|s| s.label().to_string())),
        basis_level: common.basis,
    };
    let parsed = parse_config(Sources { preset: common.preset.as_deref(), file: text.as_deref() }, &overrides)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    let task = task.unwrap_or(parsed.config.task);
    let summary = run(&parsed.config, task)?;
    for f in &summary.files {
        println!("{}", f.display());
    }
    log::info!("{} rows, {} cache hits", summary.rows, summary.cache_hits);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // one machine-readable line on stderr
            let (code, kind) = if e.is::<ConfigError>() {
                (2, "config")
            } else if e.is::<NumericalFailure>() || e.is::<dqdot::Error>() {
                (3, "numerical")
            } else {
                (1, "io")
            };
            let msg = format!("{e:#}").replace('"', "'");
            eprintln!("error kind={kind} code={code} message=\"{msg}\"");
            ExitCode::from(code)
        }
    }
}
