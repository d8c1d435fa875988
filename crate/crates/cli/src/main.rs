//! Command-line runner for the Hubbard experiments.
//!
//! Settings come from an optional INI-like config file (`-c FILE`), then
//! from flags, then from `--set section.key=value`. The worker thread count
//! is read from `HUBBARD_CD_THREADS` and defaults to the hardware parallelism.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::Session;
use config::{Algorithm, RawConfig};

pub const THREADS_ENV: &str = "HUBBARD_CD_THREADS";

#[derive(Parser, Debug)]
#[command(name = "hubbard-cd", version, about = "Counterdiabatic and variational ground-state search for the honeycomb Fermi-Hubbard model")]
struct Cli {
    /// Config file of `key = value` lines in `[section]`s.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Override any config key, e.g. `--set vqa.seeds=4`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    #[command(flatten)]
    flags: Flags,

    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the config keys.
#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long, global = true)]
    nx: Option<String>,
    #[arg(long, global = true)]
    ny: Option<String>,
    #[arg(long, global = true)]
    tau: Option<String>,
    #[arg(long, global = true)]
    u: Option<String>,
    /// evolve:adiabatic | evolve:cd | evolve:cd_only | vqa:hv | vqa:cd
    #[arg(long, global = true)]
    algorithm: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// exact | shots
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Shots per measurement group (implies `--mode shots`).
    #[arg(long, global = true)]
    shots: Option<String>,
    /// Total evolution time.
    #[arg(long = "T", global = true)]
    total_time: Option<String>,
    /// Trotter steps.
    #[arg(long = "N", global = true)]
    steps: Option<String>,
    #[arg(long, global = true)]
    dt: Option<String>,
    /// Nested-commutator order of the gauge potential.
    #[arg(long, global = true)]
    order: Option<String>,
    #[arg(long, global = true)]
    eta: Option<String>,
    #[arg(long, global = true)]
    max_iter: Option<String>,
    #[arg(long, global = true)]
    seeds: Option<String>,
    #[arg(long, global = true)]
    layers: Option<String>,
    #[arg(long, global = true)]
    trajectories: Option<String>,
    /// none | amplitude_damping | bit_flip | phase_flip
    #[arg(long, global = true)]
    noise: Option<String>,
    /// Noise probability.
    #[arg(long, global = true)]
    p: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("lattice.nx", &self.nx),
            ("lattice.ny", &self.ny),
            ("lattice.tau", &self.tau),
            ("lattice.u", &self.u),
            ("run.algorithm", &self.algorithm),
            ("run.seed", &self.seed),
            ("run.out", &self.out),
            ("measure.mode", &self.mode),
            ("measure.shots", &self.shots),
            ("evolve.T", &self.total_time),
            ("evolve.N", &self.steps),
            ("evolve.dt", &self.dt),
            ("evolve.order", &self.order),
            ("vqa.eta", &self.eta),
            ("vqa.max_iter", &self.max_iter),
            ("vqa.seeds", &self.seeds),
            ("vqa.layers", &self.layers),
            ("vqa.trajectories", &self.trajectories),
            ("noise.channel", &self.noise),
            ("noise.p", &self.p),
        ]
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prepare the hopping ground state and report its energies.
    Prepare,
    /// Trotterized evolution; the variant defaults to the configured algorithm.
    Evolve {
        /// adiabatic | cd | cd_only
        variant: Option<String>,
    },
    /// Variational training over several seeds.
    Vqa {
        /// hv | cd
        ansatz: Option<String>,
    },
    /// ΔE over the configured grid of steps, time steps and variants.
    Sweep,
    /// Ground energy of the half-filling sector.
    Oracle,
    /// Basic-gate counts of one Trotter step and one ansatz layer.
    CountGates,
    /// Dump the two-body operator pool.
    Pool {
        /// Also dump the full first-order operator.
        #[arg(long)]
        full: bool,
    },
    /// Run the configured algorithm.
    Run,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().with_context(|| format!("{THREADS_ENV}={v} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn raw_config(cli: &Cli) -> Result<RawConfig> {
    let mut raw = match &cli.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    for (key, value) in cli.flags.pairs() {
        if let Some(v) = value {
            raw.set(key, v)?;
        }
    }
    if cli.flags.shots.is_some() && cli.flags.mode.is_none() {
        raw.set("measure.mode", "shots")?;
    }
    for kv in &cli.set {
        let Some((k, v)) = kv.split_once('=') else {
            bail!("--set expects KEY=VALUE, got '{kv}'");
        };
        raw.set(k.trim(), v)?;
    }
    Ok(raw)
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    let mut raw = raw_config(&cli)?;
    match &cli.command {
        Command::Evolve { variant: Some(v) } => raw.set("run.algorithm", &format!("evolve:{v}"))?,
        Command::Vqa { ansatz: Some(a) } => raw.set("run.algorithm", &format!("vqa:{a}"))?,
        _ => {}
    }
    let session = Session::new(raw.resolve()?)?;
    let paths = match cli.command {
        Command::Prepare => commands::prepare(&session)?,
        Command::Evolve { .. } => match session.cfg.algorithm {
            Algorithm::Evolve(v) => commands::evolve(&session, v)?,
            a => bail!("evolve needs an evolve:<variant> algorithm, not {a}"),
        },
        Command::Vqa { .. } => match session.cfg.algorithm {
            Algorithm::Vqa(k) => commands::vqa(&session, k)?,
            a => bail!("vqa needs a vqa:<ansatz> algorithm, not {a}"),
        },
        Command::Sweep => commands::run_sweep(&session)?,
        Command::Oracle => commands::run_oracle(&session)?,
        Command::CountGates => {
            let (paths, text) = commands::count_gates(&session)?;
            print!("{text}");
            paths
        }
        Command::Pool { full } => {
            let (paths, text) = commands::pool(&session, full)?;
            print!("{text}");
            paths
        }
        Command::Run => commands::run(&session)?,
    };
    println!("{}", commands::display(&paths));
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
