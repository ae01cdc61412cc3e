use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssalab_core::config::{ExperimentConfig, ExperimentKind};
use ssalab_core::harness::{check_suite, error_exit_code, format_checks, output_dir, run};
use ssalab_core::Error;

/// Simulation and numerical checks for shift selfsimilar sequences,
/// b-decomposable laws, escape rates and Lévy's law of the iterated logarithm.
#[derive(Parser)]
#[command(name = "ssalab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the one in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the one in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
    /// Worker threads; results do not depend on this value.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LilMode {
    Hitting,
    Lastexit,
    Sup,
    Stable,
    Bound,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate W (simulate-w) or Y (simulate-y) paths.
    Simulate(RunArgs),
    /// Evaluate the infinite-product characteristic function.
    Bdecomp(RunArgs),
    /// Run the series classifier (classify) or build a type-A gauge (typeA-gauge).
    Classify(RunArgs),
    /// Atom at zero, K_W and the type-A check.
    Kw(RunArgs),
    /// Continuous-time experiments.
    Lil {
        #[arg(value_enum)]
        mode: LilMode,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Monte Carlo check of the hitting-probability bound.
    Bound(RunArgs),
    /// Run every invariant suite.
    Check {
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn allowed(cmd: &Command) -> &'static [ExperimentKind] {
    use ExperimentKind::*;
    match cmd {
        Command::Simulate(_) => &[SimulateW, SimulateY],
        Command::Bdecomp(_) => &[Bdecomp],
        Command::Classify(_) => &[Classify, TypeAGauge],
        Command::Kw(_) => &[Kw],
        Command::Lil { mode, .. } => match mode {
            LilMode::Hitting => &[LilHitting],
            LilMode::Lastexit => &[LilLastExit],
            LilMode::Sup => &[LilSup],
            LilMode::Stable => &[LilStable],
            LilMode::Bound => &[BoundCheck],
        },
        Command::Bound(_) => &[BoundCheck],
        Command::Check { .. } => &[],
    }
}

fn pool(workers: Option<usize>) {
    if let Some(n) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execute(cmd: &Command, args: &RunArgs) -> Result<i32, Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    let kinds = allowed(cmd);
    if !kinds.contains(&cfg.experiment) {
        let names: Vec<&str> = kinds.iter().map(|k| k.name()).collect();
        return Err(Error::Config(format!(
            "configuration is for experiment '{}', this subcommand runs {}",
            cfg.experiment.name(),
            names.join(" or ")
        )));
    }
    let dir = output_dir(&cfg, args.out.as_deref());
    let record = run(&cfg, &dir, args.force)?;
    println!("{} -> {} ({:?}, {:.2}s)", cfg.experiment.name(), dir.display(), record.status, record.wall_clock_seconds);
    for (name, ok) in &record.flags {
        println!("  {name}: {}", if *ok { "pass" } else { "FAIL" });
    }
    Ok(record.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Check { seed, workers } => {
            pool(*workers);
            let results = check_suite(*seed);
            print!("{}", format_checks(&results));
            if results.iter().all(|r| r.passed) {
                0
            } else {
                3
            }
        }
        cmd @ (Command::Simulate(a) | Command::Bdecomp(a) | Command::Classify(a) | Command::Kw(a) | Command::Bound(a))
        | cmd @ Command::Lil { args: a, .. } => {
            pool(a.workers);
            match execute(cmd, a) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    error_exit_code(&e)
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
