use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use maxcons_cli::commands::{self, Context};
use maxcons_cli::config::{parse_config, resolve_seed};
use maxcons_cli::figures::{reproduce_figure, FigureId};
use maxcons_cli::selfcheck::{run_selfcheck, Fault};
use maxcons_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "maxcons", version, about = "Noisy max-consensus experiments")]
struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; overrides the config file and MAXCONS_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for Monte Carlo trials.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration and print the resolved experiment.
    Validate,
    /// Write every bound for the configured graph and noise.
    Bounds,
    /// Write per-iteration state statistics of one uncompensated run.
    Simulate,
    /// Write both runs of the drift-compensated algorithm and the drift estimates.
    Robust,
    /// Write the series for one figure.
    Reproduce {
        #[arg(long)]
        figure: String,
    },
    /// Run the fast invariant suite.
    Selfcheck {
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    VarianceMismatch,
}

fn context(cli: &Cli) -> CliResult<Context> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required for this command".into()))?;
    let cfg = parse_config(path)?;
    let env = std::env::var("MAXCONS_SEED").ok();
    let seed = resolve_seed(cli.seed, &cfg, env.as_deref())?;
    Context::new(cfg, seed)
}

fn report(written: &[PathBuf]) {
    for p in written {
        println!("wrote {}", p.display());
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let out = |ctx: &Context| ctx.out_dir(cli.out.as_deref().map(Path::new));
    match &cli.command {
        Command::Validate => {
            let ctx = context(cli)?;
            let text = serde_json::to_string_pretty(&commands::validate(&ctx)).map_err(|e| CliError::Config(e.to_string()))?;
            println!("{text}");
        }
        Command::Bounds => {
            let ctx = context(cli)?;
            report(&commands::bounds(&ctx, &out(&ctx))?);
        }
        Command::Simulate => {
            let ctx = context(cli)?;
            report(&commands::simulate(&ctx, &out(&ctx))?);
        }
        Command::Robust => {
            let ctx = context(cli)?;
            report(&commands::robust(&ctx, &out(&ctx))?);
        }
        Command::Reproduce { figure } => {
            let id: FigureId = figure.parse()?;
            let ctx = context(cli)?;
            report(&reproduce_figure(&ctx, id, &out(&ctx))?);
        }
        Command::Selfcheck { inject_fault } => {
            let fault = inject_fault.map(|FaultArg::VarianceMismatch| Fault::VarianceMismatch);
            let r = run_selfcheck(fault);
            print!("{}", r.render());
            if !r.all_passed() {
                return Err(CliError::Invariant("selfcheck reported failures".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
