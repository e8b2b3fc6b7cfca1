use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hflow_cli::commands::{self, SymOp};
use hflow_cli::run::RunOptions;
use hflow_cli::{CliError, EXIT_ERROR};

/// Curvature flow experiments and Harnack inequality monitors.
#[derive(Parser, Debug)]
#[command(name = "hflow", version)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `experiment.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies every monitor tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Worker threads for sweeps and Moser pairs (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment and write its artifacts.
    Run,
    /// Run the cartesian product of the `[sweep]` ranges.
    Sweep,
    /// List the exact solutions.
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a curvature function at one point.
    Symfun {
        #[arg(value_enum)]
        op: Op,
        /// Base function, e.g. `H`, `det^(1/n)`, `s2`, `inv(p2)`.
        base: String,
        /// Principal curvatures.
        #[arg(required = true, num_args = 1.., allow_negative_numbers = true)]
        kappa: Vec<f64>,
        /// Power, for `speed`.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        p: f64,
    },
    /// Transform a serialized state (or a trace record) to its dual.
    Dual {
        input: PathBuf,
        /// Record of a `.jsonl` trace; defaults to the last.
        #[arg(long)]
        record: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 1e-3)]
        fd_tol: f64,
    },
    /// Moser comparison on random pairs of an existing trace.
    Moser {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Op {
    Eval,
    Grad,
    Hessian,
    Inverse,
    Speed,
}

impl From<Op> for SymOp {
    fn from(op: Op) -> Self {
        match op {
            Op::Eval => SymOp::Eval,
            Op::Grad => SymOp::Grad,
            Op::Hessian => SymOp::Hessian,
            Op::Inverse => SymOp::Inverse,
            Op::Speed => SymOp::Speed,
        }
    }
}

fn need_config(cli: &Cli) -> Result<PathBuf, CliError> {
    cli.config.clone().ok_or_else(|| CliError::Config {
        path: "<command line>".into(),
        line: None,
        key: "--config".into(),
        message: "this subcommand needs a configuration file".into(),
    })
}

fn dispatch(cli: &Cli) -> Result<(String, u8), CliError> {
    let opts = RunOptions { seed: cli.seed, tol_scale: cli.tol_scale };
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Run => commands::run(&need_config(cli)?, out, &opts),
        Command::Sweep => {
            let (table, code) = commands::run_sweep(&need_config(cli)?, out, &opts)?;
            Ok((table.to_csv(), code))
        }
        Command::Catalog { json } => Ok((commands::catalog(*json)?, 0)),
        Command::Symfun { op, base, kappa, p } => Ok((commands::symfun((*op).into(), base, kappa, *p)?, 0)),
        Command::Dual { input, record, tol, fd_tol } => {
            let dest = out.map(PathBuf::from).unwrap_or_else(|| input.with_extension("dual.json"));
            commands::dual_cmd(input, *record, &dest, tol * cli.tol_scale, fd_tol * cli.tol_scale)
        }
        Command::Moser { trace, pairs } => {
            let dest = out.map(PathBuf::from).unwrap_or_else(|| trace.parent().unwrap_or(".".as_ref()).to_path_buf());
            commands::moser_cmd(trace, *pairs, cli.seed.unwrap_or(0), &dest, cli.tol_scale)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HF_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        log::warn!("could not size the worker pool: {e}");
    }
    match dispatch(&cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
