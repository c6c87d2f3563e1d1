//! `winp`: batch front end for single runs, parameter sweeps and the
//! token/compression reference grid.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use winp_core::export::write_run;
use winp_core::orchestrator::{
    compute_metrics, gain_pct, grid_csv, reference_grid, run_paired, run_with, sweep, Optimizer,
    Pacs, Rtfs, Scenario, SweepDimension,
};
use winp_core::{Error, ExperimentConfig, ExperimentResult};

#[derive(Parser)]
#[command(name = "winp", version, about = "Slice delivery and accelerator co-scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write metrics, schedule, allocation and bandwidth files.
    Run(RunArgs),
    /// Paired RTFS/PACS runs across values of one parameter, or the reference grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// JSON config; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, env = "WINP_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
enum ModeArg {
    Rtfs,
    Pacs,
    Both,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Scheduling policy; defaults to the config's mode.
    #[arg(long, ignore_case = true)]
    mode: Option<ModeArg>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Grid {
    Table3,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Parameter to vary.
    #[arg(long, required_unless_present = "grid", requires = "values")]
    dimension: Option<SweepDimension>,
    /// Comma-separated scalars, or semicolon-separated vectors for vector dimensions.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Run a predefined grid instead of a single dimension.
    #[arg(long, conflicts_with = "dimension")]
    grid: Option<Grid>,
    /// Paired replicas per cell; defaults to the config's replication count.
    #[arg(long)]
    seeds: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

fn load_config(common: &Common) -> winp_core::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json_str(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summary(r: &ExperimentResult) -> String {
    format!(
        "mode={} makespan={:.3}ms comm={:.3}ms compute={:.3}ms",
        r.mode, r.makespan_ms, r.comm_ms, r.compute_ms
    )
}

fn emit(out: &Path, r: &ExperimentResult, cfg: &ExperimentConfig, gain: Option<f64>) -> winp_core::Result<()> {
    let mut metrics = compute_metrics(r)?;
    metrics.gain_pct = gain;
    let mut cfg = cfg.clone();
    cfg.mode = r.mode;
    write_run(out, r, &metrics, &cfg)?;
    Ok(())
}

fn cmd_run(args: RunArgs) -> winp_core::Result<()> {
    let cfg = load_config(&args.common)?;
    let out = &args.common.out;
    let mode = args.mode.unwrap_or(match cfg.mode {
        winp_core::Mode::Rtfs => ModeArg::Rtfs,
        winp_core::Mode::Pacs => ModeArg::Pacs,
    });
    match mode {
        ModeArg::Both => {
            let (r, p) = run_paired(&cfg)?;
            let gain = gain_pct(r.makespan_ms, p.makespan_ms);
            emit(out, &r, &cfg, Some(gain))?;
            emit(out, &p, &cfg, Some(gain))?;
            println!("{}", summary(&r));
            println!("{} gain_pct={gain:.3}", summary(&p));
        }
        ModeArg::Rtfs | ModeArg::Pacs => {
            let optimizer: &dyn Optimizer = if mode == ModeArg::Rtfs { &Rtfs } else { &Pacs };
            let r = run_with(&Scenario::prepare(&cfg)?, optimizer)?;
            emit(out, &r, &cfg, None)?;
            println!("{}", summary(&r));
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> winp_core::Result<()> {
    let cfg = load_config(&args.common)?;
    let seeds = args.seeds.unwrap_or(cfg.replications);
    let threads = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let out = &args.common.out;
    fs::create_dir_all(out)?;
    let header = format!("# config_hash={} seed={} seeds={seeds}\n", cfg.config_hash(), cfg.seed);

    if args.grid == Some(Grid::Table3) {
        let cells = reference_grid(&cfg, seeds, threads)?;
        let csv = grid_csv(&cells);
        fs::write(out.join("table3.csv"), header + &csv)?;
        print!("{csv}");
        return Ok(());
    }

    let dim = args.dimension.expect("clap enforces --dimension without --grid");
    let values = dim.parse_values(args.values.as_deref().unwrap_or(""))?;
    let table = sweep(&cfg, dim, &values, seeds, threads)?;
    fs::write(out.join(format!("sweep_{dim}.csv")), header.clone() + &table.to_csv())?;
    let summary = table.summary_csv();
    fs::write(out.join(format!("sweep_{dim}_summary.csv")), header + &summary)?;
    print!("{summary}");
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Infeasible { .. } => 3,
        Error::Structural(_) | Error::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Error::Infeasible { unfinished, horizon } = &e {
                eprintln!("error: delivery infeasible within {horizon} slots; unfinished slices: {unfinished:?}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
