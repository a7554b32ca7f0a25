//! `madm` command-line driver.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use madm::baselines::{exhaustive_best, support_of};
use madm::channels::{GridSpec, RisSpec};
use madm::harness::{format_float, parse_config, render_csv, run_spec, Method};
use madm::perfect::solve_perfect;
use madm::scenario::Scenario;
use madm::Execution;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "madm", version, about = "Secure RIS-assisted movable-antenna simulator")]
struct Cli {
    /// Worker threads for parallel sweeps (default: available parallelism).
    #[arg(long, global = true, env = "MADM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the sweep described by a config file and write CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path; overrides `run.out`. Without either, CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated seeds; overrides `run.seeds`.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Comma-separated methods; overrides `run.methods`.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
    },
    /// Compare the compressive-sensing selection against exhaustive search.
    Oracle {
        /// Candidate grid as NXxNZ.
        #[arg(long, default_value = "4x4", value_parser = parse_dims)]
        grid: (usize, usize),
        #[arg(long, default_value_t = 4)]
        na: usize,
        /// RIS size as MYxMZ.
        #[arg(long, default_value = "4x4", value_parser = parse_dims)]
        ris: (usize, usize),
        /// Base scenario; defaults to the built-in one.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Parse and check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got \"{s}\""))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("\"{t}\": {e}"));
    let dims = (parse(a)?, parse(b)?);
    if dims.0 == 0 || dims.1 == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok(dims)
}

#[cfg(feature = "parallel")]
fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            anyhow::bail!("MADM_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn init_threads(threads: Option<usize>) -> Result<()> {
    if threads.is_some_and(|n| n > 1) {
        log::warn!("built without the `parallel` feature; running sequentially");
    }
    Ok(())
}

fn run(config: PathBuf, out: Option<PathBuf>, seeds: Option<Vec<u64>>, methods: Option<Vec<Method>>) -> Result<()> {
    let mut spec = parse_config(&config).with_context(|| format!("reading {}", config.display()))?;
    if out.is_some() {
        spec.out = out;
    }
    if let Some(s) = seeds {
        spec.seeds = s;
    }
    if let Some(m) = methods {
        spec.methods = m;
    }
    let rows = run_spec(&spec, Execution::default())?;
    match &spec.out {
        Some(path) => eprintln!("wrote {} rows to {}", rows.len(), path.display()),
        None => std::io::stdout().write_all(render_csv(&rows, spec.layout)?.as_bytes())?,
    }
    Ok(())
}

fn oracle(grid: (usize, usize), na: usize, ris: (usize, usize), config: Option<PathBuf>) -> Result<()> {
    let mut s = match config {
        Some(p) => parse_config(&p).with_context(|| format!("reading {}", p.display()))?.scenario,
        None => Scenario::default(),
    };
    s.grid = GridSpec { nx: grid.0, nz: grid.1, spacing: s.grid.spacing };
    s.ris = RisSpec { my: ris.0, mz: ris.1, eta: s.ris.eta };
    s.solver.n_a = na;
    let ch = s.channels()?;
    let prob = s.problem(&ch);
    let (state, cs) = solve_perfect(&prob)?;
    let (p, best) = exhaustive_best(&prob, Execution::default())?;
    println!("cs_sr,{}", format_float(cs.sr));
    println!("cs_support,{:?}", state.support());
    println!("exhaustive_sr,{}", format_float(best));
    println!("exhaustive_support,{:?}", support_of(&p));
    println!("ratio,{}", format_float(cs.sr / best));
    Ok(())
}

fn validate(config: PathBuf) -> Result<()> {
    let spec = parse_config(&config).with_context(|| format!("reading {}", config.display()))?;
    spec.validate()?;
    println!(
        "ok: scenario {}, axis {} with {} values, {} methods, {} seeds",
        spec.scenario.id,
        spec.axis,
        spec.values.len(),
        spec.methods.len(),
        spec.seeds.len()
    );
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    init_threads(cli.threads)?;
    match cli.command {
        Command::Run { config, out, seeds, methods } => run(config, out, seeds, methods),
        Command::Oracle { grid, na, ris, config } => oracle(grid, na, ris, config),
        Command::Validate { config } => validate(config),
    }
}
