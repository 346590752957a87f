//! `nlsprop` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure, 3 verification failure.

mod config;
mod demo;
mod runner;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use nlsprop::convergence::ConvergenceStudy;
use nlsprop::oracle::suite::{all_passed, format_table, to_csv};
use nlsprop::oracle::{run_suite, SuiteConfig};
use nlsprop::snapshot::{self, parse_header};
use nlsprop::WaveFunction64;

use crate::config::{Precision, RunConfig};

/// Environment variable for the worker thread count.
pub const THREADS_ENV: &str = "NLSPROP_THREADS";

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::Numerical(e) => write!(f, "numerical failure: {e:#}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "nlsprop", version, about = "Spectral split-operator propagation of nonlinear Schrödinger equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the problem described by a config file.
    Run {
        config: PathBuf,
        /// Print the parsed config in canonical form and exit.
        #[arg(long)]
        dry_run: bool,
    },
    /// Measure the convergence order against an order-6 reference.
    Converge {
        config: PathBuf,
        /// Comma-separated steps; overrides [converge] dts.
        #[arg(long, value_delimiter = ',')]
        dts: Option<Vec<f64>>,
        /// Final time; overrides [converge] t_final.
        #[arg(long)]
        t_final: Option<f64>,
        /// Write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Fail with exit code 3 unless the fitted slope is within
        /// `--order-tol` of this value.
        #[arg(long)]
        expect_order: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        order_tol: f64,
    },
    /// Run the operator-identity suite.
    OracleVerify {
        /// Tolerance for finite-difference identities.
        #[arg(long)]
        tol: Option<f64>,
        /// Keep identities whose name starts with one of these.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Summarize a snapshot file.
    Inspect { snapshot: PathBuf },
    /// Built-in scenarios.
    Demo {
        name: DemoName,
        /// Directory for CSV and snapshot output.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Print the scenario's config and exit.
        #[arg(long)]
        print_config: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DemoName {
    Soliton,
    Trap,
    Fwm,
    Chin,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("{e}");
        return ExitCode::from(e.code());
    }
    let result = match cli.command {
        Command::Run { config, dry_run } => cmd_run(&config, dry_run),
        Command::Converge {
            config,
            dts,
            t_final,
            csv,
            expect_order,
            order_tol,
        } => cmd_converge(&config, dts, t_final, csv.as_deref(), expect_order, order_tol),
        Command::OracleVerify { tol, only, csv } => cmd_oracle_verify(tol, only, csv.as_deref()),
        Command::Inspect { snapshot } => cmd_inspect(&snapshot),
        Command::Demo {
            name,
            out,
            print_config,
        } => demo::cmd_demo(name, &out, print_config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlsprop: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn configure_threads() -> CmdResult {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| Failure::Config(anyhow!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(e.into()))
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(path).map_err(Failure::Config)?;
    if let Some(dir) = path.parent() {
        cfg.rebase(dir);
    }
    Ok(cfg)
}

fn cmd_run(path: &Path, dry_run: bool) -> CmdResult {
    if dry_run {
        let cfg = RunConfig::load(path).map_err(Failure::Config)?;
        print!("{cfg}");
        return Ok(());
    }
    let cfg = load_config(path)?;
    execute_run(&cfg)
}

pub fn execute_run(cfg: &RunConfig) -> CmdResult {
    let summary = match cfg.precision {
        Precision::F64 => runner::run::<f64>(cfg)?,
        Precision::F32 => runner::run::<f32>(cfg)?,
    };
    let last = summary.records.last().expect("initial state is always recorded");
    println!(
        "{} steps of {} at dt = {} ({}): t = {}, norm = {:.15e}, max relative norm drift = {:.3e}",
        cfg.steps,
        cfg.scheme,
        cfg.dt,
        cfg.precision.name(),
        last.time,
        summary.final_norm,
        summary.max_drift
    );
    if let Some(e) = last.energy {
        println!("final energy = {e:.15e}");
    }
    Ok(())
}

pub fn print_study(study: &ConvergenceStudy) -> Result<f64, Failure> {
    let local = study.local_slopes();
    println!("{:>14} {:>8} {:>14} {:>8}", "dt", "steps", "error", "local");
    for (i, p) in study.points.iter().enumerate() {
        let l = if i == 0 { String::new() } else { format!("{:.3}", local[i - 1]) };
        println!("{:>14.6e} {:>8} {:>14.6e} {:>8}", p.dt, p.n_steps, p.error, l);
    }
    let slope = study
        .slope()
        .map_err(|e| Failure::Numerical(anyhow::Error::new(e).context("degenerate fit")))?;
    println!("reference dt = {:.6e}; least-squares slope = {slope:.4}", study.reference_dt);
    Ok(slope)
}

fn cmd_converge(
    path: &Path,
    dts: Option<Vec<f64>>,
    t_final: Option<f64>,
    csv: Option<&Path>,
    expect_order: Option<f64>,
    order_tol: f64,
) -> CmdResult {
    let cfg = load_config(path)?;
    let spec = cfg.converge.clone();
    let dts = dts
        .or_else(|| spec.as_ref().map(|s| s.dts.clone()))
        .ok_or_else(|| Failure::Config(anyhow!("no dt list: pass --dts or add [converge] dts")))?;
    let t_final = t_final
        .or_else(|| spec.as_ref().map(|s| s.t_final))
        .ok_or_else(|| Failure::Config(anyhow!("no final time: pass --t-final or add [converge] t_final")))?;
    let mut sorted = dts;
    sorted.sort_by(|a, b| b.total_cmp(a));
    let study = match cfg.precision {
        Precision::F64 => runner::converge::<f64>(&cfg, t_final, &sorted)?,
        Precision::F32 => runner::converge::<f32>(&cfg, t_final, &sorted)?,
    };
    println!("{} on {} to t = {t_final}", cfg.scheme, cfg.potential.family());
    let slope = print_study(&study)?;
    if let Some(path) = csv {
        let mut s = String::from("dt,steps,error\n");
        for p in &study.points {
            s.push_str(&format!("{:.17e},{},{:.17e}\n", p.dt, p.n_steps, p.error));
        }
        std::fs::write(path, s)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Config)?;
    }
    if let Some(want) = expect_order {
        if (slope - want).abs() > order_tol {
            return Err(Failure::Verification(format!(
                "slope {slope:.4} is not within {order_tol} of {want}"
            )));
        }
    }
    Ok(())
}

fn cmd_oracle_verify(tol: Option<f64>, only: Option<Vec<String>>, csv: Option<&Path>) -> CmdResult {
    let mut cfg = SuiteConfig::default();
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Failure::Config(anyhow!("--tol must be positive")));
        }
        cfg.tol = t;
    }
    cfg.only = only;
    let rows = run_suite(&cfg).map_err(|e| Failure::Numerical(e.into()))?;
    if rows.is_empty() {
        return Err(Failure::Config(anyhow!("--only matched no identities")));
    }
    print!("{}", format_table(&rows));
    if let Some(path) = csv {
        std::fs::write(path, to_csv(&rows))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Config)?;
    }
    let failed: Vec<&str> = rows
        .iter()
        .filter(|r| !r.informational && !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    if all_passed(&rows) {
        println!("{} identities checked, all pass", rows.len());
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} of {} identities failed: {}", failed.len(), rows.len(), failed.join(", "))))
    }
}

fn cmd_inspect(path: &Path) -> CmdResult {
    let bytes = std::fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Config)?;
    let ctx = |e: nlsprop::Error| Failure::Config(anyhow::Error::new(e).context(format!("{}", path.display())));
    let header = parse_header(&bytes).map_err(ctx)?;
    let psi: WaveFunction64 = snapshot::decode(&bytes).map_err(ctx)?;
    println!("file       {}", path.display());
    println!("version    {}", header.version);
    println!("grid       {:?} points, lengths {:?}", header.points, header.lengths);
    println!("components {}", header.components);
    println!("norm       {:.17e}", psi.norm());
    for (c, n) in psi.component_norms().iter().enumerate() {
        let rho = psi.density(c);
        let lo = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rho.iter().copied().fold(0.0, f64::max);
        println!("  c{c}: norm {n:.17e}, density min {lo:.6e} max {hi:.6e}");
    }
    Ok(())
}
