//! Command line front end: `fracwave run|validate|study|compare`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_config, RunConfig, SolverKind, SourceSpec};
use crate::error::{Error, Result};
use crate::harness::{self, convergence_study, error_norms, front_radius, grid_row};
use crate::output::{self, create_dir, write_text};
use crate::reference::spectral_run;
use crate::stepper::{run, RunAborted, RunOutput};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "FRACWAVE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fracwave", version, about = "Meshfree fractional Laplacian wave solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; overrides the environment variable.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the configured scenario.
    Run(Common),
    /// Manufactured-solution check at the configured spacing.
    Validate(Common),
    /// Manufactured-solution convergence study over `[study] point_counts`.
    Study(Common),
    /// Run both solvers and report their differences.
    Compare(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Run(c) | Command::Validate(c) | Command::Study(c) | Command::Compare(c) => c,
        }
    }
}

/// One machine-parsable line describing a failure.
pub fn error_line(e: &Error) -> String {
    format!("fracwave: error kind={} code={}: {}", e.kind(), e.exit_code(), e.to_string().replace('\n', " "))
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            e.exit_code()
        }
    }
}

fn init_threads(requested: Option<usize>) -> Result<()> {
    let from_env = std::env::var(THREADS_ENV).ok();
    let n = match (requested, from_env) {
        (Some(n), _) => n,
        (None, Some(v)) => v.trim().parse().map_err(|_| Error::Config(format!("{THREADS_ENV} must be a thread count, got '{v}'")))?,
        (None, None) => return Ok(()),
    };
    if n == 0 {
        return Err(Error::Config("thread count must be positive".into()));
    }
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cmd: &Command) -> Result<()> {
    let common = cmd.common();
    init_threads(common.threads)?;
    let mut cfg = parse_config(&common.config)?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
        cfg.defaulted.remove("output.dir");
    }
    create_dir(&cfg.out_dir)?;
    write_text(&cfg.out_dir.join("manifest.txt"), &cfg.manifest())?;
    match cmd {
        Command::Run(_) => run_command(&cfg),
        Command::Validate(_) => validate_command(&cfg),
        Command::Study(_) => study_command(&cfg),
        Command::Compare(_) => compare_command(&cfg),
    }
}

fn solve(cfg: &RunConfig) -> std::result::Result<RunOutput, RunAborted> {
    match cfg.solver {
        SolverKind::Rbf => run(&cfg.scenario()?),
        SolverKind::Spectral => spectral_run(&cfg.spectral_scenario()?),
    }
}

fn finish(cfg: &RunConfig, result: std::result::Result<RunOutput, RunAborted>, dir: &Path) -> Result<RunOutput> {
    let grid = cfg.snapshot_grid();
    match result {
        Ok(out) => {
            output::write_run(dir, &grid, &out, cfg.receivers.len())?;
            write_text(&dir.join("snapshots.csv"), &output::snapshot_summary(&out.snapshots))?;
            Ok(out)
        }
        Err(RunAborted { error, partial }) => {
            output::write_run(dir, &grid, &partial, cfg.receivers.len())?;
            Err(error)
        }
    }
}

fn run_command(cfg: &RunConfig) -> Result<()> {
    finish(cfg, solve(cfg), &cfg.out_dir).map(|_| ())
}

fn validate_command(cfg: &RunConfig) -> Result<()> {
    let case = cfg.manufactured_case()?;
    let side = ((harness::SIDE / cfg.dx).round() as usize) + 1;
    let rows = [case.try_solve(side)?];
    write_text(&cfg.out_dir.join("validate.csv"), &harness::study_csv(&rows))?;
    write_text(&cfg.out_dir.join("validate.txt"), &harness::study_report(&case, &rows))
}

fn study_command(cfg: &RunConfig) -> Result<()> {
    let case = cfg.manufactured_case()?;
    let rows = convergence_study(&case, &cfg.point_counts)?;
    write_text(&cfg.out_dir.join("study.csv"), &harness::study_csv(&rows))?;
    write_text(&cfg.out_dir.join("study.txt"), &harness::study_report(&case, &rows))?;
    Ok(())
}

fn compare_command(cfg: &RunConfig) -> Result<()> {
    let mut rbf_cfg = cfg.clone();
    rbf_cfg.solver = SolverKind::Rbf;
    let mut spec_cfg = cfg.clone();
    spec_cfg.solver = SolverKind::Spectral;
    spec_cfg.spectral_scenario()?;

    let rbf_dir = cfg.out_dir.join("rbf");
    let spec_dir = cfg.out_dir.join("spectral");
    create_dir(&rbf_dir)?;
    create_dir(&spec_dir)?;
    let a = finish(&rbf_cfg, solve(&rbf_cfg), &rbf_dir)?;
    let b = finish(&spec_cfg, solve(&spec_cfg), &spec_dir)?;

    let grid = cfg.snapshot_grid();
    let (x0, x1, y0, y1) = cfg.domain().bounds();
    let y_mid = 0.5 * (y0 + y1);
    let x_source = match cfg.source {
        SourceSpec::Ricker { x, .. } => x,
        SourceSpec::None => 0.5 * (x0 + x1),
    };
    let cell = (x1 - x0) / (cfg.grid_nx - 1) as f64;
    let mut report = String::new();
    let _ = writeln!(report, "profile line y = {y_mid}, source x = {x_source}, grid cell = {cell} m");
    let _ = writeln!(report, "time,max_abs_diff,rel_l2_diff,front_rbf,front_spectral,front_diff_cells");
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        let diff: Vec<f64> = sa.values.iter().zip(&sb.values).map(|(u, v)| u - v).collect();
        let mut csv = String::from("x,y,rbf,spectral,diff\n");
        for (((p, u), v), d) in grid.points.iter().zip(&sa.values).zip(&sb.values).zip(&diff) {
            let _ = writeln!(csv, "{},{},{u},{v},{d}", p.x, p.y);
        }
        let ms = output::format_ms(sa.time);
        write_text(&cfg.out_dir.join(format!("diff_{ms}ms.csv")), &csv)?;

        let pa = grid_row(&grid, &sa.values, y_mid);
        let pb = grid_row(&grid, &sb.values, y_mid);
        let mut prof = String::from("x,rbf,spectral\n");
        for ((x, u), (_, v)) in pa.iter().zip(&pb) {
            let _ = writeln!(prof, "{x},{u},{v}");
        }
        write_text(&cfg.out_dir.join(format!("profile_{ms}ms.csv")), &prof)?;

        let (max_abs, rel) = error_norms(&sa.values, &sb.values)?;
        let fa = front_radius(&pa, x_source, 0.1);
        let fb = front_radius(&pb, x_source, 0.1);
        let show = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |r| r.to_string());
        let cells = match (fa, fb) {
            (Some(u), Some(v)) => ((u - v).abs() / cell).to_string(),
            _ => "-".to_string(),
        };
        let _ = writeln!(report, "{},{max_abs},{},{},{},{cells}", sa.time, show(rel), show(fa), show(fb));
    }
    write_text(&cfg.out_dir.join("compare.txt"), &report)?;
    Ok(())
}
