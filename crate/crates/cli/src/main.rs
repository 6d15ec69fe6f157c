//! `diskflow`: scenario runner for semigroups of holomorphic self-maps of the
//! disk with Denjoy-Wolff point 1.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod render;
mod runner;
mod scenario;
mod tasks;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use runner::{run_file, Artifacts, RunSummary, Status};
use tasks::Settings;
use verify::show;

#[derive(Parser)]
#[command(name = "diskflow", version, about = "Boundary asymptotics of semigroups in the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Artifact directory (`run` defaults to `out`; `verify-all` writes nothing unless given).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flow tolerance (relative; absolute is 1% of it).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Flow horizon: trajectory end time and upper limit of improper integrals.
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Write plot.svg (default).
    #[arg(long, global = true, overrides_with = "no_svg")]
    svg: bool,
    /// Skip plot.svg.
    #[arg(long = "no-svg", global = true, overrides_with = "svg")]
    no_svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts.
    Run { scenario: PathBuf },
    /// Run every `*.json` scenario in a directory and print a pass/fail table.
    VerifyAll { dir: PathBuf },
}

fn print_summary(s: &RunSummary) {
    let tag = match s.status {
        Status::Passed => "PASS",
        Status::Failed => "FAIL",
        Status::InputError => "ERROR",
    };
    println!("{tag:5} {} ({})", s.name, s.task.unwrap_or("?"));
    for c in &s.checks {
        println!(
            "      {} {}: measured {} expected {}",
            if c.pass { "pass" } else { "FAIL" },
            c.label,
            show(&c.measured),
            c.expected
        );
    }
    if let Some(m) = &s.message {
        for line in m.lines() {
            println!("      {line}");
        }
    }
}

fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn verify_all(dir: &Path, settings: Settings, artifacts: Option<&Artifacts>) -> Result<Status> {
    let files = scenario_files(dir)?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(files.len().max(1));
    let mut summaries: Vec<Option<RunSummary>> = (0..files.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = files.len().div_ceil(workers).max(1);
        for (paths, slots) in files.chunks(chunk).zip(summaries.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (p, slot) in paths.iter().zip(slots) {
                    *slot = Some(run_file(p, settings, artifacts));
                }
            });
        }
    });
    let summaries: Vec<RunSummary> = summaries.into_iter().map(|s| s.expect("every scenario ran")).collect();
    for s in &summaries {
        print_summary(s);
    }
    let count = |st| summaries.iter().filter(|s| s.status == st).count();
    let checks: usize = summaries.iter().map(|s| s.checks.len()).sum();
    let passed_checks: usize = summaries.iter().map(|s| s.checks.iter().filter(|c| c.pass).count()).sum();
    println!(
        "summary: {} scenarios ({} passed, {} failed, {} input errors); {}/{} checks passed",
        summaries.len(),
        count(Status::Passed),
        count(Status::Failed),
        count(Status::InputError),
        passed_checks,
        checks
    );
    Ok(if count(Status::InputError) > 0 {
        Status::InputError
    } else if count(Status::Failed) > 0 {
        Status::Failed
    } else {
        Status::Passed
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = Settings {
        tol: cli.tol,
        t_max: cli.tmax,
    };
    let svg = !cli.no_svg;
    let status = match &cli.command {
        Command::Run { scenario } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let art = Artifacts { dir: &dir, svg };
            let s = run_file(scenario, settings, Some(&art));
            print_summary(&s);
            if s.status != Status::InputError {
                println!("artifacts: {}", dir.join(&s.name).display());
            }
            s.status
        }
        Command::VerifyAll { dir } => {
            let art = cli.out.as_deref().map(|d| Artifacts { dir: d, svg });
            match verify_all(dir, settings, art.as_ref()) {
                Ok(st) => st,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    Status::InputError
                }
            }
        }
    };
    ExitCode::from(status.exit_code())
}
