//! Loads a scenario, runs it, checks expectations and writes artifacts.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::Value;

use crate::render;
use crate::scenario::Scenario;
use crate::tasks::{execute, RunError, Settings};
use crate::verify::{check, CheckResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Passed => 0,
            Status::Failed => 1,
            Status::InputError => 2,
        }
    }
}

pub struct RunSummary {
    pub name: String,
    pub task: Option<&'static str>,
    pub status: Status,
    pub checks: Vec<CheckResult>,
    pub message: Option<String>,
}

pub struct Artifacts<'a> {
    /// Parent directory; files go to `<dir>/<scenario name>/`.
    pub dir: &'a Path,
    pub svg: bool,
}

/// Writes through a temporary file in the same directory and renames it.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> io::Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, dir.join(name))
}

pub fn run_file(path: &Path, settings: Settings, artifacts: Option<&Artifacts>) -> RunSummary {
    let fallback = path
        .file_stem()
        .map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned());
    let sc = match Scenario::load(path) {
        Ok(sc) => sc,
        Err(e) => {
            return RunSummary {
                name: fallback,
                task: None,
                status: Status::InputError,
                checks: Vec::new(),
                message: Some(e.0),
            }
        }
    };
    run_scenario(&sc, settings, artifacts)
}

pub fn run_scenario(sc: &Scenario, settings: Settings, artifacts: Option<&Artifacts>) -> RunSummary {
    let mut summary = RunSummary {
        name: sc.name().to_string(),
        task: Some(sc.task.name()),
        status: Status::Passed,
        checks: Vec::new(),
        message: None,
    };
    let outcome = match execute(sc, settings) {
        Ok(o) => o,
        Err(RunError::Input(m)) => {
            summary.status = Status::InputError;
            summary.message = Some(m);
            return summary;
        }
        Err(RunError::Numeric(m)) => {
            summary.status = Status::Failed;
            summary.message = Some(m);
            return summary;
        }
    };
    summary.checks = sc.expectations.iter().map(|e| check(&outcome.report, e)).collect();
    if summary.checks.iter().any(|c| !c.pass) {
        summary.status = Status::Failed;
    }

    if let Some(art) = artifacts {
        let mut report = outcome.report.clone();
        report["checks"] = serde_json::to_value(&summary.checks).expect("checks serialize");
        report["passed"] = Value::Bool(summary.status == Status::Passed);
        if let Err(e) = write_all(sc, &outcome, &report, &summary.checks, art) {
            summary.status = Status::InputError;
            summary.message = Some(format!("writing artifacts: {e}"));
        }
    }
    summary
}

fn write_all(
    sc: &Scenario,
    outcome: &crate::tasks::Outcome,
    report: &Value,
    checks: &[CheckResult],
    art: &Artifacts,
) -> io::Result<()> {
    let dir = art.dir.join(sc.name());
    fs::create_dir_all(&dir)?;
    let json = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    write_atomic(&dir, "report.json", &json)?;
    write_atomic(&dir, "summary.md", &render::markdown(sc.task, report, checks))?;
    for orbit in &outcome.orbits {
        write_atomic(&dir, &orbit.csv_name(), &orbit.trajectory.to_csv())?;
    }
    for (name, contents) in &outcome.extra_files {
        write_atomic(&dir, name, contents)?;
    }
    if art.svg {
        write_atomic(&dir, "plot.svg", &render::svg(outcome))?;
    }
    Ok(())
}
