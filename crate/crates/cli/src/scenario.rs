//! Scenario documents: what to compute, for which generators and points, and
//! which results to check.

use std::fmt;
use std::path::Path;

use diskflow::rigidity::Coordinates;
use diskflow::{FlowConfig, GeneratorDescriptor, Schedule};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Trajectory,
    Slope,
    Curvature,
    Asymptote,
    Expansion,
    Rigidity,
    FullReport,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Trajectory => "trajectory",
            Task::Slope => "slope",
            Task::Curvature => "curvature",
            Task::Asymptote => "asymptote",
            Task::Expansion => "expansion",
            Task::Rigidity => "rigidity",
            Task::FullReport => "full-report",
        }
    }
}

/// One check against the report document, addressed by a JSON pointer.
///
/// Exactly one of `value` (with `tol`), `equals`, `below`, `above` is given.
/// `below`/`above` compare the modulus when the target is a `[re, im]` pair.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub path: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub value: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub equals: Option<Value>,
    #[serde(default)]
    pub below: Option<f64>,
    #[serde(default)]
    pub above: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub generator: Option<GeneratorDescriptor>,
    #[serde(default)]
    pub generators: Vec<GeneratorDescriptor>,
    /// Disk points, or half-plane points for rigidity in `half_plane` coordinates.
    pub initial_points: Vec<Complex64>,
    pub task: Task,
    #[serde(default)]
    pub schedule: Option<Schedule>,
    /// Flow horizon: trajectory end time and upper limit of the improper integrals.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub flow: Option<FlowConfig>,
    #[serde(default)]
    pub coordinates: Option<Coordinates>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub expectations: Vec<Expectation>,
}

/// Malformed or semantically invalid scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string(), default_name(path))
    }

    /// Parses `text`; `origin` prefixes error messages.
    pub fn parse(text: &str, origin: &str, fallback_name: String) -> Result<Self, InputError> {
        let mut sc: Scenario = serde_json::from_str(text).map_err(|e| InputError(located(text, origin, &e)))?;
        if sc.name.is_none() {
            sc.name = Some(fallback_name);
        }
        sc.validate().map_err(|m| InputError(format!("{origin}: {m}")))?;
        Ok(sc)
    }

    fn validate(&mut self) -> Result<(), String> {
        if let Some(g) = self.generator.take() {
            if !self.generators.is_empty() {
                return Err("give either `generator` or `generators`, not both".into());
            }
            self.generators.push(g);
        }
        if self.generators.is_empty() {
            return Err("no generator given".into());
        }
        if self.initial_points.is_empty() {
            return Err("at least one initial point is required".into());
        }
        if self.task == Task::Rigidity && self.generators.len() != 2 {
            return Err(format!(
                "rigidity needs exactly two generators, got {}",
                self.generators.len()
            ));
        }
        if self.coordinates.is_some() && self.task != Task::Rigidity {
            return Err("`coordinates` applies to rigidity scenarios only".into());
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("t_max must be positive and finite, got {t}"));
            }
        }
        let name = self.name();
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(format!("scenario name {name:?} is not usable as a directory name"));
        }
        for (k, e) in self.expectations.iter().enumerate() {
            let kinds = [e.value.is_some(), e.equals.is_some(), e.below.is_some(), e.above.is_some()];
            if kinds.iter().filter(|b| **b).count() != 1 {
                return Err(format!(
                    "expectation {k} ({}) needs exactly one of value, equals, below, above",
                    e.path
                ));
            }
            if e.value.is_some() != e.tol.is_some() {
                return Err(format!("expectation {k} ({}): `value` and `tol` go together", e.path));
            }
            if !(e.path.is_empty() || e.path.starts_with('/')) {
                return Err(format!("expectation {k}: path {:?} is not a JSON pointer", e.path));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("scenario")
    }
}

fn default_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into())
}

/// `origin:line:col: message` followed by the offending line and a caret.
fn located(text: &str, origin: &str, e: &serde_json::Error) -> String {
    let (line, col) = (e.line(), e.column());
    let mut msg = format!("{origin}:{line}:{col}: {e}");
    if line == 0 {
        return msg;
    }
    if let Some(src) = text.lines().nth(line - 1) {
        let gutter = line.to_string();
        msg.push_str(&format!("\n {gutter} | {src}\n {} | {}^", " ".repeat(gutter.len()), " ".repeat(col.saturating_sub(1))));
    }
    msg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_error_carries_line_and_caret() {
        let text = "{\n  \"task\": \"slope\",\n  \"initial_points\": [[0, 0]]\n  \"generator\": {\"a\": 1}\n}";
        let err = Scenario::parse(text, "s.json", "s".into()).unwrap_err().0;
        assert!(err.starts_with("s.json:4:"), "{err}");
        assert!(err.contains("\"generator\""), "{err}");
        assert!(err.contains('^'));
    }

    #[test]
    fn unknown_task_is_rejected() {
        let text = r#"{"generator": {"a": 1}, "initial_points": [[0,0]], "task": "spin"}"#;
        let err = Scenario::parse(text, "s.json", "s".into()).unwrap_err().0;
        assert!(err.contains("spin"), "{err}");
    }

    #[test]
    fn rigidity_needs_two_generators() {
        let text = r#"{"generator": {"b": [-0.5, 0]}, "initial_points": [[0,0]], "task": "rigidity"}"#;
        let err = Scenario::parse(text, "s.json", "s".into()).unwrap_err().0;
        assert!(err.contains("exactly two"), "{err}");
    }

    #[test]
    fn empty_points_rejected() {
        let text = r#"{"generator": {"a": 1}, "initial_points": [], "task": "slope"}"#;
        assert!(Scenario::parse(text, "s.json", "s".into()).is_err());
    }

    #[test]
    fn expectation_kinds_are_exclusive() {
        let text = r#"{"generator": {"a": 1}, "initial_points": [[0,0]], "task": "slope",
            "expectations": [{"path": "/x", "value": 1, "tol": 0.1, "below": 2}]}"#;
        assert!(Scenario::parse(text, "s.json", "s".into()).is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let text = r#"{"generator": {"a": 1}, "initial_points": [[0,0]], "task": "full-report"}"#;
        let sc = Scenario::parse(text, "s.json", "fallback".into()).unwrap();
        assert_eq!(sc.name(), "fallback");
        assert_eq!(sc.generators.len(), 1);
        assert_eq!(sc.task, Task::FullReport);
        assert_eq!(sc.seed, 0);
    }
}
