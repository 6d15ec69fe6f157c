//! Runs a scenario's task and collects the report document and plot data.

use diskflow::asymptotics::{
    asymptote_halfplane, build_report, default_curvature_schedule, expansion_residuals, hyperbolic_limit_circle,
    limit_curvature_numeric, parabolic_limit_curvature, shift_class, slope_report, AOptions, AsymptoteEstimate,
    DiskCircle, ParabolicCurvature, ReportOptions,
};
use diskflow::flow::sample_trajectory;
use diskflow::koenigs::KoenigsEngine;
use diskflow::rigidity::{rigidity_discriminant, rigidity_discriminant_halfplane, Coordinates, RigidityOptions};
use diskflow::{cayley, Error, FlowConfig, GeneratorClass, GeneratorSpec, Schedule, Trajectory};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::scenario::{Scenario, Task};

/// Command-line overrides.
#[derive(Debug, Clone, Copy, Default)]
pub struct Settings {
    pub tol: Option<f64>,
    pub t_max: Option<f64>,
}

#[derive(Debug)]
pub enum RunError {
    /// Bad generator, point, option or task/generator mismatch.
    Input(String),
    /// Valid input on which a computation failed.
    Numeric(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Admissibility { .. }
            | Error::Degenerate(_)
            | Error::Domain(_)
            | Error::Class(_)
            | Error::Hypothesis(_)
            | Error::Descriptor(_) => RunError::Input(e.to_string()),
            Error::StepFailure { .. } | Error::QuadratureFailure { .. } | Error::NonConvergence(_) => {
                RunError::Numeric(e.to_string())
            }
        }
    }
}

pub struct Orbit {
    pub generator: usize,
    pub point: usize,
    pub trajectory: Trajectory,
    /// Points of the orbit with the unit direction of `-f` there.
    pub tangents: Vec<(Complex64, Complex64)>,
}

impl Orbit {
    pub fn csv_name(&self) -> String {
        format!("trajectory_{}_{}.csv", self.generator, self.point)
    }
}

pub struct Outcome {
    /// Report document without the `checks` section.
    pub report: Value,
    pub orbits: Vec<Orbit>,
    pub overlays: Vec<DiskCircle>,
    /// Pass-through documents written next to the report, `(file, contents)`.
    pub extra_files: Vec<(String, String)>,
}

const TANGENTS_PER_ORBIT: usize = 6;
const UNIVALENCE_SAMPLES: usize = 24;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize to JSON")
}

pub fn execute(sc: &Scenario, settings: Settings) -> Result<Outcome, RunError> {
    let gens = sc
        .generators
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let spec = GeneratorSpec::from_descriptor(d)?;
            Ok(match &d.name {
                Some(_) => spec,
                None => spec.named(format!("g{i}")),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut flow = sc.flow.unwrap_or(match sc.task {
        Task::Rigidity => FlowConfig::precise(),
        _ => FlowConfig::default(),
    });
    if let Some(tol) = settings.tol {
        flow.rel_tol = tol;
        flow.abs_tol = tol * 1e-2;
    }
    let horizon = settings.t_max.or(sc.t_max);
    if let Some(h) = horizon {
        if !(h.is_finite() && h > 0.0) {
            return Err(RunError::Input(format!("t_max must be positive and finite, got {h}")));
        }
        flow.t_max = flow.t_max.max(h);
    }
    flow.validate()?;
    let mut a_opts = AOptions::default();
    if let Some(h) = horizon {
        a_opts.t_max = h;
    }
    let shift_t_max = horizon.unwrap_or(1e6);

    let halfplane_points = sc.task == Task::Rigidity && sc.coordinates == Some(Coordinates::HalfPlane);
    let mut orbits = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        let schedule = match &sc.schedule {
            Some(s) => s.clone(),
            None => default_schedule(g, horizon),
        };
        let hp = g.to_halfplane();
        for (k, p) in sc.initial_points.iter().enumerate() {
            let w0 = if halfplane_points {
                *p
            } else {
                if !(p.norm() < 1.0) {
                    return Err(RunError::Input(format!("initial point {k} = {p} is not in the disk")));
                }
                cayley::to_halfplane(*p)
            };
            let trajectory = sample_trajectory(&hp, w0, &schedule, flow)?;
            let tangents = tangents(g, &trajectory);
            orbits.push(Orbit {
                generator: gi,
                point: k,
                trajectory,
                tangents,
            });
        }
    }

    let engines: Vec<KoenigsEngine> = gens.iter().cloned().map(KoenigsEngine::new).collect();
    let report_opts = ReportOptions {
        flow,
        a: a_opts,
        shift_t_max,
        ..ReportOptions::default()
    };
    let mut results = Vec::new();
    let mut overlays = Vec::new();
    let mut extra_files = Vec::new();

    if sc.task == Task::Rigidity {
        let opts = RigidityOptions {
            flow,
            a: a_opts,
            ..RigidityOptions::default()
        };
        for (k, p) in sc.initial_points.iter().enumerate() {
            let verdict = if halfplane_points {
                rigidity_discriminant_halfplane(&gens[0].to_halfplane(), &gens[1].to_halfplane(), *p, &opts)?
            } else {
                rigidity_discriminant(&gens[0], &gens[1], *p, &opts)?
            };
            extra_files.push((format!("verdict_{k}.json"), verdict.to_json()));
            results.push(to_value(&verdict));
        }
    } else {
        for (gi, engine) in engines.iter().enumerate() {
            let g = engine.generator();
            for (k, &z0) in sc.initial_points.iter().enumerate() {
                let w0 = cayley::to_halfplane(z0);
                let mut r = Map::new();
                r.insert("generator".into(), json!(g.id()));
                r.insert("point_index".into(), json!(k));
                r.insert("z0".into(), to_value(&z0));
                r.insert("class".into(), to_value(&engine.class()));
                match sc.task {
                    Task::Trajectory => {
                        let orbit = orbits
                            .iter()
                            .find(|o| o.generator == gi && o.point == k)
                            .expect("every generator/point pair has an orbit");
                        let traj = &orbit.trajectory;
                        let w_final = *traj.points_w.last().unwrap_or(&w0);
                        r.insert("w0".into(), to_value(&w0));
                        r.insert("samples".into(), json!(traj.times.len()));
                        r.insert("t_final".into(), json!(traj.times.last().copied().unwrap_or(0.0)));
                        r.insert("w_final".into(), to_value(&w_final));
                        r.insert("z_final".into(), to_value(&cayley::to_disk(w_final)));
                        r.insert("csv".into(), json!(orbit.csv_name()));
                    }
                    Task::Slope => {
                        r.insert("slope".into(), to_value(&slope_report(engine, z0, &report_opts)?));
                    }
                    Task::Curvature => {
                        let numeric = limit_curvature_numeric(g, z0, &default_curvature_schedule(g), flow)?;
                        r.insert("numeric".into(), to_value(&numeric));
                        let (value, circle, closed) = match engine.class() {
                            GeneratorClass::Hyperbolic => {
                                let hc = hyperbolic_limit_circle(engine, z0)?;
                                (Some(hc.circle.curvature()), Some(hc.circle), to_value(&hc))
                            }
                            GeneratorClass::Parabolic => {
                                let pc = parabolic_limit_curvature(engine, z0, a_opts, flow)?;
                                match &pc {
                                    ParabolicCurvature::Finite { value, circle, .. } => {
                                        (Some(*value), Some(*circle), to_value(&pc))
                                    }
                                    ParabolicCurvature::Infinite { .. } => (None, None, to_value(&pc)),
                                }
                            }
                        };
                        r.insert("limit_curvature".into(), json!(value));
                        r.insert("finite".into(), json!(value.is_some()));
                        r.insert("limit_circle".into(), to_value(&circle));
                        r.insert("closed_form".into(), closed);
                        let shift = match engine.class() {
                            GeneratorClass::Parabolic => Some(shift_class(engine.halfplane(), w0, shift_t_max, flow)?),
                            GeneratorClass::Hyperbolic => None,
                        };
                        r.insert("shift_class".into(), to_value(&shift.as_ref().map(|s| s.class)));
                        r.insert("shift".into(), to_value(&shift));
                        overlays.extend(circle);
                    }
                    Task::Asymptote => {
                        let est = asymptote_halfplane(engine, w0, a_opts, flow)?;
                        let circle = est.line().map(|l| l.pullback_to_disk());
                        r.insert("w0".into(), to_value(&w0));
                        r.insert("asymptote".into(), to_value(&est));
                        r.insert("present".into(), json!(matches!(est, AsymptoteEstimate::Line { .. })));
                        r.insert("limit_circle".into(), to_value(&circle));
                        overlays.extend(circle);
                    }
                    Task::Expansion => {
                        let log = expansion_residuals(engine, z0, &report_opts.expansion_grid, a_opts, flow)?;
                        let last: Map<String, Value> = log
                            .channels
                            .iter()
                            .map(|c| (c.name.clone(), json!(c.last_magnitude())))
                            .collect();
                        r.insert("last_magnitudes".into(), Value::Object(last));
                        r.insert("expansion".into(), to_value(&log));
                    }
                    Task::FullReport => {
                        let report = build_report(engine, z0, &report_opts)?;
                        overlays.extend(report.limit_circle);
                        let Value::Object(fields) = to_value(&report) else {
                            unreachable!("reports serialize to objects")
                        };
                        r.extend(fields);
                        r.insert("point_index".into(), json!(k));
                        let margin = engine.univalence_margin(UNIVALENCE_SAMPLES, 0.9, sc.seed)?;
                        r.insert("univalence_margin".into(), json!(margin));
                    }
                    Task::Rigidity => unreachable!("handled above"),
                }
                results.push(Value::Object(r));
            }
        }
    }

    let mut report = Map::new();
    report.insert("scenario".into(), json!(sc.name()));
    if let Some(d) = &sc.description {
        report.insert("description".into(), json!(d));
    }
    report.insert("task".into(), json!(sc.task.name()));
    report.insert("seed".into(), json!(sc.seed));
    report.insert(
        "settings".into(),
        json!({ "flow": to_value(&flow), "t_max": horizon }),
    );
    let descriptors: Vec<Value> = gens
        .iter()
        .map(|g| {
            let mut d = g.descriptor();
            d.name = Some(g.id().to_string());
            to_value(&d)
        })
        .collect();
    report.insert("generators".into(), Value::Array(descriptors));
    report.insert("results".into(), Value::Array(results));

    Ok(Outcome {
        report: Value::Object(report),
        orbits,
        overlays,
        extra_files,
    })
}

/// `0` followed by 16 geometric nodes per decade from `10^-2` to the horizon
/// (`30/a` for hyperbolic generators, `10^4` for parabolic ones by default),
/// ending exactly at the horizon.
fn default_schedule(g: &GeneratorSpec, horizon: Option<f64>) -> Schedule {
    let end = horizon.unwrap_or(match g.classify() {
        GeneratorClass::Hyperbolic => 30.0 / g.taylor().a,
        GeneratorClass::Parabolic => 1e4,
    });
    let start = 1e-2f64.min(end / 10.0);
    let n = ((end / start).log10() * 16.0).ceil().max(1.0) as usize;
    let mut times = vec![0.0];
    times.extend((0..n).map(|k| start * (end / start).powf(k as f64 / n as f64)));
    times.push(end);
    Schedule::Explicit { times }
}

fn tangents(g: &GeneratorSpec, traj: &Trajectory) -> Vec<(Complex64, Complex64)> {
    let n = traj.points_w.len();
    if n < 2 {
        return Vec::new();
    }
    let picks = TANGENTS_PER_ORBIT.min(n - 1);
    (1..=picks)
        .filter_map(|j| {
            let w = traj.points_w[j * (n - 1) / picks];
            let v = -g.f_at_offset(cayley::disk_offset(w));
            let norm = v.norm();
            (norm.is_finite() && norm > 0.0).then(|| (cayley::to_disk(w), v / norm))
        })
        .collect()
}
