//! Trajectory curvature, limit curvature and slope.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::DiskCircle;
use crate::cayley;
use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::flow::{self, FlowConfig, Schedule};
use crate::generators::{GeneratorClass, GeneratorSpec};
use crate::koenigs::KoenigsEngine;

/// `Im(b·conj(B))` at or below this value means a zero-curvature limit line.
pub const ZERO_CURVATURE_TOL: f64 = 1e-12;

/// Signed curvature of the orbit of `dz/dt = -f(z)` at `z`:
/// `κ = Im(z̈·conj(ż))/|ż|^3 = -Im f'(z)/|f(z)|`.
pub fn curvature_at(gen: &GeneratorSpec, z: Complex64) -> Result<f64> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("|z| = {} is not < 1", z.norm())));
    }
    curvature_from_offset(gen, z - 1.0)
}

/// Same as [`curvature_at`] at `z = C^{-1}(w)`, without forming `z`.
pub fn curvature_at_halfplane(gen: &GeneratorSpec, w: Complex64) -> Result<f64> {
    if !(w.re > 0.0) {
        return Err(Error::Domain(format!("Re w = {} is not > 0", w.re)));
    }
    curvature_from_offset(gen, cayley::disk_offset(w))
}

fn curvature_from_offset(gen: &GeneratorSpec, delta: Complex64) -> Result<f64> {
    let f = gen.f_at_offset(delta);
    if f.norm() == 0.0 {
        return Err(Error::Domain("f vanishes: the orbit is a fixed point".into()));
    }
    Ok(-gen.f_prime_at_offset(delta).im / f.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitCurvatureEstimate {
    Finite {
        /// `|κ|` at the limit.
        value: f64,
        signed: f64,
        error: f64,
    },
    Divergent {
        /// `|κ|` at the last three decade marks, oldest first.
        decade_values: Vec<f64>,
    },
}

impl LimitCurvatureEstimate {
    pub fn is_divergent(&self) -> bool {
        matches!(self, LimitCurvatureEstimate::Divergent { .. })
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self {
            LimitCurvatureEstimate::Finite { value, .. } => Some(*value),
            LimitCurvatureEstimate::Divergent { .. } => None,
        }
    }
}

/// Sampling used by [`limit_curvature_numeric`] when the caller has no
/// preference: hyperbolic orbits settle exponentially fast, parabolic ones
/// algebraically, so the latter run to `s = 10^6`.
pub fn default_curvature_schedule(gen: &GeneratorSpec) -> Schedule {
    match gen.classify() {
        GeneratorClass::Hyperbolic => Schedule::decades(1e-2, 40.0 / gen.taylor().a, 8),
        GeneratorClass::Parabolic => Schedule::decades(1.0, 1e6, 4),
    }
}

/// Limit of the orbit curvature `κ(z0, s)` as `s → ∞`.
///
/// The orbit is sampled on `schedule`; `Divergent` is declared when `|κ|`
/// grows monotonically across the last three decades of `s` without its
/// per-decade increments shrinking by more than a factor of two. Otherwise
/// the samples are Richardson-extrapolated (geometric schedules) or the last
/// sample is reported.
pub fn limit_curvature_numeric(
    gen: &GeneratorSpec,
    z0: Complex64,
    schedule: &Schedule,
    cfg: FlowConfig,
) -> Result<LimitCurvatureEstimate> {
    if !(z0.norm() < 1.0) {
        return Err(Error::Domain(format!("|z0| = {} is not < 1", z0.norm())));
    }
    let traj = flow::sample_trajectory(&gen.to_halfplane(), cayley::to_halfplane(z0), schedule, cfg)?;
    let times = &traj.times;
    let kappa = traj
        .points_w
        .iter()
        .map(|w| curvature_at_halfplane(gen, *w))
        .collect::<Result<Vec<f64>>>()?;
    if kappa.is_empty() {
        return Err(Error::Domain("empty schedule".into()));
    }

    if let Some(marks) = decade_marks(times) {
        let m: Vec<f64> = marks.iter().map(|&k| kappa[k].abs()).collect();
        let inc: Vec<f64> = m.windows(2).map(|p| p[1] - p[0]).collect();
        let monotone = inc.iter().all(|d| *d > 0.0);
        let sustained = inc.windows(2).all(|p| p[1] > 0.5 * p[0]);
        if monotone && sustained {
            return Ok(LimitCurvatureEstimate::Divergent {
                decade_values: m[1..].to_vec(),
            });
        }
    }

    let n = kappa.len();
    let tail = n.min(8);
    let ratio = geometric_ratio(&times[n - tail..]);
    let (signed, error) = match ratio {
        Some(r) if tail >= 3 => {
            let est = richardson(&kappa[n - tail..], r, 1.0).expect("non-empty");
            (est.value, est.error)
        }
        _ => {
            let err = if n >= 2 { (kappa[n - 1] - kappa[n - 2]).abs() } else { f64::INFINITY };
            (kappa[n - 1], err)
        }
    };
    Ok(LimitCurvatureEstimate::Finite {
        value: signed.abs(),
        signed,
        error,
    })
}

/// Indices of the samples nearest (in log scale) to `s_end·10^{-3..=0}`.
fn decade_marks(times: &[f64]) -> Option<[usize; 4]> {
    let end = *times.last()?;
    let start = times.iter().copied().find(|t| *t > 0.0)?;
    if end / start < 999.0 {
        return None;
    }
    let nearest = |target: f64| {
        times
            .iter()
            .enumerate()
            .filter(|(_, t)| **t > 0.0)
            .min_by(|a, b| {
                let da = (a.1 / target).ln().abs();
                let db = (b.1 / target).ln().abs();
                da.total_cmp(&db)
            })
            .map(|(i, _)| i)
            .unwrap()
    };
    Some([
        nearest(end * 1e-3),
        nearest(end * 1e-2),
        nearest(end * 1e-1),
        times.len() - 1,
    ])
}

fn geometric_ratio(times: &[f64]) -> Option<f64> {
    if times.len() < 2 || times[0] <= 0.0 {
        return None;
    }
    let r = times[1] / times[0];
    let consistent = times
        .windows(2)
        .all(|w| ((w[1] / w[0]) / r - 1.0).abs() < 1e-9);
    (consistent && r > 1.0).then_some(r)
}

/// Limit curvature circle of a hyperbolic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicCircle {
    pub circle: DiskCircle,
    /// `B = exp(a(h(z0) - i lim Im h(r)))`.
    pub big_b: Complex64,
    /// `Im(b·conj(B))`; zero iff the limit curvature is zero.
    pub im_b_conj_big_b: f64,
}

/// The circle `|1-z|^2 Im(b·conj(B)) + a Im((1-z)B) = 0`.
pub fn hyperbolic_limit_circle(engine: &KoenigsEngine, z0: Complex64) -> Result<HyperbolicCircle> {
    if engine.class() != GeneratorClass::Hyperbolic {
        return Err(Error::Class("limit circle formula needs a hyperbolic generator".into()));
    }
    let t = engine.generator().taylor();
    let limit = engine.boundary_imag_limit()?.value;
    let big_b = (t.a * (engine.koenigs_h(z0)? - Complex64::new(0.0, limit))).exp();
    Ok(HyperbolicCircle {
        circle: DiskCircle::from_hyperbolic_equation(t.a, t.b, big_b, ZERO_CURVATURE_TOL),
        big_b,
        im_b_conj_big_b: (t.b * big_b.conj()).im,
    })
}

/// `lim_{t→∞} arg(1 - F_t(z0))`.
///
/// Hyperbolic: `a [lim_{r→1⁻} Im h(r) - Im h(z0)]`. Parabolic: the direction
/// of `1 - F_t ≈ -1/(b t)`, i.e. `-arg(-b)`; this is `-arg b` taken modulo `π`
/// and lies in `[-π/2, π/2]` because `Re(1 - z) > 0` on the disk.
pub fn slope(engine: &KoenigsEngine, z0: Complex64) -> Result<f64> {
    let t = engine.generator().taylor();
    match engine.class() {
        GeneratorClass::Hyperbolic => {
            let limit = engine.boundary_imag_limit()?.value;
            Ok(t.a * (limit - engine.koenigs_h(z0)?.im))
        }
        GeneratorClass::Parabolic => {
            if t.b == Complex64::new(0.0, 0.0) {
                return Err(Error::Class("parabolic slope needs b ≠ 0".into()));
            }
            Ok(-(-t.b).arg())
        }
    }
}

/// `arg(1 - F_t(z0))` at finite `t`, computed as `-arg(Φ_t + 1)`.
pub fn measured_slope(gen: &GeneratorSpec, z0: Complex64, t: f64, cfg: FlowConfig) -> Result<f64> {
    if !(z0.norm() < 1.0) {
        return Err(Error::Domain(format!("|z0| = {} is not < 1", z0.norm())));
    }
    let w = flow::evolve(&gen.to_halfplane(), cayley::to_halfplane(z0), t, cfg)?;
    Ok(-(w + 1.0).arg())
}
