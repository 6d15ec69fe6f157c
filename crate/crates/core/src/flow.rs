//! Flow integration in half-plane coordinates.
//!
//! Orbits of `dz/dt = -f(z)` crowd the boundary near `z = 1`, so the flow is
//! always integrated as `dw/dt = φ(w)` in `Π` and mapped back through the
//! Cayley transform for reporting. The integrator is Dormand-Prince 5(4) with
//! the error measured relative to `|w|`, so orbits escaping to infinity keep
//! a bounded step count per decade of growth.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cayley;
use crate::error::{Error, Result};
use crate::generators::{GeneratorSpec, HalfPlaneGenerator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Unbounded when absent.
    #[serde(skip_serializing_if = "is_unbounded", deserialize_with = "unbounded_if_null")]
    pub max_step: f64,
    pub t_max: f64,
}

fn is_unbounded(x: &f64) -> bool {
    x.is_infinite()
}

fn unbounded_if_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            t_max: 1e8,
        }
    }
}

impl FlowConfig {
    /// Tolerances close to the rounding floor, for identity checks.
    pub fn precise() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x < 1e-3;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::Domain(format!(
                "flow tolerances must lie in (0, 1e-3), got rel {} abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::Domain("max_step must be positive".into()));
        }
        Ok(())
    }
}

/// Output times for [`sample_trajectory`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `n` equally spaced times from 0 to `t_max`.
    Linear { t_max: f64, n: usize },
    /// `t0 · ratio^k`, `k = 0..n`.
    Geometric { t0: f64, ratio: f64, n: usize },
    Explicit { times: Vec<f64> },
}

impl Schedule {
    pub fn linear(t_max: f64, n: usize) -> Self {
        Schedule::Linear { t_max, n }
    }

    pub fn geometric(t0: f64, ratio: f64, n: usize) -> Self {
        Schedule::Geometric { t0, ratio, n }
    }

    /// Geometric schedule from `t0` to `t1` with `per_decade` nodes per decade.
    pub fn decades(t0: f64, t1: f64, per_decade: usize) -> Self {
        let n = ((t1 / t0).log10() * per_decade as f64).round() as usize + 1;
        Schedule::Geometric {
            t0,
            ratio: 10f64.powf(1.0 / per_decade as f64),
            n,
        }
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        let times: Vec<f64> = match self {
            Schedule::Linear { t_max, n } => match n {
                0 => vec![],
                1 => vec![*t_max],
                _ => (0..*n).map(|k| t_max * k as f64 / (*n - 1) as f64).collect(),
            },
            Schedule::Geometric { t0, ratio, n } => {
                if !(*t0 > 0.0 && *ratio > 1.0) {
                    return Err(Error::Domain(
                        "geometric schedule needs t0 > 0 and ratio > 1".into(),
                    ));
                }
                (0..*n).map(|k| t0 * ratio.powi(k as i32)).collect()
            }
            Schedule::Explicit { times } => times.clone(),
        };
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0))
            || times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Domain(
                "schedule times must be finite, nonnegative and strictly increasing".into(),
            ));
        }
        Ok(times)
    }
}

/// Samples of one orbit `t ↦ Φ_t(w0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points_w: Vec<Complex64>,
    pub origin_w: Complex64,
    pub gen_id: String,
}

impl Trajectory {
    pub fn points_z(&self) -> Vec<Complex64> {
        self.points_w.iter().map(|w| cayley::to_disk(*w)).collect()
    }

    /// CSV with header `t,re_w,im_w,re_z,im_z`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,re_w,im_w,re_z,im_z")?;
        for (t, w) in self.times.iter().zip(&self.points_w) {
            let z = cayley::to_disk(*w);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t, w.re, w.im, z.re, z.im
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

// Dormand-Prince 5(4) tableau; φ is autonomous so the nodes c_i are unused
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const STEP_FLOOR: f64 = 1e-14;
const OVERFLOW_GUARD: f64 = 1e300;

/// Stateful forward integrator; advancing to successive targets continues
/// one integration without restarting the step-size controller.
pub struct Integrator<'a> {
    gen: &'a HalfPlaneGenerator,
    cfg: FlowConfig,
    t: f64,
    w: Complex64,
    slope: Complex64,
    h: Option<f64>,
    steps: usize,
}

impl<'a> Integrator<'a> {
    pub fn new(gen: &'a HalfPlaneGenerator, w0: Complex64, cfg: FlowConfig) -> Result<Self> {
        cfg.validate()?;
        if !(w0.re > 0.0) || !w0.im.is_finite() || !w0.re.is_finite() {
            return Err(Error::Domain(format!("initial point {w0} is not in the right half-plane")));
        }
        Ok(Self {
            gen,
            cfg,
            t: 0.0,
            w: w0,
            slope: gen.eval(w0),
            h: None,
            steps: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> Complex64 {
        self.w
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps
    }

    fn initial_step(&self) -> f64 {
        let speed = self.slope.norm();
        let scale = self.w.norm().max(1.0);
        if speed == 0.0 {
            1.0
        } else {
            (1e-2 * scale / speed).min(1.0)
        }
    }

    pub fn advance_to(&mut self, target: f64) -> Result<Complex64> {
        if target < self.t {
            return Err(Error::Domain(format!(
                "cannot integrate backwards from t = {} to {}",
                self.t, target
            )));
        }
        if target > self.cfg.t_max {
            return Err(Error::Domain(format!(
                "t = {target} exceeds the configured t_max = {}",
                self.cfg.t_max
            )));
        }
        let mut h = self.h.unwrap_or_else(|| self.initial_step());
        while self.t < target {
            let remaining = target - self.t;
            let floor = STEP_FLOOR * self.t.max(1.0);
            if remaining <= floor {
                self.t = target;
                break;
            }
            let mut step = h.min(self.cfg.max_step);
            let clamped = step >= remaining;
            if clamped {
                step = remaining;
            }
            let (w_new, slope_new, err) = self.try_step(step);
            if err <= 1.0 && w_new.re.is_finite() && w_new.im.is_finite() {
                self.t = if clamped { target } else { self.t + step };
                self.w = w_new;
                self.slope = slope_new;
                self.steps += 1;
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // a step shortened to hit the target says nothing about h
                h = if clamped { h.max(step * factor) } else { step * factor };
            } else {
                let factor = if err.is_finite() {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0)
                } else {
                    MIN_FACTOR
                };
                h = step * factor;
                if !(self.w.norm() < OVERFLOW_GUARD) || (!w_new.norm().is_finite() && self.w.norm() > 1e250) {
                    return Err(Error::Domain(format!(
                        "orbit leaves the representable range near t = {} (|w| = {:e})",
                        self.t,
                        self.w.norm()
                    )));
                }
                if h < floor {
                    return Err(Error::StepFailure { t: self.t, h });
                }
            }
        }
        self.h = Some(h);
        Ok(self.w)
    }

    fn try_step(&self, h: f64) -> (Complex64, Complex64, f64) {
        let phi = |w: Complex64| self.gen.eval(w);
        let w = self.w;
        let k1 = self.slope;
        let k2 = phi(w + h * A21 * k1);
        let k3 = phi(w + h * (A31 * k1 + A32 * k2));
        let k4 = phi(w + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = phi(w + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = phi(w + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let w_new = w + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = phi(w_new);
        let err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let scale = self.cfg.abs_tol + self.cfg.rel_tol * w.norm().max(w_new.norm());
        (w_new, k7, err_vec.norm() / scale)
    }
}

/// `Φ_t(w0)`.
pub fn evolve(gen: &HalfPlaneGenerator, w0: Complex64, t: f64, cfg: FlowConfig) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time t = {t} must be nonnegative")));
    }
    Integrator::new(gen, w0, cfg)?.advance_to(t)
}

/// `F_t(z0) = C^{-1}(Φ_t(C(z0)))`.
pub fn evolve_disk(gen: &GeneratorSpec, z0: Complex64, t: f64, cfg: FlowConfig) -> Result<Complex64> {
    if !(z0.norm() < 1.0) {
        return Err(Error::Domain(format!("|z0| = {} is not < 1", z0.norm())));
    }
    let w = evolve(&gen.to_halfplane(), cayley::to_halfplane(z0), t, cfg)?;
    Ok(cayley::to_disk(w))
}

/// Samples `Φ_t(w0)` at the schedule times from one continuous integration.
pub fn sample_trajectory(
    gen: &HalfPlaneGenerator,
    w0: Complex64,
    schedule: &Schedule,
    cfg: FlowConfig,
) -> Result<Trajectory> {
    let times = schedule.times()?;
    let mut integ = Integrator::new(gen, w0, cfg)?;
    let mut points = Vec::with_capacity(times.len());
    for &t in &times {
        points.push(integ.advance_to(t)?);
    }
    Ok(Trajectory {
        times,
        points_w: points,
        origin_w: w0,
        gen_id: gen.id().to_string(),
    })
}

/// `|Φ_{t+s}(w0) - Φ_t(Φ_s(w0))|`.
pub fn semigroup_residual(
    gen: &HalfPlaneGenerator,
    w0: Complex64,
    t: f64,
    s: f64,
    cfg: FlowConfig,
) -> Result<f64> {
    if !(t >= 0.0 && s >= 0.0) {
        return Err(Error::Domain("times must be nonnegative".into()));
    }
    let direct = evolve(gen, w0, t + s, cfg)?;
    let inner = evolve(gen, w0, s, cfg)?;
    let composed = evolve(gen, inner, t, cfg)?;
    Ok((direct - composed).norm())
}
