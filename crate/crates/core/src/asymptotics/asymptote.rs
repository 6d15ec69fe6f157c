//! Half-plane asymptotes, the constant `A`, the disk constant `C`, and the
//! finite/infinite shift test.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::{AsymptoteLine, DiskCircle};
use crate::cayley;
use crate::error::{Error, Result};
use crate::extrapolate::{linear_fit, LinearFit};
use crate::flow::{self, FlowConfig, Integrator, Schedule};
use crate::generators::{GeneratorClass, HalfPlaneGenerator};
use crate::koenigs::KoenigsEngine;
use crate::quadrature::{gk15_apply, gk15_nodes};

/// `|Im(γ/β²)|` at or below this value selects the asymptote branch.
pub const LOG_RATE_ZERO_TOL: f64 = 1e-12;

const PANELS_PER_OCTAVE: usize = 4;
const UNIT_PANELS: usize = 4;

/// `∫_0^T g(s, Φ_s(w0)) ds` plus a fitted tail `∫_T^∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowIntegral {
    pub value: Complex64,
    /// Quadrature error on `[0, T]` plus the tail-model uncertainty.
    pub error: f64,
    pub tail: Complex64,
    pub t_max: f64,
}

fn panel_edges(t_max: f64) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=UNIT_PANELS).map(|k| k as f64 / UNIT_PANELS as f64).collect();
    if t_max <= 1.0 {
        edges.retain(|e| *e < t_max);
        edges.push(t_max);
        return edges;
    }
    let ratio = 2f64.powf(1.0 / PANELS_PER_OCTAVE as f64);
    let mut e = ratio;
    while e < t_max * (1.0 - 1e-12) {
        edges.push(e);
        e *= ratio;
    }
    edges.push(t_max);
    edges
}

/// Tail of `∫ s^{-p}(c_0 + c_1 log s)` from `t` to infinity, with the
/// coefficients fitted to the samples in `window`.
fn fitted_tail(samples: &[(f64, Complex64)], window: (f64, f64), p: f64, t: f64) -> Option<Complex64> {
    let pts: Vec<&(f64, Complex64)> = samples
        .iter()
        .filter(|(s, _)| *s >= window.0 && *s <= window.1)
        .collect();
    if pts.len() < 4 {
        return None;
    }
    // normal equations in the real basis {s^{-p}, s^{-p} log s}
    let (mut a11, mut a12, mut a22) = (0.0, 0.0, 0.0);
    let (mut r1, mut r2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (s, g) in pts {
        // weight by s^p so every sample counts equally
        let (u, v) = (1.0, s.ln());
        let y = g * s.powf(p);
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        r1 += y * u;
        r2 += y * v;
    }
    let det = a11 * a22 - a12 * a12;
    if det.abs() <= 1e-14 * a11 * a22 {
        return None;
    }
    let c0 = (r1 * a22 - r2 * a12) / det;
    let c1 = (r2 * a11 - r1 * a12) / det;
    let q = p - 1.0;
    let base = t.powf(-q);
    Some(base * (c0 / q + c1 * (t.ln() / q + 1.0 / (q * q))))
}

/// Integrates `g(s, Φ_s(w0))` along one continuous orbit. `decay` is the
/// exponent `p > 1` of the assumed tail `O(log s / s^p)`.
pub fn flow_integral<G: FnMut(f64, Complex64) -> Complex64>(
    gen: &HalfPlaneGenerator,
    w0: Complex64,
    t_max: f64,
    decay: f64,
    cfg: FlowConfig,
    mut g: G,
) -> Result<FlowIntegral> {
    if !(t_max > 10.0) {
        return Err(Error::Domain(format!("integration horizon {t_max} must exceed 10")));
    }
    if !(decay > 1.0) {
        return Err(Error::Domain(format!("tail decay exponent {decay} must exceed 1")));
    }
    let cfg = FlowConfig {
        t_max: cfg.t_max.max(t_max),
        ..cfg
    };
    let edges = panel_edges(t_max);
    let mut integ = Integrator::new(gen, w0, cfg)?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0;
    let mut samples = Vec::with_capacity(15 * edges.len());
    for pair in edges.windows(2) {
        let nodes = gk15_nodes(pair[0], pair[1]);
        let mut vals = [Complex64::new(0.0, 0.0); 15];
        for (k, s) in nodes.iter().enumerate() {
            let w = integ.advance_to(*s)?;
            vals[k] = g(*s, w);
            samples.push((*s, vals[k]));
        }
        let (v, e) = gk15_apply(&vals, pair[0], pair[1]);
        value += v;
        quad_err += e;
    }
    let last = fitted_tail(&samples, (t_max / 10.0, t_max), decay, t_max);
    let prev = fitted_tail(&samples, (t_max / 100.0, t_max / 10.0), decay, t_max);
    let (tail, tail_err) = match (last, prev) {
        (Some(a), Some(b)) => (a, (a - b).norm()),
        (Some(a), None) => (a, a.norm()),
        _ => {
            return Err(Error::NonConvergence(
                "too few samples to model the integral tail".into(),
            ))
        }
    };
    Ok(FlowIntegral {
        value: value + tail,
        error: quad_err + tail_err,
        tail,
        t_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AOptions {
    pub t_max: f64,
    pub tol: f64,
}

impl Default for AOptions {
    fn default() -> Self {
        Self { t_max: 1e6, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantA {
    /// Half-plane constant `A = H(1)`.
    pub value: Complex64,
    pub error: f64,
    /// Disk counterpart `(A + 1)/2` appearing in `1/(1 - F_t(z))`.
    pub disk: Complex64,
}

fn require_parabolic_beta(gen: &HalfPlaneGenerator) -> Result<()> {
    if gen.class() != GeneratorClass::Parabolic {
        return Err(Error::Class("expected a parabolic generator".into()));
    }
    if gen.beta == Complex64::new(0.0, 0.0) {
        return Err(Error::Class("β = 0 (b = 0) is outside the parabolic theory".into()));
    }
    Ok(())
}

fn decay_exponent(gen: &HalfPlaneGenerator) -> f64 {
    1.0 + gen.epsilon.min(1.0)
}

/// `A = 1 + ∫_0^∞ (φ(Φ_s(1)) - β - γ/(β(s+1))) ds`.
pub fn estimate_a(gen: &HalfPlaneGenerator, opts: AOptions, cfg: FlowConfig) -> Result<ConstantA> {
    require_parabolic_beta(gen)?;
    let ratio = gen.gamma / gen.beta;
    let integral = flow_integral(gen, Complex64::new(1.0, 0.0), opts.t_max, decay_exponent(gen), cfg, |s, w| {
        gen.remainder(w) - ratio / (s + 1.0)
    })?;
    if !(integral.error <= opts.tol) {
        return Err(Error::NonConvergence(format!(
            "A integral error {:.3e} exceeds the tolerance {:.1e}",
            integral.error, opts.tol
        )));
    }
    let value = 1.0 + integral.value;
    Ok(ConstantA {
        value,
        error: integral.error,
        disk: (value + 1.0) / 2.0,
    })
}

/// `|β|² Im(γ/β²)`: growth rate of `Im(Φ_t · conj(β))` against `log(t+1)`.
pub fn log_rate(gen: &HalfPlaneGenerator) -> f64 {
    gen.beta.norm_sqr() * (gen.gamma / (gen.beta * gen.beta)).im
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AsymptoteEstimate {
    Line {
        line: AsymptoteLine,
        /// `B`: complex `exp(α(σ(w0) - i lim Im σ))` when hyperbolic; the
        /// real offset of `Im(w·conj(β)) = B` (imaginary part 0) when parabolic.
        big_b: Complex64,
        error: f64,
    },
    Absent {
        /// Coefficient of `log(t+1)` in `Im(Φ_t · conj(β))`.
        log_rate: f64,
    },
}

impl AsymptoteEstimate {
    pub fn line(&self) -> Option<&AsymptoteLine> {
        match self {
            AsymptoteEstimate::Line { line, .. } => Some(line),
            AsymptoteEstimate::Absent { .. } => None,
        }
    }
}

/// Asymptote of the orbit of `w0`.
///
/// Hyperbolic: `Im[(αw + β) conj(B)] = 0`. Parabolic: absent when
/// `Im(γ/β²) ≠ 0`, otherwise `Im(w·conj(β)) = |β|² Im σ(w0) + Im(conj(β) A)`.
pub fn asymptote_halfplane(
    engine: &KoenigsEngine,
    w0: Complex64,
    opts: AOptions,
    cfg: FlowConfig,
) -> Result<AsymptoteEstimate> {
    if !(w0.re > 0.0) {
        return Err(Error::Domain(format!("Re w0 = {} is not > 0", w0.re)));
    }
    let gen = engine.halfplane();
    match gen.class() {
        GeneratorClass::Hyperbolic => {
            let limit = engine.boundary_imag_limit()?;
            let big_b = (gen.alpha * (engine.sigma(w0)? - Complex64::new(0.0, limit.value))).exp();
            let line = AsymptoteLine::from_equation(gen.alpha * big_b, -(gen.beta * big_b.conj()).im);
            Ok(AsymptoteEstimate::Line {
                line,
                big_b,
                error: gen.alpha * limit.error * (1.0 + line.offset().abs()),
            })
        }
        GeneratorClass::Parabolic => {
            require_parabolic_beta(gen)?;
            let rate = log_rate(gen);
            if (gen.gamma / (gen.beta * gen.beta)).im.abs() > LOG_RATE_ZERO_TOL {
                return Ok(AsymptoteEstimate::Absent { log_rate: rate });
            }
            let a = estimate_a(gen, opts, cfg)?;
            let offset = gen.beta.norm_sqr() * engine.sigma(w0)?.im + (gen.beta.conj() * a.value).im;
            Ok(AsymptoteEstimate::Line {
                line: AsymptoteLine::from_equation(gen.beta, offset),
                big_b: Complex64::new(offset, 0.0),
                error: gen.beta.norm() * a.error,
            })
        }
    }
}

/// Limit curvature of a parabolic orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParabolicCurvature {
    Infinite {
        log_rate: f64,
    },
    Finite {
        value: f64,
        circle: DiskCircle,
        /// Half-plane offset `B`.
        big_b: f64,
        /// Disk constant `C = (B - Im β)/4`, so that `value = |2C/b|`.
        big_c: f64,
        /// `C` recomputed from the disk-coordinate integral along `F_s(0)`.
        big_c_disk_form: f64,
        /// Notes on cross-check discrepancies above `10^{-3}`.
        log: Vec<String>,
    },
}

impl ParabolicCurvature {
    pub fn value(&self) -> f64 {
        match self {
            ParabolicCurvature::Infinite { .. } => f64::INFINITY,
            ParabolicCurvature::Finite { value, .. } => *value,
        }
    }
}

/// `κ(z0)` for a parabolic generator: `+∞` when `Im(c/b²) ≠ 0`; otherwise
/// the curvature of the pulled-back asymptote, cross-checked against `|2C/b|`.
pub fn parabolic_limit_curvature(
    engine: &KoenigsEngine,
    z0: Complex64,
    opts: AOptions,
    cfg: FlowConfig,
) -> Result<ParabolicCurvature> {
    if !(z0.norm() < 1.0) {
        return Err(Error::Domain(format!("|z0| = {} is not < 1", z0.norm())));
    }
    let gen = engine.halfplane();
    require_parabolic_beta(gen)?;
    let est = asymptote_halfplane(engine, cayley::to_halfplane(z0), opts, cfg)?;
    let (line, big_b) = match est {
        AsymptoteEstimate::Absent { log_rate } => return Ok(ParabolicCurvature::Infinite { log_rate }),
        AsymptoteEstimate::Line { line, big_b, .. } => (line, big_b.re),
    };
    let circle = line.pullback_to_disk();
    let value = circle.curvature();
    let b = engine.generator().taylor().b;
    let big_c = (big_b - gen.beta.im) / 4.0;
    let big_c_disk_form = disk_form_c(engine, z0, opts, cfg)?;
    let mut log = Vec::new();
    let formula = (2.0 * big_c / b).norm();
    if (formula - value).abs() > 1e-3 {
        log.push(format!("|2C/b| = {formula} differs from the pulled-back circle curvature {value}"));
    }
    if (big_c_disk_form - big_c).abs() > 1e-3 {
        log.push(format!(
            "disk-form C = {big_c_disk_form} differs from the transported C = {big_c}"
        ));
    }
    Ok(ParabolicCurvature::Finite {
        value,
        circle,
        big_b,
        big_c,
        big_c_disk_form,
        log,
    })
}

/// `|b|² Im h(z0) + Im b + ∫_0^∞ Im(f(F_s(0)) conj(b)/(1 - F_s(0))² - c conj(b)/(b(s+1))) ds`.
///
/// The integrand is evaluated along the orbit of `0`; along the orbit of the
/// boundary point `1` it would vanish identically.
fn disk_form_c(engine: &KoenigsEngine, z0: Complex64, opts: AOptions, cfg: FlowConfig) -> Result<f64> {
    let spec = engine.generator();
    let t = spec.taylor();
    let (b, c) = (t.b, t.c);
    let integral = flow_integral(
        engine.halfplane(),
        Complex64::new(1.0, 0.0),
        opts.t_max,
        decay_exponent(engine.halfplane()),
        cfg,
        |s, w| {
            let delta = cayley::disk_offset(w);
            // f/(1-z)² = -p, and -p - b = cδ + ..., so the leading real term drops
            let f_over = -spec.p_at_offset(delta) - b;
            Complex64::new((f_over * b.conj()).im - (c * b.conj() / (b * (s + 1.0))).im, 0.0)
        },
    )?;
    Ok(b.norm_sqr() * engine.koenigs_h(z0)?.im + b.im + integral.value.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftClass {
    FiniteShift,
    InfiniteShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub class: ShiftClass,
    /// `(t, Re Φ_t(w0))` at decade times.
    pub samples: Vec<(f64, f64)>,
}

/// Finite shift iff `Re Φ_t(w0)` settles: its per-decade increments over the
/// last two decades shrink by at least half each time, or sit at rounding level.
pub fn shift_class(gen: &HalfPlaneGenerator, w0: Complex64, t_max: f64, cfg: FlowConfig) -> Result<ShiftReport> {
    if gen.class() != GeneratorClass::Parabolic {
        return Err(Error::Class("shift classification applies to parabolic generators".into()));
    }
    if !(t_max >= 1e3) {
        return Err(Error::Domain("shift classification needs t_max ≥ 1e3".into()));
    }
    let decades = t_max.log10().floor() as usize;
    let schedule = Schedule::Explicit {
        times: (0..=decades).map(|k| 10f64.powi(k as i32)).collect(),
    };
    let cfg = FlowConfig {
        t_max: cfg.t_max.max(t_max),
        ..cfg
    };
    let traj = flow::sample_trajectory(gen, w0, &schedule, cfg)?;
    let re: Vec<f64> = traj.points_w.iter().map(|w| w.re).collect();
    let inc: Vec<f64> = re.windows(2).map(|p| p[1] - p[0]).collect();
    let floor = 1e-9 * (1.0 + re.last().unwrap().abs());
    let n = inc.len();
    let settles = inc[n - 2..].iter().all(|d| *d <= floor)
        || (inc[n - 1] <= floor || inc[n - 1] < 0.5 * inc[n - 2])
            && (inc[n - 2] <= floor || inc[n - 2] < 0.5 * inc[n - 3]);
    Ok(ShiftReport {
        class: if settles {
            ShiftClass::FiniteShift
        } else {
            ShiftClass::InfiniteShift
        },
        samples: traj.times.iter().copied().zip(re).collect(),
    })
}

/// Regression of `Im(Φ_t(w0) · conj(β))` on `log(t+1)` over `n` geometric
/// nodes in `[t_lo, t_hi]`.
pub fn log_growth_fit(
    gen: &HalfPlaneGenerator,
    w0: Complex64,
    t_lo: f64,
    t_hi: f64,
    n: usize,
    cfg: FlowConfig,
) -> Result<LinearFit> {
    require_parabolic_beta(gen)?;
    if n < 3 || !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::Domain("log-growth fit needs n ≥ 3 and 0 < t_lo < t_hi".into()));
    }
    let ratio = (t_hi / t_lo).powf(1.0 / (n - 1) as f64);
    let mut times: Vec<f64> = (0..n).map(|k| t_lo * ratio.powi(k as i32)).collect();
    times[n - 1] = t_hi;
    let cfg = FlowConfig {
        t_max: cfg.t_max.max(t_hi),
        ..cfg
    };
    let traj = flow::sample_trajectory(gen, w0, &Schedule::Explicit { times }, cfg)?;
    let x: Vec<f64> = traj.times.iter().map(|t| (t + 1.0).ln()).collect();
    let y: Vec<f64> = traj.points_w.iter().map(|w| (w * gen.beta.conj()).im).collect();
    linear_fit(&x, &y).ok_or_else(|| Error::Domain("degenerate regression".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{GeneratorSpec, TaylorData};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn engine(b: Complex64, cc: Complex64, tail: Vec<Complex64>) -> KoenigsEngine {
        KoenigsEngine::new(GeneratorSpec::new(TaylorData::parabolic(b, cc), tail).unwrap())
    }

    #[test]
    fn a_for_constant_generator_is_one() {
        let e = engine(c(0.0, -0.5), c(0.0, 0.0), vec![]);
        let a = estimate_a(e.halfplane(), AOptions::default(), FlowConfig::default()).unwrap();
        assert!((a.value - 1.0).norm() < 1e-12);
    }

    #[test]
    fn a_for_exact_family() {
        // φ = 1 + 1/(w+1): A = 1 - log 3
        let e = engine(c(-0.5, 0.0), c(0.25, 0.0), vec![]);
        let a = estimate_a(e.halfplane(), AOptions::default(), FlowConfig::precise()).unwrap();
        let exact = 1.0 - 3f64.ln();
        assert!((a.value - exact).norm() < 1e-7, "{a:?}");
        assert!(a.error < 1e-6);
    }

    #[test]
    fn horocycle_asymptote() {
        let e = engine(c(0.0, -0.5), c(0.0, 0.0), vec![]);
        let est = asymptote_halfplane(&e, c(2.0, 0.3), AOptions::default(), FlowConfig::default()).unwrap();
        let line = est.line().unwrap();
        assert!(line.contains(c(2.0, 100.0), 1e-10), "{line:?}");
        let k = parabolic_limit_curvature(&e, c(0.0, 0.0), AOptions::default(), FlowConfig::default()).unwrap();
        assert!((k.value() - 2.0).abs() < 1e-10);
        if let ParabolicCurvature::Finite { big_c, big_c_disk_form, log, .. } = k {
            assert!((big_c - big_c_disk_form).abs() < 1e-8);
            assert!(log.is_empty());
        }
    }

    #[test]
    fn hyperbolic_asymptotes() {
        let e = KoenigsEngine::new(GeneratorSpec::new(TaylorData::new(1.0, c(0.0, 0.0), c(0.0, 0.0)), vec![]).unwrap());
        let line = *asymptote_halfplane(&e, c(1.0, 0.0), AOptions::default(), FlowConfig::default())
            .unwrap()
            .line()
            .unwrap();
        assert!(line.contains(c(-1.0, 0.0), 1e-12) && line.direction.im.abs() < 1e-12);

        let e = KoenigsEngine::new(GeneratorSpec::new(TaylorData::new(1.0, c(0.5, -0.5), c(0.0, 0.0)), vec![]).unwrap());
        let line = *asymptote_halfplane(&e, c(1.0, 0.0), AOptions::default(), FlowConfig::default())
            .unwrap()
            .line()
            .unwrap();
        assert!(line.contains(c(0.0, -1.0), 1e-9), "{line:?}");
        assert!((line.direction.arg() - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn absent_asymptote_and_log_rate() {
        let e = engine(c(-0.5, 0.0), c(0.0, 0.25), vec![]);
        let est = asymptote_halfplane(&e, c(1.0, 0.0), AOptions::default(), FlowConfig::default()).unwrap();
        assert_eq!(est, AsymptoteEstimate::Absent { log_rate: 1.0 });
        let fit = log_growth_fit(e.halfplane(), c(1.0, 0.0), 1e2, 1e5, 16, FlowConfig::default()).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.02, "{fit:?}");
    }

    #[test]
    fn shift_classes() {
        let horo = engine(c(0.0, -0.5), c(0.0, 0.0), vec![]);
        let r = shift_class(horo.halfplane(), c(1.0, 0.0), 1e6, FlowConfig::default()).unwrap();
        assert_eq!(r.class, ShiftClass::FiniteShift);
        let real = engine(c(-0.5, 0.0), c(0.0, 0.0), vec![]);
        let r = shift_class(real.halfplane(), c(1.0, 0.0), 1e6, FlowConfig::default()).unwrap();
        assert_eq!(r.class, ShiftClass::InfiniteShift);
    }

    #[test]
    fn refuses_zero_beta() {
        let g = GeneratorSpec::unchecked(TaylorData::parabolic(c(0.0, 0.0), c(-0.1, 0.0)), vec![]);
        assert!(matches!(
            estimate_a(&g.to_halfplane(), AOptions::default(), FlowConfig::default()),
            Err(Error::Class(_))
        ));
    }
}
