//! Rigidity discriminant for pairs of parabolic semigroups sharing `b`.
//!
//! For `f = b(z-1)² + c₁(z-1)³ + ...` and `g = b(z-1)² + c₂(z-1)³ + ...`
//! the channel `Im[conj(b)(1/(1-F_t(z)) - 1/(1-G_t(z)))]` behaves like
//! `κ₀ + κ₁ log(t+1) + o(1)` with
//! `κ₁ = Im((c₂-c₁) conj(b)/b)` and
//! `κ₀ = Im[|b|²(h₂-h₁)(z) + conj(b)(A₁-A₂)]`.
//! A vanishing limit forces `f ≡ g`; numerically the channel is only a
//! detector, so coincidence is asserted only when the coefficients agree.
//!
//! The fit also carries `log(t+1)/(t+1)` and `1/(t+1)` columns, which absorb
//! the leading decay of the `o(1)` remainder.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{estimate_a, AOptions};
use crate::cayley;
use crate::error::{Error, Result};
use crate::extrapolate::least_squares;
use crate::flow::{self, FlowConfig, Schedule};
use crate::generators::{GeneratorClass, GeneratorSpec, HalfPlaneGenerator};
use crate::koenigs::KoenigsEngine;

/// Disk points at which `h₁ - h₂` is tabulated besides the channel point.
pub const KOENIGS_SAMPLE_POINTS: [(f64, f64); 3] = [(0.3, 0.0), (0.0, 0.5), (-0.2, -0.4)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityClass {
    VanishingLimit,
    LogDivergent,
    BoundedNonzero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinates {
    Disk,
    HalfPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityOptions {
    pub grid: Schedule,
    pub flow: FlowConfig,
    pub a: AOptions,
    /// Fitted coefficients must also exceed these magnitudes to count as nonzero.
    pub slope_floor: f64,
    pub intercept_floor: f64,
    pub coincidence_tol: f64,
}

impl Default for RigidityOptions {
    fn default() -> Self {
        Self {
            grid: Schedule::geometric(1e2, 10f64.powf(0.2), 16),
            flow: FlowConfig::precise(),
            a: AOptions::default(),
            slope_floor: 1e-4,
            intercept_floor: 1e-4,
            coincidence_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelFit {
    pub kappa0: f64,
    pub kappa1: f64,
    pub se_kappa0: f64,
    pub se_kappa1: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoenigsDifference {
    pub point: Complex64,
    /// `h₁ - h₂` (disk) or `σ₁ - σ₂` (half-plane) at `point`.
    pub difference: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    /// Shared leading coefficient (`b` in the disk, `β` in the half-plane).
    pub lead: Complex64,
    /// `c₁, c₂` in the disk, `γ₁, γ₂` in the half-plane.
    pub second: [Complex64; 2],
    pub predicted_kappa1: f64,
    /// `None` when either constant `A` could not be estimated.
    pub predicted_kappa0: Option<f64>,
    /// The two constants `A` in the channel's coordinates.
    pub constants_a: Option<[Complex64; 2]>,
    pub koenigs_differences: Vec<KoenigsDifference>,
    pub coefficients_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityVerdict {
    pub coordinates: Coordinates,
    pub point: Complex64,
    pub times: Vec<f64>,
    pub channel: Vec<f64>,
    pub fit: ChannelFit,
    pub classification: RigidityClass,
    pub coefficients: CoefficientReport,
    /// For `VanishingLimit`: whether the coefficients confirm `f ≡ g`.
    pub coincidence_confirmed: Option<bool>,
}

impl RigidityVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict is serializable")
    }
}

fn check_hypotheses(f: &GeneratorSpec, g: &GeneratorSpec) -> Result<Complex64> {
    for spec in [f, g] {
        if spec.classify() != GeneratorClass::Parabolic {
            return Err(Error::Hypothesis(format!("generator '{}' is hyperbolic", spec.id())));
        }
    }
    let (b1, b2) = (f.taylor().b, g.taylor().b);
    if b1 == Complex64::new(0.0, 0.0) {
        return Err(Error::Hypothesis("the shared coefficient b must be nonzero".into()));
    }
    if (b1 - b2).norm() > 1e-14 * b1.norm() {
        return Err(Error::Hypothesis(format!("leading coefficients differ: {b1} vs {b2}")));
    }
    Ok(b1)
}

/// Disk discriminant at `z`.
pub fn rigidity_discriminant(
    f: &GeneratorSpec,
    g: &GeneratorSpec,
    z: Complex64,
    opts: &RigidityOptions,
) -> Result<RigidityVerdict> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("|z| = {} is not < 1", z.norm())));
    }
    discriminant(f, g, Coordinates::Disk, z, opts)
}

/// Half-plane discriminant `Im[conj(β)(Φ_t(w) - Ψ_t(w))]` at `w`.
pub fn rigidity_discriminant_halfplane(
    phi: &HalfPlaneGenerator,
    psi: &HalfPlaneGenerator,
    w: Complex64,
    opts: &RigidityOptions,
) -> Result<RigidityVerdict> {
    if !(w.re > 0.0) {
        return Err(Error::Domain(format!("Re w = {} is not > 0", w.re)));
    }
    let lift = |h: &HalfPlaneGenerator| -> Result<GeneratorSpec> {
        let spec = GeneratorSpec::from_halfplane(h.alpha, h.beta, h.gamma, &h.higher)?;
        let mut t = *spec.taylor();
        t.epsilon = h.epsilon;
        Ok(GeneratorSpec::new(t, spec.tail().to_vec())?.named(h.id()))
    };
    discriminant(&lift(phi)?, &lift(psi)?, Coordinates::HalfPlane, w, opts)
}

type KoenigsDifferenceFn<'a> = Box<dyn Fn(Complex64) -> Result<Complex64> + 'a>;

fn discriminant(
    f: &GeneratorSpec,
    g: &GeneratorSpec,
    coords: Coordinates,
    point: Complex64,
    opts: &RigidityOptions,
) -> Result<RigidityVerdict> {
    let b = check_hypotheses(f, g)?;
    let (ef, eg) = (KoenigsEngine::new(f.clone()), KoenigsEngine::new(g.clone()));
    let (hf, hg) = (ef.halfplane(), eg.halfplane());
    let beta = hf.beta;
    let w = match coords {
        Coordinates::Disk => cayley::to_halfplane(point),
        Coordinates::HalfPlane => point,
    };
    let times = opts.grid.times()?;
    let t_last = *times.last().ok_or_else(|| Error::Domain("empty rigidity grid".into()))?;
    if times.len() < 5 || times[0] <= 0.0 {
        return Err(Error::Domain("rigidity grid needs at least five positive times".into()));
    }
    let cfg = FlowConfig {
        t_max: opts.flow.t_max.max(t_last),
        ..opts.flow
    };
    let orbit_f = flow::sample_trajectory(hf, w, &opts.grid, cfg)?.points_w;
    let orbit_g = flow::sample_trajectory(hg, w, &opts.grid, cfg)?.points_w;
    let channel: Vec<f64> = orbit_f
        .iter()
        .zip(&orbit_g)
        .map(|(p, q)| match coords {
            Coordinates::Disk => (b.conj() * (cayley::inv_one_minus(*p) - cayley::inv_one_minus(*q))).im,
            Coordinates::HalfPlane => (beta.conj() * (p - q)).im,
        })
        .collect();
    // κ₀ + κ₁ log(t+1), plus the decaying log(t+1)/(t+1) and 1/(t+1) terms
    // of the o(1) remainder so they do not leak into κ₀ and κ₁
    let columns = vec![
        vec![1.0; times.len()],
        times.iter().map(|t| (t + 1.0).ln()).collect(),
        times.iter().map(|t| (t + 1.0).ln() / (t + 1.0)).collect(),
        times.iter().map(|t| 1.0 / (t + 1.0)).collect::<Vec<f64>>(),
    ];
    let ls = least_squares(&columns, &channel)
        .ok_or_else(|| Error::Domain("rigidity grid needs at least five distinct times".into()))?;
    let fit = ChannelFit {
        kappa0: ls.coefficients[0],
        kappa1: ls.coefficients[1],
        se_kappa0: ls.standard_errors[0],
        se_kappa1: ls.standard_errors[1],
        rms: ls.rms,
    };
    let significant = |v: f64, se: f64, floor: f64| v.abs() > 3.0 * se && v.abs() > floor;
    let classification = if significant(fit.kappa1, fit.se_kappa1, opts.slope_floor) {
        RigidityClass::LogDivergent
    } else if significant(fit.kappa0, fit.se_kappa0, opts.intercept_floor) {
        RigidityClass::BoundedNonzero
    } else {
        RigidityClass::VanishingLimit
    };

    // prediction from the coefficients
    let (lead, second, koenigs_at): (Complex64, [Complex64; 2], KoenigsDifferenceFn) =
        match coords {
            Coordinates::Disk => (
                b,
                [f.taylor().c, g.taylor().c],
                Box::new(|z| Ok(ef.koenigs_h(z)? - eg.koenigs_h(z)?)),
            ),
            Coordinates::HalfPlane => (
                beta,
                [hf.gamma, hg.gamma],
                Box::new(|w| Ok(ef.sigma(w)? - eg.sigma(w)?)),
            ),
        };
    let predicted_kappa1 = match coords {
        Coordinates::Disk => ((second[1] - second[0]) * b.conj() / b).im,
        Coordinates::HalfPlane => (beta.conj() * (second[0] - second[1]) / beta).im,
    };
    let mut points = vec![point];
    points.extend(KOENIGS_SAMPLE_POINTS.iter().map(|&(re, im)| {
        let z = Complex64::new(re, im);
        match coords {
            Coordinates::Disk => z,
            Coordinates::HalfPlane => cayley::to_halfplane(z),
        }
    }));
    let koenigs_differences = points
        .iter()
        .map(|p| {
            Ok(KoenigsDifference {
                point: *p,
                difference: koenigs_at(*p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dk = koenigs_differences[0].difference;
    let constants_a = match (estimate_a(hf, opts.a, cfg), estimate_a(hg, opts.a, cfg)) {
        (Ok(a1), Ok(a2)) => Some(match coords {
            Coordinates::Disk => [a1.disk, a2.disk],
            Coordinates::HalfPlane => [a1.value, a2.value],
        }),
        _ => None,
    };
    let predicted_kappa0 = constants_a.map(|[a1, a2]| match coords {
        // |b|²(h₂ - h₁) + conj(b)(A₁ - A₂)
        Coordinates::Disk => (-b.norm_sqr() * dk + b.conj() * (a1 - a2)).im,
        // |β|²(σ_Φ - σ_Ψ) + conj(β)(A_Φ - A_Ψ)
        Coordinates::HalfPlane => (beta.norm_sqr() * dk + beta.conj() * (a1 - a2)).im,
    });
    let coefficients_match = f.coefficients_match(g, opts.coincidence_tol);
    Ok(RigidityVerdict {
        coordinates: coords,
        point,
        times,
        channel,
        fit,
        classification,
        coefficients: CoefficientReport {
            lead,
            second,
            predicted_kappa1,
            predicted_kappa0,
            constants_a,
            koenigs_differences,
            coefficients_match,
        },
        coincidence_confirmed: (classification == RigidityClass::VanishingLimit).then_some(coefficients_match),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::TaylorData;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn par(b: Complex64, cc: Complex64, tail: Vec<Complex64>) -> GeneratorSpec {
        GeneratorSpec::new(TaylorData::parabolic(b, cc), tail).unwrap()
    }

    #[test]
    fn identical_pair_vanishes() {
        let f = par(c(0.0, -0.5), c(0.0, 0.0), vec![]);
        let v = rigidity_discriminant(&f, &f, c(0.0, 0.0), &RigidityOptions::default()).unwrap();
        assert!(v.channel.iter().all(|x| *x == 0.0));
        assert_eq!(v.classification, RigidityClass::VanishingLimit);
        assert_eq!(v.coincidence_confirmed, Some(true));
    }

    #[test]
    fn c_mismatch_is_log_divergent() {
        let f = par(c(-0.5, 0.0), c(0.0, 0.0), vec![]);
        let g = par(c(-0.5, 0.0), c(0.0, 0.25), vec![]);
        let v = rigidity_discriminant(&f, &g, c(0.0, 0.0), &RigidityOptions::default()).unwrap();
        assert_eq!(v.classification, RigidityClass::LogDivergent);
        assert!((v.coefficients.predicted_kappa1 - 0.25).abs() < 1e-15);
        assert!((v.fit.kappa1 - 0.25).abs() < 0.05 * 0.25, "{:?}", v.fit);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let f = par(c(-0.5, 0.0), c(0.0, 0.0), vec![]);
        let g = par(c(0.0, -0.5), c(0.0, 0.0), vec![]);
        let h = GeneratorSpec::new(TaylorData::new(1.0, c(0.0, 0.0), c(0.0, 0.0)), vec![]).unwrap();
        let o = RigidityOptions::default();
        assert!(matches!(rigidity_discriminant(&f, &g, c(0.0, 0.0), &o), Err(Error::Hypothesis(_))));
        assert!(matches!(rigidity_discriminant(&f, &h, c(0.0, 0.0), &o), Err(Error::Hypothesis(_))));
    }
}
