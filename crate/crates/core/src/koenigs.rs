//! Kœnigs linearization: `h' = -1/f, h(0) = 0` on the disk and
//! `σ' = 1/φ, σ(1) = 0` on the half-plane, both by adaptive quadrature along
//! straight segments (the integrands are zero-free on the convex domains).

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::cayley;
use crate::error::{Error, Result};
use crate::extrapolate::{differences_contract, richardson};
use crate::flow::{self, FlowConfig};
use crate::generators::{GeneratorClass, GeneratorSpec, HalfPlaneGenerator};
use crate::quadrature::{integrate, integrate_segment, QuadratureOptions};

const BOUNDARY_FIRST_OCTAVE: i32 = 4;
const BOUNDARY_LAST_OCTAVE: i32 = 60;
const BOUNDARY_TARGET_ERR: f64 = 1e-13;

/// `lim_{x→+∞} Im σ(x)` with the error estimate of the extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLimit {
    pub value: f64,
    pub error: f64,
    /// Largest abscissa `x = 2^k` that was sampled.
    pub x_max: f64,
}

#[derive(Debug)]
pub struct KoenigsEngine {
    gen: GeneratorSpec,
    hgen: HalfPlaneGenerator,
    opts: QuadratureOptions,
    boundary: OnceLock<Result<BoundaryLimit>>,
}

impl Clone for KoenigsEngine {
    fn clone(&self) -> Self {
        Self::with_options(self.gen.clone(), self.opts)
    }
}

impl KoenigsEngine {
    pub fn new(gen: GeneratorSpec) -> Self {
        Self::with_options(gen, QuadratureOptions::with_tol(1e-10))
    }

    pub fn with_tolerance(gen: GeneratorSpec, rel_tol: f64) -> Self {
        Self::with_options(gen, QuadratureOptions::with_tol(rel_tol))
    }

    pub fn with_options(gen: GeneratorSpec, opts: QuadratureOptions) -> Self {
        let hgen = gen.to_halfplane();
        Self {
            gen,
            hgen,
            opts,
            boundary: OnceLock::new(),
        }
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.gen
    }

    pub fn halfplane(&self) -> &HalfPlaneGenerator {
        &self.hgen
    }

    pub fn class(&self) -> GeneratorClass {
        self.gen.classify()
    }

    /// `h(z) = -∫_0^z dζ / f(ζ)`.
    pub fn koenigs_h(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(Error::Domain(format!("|z| = {} is not < 1", z.norm())));
        }
        let est = integrate_segment(
            |zeta| -1.0 / self.gen.f_at_offset(zeta - 1.0),
            Complex64::new(0.0, 0.0),
            z,
            self.opts,
        )?;
        Ok(est.value)
    }

    /// `σ(w) = ∫_1^w dω / φ(ω)`.
    pub fn sigma(&self, w: Complex64) -> Result<Complex64> {
        if !(w.re > 0.0) {
            return Err(Error::Domain(format!("Re w = {} is not > 0", w.re)));
        }
        let est = integrate_segment(|omega| 1.0 / self.hgen.eval(omega), Complex64::new(1.0, 0.0), w, self.opts)?;
        Ok(est.value)
    }

    /// `|h(F_t(z)) - h(z) - t|`.
    pub fn abel_residual(&self, z: Complex64, t: f64, cfg: FlowConfig) -> Result<f64> {
        let zt = flow::evolve_disk(&self.gen, z, t, cfg)?;
        Ok((self.koenigs_h(zt)? - self.koenigs_h(z)? - t).norm())
    }

    /// Same identity in half-plane coordinates: `|σ(Φ_t(w)) - σ(w) - t|`.
    pub fn abel_residual_halfplane(&self, w: Complex64, t: f64, cfg: FlowConfig) -> Result<f64> {
        let wt = flow::evolve(&self.hgen, w, t, cfg)?;
        Ok((self.sigma(wt)? - self.sigma(w)? - t).norm())
    }

    /// `lim_{x→+∞} Im σ(x)` (equivalently `lim_{r→1⁻} Im h(r)`).
    ///
    /// `Im σ` is accumulated octave by octave on `x_k = 2^k` and the samples
    /// `k = 4, 5, ...` are Richardson-extrapolated in powers of `1/x`.
    pub fn boundary_imag_limit(&self) -> Result<BoundaryLimit> {
        self.boundary
            .get_or_init(|| self.compute_boundary_limit())
            .clone()
    }

    fn compute_boundary_limit(&self) -> Result<BoundaryLimit> {
        if self.class() != GeneratorClass::Hyperbolic {
            return Err(Error::Class(
                "the boundary limit of Im h is defined for hyperbolic generators".into(),
            ));
        }
        let im_integrand = |x: f64| Complex64::new((1.0 / self.hgen.eval(Complex64::new(x, 0.0))).im, 0.0);
        let opts = QuadratureOptions {
            abs_tol: 1e-16,
            rel_tol: 1e-13,
            max_subdivisions: 2000,
        };
        let mut x = 2f64.powi(BOUNDARY_FIRST_OCTAVE);
        let mut acc = integrate(im_integrand, 1.0, x, opts)?.value.re;
        let mut samples = vec![acc];
        let mut best = None;
        for _ in BOUNDARY_FIRST_OCTAVE..BOUNDARY_LAST_OCTAVE {
            acc += integrate(im_integrand, x, 2.0 * x, opts)?.value.re;
            x *= 2.0;
            samples.push(acc);
            if samples.len() >= 6 {
                let est = richardson(&samples[samples.len().saturating_sub(12)..], 2.0, 1.0)
                    .expect("non-empty");
                best = Some(est);
                if est.error < BOUNDARY_TARGET_ERR {
                    break;
                }
            }
        }
        let est = best.expect("at least six octaves");
        if est.error > 1e-8 && !differences_contract(&samples, 4) {
            return Err(Error::NonConvergence(format!(
                "Im σ(x) does not settle up to x = {x:e} (last estimate {} ± {:.2e})",
                est.value, est.error
            )));
        }
        Ok(BoundaryLimit {
            value: est.value,
            error: est.error,
            x_max: x,
        })
    }

    /// `θ = α lim Im σ(x)`, so that `g(1) = e^{-iθ}`.
    pub fn theta(&self) -> Result<f64> {
        Ok(self.hgen.alpha * self.boundary_imag_limit()?.value)
    }

    /// Valiron function `g(w) = exp(α (σ(w) - i lim Im σ))`.
    pub fn valiron_g(&self, w: Complex64) -> Result<Complex64> {
        let limit = self.boundary_imag_limit()?.value;
        let alpha = self.hgen.alpha;
        Ok((alpha * (self.sigma(w)? - Complex64::new(0.0, limit))).exp())
    }

    /// `|g(Φ_s(w)) - e^{sα} g(w)|`.
    pub fn schroeder_residual(&self, w: Complex64, s: f64, cfg: FlowConfig) -> Result<f64> {
        let ws = flow::evolve(&self.hgen, w, s, cfg)?;
        Ok((self.valiron_g(ws)? - (s * self.hgen.alpha).exp() * self.valiron_g(w)?).norm())
    }

    /// `min_{i<j} |h(z_i) - h(z_j)| / |z_i - z_j|` over `n` seeded random
    /// points of the disk of radius `radius`. A positive value means the
    /// sampled values are pairwise distinct.
    pub fn univalence_margin(&self, n: usize, radius: f64, seed: u64) -> Result<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        let pts: Vec<Complex64> = (0..n)
            .map(|_| {
                let r = radius * rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let vals = pts.iter().map(|z| self.koenigs_h(*z)).collect::<Result<Vec<_>>>()?;
        let mut margin = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let dz = (pts[i] - pts[j]).norm();
                if dz > 0.0 {
                    margin = margin.min((vals[i] - vals[j]).norm() / dz);
                }
            }
        }
        Ok(margin)
    }

    /// `σ(C(z))`, which must agree with `h(z)` since `C^{-1}(1) = 0`.
    pub fn sigma_at_disk_point(&self, z: Complex64) -> Result<Complex64> {
        self.sigma(cayley::to_halfplane(z))
    }
}
