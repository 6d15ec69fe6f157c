//! Semigroup generators with boundary Denjoy-Wolff point `τ = 1`.
//!
//! A generator is given by its Taylor data at `z = 1` and a finite tail:
//!
//! ```text
//! f(z) = a (z-1) + b (z-1)^2 + c (z-1)^3 + Σ_{k>=4} d_k (z-1)^k
//! ```
//!
//! and is admissible when `p(z) = -f(z)/(1-z)^2` has nonnegative real part
//! on the disk (Berkson-Porta form). Transported to the right half-plane by
//! the Cayley map it becomes `φ(w) = 2 p(C^{-1}(w))`, which in the variable
//! `u = 1/(w+1)` reads
//!
//! ```text
//! φ(w) = α w + β + γ u + Σ_{k>=4} e_k u^{k-2},
//! α = a,  β = a - 2b,  γ = 4c,  e_k = -2 (-2)^{k-2} d_k.
//! ```

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cayley;
use crate::error::{Error, Result};

/// Smallest `Re p` accepted on the validation grid.
pub const ADMISSIBILITY_TOL: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorData {
    /// Angular derivative `f'(1)`.
    pub a: f64,
    pub b: Complex64,
    pub c: Complex64,
    /// Declared smoothness exponent of the remainder beyond `(z-1)^3`.
    pub epsilon: f64,
}

impl TaylorData {
    pub fn new(a: f64, b: Complex64, c: Complex64) -> Self {
        Self {
            a,
            b,
            c,
            epsilon: 1.0,
        }
    }

    pub fn parabolic(b: Complex64, c: Complex64) -> Self {
        Self::new(0.0, b, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorClass {
    Hyperbolic,
    Parabolic,
}

impl fmt::Display for GeneratorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorClass::Hyperbolic => f.write_str("hyperbolic"),
            GeneratorClass::Parabolic => f.write_str("parabolic"),
        }
    }
}

/// Polar sampling of the disk used for the Herglotz check.
///
/// Half of the radii are uniform in `(0, 1)`, the other half cluster
/// geometrically towards `1 - boundary_gap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationGrid {
    pub radii: usize,
    pub angles: usize,
    pub boundary_gap: f64,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        Self {
            radii: 64,
            angles: 64,
            boundary_gap: 1e-4,
        }
    }
}

impl ValidationGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let half = self.radii / 2;
        let mut radii = Vec::with_capacity(self.radii);
        for j in 0..half {
            radii.push((j as f64 + 1.0) / (half as f64 + 1.0));
        }
        let clustered = self.radii - half;
        let decades = -self.boundary_gap.log10();
        for j in 0..clustered {
            let e = decades * (j as f64 + 1.0) / clustered as f64;
            radii.push(1.0 - 10f64.powf(-e));
        }
        let mut pts = Vec::with_capacity(self.radii * self.angles + 1);
        pts.push(Complex64::new(0.0, 0.0));
        for &r in &radii {
            for k in 0..self.angles {
                let theta = std::f64::consts::TAU * k as f64 / self.angles as f64;
                pts.push(Complex64::from_polar(r, theta));
            }
        }
        pts
    }
}

/// JSON form of a generator: `{"a": .., "b": [re, im], "c": [re, im],
/// "tail": [[re, im], ...], "epsilon": ..}`. `tail[j]` multiplies `(z-1)^(j+4)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: [f64; 2],
    #[serde(default)]
    pub c: [f64; 2],
    #[serde(default)]
    pub tail: Vec<[f64; 2]>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    id: String,
    taylor: TaylorData,
    tail: Vec<Complex64>,
    grid: ValidationGrid,
    min_re_p: f64,
}

impl GeneratorSpec {
    /// Builds and validates a generator.
    pub fn new(taylor: TaylorData, tail: Vec<Complex64>) -> Result<Self> {
        Self::with_grid(taylor, tail, ValidationGrid::default())
    }

    pub fn with_grid(taylor: TaylorData, tail: Vec<Complex64>, grid: ValidationGrid) -> Result<Self> {
        if !(taylor.a.is_finite() && taylor.a >= 0.0) {
            return Err(Error::Descriptor(format!(
                "angular derivative a = {} must be finite and nonnegative",
                taylor.a
            )));
        }
        if !(taylor.epsilon.is_finite() && taylor.epsilon > 0.0) {
            return Err(Error::Descriptor(format!(
                "epsilon = {} must be positive",
                taylor.epsilon
            )));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(&taylor.b) || !finite(&taylor.c) || !tail.iter().all(finite) {
            return Err(Error::Descriptor("non-finite coefficient".into()));
        }
        let mut tail = tail;
        while tail.last().is_some_and(|d| *d == Complex64::new(0.0, 0.0)) {
            tail.pop();
        }
        if taylor.a == 0.0
            && taylor.b == Complex64::new(0.0, 0.0)
            && taylor.c == Complex64::new(0.0, 0.0)
            && tail.is_empty()
        {
            return Err(Error::Degenerate(
                "f ≡ 0 generates the identity semigroup".into(),
            ));
        }
        let mut spec = Self {
            id: String::new(),
            taylor,
            tail,
            grid,
            min_re_p: f64::INFINITY,
        };
        let mut worst = Complex64::new(0.0, 0.0);
        for z in grid.points() {
            let p = spec.p_at_offset(z - 1.0);
            if p.re < spec.min_re_p {
                spec.min_re_p = p.re;
                worst = z;
            }
            if p.norm() == 0.0 {
                return Err(Error::Degenerate(format!("generator vanishes at z = {z}")));
            }
        }
        if spec.min_re_p < ADMISSIBILITY_TOL {
            return Err(Error::Admissibility {
                min_re_p: spec.min_re_p,
                at: format!("{worst}"),
            });
        }
        Ok(spec)
    }

    /// Coefficient container without the Herglotz check, for evaluating
    /// `f` and `f'` on arbitrary coefficient sets. Flows and asymptotics
    /// must be built from validated generators.
    pub fn unchecked(taylor: TaylorData, tail: Vec<Complex64>) -> Self {
        Self {
            id: String::new(),
            taylor,
            tail,
            grid: ValidationGrid::default(),
            min_re_p: f64::NAN,
        }
    }

    /// Builds the disk generator whose half-plane transport is
    /// `φ(w) = α w + β + γ/(w+1) + Σ_j higher[j] (w+1)^{-(j+2)}`.
    pub fn from_halfplane(
        alpha: f64,
        beta: Complex64,
        gamma: Complex64,
        higher: &[Complex64],
    ) -> Result<Self> {
        let b = (alpha - beta) / 2.0;
        let c = gamma / 4.0;
        let tail = higher
            .iter()
            .enumerate()
            .map(|(j, e)| *e / (-2.0 * Complex64::new(-2.0, 0.0).powi(j as i32 + 2)))
            .collect();
        Self::new(TaylorData::new(alpha, b, c), tail)
    }

    pub fn from_descriptor(desc: &GeneratorDescriptor) -> Result<Self> {
        let cx = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        let taylor = TaylorData {
            a: desc.a,
            b: cx(desc.b),
            c: cx(desc.c),
            epsilon: desc.epsilon,
        };
        let spec = Self::new(taylor, desc.tail.iter().copied().map(cx).collect())?;
        Ok(match &desc.name {
            Some(name) => spec.named(name),
            None => spec,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let desc: GeneratorDescriptor =
            serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))?;
        Self::from_descriptor(&desc)
    }

    pub fn descriptor(&self) -> GeneratorDescriptor {
        let re_im = |z: Complex64| [z.re, z.im];
        GeneratorDescriptor {
            name: (!self.id.is_empty()).then(|| self.id.clone()),
            a: self.taylor.a,
            b: re_im(self.taylor.b),
            c: re_im(self.taylor.c),
            tail: self.tail.iter().copied().map(re_im).collect(),
            epsilon: self.taylor.epsilon,
        }
    }

    pub fn named(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn taylor(&self) -> &TaylorData {
        &self.taylor
    }

    /// Coefficients of `(z-1)^4, (z-1)^5, ...`.
    pub fn tail(&self) -> &[Complex64] {
        &self.tail
    }

    pub fn validation_grid(&self) -> ValidationGrid {
        self.grid
    }

    /// Minimum of `Re p` observed on the validation grid.
    pub fn min_re_p(&self) -> f64 {
        self.min_re_p
    }

    pub fn classify(&self) -> GeneratorClass {
        if self.taylor.a > 0.0 {
            GeneratorClass::Hyperbolic
        } else {
            GeneratorClass::Parabolic
        }
    }

    pub fn eval_f(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(self.f_at_offset(z - 1.0))
    }

    pub fn eval_f_prime(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(self.f_prime_at_offset(z - 1.0))
    }

    pub fn eval_p(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(self.p_at_offset(z - 1.0))
    }

    /// `f` as a polynomial in `δ = z - 1`.
    pub fn f_at_offset(&self, delta: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for d in self.tail.iter().rev() {
            acc = acc * delta + d;
        }
        acc = acc * delta + self.taylor.c;
        acc = acc * delta + self.taylor.b;
        acc = acc * delta + self.taylor.a;
        acc * delta
    }

    pub fn f_prime_at_offset(&self, delta: Complex64) -> Complex64 {
        // Σ k d_k δ^{k-1}, k = 1.. with d_1 = a, d_2 = b, d_3 = c
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, d) in self.tail.iter().enumerate().rev() {
            acc = acc * delta + d * (j as f64 + 4.0);
        }
        acc = acc * delta + self.taylor.c * 3.0;
        acc = acc * delta + self.taylor.b * 2.0;
        acc * delta + self.taylor.a
    }

    /// `p = -f/(z-1)^2 = -(a/δ + b + c δ + Σ d_k δ^{k-2})`.
    pub fn p_at_offset(&self, delta: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for d in self.tail.iter().rev() {
            acc = acc * delta + d;
        }
        acc = acc * delta + self.taylor.c;
        acc = acc * delta + self.taylor.b;
        let pole = if self.taylor.a != 0.0 {
            self.taylor.a / delta
        } else {
            Complex64::new(0.0, 0.0)
        };
        -(acc + pole)
    }

    pub fn to_halfplane(&self) -> HalfPlaneGenerator {
        let TaylorData { a, b, c, epsilon } = self.taylor;
        let higher = self
            .tail
            .iter()
            .enumerate()
            .map(|(j, d)| -2.0 * Complex64::new(-2.0, 0.0).powi(j as i32 + 2) * d)
            .collect();
        HalfPlaneGenerator {
            id: self.id.clone(),
            alpha: a,
            beta: a - 2.0 * b,
            gamma: 4.0 * c,
            higher,
            epsilon,
        }
    }

    /// Coefficient-wise equality within `tol` (the tails are compared after
    /// zero padding).
    pub fn coefficients_match(&self, other: &Self, tol: f64) -> bool {
        let n = self.tail.len().max(other.tail.len());
        let zero = Complex64::new(0.0, 0.0);
        (self.taylor.a - other.taylor.a).abs() <= tol
            && (self.taylor.b - other.taylor.b).norm() <= tol
            && (self.taylor.c - other.taylor.c).norm() <= tol
            && (0..n).all(|k| {
                let x = self.tail.get(k).copied().unwrap_or(zero);
                let y = other.tail.get(k).copied().unwrap_or(zero);
                (x - y).norm() <= tol
            })
    }
}

fn check_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|z| = {} is not < 1", z.norm())))
    }
}

/// The Cayley-transported generator `φ`; the half-plane flow solves
/// `∂Φ/∂t = φ(Φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneGenerator {
    id: String,
    pub alpha: f64,
    pub beta: Complex64,
    pub gamma: Complex64,
    /// Coefficients of `u^2, u^3, ...` with `u = 1/(w+1)`.
    pub higher: Vec<Complex64>,
    pub epsilon: f64,
}

impl HalfPlaneGenerator {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn class(&self) -> GeneratorClass {
        if self.alpha > 0.0 {
            GeneratorClass::Hyperbolic
        } else {
            GeneratorClass::Parabolic
        }
    }

    fn higher_sum(&self, u: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for e in self.higher.iter().rev() {
            acc = acc * u + e;
        }
        acc * u * u
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        let u = 1.0 / (w + 1.0);
        self.alpha * w + self.beta + self.gamma * u + self.higher_sum(u)
    }

    pub fn eval_prime(&self, w: Complex64) -> Complex64 {
        let u = 1.0 / (w + 1.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, e) in self.higher.iter().enumerate().rev() {
            acc = acc * u + e * (j as f64 + 2.0);
        }
        // d/dw u^k = -k u^{k+1}
        self.alpha - self.gamma * u * u - acc * u * u * u
    }

    /// `ϱ(w) = φ(w) - α w - β`.
    pub fn remainder(&self, w: Complex64) -> Complex64 {
        let u = 1.0 / (w + 1.0);
        self.gamma * u + self.higher_sum(u)
    }

    /// `ϱ_1(w) = φ(w) - α w - β - γ/(w+1)`.
    pub fn remainder_beyond_gamma(&self, w: Complex64) -> Complex64 {
        self.higher_sum(1.0 / (w + 1.0))
    }

    /// Validation grid of the source generator mapped into `Π`.
    pub fn transported_grid(grid: &ValidationGrid) -> Vec<Complex64> {
        grid.points().into_iter().map(cayley::to_halfplane).collect()
    }
}
