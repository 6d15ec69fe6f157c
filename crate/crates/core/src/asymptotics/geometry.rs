//! Limit lines in `Π` and their Möbius images in `Δ`.
//!
//! Under `z = 1 - 2/(w+1)` a line `L ⊂ Π` becomes a circle through `z = 1`.
//! With `u*` the point of `L + 1` closest to the origin, the image circle has
//! center `1 - 1/u*` and radius `1/|u*|`; in particular its curvature equals
//! the distance from `-1` to `L`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Minimum distance from `-1` below which a line is treated as passing
/// through `-1` (its image is then a straight line through `z = 1`).
const THROUGH_MINUS_ONE: f64 = 1e-14;

/// The line `{anchor + s·direction : s ∈ ℝ}`, with `|direction| = 1`,
/// `arg direction ∈ [0, π)` and `anchor` the point closest to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteLine {
    pub anchor: Complex64,
    pub direction: Complex64,
}

impl AsymptoteLine {
    pub fn through(point: Complex64, direction: Complex64) -> Self {
        let mut d = direction / direction.norm();
        if d.im < 0.0 || (d.im == 0.0 && d.re < 0.0) {
            d = -d;
        }
        let offset = (point * d.conj()).im;
        Self {
            anchor: Complex64::new(0.0, offset) * d,
            direction: d,
        }
    }

    /// `{w : Im(w · conj(n)) = offset}` for a nonzero normal-ish vector `n`
    /// (the line runs along `n`).
    pub fn from_equation(n: Complex64, offset: f64) -> Self {
        let point = Complex64::new(0.0, offset) * n / n.norm_sqr();
        Self::through(point, n)
    }

    /// Signed offset `Im(anchor · conj(direction))`.
    pub fn offset(&self) -> f64 {
        (self.anchor * self.direction.conj()).im
    }

    pub fn distance(&self, p: Complex64) -> f64 {
        ((p - self.anchor) * self.direction.conj()).im.abs()
    }

    pub fn foot(&self, p: Complex64) -> Complex64 {
        self.anchor + ((p - self.anchor) * self.direction.conj()).re * self.direction
    }

    pub fn contains(&self, p: Complex64, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// Exact image under `C^{-1}(w) = (w - 1)/(w + 1)`.
    pub fn pullback_to_disk(&self) -> DiskCircle {
        let u_star = self.foot(Complex64::new(-1.0, 0.0)) + 1.0;
        if u_star.norm() <= THROUGH_MINUS_ONE {
            DiskCircle::Line {
                direction: self.direction.conj(),
            }
        } else {
            DiskCircle::Circle {
                center: 1.0 - 1.0 / u_star,
                radius: 1.0 / u_star.norm(),
            }
        }
    }
}

/// A limit circle in the disk; every such circle passes through `z = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiskCircle {
    Circle { center: Complex64, radius: f64 },
    /// Straight line through `z = 1` (zero curvature).
    Line { direction: Complex64 },
}

impl DiskCircle {
    pub fn curvature(&self) -> f64 {
        match self {
            DiskCircle::Circle { radius, .. } => 1.0 / radius,
            DiskCircle::Line { .. } => 0.0,
        }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        match *self {
            DiskCircle::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            DiskCircle::Line { direction } => ((z - 1.0) * direction.conj()).im.abs() / direction.norm(),
        }
    }

    /// Locus `|1-z|^2 Im(b·conj(B)) + a Im((1-z) B) = 0` with `a > 0`.
    ///
    /// Writing `v = 1 - z` and `k = Im(b·conj(B))`, the locus is the circle
    /// `|v + (a/2k)·i·conj(B)| = a|B|/(2|k|)`, or the line `v ∈ ℝ·conj(B)`
    /// when `k = 0`.
    pub fn from_hyperbolic_equation(a: f64, b: Complex64, big_b: Complex64, zero_tol: f64) -> Self {
        let k = (b * big_b.conj()).im;
        if k.abs() <= zero_tol {
            DiskCircle::Line {
                direction: big_b.conj() / big_b.norm(),
            }
        } else {
            let i = Complex64::new(0.0, 1.0);
            DiskCircle::Circle {
                center: 1.0 + (a / (2.0 * k)) * i * big_b.conj(),
                radius: a * big_b.norm() / (2.0 * k.abs()),
            }
        }
    }
}
