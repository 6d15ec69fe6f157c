#![allow(dead_code)]

use diskflow::{GeneratorSpec, TaylorData};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn spec(a: f64, b: Complex64, cc: Complex64, tail: Vec<Complex64>, name: &str) -> GeneratorSpec {
    GeneratorSpec::new(TaylorData::new(a, b, cc), tail)
        .unwrap_or_else(|e| panic!("{name}: {e}"))
        .named(name)
}

/// The six reference generators.
pub fn corpus() -> Vec<GeneratorSpec> {
    vec![
        // φ = w + 1
        spec(1.0, c(0.0, 0.0), c(0.0, 0.0), vec![], "hyp_line"),
        // φ = w + i
        spec(1.0, c(0.5, -0.5), c(0.0, 0.0), vec![], "hyp_tilt"),
        // φ = w + i + 0.4/(w+1)
        spec(1.0, c(0.5, -0.5), c(0.1, 0.0), vec![], "hyp_curved"),
        // φ ≡ i
        spec(0.0, c(0.0, -0.5), c(0.0, 0.0), vec![], "par_horocycle"),
        // φ = 1 + 1/(w+1) - 0.16i/(w+1)^2
        spec(0.0, c(-0.5, 0.0), c(0.25, 0.0), vec![c(0.0, 0.02)], "par_finite"),
        // φ = 1 + i/(w+1)
        spec(0.0, c(-0.5, 0.0), c(0.0, 0.25), vec![], "par_log"),
    ]
}

/// φ = 1 + 1/(w+1); its orbit of 1 solves `v - log(v+1) = t + 2 - log 3`
/// with `v = Φ_t + 1`, and `A = 1 - log 3`.
pub fn par_exact() -> GeneratorSpec {
    spec(0.0, c(-0.5, 0.0), c(0.25, 0.0), vec![], "par_exact")
}

pub const EXACT_A: f64 = -0.098_612_288_668_109_8;

pub fn disk_grid() -> Vec<Complex64> {
    vec![c(0.0, 0.0), c(0.3, 0.0), c(-0.3, 0.0), c(0.0, 0.5), c(-0.2, -0.4)]
}

/// Signed curvature of the circle through three points, traversed `p → q → r`.
pub fn three_point_curvature(p: Complex64, q: Complex64, r: Complex64) -> f64 {
    let (u, v) = (q - p, r - p);
    let cross = u.re * v.im - u.im * v.re;
    2.0 * cross / ((q - p).norm() * (r - q).norm() * (r - p).norm())
}

/// `Φ_t(1)` for φ = 1 + 1/(w+1), by Newton on `v - log(v+1) = rhs`.
pub fn exact_orbit_of_one(t: f64) -> f64 {
    let rhs = t + 2.0 - 3f64.ln();
    let mut v = rhs + rhs.ln().max(0.0) + 1.0;
    for _ in 0..60 {
        let step = (v - (v + 1.0).ln() - rhs) / (1.0 - 1.0 / (v + 1.0));
        v -= step;
        if step.abs() <= 1e-15 * v {
            break;
        }
    }
    v - 1.0
}

/// Least-squares slope of `y` against `x`.
pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub mod strategies {
    use super::c;
    use diskflow::GeneratorSpec;
    use num_complex::Complex64;
    use proptest::prelude::*;

    /// Half-plane data `φ = αw + β + γ/(w+1) + e/(w+1)^2` with
    /// `Re γ ≥ 0` and `Re β ≥ |Im γ| + |e|`, which keeps `Re φ ≥ 0` on `Π`
    /// (there `|1/(w+1)| ≤ 1` and `Re 1/(w+1) ≥ 0`).
    pub fn admissible(hyperbolic: Option<bool>) -> impl Strategy<Value = GeneratorSpec> {
        let alpha = match hyperbolic {
            Some(true) => (0.2f64..2.0).boxed(),
            Some(false) => Just(0.0).boxed(),
            None => prop_oneof![Just(0.0), 0.2f64..2.0].boxed(),
        };
        (alpha, 0.1f64..2.0, -2.0f64..2.0, 0.0f64..2.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..std::f64::consts::TAU)
            .prop_map(|(a, br, bi, gr, gi_frac, e_frac, theta)| {
                let gi = gi_frac * br * 0.5 * if theta > 3.0 { -1.0 } else { 1.0 };
                let e = Complex64::from_polar(e_frac * (br - gi.abs()) * 0.9, theta);
                GeneratorSpec::from_halfplane(a, c(br, bi), c(gr, gi), &[e]).expect("admissible by construction")
            })
    }

    pub fn halfplane_point() -> impl Strategy<Value = Complex64> {
        (1e-3f64..20.0, -20.0f64..20.0).prop_map(|(x, y)| c(x, y))
    }

    pub fn disk_point(radius: f64) -> impl Strategy<Value = Complex64> {
        (0.0f64..radius, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }
}
