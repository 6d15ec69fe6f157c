//! Adaptive Gauss-Kronrod (7/15) quadrature for complex-valued integrands,
//! on real intervals and on straight segments in the complex plane.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// The 15 Kronrod nodes mapped onto `[lo, hi]`, in increasing order.
pub fn gk15_nodes(lo: f64, hi: f64) -> [f64; 15] {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut nodes = [0.0; 15];
    for j in 0..7 {
        nodes[j] = center - half * XGK[j];
        nodes[14 - j] = center + half * XGK[j];
    }
    nodes[7] = center;
    nodes
}

/// Applies the 7/15 rule to integrand values sampled at [`gk15_nodes`].
/// Returns the Kronrod value and a QUADPACK-style error estimate.
pub fn gk15_apply(values: &[Complex64; 15], lo: f64, hi: f64) -> (Complex64, f64) {
    let half = 0.5 * (hi - lo);
    let center_val = values[7];
    let mut kronrod = center_val * WGK[7];
    let mut gauss = center_val * WG[3];
    let mut res_abs = center_val.norm() * WGK[7];
    for j in 0..7 {
        let pair = values[j] + values[14 - j];
        kronrod += pair * WGK[j];
        res_abs += WGK[j] * (values[j].norm() + values[14 - j].norm());
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (center_val - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((values[j] - mean).norm() + (values[14 - j] - mean).norm());
    }
    let abs_half = half.abs();
    let err = rescale_error(
        ((kronrod - gauss) * half).norm(),
        res_abs * abs_half,
        res_asc * abs_half,
    );
    (kronrod * half, err)
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
}

fn panel<F: FnMut(f64) -> Complex64>(f: &mut F, lo: f64, hi: f64) -> Panel {
    let nodes = gk15_nodes(lo, hi);
    let values = nodes.map(&mut *f);
    let (value, error) = gk15_apply(&values, lo, hi);
    Panel {
        lo,
        hi,
        value,
        error,
    }
}

/// Globally adaptive integration of `f` over `[lo, hi]`.
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    lo: f64,
    hi: f64,
    opts: QuadratureOptions,
) -> Result<Estimate> {
    if lo == hi {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut panels = vec![panel(&mut f, lo, hi)];
    let mut evaluations = 15;
    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= tol {
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
            });
        }
        if panels.len() >= opts.max_subdivisions {
            return Err(Error::QuadratureFailure { tol, err });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if mid <= p.lo.min(p.hi) || mid >= p.lo.max(p.hi) {
            return Err(Error::QuadratureFailure { tol, err });
        }
        panels.push(panel(&mut f, p.lo, mid));
        panels.push(panel(&mut f, mid, p.hi));
        evaluations += 30;
    }
}

/// `∫ f(ζ) dζ` along the straight segment from `from` to `to`.
pub fn integrate_segment<F: FnMut(Complex64) -> Complex64>(
    mut f: F,
    from: Complex64,
    to: Complex64,
    opts: QuadratureOptions,
) -> Result<Estimate> {
    let dir = to - from;
    let mut est = integrate(|s| f(from + dir * s), 0.0, 1.0, opts)?;
    est.value *= dir;
    est.error *= dir.norm();
    Ok(est)
}
