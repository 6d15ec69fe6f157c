//! Residual channels of the parabolic expansions of `1/(1 - F_t(z))` and
//! `Φ_t(w)`; each channel tends to zero as `t → ∞`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::asymptote::{estimate_a, AOptions};
use crate::cayley;
use crate::error::{Error, Result};
use crate::flow::{self, FlowConfig, Schedule};
use crate::generators::GeneratorClass;
use crate::koenigs::KoenigsEngine;

/// Channel names in report order.
pub const CHANNELS: [&str; 10] = [
    "G", "G1", "G2", "D", "tD", "Gamma", "Gamma1", "Gamma2", "Delta", "tDelta",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualChannel {
    pub name: String,
    /// What is tabulated, e.g. `G(z,t)/t`.
    pub quantity: String,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `|v_k| / |v_{k+1}|` rescaled to one decade of `t`, per consecutive
    /// pair; `None` where a value is exactly zero.
    pub decay_per_decade: Vec<Option<f64>>,
}

impl ResidualChannel {
    fn new(name: &str, quantity: &str, times: &[f64], values: Vec<Complex64>) -> Self {
        let decay_per_decade = times
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| {
                let decades = (t[1] / t[0]).log10();
                let r = (v[0].norm() / v[1].norm()).powf(1.0 / decades);
                r.is_finite().then_some(r)
            })
            .collect();
        Self {
            name: name.into(),
            quantity: quantity.into(),
            times: times.to_vec(),
            values,
            decay_per_decade,
        }
    }

    pub fn last_magnitude(&self) -> f64 {
        self.values.last().map_or(f64::NAN, |v| v.norm())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionLog {
    pub z: Complex64,
    /// Half-plane constant `A`.
    pub a_halfplane: Complex64,
    pub a_error: f64,
    pub channels: Vec<ResidualChannel>,
}

impl ExpansionLog {
    pub fn channel(&self, name: &str) -> Option<&ResidualChannel> {
        self.channels.iter().find(|c| c.name == name)
    }
}

/// Evaluates every residual channel at the times of `grid` for the orbit of
/// `z` (and of `0`, `w = C(z)`, `1` for the difference channels).
pub fn expansion_residuals(
    engine: &KoenigsEngine,
    z: Complex64,
    grid: &Schedule,
    opts: AOptions,
    cfg: FlowConfig,
) -> Result<ExpansionLog> {
    if engine.class() != GeneratorClass::Parabolic {
        return Err(Error::Class("expansion residuals are defined for parabolic generators".into()));
    }
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("|z| = {} is not < 1", z.norm())));
    }
    let tay = *engine.generator().taylor();
    let (b, c) = (tay.b, tay.c);
    let gen = engine.halfplane();
    let (beta, gamma) = (gen.beta, gen.gamma);
    let a = estimate_a(gen, opts, cfg)?;
    let a_disk = a.disk;

    let times = grid.times()?;
    if times.iter().any(|t| *t <= 0.0) {
        return Err(Error::Domain("expansion grid times must be positive".into()));
    }
    let t_last = *times.last().ok_or_else(|| Error::Domain("empty grid".into()))?;
    let cfg = FlowConfig {
        t_max: cfg.t_max.max(t_last),
        ..cfg
    };
    let w = cayley::to_halfplane(z);
    let one = Complex64::new(1.0, 0.0);
    let orbit_w = flow::sample_trajectory(gen, w, grid, cfg)?.points_w;
    let orbit_1 = flow::sample_trajectory(gen, one, grid, cfg)?.points_w;
    let h = engine.koenigs_h(z)?;
    let sigma = engine.sigma(w)?;

    let mut cols: Vec<Vec<Complex64>> = vec![Vec::with_capacity(times.len()); CHANNELS.len()];
    for (k, &t) in times.iter().enumerate() {
        let (pw, p1) = (orbit_w[k], orbit_1[k]);
        let log = (t + 1.0).ln();
        // 1/(1 - F_t) = (Φ_t + 1)/2
        let inv_z = cayley::inv_one_minus(pw);
        let inv_0 = cayley::inv_one_minus(p1);
        let g = inv_z + b * t;
        let g1 = g + c / b * log;
        let g2 = g1 + b * h - a_disk;
        let d = inv_z - inv_0 + b * h;
        let gam = pw - beta * t;
        let gam1 = gam - gamma / beta * log;
        let gam2 = gam1 - beta * sigma - a.value;
        let delta = pw - p1 - beta * sigma;
        let vals = [
            g / t,
            g1 / log,
            g2,
            d,
            t * d + c / b * h,
            gam / t,
            gam1 / log,
            gam2,
            delta,
            t * delta - gamma * sigma / beta,
        ];
        for (col, v) in cols.iter_mut().zip(vals) {
            col.push(v);
        }
    }
    let quantities = [
        "G(z,t)/t",
        "G1(z,t)/log(t+1)",
        "G2(z,t)",
        "1/(1-F_t(z)) - 1/(1-F_t(0)) + b h(z)",
        "t(1/(1-F_t(z)) - 1/(1-F_t(0)) + b h(z)) + (c/b) h(z)",
        "Gamma(w,t)/t",
        "Gamma1(w,t)/log(t+1)",
        "Gamma2(w,t)",
        "Phi_t(w) - Phi_t(1) - beta sigma(w)",
        "t(Phi_t(w) - Phi_t(1) - beta sigma(w)) - gamma sigma(w)/beta",
    ];
    let channels = CHANNELS
        .iter()
        .zip(quantities)
        .zip(cols)
        .map(|((name, q), vals)| ResidualChannel::new(name, q, &times, vals))
        .collect();
    Ok(ExpansionLog {
        z,
        a_halfplane: a.value,
        a_error: a.error,
        channels,
    })
}
