//! One-call summary of the boundary behavior of a single orbit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::asymptote::{
    asymptote_halfplane, estimate_a, parabolic_limit_curvature, shift_class, AOptions, AsymptoteEstimate,
    ParabolicCurvature, ShiftClass,
};
use super::curvature::{hyperbolic_limit_circle, measured_slope, slope};
use super::expansion::{expansion_residuals, ResidualChannel};
use super::geometry::{AsymptoteLine, DiskCircle};
use crate::cayley;
use crate::error::{Error, Result};
use crate::flow::{FlowConfig, Schedule};
use crate::generators::GeneratorClass;
use crate::koenigs::KoenigsEngine;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub flow: FlowConfig,
    pub a: AOptions,
    /// Times for the parabolic residual channels.
    pub expansion_grid: Schedule,
    /// Time of the finite-`t` slope measurement; `None` picks `30/a`
    /// (hyperbolic) or `10^4` (parabolic).
    pub slope_time: Option<f64>,
    /// Horizon of the finite-shift test.
    pub shift_t_max: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            flow: FlowConfig::default(),
            a: AOptions::default(),
            expansion_grid: Schedule::decades(1e2, 1e5, 1),
            slope_time: None,
            shift_t_max: 1e6,
        }
    }
}

/// Hyperbolic slope `a [lim Im h(r) - Im h(z0)]`, term by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeDecomposition {
    pub a: f64,
    pub boundary_limit: f64,
    pub im_h_z0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub formula: f64,
    pub measured: f64,
    pub measured_at: f64,
    pub decomposition: Option<SlopeDecomposition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCurvature {
    pub finite: bool,
    /// `None` when the limit curvature is infinite.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Half-plane constant `A` (parabolic).
    pub a: Option<Complex64>,
    /// Disk constant `(A + 1)/2` (parabolic).
    pub a_disk: Option<Complex64>,
    /// Hyperbolic: complex `B`; parabolic: the real asymptote offset.
    pub b: Option<Complex64>,
    /// Disk constant `C` of the parabolic limit curvature `|2C/b|`.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub generator: String,
    pub class: GeneratorClass,
    pub z0: Complex64,
    pub w0: Complex64,
    pub slope: SlopeReport,
    pub limit_curvature: LimitCurvature,
    pub limit_circle: Option<DiskCircle>,
    pub asymptote: Option<AsymptoteLine>,
    pub constants: Constants,
    pub shift_class: Option<ShiftClass>,
    pub residuals: Vec<ResidualChannel>,
    pub log: Vec<String>,
}

/// Formula slope next to a finite-`t` measurement.
pub fn slope_report(engine: &KoenigsEngine, z0: Complex64, opts: &ReportOptions) -> Result<SlopeReport> {
    if !(z0.norm() < 1.0) {
        return Err(Error::Domain(format!("|z0| = {} is not < 1", z0.norm())));
    }
    let gen = engine.generator();
    let tay = *gen.taylor();
    let class = engine.class();
    let cfg = opts.flow;
    let formula = slope(engine, z0)?;
    let measured_at = opts.slope_time.unwrap_or(match class {
        GeneratorClass::Hyperbolic => 30.0 / tay.a,
        GeneratorClass::Parabolic => 1e4,
    });
    let cfg_slope = FlowConfig {
        t_max: cfg.t_max.max(measured_at),
        ..cfg
    };
    let measured = measured_slope(gen, z0, measured_at, cfg_slope)?;
    let decomposition = match class {
        GeneratorClass::Hyperbolic => Some(SlopeDecomposition {
            a: tay.a,
            boundary_limit: engine.boundary_imag_limit()?.value,
            im_h_z0: engine.koenigs_h(z0)?.im,
        }),
        GeneratorClass::Parabolic => None,
    };
    Ok(SlopeReport {
        formula,
        measured,
        measured_at,
        decomposition,
    })
}

pub fn build_report(engine: &KoenigsEngine, z0: Complex64, opts: &ReportOptions) -> Result<AsymptoticReport> {
    if !(z0.norm() < 1.0) {
        return Err(Error::Domain(format!("|z0| = {} is not < 1", z0.norm())));
    }
    let gen = engine.generator();
    let class = engine.class();
    let w0 = cayley::to_halfplane(z0);
    let cfg = opts.flow;
    let mut log = Vec::new();

    let slope_report = slope_report(engine, z0, opts)?;

    let asymptote = asymptote_halfplane(engine, w0, opts.a, cfg)?;
    let mut constants = Constants {
        a: None,
        a_disk: None,
        b: None,
        c: None,
    };
    let (limit_curvature, limit_circle, shift, residuals) = match class {
        GeneratorClass::Hyperbolic => {
            let hc = hyperbolic_limit_circle(engine, z0)?;
            constants.b = Some(hc.big_b);
            if let Some(line) = asymptote.line() {
                let pulled = line.pullback_to_disk().curvature();
                if (pulled - hc.circle.curvature()).abs() > 1e-6 * (1.0 + pulled) {
                    log.push(format!(
                        "asymptote pullback curvature {pulled} differs from the limit circle curvature {}",
                        hc.circle.curvature()
                    ));
                }
            }
            let lc = LimitCurvature {
                finite: true,
                value: Some(hc.circle.curvature()),
            };
            (lc, Some(hc.circle), None, Vec::new())
        }
        GeneratorClass::Parabolic => {
            let a = estimate_a(engine.halfplane(), opts.a, cfg)?;
            constants.a = Some(a.value);
            constants.a_disk = Some(a.disk);
            let pc = parabolic_limit_curvature(engine, z0, opts.a, cfg)?;
            let (lc, circle) = match &pc {
                ParabolicCurvature::Infinite { log_rate } => {
                    log.push(format!("Im(c/b²) ≠ 0: Im(w conj β) grows like {log_rate}·log(t+1)"));
                    (
                        LimitCurvature {
                            finite: false,
                            value: None,
                        },
                        None,
                    )
                }
                ParabolicCurvature::Finite {
                    value,
                    circle,
                    big_b,
                    big_c,
                    log: notes,
                    ..
                } => {
                    constants.b = Some(Complex64::new(*big_b, 0.0));
                    constants.c = Some(*big_c);
                    log.extend(notes.iter().cloned());
                    (
                        LimitCurvature {
                            finite: true,
                            value: Some(*value),
                        },
                        Some(*circle),
                    )
                }
            };
            let shift = shift_class(engine.halfplane(), w0, opts.shift_t_max, cfg)?.class;
            let residuals = expansion_residuals(engine, z0, &opts.expansion_grid, opts.a, cfg)?.channels;
            (lc, circle, Some(shift), residuals)
        }
    };
    if (slope_report.measured - slope_report.formula).abs() > 1e-2 {
        log.push(format!(
            "measured slope {} at t = {} differs from the formula value {}",
            slope_report.measured, slope_report.measured_at, slope_report.formula
        ));
    }
    let asymptote_line = match asymptote {
        AsymptoteEstimate::Line { line, .. } => Some(line),
        AsymptoteEstimate::Absent { .. } => None,
    };
    debug_assert_eq!(limit_curvature.finite, asymptote_line.is_some());
    Ok(AsymptoticReport {
        generator: gen.id().to_string(),
        class,
        z0,
        w0,
        slope: slope_report,
        limit_curvature,
        limit_circle,
        asymptote: asymptote_line,
        constants,
        shift_class: shift,
        residuals,
        log,
    })
}
