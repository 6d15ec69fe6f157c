//! Slope, curvature, asymptotes and expansion constants of semigroup orbits.

pub mod asymptote;
pub mod curvature;
pub mod expansion;
pub mod geometry;
pub mod report;

pub use asymptote::{
    asymptote_halfplane, estimate_a, flow_integral, log_growth_fit, log_rate, parabolic_limit_curvature,
    shift_class, AOptions, AsymptoteEstimate, ConstantA, FlowIntegral, ParabolicCurvature, ShiftClass,
    ShiftReport,
};
pub use curvature::{
    curvature_at, curvature_at_halfplane, default_curvature_schedule, hyperbolic_limit_circle,
    limit_curvature_numeric, measured_slope, slope, HyperbolicCircle, LimitCurvatureEstimate,
};
pub use expansion::{expansion_residuals, ExpansionLog, ResidualChannel};
pub use geometry::{AsymptoteLine, DiskCircle};
pub use report::{build_report, slope_report, AsymptoticReport, ReportOptions, SlopeReport};
