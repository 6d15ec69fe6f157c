//! SVG plot and Markdown summary of a finished scenario.

use std::fmt::Write;

use diskflow::asymptotics::DiskCircle;
use num_complex::Complex64;
use serde_json::Value;

use crate::scenario::Task;
use crate::tasks::Outcome;
use crate::verify::{show, CheckResult};

const SIZE: f64 = 640.0;
const SCALE: f64 = 280.0;
const TANGENT_HALF_LENGTH: f64 = 0.18;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn px(z: Complex64) -> (f64, f64) {
    (SIZE / 2.0 + SCALE * z.re, SIZE / 2.0 - SCALE * z.im)
}

fn segment(out: &mut String, a: Complex64, b: Complex64, style: &str) {
    let ((x1, y1), (x2, y2)) = (px(a), px(b));
    writeln!(out, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" {style}/>"#).unwrap();
}

/// Orbits in the disk with tangent lines `L_t`, the limit circles or lines,
/// and the unit circle. The first line is a version comment.
pub fn svg(outcome: &Outcome) -> String {
    let mut s = String::new();
    writeln!(s, "<!-- diskflow {} -->", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#).unwrap();
    let (cx, cy) = px(Complex64::new(0.0, 0.0));
    writeln!(
        s,
        r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{SCALE:.3}" fill="none" stroke="#000" stroke-width="1.2"/>"##
    )
    .unwrap();

    for circle in &outcome.overlays {
        let style = r##"fill="none" stroke="#555" stroke-width="1" stroke-dasharray="6 4""##;
        match *circle {
            DiskCircle::Circle { center, radius } => {
                let (x, y) = px(center);
                writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" {style}/>"#, radius * SCALE).unwrap();
            }
            DiskCircle::Line { direction } => {
                let one = Complex64::new(1.0, 0.0);
                let d = direction / direction.norm();
                segment(&mut s, one - 3.0 * d, one + 3.0 * d, style);
            }
        }
    }

    for orbit in &outcome.orbits {
        let color = COLORS[(orbit.generator * 3 + orbit.point) % COLORS.len()];
        let pts: Vec<String> = orbit
            .trajectory
            .points_z()
            .iter()
            .map(|z| {
                let (x, y) = px(*z);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
            pts.join(" ")
        )
        .unwrap();
        if let Some(z0) = orbit.trajectory.points_z().first() {
            let (x, y) = px(*z0);
            writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="{color}"/>"#).unwrap();
        }
        let style = format!(r#"stroke="{color}" stroke-width="0.8" stroke-opacity="0.7""#);
        for (z, d) in &orbit.tangents {
            segment(&mut s, z - TANGENT_HALF_LENGTH * d, z + TANGENT_HALF_LENGTH * d, &style);
        }
    }

    let (x, y) = px(Complex64::new(1.0, 0.0));
    writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="black"/>"#).unwrap();
    writeln!(s, "</svg>").unwrap();
    s
}

fn key_fields(task: Task) -> &'static [(&'static str, &'static str)] {
    match task {
        Task::Trajectory => &[("t_final", "/t_final"), ("z_final", "/z_final")],
        Task::Slope => &[("slope (formula)", "/slope/formula"), ("slope (measured)", "/slope/measured")],
        Task::Curvature => &[("limit curvature", "/limit_curvature"), ("shift", "/shift_class")],
        Task::Asymptote => &[
            ("asymptote", "/asymptote/kind"),
            ("anchor", "/asymptote/line/anchor"),
            ("direction", "/asymptote/line/direction"),
            ("log rate", "/asymptote/log_rate"),
        ],
        Task::Expansion => &[
            ("A", "/expansion/a_halfplane"),
            ("|G2| last", "/last_magnitudes/G2"),
            ("|Gamma2| last", "/last_magnitudes/Gamma2"),
        ],
        Task::Rigidity => &[
            ("class", "/classification"),
            ("kappa1", "/fit/kappa1"),
            ("kappa0", "/fit/kappa0"),
            ("predicted kappa1", "/coefficients/predicted_kappa1"),
            ("predicted kappa0", "/coefficients/predicted_kappa0"),
        ],
        Task::FullReport => &[
            ("class", "/class"),
            ("slope", "/slope/formula"),
            ("limit curvature", "/limit_curvature/value"),
            ("shift", "/shift_class"),
            ("univalence margin", "/univalence_margin"),
        ],
    }
}

pub fn markdown(task: Task, report: &Value, checks: &[CheckResult]) -> String {
    let mut s = String::new();
    let name = report["scenario"].as_str().unwrap_or("scenario");
    writeln!(s, "# {name}\n").unwrap();
    if let Some(d) = report["description"].as_str() {
        writeln!(s, "{d}\n").unwrap();
    }
    writeln!(s, "- task: `{}`", task.name()).unwrap();
    if let Some(gens) = report["generators"].as_array() {
        for g in gens {
            writeln!(s, "- generator: `{g}`").unwrap();
        }
    }
    writeln!(s, "\n## Results\n").unwrap();
    let fields = key_fields(task);
    let mut header = String::from("| # | point |");
    let mut rule = String::from("|---|---|");
    for (label, _) in fields {
        header.push_str(&format!(" {label} |"));
        rule.push_str("---|");
    }
    writeln!(s, "{header}\n{rule}").unwrap();
    for (k, r) in report["results"].as_array().into_iter().flatten().enumerate() {
        let point = r.get("z0").or_else(|| r.get("point")).map_or("".into(), show);
        let mut row = format!("| {k} | {point} |");
        for (_, ptr) in fields {
            let cell = r.pointer(ptr).filter(|v| !v.is_null()).map_or("none".into(), show);
            row.push_str(&format!(" {cell} |"));
        }
        writeln!(s, "{row}").unwrap();
    }
    if !checks.is_empty() {
        writeln!(s, "\n## Checks\n\n| check | measured | expected | result |\n|---|---|---|---|").unwrap();
        for c in checks {
            writeln!(
                s,
                "| {} | {} | {} | {} |",
                c.label,
                show(&c.measured),
                c.expected,
                if c.pass { "pass" } else { "FAIL" }
            )
            .unwrap();
        }
    }
    s
}
