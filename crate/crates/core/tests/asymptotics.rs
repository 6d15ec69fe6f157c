mod common;

use std::f64::consts::PI;

use common::strategies::{admissible, disk_point};
use common::*;
use diskflow::asymptotics::*;
use diskflow::cayley;
use diskflow::flow::{sample_trajectory, FlowConfig, Integrator, Schedule};
use diskflow::koenigs::KoenigsEngine;
use diskflow::{Error, GeneratorSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn from_halfplane(beta: Complex64, gamma: Complex64) -> GeneratorSpec {
    GeneratorSpec::from_halfplane(0.0, beta, gamma, &[]).unwrap()
}

#[test]
fn dichotomy_on_coefficient_grid() {
    let grid = [
        (c(1.0, 0.0), c(1.0, 0.0)),
        (c(1.0, 0.0), c(0.0, 1.0)),
        (c(1.0, 0.0), c(0.5, 0.5)),
        (c(1.0, 1.0), c(0.0, 0.5)),
        (c(1.0, 1.0), c(0.5, 0.0)),
        (c(0.0, 1.0), c(0.5, 0.0)),
    ];
    let mut branches = [0, 0];
    for (beta, gamma) in grid {
        let g = from_halfplane(beta, gamma);
        let divergent_expected = (gamma / (beta * beta)).im.abs() > 1e-12;
        branches[divergent_expected as usize] += 1;
        let est = limit_curvature_numeric(&g, c(0.0, 0.0), &default_curvature_schedule(&g), FlowConfig::default()).unwrap();
        assert_eq!(est.is_divergent(), divergent_expected, "β={beta} γ={gamma}: {est:?}");
        let asym = asymptote_halfplane(&KoenigsEngine::new(g), c(1.0, 0.0), AOptions::default(), FlowConfig::default()).unwrap();
        assert_eq!(asym.line().is_none(), divergent_expected);
    }
    assert_eq!(branches, [3, 3]);
}

#[test]
fn finiteness_does_not_depend_on_the_initial_point() {
    for (g, divergent) in [(&corpus()[4], false), (&corpus()[5], true)] {
        for z0 in [c(0.0, 0.0), c(0.3, 0.0), c(0.0, -0.4)] {
            let est = limit_curvature_numeric(g, z0, &default_curvature_schedule(g), FlowConfig::default()).unwrap();
            assert_eq!(est.is_divergent(), divergent, "{} z0={z0}", g.id());
        }
    }
}

#[test]
fn numeric_and_exact_parabolic_curvature_agree() {
    for g in [&corpus()[4], &par_exact()] {
        let e = KoenigsEngine::new(g.clone());
        for z0 in [c(0.0, 0.0), c(0.3, 0.0), c(0.0, -0.4)] {
            let exact = parabolic_limit_curvature(&e, z0, AOptions::default(), FlowConfig::precise()).unwrap();
            let numeric = limit_curvature_numeric(g, z0, &default_curvature_schedule(g), FlowConfig::precise())
                .unwrap()
                .finite_value()
                .unwrap();
            assert!((exact.value() - numeric).abs() < 1e-3, "{} z0={z0}: {exact:?} vs {numeric}", g.id());
        }
    }
}

#[test]
fn horocycle_curvature_family() {
    let e = KoenigsEngine::new(corpus()[3].clone());
    for x0 in [0.5, 1.0, 3.0] {
        let z0 = c((x0 - 1.0) / (x0 + 1.0), 0.0);
        let k = parabolic_limit_curvature(&e, z0, AOptions::default(), FlowConfig::default()).unwrap();
        assert!((k.value() - (1.0 + x0)).abs() < 1e-9, "x0={x0}: {k:?}");
    }
    let k = parabolic_limit_curvature(
        &KoenigsEngine::new(corpus()[5].clone()),
        c(0.0, 0.0),
        AOptions::default(),
        FlowConfig::default(),
    )
    .unwrap();
    assert_eq!(k.value(), f64::INFINITY);
}

#[test]
fn parabolic_curvature_refuses_out_of_scope_input() {
    let hyp = KoenigsEngine::new(corpus()[0].clone());
    let zero_b = KoenigsEngine::new(spec(0.0, c(0.0, 0.0), c(0.1, 0.0), vec![], "zero_b"));
    for e in [hyp, zero_b] {
        let r = parabolic_limit_curvature(&e, c(0.0, 0.0), AOptions::default(), FlowConfig::default());
        assert!(matches!(r, Err(Error::Class(_))), "{r:?}");
    }
    let zero_b = KoenigsEngine::new(spec(0.0, c(0.0, 0.0), c(0.1, 0.0), vec![], "zero_b"));
    assert!(matches!(slope(&zero_b, c(0.0, 0.0)), Err(Error::Class(_))));
}

#[test]
fn limit_circles_pass_through_one() {
    for g in corpus() {
        let e = KoenigsEngine::new(g.clone());
        for z0 in [c(0.0, 0.0), c(0.3, 0.2)] {
            let circle = match g.taylor().a > 0.0 {
                true => Some(hyperbolic_limit_circle(&e, z0).unwrap().circle),
                false => match parabolic_limit_curvature(&e, z0, AOptions::default(), FlowConfig::default()).unwrap() {
                    ParabolicCurvature::Finite { circle, .. } => Some(circle),
                    ParabolicCurvature::Infinite { .. } => None,
                },
            };
            if let Some(circle) = circle {
                assert!(circle.distance(c(1.0, 0.0)) < 1e-10, "{}: {circle:?}", g.id());
            }
        }
    }
}

#[test]
fn orbits_approach_their_asymptotes() {
    let cfg = FlowConfig::precise();
    for g in [&corpus()[3], &corpus()[4], &par_exact()] {
        let e = KoenigsEngine::new(g.clone());
        let w0 = c(0.7, 0.4);
        let line = *asymptote_halfplane(&e, w0, AOptions::default(), cfg).unwrap().line().unwrap();
        let traj = sample_trajectory(e.halfplane(), w0, &Schedule::decades(1e2, 1e5, 4), cfg).unwrap();
        let d: Vec<f64> = traj.points_w.iter().map(|w| line.distance(*w)).collect();
        assert!(d.windows(2).all(|p| p[1] <= p[0] + 1e-12), "{}: {d:?}", g.id());
        assert!(*d.last().unwrap() < 1e-3, "{}: {d:?}", g.id());
    }
    for g in [&corpus()[1], &corpus()[2]] {
        let e = KoenigsEngine::new(g.clone());
        let w0 = c(1.0, 0.0);
        let line = *asymptote_halfplane(&e, w0, AOptions::default(), cfg).unwrap().line().unwrap();
        let traj = sample_trajectory(e.halfplane(), w0, &Schedule::linear(12.0, 7), cfg).unwrap();
        let d: Vec<f64> = traj.points_w.iter().map(|w| line.distance(*w)).collect();
        assert!(d.last().unwrap() < &1e-3, "{}: {d:?}", g.id());
    }
}

#[test]
fn parabolic_slope_is_independent_of_the_initial_point() {
    for g in [&corpus()[3], &corpus()[4], &corpus()[5]] {
        let e = KoenigsEngine::new(g.clone());
        let s0 = slope(&e, c(0.0, 0.0)).unwrap();
        let m = (s0 + g.taylor().b.arg()).rem_euclid(PI);
        assert!(m.min(PI - m) < 1e-12);
        for z0 in disk_grid() {
            assert_eq!(slope(&e, z0).unwrap(), s0);
            let cfg = FlowConfig { t_max: 1e4, ..FlowConfig::default() };
            let measured = measured_slope(g, z0, 1e4, cfg).unwrap();
            assert!((measured - s0).abs() < 1e-2, "{} z0={z0}: {measured} vs {s0}", g.id());
        }
    }
}

#[test]
fn expansion_channels() {
    // 1/(1 - F_t(1/2)) - 1/(1 - F_t(0)) → -b h(1/2) = 1 for b = -i/2
    let auto = KoenigsEngine::new(corpus()[3].clone());
    let grid = Schedule::Explicit { times: vec![1e2, 1e3, 1e4] };
    let log = expansion_residuals(&auto, c(0.5, 0.0), &grid, AOptions::default(), FlowConfig::precise()).unwrap();
    assert!((-auto.generator().taylor().b * auto.koenigs_h(c(0.5, 0.0)).unwrap() - 1.0).norm() < 1e-12);
    assert!(log.channel("D").unwrap().last_magnitude() < 1e-9);
    let g = log.channel("G").unwrap();
    assert!(g.decay_per_decade.iter().all(|r| r.unwrap() >= 5.0));

    let exact = KoenigsEngine::new(par_exact());
    let log = expansion_residuals(&exact, c(0.2, 0.1), &Schedule::decades(1e2, 1e5, 1), AOptions::default(), FlowConfig::precise()).unwrap();
    for name in ["G2", "Gamma2", "D", "Delta", "tD", "tDelta"] {
        let ch = log.channel(name).unwrap();
        assert!(ch.values[3].norm() < ch.values[0].norm(), "{name}: {ch:?}");
    }
    assert!(log.channel("Gamma2").unwrap().last_magnitude() < 1e-3);
    assert!(matches!(
        expansion_residuals(&KoenigsEngine::new(corpus()[0].clone()), c(0.0, 0.0), &grid, AOptions::default(), FlowConfig::default()),
        Err(Error::Class(_))
    ));
}

#[test]
fn shift_classes() {
    let cases = [
        (corpus()[3].clone(), ShiftClass::FiniteShift),
        (spec(0.0, c(0.0, 0.5), c(0.0, 0.0), vec![], "b_up"), ShiftClass::FiniteShift),
        (corpus()[4].clone(), ShiftClass::InfiniteShift),
        (spec(0.0, c(-5e-4, 0.5), c(0.0, 0.0), vec![], "perturbed"), ShiftClass::InfiniteShift),
    ];
    for (g, want) in cases {
        let r = shift_class(&g.to_halfplane(), c(1.0, 0.0), 1e6, FlowConfig::default()).unwrap();
        assert_eq!(r.class, want, "{}: {:?}", g.id(), r.samples);
        assert_eq!(g.taylor().b.re < 0.0, want == ShiftClass::InfiniteShift);
    }
}

#[test]
fn reports_are_consistent() {
    for g in corpus() {
        let e = KoenigsEngine::new(g.clone());
        let r = build_report(&e, c(0.0, 0.0), &ReportOptions::default()).unwrap();
        assert_eq!(r.limit_curvature.finite, r.asymptote.is_some(), "{}", g.id());
        assert!(!r.log.iter().any(|l| l.contains("differs")), "{}: {:?}", g.id(), r.log);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["class", "slope", "limit_curvature", "asymptote", "constants", "residuals"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_matches_three_point_circle(g in admissible(None), z0 in disk_point(0.8), t in 0.1f64..2.0) {
        let delta = 1e-3;
        let h = g.to_halfplane();
        let mut integ = Integrator::new(&h, cayley::to_halfplane(z0), FlowConfig::precise()).unwrap();
        let p = cayley::to_disk(integ.advance_to(t - delta).unwrap());
        let q = cayley::to_disk(integ.advance_to(t).unwrap());
        let r = cayley::to_disk(integ.advance_to(t + delta).unwrap());
        let fit = three_point_curvature(p, q, r);
        let formula = curvature_at(&g, q).unwrap();
        prop_assert!((fit - formula).abs() <= 1e-4 * formula.abs().max(1.0), "{fit} vs {formula}");
    }

    #[test]
    fn halfplane_curvature_agrees_with_disk(g in admissible(None), z in disk_point(0.95)) {
        let kz = curvature_at(&g, z).unwrap();
        let kw = curvature_at_halfplane(&g, cayley::to_halfplane(z)).unwrap();
        prop_assert!((kz - kw).abs() <= 1e-9 * (1.0 + kz.abs()));
    }
}
