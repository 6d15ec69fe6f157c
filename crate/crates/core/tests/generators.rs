mod common;

use common::strategies::{admissible, disk_point, halfplane_point};
use common::*;
use diskflow::cayley;
use diskflow::generators::{GeneratorDescriptor, HalfPlaneGenerator};
use diskflow::{Error, GeneratorClass, GeneratorSpec, TaylorData};
use num_complex::Complex64;
use proptest::prelude::*;

fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c(0.0, 0.0), |acc, k| acc * x + k)
}

#[test]
fn construction_examples() {
    let auto = GeneratorSpec::new(TaylorData::parabolic(c(0.0, -0.5), c(0.0, 0.0)), vec![]).unwrap();
    assert!(auto.min_re_p().abs() < 1e-15);
    let lin = GeneratorSpec::new(TaylorData::new(1.0, c(0.0, 0.0), c(0.0, 0.0)), vec![]).unwrap();
    assert!(lin.min_re_p() > 0.0);
    let bad = GeneratorSpec::new(TaylorData::parabolic(c(1.0, 0.0), c(0.0, 0.0)), vec![]);
    match bad {
        Err(Error::Admissibility { min_re_p, .. }) => assert!((min_re_p + 1.0).abs() < 1e-12),
        other => panic!("expected an admissibility error, got {other:?}"),
    }
    assert!(matches!(
        GeneratorSpec::new(TaylorData::parabolic(c(0.0, 0.0), c(0.0, 0.0)), vec![c(0.0, 0.0)]),
        Err(Error::Degenerate(_))
    ));
}

#[test]
fn evaluation_examples() {
    let lin = &corpus()[0];
    assert_eq!(lin.eval_f(c(0.0, 0.0)).unwrap(), c(-1.0, 0.0));
    assert_eq!(lin.eval_f_prime(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    let auto = &corpus()[3];
    assert_eq!(auto.eval_f(c(0.0, 0.0)).unwrap(), c(0.0, -0.5));
    assert_eq!(auto.eval_f_prime(c(0.0, 0.0)).unwrap(), c(0.0, 1.0));
    assert!(matches!(auto.eval_f(c(0.6, 0.8)), Err(Error::Domain(_))));

    // not a generator, but evaluation is pure coefficient arithmetic
    let g = GeneratorSpec::unchecked(TaylorData::parabolic(c(1.0, 1.0), c(2.0, 0.0)), vec![c(0.5, -0.25)]);
    let z = c(0.5, 0.0);
    let coeffs = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0), c(0.5, -0.25)];
    let want = horner(&coeffs, z - 1.0);
    assert!((g.eval_f(z).unwrap() - want).norm() < 1e-15);
    let dcoeffs: Vec<Complex64> = coeffs.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect();
    assert!((g.eval_f_prime(z).unwrap() - horner(&dcoeffs, z - 1.0)).norm() < 1e-15);
}

#[test]
fn classification_and_transport_examples() {
    assert_eq!(corpus()[0].classify(), GeneratorClass::Hyperbolic);
    assert_eq!(corpus()[3].classify(), GeneratorClass::Parabolic);
    let h = corpus()[0].to_halfplane();
    assert_eq!((h.alpha, h.beta), (1.0, c(1.0, 0.0)));
    let h = corpus()[3].to_halfplane();
    assert_eq!((h.alpha, h.beta), (0.0, c(0.0, 1.0)));
    let h = corpus()[5].to_halfplane();
    assert_eq!((h.beta, h.gamma), (c(1.0, 0.0), c(0.0, 1.0)));
}

#[test]
fn descriptor_json() {
    let g = GeneratorSpec::from_json(r#"{"b": [0, -0.5]}"#).unwrap();
    assert_eq!(g.taylor().b, c(0.0, -0.5));
    assert_eq!(g.taylor().epsilon, 1.0);
    assert!(matches!(GeneratorSpec::from_json(r#"{"b": [1, 0]}"#), Err(Error::Admissibility { .. })));
    assert!(matches!(GeneratorSpec::from_json(r#"{"a": 1, "d": 3}"#), Err(Error::Descriptor(_))));
    assert!(matches!(GeneratorSpec::from_json(r#"{"a": -1}"#), Err(Error::Descriptor(_))));
    let text = serde_json::to_string(&corpus()[4].descriptor()).unwrap();
    let desc: GeneratorDescriptor = serde_json::from_str(&text).unwrap();
    assert_eq!(GeneratorSpec::from_descriptor(&desc).unwrap(), corpus()[4]);
}

#[test]
fn corpus_is_admissible_on_transported_grid() {
    for g in corpus() {
        let h = g.to_halfplane();
        let grid = HalfPlaneGenerator::transported_grid(&g.validation_grid());
        assert!(grid.len() >= 4096);
        let worst = grid.iter().map(|w| h.eval(*w).re).fold(f64::INFINITY, f64::min);
        assert!(worst >= -1e-12, "{}: {worst}", g.id());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transport_matches_disk_formula(g in admissible(None), w in halfplane_point()) {
        let h = g.to_halfplane();
        let phi = h.eval(w);
        let via_disk = 2.0 * g.eval_p(cayley::to_disk(w)).unwrap();
        prop_assert!((phi - via_disk).norm() <= 1e-12 * (1.0 + phi.norm()) * (1.0 + w.norm()));
    }

    #[test]
    fn transported_real_part_nonnegative(g in admissible(None), w in halfplane_point()) {
        prop_assert!(g.to_halfplane().eval(w).re >= -1e-12);
    }

    #[test]
    fn round_trip_through_cayley(g in admissible(None), z in disk_point(0.95)) {
        let w = cayley::to_halfplane(z);
        let f = g.eval_f(z).unwrap();
        let rebuilt = -(1.0 - z) * (1.0 - z) * g.to_halfplane().eval(w) / 2.0;
        prop_assert!((f - rebuilt).norm() <= 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn derivative_is_consistent(g in admissible(None), z in disk_point(0.9)) {
        let h = 1e-6;
        let fd = (g.eval_f(z + h).unwrap() - g.eval_f(z - h).unwrap()) / (2.0 * h);
        let exact = g.eval_f_prime(z).unwrap();
        prop_assert!((fd - exact).norm() <= 1e-6 * (1.0 + exact.norm()));
    }

    #[test]
    fn classification_ignores_the_tail(g in admissible(None), scale in 0.0f64..1.0) {
        let h = g.to_halfplane();
        let margin = (h.beta.re - h.gamma.im.abs() - h.higher.iter().map(|e| e.norm()).sum::<f64>()).max(0.0);
        let extra = vec![h.higher.first().copied().unwrap_or_default(), c(0.0, 0.9 * scale * margin)];
        let with_tail = GeneratorSpec::from_halfplane(h.alpha, h.beta, h.gamma, &extra).unwrap();
        prop_assert_eq!(with_tail.classify(), g.classify());
        prop_assert_eq!(g.classify() == GeneratorClass::Hyperbolic, g.taylor().a > 0.0);
    }
}
