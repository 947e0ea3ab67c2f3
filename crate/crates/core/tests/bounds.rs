//! Gap bounds against closed forms and against each other.

use proptest::prelude::*;
use youngkit::precision::{all_bounds, bound_jp, bound_minguzzi, bound_rectangle, BoundKind, Shape};
use youngkit::random::{InstanceGen, KernelFamily, LevelMode, MonotoneShape};
use youngkit::{Kernel, MonotoneFn, QuadConfig, YoungInstance};

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

/// Gap of `x^p` with `K = 1` and its inverse `y^(1/p)`.
fn power_gap(p: f64, a: f64, b: f64, c: f64) -> f64 {
    let fa = a.powf(p);
    let q = 1.0 / p;
    let hyp = (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0) - fa * (b - a);
    let epi = (c.powf(q + 1.0) - fa.powf(q + 1.0)) / (q + 1.0) - a * (c - fa);
    hyp + epi - (b - a) * (c - fa)
}

fn power_instance(p: f64, a: f64, b: f64, c: f64) -> YoungInstance {
    let f = MonotoneFn::power(0.0, 2.0, p).unwrap();
    let k = Kernel::one((0.0, 2.0), (0.0, f.at(2.0))).unwrap();
    YoungInstance::new(k, f, a, b, c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn every_applicable_bound_is_satisfied(seed in any::<u64>()) {
        let inst = InstanceGen::new(seed)
            .young_instance(&MonotoneShape::default(), KernelFamily::Any, LevelMode::Mixed)
            .unwrap();
        for r in all_bounds(&inst, &cfg()).unwrap() {
            prop_assert!(r.satisfied, "{:?}: slack {}", r.bound_kind, r.slack);
        }
    }

    #[test]
    fn power_gap_matches_closed_form_and_chord_triangle(p in 0.3..4.0f64, a in 0.0..0.5f64, b in 0.7..1.5f64, c_frac in 0.0..1.0f64) {
        let top = 2f64.powf(p);
        let fa = a.powf(p);
        let c = fa + 1e-3 + c_frac * (top - fa - 1e-3);
        let inst = power_instance(p, a, b, c);
        let t = inst.t();
        let fb = b.powf(p);
        let shape = if p >= 1.0 { Shape::Convex } else { Shape::Concave };
        let jp = bound_jp(&inst, &cfg(), shape).unwrap();
        prop_assert!((jp.gap - power_gap(p, a, b, c)).abs() <= 1e-9);
        prop_assert!((jp.bound - 0.5 * (t - b).abs() * (c - fb).abs()).abs() <= 1e-10);
        prop_assert!(jp.satisfied);
        let expected = if (p >= 1.0) == (c <= fb) { BoundKind::JpUpper } else { BoundKind::JpLower };
        prop_assert_eq!(jp.bound_kind, expected);
    }

    #[test]
    fn minguzzi_equals_rectangle_for_unit_weight(p in 0.5..3.0f64, b in 0.3..1.5f64, c_frac in 0.01..1.0f64) {
        let inst = power_instance(p, 0.0, b, c_frac * 2f64.powf(p));
        let m = bound_minguzzi(&inst.f, inst.a, inst.b, inst.c, &cfg()).unwrap();
        let r = bound_rectangle(&inst, &cfg()).unwrap();
        prop_assert!((m.bound - r.bound).abs() <= 1e-10);
        prop_assert!((m.bound - (inst.t() - b) * (inst.c - b.powf(p))).abs() <= 1e-12);
        prop_assert!(m.satisfied && r.satisfied);
    }
}

#[test]
fn affine_functions_attain_the_chord_triangle() {
    let f = MonotoneFn::affine(0.0, 2.0, 0.1, 0.8).unwrap();
    let kernels = [
        Kernel::one((0.0, 2.0), (0.0, 1.8)).unwrap(),
        Kernel::gaussian((0.0, 2.0), (0.0, 1.8), 4.0 / std::f64::consts::PI).unwrap(),
        Kernel::power((0.0, 2.0), (0.0, 1.8), 1.0, 0.5, 1.5).unwrap(),
    ];
    for k in kernels {
        for c in [0.3, 0.7, 1.2, 1.7] {
            let inst = YoungInstance::new(k.clone(), f.clone(), 0.1, 1.0, c).unwrap();
            for shape in [Shape::Convex, Shape::Concave] {
                let r = bound_jp(&inst, &cfg(), shape).unwrap();
                assert!(r.equality && r.slack.abs() <= 1e-8, "c = {c}, {shape:?}: slack {}", r.slack);
            }
        }
    }
}

#[test]
fn chord_bounds_reject_the_wrong_shape() {
    let inst = power_instance(2.0, 0.0, 1.0, 2.0);
    assert!(bound_jp(&inst, &cfg(), Shape::Concave).is_err());
    let step = MonotoneFn::step(0.0, 2.0, 1.0, 0.0, 1.0).unwrap();
    let k = Kernel::one((0.0, 2.0), (0.0, 1.0)).unwrap();
    let inst = YoungInstance::new(k, step, 0.0, 1.5, 0.5).unwrap();
    assert!(bound_jp(&inst, &cfg(), Shape::Convex).is_err());
}
