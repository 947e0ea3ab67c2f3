//! Measures of rectangles, hypographs and epigraphs against closed forms.

use proptest::prelude::*;
use youngkit::quadrature::{epigraph_measure, hypograph_measure, integrate, rect_measure};
use youngkit::random::{InstanceGen, KernelFamily, LevelMode, MonotoneShape};
use youngkit::{Kernel, MonotoneFn, QuadConfig};

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

/// `int_a^b s^p ds`.
fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rectangles_add(px in 0.0..1.5f64, py in 0.0..1.5f64, a in 0.0..0.5f64, m in 0.6..1.2f64, b in 1.3..2.0f64, c in 0.0..0.5f64, n in 0.6..1.2f64, d in 1.3..2.0f64) {
        let k = Kernel::power((0.0, 2.0), (0.0, 2.0), 1.0, px, py).unwrap();
        let whole = rect_measure(&k, a, b, c, d, &cfg()).unwrap().value;
        let parts = [(a, m, c, n), (m, b, c, n), (a, m, n, d), (m, b, n, d)]
            .iter()
            .map(|&(x0, x1, y0, y1)| rect_measure(&k, x0, x1, y0, y1, &cfg()).unwrap().value)
            .sum::<f64>();
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0));
    }

    #[test]
    fn rectangles_grow_with_the_box(px in 0.0..1.5f64, a in 0.0..0.5f64, b in 0.6..1.5f64, grow in 0.0..0.5f64) {
        let k = Kernel::power((0.0, 2.0), (0.0, 2.0), 1.0, px, 0.5).unwrap();
        let inner = rect_measure(&k, a, b, a, b, &cfg()).unwrap().value;
        let outer = rect_measure(&k, a * 0.5, b + grow, a * 0.5, b + grow, &cfg()).unwrap().value;
        prop_assert!(inner <= outer + 1e-15);
    }

    #[test]
    fn generic_rectangle_error_estimate_is_honest(px in 0.0..1.5f64, py in 0.0..1.5f64, a in 0.0..0.8f64, b in 1.0..2.0f64) {
        let k = Kernel::power((0.0, 2.0), (0.0, 2.0), 1.0, px, py).unwrap().as_generic().unwrap();
        let r = rect_measure(&k, a, b, a, b, &cfg()).unwrap();
        let exact = power_integral(px, a, b) * power_integral(py, a, b);
        prop_assert!((r.value - exact).abs() <= 10.0 * r.error_estimate + 8.0 * f64::EPSILON * exact);
    }

    #[test]
    fn hypograph_and_epigraph_meet_at_the_graph(seed in any::<u64>()) {
        let mut gen = InstanceGen::new(seed);
        let inst = gen.young_instance(&MonotoneShape::default(), KernelFamily::Any, LevelMode::AtValue).unwrap();
        let hyp = hypograph_measure(&inst.kernel, &inst.f, inst.a, inst.b, &cfg()).unwrap();
        let epi = epigraph_measure(&inst.kernel, &inst.f, inst.a, inst.c, &cfg()).unwrap();
        let rect = rect_measure(&inst.kernel, inst.a, inst.b, inst.fa(), inst.c, &cfg()).unwrap();
        let slack = 1e-8_f64.max(10.0 * (hyp.error_estimate + epi.error_estimate + rect.error_estimate));
        prop_assert!((hyp.value + epi.value - rect.value).abs() <= slack);
    }
}

#[test]
fn unit_square_under_the_diagonal() {
    let k = Kernel::one((0.0, 1.0), (0.0, 1.0)).unwrap();
    let id = MonotoneFn::identity(0.0, 1.0).unwrap();
    let hyp = hypograph_measure(&k, &id, 0.0, 1.0, &cfg()).unwrap();
    let epi = epigraph_measure(&k, &id, 0.0, 1.0, &cfg()).unwrap();
    assert!((hyp.value - 0.5).abs() < 1e-14);
    assert!((epi.value - 0.5).abs() < 1e-14);
}

#[test]
fn oscillatory_integrand_meets_tolerance() {
    let r = integrate(|x| (20.0 * x).sin(), 0.0, std::f64::consts::PI, &[], &cfg()).unwrap();
    let exact = (1.0 - (20.0 * std::f64::consts::PI).cos()) / 20.0;
    assert!((r.value - exact).abs() <= 1e-12);
    assert!((r.value - exact).abs() <= 10.0 * r.error_estimate + 1e-15);
}
