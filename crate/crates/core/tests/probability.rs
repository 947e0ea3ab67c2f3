//! Inverse error function series and the probabilistic inequality.

use std::f64::consts::PI;

use youngkit::monotone::Side;
use youngkit::probability::{check_probabilistic_young, erf, erf_inv, erf_inv_full, DistributionPair, ErfInvSeries};
use youngkit::quadrature::{epigraph_measure, hypograph_measure, rect_measure};
use youngkit::random::{InstanceGen, MonotoneShape};
use youngkit::{Kernel, MonotoneFn, Piece, QuadConfig};

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Plain recurrence with the inner sum taken in either direction.
fn coefficients(n: usize, descending: bool) -> Vec<f64> {
    let mut c = vec![1.0f64];
    for k in 1..n {
        let term = |m: usize| c[m] * c[k - 1 - m] / ((m + 1) * (2 * m + 1)) as f64;
        let s: f64 = if descending { (0..k).rev().map(term).sum() } else { (0..k).map(term).sum() };
        c.push(s);
    }
    c
}

#[test]
fn summation_order_does_not_move_the_coefficients() {
    let n = 200;
    let up = coefficients(n, false);
    let down = coefficients(n, true);
    let lib = ErfInvSeries::standard().coefficients();
    let mut worst = 0.0f64;
    for k in 0..n {
        worst = worst.max(((up[k] - down[k]) / up[k]).abs());
        worst = worst.max(((lib[k] - up[k]) / up[k]).abs());
    }
    assert!(worst <= 1e-13, "worst relative deviation {worst:e}");
}

#[test]
fn series_inverts_erf() {
    let s = ErfInvSeries::standard();
    assert!((erf_inv(erf(0.5), s).unwrap() - 0.5).abs() <= 2.0 * f64::EPSILON);
    assert_eq!(erf_inv(0.0, s).unwrap(), 0.0);
    for z in grid(-0.9, 0.9, 360) {
        let x = erf_inv(z, s).unwrap();
        assert!((erf(x) - z).abs() <= 1e-15, "z = {z}");
        assert_eq!(erf_inv(-z, s).unwrap(), -x);
    }
    for z in [0.95, 0.99, 0.999_999] {
        let x = erf_inv_full(z, s).unwrap();
        assert!((erf(x) - z).abs() <= 4.0 * f64::EPSILON, "z = {z}");
    }
    assert!(erf_inv(0.95, s).is_err());
    assert!(erf_inv_full(1.5, s).is_err());
}

#[test]
fn series_without_newton_has_its_tail_error() {
    let s = ErfInvSeries::standard();
    for z in [0.1, 0.5, 0.8] {
        let (raw, terms) = s.partial_sum(z);
        assert!(terms < s.k_max());
        assert!((erf(raw) - z).abs() <= 1e-14, "z = {z}");
    }
    // Small tables leave a visible truncation error that Newton removes.
    let short = ErfInvSeries::new(3, 1e-17).unwrap();
    let (raw, _) = short.partial_sum(0.8);
    let x = erf_inv(0.8, &short).unwrap();
    assert!((erf(raw) - 0.8).abs() > 1e-4);
    assert!((erf(x) - 0.8).abs() < (erf(raw) - 0.8).abs());
}

fn uniform_pair() -> DistributionPair {
    let rho = Kernel::one((0.0, 1.0), (0.0, 1.0)).unwrap();
    DistributionPair::new(rho, MonotoneFn::identity(0.0, 1.0).unwrap()).unwrap()
}

#[test]
fn uniform_distribution_example() {
    let dp = uniform_pair();
    let r = check_probabilistic_young(&dp, 1.0, 1.0, &cfg()).unwrap();
    assert!((r.lhs - 1.0).abs() < 1e-14 && (r.rhs - 1.0).abs() < 1e-12 && r.equality);
    for b in grid(0.1, 1.0, 9) {
        for c in grid(0.1, 1.0, 9) {
            let r = check_probabilistic_young(&dp, b, c, &cfg()).unwrap();
            assert!((r.lhs - b * c).abs() < 1e-14);
            let exact = (b * b + c * c) / 2.0;
            assert!((r.rhs - exact).abs() < 1e-12);
        }
    }
}

#[test]
fn one_summand_carries_half_the_joint_probability() {
    let mut gen = InstanceGen::new(12);
    for _ in 0..40 {
        let len = gen.uniform(1.0, 2.0);
        let shape = MonotoneShape { rise: [0.5, 1.0], ..MonotoneShape::default() };
        let cdf = gen.monotone(0.0, len, 0.0, &shape).unwrap();
        let top = cdf.range().1;
        let rho = Kernel::gaussian((0.0, len), (0.0, 1.0), 1.0).unwrap();
        let b = gen.uniform(0.1, len);
        let c = gen.uniform(0.05, top);
        let hyp = hypograph_measure(&rho, &cdf, 0.0, b, &cfg()).unwrap().value;
        let epi = epigraph_measure(&rho, &cdf, 0.0, c, &cfg()).unwrap().value;
        let joint = rect_measure(&rho, 0.0, b, 0.0, c, &cfg()).unwrap().value;
        assert!(hyp.max(epi) >= joint / 2.0 - 1e-10);
        let dp = DistributionPair::new(rho, cdf).unwrap();
        assert!(check_probabilistic_young(&dp, b, c, &cfg()).unwrap().holds());
    }
}

#[test]
fn quantile_agrees_with_the_lower_inverse() {
    let mut gen = InstanceGen::new(13);
    for _ in 0..40 {
        let cdf = gen.monotone(0.0, 2.0, 0.0, &MonotoneShape { rise: [0.5, 1.0], ..MonotoneShape::default() }).unwrap();
        let dp = DistributionPair::new(Kernel::one((0.0, 2.0), (0.0, 1.0)).unwrap(), cdf.clone()).unwrap();
        for y in grid(0.0, cdf.range().1, 100) {
            let q = dp.quantile().value(y);
            assert!((q - cdf.inf_inverse(y)).abs() <= 1e-12, "y = {y}");
            // Quantile convention: F(Q(y)+) >= y and F(Q(y)-) <= y.
            assert!(cdf.value(q, Side::Right) >= y - 1e-12 && cdf.value(q, Side::Left) <= y + 1e-12);
        }
    }
}

#[test]
fn truncated_gaussian_pair_on_a_grid() {
    let e3 = erf(3.0);
    let mass = 0.5 * PI.sqrt() * e3;
    let rho = Kernel::gaussian((0.0, 3.0), (0.0, 3.0), 1.0 / (mass * mass)).unwrap();
    let cdf = MonotoneFn::new(
        0.0,
        3.0,
        vec![Piece::Erf { start: 0.0, end: 3.0, offset: 0.0, scale: 1.0 / e3, rate: 1.0, shift: 0.0 }],
    )
    .unwrap();
    let dp = DistributionPair::new(rho, cdf).unwrap();
    for b in grid(0.6, 3.0, 4) {
        for c in grid(0.2, 1.0, 4) {
            let r = check_probabilistic_young(&dp, b, c, &cfg()).unwrap();
            let exact = erf(b) / e3 * erf(c.min(3.0)) / e3;
            assert!((r.lhs - exact).abs() < 1e-12, "({b}, {c})");
            assert!(r.holds(), "({b}, {c}): gap {}", r.gap);
        }
    }
}
