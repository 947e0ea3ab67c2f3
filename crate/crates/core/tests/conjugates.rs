//! Legendre conjugates, the duality-sharpened inequality and c-convex pairs.

use youngkit::cconvex::{check_cconv_young, young_pair, CTransform, CostFn, DEFAULT_TRANSFORM_GRID};
use youngkit::legendre::{check_ext_young, check_fenchel_young, conjugate, integral_representation, ConvexFn, DEFAULT_GRID};
use youngkit::random::{InstanceGen, KernelFamily, LevelMode, MonotoneShape};
use youngkit::young::check_young;
use youngkit::{Kernel, MonotoneFn, QuadConfig, YoungInstance};

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

#[test]
fn conjugate_subdifferential_inverts_the_derivative() {
    let f = ConvexFn::power_p(3.0, -2.0, 2.0).unwrap();
    let fs = conjugate(&f, (-4.0, 4.0), DEFAULT_GRID).unwrap();
    for x in grid(-1.9, 1.9, 38) {
        let y = x * x.abs();
        let [l, r] = fs.subdifferential(y).unwrap();
        assert!(l - 1e-6 <= x && x <= r + 1e-6, "y = {y}: [{l}, {r}] vs {x}");
        assert!((r - l).abs() <= 2e-6);
    }
    let abs = ConvexFn::abs(-1.0, 1.0).unwrap();
    let abs_star = conjugate(&abs, (-1.0, 1.0), DEFAULT_GRID).unwrap();
    for y in grid(-0.9, 0.9, 18) {
        let [l, r] = abs_star.subdifferential(y).unwrap();
        assert!(l.abs() <= 1e-6 && r.abs() <= 1e-6, "y = {y}: [{l}, {r}]");
    }
}

#[test]
fn fenchel_young_equality_set_of_the_square_is_the_diagonal() {
    let f = ConvexFn::power_p(2.0, -3.0, 3.0).unwrap();
    let fs = f.dual().unwrap();
    for x in grid(-2.5, 2.5, 20) {
        for delta in [0.0, 1e-9] {
            let r = check_fenchel_young(&f, &fs, x, x + delta).unwrap();
            assert!(r.gap.abs() <= 1e-10 && r.equality);
        }
        for delta in [-0.3, -1e-3, 1e-3, 0.3] {
            let r = check_fenchel_young(&f, &fs, x, x + delta).unwrap();
            assert!((r.gap - delta * delta / 2.0).abs() <= 1e-12);
            assert!(r.gap > 1e-10 && !r.equality);
        }
    }
}

#[test]
fn convex_function_is_the_integral_of_its_subgradient() {
    let fns = [
        ConvexFn::exp(0.5, -1.0, 2.0).unwrap(),
        ConvexFn::power_p(1.5, -2.0, 2.0).unwrap(),
        ConvexFn::abs(-1.0, 2.0).unwrap(),
    ];
    for f in &fns {
        for (a, b) in [(-0.9, 1.7), (0.0, 1.0), (-0.5, -0.1)] {
            let r = integral_representation(f, a, b, &cfg()).unwrap();
            let exact = f.eval(b).unwrap() - f.eval(a).unwrap();
            assert!((r.value - exact).abs() <= 1e-10, "{f:?} on [{a}, {b}]: {} vs {exact}", r.value);
        }
    }
}

#[test]
fn duality_sharpened_form_is_continuous_as_p_decreases_to_one() {
    let f = MonotoneFn::identity(0.0, 2.0).unwrap();
    let k = Kernel::one((0.0, 2.0), (0.0, 2.0)).unwrap();
    let inst = YoungInstance::new(k, f, 0.0, 1.5, 1.0).unwrap();
    let ext = |p: f64| {
        let q = p / (p - 1.0);
        let phi = ConvexFn::power_p(p, 0.0, 10.0).unwrap();
        let phi_star = ConvexFn::power_p(q, 0.0, 10.0).unwrap();
        check_ext_young(&inst, &phi, &phi_star, 1.0, &cfg()).unwrap()
    };
    let mut prev = None;
    for p in [2.0, 1.5, 1.2, 1.1, 1.06, 1.055, 1.05] {
        let r = ext(p);
        assert!(r.holds() && r.gap.is_finite(), "p = {p}: gap {}", r.gap);
        if let Some((pp, rhs)) = prev {
            let (pp, rhs): (f64, f64) = (pp, rhs);
            if pp - p < 0.01 {
                assert!((r.rhs - rhs).abs() < 0.05 * rhs.abs().max(1.0), "p = {p}");
            }
        }
        prev = Some((p, r.rhs));
    }
}

#[test]
fn cost_form_reproduces_the_measure_form() {
    let mut gen = InstanceGen::new(31);
    for _ in 0..30 {
        let inst = gen.young_instance(&MonotoneShape::default(), KernelFamily::Any, LevelMode::Mixed).unwrap();
        let inst = YoungInstance::new(inst.kernel, inst.f, 0.0, inst.b, inst.c).unwrap();
        let cost = CostFn::from_kernel(inst.kernel.clone(), (0.0, inst.fa())).unwrap();
        let m = check_young(&inst, &cfg()).unwrap();
        let c = check_cconv_young(&cost, &inst.f, inst.b, inst.c, &cfg()).unwrap();
        assert!((m.lhs - c.lhs).abs() <= 1e-8 && (m.rhs - c.rhs).abs() <= 1e-8, "{m:?} vs {c:?}");
        assert_eq!(m.equality, c.equality);
    }
}

#[test]
fn double_c_transform_of_a_c_convex_potential() {
    let cost = CostFn::product((0.0, 2.0), (0.0, 2.0)).unwrap();
    let g = |y: f64| Ok(0.5 * y * y);
    let gc = CTransform::over_y(&cost, &g, (0.0, 2.0), DEFAULT_TRANSFORM_GRID, &cfg()).unwrap();
    let gc_fn = |x: f64| gc.eval(x);
    let gcc = CTransform::over_x(&cost, &gc_fn, (0.0, 2.0), DEFAULT_TRANSFORM_GRID, &cfg()).unwrap();
    for y in grid(0.0, 2.0, 16) {
        assert!((gc.eval(y).unwrap() - 0.5 * y * y).abs() <= 1e-6);
        assert!((gcc.eval(y).unwrap() - 0.5 * y * y).abs() <= 1e-6, "y = {y}");
    }
}

#[test]
fn cost_partials_are_monotone_in_the_other_variable() {
    let k = Kernel::gaussian((0.0, 2.0), (0.0, 2.0), 1.0).unwrap();
    let cost = CostFn::from_kernel(k, (0.0, 0.0)).unwrap();
    for x in grid(0.1, 2.0, 9) {
        let mut prev_dx = f64::NEG_INFINITY;
        let mut prev_dy = f64::NEG_INFINITY;
        for s in grid(0.0, 2.0, 20) {
            let dx = cost.dx(x, s, &cfg()).unwrap().value;
            let dy = cost.dy(s, x, &cfg()).unwrap().value;
            assert!(dx >= prev_dx - 1e-15 && dy >= prev_dy - 1e-15);
            prev_dx = dx;
            prev_dy = dy;
        }
    }
}

#[test]
fn unit_weight_pair_potentials_are_convex() {
    let cost = CostFn::product((0.0, 2.0), (0.0, 3.0)).unwrap();
    let mut gen = InstanceGen::new(9);
    for _ in 0..5 {
        let f = gen.monotone(0.0, 2.0, 0.0, &MonotoneShape { rise: [0.8, 2.5], ..MonotoneShape::default() }).unwrap();
        let pair = young_pair(&cost, &f, &cfg()).unwrap();
        for (range, h) in [(pair.x_range(), 0), (pair.y_range(), 1)] {
            let pts = grid(range.0, range.1, 200);
            let vals: Vec<f64> = pts.iter().map(|&u| if h == 0 { pair.f(u) } else { pair.g(u) }.unwrap()).collect();
            for w in vals.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9);
            }
        }
    }
}

#[test]
fn fractional_part_cost_holds_for_the_square() {
    let cost = CostFn::fractional_part(1.0, 1.0, None).unwrap();
    let sq = MonotoneFn::power(0.0, 1.0, 2.0).unwrap();
    for x in grid(0.2, 1.0, 4) {
        for y in grid(0.2, 1.0, 4) {
            let r = check_cconv_young(&cost, &sq, x, y, &cfg()).unwrap();
            assert!(r.holds(), "({x}, {y}): gap {}", r.gap);
            if (y - x * x).abs() < 1e-12 {
                assert!(r.equality);
            }
        }
    }
}
