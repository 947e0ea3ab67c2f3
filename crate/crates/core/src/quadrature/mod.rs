//! Kernel-weighted measures of rectangles and of the regions below and above
//! the graph of a monotone function.
//!
//! All two-dimensional integrals are iterated one-dimensional adaptive
//! Gauss-Kronrod integrals. Outer integrals are pre-split wherever the inner
//! integrand can lose smoothness: breakpoints of `f`, knot values of its
//! inverse, declared discontinuity lines of the kernel and their preimages.

mod gauss_kronrod;
mod kernel;

use serde::{Deserialize, Serialize};

pub use gauss_kronrod::{integrate_samples, Sample};
pub use kernel::{Factor, Kernel, KernelSpec, Primitive, GAUSSIAN_ERF_SCALE};

use crate::error::{Error, Result};
use crate::monotone::{MonotoneFn, Side};

/// Identifier of the nested rule applied on every cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseRule {
    #[default]
    GaussKronrod15,
}

/// Tolerances and limits for adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth below each initial cell.
    pub max_depth: u32,
    pub base_rule: BaseRule,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-9, abs_tol: 1e-12, max_depth: 30, base_rule: BaseRule::GaussKronrod15 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_depth >= 1) {
            return Err(Error::invalid("quadrature tolerances must be positive and max_depth >= 1"));
        }
        Ok(())
    }
}

/// Value of an integral with an absolute error estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

impl IntegralResult {
    pub fn zero() -> Self {
        IntegralResult::default()
    }

    pub fn exact(value: f64) -> Self {
        IntegralResult { value, ..Self::default() }
    }

    /// Sum of two results; errors add.
    pub fn plus(self, other: IntegralResult) -> Self {
        IntegralResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions: self.subdivisions + other.subdivisions,
        }
    }

    pub fn as_sample(&self) -> Sample {
        Sample { value: self.value, error: self.error_estimate }
    }
}

/// Adaptive integral of a plain scalar function.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, breaks: &[f64], cfg: &QuadConfig) -> Result<IntegralResult> {
    integrate_samples(|x| Ok(Sample::exact(f(x))), lo, hi, breaks, cfg)
}

type SampleFn = dyn Fn(f64) -> Result<Sample> + Send + Sync;

/// Tabulated running integral `u -> int_lo^u g`, for integrands that are
/// queried at many upper limits.
#[derive(Clone)]
pub struct Cumulative {
    integrand: std::sync::Arc<SampleFn>,
    edges: Vec<f64>,
    cum: Vec<IntegralResult>,
    cfg: QuadConfig,
}

impl std::fmt::Debug for Cumulative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cumulative").field("edges", &self.edges.len()).finish()
    }
}

impl Cumulative {
    /// Table over `[lo, hi]` with `cells` uniform cells plus every break.
    pub fn new<G>(integrand: G, lo: f64, hi: f64, breaks: &[f64], cells: usize, cfg: &QuadConfig) -> Result<Self>
    where
        G: Fn(f64) -> Result<Sample> + Send + Sync + 'static,
    {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::domain(format!("cumulative table needs lo <= hi, got [{lo}, {hi}]")));
        }
        let cells = cells.max(1);
        let step = (hi - lo) / cells as f64;
        let mut edges: Vec<f64> = (0..=cells).map(|i| if i == cells { hi } else { lo + step * i as f64 }).collect();
        edges.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let mut cum = Vec::with_capacity(edges.len());
        cum.push(IntegralResult::zero());
        let mut acc = IntegralResult::zero();
        for w in edges.windows(2) {
            acc = acc.plus(integrate_samples(&integrand, w[0], w[1], &[], cfg)?);
            cum.push(acc);
        }
        Ok(Cumulative { integrand: std::sync::Arc::new(integrand), edges, cum, cfg: *cfg })
    }

    pub fn lo(&self) -> f64 {
        self.edges[0]
    }

    pub fn hi(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    /// `int_lo^u g`, with `u` clamped into the table.
    pub fn eval(&self, u: f64) -> Result<IntegralResult> {
        let u = u.clamp(self.lo(), self.hi());
        let idx = self.edges.partition_point(|&e| e <= u).saturating_sub(1);
        let start = self.edges[idx];
        if u == start {
            return Ok(self.cum[idx]);
        }
        let g = &self.integrand;
        Ok(self.cum[idx].plus(integrate_samples(|s| g(s), start, u, &[], &self.cfg)?))
    }
}

/// `rho([a,b] x [c,d])`.
pub fn rect_measure(k: &Kernel, a: f64, b: f64, c: f64, d: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    if !(a <= b && c <= d) {
        return Err(Error::domain(format!("rectangle [{a}, {b}] x [{c}, {d}] is not ordered")));
    }
    k.check_box(a, b, c, d)?;
    if a == b || c == d {
        return Ok(IntegralResult::zero());
    }
    if let Some((scale, px, py)) = k.product_parts() {
        let dx = px.between(a, b)?;
        let dy = py.between(c, d)?;
        let value = scale * dx.value * dy.value;
        let error = scale * (dx.value.abs() * dy.error + dy.value.abs() * dx.error + dx.error * dy.error);
        return Ok(IntegralResult { value, error_estimate: error, subdivisions: 0 });
    }
    let breaks = k.breaks_x(a, b);
    integrate_samples(|x| k.inner_y(x, c, d, cfg), a, b, &breaks, cfg).map_err(|e| e.with_context("rectangle measure"))
}

fn check_subinterval(f: &MonotoneFn, a: f64, b: f64) -> Result<()> {
    let (lo, hi) = f.domain();
    if !(a >= lo && b <= hi && a <= b) {
        return Err(Error::domain(format!("[{a}, {b}] is not an ordered subinterval of [{lo}, {hi}]")));
    }
    Ok(())
}

/// Outer breakpoints for `x -> int_{f(a)}^{f(x)} K(x, y) dy` on `[a, b]`.
pub(crate) fn hypograph_breaks(k: &Kernel, f: &MonotoneFn, a: f64, b: f64) -> Vec<f64> {
    let (fa, fb) = (f.at(a), f.at(b));
    let mut breaks = f.breaks_in(a, b);
    breaks.extend(k.breaks_x(a, b));
    for t in k.breaks_y(fa, fb) {
        breaks.push(f.sup_inverse(t));
        breaks.push(f.inf_inverse(t));
    }
    breaks
}

/// Outer breakpoints for `y -> int_a^{f_sup^-1(y)} K(x, y) dx` on `[f(a), c]`.
pub(crate) fn epigraph_breaks(k: &Kernel, f: &MonotoneFn, a: f64, c: f64) -> Vec<f64> {
    let fa = f.at(a);
    let x_top = f.sup_inverse(c);
    let mut breaks = f.knot_values_in(fa, c);
    breaks.extend(k.breaks_y(fa, c));
    for xb in k.breaks_x(a, x_top) {
        breaks.push(f.value(xb, Side::Left));
        breaks.push(f.value(xb, Side::Right));
    }
    breaks
}

/// `rho(hyp f|[a,b]) = int_a^b int_{f(a)}^{f(x)} K(x,y) dy dx`.
pub fn hypograph_measure(k: &Kernel, f: &MonotoneFn, a: f64, b: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    check_subinterval(f, a, b)?;
    let fa = f.at(a);
    let fb = f.value(b, Side::Right);
    k.check_box(a, b, fa, fb)?;
    if a == b {
        return Ok(IntegralResult::zero());
    }
    let breaks = hypograph_breaks(k, f, a, b);
    let mut r = integrate_samples(|x| k.inner_y(x, fa, f.at(x), cfg), a, b, &breaks, cfg)
        .map_err(|e| e.with_context("hypograph measure"))?;
    r.error_estimate += k.truncated_mass_x(a, b, fa, fb)?;
    Ok(r)
}

/// `rho(epi f) = int_{f(a)}^c int_a^{f_sup^-1(y)} K(x,y) dx dy` for `c >= f(a)`.
pub fn epigraph_measure(k: &Kernel, f: &MonotoneFn, a: f64, c: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
    epigraph_measure_with(k, f, a, c, |y| f.sup_inverse(y), cfg)
}

/// Epigraph measure with the inner upper limit given by an arbitrary
/// pseudo-inverse of `f`. Pseudo-inverses differ on a finite set only, so the
/// value does not depend on the choice; this exists so callers can integrate
/// exactly the inverse they were handed.
pub fn epigraph_measure_with(
    k: &Kernel,
    f: &MonotoneFn,
    a: f64,
    c: f64,
    inverse: impl Fn(f64) -> f64,
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    cfg.validate()?;
    check_subinterval(f, a, a)?;
    let fa = f.at(a);
    let (_, top) = f.range();
    if !(c >= fa && c <= top) {
        return Err(Error::domain(format!("upper level c = {c} must lie in [f(a), f(hi)] = [{fa}, {top}]")));
    }
    let x_top = f.sup_inverse(c);
    k.check_box(a, x_top, fa, c)?;
    if c == fa {
        return Ok(IntegralResult::zero());
    }
    let breaks = epigraph_breaks(k, f, a, c);
    let mut r = integrate_samples(|y| k.inner_x(y, a, inverse(y).clamp(a, x_top), cfg), fa, c, &breaks, cfg)
        .map_err(|e| e.with_context("epigraph measure"))?;
    r.error_estimate += k.truncated_mass_y(fa, c, a, x_top)?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn rect_examples() {
        let one = Kernel::one((0.0, 4.0), (0.0, 4.0)).unwrap();
        assert!((rect_measure(&one, 0.0, 2.0, 0.0, 3.0, &cfg()).unwrap().value - 6.0).abs() < 1e-12);

        let xy = Kernel::power((0.0, 2.0), (0.0, 2.0), 1.0, 1.0, 1.0).unwrap();
        assert!((rect_measure(&xy, 0.0, 1.0, 0.0, 2.0, &cfg()).unwrap().value - 1.0).abs() < 1e-12);

        let g = Kernel::gaussian((0.0, 3.0), (0.0, 3.0), 2.0 / std::f64::consts::PI).unwrap();
        let v = rect_measure(&g, 0.0, 1.0, 0.0, 1.0, &cfg()).unwrap().value;
        // (sqrt(pi)/2 erf(1))^2 * 2/pi
        assert!((v - 0.355_072_313_219_039_15).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rectangle_is_exact_zero() {
        let g = Kernel::gaussian((0.0, 3.0), (0.0, 3.0), 1.0).unwrap();
        let r = rect_measure(&g, 1.0, 1.0, 0.0, 2.0, &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn rect_outside_box_is_domain_error() {
        let one = Kernel::one((0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!(matches!(rect_measure(&one, 0.0, 2.0, 0.0, 1.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(rect_measure(&one, 0.5, 0.2, 0.0, 1.0, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn hypograph_examples() {
        let one = Kernel::one((0.0, 9.0), (0.0, 9.0)).unwrap();
        let id = MonotoneFn::identity(0.0, 4.0).unwrap();
        assert!((hypograph_measure(&one, &id, 0.0, 2.0, &cfg()).unwrap().value - 2.0).abs() < 1e-12);
        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        assert!((hypograph_measure(&one, &sq, 0.0, 1.0, &cfg()).unwrap().value - 1.0 / 3.0).abs() < 1e-12);
        let flat = MonotoneFn::affine(0.0, 3.0, 1.5, 0.0).unwrap();
        assert_eq!(hypograph_measure(&one, &flat, 0.5, 2.5, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn epigraph_examples() {
        let one = Kernel::one((0.0, 9.0), (0.0, 9.0)).unwrap();
        let id = MonotoneFn::identity(0.0, 4.0).unwrap();
        assert!((epigraph_measure(&one, &id, 0.0, 3.0, &cfg()).unwrap().value - 4.5).abs() < 1e-12);
        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        let v = epigraph_measure(&one, &sq, 0.0, 2.0, &cfg()).unwrap().value;
        assert!((v - 4.0 * 2f64.sqrt() / 3.0).abs() < 1e-9);
        let step = MonotoneFn::step(0.0, 2.0, 1.0, 0.0, 2.0).unwrap();
        assert!((epigraph_measure(&one, &step, 0.0, 1.0, &cfg()).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn epigraph_rejects_level_below_start() {
        let one = Kernel::one((0.0, 9.0), (0.0, 9.0)).unwrap();
        let f = MonotoneFn::affine(0.0, 2.0, 1.0, 1.0).unwrap();
        assert!(matches!(epigraph_measure(&one, &f, 0.0, 0.5, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn generic_path_agrees_with_product_path() {
        let g = Kernel::gaussian((0.0, 2.0), (0.0, 2.0), 1.0).unwrap();
        let generic = g.as_generic().unwrap();
        let sq = MonotoneFn::power(0.0, 1.4, 2.0).unwrap();
        for (a, b) in [(0.0, 1.0), (0.3, 1.4)] {
            let h1 = hypograph_measure(&g, &sq, a, b, &cfg()).unwrap();
            let h2 = hypograph_measure(&generic, &sq, a, b, &cfg()).unwrap();
            assert!((h1.value - h2.value).abs() < 1e-10);
            let c = sq.at(b);
            let e1 = epigraph_measure(&g, &sq, a, c, &cfg()).unwrap();
            let e2 = epigraph_measure(&generic, &sq, a, c, &cfg()).unwrap();
            assert!((e1.value - e2.value).abs() < 1e-10);
        }
    }
}
