//! Bounds on the gap of the weighted Young inequality, and the upper bound
//! on the sum of the two measures.
//!
//! Write `t = f_sup^-1(c)`. For `c <= f(b)` the gap is the measure of
//! `{t <= x <= b, c <= y <= f(x)}`; for `c >= f(b)` it is the measure of
//! `{b <= x <= t, f(x) <= y <= c}`. Both regions sit inside the rectangle
//! spanned by `(t, c)` and `(b, f(b))`, and under convexity of `f` they
//! compare with the triangle cut off by the chord between those corners.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::MonotoneFn;
use crate::numeric::linspace;
use crate::quadrature::{integrate_samples, rect_measure, IntegralResult, Kernel, QuadConfig};
use crate::young::{check_young, check_young_classical, young_parts, YoungInstance, DEFAULT_VERDICT_TOL};

/// Number of samples for the shape check.
const SHAPE_SAMPLES: usize = 65;
const SHAPE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Rectangle,
    Minguzzi,
    /// `gap <= bound`
    JpUpper,
    /// `gap >= bound`
    JpLower,
    /// `hyp + epi <= bound`
    MerkleMax,
}

impl BoundKind {
    fn is_lower(self) -> bool {
        matches!(self, BoundKind::JpLower)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Convex,
    Concave,
}

/// One bound compared against the quantity it controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBoundReport {
    pub bound_kind: BoundKind,
    /// Gap of the underlying Young instance.
    pub gap: f64,
    /// The bounded quantity: the gap, or the sum `hyp + epi` for
    /// [`BoundKind::MerkleMax`].
    pub value: f64,
    pub bound: f64,
    /// `bound - value` for upper bounds, `value - bound` for lower ones.
    pub slack: f64,
    pub satisfied: bool,
    /// Predicted equality of `value` and `bound`.
    pub equality: bool,
    pub tolerance: f64,
}

impl GapBoundReport {
    fn new(kind: BoundKind, gap: f64, value: f64, bound: f64, equality: bool, tolerance: f64) -> Self {
        let slack = if kind.is_lower() { value - bound } else { bound - value };
        GapBoundReport { bound_kind: kind, gap, value, bound, slack, satisfied: slack >= -tolerance, equality, tolerance }
    }
}

/// The rectangle between `(t, c)` and `(b, f(b))` bounds the gap.
pub fn bound_rectangle(inst: &YoungInstance, cfg: &QuadConfig) -> Result<GapBoundReport> {
    let r = check_young(inst, cfg)?;
    let (t, fb) = (inst.t(), inst.f.at(inst.b));
    let rect = rect_measure(&inst.kernel, t.min(inst.b), t.max(inst.b), inst.c.min(fb), inst.c.max(fb), cfg)?;
    Ok(GapBoundReport::new(
        BoundKind::Rectangle,
        r.gap,
        r.gap,
        rect.value.abs(),
        r.equality && inst.kernel.strictly_positive(),
        r.tolerance() + rect.error_estimate,
    ))
}

/// `K = 1`, continuous increasing `f`: the gap is at most
/// `(f^-1(c) - b)(c - f(b))`.
pub fn bound_minguzzi(f: &MonotoneFn, a: f64, b: f64, c: f64, cfg: &QuadConfig) -> Result<GapBoundReport> {
    let t = f.sup_inverse(c);
    let (lo, hi) = (a.min(t), b.max(t));
    if !f.is_continuous_on(lo, hi, 1e-12) || f.pieces().iter().any(|p| p.is_flat() && p.end() > lo && p.start() < hi) {
        return Err(Error::precondition(format!("f must be continuous and increasing on [{lo}, {hi}]")));
    }
    let r = check_young_classical(f, a, b, c, cfg)?;
    let bound = (t - b) * (c - f.at(b));
    Ok(GapBoundReport::new(BoundKind::Minguzzi, r.gap, r.gap, bound, c == f.at(b), r.tolerance()))
}

/// Sampled second differences of `f` on `[lo, hi]`: `(convex, concave)`.
fn sampled_shape(f: &MonotoneFn, lo: f64, hi: f64) -> (bool, bool) {
    let xs = linspace(lo, hi, SHAPE_SAMPLES);
    let vs: Vec<f64> = xs.iter().map(|&x| f.at(x)).collect();
    let mut convex = true;
    let mut concave = true;
    for w in vs.windows(3) {
        let d2 = w[0] - 2.0 * w[1] + w[2];
        let tol = SHAPE_TOL * (1.0 + w[1].abs());
        convex &= d2 >= -tol;
        concave &= d2 <= tol;
    }
    (convex, concave)
}

/// `int_{x1}^{x2} int_{lo(x)}^{hi(x)} K dy dx` for affine `lo`, `hi`.
fn strip_measure(
    k: &Kernel,
    x1: f64,
    x2: f64,
    lo: impl Fn(f64) -> f64,
    hi: impl Fn(f64) -> f64,
    line: (f64, f64, f64, f64),
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    let (xa, ya, xb, yb) = line;
    let mut breaks = k.breaks_x(x1, x2);
    let (ymin, ymax) = (ya.min(yb), ya.max(yb));
    for yk in k.breaks_y(ymin, ymax) {
        breaks.push(xa + (yk - ya) * (xb - xa) / (yb - ya));
    }
    integrate_samples(|x| k.inner_y(x, lo(x), hi(x).max(lo(x)), cfg), x1, x2, &breaks, cfg)
}

/// Chord-triangle bounds for `f` convex or concave between `t` and `b`.
///
/// For convex `f` the gap is at most the triangle below the chord when
/// `c <= f(b)`, and at least the triangle above the chord when `c >= f(b)`;
/// concave `f` reverses both.
pub fn bound_jp(inst: &YoungInstance, cfg: &QuadConfig, shape: Shape) -> Result<GapBoundReport> {
    let f = &inst.f;
    let (b, c) = (inst.b, inst.c);
    let t = inst.t();
    let (lo, hi) = (t.min(b), t.max(b));
    if !f.is_continuous_on(inst.a.min(lo), inst.a.max(hi), 1e-12) {
        return Err(Error::precondition("chord bounds need f continuous"));
    }
    let (convex, concave) = if hi > lo { sampled_shape(f, lo, hi) } else { (true, true) };
    let ok = match shape {
        Shape::Convex => convex,
        Shape::Concave => concave,
    };
    if !ok {
        return Err(Error::precondition(format!("f is not {shape:?} on [{lo}, {hi}] (sampled second differences)")));
    }
    let r = check_young(inst, cfg)?;
    let fb = f.at(b);
    let below = c <= fb;
    let kind = match (shape, below) {
        (Shape::Convex, true) | (Shape::Concave, false) => BoundKind::JpUpper,
        _ => BoundKind::JpLower,
    };
    let tri = if hi == lo || c == fb {
        IntegralResult::zero()
    } else {
        let slope = (fb - c) / (b - t);
        let chord = move |x: f64| c + slope * (x - t);
        let line = (t, c, b, fb);
        if below {
            strip_measure(&inst.kernel, t, b, |_| c, chord, line, cfg)?
        } else {
            strip_measure(&inst.kernel, b, t, chord, |_| c, line, cfg)?
        }
    };
    let affine = convex && concave;
    Ok(GapBoundReport::new(kind, r.gap, r.gap, tri.value, affine || c == fb, r.tolerance() + tri.error_estimate))
}

/// `hyp + epi <= max(rho([a,b] x [f(a),f(b)]), rho([a,t] x [f(a),c]))`.
pub fn bound_merkle(inst: &YoungInstance, cfg: &QuadConfig) -> Result<GapBoundReport> {
    let p = young_parts(inst, cfg)?;
    let (a, b, c, fa) = (inst.a, inst.b, inst.c, inst.fa());
    let fb = inst.f.at(b);
    let t = inst.t();
    let r1 = rect_measure(&inst.kernel, a, b, fa, fb, cfg)?;
    let r2 = rect_measure(&inst.kernel, a, t, fa, c, cfg)?;
    let sum = p.hyp.plus(p.epi);
    let tol = sum.error_estimate + r1.error_estimate + r2.error_estimate + DEFAULT_VERDICT_TOL;
    Ok(GapBoundReport::new(
        BoundKind::MerkleMax,
        sum.value - p.rect.value,
        sum.value,
        r1.value.max(r2.value),
        c == fb && t == b,
        tol,
    ))
}

/// Every bound that applies to the instance. Chord bounds are included
/// when `f` is continuous and convex or concave between `t` and `b`.
pub fn all_bounds(inst: &YoungInstance, cfg: &QuadConfig) -> Result<Vec<GapBoundReport>> {
    let mut out = vec![bound_rectangle(inst, cfg)?, bound_merkle(inst, cfg)?];
    if is_unit_kernel(&inst.kernel) {
        if let Ok(m) = bound_minguzzi(&inst.f, inst.a, inst.b, inst.c, cfg) {
            out.push(m);
        }
    }
    for shape in [Shape::Convex, Shape::Concave] {
        match bound_jp(inst, cfg, shape) {
            Ok(r) => out.push(r),
            Err(Error::Precondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn is_unit_kernel(k: &Kernel) -> bool {
    matches!(k.spec(), Some(crate::quadrature::KernelSpec::One { scale, .. }) if *scale == 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn one() -> Kernel {
        Kernel::one((0.0, 10.0), (0.0, 10.0)).unwrap()
    }

    #[test]
    fn rectangle_examples() {
        let id = MonotoneFn::identity(0.0, 4.0).unwrap();
        let r = bound_rectangle(&YoungInstance::new(one(), id.clone(), 0.0, 2.0, 3.0).unwrap(), &cfg()).unwrap();
        assert!((r.gap - 0.5).abs() < 1e-12 && (r.bound - 1.0).abs() < 1e-12 && r.satisfied);
        let r = bound_rectangle(&YoungInstance::new(one(), id, 0.0, 2.0, 2.0).unwrap(), &cfg()).unwrap();
        assert!(r.gap.abs() < 1e-12 && r.bound == 0.0 && r.satisfied && r.equality);
        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        let r = bound_rectangle(&YoungInstance::new(one(), sq, 0.0, 1.0, 2.0).unwrap(), &cfg()).unwrap();
        assert!((r.bound - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn minguzzi_examples() {
        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        let r = bound_minguzzi(&sq, 0.0, 1.0, 2.0, &cfg()).unwrap();
        assert!((r.bound - (2f64.sqrt() - 1.0)).abs() < 1e-12 && r.satisfied);
        let r = bound_minguzzi(&sq, 0.0, 1.0, 1.0, &cfg()).unwrap();
        assert!(r.bound == 0.0 && r.gap.abs() < 1e-10 && r.equality);
    }

    #[test]
    fn jp_examples() {
        let id = MonotoneFn::identity(0.0, 4.0).unwrap();
        let r = bound_jp(&YoungInstance::new(one(), id, 0.0, 2.0, 3.0).unwrap(), &cfg(), Shape::Convex).unwrap();
        assert_eq!(r.bound_kind, BoundKind::JpLower);
        assert!((r.bound - 0.5).abs() < 1e-12 && (r.gap - 0.5).abs() < 1e-12 && r.equality);
        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        let r = bound_jp(&YoungInstance::new(one(), sq.clone(), 0.0, 1.0, 2.0).unwrap(), &cfg(), Shape::Convex).unwrap();
        assert!((r.bound - 0.5 * (2f64.sqrt() - 1.0)).abs() < 1e-12 && r.satisfied && !r.equality);
        let err = bound_jp(&YoungInstance::new(one(), sq, 0.0, 1.0, 2.0).unwrap(), &cfg(), Shape::Concave);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn jp_concave_sqrt() {
        let sqrt = MonotoneFn::power(0.0, 4.0, 0.5).unwrap();
        let r = bound_jp(&YoungInstance::new(one(), sqrt, 0.0, 4.0, 1.0).unwrap(), &cfg(), Shape::Concave).unwrap();
        assert_eq!(r.bound_kind, BoundKind::JpLower);
        assert!((r.bound - 1.5).abs() < 1e-10);
        assert!((r.gap - 5.0 / 3.0).abs() < 1e-9 && r.satisfied);
    }

    #[test]
    fn merkle_examples() {
        let id = MonotoneFn::identity(0.0, 4.0).unwrap();
        let r = bound_merkle(&YoungInstance::new(one(), id.clone(), 0.0, 2.0, 3.0).unwrap(), &cfg()).unwrap();
        assert!((r.value - 6.5).abs() < 1e-12 && (r.bound - 9.0).abs() < 1e-12 && r.satisfied);
        let r = bound_merkle(&YoungInstance::new(one(), id, 0.0, 2.0, 2.0).unwrap(), &cfg()).unwrap();
        assert!((r.value - r.bound).abs() < 1e-12 && r.equality);
        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        let r = bound_merkle(&YoungInstance::new(one(), sq, 0.0, 1.0, 0.5).unwrap(), &cfg()).unwrap();
        let sum = 1.0 / 3.0 + 2.0 / 3.0 * 0.5f64.powf(1.5);
        assert!((r.value - sum).abs() < 1e-10 && (r.bound - 1.0).abs() < 1e-12 && r.satisfied);
    }
}
