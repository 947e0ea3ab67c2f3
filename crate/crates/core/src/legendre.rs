//! Closed convex functions of one variable, Legendre conjugates, and the
//! Young-type inequalities that come from Legendre duality.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::MonotoneFn;
use crate::numeric::{golden_max, linspace};
use crate::quadrature::{
    epigraph_breaks, hypograph_breaks, integrate, integrate_samples, rect_measure, IntegralResult, QuadConfig, Sample,
};
use crate::young::{InequalityReport, YoungInstance, DEFAULT_VERDICT_TOL};

/// Default number of grid points for numerical conjugates.
pub const DEFAULT_GRID: usize = 4096;
const GOLDEN_WIDTH: f64 = 1e-12;
const MIN_GRID: usize = 64;
/// Relative step for finite-difference derivatives.
const FD_STEP: f64 = 1e-6;

#[derive(Clone)]
enum Kind {
    /// `|x|^p / p`
    PowerP { p: f64 },
    Abs,
    Zero,
    /// `exp(x - shift)`
    Exp { shift: f64 },
    /// `x ln x + shift * x`
    Entropy { shift: f64 },
    Conjugate(Arc<Tabulated>),
    Custom(Arc<Custom>),
}

struct Tabulated {
    source: ConvexFn,
    xs: Vec<f64>,
    fs: Vec<f64>,
}

struct Custom {
    func: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    kinks: Vec<f64>,
}

/// A closed convex function on an interval `[lo, hi]`.
///
/// An end flagged open marks a window onto a function that continues past
/// it; conjugates report an error when their supremum would be attained
/// beyond such an end.
#[derive(Clone)]
pub struct ConvexFn {
    lo: f64,
    hi: f64,
    open: [bool; 2],
    kind: Kind,
}

impl fmt::Debug for ConvexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.kind {
            Kind::PowerP { p } => format!("power_p(p = {p})"),
            Kind::Abs => "abs".into(),
            Kind::Zero => "zero".into(),
            Kind::Exp { shift } => format!("exp(shift = {shift})"),
            Kind::Entropy { shift } => format!("entropy(shift = {shift})"),
            Kind::Conjugate(_) => "conjugate".into(),
            Kind::Custom(_) => "custom".into(),
        };
        write!(f, "ConvexFn {{ {name} on [{}, {}] }}", self.lo, self.hi)
    }
}

/// JSON description of a builtin convex function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConvexSpec {
    PowerP {
        p: f64,
        domain: [f64; 2],
        #[serde(default)]
        open: [bool; 2],
    },
    Abs {
        domain: [f64; 2],
        #[serde(default)]
        open: [bool; 2],
    },
    Exp {
        #[serde(default)]
        shift: f64,
        domain: [f64; 2],
        #[serde(default)]
        open: [bool; 2],
    },
    Entropy {
        #[serde(default)]
        shift: f64,
        domain: [f64; 2],
        #[serde(default)]
        open: [bool; 2],
    },
}

impl ConvexFn {
    fn builtin(lo: f64, hi: f64, kind: Kind) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::invalid(format!("convex function domain [{lo}, {hi}] is empty")));
        }
        Ok(ConvexFn { lo, hi, open: [false, false], kind })
    }

    /// `|x|^p / p` for `p > 1`.
    pub fn power_p(p: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::invalid(format!("power_p needs p > 1, got {p}")));
        }
        Self::builtin(lo, hi, Kind::PowerP { p })
    }

    pub fn abs(lo: f64, hi: f64) -> Result<Self> {
        Self::builtin(lo, hi, Kind::Abs)
    }

    pub fn zero(lo: f64, hi: f64) -> Result<Self> {
        Self::builtin(lo, hi, Kind::Zero)
    }

    /// `exp(x - shift)`.
    pub fn exp(shift: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::builtin(lo, hi, Kind::Exp { shift })
    }

    /// `x ln x + shift * x` on a subinterval of `[0, inf)`, with value 0 at 0.
    pub fn entropy(shift: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0) {
            return Err(Error::invalid("entropy is defined on [0, inf)"));
        }
        Self::builtin(lo, hi, Kind::Entropy { shift })
    }

    /// An arbitrary convex function with optional declared kinks. Convexity
    /// is sampled on 257 points; derivatives are taken by finite differences.
    pub fn custom<F>(lo: f64, hi: f64, kinks: Vec<f64>, func: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("custom convex function needs a finite domain, got [{lo}, {hi}]")));
        }
        let f = ConvexFn { lo, hi, open: [false, false], kind: Kind::Custom(Arc::new(Custom { func: Box::new(func), kinks })) };
        if !f.is_midpoint_convex(257, 1e-10)? {
            return Err(Error::invalid("custom function fails sampled midpoint convexity"));
        }
        Ok(f)
    }

    pub fn from_spec(spec: &ConvexSpec) -> Result<Self> {
        let (f, open) = match *spec {
            ConvexSpec::PowerP { p, domain, open } => (Self::power_p(p, domain[0], domain[1])?, open),
            ConvexSpec::Abs { domain, open } => (Self::abs(domain[0], domain[1])?, open),
            ConvexSpec::Exp { shift, domain, open } => (Self::exp(shift, domain[0], domain[1])?, open),
            ConvexSpec::Entropy { shift, domain, open } => (Self::entropy(shift, domain[0], domain[1])?, open),
        };
        Ok(f.with_open(open))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    /// Marks ends as open windows.
    pub fn with_open(mut self, open: [bool; 2]) -> Self {
        self.open = open;
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn open(&self) -> [bool; 2] {
        self.open
    }

    fn check(&self, x: f64) -> Result<()> {
        let slack = 1e-12 * (1.0 + x.abs());
        if !(x >= self.lo - slack && x <= self.hi + slack) {
            return Err(Error::domain(format!("{x} is outside [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let x = x.clamp(self.lo, self.hi);
        Ok(match &self.kind {
            Kind::PowerP { p } => x.abs().powf(*p) / p,
            Kind::Abs => x.abs(),
            Kind::Zero => 0.0,
            Kind::Exp { shift } => (x - shift).exp(),
            Kind::Entropy { shift } => {
                if x == 0.0 {
                    0.0
                } else {
                    x * x.ln() + shift * x
                }
            }
            Kind::Conjugate(t) => t.eval(x)?.1,
            Kind::Custom(c) => (c.func)(x),
        })
    }

    fn is_kink(&self, x: f64) -> bool {
        match &self.kind {
            Kind::Abs => x == 0.0,
            Kind::Custom(c) => c.kinks.iter().any(|&k| (k - x).abs() <= FD_STEP * (1.0 + x.abs())),
            _ => false,
        }
    }

    /// One-sided derivatives `(F'(x-), F'(x+))` inside the domain.
    pub fn derivatives(&self, x: f64) -> Result<(f64, f64)> {
        self.check(x)?;
        let x = x.clamp(self.lo, self.hi);
        Ok(match &self.kind {
            Kind::PowerP { p } => {
                let d = x.signum() * x.abs().powf(p - 1.0);
                let d = if x == 0.0 { 0.0 } else { d };
                (d, d)
            }
            Kind::Abs => (if x > 0.0 { 1.0 } else { -1.0 }, if x < 0.0 { -1.0 } else { 1.0 }),
            Kind::Zero => (0.0, 0.0),
            Kind::Exp { shift } => {
                let d = (x - shift).exp();
                (d, d)
            }
            Kind::Entropy { shift } => {
                let d = if x == 0.0 { f64::NEG_INFINITY } else { x.ln() + 1.0 + shift };
                (d, d)
            }
            Kind::Conjugate(_) | Kind::Custom(_) => self.fd_derivatives(x)?,
        })
    }

    fn fd_derivatives(&self, x: f64) -> Result<(f64, f64)> {
        let h = FD_STEP * (1.0 + x.abs());
        let h = h.min(0.5 * (self.hi - self.lo));
        let fx = self.eval(x)?;
        let left = (x - h >= self.lo).then(|| self.eval(x - h)).transpose()?;
        let right = (x + h <= self.hi).then(|| self.eval(x + h)).transpose()?;
        let kink = self.is_kink(x);
        Ok(match (left, right) {
            (Some(l), Some(r)) if !kink => {
                let d = (r - l) / (2.0 * h);
                (d, d)
            }
            (Some(l), Some(r)) => ((fx - l) / h, (r - fx) / h),
            (Some(l), None) => {
                let d = (fx - l) / h;
                (d, d)
            }
            (None, Some(r)) => {
                let d = (r - fx) / h;
                (d, d)
            }
            (None, None) => (0.0, 0.0),
        })
    }

    /// Right-derivative selector `phi(x)`.
    pub fn subgradient(&self, x: f64) -> Result<f64> {
        let (l, r) = self.derivatives(x)?;
        Ok(if x >= self.hi { l } else { r })
    }

    /// `dF(x)` relative to the domain: at a closed end it extends to
    /// infinity on the outward side.
    pub fn subdifferential(&self, x: f64) -> Result<[f64; 2]> {
        let (mut l, mut r) = self.derivatives(x)?;
        if x <= self.lo && !self.open[0] {
            l = f64::NEG_INFINITY;
        }
        if x >= self.hi && !self.open[1] {
            r = f64::INFINITY;
        }
        Ok([l, r])
    }

    /// Closed-form conjugate of a builtin, restricted to the image of the
    /// domain under the derivative (where it equals the numerical one).
    pub fn dual(&self) -> Option<ConvexFn> {
        let (dlo, dhi) = (self.derivatives(self.lo).ok()?.1, self.derivatives(self.hi).ok()?.0);
        let f = match self.kind {
            Kind::PowerP { p } => ConvexFn::power_p(p / (p - 1.0), dlo, dhi).ok()?,
            Kind::Abs if self.lo < 0.0 && self.hi > 0.0 => ConvexFn::zero(-1.0, 1.0).ok()?,
            Kind::Zero if self.lo == -1.0 && self.hi == 1.0 => ConvexFn::abs(f64::NEG_INFINITY, f64::INFINITY).ok()?,
            Kind::Exp { shift } => ConvexFn::entropy(shift - 1.0, dlo, dhi).ok()?,
            Kind::Entropy { shift } => ConvexFn::exp(1.0 + shift, dlo, dhi).ok()?,
            _ => return None,
        };
        Some(f)
    }

    /// Samples `F((x+y)/2) <= (F(x)+F(y))/2 + tol` on `n` points.
    pub fn is_midpoint_convex(&self, n: usize, tol: f64) -> Result<bool> {
        let (lo, hi) = finite_window(self)?;
        let xs = linspace(lo, hi, n.max(3));
        let vals = xs.iter().map(|&x| self.eval(x)).collect::<Result<Vec<_>>>()?;
        for i in 0..xs.len() {
            for j in (i + 2..xs.len()).step_by(7) {
                if (i + j) % 2 == 0 {
                    let m = (i + j) / 2;
                    if vals[m] > 0.5 * (vals[i] + vals[j]) + tol * (1.0 + vals[m].abs()) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Samples `F(y) >= F(x) + phi(x)(y - x) - tol` on an `n x n` grid.
    pub fn satisfies_subgradient_inequality(&self, n: usize, tol: f64) -> Result<bool> {
        let (lo, hi) = finite_window(self)?;
        let xs = linspace(lo, hi, n.max(2));
        for &x in &xs {
            let fx = self.eval(x)?;
            let g = self.subgradient(x)?;
            if !g.is_finite() {
                continue;
            }
            for &y in &xs {
                if self.eval(y)? < fx + g * (y - x) - tol * (1.0 + fx.abs()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn finite_window(f: &ConvexFn) -> Result<(f64, f64)> {
    if !(f.lo.is_finite() && f.hi.is_finite()) {
        return Err(Error::domain(format!("operation needs a bounded domain, got [{}, {}]", f.lo, f.hi)));
    }
    Ok((f.lo, f.hi))
}

impl Tabulated {
    /// `(argmax, F*(y))`.
    fn eval(&self, y: f64) -> Result<(f64, f64)> {
        let (k, _) = self
            .xs
            .iter()
            .zip(&self.fs)
            .map(|(&x, &fx)| x * y - fx)
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        let lo = self.xs[k.saturating_sub(1)];
        let hi = self.xs[(k + 1).min(self.xs.len() - 1)];
        let src = &self.source;
        let g = |x: f64| src.eval(x).map(|fx| x * y - fx).unwrap_or(f64::NEG_INFINITY);
        let (x_star, v) = golden_max(lo, hi, GOLDEN_WIDTH * (1.0 + hi.abs()), g);
        let (slo, shi) = src.domain();
        let at_lo = k == 0 && src.open[0] && y < src.derivatives(slo)?.1;
        let at_hi = k + 1 == self.xs.len() && src.open[1] && y > src.derivatives(shi)?.0;
        if at_lo || at_hi {
            return Err(Error::domain(format!(
                "conjugate at y = {y} is not attained inside the open window [{slo}, {shi}]"
            )));
        }
        Ok((x_star, v))
    }
}

/// Numerical conjugate `F*(y) = sup_x {xy - F(x)}` on `i_star`, by a grid
/// of `grid_n` points followed by golden-section refinement.
pub fn conjugate(f: &ConvexFn, i_star: (f64, f64), grid_n: usize) -> Result<ConvexFn> {
    if grid_n < MIN_GRID {
        return Err(Error::invalid(format!("conjugate grid needs at least {MIN_GRID} points, got {grid_n}")));
    }
    let (lo, hi) = finite_window(f)?;
    if !(i_star.0.is_finite() && i_star.1.is_finite() && i_star.0 < i_star.1) {
        return Err(Error::invalid(format!("dual interval [{}, {}] must be finite and nonempty", i_star.0, i_star.1)));
    }
    let xs = linspace(lo, hi, grid_n);
    let fs = xs.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let table = Tabulated { source: f.clone(), xs, fs };
    // The maximizer is monotone in y, so checking both ends covers i_star.
    table.eval(i_star.0)?;
    table.eval(i_star.1)?;
    Ok(ConvexFn { lo: i_star.0, hi: i_star.1, open: [false, false], kind: Kind::Conjugate(Arc::new(table)) })
}

/// `xy <= F(x) + F*(y)`, with equality verdict `y in dF(x)`.
pub fn check_fenchel_young(f: &ConvexFn, f_star: &ConvexFn, x: f64, y: f64) -> Result<InequalityReport> {
    let lhs = x * y;
    let rhs = f.eval(x)? + f_star.eval(y)?;
    let mut r = InequalityReport::from_values("fenchel_young", lhs, 0.0, rhs, 0.0, 1e-10);
    let sub = f.subdifferential(x)?;
    r.equality = y >= sub[0] - DEFAULT_VERDICT_TOL && y <= sub[1] + DEFAULT_VERDICT_TOL;
    r.equality_witness = Some(sub);
    Ok(r)
}

/// `int_a^b phi(t) dt` for the subgradient selector `phi`.
pub fn integral_representation(f: &ConvexFn, a: f64, b: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
    f.check(a)?;
    f.check(b)?;
    let kinks = match &f.kind {
        Kind::Abs | Kind::PowerP { .. } => vec![0.0],
        Kind::Custom(c) => c.kinks.clone(),
        _ => Vec::new(),
    };
    // The selector may be infinite at an end of the domain; nudge inward.
    let g = |t: f64| f.subgradient(t).map(|d| if d.is_finite() { d } else { 0.0 }).unwrap_or(0.0);
    integrate(g, a, b, &kinks, cfg)
}

fn check_continuous_on(f: &MonotoneFn, lo: f64, hi: f64) -> Result<()> {
    if !f.is_continuous_on(lo, hi, 1e-12) {
        return Err(Error::precondition(format!("f must be continuous on [{lo}, {hi}]")));
    }
    Ok(())
}

/// Duality-sharpened Young inequality:
/// `rect - (c - f(a)) Phi(eps) - (b - a) Phi*(1/eps)` is bounded by
/// `int_a^b Phi(eps u(x)) dx + int_{f(a)}^c Phi*(v(y)/eps) dy`, where `u`, `v`
/// are the inner integrals of the hypograph and epigraph measures.
pub fn check_ext_young(
    inst: &YoungInstance,
    phi: &ConvexFn,
    phi_star: &ConvexFn,
    eps: f64,
    cfg: &QuadConfig,
) -> Result<InequalityReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    inst.validate()?;
    let (k, f, a, b, c) = (&inst.kernel, &inst.f, inst.a, inst.b, inst.c);
    let fa = f.at(a);
    let t = f.sup_inverse(c);
    check_continuous_on(f, a, b.max(t))?;
    k.check_box(a, b.max(t), fa, c.max(f.at(b)))?;

    let rect = rect_measure(k, a, b, fa, c, cfg)?;
    let lhs = rect.value - (c - fa) * phi.eval(eps)? - (b - a) * phi_star.eval(1.0 / eps)?;

    let first = integrate_samples(
        |x| {
            let u = k.inner_y(x, fa, f.at(x), cfg)?;
            through(phi, eps * u.value, eps * u.error)
        },
        a,
        b,
        &hypograph_breaks(k, f, a, b),
        cfg,
    )
    .map_err(|e| e.with_context("extended young, x-integral"))?;
    let second = integrate_samples(
        |y| {
            let v = k.inner_x(y, a, f.sup_inverse(y).clamp(a, t), cfg)?;
            through(phi_star, v.value / eps, v.error / eps)
        },
        fa,
        c,
        &epigraph_breaks(k, f, a, c),
        cfg,
    )
    .map_err(|e| e.with_context("extended young, y-integral"))?;
    let rhs = first.plus(second);
    Ok(InequalityReport::from_values(
        "ext_young",
        lhs,
        rect.error_estimate,
        rhs.value,
        rhs.error_estimate,
        DEFAULT_VERDICT_TOL,
    ))
}

/// `g(u)` with the error of `u` pushed through `|g'|`.
fn through(g: &ConvexFn, u: f64, err: f64) -> Result<Sample> {
    let value = g.eval(u)?;
    let error = if err > 0.0 {
        let (l, r) = g.derivatives(u)?;
        l.abs().max(r.abs()) * err
    } else {
        0.0
    };
    Ok(Sample { value, error })
}

/// `int_0^b f^p + int_0^c (f_sup^-1)^p >= p b c - (p - 1)(b + c)` for
/// nondecreasing `f` with `f(0) = 0` on a domain starting at 0.
pub fn check_sulaiman(f: &MonotoneFn, b: f64, c: f64, p: f64, cfg: &QuadConfig) -> Result<InequalityReport> {
    if !(p > 1.0) {
        return Err(Error::invalid(format!("p must exceed 1, got {p}")));
    }
    if f.lo() != 0.0 || f.at(0.0) != 0.0 {
        return Err(Error::precondition("f must be defined from 0 with f(0) = 0"));
    }
    let (_, top) = f.range();
    if !(b >= 0.0 && b <= f.hi() && c >= 0.0 && c <= top) {
        return Err(Error::domain(format!("need b in [0, {}] and c in [0, {top}]", f.hi())));
    }
    let first = integrate(|x| f.at(x).powf(p), 0.0, b, &f.breaks_in(0.0, b), cfg)?;
    let second = integrate(|y| f.sup_inverse(y).powf(p), 0.0, c, &f.knot_values_in(0.0, c), cfg)?;
    let rhs = first.plus(second);
    let lhs = p * b * c - (p - 1.0) * (b + c);
    Ok(InequalityReport::from_values("sulaiman", lhs, 0.0, rhs.value, rhs.error_estimate, DEFAULT_VERDICT_TOL))
}
