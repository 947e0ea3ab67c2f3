//! Nonnegative densities `K(x, y)` on a box.
//!
//! Builtin kernels are products `scale * kx(x) * ky(y)` of one-dimensional
//! [`Factor`]s. Each factor carries a tabulated primitive, so inner integrals
//! of an iterated integral reduce to two primitive lookups plus one short
//! Gauss-Kronrod application. Arbitrary densities go through
//! [`Kernel::custom`] and are integrated by nested adaptive quadrature.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gauss_kronrod::{integrate_samples, Sample};
use super::QuadConfig;
use crate::error::{Error, Result};

/// Normalization making `rect([0,x] x [0,y]) = erf(x) erf(y)` for the
/// Gaussian product kernel.
pub const GAUSSIAN_ERF_SCALE: f64 = 4.0 / std::f64::consts::PI;

const DEFAULT_FRACTIONAL_CUTOFF: f64 = 1e-3;
/// Minimum number of uniform cells in a primitive table.
const PRIMITIVE_CELLS: usize = 64;

fn primitive_cfg() -> QuadConfig {
    QuadConfig { rel_tol: 1e-13, abs_tol: 1e-15, max_depth: 50, ..QuadConfig::default() }
}

/// A nonnegative one-dimensional factor of a product kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "factor", rename_all = "snake_case")]
pub enum Factor {
    One,
    /// `exp(-s^2)`
    Gaussian,
    /// `s^exponent` for `s >= 0`
    Power { exponent: f64 },
    /// Fractional part of `1/s`, zero at `s = 0`. Values below `cutoff` are
    /// not resolved: they are integrated as zero and their mass (at most
    /// the length of the skipped interval) is reported as error.
    FractionalPart { cutoff: f64 },
}

impl Factor {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Factor::One => 1.0,
            Factor::Gaussian => (-s * s).exp(),
            Factor::Power { exponent } => {
                if exponent == 0.0 {
                    1.0
                } else {
                    s.max(0.0).powf(exponent)
                }
            }
            Factor::FractionalPart { cutoff } => {
                if s <= 0.0 || s < cutoff {
                    0.0
                } else {
                    let u = 1.0 / s;
                    u - u.floor()
                }
            }
        }
    }

    /// Discontinuities of the factor strictly inside `(lo, hi)`.
    pub fn breaks(&self, lo: f64, hi: f64) -> Vec<f64> {
        match *self {
            Factor::FractionalPart { cutoff } => {
                let mut out = Vec::new();
                if cutoff > lo && cutoff < hi {
                    out.push(cutoff);
                }
                let start = lo.max(cutoff);
                if hi <= 0.0 || start >= hi {
                    return out;
                }
                // 1/k in (start, hi)
                let k_min = (1.0 / hi).ceil().max(1.0) as u64;
                let k_max = if start > 0.0 { (1.0 / start).floor() as u64 } else { k_min };
                for k in k_min..=k_max {
                    let x = 1.0 / k as f64;
                    if x > start && x < hi {
                        out.push(x);
                    }
                }
                out.sort_by(f64::total_cmp);
                out
            }
            _ => Vec::new(),
        }
    }

    /// Length of `[lo, hi]` that falls below the resolution cutoff.
    pub fn truncated_len(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            Factor::FractionalPart { cutoff } => (hi.min(cutoff) - lo).max(0.0),
            _ => 0.0,
        }
    }

    /// Upper bound of the factor on `[lo, hi]` (used for truncation errors).
    pub fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            Factor::One | Factor::FractionalPart { .. } => 1.0,
            Factor::Gaussian => {
                let m = if lo <= 0.0 && hi >= 0.0 { 0.0 } else { lo.abs().min(hi.abs()) };
                (-m * m).exp()
            }
            Factor::Power { .. } => self.eval(lo).max(self.eval(hi)),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Factor::Power { exponent } if !(exponent.is_finite() && exponent >= 0.0) => {
                Err(Error::invalid(format!("power factor exponent {exponent} must be finite and >= 0")))
            }
            Factor::FractionalPart { cutoff } if !(cutoff > 0.0 && cutoff.is_finite()) => {
                Err(Error::invalid(format!("fractional-part cutoff {cutoff} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// Tabulated primitive `u -> int_lo^u factor(s) ds` over a fixed interval.
#[derive(Clone, Debug)]
pub struct Primitive {
    factor: Factor,
    lo: f64,
    hi: f64,
    edges: Vec<f64>,
    cum: Vec<f64>,
    cum_err: Vec<f64>,
}

impl Primitive {
    pub fn new(factor: Factor, lo: f64, hi: f64) -> Result<Self> {
        factor.validate()?;
        let mut edges = factor.breaks(lo, hi);
        let step = (hi - lo) / PRIMITIVE_CELLS as f64;
        edges.extend((1..PRIMITIVE_CELLS).map(|i| lo + step * i as f64));
        edges.push(lo);
        edges.push(hi);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let cfg = primitive_cfg();
        let mut cum = Vec::with_capacity(edges.len());
        let mut cum_err = Vec::with_capacity(edges.len());
        cum.push(0.0);
        cum_err.push(0.0);
        let mut acc = crate::numeric::CompensatedSum::new();
        let mut err = 0.0;
        for w in edges.windows(2) {
            let r = integrate_samples(|s| Ok(Sample::exact(factor.eval(s))), w[0], w[1], &[], &cfg)
                .map_err(|e| e.with_context("kernel primitive table"))?;
            acc.add(r.value);
            err += r.error_estimate;
            cum.push(acc.value());
            cum_err.push(err);
        }
        Ok(Primitive { factor, lo, hi, edges, cum, cum_err })
    }

    pub fn factor(&self) -> &Factor {
        &self.factor
    }

    /// `int_lo^u factor`, `u` clamped to the table interval. The error
    /// includes any unresolved mass below the factor cutoff.
    pub fn eval(&self, u: f64) -> Result<Sample> {
        let s = self.eval_resolved(u)?;
        Ok(Sample { value: s.value, error: s.error + self.factor.truncated_len(self.lo, u) })
    }

    /// `int_u^v factor` with combined error.
    pub fn between(&self, u: f64, v: f64) -> Result<Sample> {
        let (pu, pv) = (self.eval_resolved(u)?, self.eval_resolved(v)?);
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        Ok(Sample {
            value: pv.value - pu.value,
            error: pu.error + pv.error + self.factor.truncated_len(a, b),
        })
    }

    fn eval_resolved(&self, u: f64) -> Result<Sample> {
        let u = u.clamp(self.lo, self.hi);
        let idx = self.edges.partition_point(|&e| e <= u).saturating_sub(1);
        let start = self.edges[idx];
        let partial = if u > start {
            let f = &self.factor;
            integrate_samples(|s| Ok(Sample::exact(f.eval(s))), start, u, &[], &primitive_cfg())
                .map_err(|e| e.with_context("kernel primitive"))?
        } else {
            super::IntegralResult::zero()
        };
        Ok(Sample { value: self.cum[idx] + partial.value, error: self.cum_err[idx] + partial.error_estimate })
    }
}

/// Serialized builtin kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `K = scale`
    One {
        #[serde(rename = "box")]
        bounds: [[f64; 2]; 2],
        #[serde(default = "one")]
        scale: f64,
    },
    /// `K = scale * exp(-x^2 - y^2)`, default scale `4/pi`.
    GaussianProduct {
        #[serde(rename = "box")]
        bounds: [[f64; 2]; 2],
        #[serde(default = "gaussian_scale")]
        scale: f64,
    },
    /// `K = scale * x^px * y^py`
    PowerProduct {
        #[serde(rename = "box")]
        bounds: [[f64; 2]; 2],
        #[serde(default = "one")]
        scale: f64,
        px: f64,
        py: f64,
    },
    /// `K = {1/x} {1/y}`
    FractionalPartProduct {
        #[serde(rename = "box")]
        bounds: [[f64; 2]; 2],
        #[serde(default = "fractional_cutoff")]
        cutoff: f64,
    },
}

fn one() -> f64 {
    1.0
}
fn gaussian_scale() -> f64 {
    GAUSSIAN_ERF_SCALE
}
fn fractional_cutoff() -> f64 {
    DEFAULT_FRACTIONAL_CUTOFF
}

struct ProductDensity {
    scale: f64,
    px: Primitive,
    py: Primitive,
}

type DensityFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

struct CustomDensity {
    func: Box<DensityFn>,
    x_breaks: Vec<f64>,
    y_breaks: Vec<f64>,
}

#[derive(Clone)]
enum Density {
    Product(Arc<ProductDensity>),
    Custom(Arc<CustomDensity>),
}

/// A nonnegative density on `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Clone)]
pub struct Kernel {
    x_range: (f64, f64),
    y_range: (f64, f64),
    density: Density,
    strictly_positive: bool,
    spec: Option<KernelSpec>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("x_range", &self.x_range)
            .field("y_range", &self.y_range)
            .field("spec", &self.spec)
            .field("strictly_positive", &self.strictly_positive)
            .finish()
    }
}

fn check_range(name: &str, r: (f64, f64)) -> Result<()> {
    if !(r.0.is_finite() && r.1.is_finite() && r.0 < r.1) {
        return Err(Error::invalid(format!("kernel {name}-range [{}, {}] must be finite with lo < hi", r.0, r.1)));
    }
    Ok(())
}

impl Kernel {
    /// `scale * fx(x) * fy(y)` on the given box.
    pub fn product(x_range: (f64, f64), y_range: (f64, f64), scale: f64, fx: Factor, fy: Factor) -> Result<Self> {
        check_range("x", x_range)?;
        check_range("y", y_range)?;
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::invalid(format!("kernel scale {scale} must be finite and >= 0")));
        }
        if matches!(fx, Factor::Power { .. } | Factor::FractionalPart { .. }) && x_range.0 < 0.0
            || matches!(fy, Factor::Power { .. } | Factor::FractionalPart { .. }) && y_range.0 < 0.0
        {
            return Err(Error::invalid("power and fractional-part factors need a box in the first quadrant"));
        }
        // Every builtin factor vanishes only on a null set.
        let strictly_positive = scale > 0.0;
        let px = Primitive::new(fx, x_range.0, x_range.1)?;
        let py = Primitive::new(fy, y_range.0, y_range.1)?;
        Ok(Kernel {
            x_range,
            y_range,
            density: Density::Product(Arc::new(ProductDensity { scale, px, py })),
            strictly_positive,
            spec: None,
        })
    }

    /// `K = 1` on the box.
    pub fn one(x_range: (f64, f64), y_range: (f64, f64)) -> Result<Self> {
        Self::from_spec(KernelSpec::One { bounds: [[x_range.0, x_range.1], [y_range.0, y_range.1]], scale: 1.0 })
    }

    /// `K = scale * exp(-x^2 - y^2)`.
    pub fn gaussian(x_range: (f64, f64), y_range: (f64, f64), scale: f64) -> Result<Self> {
        Self::from_spec(KernelSpec::GaussianProduct { bounds: [[x_range.0, x_range.1], [y_range.0, y_range.1]], scale })
    }

    /// `K = scale * x^px * y^py`.
    pub fn power(x_range: (f64, f64), y_range: (f64, f64), scale: f64, px: f64, py: f64) -> Result<Self> {
        Self::from_spec(KernelSpec::PowerProduct {
            bounds: [[x_range.0, x_range.1], [y_range.0, y_range.1]],
            scale,
            px,
            py,
        })
    }

    /// `K = {1/x}{1/y}`.
    pub fn fractional_part(x_range: (f64, f64), y_range: (f64, f64), cutoff: f64) -> Result<Self> {
        Self::from_spec(KernelSpec::FractionalPartProduct {
            bounds: [[x_range.0, x_range.1], [y_range.0, y_range.1]],
            cutoff,
        })
    }

    pub fn from_spec(spec: KernelSpec) -> Result<Self> {
        let (b, scale, fx, fy) = match spec {
            KernelSpec::One { bounds, scale } => (bounds, scale, Factor::One, Factor::One),
            KernelSpec::GaussianProduct { bounds, scale } => (bounds, scale, Factor::Gaussian, Factor::Gaussian),
            KernelSpec::PowerProduct { bounds, scale, px, py } => {
                (bounds, scale, Factor::Power { exponent: px }, Factor::Power { exponent: py })
            }
            KernelSpec::FractionalPartProduct { bounds, cutoff } => {
                (bounds, 1.0, Factor::FractionalPart { cutoff }, Factor::FractionalPart { cutoff })
            }
        };
        let mut k = Self::product((b[0][0], b[0][1]), (b[1][0], b[1][1]), scale, fx, fy)?;
        k.spec = Some(spec);
        Ok(k)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(serde_json::from_str(text)?)
    }

    /// An arbitrary pointwise-evaluable density. `x_breaks`/`y_breaks` are
    /// lines across which the density may be discontinuous. The density is
    /// sampled on a grid and rejected if any sample is negative.
    pub fn custom<F>(
        x_range: (f64, f64),
        y_range: (f64, f64),
        func: F,
        x_breaks: Vec<f64>,
        y_breaks: Vec<f64>,
        strictly_positive: bool,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        check_range("x", x_range)?;
        check_range("y", y_range)?;
        const N: usize = 17;
        for i in 0..N {
            for j in 0..N {
                let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / (N - 1) as f64;
                let y = y_range.0 + (y_range.1 - y_range.0) * j as f64 / (N - 1) as f64;
                let v = func(x, y);
                if !(v >= 0.0) {
                    return Err(Error::invalid(format!("kernel value {v} at ({x}, {y}) is not a nonnegative number")));
                }
            }
        }
        Ok(Kernel {
            x_range,
            y_range,
            density: Density::Custom(Arc::new(CustomDensity { func: Box::new(func), x_breaks, y_breaks })),
            strictly_positive,
            spec: None,
        })
    }

    /// Same density routed through generic nested quadrature (no primitive
    /// tables). Used to cross-check the product fast path.
    pub fn as_generic(&self) -> Result<Self> {
        let me = self.clone();
        let xb = self.breaks_x(self.x_range.0, self.x_range.1);
        let yb = self.breaks_y(self.y_range.0, self.y_range.1);
        Self::custom(self.x_range, self.y_range, move |x, y| me.eval(x, y), xb, yb, self.strictly_positive)
    }

    pub fn spec(&self) -> Option<&KernelSpec> {
        self.spec.as_ref()
    }

    pub fn x_range(&self) -> (f64, f64) {
        self.x_range
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y_range
    }

    /// Declared a.e. positivity (enables the equality characterizations).
    pub fn strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.density {
            Density::Product(p) => p.scale * p.px.factor().eval(x) * p.py.factor().eval(y),
            Density::Custom(c) => (c.func)(x, y),
        }
    }

    pub fn breaks_x(&self, lo: f64, hi: f64) -> Vec<f64> {
        match &self.density {
            Density::Product(p) => p.px.factor().breaks(lo, hi),
            Density::Custom(c) => c.x_breaks.iter().copied().filter(|&x| x > lo && x < hi).collect(),
        }
    }

    pub fn breaks_y(&self, lo: f64, hi: f64) -> Vec<f64> {
        match &self.density {
            Density::Product(p) => p.py.factor().breaks(lo, hi),
            Density::Custom(c) => c.y_breaks.iter().copied().filter(|&y| y > lo && y < hi).collect(),
        }
    }

    /// Errors unless `[a,b] x [c,d]` lies in the kernel box (tolerance 1e-12).
    pub fn check_box(&self, a: f64, b: f64, c: f64, d: f64) -> Result<()> {
        let tol = 1e-12;
        let inside = |v: f64, r: (f64, f64)| v >= r.0 - tol * r.0.abs().max(1.0) && v <= r.1 + tol * r.1.abs().max(1.0);
        if ![a, b].iter().all(|&v| inside(v, self.x_range)) || ![c, d].iter().all(|&v| inside(v, self.y_range)) {
            return Err(Error::domain(format!(
                "rectangle [{a}, {b}] x [{c}, {d}] leaves kernel box [{}, {}] x [{}, {}]",
                self.x_range.0, self.x_range.1, self.y_range.0, self.y_range.1
            )));
        }
        Ok(())
    }

    /// `int_lo^hi K(x, t) dt`.
    pub fn inner_y(&self, x: f64, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Sample> {
        match &self.density {
            Density::Product(p) => {
                let w = p.scale * p.px.factor().eval(x);
                let d = p.py.between(lo, hi)?;
                Ok(Sample { value: w * d.value, error: w * d.error })
            }
            Density::Custom(c) => {
                let r = integrate_samples(|t| Ok(Sample::exact((c.func)(x, t))), lo, hi, &c.y_breaks, cfg)?;
                Ok(Sample { value: r.value, error: r.error_estimate })
            }
        }
    }

    /// `int_lo^hi K(s, y) ds`.
    pub fn inner_x(&self, y: f64, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Sample> {
        match &self.density {
            Density::Product(p) => {
                let w = p.scale * p.py.factor().eval(y);
                let d = p.px.between(lo, hi)?;
                Ok(Sample { value: w * d.value, error: w * d.error })
            }
            Density::Custom(c) => {
                let r = integrate_samples(|s| Ok(Sample::exact((c.func)(s, y))), lo, hi, &c.x_breaks, cfg)?;
                Ok(Sample { value: r.value, error: r.error_estimate })
            }
        }
    }

    /// Product structure `(scale, x-primitive, y-primitive)`, when present.
    pub(crate) fn product_parts(&self) -> Option<(f64, &Primitive, &Primitive)> {
        match &self.density {
            Density::Product(p) => Some((p.scale, &p.px, &p.py)),
            Density::Custom(_) => None,
        }
    }

    /// Bound on the kernel mass of `([xlo, xhi] below the x cutoff) x [ylo, yhi]`,
    /// which outer x-integrals skip.
    pub(crate) fn truncated_mass_x(&self, xlo: f64, xhi: f64, ylo: f64, yhi: f64) -> Result<f64> {
        match &self.density {
            Density::Product(p) => {
                let fx = p.px.factor();
                let len = fx.truncated_len(xlo, xhi);
                if len == 0.0 {
                    return Ok(0.0);
                }
                let inner = p.py.between(ylo, yhi)?;
                Ok(p.scale * len * fx.sup_on(xlo, xhi) * (inner.value.abs() + inner.error))
            }
            Density::Custom(_) => Ok(0.0),
        }
    }

    pub(crate) fn truncated_mass_y(&self, ylo: f64, yhi: f64, xlo: f64, xhi: f64) -> Result<f64> {
        match &self.density {
            Density::Product(p) => {
                let fy = p.py.factor();
                let len = fy.truncated_len(ylo, yhi);
                if len == 0.0 {
                    return Ok(0.0);
                }
                let inner = p.px.between(xlo, xhi)?;
                Ok(p.scale * len * fy.sup_on(ylo, yhi) * (inner.value.abs() + inner.error))
            }
            Density::Custom(_) => Ok(0.0),
        }
    }
}

impl Serialize for Kernel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.spec {
            Some(spec) => spec.serialize(s),
            None => Err(serde::ser::Error::custom("custom kernels have no JSON form")),
        }
    }
}

impl<'de> Deserialize<'de> for Kernel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = KernelSpec::deserialize(d)?;
        Kernel::from_spec(spec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractional_breaks_are_reciprocals() {
        let f = Factor::FractionalPart { cutoff: 0.1 };
        let b = f.breaks(0.0, 1.0);
        assert_eq!(b.first().copied(), Some(0.1));
        assert!(b.contains(&0.5));
        assert!(b.contains(&(1.0 / 3.0)));
        assert_eq!(b.len(), 9); // cutoff 0.1 plus 1/2 .. 1/9
        assert_eq!(f.eval(0.4), 0.5);
        assert_eq!(f.eval(0.05), 0.0);
    }

    #[test]
    fn primitive_matches_closed_form() {
        let p = Primitive::new(Factor::Power { exponent: 2.0 }, 0.0, 3.0).unwrap();
        let s = p.eval(2.0).unwrap();
        assert!((s.value - 8.0 / 3.0).abs() < 1e-13);
        let g = Primitive::new(Factor::Gaussian, 0.0, 3.0).unwrap();
        let e = g.eval(1.0).unwrap();
        let exact = std::f64::consts::PI.sqrt() / 2.0 * libm::erf(1.0);
        assert!((e.value - exact).abs() < 1e-14);
    }

    #[test]
    fn fractional_primitive_at_one() {
        // int_0^1 {1/s} ds = 1 - gamma; the skipped interval below the cutoff
        // sits inside the error estimate.
        let p = Primitive::new(Factor::FractionalPart { cutoff: 1e-3 }, 0.0, 2.0).unwrap();
        let s = p.eval(1.0).unwrap();
        let exact = 1.0 - 0.577_215_664_901_532_9;
        assert!((s.value - exact).abs() <= s.error);
        assert!((s.value - exact).abs() < 1e-3);
    }

    #[test]
    fn spec_json_round_trip() {
        let k = Kernel::from_json(r#"{"name":"power_product","box":[[0,2],[0,2]],"px":1,"py":1}"#).unwrap();
        assert_eq!(k.eval(0.5, 4.0 / 2.0), 1.0);
        let text = serde_json::to_string(&k).unwrap();
        let back = Kernel::from_json(&text).unwrap();
        assert_eq!(back.spec(), k.spec());
        let g: Kernel = serde_json::from_str(r#"{"name":"gaussian_product","box":[[0,3],[0,3]]}"#).unwrap();
        assert!((g.eval(0.0, 0.0) - GAUSSIAN_ERF_SCALE).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_custom_density() {
        let k = Kernel::custom((0.0, 1.0), (0.0, 1.0), |x, y| x - y, vec![], vec![], false);
        assert!(matches!(k, Err(Error::Invalid(_))));
    }

    #[test]
    fn box_check() {
        let k = Kernel::one((0.0, 4.0), (0.0, 4.0)).unwrap();
        assert!(k.check_box(0.0, 2.0, 0.0, 3.0).is_ok());
        assert!(matches!(k.check_box(0.0, 5.0, 0.0, 3.0), Err(Error::Domain(_))));
    }
}
