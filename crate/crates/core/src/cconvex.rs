//! c-convexity for costs generated by a kernel,
//! `c(x, y) = int_{x0}^x int_{y0}^y K(s, t) dt ds`.
//!
//! The hypograph and epigraph measures of a nondecreasing `f`, viewed as
//! functions of their upper limits, form a c-conjugate pair for this cost.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::{MonotoneFn, Side};
use crate::numeric::{golden_max, linspace};
use crate::quadrature::{
    epigraph_breaks, hypograph_breaks, integrate_samples, rect_measure, Cumulative, IntegralResult, Kernel, KernelSpec,
    QuadConfig, Sample,
};
use crate::young::InequalityReport;

/// Grid size for c-transforms.
pub const DEFAULT_TRANSFORM_GRID: usize = 1024;
const TABLE_CELLS: usize = 256;

/// A cost absolutely continuous in the hyperbolic sense, on
/// `[x0, x1] x [y0, y1]`, vanishing on the lines `x = x0` and `y = y0`.
#[derive(Clone, Debug)]
pub struct CostFn {
    kernel: Kernel,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

/// JSON description of a cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSpec {
    /// `(x - x0)(y - y0)` on the box; `xy` when the box starts at the origin.
    Product {
        #[serde(rename = "box")]
        bounds: [[f64; 2]; 2],
    },
    /// Double primitive of a kernel from the lower-left corner of `box`.
    Kernel {
        kernel: KernelSpec,
        origin: [f64; 2],
    },
    /// `int_0^x {1/s} ds * int_0^y {1/t} dt`.
    FractionalPart {
        #[serde(rename = "box")]
        bounds: [[f64; 2]; 2],
        #[serde(default)]
        cutoff: Option<f64>,
    },
}

impl CostFn {
    /// Cost of `kernel` measured from `origin`, on the part of the kernel box
    /// to the upper right of the origin.
    pub fn from_kernel(kernel: Kernel, origin: (f64, f64)) -> Result<Self> {
        let (xr, yr) = (kernel.x_range(), kernel.y_range());
        if !(origin.0 >= xr.0 && origin.0 < xr.1 && origin.1 >= yr.0 && origin.1 < yr.1) {
            return Err(Error::domain(format!("cost origin {origin:?} must lie inside the kernel box")));
        }
        Ok(CostFn { x0: origin.0, y0: origin.1, x1: xr.1, y1: yr.1, kernel })
    }

    /// `(x - x0)(y - y0)`.
    pub fn product(x_range: (f64, f64), y_range: (f64, f64)) -> Result<Self> {
        Self::from_kernel(Kernel::one(x_range, y_range)?, (x_range.0, y_range.0))
    }

    /// Fractional-part cost on `[0, x1] x [0, y1]`.
    pub fn fractional_part(x1: f64, y1: f64, cutoff: Option<f64>) -> Result<Self> {
        let k = match cutoff {
            Some(c) => Kernel::product(
                (0.0, x1),
                (0.0, y1),
                1.0,
                crate::quadrature::Factor::FractionalPart { cutoff: c },
                crate::quadrature::Factor::FractionalPart { cutoff: c },
            )?,
            None => Kernel::fractional_part((0.0, x1), (0.0, y1), 1e-3)?,
        };
        Self::from_kernel(k, (0.0, 0.0))
    }

    pub fn from_spec(spec: &CostSpec) -> Result<Self> {
        match spec {
            CostSpec::Product { bounds } => Self::product((bounds[0][0], bounds[0][1]), (bounds[1][0], bounds[1][1])),
            CostSpec::Kernel { kernel, origin } => {
                Self::from_kernel(Kernel::from_spec(kernel.clone())?, (origin[0], origin[1]))
            }
            CostSpec::FractionalPart { bounds, cutoff } => {
                if bounds[0][0] != 0.0 || bounds[1][0] != 0.0 {
                    return Err(Error::invalid("fractional-part cost starts at the origin"));
                }
                Self::fractional_part(bounds[0][1], bounds[1][1], *cutoff)
            }
        }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x0, self.x1)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.y0, self.y1)
    }

    fn check(&self, x: f64, y: f64) -> Result<()> {
        if !(x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1) {
            return Err(Error::domain(format!(
                "({x}, {y}) is outside the cost box [{}, {}] x [{}, {}]",
                self.x0, self.x1, self.y0, self.y1
            )));
        }
        Ok(())
    }

    pub fn eval_with_error(&self, x: f64, y: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
        self.check(x, y)?;
        rect_measure(&self.kernel, self.x0, x, self.y0, y, cfg)
    }

    pub fn eval(&self, x: f64, y: f64, cfg: &QuadConfig) -> Result<f64> {
        Ok(self.eval_with_error(x, y, cfg)?.value)
    }

    /// `dc/dx (x, y) = int_{y0}^y K(x, t) dt`.
    pub fn dx(&self, x: f64, y: f64, cfg: &QuadConfig) -> Result<Sample> {
        self.check(x, y)?;
        self.kernel.inner_y(x, self.y0, y, cfg)
    }

    /// `dc/dy (x, y) = int_{x0}^x K(s, y) ds`.
    pub fn dy(&self, x: f64, y: f64, cfg: &QuadConfig) -> Result<Sample> {
        self.check(x, y)?;
        self.kernel.inner_x(y, self.x0, x, cfg)
    }
}

/// A function tabulated on a grid and evaluable anywhere in its interval.
pub trait Evaluable: Sync {
    fn eval(&self, t: f64) -> Result<f64>;
}

impl<F: Fn(f64) -> Result<f64> + Sync> Evaluable for F {
    fn eval(&self, t: f64) -> Result<f64> {
        self(t)
    }
}

/// Which argument of the cost the supremum runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Over {
    Y,
    X,
}

/// `h^c`: either `x -> sup_y c(x,y) - h(y)` or `y -> sup_x c(x,y) - h(x)`,
/// by a grid maximum refined by golden-section search.
pub struct CTransform<'a, H: Evaluable + ?Sized> {
    cost: &'a CostFn,
    h: &'a H,
    over: Over,
    grid: Vec<f64>,
    h_grid: Vec<f64>,
    cfg: QuadConfig,
}

impl<'a, H: Evaluable + ?Sized> CTransform<'a, H> {
    /// `x -> sup_{y in range} c(x,y) - h(y)`.
    pub fn over_y(cost: &'a CostFn, h: &'a H, range: (f64, f64), n: usize, cfg: &QuadConfig) -> Result<Self> {
        Self::build(cost, h, Over::Y, range, n, cfg)
    }

    /// `y -> sup_{x in range} c(x,y) - h(x)`.
    pub fn over_x(cost: &'a CostFn, h: &'a H, range: (f64, f64), n: usize, cfg: &QuadConfig) -> Result<Self> {
        Self::build(cost, h, Over::X, range, n, cfg)
    }

    fn build(cost: &'a CostFn, h: &'a H, over: Over, range: (f64, f64), n: usize, cfg: &QuadConfig) -> Result<Self> {
        if n < 2 || !(range.0 < range.1) {
            return Err(Error::invalid("c-transform needs at least two grid points on a nonempty range"));
        }
        let grid = linspace(range.0, range.1, n);
        let h_grid = grid.par_iter().map(|&s| h.eval(s)).collect::<Result<Vec<_>>>()?;
        Ok(CTransform { cost, h, over, grid, h_grid, cfg: *cfg })
    }

    fn objective(&self, u: f64, s: f64, h_s: f64) -> Result<f64> {
        let c = match self.over {
            Over::Y => self.cost.eval(u, s, &self.cfg)?,
            Over::X => self.cost.eval(s, u, &self.cfg)?,
        };
        Ok(c - h_s)
    }

    /// `(argmax, value)`.
    pub fn eval_with_argmax(&self, u: f64) -> Result<(f64, f64)> {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, (&s, &hs)) in self.grid.iter().zip(&self.h_grid).enumerate() {
            let v = self.objective(u, s, hs)?;
            if v > best.1 {
                best = (i, v);
            }
        }
        let lo = self.grid[best.0.saturating_sub(1)];
        let hi = self.grid[(best.0 + 1).min(self.grid.len() - 1)];
        let g = |s: f64| {
            self.h
                .eval(s)
                .and_then(|hs| self.objective(u, s, hs))
                .unwrap_or(f64::NEG_INFINITY)
        };
        let refined = golden_max(lo, hi, 1e-12 * (1.0 + hi.abs()), g);
        Ok(if refined.1 >= best.1 { refined } else { (self.grid[best.0], best.1) })
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        Ok(self.eval_with_argmax(u)?.1)
    }
}

/// `c_transform(G, cost, x) = sup_y c(x,y) - G(y)` over the cost's y-range.
pub fn c_transform(g: &impl Evaluable, cost: &CostFn, x: f64, cfg: &QuadConfig) -> Result<f64> {
    CTransform::over_y(cost, g, cost.y_range(), DEFAULT_TRANSFORM_GRID, cfg)?.eval(x)
}

/// `F(x) = rho(hyp f|[a,x])` and `G(y) = rho(epi f|[f(a),y])` for the cost
/// origin `(a, f(a))`.
#[derive(Clone, Debug)]
pub struct YoungPair {
    f_table: Cumulative,
    g_table: Cumulative,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl YoungPair {
    pub fn x_range(&self) -> (f64, f64) {
        self.x_range
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y_range
    }

    pub fn f_with_error(&self, x: f64) -> Result<IntegralResult> {
        check_in("x", x, self.x_range)?;
        self.f_table.eval(x)
    }

    pub fn g_with_error(&self, y: f64) -> Result<IntegralResult> {
        check_in("y", y, self.y_range)?;
        self.g_table.eval(y)
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        Ok(self.f_with_error(x)?.value)
    }

    pub fn g(&self, y: f64) -> Result<f64> {
        Ok(self.g_with_error(y)?.value)
    }
}

fn check_in(name: &str, v: f64, r: (f64, f64)) -> Result<()> {
    if !(v >= r.0 && v <= r.1) {
        return Err(Error::domain(format!("{name} = {v} outside [{}, {}]", r.0, r.1)));
    }
    Ok(())
}

fn check_origin(cost: &CostFn, f: &MonotoneFn) -> Result<()> {
    let (x0, y0) = cost.origin();
    if f.lo() != x0 || f.at(x0) != y0 {
        return Err(Error::precondition(format!(
            "f must start at the cost origin: f is defined from {} with f({}) = {}, origin is ({x0}, {y0})",
            f.lo(),
            f.lo(),
            f.at(f.lo())
        )));
    }
    Ok(())
}

/// F on `[a, min(f.hi, x1)]`, G on `[f(a), min(f(hi), y1)]`.
pub fn young_pair(cost: &CostFn, f: &MonotoneFn, cfg: &QuadConfig) -> Result<YoungPair> {
    check_origin(cost, f)?;
    let (a, fa) = cost.origin();
    let x_top = f.hi().min(cost.x1);
    let y_top = f.range().1.min(cost.y1);
    if f.at(x_top) > cost.y1 {
        return Err(Error::domain("f leaves the cost box before the end of its domain"));
    }
    let (k1, f1) = (cost.kernel.clone(), f.clone());
    let cfg1 = *cfg;
    let f_table = Cumulative::new(
        move |x| k1.inner_y(x, fa, f1.at(x), &cfg1),
        a,
        x_top,
        &hypograph_breaks(&cost.kernel, f, a, x_top),
        TABLE_CELLS,
        cfg,
    )?;
    let (k2, f2) = (cost.kernel.clone(), f.clone());
    let t_top = f.sup_inverse(y_top).min(cost.x1);
    let g_table = Cumulative::new(
        move |y| k2.inner_x(y, a, f2.sup_inverse(y).clamp(a, t_top), &cfg1),
        fa,
        y_top,
        &epigraph_breaks(&cost.kernel, f, a, y_top),
        TABLE_CELLS,
        cfg,
    )?;
    Ok(YoungPair { f_table, g_table, x_range: (a, x_top), y_range: (fa, y_top) })
}

/// `c(x,y) - c(a,f(a)) <= int_a^x dc/dt(t, f(t)) dt + int_{f(a)}^y dc/ds(f_sup^-1(s), s) ds`,
/// with equality verdict `y in [f(x-), f(x+)]`.
pub fn check_cconv_young(cost: &CostFn, f: &MonotoneFn, x: f64, y: f64, cfg: &QuadConfig) -> Result<InequalityReport> {
    check_origin(cost, f)?;
    let (a, fa) = cost.origin();
    if !(x > a && x <= f.hi()) {
        return Err(Error::domain(format!("x = {x} must lie in ({a}, {}]", f.hi())));
    }
    let top = f.range().1;
    if !(y >= fa && y <= top) {
        return Err(Error::domain(format!("y = {y} must lie in [{fa}, {top}]")));
    }
    let t = f.sup_inverse(y);
    cost.check(x.max(t), y.max(f.at(x)))?;
    let lhs = cost.eval_with_error(x, y, cfg)?;
    let along_graph = integrate_samples(|s| cost.dx(s, f.at(s), cfg), a, x, &hypograph_breaks(&cost.kernel, f, a, x), cfg)?;
    let along_inverse =
        integrate_samples(|s| cost.dy(f.sup_inverse(s).clamp(a, t), s, cfg), fa, y, &epigraph_breaks(&cost.kernel, f, a, y), cfg)?;
    let base = cost.kernel.truncated_mass_x(a, x, fa, f.at(x))? + cost.kernel.truncated_mass_y(fa, y, a, t)?;
    let mut rhs = along_graph.plus(along_inverse);
    rhs.error_estimate += base;
    let witness = (f.value(x, Side::Left), f.value(x, Side::Right));
    Ok(InequalityReport::new("cconv_young", lhs, rhs, witness, y, cost.kernel.strictly_positive()))
}
