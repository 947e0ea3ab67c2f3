//! Error function, the inverse error function by its odd power series, and
//! the probabilistic reading of the weighted Young inequality.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::{Flavor, MonotoneFn, PseudoInverse};
use crate::numeric::CompensatedSum;
use crate::quadrature::{epigraph_measure_with, hypograph_measure, rect_measure, Kernel, QuadConfig};
use crate::young::InequalityReport;

/// Largest |z| served by the plain series.
pub const SERIES_Z_MAX: f64 = 0.9;

/// `erf(x) = 2/sqrt(pi) int_0^x exp(-s^2) ds`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

fn erf_prime(x: f64) -> f64 {
    2.0 / PI.sqrt() * (-x * x).exp()
}

/// Coefficient table for `erf^-1(z) = sum_k c_k / (2k+1) (sqrt(pi) z / 2)^(2k+1)`.
#[derive(Clone, Debug, Serialize)]
pub struct ErfInvSeries {
    coefficients: Vec<f64>,
    tail_tolerance: f64,
}

impl ErfInvSeries {
    pub const DEFAULT_K_MAX: usize = 1000;
    pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-17;

    /// Builds `c_0 ..= c_{k_max}` from the quadratic recurrence, each sum
    /// accumulated with compensation.
    pub fn new(k_max: usize, tail_tolerance: f64) -> Result<Self> {
        if !(tail_tolerance > 0.0) {
            return Err(Error::invalid("tail tolerance must be positive"));
        }
        let mut c = Vec::with_capacity(k_max + 1);
        c.push(1.0);
        for k in 1..=k_max {
            let sum: CompensatedSum =
                (0..k).map(|m| c[m] * c[k - 1 - m] / ((m as f64 + 1.0) * (2.0 * m as f64 + 1.0))).collect();
            c.push(sum.value());
        }
        Ok(ErfInvSeries { coefficients: c, tail_tolerance })
    }

    /// Shared default table.
    pub fn standard() -> &'static ErfInvSeries {
        static TABLE: OnceLock<ErfInvSeries> = OnceLock::new();
        TABLE.get_or_init(|| ErfInvSeries::new(Self::DEFAULT_K_MAX, Self::DEFAULT_TAIL_TOLERANCE).unwrap())
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn k_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Raw partial sum and the number of terms used.
    pub fn partial_sum(&self, z: f64) -> (f64, usize) {
        let w = 0.5 * PI.sqrt() * z;
        let w2 = w * w;
        let mut power = w;
        let mut sum = CompensatedSum::new();
        for (k, &ck) in self.coefficients.iter().enumerate() {
            let term = ck * power / (2 * k + 1) as f64;
            sum.add(term);
            if term.abs() < self.tail_tolerance {
                return (sum.value(), k + 1);
            }
            power *= w2;
        }
        (sum.value(), self.coefficients.len())
    }
}

/// Series value followed by one Newton step on `erf`. Only defined for
/// `|z| <= 0.9`; use [`erf_inv_full`] beyond that.
pub fn erf_inv(z: f64, series: &ErfInvSeries) -> Result<f64> {
    if !(z.abs() <= SERIES_Z_MAX) {
        return Err(Error::domain(format!(
            "|z| = {} exceeds the series limit {SERIES_Z_MAX}; use erf_inv_full (Newton fallback)",
            z.abs()
        )));
    }
    let (x, _) = series.partial_sum(z);
    Ok(x - (erf(x) - z) / erf_prime(x))
}

/// Inverse error function on `[-1, 1]`. Inside the series range it equals
/// [`erf_inv`]; outside, Newton iteration is seeded at the series value for
/// `0.9` and runs to a fixed point.
pub fn erf_inv_full(z: f64, series: &ErfInvSeries) -> Result<f64> {
    if z.is_nan() || z.abs() > 1.0 {
        return Err(Error::domain(format!("erf^-1 is defined on [-1, 1], got {z}")));
    }
    if z.abs() <= SERIES_Z_MAX {
        return erf_inv(z, series);
    }
    if z.abs() == 1.0 {
        return Ok(z * f64::INFINITY);
    }
    let target = z.abs();
    // erf is concave on x > 0, so Newton from below increases monotonically.
    let mut x = erf_inv(SERIES_Z_MAX, series)?;
    for _ in 0..200 {
        let step = (target - erf(x)) / erf_prime(x);
        if !step.is_finite() {
            break;
        }
        x += step;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    Ok(x.copysign(z))
}

/// A joint density for `(Y, Z)` together with a marginal distribution
/// function and its quantile function.
#[derive(Clone, Debug)]
pub struct DistributionPair {
    density: Kernel,
    cdf: MonotoneFn,
    quantile: PseudoInverse,
}

impl DistributionPair {
    /// The cdf must take values in `[0, 1]` and start at 0 at the left end of
    /// its domain.
    pub fn new(density: Kernel, cdf: MonotoneFn) -> Result<Self> {
        let (lo, hi) = cdf.range();
        if !(lo >= 0.0 && hi <= 1.0) {
            return Err(Error::invalid(format!("distribution function range [{lo}, {hi}] is not inside [0, 1]")));
        }
        if cdf.at(cdf.lo()) != 0.0 {
            return Err(Error::invalid("distribution function must vanish at the left end of its domain"));
        }
        let quantile = cdf.pseudo_inverse(Flavor::Quantile);
        Ok(DistributionPair { density, cdf, quantile })
    }

    pub fn density(&self) -> &Kernel {
        &self.density
    }

    pub fn cdf(&self) -> &MonotoneFn {
        &self.cdf
    }

    pub fn quantile(&self) -> &PseudoInverse {
        &self.quantile
    }
}

/// `P(Y <= b, Z <= c) <= int_0^b int_0^{F(x)} rho dy dx + int_0^c int_0^{Q(y)} rho dx dy`,
/// with the origin taken at the left end of the cdf's domain.
pub fn check_probabilistic_young(dp: &DistributionPair, b: f64, c: f64, cfg: &QuadConfig) -> Result<InequalityReport> {
    let f = &dp.cdf;
    let x0 = f.lo();
    if !(b > x0 && b <= f.hi()) {
        return Err(Error::domain(format!("b = {b} must lie in ({x0}, {}]", f.hi())));
    }
    let (_, top) = f.range();
    if !(c > 0.0 && c <= top) {
        return Err(Error::precondition(format!("c = {c} must lie in (0, {top}], the range of the distribution function")));
    }
    let rho = &dp.density;
    let lhs = rect_measure(rho, x0, b, 0.0, c, cfg)?;
    let hyp = hypograph_measure(rho, f, x0, b, cfg)?;
    let epi = epigraph_measure_with(rho, f, x0, c, |y| dp.quantile.value(y), cfg)?;
    let rhs = hyp.plus(epi);
    let witness = (f.value(b, crate::monotone::Side::Left), f.value(b, crate::monotone::Side::Right));
    Ok(InequalityReport::new("probabilistic", lhs, rhs, witness, c, rho.strictly_positive()))
}
