//! Young's inequality for nondecreasing functions and kernel-weighted
//! measures, its classical form, and the n-fold analogue for product kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::{MonotoneFn, Side};
use crate::probability::erf;
use crate::quadrature::{
    epigraph_measure, hypograph_measure, integrate, integrate_samples, rect_measure, Factor, IntegralResult, Kernel, Primitive,
    QuadConfig, Sample,
};

/// Default tolerance for inequality and equality verdicts.
pub const DEFAULT_VERDICT_TOL: f64 = 1e-8;

/// Both sides of one inequality instance, oriented so that `lhs <= rhs`
/// is the claim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub kind: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub gap: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub equality: bool,
    /// Interval of levels for which equality is predicted, when the
    /// inequality has such a characterization.
    pub equality_witness: Option<[f64; 2]>,
    pub verdict_tolerance: f64,
    /// For strictly positive kernels: whether the numerical gap agrees with
    /// the geometric equality verdict.
    pub gap_agrees: Option<bool>,
}

impl InequalityReport {
    /// Report without an equality characterization; equality is read off
    /// the gap.
    pub fn from_values(kind: &str, lhs: f64, lhs_error: f64, rhs: f64, rhs_error: f64, tol: f64) -> Self {
        let mut r = InequalityReport {
            kind: kind.to_string(),
            lhs,
            rhs,
            gap: rhs - lhs,
            lhs_error,
            rhs_error,
            equality: false,
            equality_witness: None,
            verdict_tolerance: tol,
            gap_agrees: None,
        };
        r.equality = r.gap.abs() <= r.tolerance();
        r
    }

    /// Report whose equality verdict is `level in [witness.0, witness.1]`
    /// (widened by the verdict tolerance).
    pub fn new(
        kind: &str,
        lhs: IntegralResult,
        rhs: IntegralResult,
        witness: (f64, f64),
        level: f64,
        strictly_positive: bool,
    ) -> Self {
        Self::with_tolerance(kind, lhs, rhs, witness, level, strictly_positive, DEFAULT_VERDICT_TOL)
    }

    pub fn with_tolerance(
        kind: &str,
        lhs: IntegralResult,
        rhs: IntegralResult,
        witness: (f64, f64),
        level: f64,
        strictly_positive: bool,
        tol: f64,
    ) -> Self {
        let mut r = Self::from_values(kind, lhs.value, lhs.error_estimate, rhs.value, rhs.error_estimate, tol);
        r.equality = level >= witness.0 - tol && level <= witness.1 + tol;
        r.equality_witness = Some([witness.0, witness.1]);
        if strictly_positive {
            r.gap_agrees = Some(r.equality == (r.gap.abs() <= r.tolerance()));
        }
        r
    }

    /// Combined slack: both error estimates plus the verdict tolerance.
    pub fn tolerance(&self) -> f64 {
        self.lhs_error + self.rhs_error + self.verdict_tolerance
    }

    /// `gap >= -tolerance`.
    pub fn holds(&self) -> bool {
        self.gap >= -self.tolerance()
    }

    /// Replaces the verdict tolerance. Gap-based equality verdicts are
    /// recomputed; level-based ones keep their geometric verdict.
    pub fn retolerate(&mut self, tol: f64) {
        self.verdict_tolerance = tol;
        let by_gap = self.gap.abs() <= self.tolerance();
        match self.equality_witness {
            None => self.equality = by_gap,
            Some(_) => {
                if self.gap_agrees.is_some() {
                    self.gap_agrees = Some(self.equality == by_gap);
                }
            }
        }
    }

    /// Multiplies the left side by `s` and recomputes the gap. Exists to
    /// exercise violation handling.
    pub fn scale_lhs(&mut self, s: f64) {
        self.lhs *= s;
        self.lhs_error *= s.abs();
        self.gap = self.rhs - self.lhs;
    }
}

/// Data of one weighted Young instance: kernel, function, `a < b`, and a
/// level `c >= f(a)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YoungInstance {
    pub kernel: Kernel,
    pub f: MonotoneFn,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl YoungInstance {
    pub fn new(kernel: Kernel, f: MonotoneFn, a: f64, b: f64, c: f64) -> Result<Self> {
        let inst = YoungInstance { kernel, f, a, b, c };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: YoungInstance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.f.domain();
        if !(self.a < self.b && self.a >= lo && self.b <= hi) {
            return Err(Error::domain(format!("need {lo} <= a < b <= {hi}, got a = {}, b = {}", self.a, self.b)));
        }
        let fa = self.f.at(self.a);
        let (_, top) = self.f.range();
        if !(self.c >= fa && self.c <= top) {
            return Err(Error::domain(format!("level c = {} must lie in [f(a), f(hi)] = [{fa}, {top}]", self.c)));
        }
        Ok(())
    }

    pub fn fa(&self) -> f64 {
        self.f.at(self.a)
    }

    /// `[f(b-), f(b+)]`.
    pub fn witness(&self) -> (f64, f64) {
        (self.f.value(self.b, Side::Left), self.f.value(self.b, Side::Right))
    }

    /// `f_sup^-1(c)`.
    pub fn t(&self) -> f64 {
        self.f.sup_inverse(self.c)
    }

    /// `dist(c, [f(b-), f(b+)])`.
    pub fn level_distance(&self) -> f64 {
        let (l, r) = self.witness();
        (l - self.c).max(self.c - r).max(0.0)
    }
}

/// The three measures entering the inequality.
#[derive(Clone, Copy, Debug)]
pub struct YoungParts {
    pub rect: IntegralResult,
    pub hyp: IntegralResult,
    pub epi: IntegralResult,
}

pub fn young_parts(inst: &YoungInstance, cfg: &QuadConfig) -> Result<YoungParts> {
    inst.validate()?;
    let k = &inst.kernel;
    let rect = rect_measure(k, inst.a, inst.b, inst.fa(), inst.c, cfg)?;
    let hyp = hypograph_measure(k, &inst.f, inst.a, inst.b, cfg)?;
    let epi = epigraph_measure(k, &inst.f, inst.a, inst.c, cfg)?;
    Ok(YoungParts { rect, hyp, epi })
}

/// `rho([a,b] x [f(a),c]) <= rho(hyp f|[a,b]) + rho(epi f|[f(a),c])`, with
/// equality verdict `c in [f(b-), f(b+)]`.
pub fn check_young(inst: &YoungInstance, cfg: &QuadConfig) -> Result<InequalityReport> {
    check_young_tol(inst, cfg, DEFAULT_VERDICT_TOL)
}

pub fn check_young_tol(inst: &YoungInstance, cfg: &QuadConfig, tol: f64) -> Result<InequalityReport> {
    let p = young_parts(inst, cfg).map_err(|e| e.with_context("young check"))?;
    Ok(InequalityReport::with_tolerance(
        "young",
        p.rect,
        p.hyp.plus(p.epi),
        inst.witness(),
        inst.c,
        inst.kernel.strictly_positive(),
        tol,
    ))
}

/// `bc - a f(a) <= int_a^b f + int_{f(a)}^c f^-1` for continuous increasing `f`.
pub fn check_young_classical(f: &MonotoneFn, a: f64, b: f64, c: f64, cfg: &QuadConfig) -> Result<InequalityReport> {
    let (lo, hi) = f.domain();
    if !(lo <= a && a < b && b <= hi) {
        return Err(Error::domain(format!("need {lo} <= a < b <= {hi}, got a = {a}, b = {b}")));
    }
    if !f.is_continuous_on(a, b, 1e-12) {
        return Err(Error::precondition("classical form needs f continuous on [a, b]"));
    }
    if f.pieces().iter().any(|p| p.is_flat() && p.end() > a && p.start() < b) {
        return Err(Error::precondition("classical form needs f injective on [a, b]"));
    }
    let fa = f.at(a);
    if !(c > fa) {
        return Err(Error::precondition(format!("classical form needs c > f(a) = {fa}")));
    }
    let (ylo, yhi) = f.range();
    let one = Kernel::one((lo, hi), (ylo.min(fa), yhi.max(c)))?;
    let inst = YoungInstance::new(one, f.clone(), a, b, c)?;
    let p = young_parts(&inst, cfg)?;
    let closed = (b - a) * (c - fa);
    let rect_mismatch = (closed - p.rect.value).abs();
    let lhs = IntegralResult { value: b * c - a * fa, error_estimate: rect_mismatch, subdivisions: 0 };
    let shift = (b - a) * fa + a * (c - fa);
    let mut rhs = p.hyp.plus(p.epi);
    rhs.value += shift;
    Ok(InequalityReport::new("young_classical", lhs, rhs, inst.witness(), c, true))
}

/// `erf(x) erf(y) <= 2/sqrt(pi) (int_0^x erf(s^(p-1)) e^(-s^2) ds + int_0^y erf(s^(q-1)) e^(-s^2) ds)`
/// where `1/p + 1/q = 1`. Equality iff `y = x^(p-1)`.
pub fn check_gaussian_young(x: f64, y: f64, p: f64, cfg: &QuadConfig) -> Result<InequalityReport> {
    if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::domain(format!("need x, y >= 0, got x = {x}, y = {y}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("exponent p = {p} must exceed 1")));
    }
    let q = p / (p - 1.0);
    let w = 2.0 / std::f64::consts::PI.sqrt();
    let term = |e: f64, u: f64| integrate(|s| erf(s.powf(e)) * (-s * s).exp(), 0.0, u, &[], cfg);
    let mut rhs = term(p - 1.0, x)?.plus(term(q - 1.0, y)?);
    rhs.value *= w;
    rhs.error_estimate *= w;
    let lhs = IntegralResult::exact(erf(x) * erf(y));
    let fx = x.powf(p - 1.0);
    Ok(InequalityReport::new("gaussian_young", lhs, rhs, (fx, fx), y, true))
}

/// `scale * prod_i k_i(s_i)` on `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NdKernel {
    #[serde(default = "unit")]
    pub scale: f64,
    pub factors: Vec<Factor>,
}

fn unit() -> f64 {
    1.0
}

impl NdKernel {
    pub fn one(n: usize) -> Self {
        NdKernel { scale: 1.0, factors: vec![Factor::One; n] }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }
}

/// Largest supported dimension for [`check_young_ndim`].
pub const MAX_NDIM: usize = 4;

/// n-fold analogue: the box `prod [phi_i(a_i), phi_i(b_i)]` against the sum
/// over `i` of the regions swept by `s` in the i-th coordinate while every
/// other coordinate `j` runs up to `phi_j` at the common parameter
/// `phi_i^-1(s)` (clamped to `[a_j, b_j]`).
pub fn check_young_ndim(
    k: &NdKernel,
    phis: &[MonotoneFn],
    a: &[f64],
    b: &[f64],
    cfg: &QuadConfig,
) -> Result<InequalityReport> {
    let n = phis.len();
    if !(2..=MAX_NDIM).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if k.dim() != n || a.len() != n || b.len() != n {
        return Err(Error::invalid(format!(
            "dimension mismatch: {n} functions, {} factors, {} lower and {} upper ends",
            k.dim(),
            a.len(),
            b.len()
        )));
    }
    if !(k.scale >= 0.0 && k.scale.is_finite()) {
        return Err(Error::invalid("kernel scale must be finite and nonnegative"));
    }
    cfg.validate()?;
    for (i, phi) in phis.iter().enumerate() {
        let (lo, hi) = phi.domain();
        if !(lo <= a[i] && a[i] < b[i] && b[i] <= hi) {
            return Err(Error::domain(format!("axis {i}: need {lo} <= a < b <= {hi}, got [{}, {}]", a[i], b[i])));
        }
    }
    let lows: Vec<f64> = (0..n).map(|j| phis[j].at(a[j])).collect();
    let highs: Vec<f64> = (0..n).map(|j| phis[j].at(b[j])).collect();
    let prims = (0..n)
        .map(|j| Primitive::new(k.factors[j].clone(), lows[j], highs[j]))
        .collect::<Result<Vec<_>>>()?;

    let full: Vec<Sample> = (0..n).map(|j| prims[j].between(lows[j], highs[j])).collect::<Result<_>>()?;
    let lhs = product_of(k.scale, full.iter().copied());

    let mut rhs = IntegralResult::zero();
    for i in 0..n {
        let phi = &phis[i];
        let upper = |s: f64, j: usize| {
            let tau = phi.sup_inverse(s);
            phis[j].at(tau.clamp(a[j], b[j]))
        };
        let mut breaks = phi.knot_values_in(lows[i], highs[i]);
        breaks.extend(k.factors[i].breaks(lows[i], highs[i]));
        for j in (0..n).filter(|&j| j != i) {
            for x in [a[j], b[j]]
                .into_iter()
                .chain(phis[j].breaks_in(a[j], b[j]))
                .chain(k.factors[j].breaks(lows[j], highs[j]).into_iter().flat_map(|t| {
                    [phis[j].sup_inverse(t), phis[j].inf_inverse(t)]
                }))
            {
                breaks.push(phi.value(x.clamp(phi.lo(), phi.hi()), Side::Left));
                breaks.push(phi.value(x.clamp(phi.lo(), phi.hi()), Side::Right));
            }
        }
        let fi = &k.factors[i];
        let term = integrate_samples(
            |s| {
                let w = fi.eval(s);
                if w == 0.0 {
                    return Ok(Sample::exact(0.0));
                }
                let inner = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| prims[j].between(lows[j], upper(s, j).max(lows[j])))
                    .collect::<Result<Vec<_>>>()?;
                let p = product_of(k.scale * w, inner.into_iter());
                Ok(p.as_sample())
            },
            lows[i],
            highs[i],
            &breaks,
            cfg,
        )
        .map_err(|e| e.with_context("n-fold young term"))?;
        let skipped = fi.truncated_len(lows[i], highs[i]);
        let others: f64 = (0..n).filter(|&j| j != i).map(|j| full[j].value.abs() + full[j].error).product();
        rhs = rhs.plus(IntegralResult {
            error_estimate: term.error_estimate + k.scale * skipped * others,
            ..term
        });
    }
    Ok(InequalityReport::from_values(
        "young_ndim",
        lhs.value,
        lhs.error_estimate,
        rhs.value,
        rhs.error_estimate,
        DEFAULT_VERDICT_TOL,
    ))
}

fn product_of(scale: f64, parts: impl Iterator<Item = Sample>) -> IntegralResult {
    let mut value = scale;
    let mut rel = 0.0;
    let mut err_abs = 0.0;
    for s in parts {
        value *= s.value;
        if s.value != 0.0 {
            rel += s.error / s.value.abs();
        } else {
            err_abs += s.error;
        }
    }
    IntegralResult { value, error_estimate: value.abs() * rel + scale.abs() * err_abs, subdivisions: 0 }
}
