//! Seeded sweeps over generated instances.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CliResult, Failure};
use crate::cconvex::{check_cconv_young, CostFn};
use crate::error::Error;
use crate::legendre::{check_ext_young, ConvexFn};
use crate::monotone::MonotoneFn;
use crate::precision::all_bounds;
use crate::probability::{check_probabilistic_young, DistributionPair};
use crate::quadrature::{Kernel, QuadConfig};
use crate::random::{InstanceGen, KernelFamily, LevelMode, MonotoneShape};
use crate::young::{check_young_ndim, check_young_tol, InequalityReport, NdKernel, YoungInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Young,
    Bounds,
    Extyoung,
    Cconv,
    Ndim,
    Prob,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RowFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOutput {
    pub path: PathBuf,
    #[serde(default)]
    pub format: RowFormat,
}

/// A sweep: which check, how instances are drawn, and where rows go.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub shape: MonotoneShape,
    #[serde(default = "default_family")]
    pub kernel_family: KernelFamily,
    #[serde(default = "default_level")]
    pub level_mode: LevelMode,
    #[serde(default)]
    pub output: Option<SweepOutput>,
}

fn default_seed() -> u64 {
    42
}
fn default_count() -> usize {
    100
}
fn default_family() -> KernelFamily {
    KernelFamily::Any
}
fn default_level() -> LevelMode {
    LevelMode::Mixed
}

impl SweepSpec {
    pub fn new(kind: SweepKind) -> Self {
        SweepSpec {
            kind,
            seed: default_seed(),
            count: default_count(),
            shape: MonotoneShape::default(),
            kernel_family: default_family(),
            level_mode: default_level(),
            output: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.count == 0 {
            return Err(Failure::input("field `count`: must be at least 1"));
        }
        let s = &self.shape;
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if s.max_pieces == 0 || !prob(s.jump_prob) || !prob(s.plateau_prob) || !(0.0..1.0).contains(&s.max_jump) {
            return Err(Failure::input(
                "field `shape`: need max_pieces >= 1, probabilities in [0, 1] and max_jump in [0, 1)",
            ));
        }
        if !(s.rise[0] > 0.0 && s.rise[0] <= s.rise[1] && s.rise[1].is_finite()) {
            return Err(Failure::input("field `shape.rise`: need 0 < rise[0] <= rise[1]"));
        }
        Ok(())
    }
}

/// One generated instance.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepCase {
    Young(YoungInstance),
    Bounds(YoungInstance),
    Extyoung { instance: YoungInstance, p: f64, eps: f64 },
    Cconv { kernel: Kernel, f: MonotoneFn, x: f64, y: f64 },
    Ndim { kernel: NdKernel, phis: Vec<MonotoneFn>, a: Vec<f64>, b: Vec<f64> },
    Prob { density: Kernel, cdf: MonotoneFn, b: f64, c: f64 },
}

/// One output row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub kind: SweepKind,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub gap: Option<f64>,
    pub lhs_error: Option<f64>,
    pub rhs_error: Option<f64>,
    pub equality: Option<bool>,
    pub holds: Option<bool>,
    /// Smallest slack among the gap bounds (bounds sweeps only).
    pub min_bound_slack: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub kind: SweepKind,
    pub seed: u64,
    pub count: usize,
    pub violations: usize,
    /// Instances whose check returned an error (e.g. quadrature failure).
    pub failures: usize,
    pub equality_instances: usize,
    pub max_abs_gap_at_equality: f64,
    /// Smallest gap among instances predicted strict.
    pub min_gap_strict: Option<f64>,
    pub output_path: Option<PathBuf>,
    /// Present when no output file was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<SweepRow>>,
}

/// The deterministic instance stream of a sweep.
pub fn sweep_cases(spec: &SweepSpec) -> CliResult<Vec<SweepCase>> {
    spec.validate()?;
    let mut gen = InstanceGen::new(spec.seed);
    let ps = [1.5, 2.0, 3.0];
    (0..spec.count)
        .map(|i| -> crate::error::Result<SweepCase> {
            Ok(match spec.kind {
                SweepKind::Young => {
                    SweepCase::Young(gen.young_instance(&spec.shape, spec.kernel_family, spec.level_mode)?)
                }
                SweepKind::Bounds => {
                    SweepCase::Bounds(gen.young_instance(&spec.shape, spec.kernel_family, spec.level_mode)?)
                }
                SweepKind::Extyoung => {
                    let shape = MonotoneShape { jump_prob: 0.0, ..spec.shape.clone() };
                    let instance = gen.young_instance(&shape, spec.kernel_family, spec.level_mode)?;
                    SweepCase::Extyoung { instance, p: ps[i % 3], eps: gen.uniform(0.5, 2.0) }
                }
                SweepKind::Cconv => {
                    let inst = gen.young_instance(&spec.shape, spec.kernel_family, spec.level_mode)?;
                    SweepCase::Cconv { kernel: inst.kernel, x: inst.b, y: inst.c, f: inst.f }
                }
                SweepKind::Ndim => {
                    let n = 2 + gen.index(3);
                    let mut phis = Vec::with_capacity(n);
                    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
                    for _ in 0..n {
                        let f0 = gen.uniform(0.0, 0.5);
                        phis.push(gen.monotone(0.0, 1.5, f0, &spec.shape)?);
                        let lo = gen.uniform(0.0, 0.5);
                        a.push(lo);
                        b.push(gen.uniform(lo + 0.2, 1.5));
                    }
                    let factors = (0..n).map(|_| gen.factor(spec.kernel_family)).collect();
                    SweepCase::Ndim { kernel: NdKernel { scale: gen.uniform(0.5, 2.0), factors }, phis, a, b }
                }
                SweepKind::Prob => {
                    let len = gen.uniform(1.5, 2.0);
                    let shape = MonotoneShape { rise: [0.5, 1.0], ..spec.shape.clone() };
                    let cdf = gen.monotone(0.0, len, 0.0, &shape)?;
                    let top = cdf.range().1;
                    let density = gen.kernel(spec.kernel_family, (0.0, len), (0.0, 1.0))?;
                    let b = gen.uniform(0.1, len);
                    let c = gen.uniform(0.05, top);
                    SweepCase::Prob { density, cdf, b, c }
                }
            })
        })
        .collect::<crate::error::Result<Vec<_>>>()
        .map_err(|e| Failure::input(format!("instance generation failed: {e}")))
}

fn from_report(index: usize, kind: SweepKind, r: &InequalityReport) -> SweepRow {
    SweepRow {
        index,
        kind,
        lhs: Some(r.lhs),
        rhs: Some(r.rhs),
        gap: Some(r.gap),
        lhs_error: Some(r.lhs_error),
        rhs_error: Some(r.rhs_error),
        equality: Some(r.equality),
        holds: Some(r.holds()),
        min_bound_slack: None,
        error: None,
    }
}

fn failed_row(index: usize, kind: SweepKind, e: Error) -> SweepRow {
    SweepRow {
        index,
        kind,
        lhs: None,
        rhs: None,
        gap: None,
        lhs_error: None,
        rhs_error: None,
        equality: None,
        holds: None,
        min_bound_slack: None,
        error: Some(e.to_string()),
    }
}

/// Evaluates one case with the same routine as the matching `check`.
pub fn evaluate(index: usize, case: &SweepCase, cfg: &QuadConfig, tol: f64, lhs_scale: Option<f64>) -> SweepRow {
    let finish = |kind: SweepKind, r: crate::error::Result<InequalityReport>| match r {
        Ok(mut r) => {
            r.retolerate(tol);
            if let Some(s) = lhs_scale {
                r.scale_lhs(s);
            }
            from_report(index, kind, &r)
        }
        Err(e) => failed_row(index, kind, e),
    };
    match case {
        SweepCase::Young(inst) => finish(SweepKind::Young, check_young_tol(inst, cfg, tol)),
        SweepCase::Bounds(inst) => {
            let res = check_young_tol(inst, cfg, tol).and_then(|r| Ok((r, all_bounds(inst, cfg)?)));
            match res {
                Ok((r, bounds)) => {
                    let mut row = from_report(index, SweepKind::Bounds, &r);
                    row.min_bound_slack = bounds.iter().map(|b| b.slack).reduce(f64::min);
                    row.holds = Some(bounds.iter().all(|b| b.satisfied) && r.holds());
                    row
                }
                Err(e) => failed_row(index, SweepKind::Bounds, e),
            }
        }
        SweepCase::Extyoung { instance, p, eps } => {
            let r = ConvexFn::power_p(*p, 0.0, 100.0).and_then(|phi| {
                let phi_star = phi.dual().expect("power functions have closed-form duals");
                check_ext_young(instance, &phi, &phi_star, *eps, cfg)
            });
            finish(SweepKind::Extyoung, r)
        }
        SweepCase::Cconv { kernel, f, x, y } => {
            let r = CostFn::from_kernel(kernel.clone(), (f.lo(), f.at(f.lo())))
                .and_then(|cost| check_cconv_young(&cost, f, *x, *y, cfg));
            finish(SweepKind::Cconv, r)
        }
        SweepCase::Ndim { kernel, phis, a, b } => finish(SweepKind::Ndim, check_young_ndim(kernel, phis, a, b, cfg)),
        SweepCase::Prob { density, cdf, b, c } => {
            let r = DistributionPair::new(density.clone(), cdf.clone())
                .and_then(|dp| check_probabilistic_young(&dp, *b, *c, cfg));
            finish(SweepKind::Prob, r)
        }
    }
}

/// Runs the sweep on `threads` workers (all cores when `None`). Rows are in
/// instance order whatever the completion order.
pub fn run_sweep(
    spec: &SweepSpec,
    cfg: &QuadConfig,
    tol: f64,
    lhs_scale: Option<f64>,
    threads: Option<usize>,
) -> CliResult<SweepSummary> {
    let cases = sweep_cases(spec)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Failure::input(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        cases.par_iter().enumerate().map(|(i, c)| evaluate(i, c, cfg, tol, lhs_scale)).collect()
    });

    let mut summary = SweepSummary {
        kind: spec.kind,
        seed: spec.seed,
        count: spec.count,
        violations: rows.iter().filter(|r| r.holds == Some(false)).count(),
        failures: rows.iter().filter(|r| r.error.is_some()).count(),
        equality_instances: 0,
        max_abs_gap_at_equality: 0.0,
        min_gap_strict: None,
        output_path: None,
        rows: None,
    };
    for r in &rows {
        match (r.equality, r.gap) {
            (Some(true), Some(g)) => {
                summary.equality_instances += 1;
                summary.max_abs_gap_at_equality = summary.max_abs_gap_at_equality.max(g.abs());
            }
            (Some(false), Some(g)) => {
                summary.min_gap_strict = Some(summary.min_gap_strict.map_or(g, |m: f64| m.min(g)));
            }
            _ => {}
        }
    }
    match &spec.output {
        Some(out) => {
            write_rows(&rows, out)?;
            summary.output_path = Some(out.path.clone());
        }
        None => summary.rows = Some(rows),
    }
    Ok(summary)
}

fn write_rows(rows: &[SweepRow], out: &SweepOutput) -> CliResult<()> {
    let fail = |e: &dyn std::fmt::Display| Failure::input(format!("cannot write {}: {e}", out.path.display()));
    match out.format {
        RowFormat::Csv => {
            let mut w = csv::Writer::from_path(&out.path).map_err(|e| fail(&e))?;
            for r in rows {
                w.serialize(r).map_err(|e| fail(&e))?;
            }
            w.flush().map_err(|e| fail(&e))
        }
        RowFormat::Json => {
            let text = serde_json::to_string_pretty(rows).map_err(|e| fail(&e))?;
            std::fs::write(&out.path, text + "\n").map_err(|e| fail(&e))
        }
    }
}
