//! Command-line front end.
//!
//! Exit codes: 0 when every verdict holds, 1 when an inequality or bound is
//! violated beyond tolerance, 2 on input errors, 3 when quadrature fails to
//! converge.

mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cconvex::{check_cconv_young, CostFn, CostSpec};
use crate::error::Error;
use crate::legendre::{check_ext_young, check_fenchel_young, conjugate, ConvexFn, ConvexSpec, DEFAULT_GRID};
use crate::monotone::MonotoneFn;
use crate::precision::{all_bounds, GapBoundReport};
use crate::probability::{check_probabilistic_young, erf, erf_inv, erf_inv_full, DistributionPair, ErfInvSeries, SERIES_Z_MAX};
use crate::quadrature::{Kernel, QuadConfig};
use crate::report::{render, Format};
use crate::young::{check_young_ndim, check_young_tol, InequalityReport, NdKernel, YoungInstance, DEFAULT_VERDICT_TOL};

pub use sweep::{run_sweep, sweep_cases, RowFormat, SweepCase, SweepKind, SweepOutput, SweepRow, SweepSpec, SweepSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "YOUNGKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "youngkit", version, about = "Check weighted Young inequalities and their relatives")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Relative tolerance of adaptive quadrature.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of adaptive quadrature.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Maximum bisection depth of adaptive quadrature.
    #[arg(long, global = true)]
    pub max_depth: Option<u32>,
    /// Tolerance of inequality and equality verdicts.
    #[arg(long, global = true)]
    pub verdict_tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Multiply every left-hand side by this factor before the verdict.
    #[arg(long, global = true, hide = true)]
    pub force_lhs_scale: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one inequality instance read from a JSON file.
    Check {
        #[command(subcommand)]
        which: CheckKind,
    },
    /// Inverse error function with its round-trip residual.
    Quantile {
        #[arg(allow_negative_numbers = true)]
        z: f64,
    },
    /// Numerical Legendre conjugate of a builtin convex function.
    Legendre(LegendreArgs),
    /// Randomized sweep over generated instances.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// JSON file, or `-` for standard input.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CheckKind {
    /// Weighted Young inequality.
    Young(ConfigArg),
    /// Every applicable gap bound.
    Bounds(ConfigArg),
    /// Duality-sharpened form with a convex `phi`.
    Extyoung(ConfigArg),
    /// Cost-function form.
    Cconv(ConfigArg),
    /// n-fold analogue for product kernels.
    Ndim(ConfigArg),
    /// Probabilistic form with a distribution function and its quantile.
    Prob(ConfigArg),
}

#[derive(Debug, Args)]
pub struct LegendreArgs {
    /// JSON description of the convex function.
    #[arg(long)]
    pub config: PathBuf,
    /// Interval of the conjugate variable; defaults to the derivative image.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Points at which to report the conjugate (repeatable).
    #[arg(long, allow_negative_numbers = true)]
    pub at: Vec<f64>,
    /// Check `xy <= F(x) + F*(y)` at this pair.
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
    pub pair: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep description; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<SweepKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// File receiving one row per instance.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub output_format: Option<RowFormat>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Convergence { .. } => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `argv` (including the program name), runs the command, writes the
/// report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let _ = if text.ends_with('\n') { write!(out, "{text}") } else { writeln!(out, "{text}") };
            code
        }
        Err(f) => {
            let _ = writeln!(err, "youngkit: {}", f.message);
            f.code
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

impl GlobalOpts {
    pub fn quad_config(&self) -> CliResult<QuadConfig> {
        let mut cfg = QuadConfig::default();
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.max_depth {
            cfg.max_depth = v;
        }
        cfg.validate().map_err(|e| Failure::input(format!("--rel-tol/--abs-tol/--max-depth: {e}")))?;
        Ok(cfg)
    }

    pub fn verdict_tolerance(&self) -> CliResult<f64> {
        let tol = self.verdict_tol.unwrap_or(DEFAULT_VERDICT_TOL);
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Failure::input(format!("--verdict-tol must be finite and nonnegative, got {tol}")));
        }
        Ok(tol)
    }

    fn lhs_scale(&self) -> CliResult<Option<f64>> {
        match self.force_lhs_scale {
            Some(s) if !s.is_finite() => Err(Failure::input("--force-lhs-scale must be finite")),
            s => Ok(s),
        }
    }
}

fn execute(cli: &Cli) -> CliResult<(String, i32)> {
    let g = &cli.global;
    let cfg = g.quad_config()?;
    let tol = g.verdict_tolerance()?;
    let scale = g.lhs_scale()?;
    let finish = |mut r: InequalityReport| {
        r.retolerate(tol);
        if let Some(s) = scale {
            r.scale_lhs(s);
        }
        let code = if r.holds() { EXIT_OK } else { EXIT_VIOLATION };
        (render(&r, g.format), code)
    };
    match &cli.command {
        Command::Check { which } => match which {
            CheckKind::Young(c) => {
                let inst: YoungInstance = read_config(&c.config)?;
                inst.validate()?;
                Ok(finish(check_young_tol(&inst, &cfg, tol)?))
            }
            CheckKind::Bounds(c) => {
                if scale.is_some() {
                    return Err(Failure::input("--force-lhs-scale does not apply to `check bounds`"));
                }
                let inst: YoungInstance = read_config(&c.config)?;
                inst.validate()?;
                let bounds = all_bounds(&inst, &cfg)?;
                let code = if bounds.iter().all(|b| b.satisfied) { EXIT_OK } else { EXIT_VIOLATION };
                Ok((render(&bounds, g.format), code))
            }
            CheckKind::Extyoung(c) => {
                let conf: ExtYoungConfig = read_config(&c.config)?;
                Ok(finish(conf.check(&cfg)?))
            }
            CheckKind::Cconv(c) => {
                let conf: CconvConfig = read_config(&c.config)?;
                let cost = CostFn::from_spec(&conf.cost).map_err(|e| field_error("cost", e))?;
                Ok(finish(check_cconv_young(&cost, &conf.f, conf.x, conf.y, &cfg)?))
            }
            CheckKind::Ndim(c) => {
                let conf: NdimConfig = read_config(&c.config)?;
                Ok(finish(check_young_ndim(&conf.kernel, &conf.phis, &conf.a, &conf.b, &cfg)?))
            }
            CheckKind::Prob(c) => {
                let conf: ProbConfig = read_config(&c.config)?;
                let dp = DistributionPair::new(conf.density, conf.cdf).map_err(|e| field_error("cdf", e))?;
                Ok(finish(check_probabilistic_young(&dp, conf.b, conf.c, &cfg)?))
            }
        },
        Command::Quantile { z } => {
            let q = quantile(*z)?;
            Ok((render(&q, g.format), EXIT_OK))
        }
        Command::Legendre(args) => legendre(args, g.format),
        Command::Sweep(args) => {
            let mut spec: SweepSpec = match &args.config {
                Some(p) => read_config(p)?,
                None => {
                    let kind = args.kind.ok_or_else(|| Failure::input("sweep needs --config or --kind"))?;
                    SweepSpec::new(kind)
                }
            };
            if let Some(k) = args.kind {
                spec.kind = k;
            }
            if let Some(s) = args.seed {
                spec.seed = s;
            }
            if let Some(n) = args.count {
                spec.count = n;
            }
            if let Some(p) = &args.output {
                let format = args.output_format.or(spec.output.as_ref().map(|o| o.format)).unwrap_or_default();
                spec.output = Some(SweepOutput { path: p.clone(), format });
            } else if let (Some(f), Some(o)) = (args.output_format, spec.output.as_mut()) {
                o.format = f;
            }
            let threads = threads_from_env()?;
            let summary = run_sweep(&spec, &cfg, tol, scale, threads)?;
            let code = if summary.violations > 0 { EXIT_VIOLATION } else { EXIT_OK };
            Ok((render(&summary, g.format), code))
        }
    }
}

fn field_error(field: &str, e: Error) -> Failure {
    Failure::input(format!("field `{field}`: {e}"))
}

/// Reads and deserializes a JSON config, naming the offending field on error.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|m| Failure::input(format!("{}: {m}", path.display())))
}

/// Deserializes JSON text, prefixing errors with the path of the field.
pub fn parse_config<T: DeserializeOwned>(text: &str) -> std::result::Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.inner().to_string()
        } else {
            format!("field `{path}`: {}", e.inner())
        }
    })
}

/// Parses `YOUNGKIT_THREADS`; `None` when unset.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::input(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Config of `check extyoung`. Without `phi_star` the closed-form dual of
/// `phi` is used.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExtYoungConfig {
    pub instance: YoungInstance,
    pub phi: ConvexSpec,
    #[serde(default)]
    pub phi_star: Option<ConvexSpec>,
    #[serde(default = "unit")]
    pub eps: f64,
}

fn unit() -> f64 {
    1.0
}

impl ExtYoungConfig {
    pub fn check(&self, cfg: &QuadConfig) -> CliResult<InequalityReport> {
        self.instance.validate().map_err(|e| field_error("instance", e))?;
        let phi = ConvexFn::from_spec(&self.phi).map_err(|e| field_error("phi", e))?;
        let phi_star = match &self.phi_star {
            Some(s) => ConvexFn::from_spec(s).map_err(|e| field_error("phi_star", e))?,
            None => phi.dual().ok_or_else(|| Failure::input("field `phi_star`: required, `phi` has no closed-form dual"))?,
        };
        Ok(check_ext_young(&self.instance, &phi, &phi_star, self.eps, cfg)?)
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CconvConfig {
    pub cost: CostSpec,
    pub f: MonotoneFn,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NdimConfig {
    pub kernel: NdKernel,
    pub phis: Vec<MonotoneFn>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProbConfig {
    pub density: Kernel,
    pub cdf: MonotoneFn,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Serialize)]
pub struct QuantileReport {
    pub z: f64,
    pub erf_inv: f64,
    /// `erf(erf_inv(z)) - z`
    pub residual: f64,
    /// `series` for `|z| <= 0.9`, `newton` beyond.
    pub method: &'static str,
}

pub fn quantile(z: f64) -> CliResult<QuantileReport> {
    if !(z.abs() <= 1.0) {
        return Err(Failure::input(format!("z = {z} must lie in [-1, 1]")));
    }
    let series = ErfInvSeries::standard();
    let (x, method) = if z.abs() <= SERIES_Z_MAX {
        (erf_inv(z, series)?, "series")
    } else {
        (erf_inv_full(z, series)?, "newton")
    };
    let residual = if x.is_finite() { erf(x) - z } else { 0.0 };
    Ok(QuantileReport { z, erf_inv: x, residual, method })
}

#[derive(Debug, Serialize)]
pub struct ConjugatePoint {
    pub y: f64,
    pub conjugate: f64,
    /// Closed-form conjugate when the function has one.
    pub closed_form: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct LegendreReport {
    pub function: ConvexSpec,
    pub window: [f64; 2],
    pub grid: usize,
    pub points: Vec<ConjugatePoint>,
    pub fenchel_young: Option<InequalityReport>,
}

fn legendre(args: &LegendreArgs, format: Format) -> CliResult<(String, i32)> {
    let spec: ConvexSpec = read_config(&args.config)?;
    let f = ConvexFn::from_spec(&spec).map_err(|e| Failure::input(format!("{}: {e}", args.config.display())))?;
    let dual = f.dual();
    let window = match (&args.window, &dual) {
        (Some(w), _) => (w[0], w[1]),
        (None, Some(d)) => d.domain(),
        (None, None) => return Err(Failure::input("--window is required for this function")),
    };
    let fs = conjugate(&f, window, args.grid)?;
    let ys: Vec<f64> = if args.at.is_empty() { crate::numeric::linspace(window.0, window.1, 9) } else { args.at.clone() };
    let points = ys
        .into_iter()
        .map(|y| {
            Ok(ConjugatePoint {
                y,
                conjugate: fs.eval(y)?,
                closed_form: dual.as_ref().and_then(|d| d.eval(y).ok()),
            })
        })
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    let fenchel_young = match &args.pair {
        Some(p) => Some(check_fenchel_young(&f, &fs, p[0], p[1])?),
        None => None,
    };
    let code = match &fenchel_young {
        Some(r) if !r.holds() => EXIT_VIOLATION,
        _ => EXIT_OK,
    };
    let report = LegendreReport { function: spec, window: [window.0, window.1], grid: args.grid, points, fenchel_young };
    Ok((render(&report, format), code))
}

/// Report type of `check bounds`, re-exported for schema tests.
pub type BoundsReport = Vec<GapBoundReport>;
