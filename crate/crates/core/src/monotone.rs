//! Nondecreasing functions on a finite interval, built from continuous
//! elementary pieces, together with their generalized inverses.
//!
//! A [`MonotoneFn`] is a list of pieces that tile `[lo, hi]`. Each piece is a
//! continuous nondecreasing map on its own closed subinterval; where two
//! adjacent pieces disagree at their common endpoint the function jumps, and a
//! [`Piece::Step`] piece is a plateau. The point value at an interior jump is
//! the right limit.
//!
//! Three inverse flavors are provided:
//!
//! | flavor | definition |
//! |--------|------------|
//! | [`Flavor::Sup`] | `inf { x : f(x) > y }` |
//! | [`Flavor::Inf`] | `sup { x : f(x) < y }` |
//! | [`Flavor::Quantile`] | `inf { x : f(x) >= y }` |
//!
//! Empty sets resolve to the nearest domain endpoint, so every inverse maps
//! `[f(lo), f(hi)]` into `[lo, hi]`. Plateaus of `f` become jumps of the
//! inverse and jumps of `f` become plateaus of the inverse.
//!
//! JSON form:
//!
//! ```json
//! {"domain": [0, 2],
//!  "pieces": [{"kind": "step", "start": 0, "end": 1, "value": 0},
//!             {"kind": "power", "start": 1, "end": 2, "offset": 2, "scale": 1, "shift": 1, "exponent": 2}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect_first_true, bisect_last_true};
use crate::probability::erf;

/// Samples per piece used to validate monotonicity at construction.
const VALIDATION_SAMPLES: usize = 65;
/// Largest sampled decrease tolerated inside a piece.
const MONOTONE_SLACK: f64 = 1e-12;
const BISECTION_ITERS: usize = 200;

fn default_one() -> f64 {
    1.0
}

/// One continuous nondecreasing elementary piece on `[start, end]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Piece {
    /// `value + slope * (x - start)`
    Affine {
        start: f64,
        end: f64,
        value: f64,
        slope: f64,
    },
    /// `offset + scale * (x - shift)^exponent`, requires `start >= shift`.
    Power {
        start: f64,
        end: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default = "default_one")]
        scale: f64,
        #[serde(default)]
        shift: f64,
        exponent: f64,
    },
    /// `offset + scale * exp(rate * x)`
    Exp {
        start: f64,
        end: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default = "default_one")]
        scale: f64,
        #[serde(default = "default_one")]
        rate: f64,
    },
    /// `offset + scale * erf(rate * (x - shift))`
    Erf {
        start: f64,
        end: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default = "default_one")]
        scale: f64,
        #[serde(default = "default_one")]
        rate: f64,
        #[serde(default)]
        shift: f64,
    },
    /// Constant `value` (a plateau).
    Step { start: f64, end: f64, value: f64 },
}

impl Piece {
    pub fn start(&self) -> f64 {
        match *self {
            Piece::Affine { start, .. }
            | Piece::Power { start, .. }
            | Piece::Exp { start, .. }
            | Piece::Erf { start, .. }
            | Piece::Step { start, .. } => start,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            Piece::Affine { end, .. }
            | Piece::Power { end, .. }
            | Piece::Exp { end, .. }
            | Piece::Erf { end, .. }
            | Piece::Step { end, .. } => end,
        }
    }

    fn set_bounds(&mut self, s: f64, e: f64) {
        match self {
            Piece::Affine { start, end, .. }
            | Piece::Power { start, end, .. }
            | Piece::Exp { start, end, .. }
            | Piece::Erf { start, end, .. }
            | Piece::Step { start, end, .. } => {
                *start = s;
                *end = e;
            }
        }
    }

    /// Value of the piece formula; `x` is clamped into the piece interval.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.start(), self.end());
        match *self {
            Piece::Affine { start, value, slope, .. } => value + slope * (x - start),
            Piece::Power { offset, scale, shift, exponent, .. } => {
                offset + scale * (x - shift).max(0.0).powf(exponent)
            }
            Piece::Exp { offset, scale, rate, .. } => offset + scale * (rate * x).exp(),
            Piece::Erf { offset, scale, rate, shift, .. } => offset + scale * erf(rate * (x - shift)),
            Piece::Step { value, .. } => value,
        }
    }

    /// True when the formula is constant on the piece.
    pub fn is_flat(&self) -> bool {
        match *self {
            Piece::Affine { slope, .. } => slope == 0.0,
            Piece::Power { scale, .. } => scale == 0.0,
            Piece::Exp { scale, rate, .. } | Piece::Erf { scale, rate, .. } => scale * rate == 0.0,
            Piece::Step { .. } => true,
        }
    }

    /// Closed-form root of `eval(x) = y`, when the formula admits one.
    fn closed_form_root(&self, y: f64) -> Option<f64> {
        match *self {
            Piece::Affine { start, value, slope, .. } if slope > 0.0 => Some(start + (y - value) / slope),
            Piece::Power { offset, scale, shift, exponent, .. } if scale > 0.0 => {
                Some(shift + ((y - offset) / scale).max(0.0).powf(1.0 / exponent))
            }
            Piece::Exp { offset, scale, rate, .. } if scale * rate != 0.0 => {
                let r = (y - offset) / scale;
                (r > 0.0).then(|| r.ln() / rate)
            }
            _ => None,
        }
    }

    /// Largest `x` in the piece with `eval(x) <= y` (caller guarantees
    /// `eval(start) <= y`).
    fn last_at_most(&self, y: f64) -> f64 {
        let (s, e) = (self.start(), self.end());
        if let Some(x) = self.closed_form_root(y) {
            let x = x.clamp(s, e);
            // Closed form may land one ulp on the wrong side; fall through to
            // bisection in that case.
            if self.eval(x) <= y {
                return x;
            }
        }
        bisect_last_true(s, e, BISECTION_ITERS, |x| self.eval(x) <= y)
    }

    /// Smallest `x` in the piece with `eval(x) >= y` (caller guarantees
    /// `eval(end) >= y`).
    fn first_at_least(&self, y: f64) -> f64 {
        let (s, e) = (self.start(), self.end());
        if let Some(x) = self.closed_form_root(y) {
            let x = x.clamp(s, e);
            if self.eval(x) >= y {
                return x;
            }
        }
        bisect_first_true(s, e, BISECTION_ITERS, |x| self.eval(x) >= y)
    }

    fn validate(&self) -> Result<()> {
        let (s, e) = (self.start(), self.end());
        if !(s.is_finite() && e.is_finite() && s < e) {
            return Err(Error::invalid(format!("piece bounds [{s}, {e}] must be finite with start < end")));
        }
        let ok = match *self {
            Piece::Affine { value, slope, .. } => value.is_finite() && slope.is_finite() && slope >= 0.0,
            Piece::Power { offset, scale, shift, exponent, .. } => {
                offset.is_finite() && scale.is_finite() && scale >= 0.0 && exponent.is_finite() && exponent > 0.0 && s >= shift
            }
            Piece::Exp { offset, scale, rate, .. } => {
                offset.is_finite() && scale.is_finite() && rate.is_finite() && scale * rate >= 0.0
            }
            Piece::Erf { offset, scale, rate, shift, .. } => {
                offset.is_finite() && scale.is_finite() && rate.is_finite() && shift.is_finite() && scale * rate >= 0.0
            }
            Piece::Step { value, .. } => value.is_finite(),
        };
        if !ok {
            return Err(Error::invalid(format!("piece parameters do not define a nondecreasing map: {self:?}")));
        }
        let mut prev = self.eval(s);
        for i in 1..VALIDATION_SAMPLES {
            let x = s + (e - s) * i as f64 / (VALIDATION_SAMPLES - 1) as f64;
            let v = self.eval(x);
            if !v.is_finite() || v < prev - MONOTONE_SLACK {
                return Err(Error::invalid(format!("piece on [{s}, {e}] decreases near x = {x}")));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Where to read a monotone function: left limit, right limit, or point value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Point,
}

/// Lateral values at one breakpoint of a [`MonotoneFn`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Breakpoint {
    pub x: f64,
    pub left: f64,
    pub right: f64,
}

impl Breakpoint {
    pub fn jump(&self) -> f64 {
        self.right - self.left
    }
}

/// Serialized form of a [`MonotoneFn`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneSpec {
    pub domain: [f64; 2],
    pub pieces: Vec<Piece>,
}

/// A nondecreasing function on `[lo, hi]` with explicit jump and plateau
/// structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MonotoneSpec", into = "MonotoneSpec")]
pub struct MonotoneFn {
    lo: f64,
    hi: f64,
    pieces: Vec<Piece>,
    /// `(x, value)` at the start and end of every piece, in order. Values are
    /// nondecreasing along the list.
    knots: Vec<(f64, f64)>,
}

impl TryFrom<MonotoneSpec> for MonotoneFn {
    type Error = Error;

    fn try_from(spec: MonotoneSpec) -> Result<Self> {
        MonotoneFn::new(spec.domain[0], spec.domain[1], spec.pieces)
    }
}

impl From<MonotoneFn> for MonotoneSpec {
    fn from(f: MonotoneFn) -> Self {
        MonotoneSpec { domain: [f.lo, f.hi], pieces: f.pieces }
    }
}

impl MonotoneFn {
    /// Builds and validates a function from pieces tiling `[lo, hi]`.
    pub fn new(lo: f64, hi: f64, mut pieces: Vec<Piece>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("domain [{lo}, {hi}] must be finite with lo < hi")));
        }
        if pieces.is_empty() {
            return Err(Error::invalid("at least one piece is required"));
        }
        let tol = 1e-12 * (hi - lo).max(1.0);
        let mut cursor = lo;
        for (i, p) in pieces.iter_mut().enumerate() {
            if (p.start() - cursor).abs() > tol {
                return Err(Error::invalid(format!(
                    "piece {i} starts at {} but the previous piece ends at {cursor}",
                    p.start()
                )));
            }
            let end = p.end();
            p.set_bounds(cursor, end);
            p.validate()?;
            cursor = end;
        }
        if (cursor - hi).abs() > tol {
            return Err(Error::invalid(format!("pieces end at {cursor}, domain ends at {hi}")));
        }
        let last = pieces.len() - 1;
        let s = pieces[last].start();
        pieces[last].set_bounds(s, hi);

        let mut knots = Vec::with_capacity(2 * pieces.len());
        for p in &pieces {
            knots.push((p.start(), p.eval(p.start())));
            knots.push((p.end(), p.eval(p.end())));
        }
        for w in knots.windows(2) {
            if w[1].1 < w[0].1 - MONOTONE_SLACK {
                return Err(Error::invalid(format!("function decreases at x = {}", w[1].0)));
            }
        }
        Ok(MonotoneFn { lo, hi, pieces, knots })
    }

    pub fn from_spec(spec: MonotoneSpec) -> Result<Self> {
        spec.try_into()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("monotone function serializes")
    }

    /// `f(x) = x` on `[lo, hi]`.
    pub fn identity(lo: f64, hi: f64) -> Result<Self> {
        Self::affine(lo, hi, lo, 1.0)
    }

    /// `f(x) = value + slope * (x - lo)` on `[lo, hi]`.
    pub fn affine(lo: f64, hi: f64, value: f64, slope: f64) -> Result<Self> {
        Self::new(lo, hi, vec![Piece::Affine { start: lo, end: hi, value, slope }])
    }

    /// `f(x) = x^exponent` on `[lo, hi]`, `lo >= 0`.
    pub fn power(lo: f64, hi: f64, exponent: f64) -> Result<Self> {
        Self::new(
            lo,
            hi,
            vec![Piece::Power { start: lo, end: hi, offset: 0.0, scale: 1.0, shift: 0.0, exponent }],
        )
    }

    /// Two plateaus: `before` on `[lo, at)` and `after` on `[at, hi]`.
    pub fn step(lo: f64, hi: f64, at: f64, before: f64, after: f64) -> Result<Self> {
        Self::new(
            lo,
            hi,
            vec![
                Piece::Step { start: lo, end: at, value: before },
                Piece::Step { start: at, end: hi, value: after },
            ],
        )
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// `[f(lo), f(hi)]`, the interval on which the inverses are defined.
    pub fn range(&self) -> (f64, f64) {
        (self.knots[0].1, self.knots[self.knots.len() - 1].1)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x.is_nan() || x < self.lo || x > self.hi {
            return Err(Error::domain(format!("x = {x} outside [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    /// Index of the piece whose half-open interval `[start, end)` holds `x`
    /// (the last piece also owns `hi`).
    fn piece_index(&self, x: f64) -> usize {
        let idx = self.pieces.partition_point(|p| p.start() <= x);
        idx.saturating_sub(1)
    }

    /// Lateral limit or point value at `x`; errors outside the domain.
    pub fn eval(&self, x: f64, side: Side) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.value(x, side))
    }

    /// Lateral limit or point value at `x`, with `x` clamped into the domain.
    /// Conventions: `f(lo-) = f(lo)` and `f(hi+) = f(hi)`.
    pub fn value(&self, x: f64, side: Side) -> f64 {
        let x = x.clamp(self.lo, self.hi);
        let i = self.piece_index(x);
        match side {
            Side::Left if i > 0 && x == self.pieces[i].start() => self.pieces[i - 1].eval(x),
            _ => self.pieces[i].eval(x),
        }
    }

    /// Point value (right limit at jumps), clamped into the domain.
    pub fn at(&self, x: f64) -> f64 {
        self.value(x, Side::Point)
    }

    /// All piece boundaries, including both domain endpoints.
    pub fn breakpoints(&self) -> Vec<Breakpoint> {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        out.push(Breakpoint { x: self.lo, left: self.knots[0].1, right: self.knots[0].1 });
        for i in 1..self.pieces.len() {
            out.push(Breakpoint {
                x: self.pieces[i].start(),
                left: self.knots[2 * i - 1].1,
                right: self.knots[2 * i].1,
            });
        }
        let last = self.knots[self.knots.len() - 1].1;
        out.push(Breakpoint { x: self.hi, left: last, right: last });
        out
    }

    /// Interior breakpoint abscissae lying strictly inside `(a, b)`.
    pub fn breaks_in(&self, a: f64, b: f64) -> Vec<f64> {
        self.pieces
            .iter()
            .skip(1)
            .map(Piece::start)
            .filter(|&x| x > a && x < b)
            .collect()
    }

    /// Knot values (one-sided values at piece ends) lying strictly inside `(lo, hi)`.
    /// These are the places where the inverses have kinks or jumps.
    pub fn knot_values_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.knots.iter().map(|k| k.1).filter(|&y| y > lo && y < hi).collect();
        v.dedup();
        v
    }

    /// Interior jumps larger than `tol`.
    pub fn jumps(&self, tol: f64) -> Vec<Breakpoint> {
        let bps = self.breakpoints();
        let n = bps.len();
        bps.into_iter().take(n - 1).skip(1).filter(|b| b.jump() > tol).collect()
    }

    /// True when no interior jump exceeds `tol` on `[a, b]` (endpoints included).
    pub fn is_continuous_on(&self, a: f64, b: f64, tol: f64) -> bool {
        self.jumps(tol).iter().all(|j| j.x < a || j.x > b)
    }

    pub fn is_continuous(&self) -> bool {
        self.jumps(0.0).is_empty()
    }

    /// True when no piece is flat, i.e. the function is injective up to jumps.
    pub fn is_strictly_increasing(&self) -> bool {
        self.pieces.iter().all(|p| !p.is_flat())
    }

    /// `inf { x : f(x) > y }`, clamped to the domain.
    pub fn sup_inverse(&self, y: f64) -> f64 {
        // First knot with value > y.
        let j = self.knots.partition_point(|k| k.1 <= y);
        if j == self.knots.len() {
            return self.hi;
        }
        if j == 0 {
            return self.lo;
        }
        let piece = &self.pieces[j / 2];
        if j % 2 == 0 {
            piece.start()
        } else {
            piece.last_at_most(y)
        }
    }

    /// `sup { x : f(x) < y }`, clamped to the domain.
    pub fn inf_inverse(&self, y: f64) -> f64 {
        // Last knot with value < y.
        let n = self.knots.partition_point(|k| k.1 < y);
        if n == 0 {
            return self.lo;
        }
        let j = n - 1;
        let piece = &self.pieces[j / 2];
        if j % 2 == 1 {
            piece.end()
        } else {
            piece.first_at_least(y)
        }
    }

    /// `inf { x : f(x) >= y }`, clamped to the domain.
    pub fn quantile(&self, y: f64) -> f64 {
        let j = self.knots.partition_point(|k| k.1 < y);
        if j == self.knots.len() {
            return self.hi;
        }
        if j == 0 {
            return self.lo;
        }
        let piece = &self.pieces[j / 2];
        if j % 2 == 0 {
            piece.start()
        } else {
            piece.first_at_least(y)
        }
    }

    /// Pseudo-inverse of the requested flavor.
    pub fn pseudo_inverse(&self, flavor: Flavor) -> PseudoInverse {
        PseudoInverse { source: self.clone(), flavor }
    }
}

/// Which generalized inverse to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// `inf { x : f(x) > y }`
    Sup,
    /// `sup { x : f(x) < y }`
    Inf,
    /// `inf { x : f(x) >= y }`, the quantile convention.
    Quantile,
}

/// A generalized inverse of a [`MonotoneFn`], defined on `[f(lo), f(hi)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoInverse {
    source: MonotoneFn,
    flavor: Flavor,
}

impl PseudoInverse {
    pub fn source(&self) -> &MonotoneFn {
        &self.source
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn codomain(&self) -> (f64, f64) {
        self.source.range()
    }

    /// Evaluates the inverse; errors when `y` lies outside `[f(lo), f(hi)]`.
    pub fn eval(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.codomain();
        if y.is_nan() || y < lo || y > hi {
            return Err(Error::domain(format!("y = {y} outside [{lo}, {hi}]")));
        }
        Ok(self.value(y))
    }

    /// Evaluates the inverse with `y` clamped into the codomain.
    pub fn value(&self, y: f64) -> f64 {
        match self.flavor {
            Flavor::Sup => self.source.sup_inverse(y),
            Flavor::Inf => self.source.inf_inverse(y),
            Flavor::Quantile => self.source.quantile(y),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plateau() -> MonotoneFn {
        // x on [0,1], 1 on [1,2], x-1 on [2,3]
        MonotoneFn::new(
            0.0,
            3.0,
            vec![
                Piece::Affine { start: 0.0, end: 1.0, value: 0.0, slope: 1.0 },
                Piece::Step { start: 1.0, end: 2.0, value: 1.0 },
                Piece::Affine { start: 2.0, end: 3.0, value: 1.0, slope: 1.0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = MonotoneFn::identity(0.0, 4.0).unwrap();
        assert_eq!(id.eval(2.0, Side::Point).unwrap(), 2.0);

        let step = MonotoneFn::step(0.0, 2.0, 1.0, 0.0, 2.0).unwrap();
        assert_eq!(step.eval(1.0, Side::Left).unwrap(), 0.0);
        assert_eq!(step.eval(1.0, Side::Right).unwrap(), 2.0);
        assert_eq!(step.eval(1.0, Side::Point).unwrap(), 2.0);
        assert_eq!(step.eval(0.0, Side::Left).unwrap(), 0.0);

        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        assert_eq!(sq.eval(1.5, Side::Point).unwrap(), 2.25);
    }

    #[test]
    fn eval_outside_domain_is_error() {
        let id = MonotoneFn::identity(0.0, 4.0).unwrap();
        assert!(matches!(id.eval(4.5, Side::Point), Err(Error::Domain(_))));
        assert!(matches!(id.eval(f64::NAN, Side::Left), Err(Error::Domain(_))));
    }

    #[test]
    fn pseudo_inverse_examples() {
        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        let g = sq.pseudo_inverse(Flavor::Sup);
        assert_eq!(g.eval(4.0).unwrap(), 2.0);
        assert_eq!(g.eval(2.25).unwrap(), 1.5);

        let step = MonotoneFn::step(0.0, 2.0, 1.0, 0.0, 2.0).unwrap();
        assert_eq!(step.sup_inverse(1.0), 1.0);
        assert_eq!(step.sup_inverse(0.5), 1.0);

        let p = plateau();
        assert_eq!(p.sup_inverse(1.0), 2.0);
        assert_eq!(p.inf_inverse(1.0), 1.0);

        let id = MonotoneFn::identity(0.0, 4.0).unwrap();
        assert_eq!(id.pseudo_inverse(Flavor::Sup).eval(3.0).unwrap(), 3.0);
    }

    #[test]
    fn inverse_outside_codomain_is_error() {
        let sq = MonotoneFn::power(0.0, 3.0, 2.0).unwrap();
        let g = sq.pseudo_inverse(Flavor::Inf);
        assert!(matches!(g.eval(9.5), Err(Error::Domain(_))));
        assert!(matches!(g.eval(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn jumps_of_f_are_plateaus_of_inverse() {
        let step = MonotoneFn::step(0.0, 2.0, 1.0, 0.0, 2.0).unwrap();
        for y in [0.0, 0.3, 1.0, 1.7, 1.999] {
            assert_eq!(step.sup_inverse(y), 1.0);
        }
        assert_eq!(step.sup_inverse(2.0), 2.0);
        assert_eq!(step.inf_inverse(0.0), 0.0);
        assert_eq!(step.inf_inverse(1.5), 1.0);
    }

    #[test]
    fn rejects_decreasing_input() {
        let bad = MonotoneFn::affine(0.0, 1.0, 0.0, -1.0);
        assert!(matches!(bad, Err(Error::Invalid(_))));
        let bad_jump = MonotoneFn::step(0.0, 2.0, 1.0, 2.0, 0.0);
        assert!(matches!(bad_jump, Err(Error::Invalid(_))));
        let gap = MonotoneFn::new(
            0.0,
            2.0,
            vec![
                Piece::Step { start: 0.0, end: 0.5, value: 0.0 },
                Piece::Step { start: 1.0, end: 2.0, value: 0.0 },
            ],
        );
        assert!(matches!(gap, Err(Error::Invalid(_))));
    }

    #[test]
    fn breakpoints_record_lateral_values() {
        let step = MonotoneFn::step(0.0, 2.0, 1.0, 0.0, 2.0).unwrap();
        let bps = step.breakpoints();
        assert_eq!(bps.len(), 3);
        assert_eq!(bps[0], Breakpoint { x: 0.0, left: 0.0, right: 0.0 });
        assert_eq!(bps[1], Breakpoint { x: 1.0, left: 0.0, right: 2.0 });
        assert_eq!(bps[2], Breakpoint { x: 2.0, left: 2.0, right: 2.0 });
        assert!(!step.is_continuous());
        assert!(plateau().is_continuous());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"domain":[0,2],"pieces":[{"kind":"step","start":0,"end":1,"value":0},
            {"kind":"power","start":1,"end":2,"offset":2,"shift":1,"exponent":2},
            {"kind":"erf","start":2,"end":2}]}"#;
        // last piece is degenerate: rejected
        assert!(MonotoneFn::from_json(text).is_err());
        let text = r#"{"domain":[0,3],"pieces":[{"kind":"step","start":0,"end":1,"value":0},
            {"kind":"power","start":1,"end":2,"offset":2,"shift":1,"exponent":2},
            {"kind":"erf","start":2,"end":3,"offset":3,"scale":0.5,"shift":2}]}"#;
        let f = MonotoneFn::from_json(text).unwrap();
        let back = MonotoneFn::from_json(&f.to_json()).unwrap();
        assert_eq!(f, back);
        assert!((f.at(1.5) - 2.25).abs() < 1e-15);
    }

    #[test]
    fn erf_piece_inverts_by_bisection() {
        let f = MonotoneFn::new(
            0.0,
            2.0,
            vec![Piece::Erf { start: 0.0, end: 2.0, offset: 0.0, scale: 1.0, rate: 1.0, shift: 0.0 }],
        )
        .unwrap();
        let x = f.sup_inverse(erf(0.7));
        assert!((x - 0.7).abs() < 1e-14);
    }
}
