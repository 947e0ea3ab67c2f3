//! Seeded generators of random instances. The same seed always produces the
//! same stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::monotone::{MonotoneFn, Piece, Side};
use crate::probability::erf;
use crate::quadrature::{Factor, Kernel, GAUSSIAN_ERF_SCALE};
use crate::young::YoungInstance;

/// Shape parameters for random monotone functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonotoneShape {
    pub max_pieces: usize,
    pub jump_prob: f64,
    pub plateau_prob: f64,
    /// Largest jump, as a fraction of the total rise.
    pub max_jump: f64,
    /// Total rise `f(hi) - f(lo)`, drawn from this range.
    pub rise: [f64; 2],
}

impl Default for MonotoneShape {
    fn default() -> Self {
        MonotoneShape { max_pieces: 4, jump_prob: 0.35, plateau_prob: 0.2, max_jump: 0.3, rise: [0.8, 2.0] }
    }
}

impl MonotoneShape {
    pub fn continuous() -> Self {
        MonotoneShape { jump_prob: 0.0, ..Self::default() }
    }
}

/// How the level `c` of a random Young instance is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelMode {
    /// Mixture of the three modes below.
    Mixed,
    /// Uniform on `[f(a), f(hi)]`.
    Uniform,
    /// `c = f(b)`.
    AtValue,
    /// `b` at a jump of `f` (when there is one), `c` inside the jump.
    InJump,
}

/// Kernel families drawn by [`InstanceGen::kernel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Any,
    One,
    Gaussian,
    Power,
}

/// Seeded instance generator.
#[derive(Clone, Debug)]
pub struct InstanceGen {
    rng: ChaCha8Rng,
}

/// Minimum distance of a generic `b` from interior breakpoints of `f`.
const BREAK_CLEARANCE: f64 = 0.05;

impl InstanceGen {
    pub fn new(seed: u64) -> Self {
        InstanceGen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            lo
        } else {
            self.rng.gen_range(lo..hi)
        }
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p.clamp(0.0, 1.0))
    }

    /// Random nondecreasing function on `[lo, hi]` starting at `f_lo`.
    pub fn monotone(&mut self, lo: f64, hi: f64, f_lo: f64, shape: &MonotoneShape) -> Result<MonotoneFn> {
        let n = 1 + self.index(shape.max_pieces.max(1));
        let mut cuts: Vec<f64> = (0..n - 1).map(|_| self.uniform(lo + 0.1, hi - 0.1)).collect();
        cuts.sort_by(f64::total_cmp);
        // Keep pieces at least 0.1 wide.
        cuts.dedup_by(|b, a| *b - *a < 0.1);
        let mut edges = vec![lo];
        edges.extend(cuts.into_iter().filter(|&x| x - lo >= 0.1 && hi - x >= 0.1));
        edges.push(hi);

        // Unit-free rises per piece and jumps, rescaled to the drawn total.
        let m = edges.len() - 1;
        let flat: Vec<bool> = (0..m).map(|_| self.chance(shape.plateau_prob)).collect();
        let mut rises: Vec<f64> = (0..m)
            .map(|i| if flat[i] { 0.0 } else { self.uniform(0.3, 1.0) * (edges[i + 1] - edges[i]) })
            .collect();
        let mut jumps: Vec<f64> =
            (0..m).map(|i| if i > 0 && self.chance(shape.jump_prob) { self.uniform(0.2, 1.0) } else { 0.0 }).collect();
        if rises.iter().all(|&r| r == 0.0) {
            rises[0] = edges[1] - edges[0];
        }
        let total = self.uniform(shape.rise[0], shape.rise[1]);
        let jump_total: f64 = jumps.iter().sum();
        let jump_budget = if jump_total > 0.0 { shape.max_jump * total } else { 0.0 };
        for j in &mut jumps {
            *j *= jump_budget / jump_total.max(1.0);
        }
        let jump_sum: f64 = jumps.iter().sum();
        let rise_sum: f64 = rises.iter().sum();
        for r in &mut rises {
            *r *= (total - jump_sum) / rise_sum;
        }

        let mut pieces = Vec::with_capacity(m);
        let mut level = f_lo;
        for i in 0..m {
            level += jumps[i];
            let (s, e) = (edges[i], edges[i + 1]);
            let piece = if rises[i] == 0.0 {
                Piece::Step { start: s, end: e, value: level }
            } else {
                self.piece(s, e, level, rises[i])
            };
            level = piece.eval(e);
            pieces.push(piece);
        }
        MonotoneFn::new(lo, hi, pieces)
    }

    fn piece(&mut self, s: f64, e: f64, start_value: f64, rise: f64) -> Piece {
        match self.index(4) {
            0 => Piece::Affine { start: s, end: e, value: start_value, slope: rise / (e - s) },
            1 => {
                let exponent = self.uniform(0.5, 3.0);
                Piece::Power { start: s, end: e, offset: start_value, scale: rise / (e - s).powf(exponent), shift: s, exponent }
            }
            2 => {
                let rate = self.uniform(-1.5, 2.0);
                let rate = if rate.abs() < 0.2 { 0.5 } else { rate };
                let span = (rate * e).exp() - (rate * s).exp();
                let scale = rise / span;
                Piece::Exp { start: s, end: e, offset: start_value - scale * (rate * s).exp(), scale, rate }
            }
            _ => {
                let rate = self.uniform(0.5, 3.0);
                let shift = self.uniform(s, e);
                let span = erf(rate * (e - shift)) - erf(rate * (s - shift));
                let scale = rise / span;
                Piece::Erf {
                    start: s,
                    end: e,
                    offset: start_value - scale * erf(rate * (s - shift)),
                    scale,
                    rate,
                    shift,
                }
            }
        }
    }

    /// Random builtin kernel on the box.
    pub fn kernel(&mut self, family: KernelFamily, x_range: (f64, f64), y_range: (f64, f64)) -> Result<Kernel> {
        let family = match family {
            KernelFamily::Any => [KernelFamily::One, KernelFamily::Gaussian, KernelFamily::Power][self.index(3)],
            f => f,
        };
        match family {
            KernelFamily::One => Kernel::from_spec(crate::quadrature::KernelSpec::One {
                bounds: [[x_range.0, x_range.1], [y_range.0, y_range.1]],
                scale: self.uniform(0.5, 2.0),
            }),
            KernelFamily::Gaussian => Kernel::gaussian(x_range, y_range, GAUSSIAN_ERF_SCALE),
            _ => {
                let px = self.uniform(0.0, 1.5);
                let py = self.uniform(0.0, 1.5);
                Kernel::power(x_range, y_range, self.uniform(0.5, 2.0), px, py)
            }
        }
    }

    /// Random one-dimensional factor from the family.
    pub fn factor(&mut self, family: KernelFamily) -> Factor {
        let family = match family {
            KernelFamily::Any => [KernelFamily::One, KernelFamily::Gaussian, KernelFamily::Power][self.index(3)],
            f => f,
        };
        match family {
            KernelFamily::One => Factor::One,
            KernelFamily::Gaussian => Factor::Gaussian,
            _ => Factor::Power { exponent: self.uniform(0.0, 1.5) },
        }
    }

    /// A random weighted Young instance on a domain `[0, L]`, `L in [1.5, 2]`.
    pub fn young_instance(&mut self, shape: &MonotoneShape, family: KernelFamily, mode: LevelMode) -> Result<YoungInstance> {
        let len = self.uniform(1.5, 2.0);
        let f0 = self.uniform(0.0, 0.5);
        let f = self.monotone(0.0, len, f0, shape)?;
        let (ylo, yhi) = f.range();
        let kernel = self.kernel(family, (0.0, len), (ylo, yhi))?;
        let mode = match mode {
            LevelMode::Mixed => match self.index(20) {
                0..=4 => LevelMode::AtValue,
                5..=7 => LevelMode::InJump,
                _ => LevelMode::Uniform,
            },
            m => m,
        };
        let jumps: Vec<f64> = f.jumps(1e-9).iter().map(|j| j.x).collect();
        let breaks = f.breaks_in(0.0, len);
        let a = self.uniform(0.0, len / 3.0);
        let (b, c) = if mode == LevelMode::InJump && jumps.iter().any(|&x| x > a) {
            let cands: Vec<f64> = jumps.into_iter().filter(|&x| x > a).collect();
            let b = cands[self.index(cands.len())];
            let c = self.uniform(f.value(b, Side::Left), f.value(b, Side::Right));
            (b, c)
        } else {
            let mut b = self.uniform(a + 0.2, len);
            for _ in 0..50 {
                if breaks.iter().all(|&x| (x - b).abs() >= BREAK_CLEARANCE) {
                    break;
                }
                b = self.uniform(a + 0.2, len);
            }
            let c = match mode {
                LevelMode::AtValue | LevelMode::InJump => f.at(b),
                _ => self.uniform(f.at(a), yhi),
            };
            (b, c)
        };
        YoungInstance::new(kernel, f, a, b, c)
    }

    /// `x^p` on `[0, 2]` with `p in [1, 4]`, `K = 1`, `c >= f(b)`.
    pub fn convex_instance(&mut self) -> Result<YoungInstance> {
        let p = self.uniform(1.0, 4.0);
        let f = MonotoneFn::power(0.0, 2.0, p)?;
        let a = self.uniform(0.0, 0.5);
        let b = self.uniform(a + 0.1, 1.5);
        let c = self.uniform(f.at(b), f.at(2.0));
        let k = Kernel::one((0.0, 2.0), (0.0, f.at(2.0)))?;
        YoungInstance::new(k, f, a, b, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let shape = MonotoneShape::default();
        let mut g1 = InstanceGen::new(7);
        let mut g2 = InstanceGen::new(7);
        for _ in 0..20 {
            let i1 = g1.young_instance(&shape, KernelFamily::Any, LevelMode::Mixed).unwrap();
            let i2 = g2.young_instance(&shape, KernelFamily::Any, LevelMode::Mixed).unwrap();
            assert_eq!(serde_json::to_string(&i1).unwrap(), serde_json::to_string(&i2).unwrap());
        }
    }

    #[test]
    fn generated_functions_are_valid() {
        let mut g = InstanceGen::new(1);
        let shape = MonotoneShape::default();
        let mut saw_jump = false;
        for _ in 0..200 {
            let f = g.monotone(0.0, 2.0, 0.3, &shape).unwrap();
            assert!((f.at(0.0) - 0.3).abs() < 1e-12);
            let (lo, hi) = f.range();
            assert!(hi - lo >= 0.8 - 1e-9 && hi - lo <= 2.0 + 1e-9);
            saw_jump |= !f.is_continuous();
        }
        assert!(saw_jump);
    }
}
