//! Small scalar routines shared by several modules.

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Largest `x` in `[lo, hi]` for which `pred(x)` holds, assuming `pred` is
/// true on a prefix of the interval and `pred(lo)` is true.
///
/// Bisection stops once the bracket stops shrinking in floating point or after
/// `max_iter` halvings.
pub fn bisect_last_true(mut lo: f64, mut hi: f64, max_iter: usize, pred: impl Fn(f64) -> bool) -> f64 {
    if pred(hi) {
        return hi;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Smallest `x` in `[lo, hi]` for which `pred(x)` holds, assuming `pred` is
/// false on a prefix of the interval and `pred(hi)` is true.
pub fn bisect_first_true(mut lo: f64, mut hi: f64, max_iter: usize, pred: impl Fn(f64) -> bool) -> f64 {
    if pred(lo) {
        return lo;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `g` on `[lo, hi]`.
/// Returns `(argmax, max)`; the endpoints are included in the comparison.
pub fn golden_max(mut lo: f64, mut hi: f64, width_tol: f64, g: impl Fn(f64) -> f64) -> (f64, f64) {
    let (g_lo, g_hi) = (g(lo), g(hi));
    let mut best = if g_lo >= g_hi { (lo, g_lo) } else { (hi, g_hi) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    let mut iter = 0;
    while hi - lo > width_tol && iter < 200 {
        iter += 1;
        if g1 >= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
    }
    for (x, v) in [(x1, g1), (x2, g2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Evenly spaced grid of `n >= 2` points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e-16, -1.0, 1e-16].into_iter().collect();
        assert!((s.value() - 2e-16).abs() < 1e-30);
    }

    #[test]
    fn bisection_brackets_square_root() {
        let r = bisect_last_true(0.0, 4.0, 200, |x| x * x <= 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        let r = bisect_first_true(0.0, 4.0, 200, |x| x * x >= 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(-3.0, 5.0, 1e-12, |x| -(x - 1.25) * (x - 1.25) + 2.0);
        assert!((x - 1.25).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }
}
