//! A c-convex pair for the fractional-part cost and its Young inequality.

use youngkit::cconvex::{check_cconv_young, young_pair, CostFn};
use youngkit::{MonotoneFn, QuadConfig};

fn main() -> youngkit::Result<()> {
    let cfg = QuadConfig::default();
    let cost = CostFn::fractional_part(1.0, 1.0, None)?;
    let f = MonotoneFn::power(0.0, 1.0, 2.0)?;
    let pair = young_pair(&cost, &f, &cfg)?;
    for x in [0.25, 0.5, 1.0] {
        println!("F({x}) = {:.6}, G({x}) = {:.6}", pair.f(x)?, pair.g(x)?);
    }
    for (x, y) in [(0.5, 0.25), (0.5, 0.6), (1.0, 0.3)] {
        let r = check_cconv_young(&cost, &f, x, y, &cfg)?;
        println!("c({x}, {y}) = {:.6} <= {:.6}  (+/- {:.1e})  equality {}", r.lhs, r.rhs, r.rhs_error, r.equality);
    }
    Ok(())
}
