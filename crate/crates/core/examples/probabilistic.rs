//! Joint probability bound for a pair of truncated Gaussians.

use std::f64::consts::PI;

use youngkit::probability::{check_probabilistic_young, erf, DistributionPair};
use youngkit::{Kernel, MonotoneFn, Piece, QuadConfig};

fn main() -> youngkit::Result<()> {
    let e3 = erf(3.0);
    let mass = 0.5 * PI.sqrt() * e3;
    let rho = Kernel::gaussian((0.0, 3.0), (0.0, 3.0), 1.0 / (mass * mass))?;
    let cdf = MonotoneFn::new(
        0.0,
        3.0,
        vec![Piece::Erf { start: 0.0, end: 3.0, offset: 0.0, scale: 1.0 / e3, rate: 1.0, shift: 0.0 }],
    )?;
    let on_graph = (0.8, cdf.at(0.8));
    let dp = DistributionPair::new(rho, cdf)?;
    let cfg = QuadConfig::default();
    for (b, c) in [(0.5, 0.5), (1.0, 0.8), (2.0, 0.3), on_graph] {
        let r = check_probabilistic_young(&dp, b, c, &cfg)?;
        println!("P(Y <= {b}, Z <= {c:.4}) = {:.6} <= {:.6}  equality {}", r.lhs, r.rhs, r.equality);
    }
    Ok(())
}
