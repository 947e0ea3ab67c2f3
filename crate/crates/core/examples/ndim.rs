//! The n-fold analogue on the unit cube and a non-symmetric box.

use youngkit::young::{check_young_ndim, NdKernel};
use youngkit::{MonotoneFn, QuadConfig};

fn main() -> youngkit::Result<()> {
    let cfg = QuadConfig::default();
    let id = MonotoneFn::identity(0.0, 2.0)?;
    let sq = MonotoneFn::power(0.0, 2.0, 2.0)?;
    let cases = [
        (vec![id.clone(), id.clone(), id.clone()], vec![1.0, 1.0, 2.0]),
        (vec![id.clone(), sq.clone(), id], vec![1.5, 1.0, 0.5]),
        (vec![sq.clone(), sq.clone(), sq.clone(), sq], vec![1.0, 1.2, 1.4, 1.6]),
    ];
    for (phis, b) in cases {
        let n = phis.len();
        let r = check_young_ndim(&NdKernel::one(n), &phis, &vec![0.0; n], &b, &cfg)?;
        println!("n = {n}, b = {b:?}: box {:.6} <= {:.6}  gap {:.2e}", r.lhs, r.rhs, r.gap);
    }
    Ok(())
}
