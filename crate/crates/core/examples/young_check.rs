//! Weighted Young inequality for a function with a jump, under a Gaussian
//! weight, at several levels.

use youngkit::quadrature::GAUSSIAN_ERF_SCALE;
use youngkit::{check_young, Kernel, MonotoneFn, QuadConfig, YoungInstance};

fn main() -> youngkit::Result<()> {
    let f = MonotoneFn::step(0.0, 2.0, 1.0, 0.4, 1.2)?;
    let k = Kernel::gaussian((0.0, 2.0), (0.0, 1.2), GAUSSIAN_ERF_SCALE)?;
    let cfg = QuadConfig::default();
    println!("{:>6} {:>12} {:>12} {:>12}  equality", "c", "lhs", "rhs", "gap");
    for c in [0.4, 0.6, 0.8, 1.0, 1.2] {
        let inst = YoungInstance::new(k.clone(), f.clone(), 0.0, 1.0, c)?;
        let r = check_young(&inst, &cfg)?;
        println!("{c:>6.2} {:>12.9} {:>12.9} {:>12.3e}  {}", r.lhs, r.rhs, r.gap, r.equality);
    }
    let inst = YoungInstance::new(k, f, 0.0, 1.5, 0.8)?;
    let r = check_young(&inst, &cfg)?;
    println!("b = 1.5 is off the jump: gap {:.6}", r.gap);
    Ok(())
}
