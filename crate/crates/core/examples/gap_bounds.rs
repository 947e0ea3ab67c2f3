//! Bounds on the gap for a convex function and for a step.

use youngkit::precision::all_bounds;
use youngkit::{Kernel, MonotoneFn, QuadConfig, YoungInstance};

fn main() -> youngkit::Result<()> {
    let cfg = QuadConfig::default();
    let sq = MonotoneFn::power(0.0, 3.0, 2.0)?;
    let cases = [
        ("x^2, c above f(b)", YoungInstance::new(Kernel::one((0.0, 3.0), (0.0, 9.0))?, sq.clone(), 0.0, 1.0, 2.0)?),
        ("x^2, c below f(b)", YoungInstance::new(Kernel::one((0.0, 3.0), (0.0, 9.0))?, sq, 0.0, 2.0, 2.0)?),
        (
            "step, Gaussian weight",
            YoungInstance::new(
                Kernel::gaussian((0.0, 2.0), (0.0, 1.0), 1.0)?,
                MonotoneFn::step(0.0, 2.0, 1.0, 0.0, 1.0)?,
                0.0,
                1.5,
                0.5,
            )?,
        ),
    ];
    for (name, inst) in &cases {
        println!("{name}");
        for b in all_bounds(inst, &cfg)? {
            println!(
                "  {:<12} value {:>10.6}  bound {:>10.6}  slack {:>10.3e}  ok {}",
                format!("{:?}", b.bound_kind),
                b.value,
                b.bound,
                b.slack,
                b.satisfied
            );
        }
    }
    Ok(())
}
