//! Seeded randomized sweep over weighted instances, summarized by gap.

use youngkit::random::{InstanceGen, KernelFamily, LevelMode, MonotoneShape};
use youngkit::{check_young, QuadConfig};

fn main() -> youngkit::Result<()> {
    let cfg = QuadConfig::default();
    let mut gen = InstanceGen::new(2024);
    let shape = MonotoneShape::default();
    let (mut equal, mut strict, mut min_strict, mut worst_equal) = (0, 0, f64::INFINITY, 0.0f64);
    for _ in 0..200 {
        let inst = gen.young_instance(&shape, KernelFamily::Any, LevelMode::Mixed)?;
        let r = check_young(&inst, &cfg)?;
        assert!(r.holds(), "violation: {r:?}");
        if r.equality {
            equal += 1;
            worst_equal = worst_equal.max(r.gap.abs());
        } else {
            strict += 1;
            min_strict = min_strict.min(r.gap);
        }
    }
    println!("{equal} equality instances, largest |gap| {worst_equal:.1e}");
    println!("{strict} strict instances, smallest gap {min_strict:.3e}");
    Ok(())
}
