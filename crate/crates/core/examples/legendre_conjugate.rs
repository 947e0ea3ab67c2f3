//! Numerical conjugates of builtin convex functions against their closed
//! forms, and the Fenchel-Young gap.

use youngkit::legendre::{check_fenchel_young, conjugate, ConvexFn, DEFAULT_GRID};

fn main() -> youngkit::Result<()> {
    let fns = [ConvexFn::power_p(3.0, -2.0, 2.0)?, ConvexFn::exp(0.0, -1.0, 1.5)?, ConvexFn::entropy(0.0, 0.1, 3.0)?];
    for f in &fns {
        let dual = f.dual().expect("builtins have closed-form duals");
        let (lo, hi) = dual.domain();
        let num = conjugate(f, (lo, hi), DEFAULT_GRID)?;
        let mut worst = 0.0f64;
        for i in 1..100 {
            let y = lo + (hi - lo) * i as f64 / 100.0;
            worst = worst.max((num.eval(y)? - dual.eval(y)?).abs());
        }
        println!("{f:?}: conjugate on [{lo:.3}, {hi:.3}], max deviation {worst:.2e}");
    }
    let f = ConvexFn::power_p(2.0, -3.0, 3.0)?;
    let fs = f.dual().unwrap();
    for (x, y) in [(1.0, 1.0), (1.0, 2.0), (-0.5, 0.5)] {
        let r = check_fenchel_young(&f, &fs, x, y)?;
        println!("x = {x}, y = {y}: xy = {:.3}, F + F* = {:.3}, equality {}", r.lhs, r.rhs, r.equality);
    }
    Ok(())
}
