//! The three generalized inverses of a function with a plateau and a jump.

use youngkit::{Flavor, MonotoneFn, Piece};

fn main() -> youngkit::Result<()> {
    let f = MonotoneFn::new(
        0.0,
        3.0,
        vec![
            Piece::Affine { start: 0.0, end: 1.0, value: 0.0, slope: 1.0 },
            Piece::Step { start: 1.0, end: 2.0, value: 1.0 },
            Piece::Affine { start: 2.0, end: 3.0, value: 1.5, slope: 0.5 },
        ],
    )?;
    for bp in f.breakpoints() {
        println!("break at {}: f(x-) = {}, f(x+) = {}", bp.x, bp.left, bp.right);
    }
    println!("{:>6} {:>8} {:>8} {:>8}", "y", "sup", "inf", "quantile");
    for y in [0.5, 1.0, 1.2, 1.5, 1.75] {
        let [s, i, q] = [Flavor::Sup, Flavor::Inf, Flavor::Quantile].map(|fl| f.pseudo_inverse(fl).value(y));
        println!("{y:>6.2} {s:>8.3} {i:>8.3} {q:>8.3}");
    }
    Ok(())
}
