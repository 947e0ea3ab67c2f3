//! Inverse error function from the power series, with the Newton fallback
//! near the ends of the interval.

use youngkit::probability::{erf, erf_inv_full, ErfInvSeries, SERIES_Z_MAX};

fn main() -> youngkit::Result<()> {
    let series = ErfInvSeries::standard();
    println!("first coefficients: {:?}", &series.coefficients()[..6]);
    for z in [0.0, 0.1, 0.5, 0.9, 0.99, 0.999_999] {
        let x = erf_inv_full(z, series)?;
        let method = if z <= SERIES_Z_MAX { "series" } else { "newton" };
        let terms = if z <= SERIES_Z_MAX { series.partial_sum(z).1 } else { 0 };
        println!("z = {z:<9} erf^-1 = {x:<22} residual {:.1e}  {method} ({terms} terms)", (erf(x) - z).abs());
    }
    Ok(())
}
