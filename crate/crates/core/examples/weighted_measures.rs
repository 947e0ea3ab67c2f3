//! Rectangle, hypograph and epigraph measures, with the generic quadrature
//! path as a cross-check of the closed-form primitives.

use youngkit::quadrature::{epigraph_measure, hypograph_measure, rect_measure};
use youngkit::{Kernel, MonotoneFn, QuadConfig};

fn main() -> youngkit::Result<()> {
    let cfg = QuadConfig::default();
    let f = MonotoneFn::power(0.0, 2.0, 1.5)?;
    let k = Kernel::power((0.0, 2.0), (0.0, 3.0), 1.0, 0.5, 1.0)?;
    let generic = k.as_generic()?;
    for (name, kernel) in [("primitive", &k), ("generic", &generic)] {
        let rect = rect_measure(kernel, 0.2, 1.5, f.at(0.2), 1.4, &cfg)?;
        let hyp = hypograph_measure(kernel, &f, 0.2, 1.5, &cfg)?;
        let epi = epigraph_measure(kernel, &f, 0.2, 1.4, &cfg)?;
        println!(
            "{name:>9}: rect {:.12} (+/- {:.1e}), hyp {:.12}, epi {:.12}, {} subintervals",
            rect.value,
            rect.error_estimate,
            hyp.value,
            epi.value,
            hyp.subdivisions + epi.subdivisions
        );
    }
    Ok(())
}
