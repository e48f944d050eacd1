//! Variance of Σ Y(x_n) for the harmonic ensemble: the double-integral
//! formula against Monte Carlo.
//!
//!     cargo run --release --example linear_statistics

use ppw::kernels::{EnsembleSpec, HarmonicSpec};
use ppw::manifold::Point;
use ppw::statistics::{variance_exact, variance_mc};

fn main() -> ppw::Result<()> {
    let y20 = |x: &Point| 5f64.sqrt() * (3.0 * x.0[2] * x.0[2] - 1.0) / 2.0;
    for degree in [2, 4, 8] {
        let spec = EnsembleSpec::Harmonic(HarmonicSpec::sphere(degree));
        let exact = variance_exact(&spec, &y20, 2000)?;
        let mc = variance_mc(&spec, &y20, 1000, 9)?;
        println!(
            "L={degree} N={:<3} exact {:.4} (refinement {:.1e})  mc {:.4} ± {:.4}",
            spec.n(),
            exact.value,
            exact.refinement_delta,
            mc.variance,
            mc.stderr
        );
    }
    Ok(())
}
