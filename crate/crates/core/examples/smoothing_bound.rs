//! Optimized smoothing upper bound next to the transport estimate for
//! harmonic ensembles on the sphere and on the flat torus.
//!
//!     cargo run --release --example smoothing_bound

use ppw::kernels::{EnsembleSpec, HarmonicSpec};
use ppw::manifold::Manifold;
use ppw::samplers::sample;
use ppw::statistics::{optimize_smoothing_time, SmoothingBoundConfig};
use ppw::transport::{w2_to_volume, OtOptions};

fn main() -> ppw::Result<()> {
    let t2 = Manifold::standard_torus(2)?;
    let specs = [
        EnsembleSpec::Harmonic(HarmonicSpec::sphere(5)),
        EnsembleSpec::Harmonic(HarmonicSpec::sphere(11)),
        EnsembleSpec::Harmonic(HarmonicSpec::torus(&t2, 5.0, 2.0)?),
        EnsembleSpec::Harmonic(HarmonicSpec::torus(&t2, 9.0, 2.0)?),
    ];
    for spec in &specs {
        let ps = sample(spec, 3)?;
        let opt = optimize_smoothing_time(&ps, &SmoothingBoundConfig::default())?;
        let est = w2_to_volume(&ps, 64 * ps.len(), &OtOptions::default())?;
        println!(
            "{:<8} N={:<4} bound {:.4} at t*={:.2e} (l_max {})  W2 {:.4}",
            ps.manifold.label(),
            ps.len(),
            opt.bound,
            opt.t,
            opt.l_max,
            est.value
        );
    }
    Ok(())
}
