//! Summed variance of degree-ℓ spherical harmonics over GAF zeros against
//! the closed-form upper bound.
//!
//!     cargo run --release --example gaf_eigenspace

use ppw::kernels::{real_spherical_harmonics, EnsembleSpec, GafIndexing};
use ppw::manifold::Point;
use ppw::statistics::{gaf_variance_bound, summed_variance_mc};

fn main() -> ppw::Result<()> {
    for n in [16usize, 32, 64] {
        let spec = EnsembleSpec::GafZeros {
            n,
            indexing: GafIndexing::FromZero,
        };
        for l in [1usize, 2, 3] {
            let features = move |x: &Point, out: &mut [f64]| {
                let mut all = vec![0.0; (l + 1) * (l + 1)];
                real_spherical_harmonics(l, x, &mut all);
                out.copy_from_slice(&all[l * l..]);
            };
            let mc = summed_variance_mc(&spec, &features, 2 * l + 1, 500, 5)?;
            println!(
                "N={n:<3} l={l}  variance {:.4} ± {:.4}  bound {:.4}",
                mc.variance,
                mc.stderr,
                gaf_variance_bound(l, n)?
            );
        }
    }
    Ok(())
}
