//! Draws one configuration from every ensemble and prints its size,
//! minimal separation and sampler diagnostics.
//!
//!     cargo run --release --example sample_ensembles

use ppw::config::{build_spec, EnsembleKind, ManifoldChoice};
use ppw::kernels::GafIndexing;
use ppw::samplers::sample;

fn main() -> ppw::Result<()> {
    let runs = [
        (EnsembleKind::Harmonic, ManifoldChoice::Sphere, 64),
        (EnsembleKind::Spherical, ManifoldChoice::Sphere, 64),
        (EnsembleKind::Gaf, ManifoldChoice::Sphere, 64),
        (EnsembleKind::Iid, ManifoldChoice::Sphere, 64),
        (EnsembleKind::Harmonic, ManifoldChoice::Torus2, 81),
        (EnsembleKind::Harmonic, ManifoldChoice::Hexagonal, 85),
        (EnsembleKind::Jittered, ManifoldChoice::Torus3, 64),
    ];
    for (kind, m, n) in runs {
        let spec = build_spec(kind, &m.manifold(), n, 2.0, GafIndexing::FromZero)?;
        let ps = sample(&spec, 42)?;
        println!(
            "{:>9} on {:<10} N={:<4} min separation {:.4}  proposals {:>6}  retries {}",
            ps.label(),
            m.key(),
            ps.len(),
            ps.min_separation(),
            ps.meta.proposals,
            ps.meta.retries
        );
    }
    Ok(())
}
