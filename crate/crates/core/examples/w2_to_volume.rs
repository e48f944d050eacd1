//! W₂ between a harmonic-ensemble sample on the sphere and the normalized
//! area, with the certified bracket from the quantized target.
//!
//!     cargo run --release --example w2_to_volume -- 11

use ppw::kernels::{EnsembleSpec, HarmonicSpec};
use ppw::samplers::{sample, sample_iid};
use ppw::transport::{w1_packing_lower_bound, w2_to_volume, OtOptions};

fn main() -> ppw::Result<()> {
    let degree: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let spec = EnsembleSpec::Harmonic(HarmonicSpec::sphere(degree));
    let n = spec.n();
    let opts = OtOptions::default();
    for (label, ps) in [("harmonic", sample(&spec, 1)?), ("iid", sample_iid(&spec.manifold(), n, 1)?)] {
        let est = w2_to_volume(&ps, 64 * n, &opts)?;
        println!(
            "{label:>8}: N={n} W2 {:.5} in [{:.5}, {:.5}] (M={}, q={:.4}, gap {:.1e})",
            est.value, est.bracket_low, est.bracket_high, est.m, est.q, est.duality_gap
        );
    }
    println!("packing lower bound {:.5}", w1_packing_lower_bound(n, &spec.manifold()));
    Ok(())
}
