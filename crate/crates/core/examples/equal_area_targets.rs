//! Equal-area partitions and the quantized volume measures built on them.
//!
//!     cargo run --release --example equal_area_targets

use ppw::manifold::{equal_area_partition, quadrature_target, Manifold, Torus};

fn main() -> ppw::Result<()> {
    let manifolds = [
        Manifold::Sphere2,
        Manifold::standard_torus(2)?,
        Manifold::Torus(Torus::hexagonal()),
        Manifold::standard_torus(3)?,
    ];
    for m in &manifolds {
        for count in [64usize, 1000, 4096] {
            let part = equal_area_partition(m, count)?;
            let target = quadrature_target(m, count)?;
            println!(
                "{:<15} M={count:<5} cells {:<5} quantization radius {:.4}",
                m.label(),
                part.len(),
                target.radius
            );
        }
    }
    Ok(())
}
