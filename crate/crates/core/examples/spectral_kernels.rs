//! Reproducing kernels and the special functions behind them: Legendre and
//! Jacobi recurrences, the Szegő quantities near the antipode, and the
//! Hörmander envelope.
//!
//!     cargo run --release --example spectral_kernels

use std::f64::consts::PI;

use ppw::kernels::{kernel_eval, EnsembleSpec, HarmonicSpec};
use ppw::manifold::Point;
use ppw::spectral::{hormander_envelope, jacobi_p, legendre_p, szego_quantities, HormanderConfig};

fn main() -> ppw::Result<()> {
    let spec = EnsembleSpec::Harmonic(HarmonicSpec::sphere(6));
    let x = Point::sphere(0.0, 0.0, 1.0);
    let cfg = HormanderConfig::for_manifold(&spec.manifold());
    for deg in [0.0f64, 10.0, 30.0, 60.0, 90.0, 180.0] {
        let t = deg.to_radians();
        let y = Point::sphere(t.sin(), 0.0, t.cos());
        let k = kernel_eval(&spec, &x, &y)?;
        println!(
            "θ={deg:>5.1}°  K={:+9.4}  envelope {:8.4}",
            k.re,
            hormander_envelope(spec.n(), 2, t, &cfg)
        );
    }
    println!("P_5(0.3) = {:.12}", legendre_p(5, 0.3));
    println!("P_5^(1,0)(0.3) = {:.12}", jacobi_p(5, 1.0, 0.0, 0.3)?);
    for l in [10usize, 50, 200] {
        let q = szego_quantities(l, 1.0, 0.0, PI - 1.0 / l as f64)?;
        println!("L={l:<3} bound quantity {:.4}", q.bound_quantity);
    }
    Ok(())
}
