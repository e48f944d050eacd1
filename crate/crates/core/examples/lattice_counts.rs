//! Lattice points in p-norm balls, the annulus counts behind the torus
//! variance identity, and the Gauss circle error.
//!
//!     cargo run --release --example lattice_counts

use ppw::lattice::{annulus_difference_count, count_ball, gauss_circle_check, LatticeNorm};

fn main() -> ppw::Result<()> {
    for p in [1.0, 2.0, f64::INFINITY] {
        let norm = LatticeNorm::p(p)?;
        let counts: Vec<u64> = [3.0, 5.0, 9.0, 15.0]
            .iter()
            .map(|&r| count_ball(&norm, r, 2))
            .collect::<ppw::Result<_>>()?;
        let shells: Vec<u64> = [[1, 0, 0], [1, 1, 0], [3, 2, 0]]
            .iter()
            .map(|k| annulus_difference_count(&norm, k, 15.0, 2))
            .collect::<ppw::Result<_>>()?;
        println!("p={p:<4} |B(L)| for L=3,5,9,15: {counts:?}  annulus at L=15: {shells:?}");
    }
    for r in [10.0, 50.0, 200.0] {
        let g = gauss_circle_check(r)?;
        println!("r={r:<5} F(r)={:<7} E(r)={:+9.3}  bound {:.1}", g.count, g.error, g.bound);
    }
    Ok(())
}
