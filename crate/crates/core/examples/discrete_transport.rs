//! The discrete solvers on a small problem with unequal weights: the exact
//! transportation simplex against entropic Sinkhorn with its dual bound.
//!
//!     cargo run --release --example discrete_transport

use ppw::transport::{solve_discrete_ot, CostMatrix, OtOptions, SolverKind};

fn main() -> ppw::Result<()> {
    let xs: [f64; 5] = [0.0, 0.1, 0.35, 0.5, 0.9];
    let ys = [0.05, 0.4, 0.6, 0.95];
    let cost = CostMatrix::from_fn(xs.len(), ys.len(), |i, j| (xs[i] - ys[j]).powi(2))?;
    let a = [0.1, 0.3, 0.2, 0.25, 0.15];
    let b = [0.25, 0.25, 0.25, 0.25];
    for solver in [SolverKind::Exact, SolverKind::Entropic] {
        let opts = OtOptions {
            solver,
            entropic_epsilon: 1e-3,
            ..OtOptions::default()
        };
        let sol = solve_discrete_ot(&cost, &a, &b, &opts)?;
        println!(
            "{:>8}: cost {:.8}  lower bound {:.8}  marginal error {:.1e}",
            solver.label(),
            sol.value,
            sol.lower_bound,
            sol.marginal_error
        );
        for (i, j, m) in &sol.plan {
            println!("          {i} -> {j}  {m:.4}");
        }
    }
    Ok(())
}
