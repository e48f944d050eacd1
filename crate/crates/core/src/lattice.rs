//! Exact lattice-point counting in norm balls.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::manifold::Torus;

/// Enumeration budget: the number of box points visited by one count.
pub const ENUMERATION_BUDGET: u64 = 50_000_000;

/// A norm on integer vectors of Z^d, d ∈ {2, 3}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LatticeNorm {
    /// ‖k‖_p with p ∈ [1, ∞]; `f64::INFINITY` is the max norm.
    P(f64),
    /// ‖k‖ = ‖Σ k_i b_i‖₂ for linearly independent vectors b_i.
    DualBasis { vectors: [[f64; 3]; 3], dim: usize },
}

impl LatticeNorm {
    pub fn p(p: f64) -> Result<LatticeNorm> {
        if !(p >= 1.0) {
            return Err(invalid(format!("p-norm needs p ≥ 1, got {p}")));
        }
        Ok(LatticeNorm::P(p))
    }

    /// ‖(a, b)‖ = ‖a v + b w‖₂.
    pub fn dual_basis(v: [f64; 2], w: [f64; 2]) -> Result<LatticeNorm> {
        let det = v[0] * w[1] - v[1] * w[0];
        let scale = (v[0].hypot(v[1]) * w[0].hypot(w[1])).max(f64::MIN_POSITIVE);
        if !(det.abs() > 1e-12 * scale) {
            return Err(invalid("dual basis vectors are linearly dependent"));
        }
        Ok(LatticeNorm::DualBasis {
            vectors: [[v[0], v[1], 0.0], [w[0], w[1], 0.0], [0.0; 3]],
            dim: 2,
        })
    }

    /// The frequency norm of the harmonic ensemble on `torus`: the p-norm on
    /// orthonormal tori, the Euclidean norm of the dual vector otherwise.
    pub fn for_torus(torus: &Torus, p: f64) -> Result<LatticeNorm> {
        let orthonormal = torus.is_orthogonal()
            && (0..torus.dim()).all(|i| {
                let d = torus.dual()[i];
                ((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) - 1.0).abs() < 1e-12
            });
        if orthonormal {
            return LatticeNorm::p(p);
        }
        if p != 2.0 {
            return Err(invalid("general-lattice tori use the Euclidean dual norm (p = 2)"));
        }
        Ok(LatticeNorm::DualBasis {
            vectors: *torus.dual(),
            dim: torus.dim(),
        })
    }

    pub fn eval(&self, k: &[i64; 3]) -> f64 {
        match *self {
            LatticeNorm::P(p) => {
                let a = k.map(|c| (c as f64).abs());
                if p == f64::INFINITY {
                    a[0].max(a[1]).max(a[2])
                } else if p == 1.0 {
                    a[0] + a[1] + a[2]
                } else if p == 2.0 {
                    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
                } else {
                    (a[0].powf(p) + a[1].powf(p) + a[2].powf(p)).powf(1.0 / p)
                }
            }
            LatticeNorm::DualBasis { vectors, dim } => {
                let mut x = [0.0; 3];
                for i in 0..dim {
                    for c in 0..3 {
                        x[c] += k[i] as f64 * vectors[i][c];
                    }
                }
                (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
            }
        }
    }

    /// Smallest a with |k_i| ≤ a ‖k‖ for every coordinate i.
    fn coordinate_bound(&self) -> f64 {
        match *self {
            LatticeNorm::P(_) => 1.0,
            LatticeNorm::DualBasis { vectors, dim } => {
                // k_i = ⟨Σ k_j b_j, b*_i⟩ with b* the biorthogonal family
                let inv = biorthogonal(&vectors, dim);
                inv.iter()
                    .take(dim)
                    .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
                    .fold(0.0, f64::max)
            }
        }
    }
}

fn biorthogonal(v: &[[f64; 3]; 3], dim: usize) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    if dim == 2 {
        let det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
        out[0] = [v[1][1] / det, -v[1][0] / det, 0.0];
        out[1] = [-v[0][1] / det, v[0][0] / det, 0.0];
    } else {
        let cross = |a: &[f64; 3], b: &[f64; 3]| {
            [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        };
        let c0 = cross(&v[1], &v[2]);
        let det = v[0][0] * c0[0] + v[0][1] * c0[1] + v[0][2] * c0[2];
        let c1 = cross(&v[2], &v[0]);
        let c2 = cross(&v[0], &v[1]);
        for c in 0..3 {
            out[0][c] = c0[c] / det;
            out[1][c] = c1[c] / det;
            out[2][c] = c2[c] / det;
        }
    }
    out
}

const NORM_SLACK: f64 = 1e-9;

/// All integer vectors k with ‖k - center‖ ≤ radius, in lexicographic order.
pub fn ball_points(norm: &LatticeNorm, radius: f64, dim: usize) -> Result<Vec<[i64; 3]>> {
    let mut out = Vec::new();
    visit_ball(norm, radius, dim, &[0; 3], |k| out.push(k))?;
    Ok(out)
}

fn visit_ball(
    norm: &LatticeNorm,
    radius: f64,
    dim: usize,
    center: &[i64; 3],
    mut visit: impl FnMut([i64; 3]),
) -> Result<()> {
    if !(2..=3).contains(&dim) {
        return Err(invalid(format!("enumeration supports d ∈ {{2, 3}}, got {dim}")));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(invalid(format!("radius must be finite and ≥ 0, got {radius}")));
    }
    if let LatticeNorm::DualBasis { dim: nd, .. } = norm {
        if *nd != dim {
            return Err(invalid("norm dimension does not match d"));
        }
    }
    let half = (norm.coordinate_bound() * radius * (1.0 + NORM_SLACK)).floor() as i64;
    let side = 2 * half as u64 + 1;
    if side.saturating_pow(dim as u32) > ENUMERATION_BUDGET {
        return Err(invalid(format!(
            "radius {radius} exceeds the enumeration budget of {ENUMERATION_BUDGET} points"
        )));
    }
    let limit = radius * (1.0 + NORM_SLACK) + NORM_SLACK;
    let zr = if dim == 3 { half } else { 0 };
    for a in -half..=half {
        for b in -half..=half {
            for c in -zr..=zr {
                let d = [a, b, c];
                if norm.eval(&d) <= limit {
                    visit([center[0] + a, center[1] + b, center[2] + c]);
                }
            }
        }
    }
    Ok(())
}

/// #{k ∈ Z^d : ‖k‖ ≤ L}.
pub fn count_ball(norm: &LatticeNorm, radius: f64, dim: usize) -> Result<u64> {
    let mut n = 0u64;
    visit_ball(norm, radius, dim, &[0; 3], |_| n += 1)?;
    Ok(n)
}

/// #{lattice points in B̄(0, L) \ B̄(k, L)}; equals E|Σ e^{2πi⟨k, x_n⟩}|² for
/// the harmonic ensemble with frequency ball B̄(0, L).
pub fn annulus_difference_count(norm: &LatticeNorm, k: &[i64; 3], radius: f64, dim: usize) -> Result<u64> {
    if k.iter().take(dim).all(|&c| c == 0) {
        return Err(invalid("shift k must be nonzero"));
    }
    let limit = radius * (1.0 + NORM_SLACK) + NORM_SLACK;
    let mut n = 0u64;
    visit_ball(norm, radius, dim, &[0; 3], |j| {
        let diff = [j[0] - k[0], j[1] - k[1], j[2] - k[2]];
        if norm.eval(&diff) > limit {
            n += 1;
        }
    })?;
    Ok(n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussCircle {
    /// F(r) = #{k ∈ Z² : |k| ≤ r}
    pub count: u64,
    /// E(r) = F(r) − πr²
    pub error: f64,
    /// 2√2 π r
    pub bound: f64,
}

impl GaussCircle {
    /// |E(r)| ≤ 2√2 π r; meaningful for r ≥ 1 (fails at the origin).
    pub fn holds(&self) -> bool {
        self.error.abs() <= self.bound
    }
}

pub fn gauss_circle_check(r: f64) -> Result<GaussCircle> {
    let count = count_ball(&LatticeNorm::P(2.0), r, 2)?;
    Ok(GaussCircle {
        count,
        error: count as f64 - PI * r * r,
        bound: 2.0 * 2f64.sqrt() * PI * r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(p: f64, radius: f64) -> u64 {
        let r = radius.ceil() as i64 + 1;
        let mut n = 0;
        for a in -r..=r {
            for b in -r..=r {
                let (x, y) = ((a as f64).abs(), (b as f64).abs());
                let v = if p == f64::INFINITY {
                    x.max(y)
                } else {
                    (x.powf(p) + y.powf(p)).powf(1.0 / p)
                };
                if v <= radius + 1e-9 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn small_balls() {
        assert_eq!(count_ball(&LatticeNorm::P(f64::INFINITY), 1.0, 2).unwrap(), 9);
        assert_eq!(count_ball(&LatticeNorm::P(2.0), 2.0, 2).unwrap(), 13);
        assert_eq!(count_ball(&LatticeNorm::P(1.0), 2.0, 2).unwrap(), 13);
        assert_eq!(count_ball(&LatticeNorm::P(2.0), 1.0, 3).unwrap(), 7);
        for &p in &[1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            for r in [0.0, 0.5, 1.0, 2.5, 7.0, 12.3] {
                assert_eq!(count_ball(&LatticeNorm::P(p), r, 2).unwrap(), brute(p, r));
            }
        }
    }

    #[test]
    fn annulus_counts() {
        let n2 = LatticeNorm::P(2.0);
        assert_eq!(annulus_difference_count(&n2, &[1, 0, 0], 2.0, 2).unwrap(), 5);
        assert_eq!(
            annulus_difference_count(&n2, &[5, 0, 0], 2.0, 2).unwrap(),
            count_ball(&n2, 2.0, 2).unwrap()
        );
        for k in [[1, 2, 0], [3, -1, 0], [0, 4, 0]] {
            let neg = [-k[0], -k[1], 0];
            assert_eq!(
                annulus_difference_count(&n2, &k, 6.0, 2).unwrap(),
                annulus_difference_count(&n2, &neg, 6.0, 2).unwrap()
            );
        }
        assert!(annulus_difference_count(&n2, &[0, 0, 0], 2.0, 2).is_err());
    }

    #[test]
    fn dual_basis_norm_is_a_norm() {
        let n = LatticeNorm::dual_basis([1.0, 0.0], [0.5, 0.8]).unwrap();
        let ks = [[1, 2, 0], [-3, 1, 0], [0, -2, 0], [4, 4, 0], [-1, -5, 0]];
        for a in &ks {
            assert!((n.eval(&[3 * a[0], 3 * a[1], 0]) - 3.0 * n.eval(a)).abs() < 1e-12);
            for b in &ks {
                let s = [a[0] + b[0], a[1] + b[1], 0];
                assert!(n.eval(&s) <= n.eval(a) + n.eval(b) + 1e-12);
            }
        }
        assert!(LatticeNorm::dual_basis([1.0, 2.0], [2.0, 4.0]).is_err());
        // identity dual basis reproduces the Euclidean count
        let id = LatticeNorm::dual_basis([1.0, 0.0], [0.0, 1.0]).unwrap();
        assert_eq!(count_ball(&id, 9.5, 2).unwrap(), count_ball(&LatticeNorm::P(2.0), 9.5, 2).unwrap());
    }

    #[test]
    fn gauss_circle() {
        let g = gauss_circle_check(1.0).unwrap();
        assert_eq!(g.count, 5);
        assert!((g.error - (5.0 - PI)).abs() < 1e-12);
        assert!((g.bound - 8.885_765_876_316_732).abs() < 1e-9);
        assert!(g.holds());
        let g0 = gauss_circle_check(0.0).unwrap();
        assert_eq!((g0.count, g0.error, g0.bound), (1, 1.0, 0.0));
        assert!(!g0.holds());
        assert!(gauss_circle_check(100.0).unwrap().holds());
    }

    #[test]
    fn budget_guard() {
        assert!(count_ball(&LatticeNorm::P(2.0), 1e6, 2).is_err());
        assert!(count_ball(&LatticeNorm::P(2.0), 3.0, 4).is_err());
        assert!(LatticeNorm::p(0.5).is_err());
    }
}
