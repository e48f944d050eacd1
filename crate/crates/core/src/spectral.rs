//! Laplacian spectra, classical orthogonal polynomials, the Szegő
//! quantities of Jacobi polynomials and the Hörmander envelope.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::manifold::{Manifold, Point, Torus};

/// Legendre polynomial P_l(u) by the three-term recurrence; `u` is clamped
/// to [-1, 1].
pub fn legendre_p(l: usize, u: f64) -> f64 {
    let u = u.clamp(-1.0, 1.0);
    if l == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, u);
    for k in 1..l {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * u * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fill `out[l] = P_l(u)` for `l < out.len()`.
pub fn legendre_all(u: f64, out: &mut [f64]) {
    let u = u.clamp(-1.0, 1.0);
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = u;
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * u * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Jacobi polynomial P_L^{(α,β)}(u) by the three-term recurrence.
pub fn jacobi_p(degree: usize, alpha: f64, beta: f64, u: f64) -> Result<f64> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(invalid(format!(
            "Jacobi parameters must exceed -1, got ({alpha}, {beta})"
        )));
    }
    let u = u.clamp(-1.0, 1.0);
    if degree == 0 {
        return Ok(1.0);
    }
    let ab = alpha + beta;
    let mut prev = 1.0;
    let mut cur = (alpha + 1.0) + (ab + 2.0) * (u - 1.0) / 2.0;
    for n in 2..=degree {
        let n = n as f64;
        let c = 2.0 * n + ab;
        let a1 = 2.0 * n * (n + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * u + alpha * alpha - beta * beta);
        let a3 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * c;
        let next = (a2 * cur - a3 * prev) / a1;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// One eigenspace E_ℓ of the Laplacian: distinct eigenvalue and multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenspaceDescriptor {
    pub index: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Dual-lattice frequencies of a torus grouped into shells of equal
/// Laplacian eigenvalue 4π²‖B k‖², in increasing order.
#[derive(Clone, Debug)]
pub struct TorusShells {
    pub eigenvalues: Vec<f64>,
    /// `frequencies[offsets[l]..offsets[l + 1]]` is shell l.
    pub offsets: Vec<usize>,
    pub frequencies: Vec<[i64; 3]>,
}

impl TorusShells {
    /// All shells with eigenvalue ≤ `max_eigenvalue`.
    pub fn up_to(torus: &Torus, max_eigenvalue: f64) -> TorusShells {
        let radius = max_eigenvalue.max(0.0).sqrt() / (2.0 * PI);
        let mut freqs: Vec<([i64; 3], f64)> = Vec::new();
        enumerate_dual_ball(torus, radius, |k, r2| freqs.push((k, 4.0 * PI * PI * r2)));
        freqs.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut eigenvalues = Vec::new();
        let mut offsets = vec![0];
        let mut frequencies = Vec::with_capacity(freqs.len());
        for (k, lam) in freqs {
            let same = eigenvalues
                .last()
                .is_some_and(|&last: &f64| (lam - last).abs() <= 1e-9 * last.max(1.0));
            if !same && !frequencies.is_empty() {
                offsets.push(frequencies.len());
            }
            if !same {
                eigenvalues.push(lam);
            }
            frequencies.push(k);
        }
        offsets.push(frequencies.len());
        if frequencies.is_empty() {
            offsets = vec![0];
        }
        TorusShells {
            eigenvalues,
            offsets,
            frequencies,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn shell(&self, l: usize) -> &[[i64; 3]] {
        &self.frequencies[self.offsets[l]..self.offsets[l + 1]]
    }
}

/// Visit every integer k with ‖B k‖₂ ≤ radius, passing ‖B k‖₂².
pub(crate) fn enumerate_dual_ball(torus: &Torus, radius: f64, mut visit: impl FnMut([i64; 3], f64)) {
    let dim = torus.dim();
    // |k_i| = |⟨B k, basis_i⟩| ≤ ‖B k‖ ‖basis_i‖
    let mut bound = [0i64; 3];
    for i in 0..dim {
        let b = torus.basis()[i];
        let len = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        bound[i] = (radius * len + 1e-9).floor() as i64;
    }
    let r2max = radius * radius * (1.0 + 1e-12) + 1e-12;
    let z = if dim == 3 { bound[2] } else { 0 };
    for a in -bound[0]..=bound[0] {
        for b in -bound[1]..=bound[1] {
            for c in -z..=z {
                let k = [a, b, c];
                let v = torus.dual_vector(&k);
                let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
                if r2 <= r2max {
                    visit(k, r2);
                }
            }
        }
    }
}

/// Precomputed spectrum of a manifold.
#[derive(Clone, Debug)]
pub enum Spectrum {
    Sphere,
    Torus { torus: Torus, shells: TorusShells },
}

impl Spectrum {
    /// Spectrum up to `max_eigenvalue` (tori); the sphere is analytic.
    pub fn new(m: &Manifold, max_eigenvalue: f64) -> Spectrum {
        match m {
            Manifold::Sphere2 => Spectrum::Sphere,
            Manifold::Torus(t) => Spectrum::Torus {
                torus: *t,
                shells: TorusShells::up_to(t, max_eigenvalue),
            },
        }
    }

    /// Number of precomputed eigenspaces (unbounded for the sphere).
    pub fn len(&self) -> usize {
        match self {
            Spectrum::Sphere => usize::MAX,
            Spectrum::Torus { shells, .. } => shells.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn descriptor(&self, l: usize) -> Option<EigenspaceDescriptor> {
        match self {
            Spectrum::Sphere => Some(EigenspaceDescriptor {
                index: l,
                eigenvalue: (l * (l + 1)) as f64,
                multiplicity: 2 * l + 1,
            }),
            Spectrum::Torus { shells, .. } => (l < shells.len()).then(|| EigenspaceDescriptor {
                index: l,
                eigenvalue: shells.eigenvalues[l],
                multiplicity: shells.offsets[l + 1] - shells.offsets[l],
            }),
        }
    }

    /// Reproducing kernel of E_ℓ under the normalized volume.
    pub fn kernel_z(&self, l: usize, x: &Point, y: &Point) -> Result<f64> {
        match self {
            Spectrum::Sphere => Ok((2 * l + 1) as f64 * legendre_p(l, x.dot(y))),
            Spectrum::Torus { shells, torus } => {
                if l >= shells.len() {
                    return Err(invalid(format!(
                        "eigenspace {l} beyond the {} precomputed shells",
                        shells.len()
                    )));
                }
                let dim = torus.dim();
                Ok(shells
                    .shell(l)
                    .iter()
                    .map(|k| {
                        let phase: f64 = (0..dim).map(|i| k[i] as f64 * (x.0[i] - y.0[i])).sum();
                        (2.0 * PI * phase).cos()
                    })
                    .sum())
            }
        }
    }
}

pub fn eigenspace_kernel_z(spectrum: &Spectrum, l: usize, x: &Point, y: &Point) -> Result<f64> {
    spectrum.kernel_z(l, x, y)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SzegoQuantities {
    /// π^{-1/2} (sin θ/2)^{-α-1/2} (cos θ/2)^{-β-1/2}
    pub k: f64,
    /// L (sin θ/2)^{2α+1} (cos θ/2)^{2β+1} P_L^{(α,β)}(cos θ)²
    pub bound_quantity: f64,
}

pub fn szego_quantities(degree: usize, alpha: f64, beta: f64, theta: f64) -> Result<SzegoQuantities> {
    if !(theta > 0.0 && theta < PI) {
        return Err(invalid(format!("angle {theta} outside (0, π)")));
    }
    let s = (theta / 2.0).sin();
    let c = (theta / 2.0).cos();
    let p = jacobi_p(degree, alpha, beta, theta.cos())?;
    Ok(SzegoQuantities {
        k: PI.powf(-0.5) * s.powf(-alpha - 0.5) * c.powf(-beta - 0.5),
        bound_quantity: degree as f64 * s.powf(2.0 * alpha + 1.0) * c.powf(2.0 * beta + 1.0) * p * p,
    })
}

/// Calibrated constant C in K_L(x, y) ≤ C N / (1 + N^{1/d} d(x, y)) for the
/// sphere, measured at L = 10 over a 10⁴-node distance grid.
pub const HORMANDER_C_SPHERE: f64 = 3.2325017444988835;
/// Same constant for the standard flat 2-torus, measured at p = 2, L = 5
/// over a 100 × 100 displacement grid.
pub const HORMANDER_C_TORUS: f64 = 1.1304360806528466;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HormanderConfig {
    pub constant: f64,
}

impl HormanderConfig {
    pub fn for_manifold(m: &Manifold) -> HormanderConfig {
        let constant = match m {
            Manifold::Sphere2 => HORMANDER_C_SPHERE,
            Manifold::Torus(_) => HORMANDER_C_TORUS,
        };
        HormanderConfig { constant }
    }
}

/// C·N / (1 + N^{1/d} r)
pub fn hormander_envelope(n: usize, dim: usize, r: f64, cfg: &HormanderConfig) -> f64 {
    let n = n as f64;
    cfg.constant * n / (1.0 + n.powf(1.0 / dim as f64) * r)
}

/// Measure max |K_L(x,y)| (1 + N^{1/d} d(x,y)) / N for the harmonic ensemble
/// of level `level` (sphere degree or torus 2-norm radius).
pub fn calibrate_hormander(m: &Manifold, level: usize) -> f64 {
    match m {
        Manifold::Sphere2 => {
            let n = ((level + 1) * (level + 1)) as f64;
            let grid = 10_000;
            let mut p = vec![0.0; level + 1];
            (0..grid)
                .map(|i| {
                    let r = PI * i as f64 / (grid - 1) as f64;
                    legendre_all(r.cos(), &mut p);
                    let k: f64 = p.iter().enumerate().map(|(l, v)| (2 * l + 1) as f64 * v).sum();
                    k.abs() * (1.0 + n.sqrt() * r) / n
                })
                .fold(0.0, f64::max)
        }
        Manifold::Torus(t) => {
            let mut freqs = Vec::new();
            enumerate_dual_ball(t, level as f64, |k, _| freqs.push(k));
            let n = freqs.len() as f64;
            let dim = t.dim();
            let side: usize = if dim == 2 { 100 } else { 22 };
            let mut best: f64 = 0.0;
            let total = side.pow(dim as u32);
            for idx in 0..total {
                let mut s = [0.0; 3];
                let mut rest = idx;
                for c in s.iter_mut().take(dim) {
                    *c = (rest % side) as f64 / side as f64;
                    rest /= side;
                }
                let k: f64 = freqs
                    .iter()
                    .map(|f| {
                        let ph: f64 = (0..dim).map(|i| f[i] as f64 * s[i]).sum();
                        (2.0 * PI * ph).cos()
                    })
                    .sum();
                let r = t.sq_distance(&s, &[0.0; 3]).sqrt();
                best = best.max(k.abs() * (1.0 + n.powf(1.0 / dim as f64) * r) / n);
            }
            best
        }
    }
}
