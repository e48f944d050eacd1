//! Spectral statistics of point configurations: eigenspace sums, the
//! smoothing-inequality bound for W₂, variances of linear statistics and
//! log-log rate fits.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::kernels::{kernel_eval, EnsembleSpec};
use crate::manifold::{quadrature_target, Manifold, Point, Torus};
use crate::rng::derive_seed;
use crate::samplers::{sample, PointSet};
use crate::spectral::{Spectrum, TorusShells};

/// S_ℓ = Σ_{n,n′} Z_ℓ(x_n, x_{n′}) = Σ_{φ ∈ E_ℓ} |Σ_n φ(x_n)|².
pub fn eigenspace_statistic(ps: &PointSet, spectrum: &Spectrum, l: usize) -> Result<f64> {
    let pts = &ps.points;
    let mut s = 0.0;
    for (a, x) in pts.iter().enumerate() {
        s += spectrum.kernel_z(l, x, x)?;
        for y in &pts[a + 1..] {
            s += 2.0 * spectrum.kernel_z(l, x, y)?;
        }
    }
    Ok(s.max(0.0))
}

/// Eigenvalues, multiplicities and S_ℓ for every eigenspace up to a cutoff,
/// computed in one pass.
#[derive(Clone, Debug)]
pub struct SpectralSums {
    manifold: Manifold,
    n: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub sums: Vec<f64>,
}

impl SpectralSums {
    /// All eigenspaces with eigenvalue ≤ `max_eigenvalue` (index 0 is the
    /// constants).
    pub fn compute(ps: &PointSet, max_eigenvalue: f64) -> Result<SpectralSums> {
        if ps.is_empty() {
            return Err(invalid("empty point set"));
        }
        match &ps.manifold {
            Manifold::Sphere2 => Ok(sphere_sums(ps, max_eigenvalue)),
            Manifold::Torus(t) => Ok(torus_sums(ps, t, max_eigenvalue)),
        }
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// Largest index whose eigenvalue is available.
    pub fn max_index(&self) -> usize {
        self.sums.len() - 1
    }

    /// Smallest index ℓ ≥ 1 with λ_ℓ·t ≥ 40, capped at the precomputed range.
    pub fn default_l_max(&self, t: f64) -> usize {
        let cap = self.max_index().max(1);
        (1..=cap).find(|&l| self.eigenvalues[l] * t >= 40.0).unwrap_or(cap)
    }

    /// Smoothing bound using S_ℓ for ℓ ≤ `l_max` and the Weyl tail beyond.
    pub fn bound(&self, cfg: &SmoothingBoundConfig) -> Result<f64> {
        cfg.validate()?;
        let t = cfg.t;
        let l_max = cfg.l_max.unwrap_or_else(|| self.default_l_max(t));
        if l_max > self.max_index() {
            return Err(invalid(format!(
                "ℓ_max = {l_max} beyond the {} precomputed eigenspaces",
                self.max_index()
            )));
        }
        let n2 = (self.n * self.n) as f64;
        let mut series = 0.0;
        for l in 1..=l_max {
            let lam = self.eigenvalues[l];
            series += (-lam * t).exp() / lam * self.sums[l];
        }
        let tail = weyl_tail(&self.manifold, self.eigenvalues[l_max], l_max, t);
        let d = self.manifold.dim() as f64;
        let smooth = (d * t + cfg.k_m * t.powf(1.5)).max(0.0).sqrt();
        Ok(smooth + 2.0 * (series / n2 + tail).max(0.0).sqrt())
    }
}

fn sphere_sums(ps: &PointSet, max_eigenvalue: f64) -> SpectralSums {
    // ℓ(ℓ + 1) ≤ Λ, at least ℓ = 1
    let mut lmax = 1usize;
    while ((lmax + 1) * (lmax + 2)) as f64 <= max_eigenvalue {
        lmax += 1;
    }
    let a: Vec<f64> = (0..=lmax).map(|l| (2 * l + 1) as f64 / (l + 1) as f64).collect();
    let b: Vec<f64> = (0..=lmax).map(|l| l as f64 / (l + 1) as f64).collect();
    let pts = &ps.points;
    let n = pts.len();
    // Σ_{n<n′} P_ℓ(x_n·x_{n′})
    let acc = (0..n)
        .into_par_iter()
        .fold(
            || vec![0.0; lmax + 1],
            |mut acc, i| {
                for y in &pts[i + 1..] {
                    let u = pts[i].dot(y).clamp(-1.0, 1.0);
                    let (mut p0, mut p1) = (1.0, u);
                    acc[0] += 1.0;
                    acc[1] += u;
                    for l in 1..lmax {
                        let p2 = a[l] * u * p1 - b[l] * p0;
                        acc[l + 1] += p2;
                        p0 = p1;
                        p1 = p2;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0.0; lmax + 1],
            |mut x, y| {
                x.iter_mut().zip(&y).for_each(|(a, b)| *a += b);
                x
            },
        );
    let sums = (0..=lmax)
        .map(|l| ((2 * l + 1) as f64 * (n as f64 + 2.0 * acc[l])).max(0.0))
        .collect();
    SpectralSums {
        manifold: Manifold::Sphere2,
        n,
        eigenvalues: (0..=lmax).map(|l| (l * (l + 1)) as f64).collect(),
        multiplicities: (0..=lmax).map(|l| 2 * l + 1).collect(),
        sums,
    }
}

fn torus_sums(ps: &PointSet, torus: &Torus, max_eigenvalue: f64) -> SpectralSums {
    let mut shells = TorusShells::up_to(torus, max_eigenvalue);
    if shells.len() < 2 {
        // always include the first nonzero shell
        let first = (1..=3)
            .map(|i| {
                let mut k = [0i64; 3];
                k[i - 1] = 1;
                let v = torus.dual_vector(&k);
                4.0 * PI * PI * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            })
            .take(torus.dim())
            .fold(f64::INFINITY, f64::min);
        shells = TorusShells::up_to(torus, first * (1.0 + 1e-9));
    }
    let dim = torus.dim();
    let kmax = shells
        .frequencies
        .iter()
        .flat_map(|k| k.iter().map(|c| c.unsigned_abs() as usize))
        .max()
        .unwrap_or(0);
    let width = 2 * kmax + 1;
    let pts = &ps.points;
    let n = pts.len();
    // e^{2πi j s_a} for j ∈ [−kmax, kmax], per point and axis
    let mut table = vec![Complex64::new(0.0, 0.0); n * dim * width];
    for (p, x) in pts.iter().enumerate() {
        for a in 0..dim {
            let base = (p * dim + a) * width;
            let w = Complex64::from_polar(1.0, 2.0 * PI * x.0[a]);
            let mut cur = Complex64::new(1.0, 0.0);
            table[base + kmax] = cur;
            for j in 1..=kmax {
                // recompute every 16 steps to stop drift
                cur = if j % 16 == 0 {
                    Complex64::from_polar(1.0, 2.0 * PI * j as f64 * x.0[a])
                } else {
                    cur * w
                };
                table[base + kmax + j] = cur;
                table[base + kmax - j] = cur.conj();
            }
        }
    }
    let sums: Vec<f64> = (0..shells.len())
        .into_par_iter()
        .map(|l| {
            let mut s = 0.0;
            for k in shells.shell(l) {
                let mut z = Complex64::new(0.0, 0.0);
                for p in 0..n {
                    let mut e = table[p * dim * width + (k[0] + kmax as i64) as usize];
                    for a in 1..dim {
                        e *= table[(p * dim + a) * width + (k[a] + kmax as i64) as usize];
                    }
                    z += e;
                }
                s += z.norm_sqr();
            }
            s
        })
        .collect();
    SpectralSums {
        manifold: Manifold::Torus(*torus),
        n,
        eigenvalues: shells.eigenvalues.clone(),
        multiplicities: (0..shells.len()).map(|l| shells.offsets[l + 1] - shells.offsets[l]).collect(),
        sums,
    }
}

/// Exponential integral E₁(x) for x > 0.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x < 1.0 {
        // −γ − ln x + Σ (−1)^{k+1} x^k/(k·k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -0.577_215_664_901_532_9 - x.ln() + sum
    } else {
        // continued fraction (modified Lentz)
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Over-bound of Σ_{ℓ > ℓ_max} e^{−λ_ℓ t} m_ℓ/λ_ℓ.
///
/// Sphere: m_ℓ/λ_ℓ ≤ 2/ℓ and λ_ℓ ≥ ℓ², then an integral comparison gives
/// E₁(ℓ_max² t). Tori: the lattice count N(r) ≤ ω_d (r + ρ)^d / covol* with ρ
/// the half-diagonal of a dual fundamental cell, integrated by parts.
fn weyl_tail(m: &Manifold, lambda_max: f64, l_max: usize, t: f64) -> f64 {
    let slack = 1.0 + 1e-12;
    match m {
        Manifold::Sphere2 => {
            let l = l_max as f64;
            slack * exp_integral_e1(l * l * t)
        }
        Manifold::Torus(torus) => {
            let dim = torus.dim();
            let r = lambda_max.sqrt() / (2.0 * PI);
            let a = 4.0 * PI * PI * t;
            let dual_covol = 1.0 / torus.covolume();
            let rho = dual_half_diagonal(torus);
            let g = (-a * r * r).exp() / (4.0 * PI * PI * r * r);
            let grow = 1.0 + rho / r;
            match dim {
                2 => {
                    let count = PI * (r + rho).powi(2) / dual_covol;
                    slack * (g * count + grow * exp_integral_e1(a * r * r) / (4.0 * PI * dual_covol))
                }
                _ => {
                    let count = 4.0 / 3.0 * PI * (r + rho).powi(3) / dual_covol;
                    let integral = PI.sqrt() / (2.0 * a.sqrt()) * libm::erfc(a.sqrt() * r);
                    slack * (g * count + grow * grow * integral / (PI * dual_covol))
                }
            }
        }
    }
}

/// max ‖½ Σ ±b*_i‖ over sign patterns of the dual basis.
fn dual_half_diagonal(torus: &Torus) -> f64 {
    let dim = torus.dim();
    let mut best: f64 = 0.0;
    for signs in 0..(1u32 << dim) {
        let mut k = [0i64; 3];
        for (i, ki) in k.iter_mut().enumerate().take(dim) {
            *ki = if signs & (1 << i) != 0 { 1 } else { -1 };
        }
        let v = torus.dual_vector(&k);
        best = best.max(0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TailMode {
    #[default]
    WeylBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingBoundConfig {
    /// Curvature constant in √(d t + K t^{3/2}); 0 on the sphere and flat tori.
    pub k_m: f64,
    pub t: f64,
    /// Truncation index; `None` picks the smallest ℓ with λ_ℓ t ≥ 40.
    pub l_max: Option<usize>,
    pub tail_mode: TailMode,
}

impl Default for SmoothingBoundConfig {
    fn default() -> Self {
        SmoothingBoundConfig {
            k_m: 0.0,
            t: 1e-2,
            l_max: None,
            tail_mode: TailMode::WeylBound,
        }
    }
}

impl SmoothingBoundConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(invalid(format!("smoothing time must be positive, got {}", self.t)));
        }
        if self.l_max == Some(0) {
            return Err(invalid("ℓ_max must be at least 1"));
        }
        if !self.k_m.is_finite() {
            return Err(invalid("K_M must be finite"));
        }
        Ok(())
    }
}

/// Upper bound for W₂((1/N)Σδ_{x_n}, Vol) from the smoothing inequality.
pub fn smoothing_bound(ps: &PointSet, cfg: &SmoothingBoundConfig) -> Result<f64> {
    cfg.validate()?;
    let lambda = match cfg.l_max {
        Some(l) => match &ps.manifold {
            Manifold::Sphere2 => (l * (l + 1)) as f64,
            Manifold::Torus(t) => {
                let mut cut = 40.0 / cfg.t;
                loop {
                    let shells = TorusShells::up_to(t, cut);
                    if shells.len() > l {
                        break shells.eigenvalues[l];
                    }
                    cut *= 2.0;
                }
            }
        },
        None => 40.0 / cfg.t,
    };
    SpectralSums::compute(ps, lambda * (1.0 + 1e-9))?.bound(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingOptimum {
    pub t: f64,
    pub bound: f64,
    pub l_max: usize,
}

/// Eigenvalue λ_N: the first eigenvalue whose cumulative multiplicity
/// reaches N.
fn weyl_eigenvalue(m: &Manifold, n: usize) -> f64 {
    match m {
        Manifold::Sphere2 => {
            let l = ((n as f64).sqrt().ceil() as usize).saturating_sub(1).max(1);
            (l * (l + 1)) as f64
        }
        Manifold::Torus(t) => {
            let mut cut = 4.0 * PI * PI;
            loop {
                let shells = TorusShells::up_to(t, cut);
                if shells.frequencies.len() >= n.max(2) {
                    let mut total = 0;
                    for l in 0..shells.len() {
                        total += shells.offsets[l + 1] - shells.offsets[l];
                        if total >= n.max(2) {
                            return shells.eigenvalues[l];
                        }
                    }
                }
                cut *= 2.0;
            }
        }
    }
}

/// Minimizes the bound over t ∈ [N^{−2}, 1]: a 20-point log grid locates the
/// basin, golden-section search refines it.
pub fn optimize_smoothing_time(ps: &PointSet, template: &SmoothingBoundConfig) -> Result<SmoothingOptimum> {
    let n = ps.len().max(1);
    let factor = if ps.manifold.dim() == 2 { 160.0 } else { 16.0 };
    let sums = SpectralSums::compute(ps, factor * weyl_eigenvalue(&ps.manifold, n))?;
    optimize_with_sums(&sums, template)
}

pub fn optimize_with_sums(sums: &SpectralSums, template: &SmoothingBoundConfig) -> Result<SmoothingOptimum> {
    let n = sums.n.max(1) as f64;
    let eval = |log_t: f64| -> Result<(f64, usize)> {
        let t = log_t.exp();
        let l_max = template.l_max.map_or_else(|| sums.default_l_max(t), |l| l.min(sums.max_index()));
        let cfg = SmoothingBoundConfig {
            t,
            l_max: Some(l_max),
            ..template.clone()
        };
        Ok((sums.bound(&cfg)?, l_max))
    };
    let (lo, hi) = (-2.0 * n.ln(), 0.0);
    let lo = if lo == hi { -1.0 } else { lo };
    let grid: Vec<f64> = (0..20).map(|i| lo + (hi - lo) * i as f64 / 19.0).collect();
    let mut values = Vec::with_capacity(20);
    for &g in &grid {
        values.push(eval(g)?.0);
    }
    let best = (0..20).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(19)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (eval(c)?.0, eval(d)?.0);
    for _ in 0..60 {
        if (b - a).abs() < 1e-6 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c)?.0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d)?.0;
        }
    }
    let mid = if fc < fd { c } else { d };
    let (fm, lm) = eval(mid)?;
    let (log_t, bound, l_max) = if fm <= values[best] {
        (mid, fm, lm)
    } else {
        (grid[best], values[best], eval(grid[best])?.1)
    };
    Ok(SmoothingOptimum {
        t: log_t.exp(),
        bound,
        l_max,
    })
}

/// Test function on the manifold.
pub type TestFunction<'a> = &'a (dyn Fn(&Point) -> f64 + Sync);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceQuadrature {
    pub value: f64,
    /// |value(M) − value(M/4)|.
    pub refinement_delta: f64,
    pub grid: usize,
}

/// Var Σ f(x_n) = ½ ∬ |f(x) − f(y)|² |K(x, y)|² dx dy by double quadrature
/// over an M-node equal-area grid (M ≤ 4000).
pub fn variance_exact(spec: &EnsembleSpec, f: TestFunction, grid: usize) -> Result<VarianceQuadrature> {
    if !(4..=4000).contains(&grid) {
        return Err(invalid(format!("quadrature grid must have 4..=4000 nodes, got {grid}")));
    }
    if !matches!(
        spec,
        EnsembleSpec::Harmonic(_) | EnsembleSpec::Jittered(_) | EnsembleSpec::Spherical { .. }
    ) {
        return Err(Error::Unsupported(format!(
            "exact variance needs a determinantal kernel; {} has none",
            spec.label()
        )));
    }
    let fine = double_quadrature(spec, f, grid)?;
    let coarse = double_quadrature(spec, f, (grid / 4).max(1))?;
    Ok(VarianceQuadrature {
        value: fine,
        refinement_delta: (fine - coarse).abs(),
        grid,
    })
}

fn double_quadrature(spec: &EnsembleSpec, f: TestFunction, grid: usize) -> Result<f64> {
    let target = quadrature_target(&spec.manifold(), grid)?;
    let nodes = &target.nodes;
    let vals: Vec<f64> = nodes.iter().map(f).collect();
    let w = 1.0 / grid as f64;
    let rows: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut s = 0.0;
            for j in i + 1..grid {
                let df = vals[i] - vals[j];
                if df != 0.0 {
                    s += df * df * kernel_eval(spec, &nodes[i], &nodes[j])?.norm_sqr();
                }
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    // ½ Σ_{i≠j} = Σ_{i<j}
    Ok(rows.iter().sum::<f64>() * w * w)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McVariance {
    pub mean: f64,
    pub variance: f64,
    /// Jackknife standard error of `variance`.
    pub stderr: f64,
    /// Standard error of `mean`.
    pub mean_stderr: f64,
    pub replicas: usize,
}

/// Monte Carlo mean and variance of Σ f(x_n) over independent replicas.
pub fn variance_mc(spec: &EnsembleSpec, f: TestFunction, replicas: usize, seed: u64) -> Result<McVariance> {
    let g = |x: &Point, out: &mut [f64]| out[0] = f(x);
    summed_variance_mc(spec, &g, 1, replicas, seed)
}

/// Feature map writing `dim` real values per point.
pub type FeatureMap<'a> = &'a (dyn Fn(&Point, &mut [f64]) + Sync);

/// Σ_m Var(Σ_n φ_m(x_n)) for a vector of test functions; `mean` is the
/// squared norm of the mean vector.
pub fn summed_variance_mc(
    spec: &EnsembleSpec,
    features: FeatureMap,
    dim: usize,
    replicas: usize,
    seed: u64,
) -> Result<McVariance> {
    if replicas < 100 {
        return Err(invalid(format!("at least 100 replicas are needed, got {replicas}")));
    }
    if dim == 0 {
        return Err(invalid("feature map has no components"));
    }
    let stats: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let ps = sample(spec, derive_seed(seed, &[r as u64]))?;
            let mut total = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            for x in &ps.points {
                features(x, &mut buf);
                total.iter_mut().zip(&buf).for_each(|(t, b)| *t += b);
            }
            Ok(total)
        })
        .collect::<Result<_>>()?;
    Ok(jackknife_summed_variance(&stats))
}

/// Sample variance summed over components, with leave-one-out jackknife.
pub fn jackknife_summed_variance(stats: &[Vec<f64>]) -> McVariance {
    let n = stats.len();
    let dim = stats.first().map_or(0, |s| s.len());
    let nf = n as f64;
    let mut s1 = vec![0.0; dim];
    let mut s2 = vec![0.0; dim];
    for row in stats {
        for m in 0..dim {
            s1[m] += row[m];
            s2[m] += row[m] * row[m];
        }
    }
    let var_of = |a: f64, b: f64, k: f64| (b - a * a / k) / (k - 1.0);
    let variance: f64 = (0..dim).map(|m| var_of(s1[m], s2[m], nf)).sum();
    let means: Vec<f64> = s1.iter().map(|s| s / nf).collect();
    let mean = if dim == 1 {
        means[0]
    } else {
        means.iter().map(|x| x * x).sum()
    };
    let mean_stderr = if dim == 1 { (var_of(s1[0], s2[0], nf) / nf).sqrt() } else { f64::NAN };
    let loo: Vec<f64> = stats
        .iter()
        .map(|row| {
            (0..dim)
                .map(|m| var_of(s1[m] - row[m], s2[m] - row[m] * row[m], nf - 1.0))
                .sum::<f64>()
        })
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / nf;
    let spread: f64 = loo.iter().map(|v| (v - loo_mean).powi(2)).sum();
    McVariance {
        mean,
        variance,
        stderr: ((nf - 1.0) / nf * spread).sqrt(),
        mean_stderr,
        replicas: n,
    }
}

/// (2ℓ + 1)(ℓ(ℓ + 1))² π² / (6N): bound on Σ_m Var(Σ_n Y_ℓ^m(x_n)) for the
/// zeros of the degree-N spherical GAF.
pub fn gaf_variance_bound(l: usize, n: usize) -> Result<f64> {
    if l == 0 {
        return Err(invalid("ℓ = 0 has λ = 0; the statistic is deterministic"));
    }
    if n == 0 {
        return Err(invalid("degree must be positive"));
    }
    let lam = (l * (l + 1)) as f64;
    Ok((2 * l + 1) as f64 * lam * lam * PI * PI / (6.0 * n as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateModel {
    PurePower,
    PowerWithSqrtLog,
}

impl RateModel {
    pub fn label(&self) -> &'static str {
        match self {
            RateModel::PurePower => "pure_power",
            RateModel::PowerWithSqrtLog => "power_with_sqrt_log",
        }
    }
}

impl std::str::FromStr for RateModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<RateModel> {
        match s {
            "pure_power" => Ok(RateModel::PurePower),
            "power_with_sqrt_log" => Ok(RateModel::PowerWithSqrtLog),
            _ => Err(invalid(format!("unknown rate model {s:?}"))),
        }
    }
}

/// One point of a rate fit: N, mean W₂ and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub n: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub model: RateModel,
    pub residual_sse: f64,
    /// OLS standard error of the slope (NaN with 2 dof or fewer).
    pub slope_stderr: f64,
    /// Standard errors of the log-transformed points (δ-method).
    pub point_stderr: Vec<f64>,
}

/// OLS on log-transformed data: log W = γ log N + c, or
/// log(W/√log N) = γ log N + c.
pub fn fit_rate(points: &[RatePoint], model: RateModel) -> Result<RateFit> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.n).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(invalid(format!("rate fit needs ≥ 4 distinct N, got {}", distinct.len())));
    }
    if points.iter().any(|p| !(p.mean > 0.0) || !p.mean.is_finite()) {
        return Err(invalid("rate fit needs positive finite means"));
    }
    if model == RateModel::PowerWithSqrtLog && points.iter().any(|p| !(p.n > 1.0)) {
        return Err(invalid("the log-corrected model needs N > 1"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n.ln()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|p| match model {
            RateModel::PurePower => p.mean.ln(),
            RateModel::PowerWithSqrtLog => (p.mean / p.n.ln().sqrt()).ln(),
        })
        .collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let slope_stderr = if xs.len() > 2 { (sse / (k - 2.0) / sxx).sqrt() } else { f64::NAN };
    Ok(RateFit {
        slope,
        intercept,
        model,
        residual_sse: sse,
        slope_stderr,
        point_stderr: points.iter().map(|p| p.stderr / p.mean).collect(),
    })
}
