//! Exact samplers for every ensemble.

use faer::Mat;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::kernels::{stereographic_lift, EnsembleSpec, GafIndexing, JitteredSpec, RealBasis};
use crate::manifold::{uniform_sample, Manifold, Point};
use crate::rng::stream;

/// Largest GAF degree: √C(N, n) stays finite in double precision.
pub const MAX_GAF_DEGREE: usize = 1000;
/// Relative residual above which a polished GAF root is flagged.
pub const ROOT_RESIDUAL_WARNING: f64 = 1e-6;
const SPHERICAL_RETRIES: u32 = 3;
/// Slack on the exact envelope K_i(x, x) ≤ N before declaring a violation.
const ENVELOPE_SLACK: f64 = 1e-9;

/// Diagnostics collected while sampling.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleMeta {
    /// Uniform proposals drawn by the rejection steps.
    pub proposals: u64,
    /// Fresh matrix pairs drawn after a linear-algebra failure.
    pub retries: u32,
    /// Largest relative root residual (GAF only).
    pub max_residual: f64,
    pub warnings: Vec<String>,
}

/// A configuration of points together with how it was produced.
#[derive(Clone, Debug)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub manifold: Manifold,
    /// `None` for user-supplied configurations.
    pub spec: Option<EnsembleSpec>,
    pub seed: u64,
    pub meta: SampleMeta,
}

impl PointSet {
    /// Wraps externally produced points after validating them.
    pub fn from_points(manifold: Manifold, points: Vec<Point>) -> Result<PointSet> {
        if points.is_empty() {
            return Err(invalid("a point set needs at least one point"));
        }
        for p in &points {
            manifold.validate(p)?;
        }
        Ok(PointSet {
            points,
            manifold,
            spec: None,
            seed: 0,
            meta: SampleMeta::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &'static str {
        self.spec.as_ref().map_or("custom", |s| s.label())
    }

    /// Smallest pairwise geodesic distance (∞ for a single point).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                best = best.min(self.manifold.distance(&self.points[i], &self.points[j]));
            }
        }
        best
    }
}

/// Draws one configuration of `spec` from the stream seeded by `seed`.
pub fn sample(spec: &EnsembleSpec, seed: u64) -> Result<PointSet> {
    let mut rng = stream(seed);
    let mut meta = SampleMeta::default();
    let points = match spec {
        EnsembleSpec::Harmonic(h) => hkpv(h, &mut rng, &mut meta)?,
        EnsembleSpec::Jittered(j) => jittered(j, &mut rng),
        EnsembleSpec::Spherical { n } => spherical_ensemble(*n, &mut rng, &mut meta)?,
        EnsembleSpec::GafZeros { n, indexing } => gaf_zeros(*n, *indexing, &mut rng, &mut meta)?,
        EnsembleSpec::Iid { manifold, n } => iid(manifold, *n, &mut rng)?,
    };
    Ok(PointSet {
        points,
        manifold: spec.manifold(),
        spec: Some(spec.clone()),
        seed,
        meta,
    })
}

/// Projection DPPs: the sequential sampler for harmonic ensembles, one
/// uniform point per cell for jittered sampling.
pub fn sample_projection_dpp(spec: &EnsembleSpec, seed: u64) -> Result<PointSet> {
    if !spec.is_projection() {
        return Err(Error::Unsupported(format!(
            "{} is not a projection ensemble",
            spec.label()
        )));
    }
    sample(spec, seed)
}

pub fn sample_spherical_ensemble(n: usize, seed: u64) -> Result<PointSet> {
    sample(&EnsembleSpec::Spherical { n }, seed)
}

pub fn sample_gaf_zeros(n: usize, indexing: GafIndexing, seed: u64) -> Result<PointSet> {
    sample(&EnsembleSpec::GafZeros { n, indexing }, seed)
}

pub fn sample_iid(m: &Manifold, n: usize, seed: u64) -> Result<PointSet> {
    sample(&EnsembleSpec::Iid { manifold: *m, n }, seed)
}

/// Sequential sampler for the projection DPP of a real orthonormal basis.
///
/// Keeps an orthonormal frame V of the part of the span not yet used. With
/// r columns left, the next point has density ‖Vᵀφ(x)‖²/r, which is at most
/// ‖φ(x)‖²/r = N/r, so uniform proposals accepted with probability
/// ‖Vᵀφ(x)‖²/N are exact. The frame then loses the direction Vᵀφ(x) through
/// one Householder reflection.
pub fn hkpv<B: RealBasis + ?Sized, R: Rng + ?Sized>(
    basis: &B,
    rng: &mut R,
    meta: &mut SampleMeta,
) -> Result<Vec<Point>> {
    let n = basis.rank();
    if n == 0 {
        return Err(invalid("empty basis"));
    }
    let m = *basis.manifold();
    let nf = n as f64;
    // column-major n×r frame
    let mut frame = vec![0.0; n * n];
    for i in 0..n {
        frame[i * n + i] = 1.0;
    }
    let mut phi = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut points = Vec::with_capacity(n);
    for step in 0..n {
        let r = n - step;
        let x = loop {
            meta.proposals += 1;
            let x = uniform_sample(&m, rng);
            basis.eval_real(&x, &mut phi);
            let mut density = 0.0;
            for j in 0..r {
                let col = &frame[j * n..(j + 1) * n];
                let d: f64 = col.iter().zip(&phi).map(|(a, b)| a * b).sum();
                w[j] = d;
                density += d * d;
            }
            if density > nf * (1.0 + ENVELOPE_SLACK) {
                return Err(Error::EnvelopeViolation {
                    step,
                    density,
                    envelope: nf,
                });
            }
            if rng.random::<f64>() * nf <= density {
                break x;
            }
        };
        points.push(x);
        if r == 1 {
            break;
        }
        // Householder u = w + sign(w_r)‖w‖e_r maps w onto the last axis.
        let norm = w[..r].iter().map(|v| v * v).sum::<f64>().sqrt();
        let last = r - 1;
        w[last] += if w[last] >= 0.0 { norm } else { -norm };
        let uu: f64 = w[..r].iter().map(|v| v * v).sum();
        if uu > 0.0 {
            y.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..r {
                let col = &frame[j * n..(j + 1) * n];
                for (acc, c) in y.iter_mut().zip(col) {
                    *acc += w[j] * c;
                }
            }
            for j in 0..last {
                let f = 2.0 * w[j] / uu;
                let col = &mut frame[j * n..(j + 1) * n];
                for (c, v) in col.iter_mut().zip(&y) {
                    *c -= f * v;
                }
            }
        }
    }
    Ok(points)
}

fn jittered<R: Rng + ?Sized>(spec: &JitteredSpec, rng: &mut R) -> Vec<Point> {
    (0..spec.n())
        .map(|i| spec.partition().sample_in_cell(i, rng))
        .collect()
}

fn iid<R: Rng + ?Sized>(m: &Manifold, n: usize, rng: &mut R) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    Ok((0..n).map(|_| uniform_sample(m, rng)).collect())
}

/// Standard complex Gaussian: E|z|² = 1.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Eigenvalues of the pencil B v = λ A v as (α, β) pairs, λ = α/β.
fn pencil_eigenvalues(a: &Mat<Complex64>, b: &Mat<Complex64>) -> Result<Vec<(Complex64, Complex64)>> {
    if a.nrows() == 1 {
        // faer under-allocates scratch for 1×1 pencils
        return Ok(vec![(b[(0, 0)], a[(0, 0)])]);
    }
    // the eigenvector-free low-level path leaves most of S unset for n ≳ 64
    // in faer 0.24, so go through the full decomposition
    let g = b
        .generalized_eigen(a)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let (alpha, beta) = (g.S_a(), g.S_b());
    Ok((0..a.nrows())
        .map(|i| (alpha.column_vector()[i], beta.column_vector()[i]))
        .collect())
}

/// Lift of the generalized eigenvalue α/β, with β = 0 sent to the pole.
fn lift_ratio(alpha: Complex64, beta: Complex64) -> Option<Point> {
    if !(alpha.is_finite() && beta.is_finite()) || (alpha.norm() == 0.0 && beta.norm() == 0.0) {
        return None;
    }
    if beta.norm() == 0.0 {
        return Some(Point([0.0, 0.0, 1.0]));
    }
    // lift via the ratio or its inverse, whichever is bounded
    if alpha.norm() <= beta.norm() {
        Some(stereographic_lift(alpha / beta))
    } else {
        let w = beta / alpha;
        let p = stereographic_lift(w.conj());
        // 1/z̄ ↦ reflection through the equator
        Some(Point([p.0[0], p.0[1], -p.0[2]]))
    }
}

fn spherical_ensemble<R: Rng + ?Sized>(n: usize, rng: &mut R, meta: &mut SampleMeta) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let mut last_err = None;
    for attempt in 0..=SPHERICAL_RETRIES {
        let a = Mat::<Complex64>::from_fn(n, n, |_, _| complex_gaussian(rng));
        let b = Mat::<Complex64>::from_fn(n, n, |_, _| complex_gaussian(rng));
        match pencil_eigenvalues(&a, &b) {
            Ok(pairs) => {
                let pts: Option<Vec<Point>> = pairs.iter().map(|&(al, be)| lift_ratio(al, be)).collect();
                if let Some(pts) = pts {
                    meta.retries = attempt;
                    return Ok(pts);
                }
                last_err = Some(Error::LinearAlgebra("singular pencil".into()));
            }
            Err(e) => last_err = Some(e),
        }
    }
    meta.retries = SPHERICAL_RETRIES;
    Err(last_err.unwrap_or_else(|| Error::LinearAlgebra("pencil eigenvalues failed".into())))
}

/// √C(N, n) for n = 0..=N via log-gamma-free products.
fn sqrt_binomials(n: usize) -> Vec<f64> {
    let mut out = vec![1.0; n + 1];
    let mut log = 0.0f64;
    for k in 1..=n {
        log += ((n + 1 - k) as f64).ln() - (k as f64).ln();
        out[k] = (0.5 * log).exp();
    }
    out
}

fn gaf_zeros<R: Rng + ?Sized>(
    n: usize,
    indexing: GafIndexing,
    rng: &mut R,
    meta: &mut SampleMeta,
) -> Result<Vec<Point>> {
    if n == 0 || n > MAX_GAF_DEGREE {
        return Err(invalid(format!("GAF degree must be in 1..={MAX_GAF_DEGREE}, got {n}")));
    }
    let scale = sqrt_binomials(n);
    let coeffs: Vec<Complex64> = (0..=n)
        .map(|k| {
            let a = complex_gaussian(rng);
            if k == 0 && indexing == GafIndexing::FromOne {
                Complex64::new(0.0, 0.0)
            } else {
                a * scale[k]
            }
        })
        .collect();
    let roots = polynomial_roots(&coeffs)?;
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut points = Vec::with_capacity(n);
    for z in &roots {
        let res = chart_residual(&coeffs, *z) / norm;
        meta.max_residual = meta.max_residual.max(res);
        if res > ROOT_RESIDUAL_WARNING {
            meta.warnings.push(format!("root {z} has relative residual {res:.3e}"));
        }
        points.push(stereographic_lift(*z));
    }
    if points.len() != n {
        return Err(Error::RootCount {
            expected: n,
            found: points.len(),
        });
    }
    Ok(points)
}

/// |f(z)| for |z| ≤ 1, |z^{-N} f(z)| otherwise.
fn chart_residual(c: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = eval_chart(c, z);
    p.norm()
}

/// Value and log-derivative f'/f in the chart adapted to |z|: the plain
/// polynomial inside the unit disk, the reversed one outside. The value
/// returned outside is z^{-N} f(z).
fn eval_chart(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let n = c.len() - 1;
    if z.norm_sqr() <= 1.0 {
        let mut p = c[n];
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        (p, dp / p)
    } else {
        let w = z.inv();
        // q(w) = Σ c_k w^{N−k}
        let mut q = c[0];
        let mut dq = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            dq = dq * w + q;
            q = q * w + c[k];
        }
        // f = z^N q(1/z) ⇒ f'/f = N/z − q'(w) w² / q(w)
        (q, n as f64 * w - dq * w * w / q)
    }
}

/// All roots of Σ c_k z^k (ascending coefficients, c_N ≠ 0).
///
/// Initial estimates come from the eigenvalues of the balanced companion
/// matrix for N ≤ 256 and from a spiral on the Riemann sphere above that;
/// both are refined by Aberth iteration evaluated in the chart adapted to
/// each root, so roots near ∞ lose no accuracy.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut top = coeffs.len();
    while top > 0 && coeffs[top - 1].norm() == 0.0 {
        top -= 1;
    }
    if top < 2 {
        return Err(invalid("polynomial must have degree ≥ 1"));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(invalid("non-finite polynomial coefficient"));
    }
    if top != coeffs.len() {
        return Err(invalid("leading coefficient is zero"));
    }
    let zeros_at_origin = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let c = &coeffs[zeros_at_origin..];
    let degree = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if degree == 0 {
        return Ok(roots);
    }
    if degree == 1 {
        roots.push(-c[0] / c[1]);
        return Ok(roots);
    }
    let mut z = if degree <= 256 {
        companion_eigenvalues(c)?
    } else {
        spiral_start(c)
    };
    aberth(c, &mut z);
    roots.extend(z);
    if roots.iter().any(|r| !r.is_finite()) {
        return Err(Error::RootCount {
            expected: coeffs.len() - 1,
            found: roots.iter().filter(|r| r.is_finite()).count(),
        });
    }
    Ok(roots)
}

fn companion_eigenvalues(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = Mat::<Complex64>::zeros(n, n);
    for i in 0..n {
        m[(0, i)] = -c[n - 1 - i] / lead;
        if i + 1 < n {
            m[(i + 1, i)] = Complex64::new(1.0, 0.0);
        }
    }
    balance(&mut m);
    m.eigenvalues()
        .map_err(|e| Error::LinearAlgebra(format!("companion eigenvalues: {e:?}")))
}

/// Diagonal similarity scaling by powers of two until row and column norms
/// are comparable.
fn balance(m: &mut Mat<Complex64>) {
    let n = m.nrows();
    for _ in 0..100 {
        let mut converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].l1_norm();
                    row += m[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = col + row;
            let (mut cc, mut rr) = (col, row);
            while cc < rr / 2.0 {
                cc *= 2.0;
                rr /= 2.0;
                f *= 2.0;
            }
            while cc >= rr * 2.0 {
                cc /= 2.0;
                rr *= 2.0;
                f /= 2.0;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

fn spiral_start(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let radius = (c[0].norm() / c[n].norm()).powf(1.0 / n as f64);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let h = -1.0 + (2 * k + 1) as f64 / n as f64;
            let rho = ((1.0 + h) / (1.0 - h)).sqrt();
            Complex64::from_polar(radius * rho, golden * k as f64)
        })
        .collect()
}

fn aberth(c: &[Complex64], z: &mut [Complex64]) {
    let n = z.len();
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (p, ratio) = eval_chart(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    repulsion += (z[k] - z[j]).inv();
                }
            }
            let step = (ratio - repulsion).inv();
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            // chordal size of the move
            worst = worst.max(step.norm() / (1.0 + z[k].norm_sqr()));
        }
        if worst < 1e-15 {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{HarmonicSpec, JitteredSpec};
    use crate::manifold::equal_area_partition;
    use crate::spectral::legendre_all;

    const CHI2_31_999: f64 = 61.098;

    fn chi_square(points: &[Point], m: &Manifold, cells: usize) -> f64 {
        let part = equal_area_partition(m, cells).unwrap();
        let mut counts = vec![0usize; cells];
        for p in points {
            counts[part.locate(p)] += 1;
        }
        let expect = points.len() as f64 / cells as f64;
        counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum()
    }

    fn sphere_mean(points: impl Iterator<Item = Point>) -> ([f64; 3], usize) {
        let mut s = [0.0; 3];
        let mut n = 0;
        for p in points {
            for c in 0..3 {
                s[c] += p.0[c];
            }
            n += 1;
        }
        (s.map(|v| v / n as f64), n)
    }

    #[test]
    fn harmonic_level_zero_is_one_uniform_point() {
        let spec = EnsembleSpec::Harmonic(HarmonicSpec::sphere(0));
        let ps = sample(&spec, 3).unwrap();
        assert_eq!(ps.len(), 1);
        let iid = sample_iid(&Manifold::Sphere2, 1, 3).unwrap();
        assert_eq!(iid.len(), 1);
    }

    #[test]
    fn jittered_one_point_per_cell() {
        let m = Manifold::standard_torus(2).unwrap();
        let spec = EnsembleSpec::Jittered(JitteredSpec::new(&m, 4).unwrap());
        let ps = sample_projection_dpp(&spec, 9).unwrap();
        let mut cells: Vec<usize> = ps
            .points
            .iter()
            .map(|p| (p.0[0] >= 0.5) as usize * 2 + (p.0[1] >= 0.5) as usize)
            .collect();
        cells.sort();
        assert_eq!(cells, vec![0, 1, 2, 3]);
        assert!(sample_projection_dpp(&EnsembleSpec::Spherical { n: 3 }, 1).is_err());
    }

    #[test]
    fn hkpv_first_intensity_is_uniform() {
        let spec = EnsembleSpec::Harmonic(HarmonicSpec::sphere(2));
        let mut pts = Vec::new();
        for r in 0..20_000u64 {
            let ps = sample(&spec, 1_000 + r).unwrap();
            assert_eq!(ps.len(), 9);
            pts.extend(ps.points);
        }
        let chi = chi_square(&pts, &Manifold::Sphere2, 32);
        assert!(chi < CHI2_31_999, "chi2 = {chi}");
    }

    #[test]
    fn hkpv_pair_distances_match_the_kernel() {
        // E #{ordered pairs with angle in bin} = ∫_bin (N² − K(u)²) du / 2
        let l = 2;
        let n = 9.0;
        let spec = EnsembleSpec::Harmonic(HarmonicSpec::sphere(l));
        let bins = 8;
        let reps = 20_000;
        let mut sum = vec![0.0; bins];
        let mut sum2 = vec![0.0; bins];
        for r in 0..reps {
            let ps = sample(&spec, 50_000 + r as u64).unwrap();
            let mut count = vec![0.0; bins];
            for i in 0..ps.len() {
                for j in 0..ps.len() {
                    if i != j {
                        let t = ps.points[i].dot(&ps.points[j]).clamp(-1.0, 1.0).acos();
                        count[((t / std::f64::consts::PI * bins as f64) as usize).min(bins - 1)] += 1.0;
                    }
                }
            }
            for b in 0..bins {
                sum[b] += count[b];
                sum2[b] += count[b] * count[b];
            }
        }
        let mut p = vec![0.0; l + 1];
        for b in 0..bins {
            let t0 = std::f64::consts::PI * b as f64 / bins as f64;
            let t1 = std::f64::consts::PI * (b + 1) as f64 / bins as f64;
            let (u0, u1) = (t1.cos(), t0.cos());
            let steps = 2000;
            let mut integral = 0.0;
            for s in 0..steps {
                let u = u0 + (u1 - u0) * (s as f64 + 0.5) / steps as f64;
                legendre_all(u, &mut p);
                let k: f64 = p.iter().enumerate().map(|(i, v)| (2 * i + 1) as f64 * v).sum();
                integral += (n * n - k * k) / 2.0 * (u1 - u0) / steps as f64;
            }
            let mean = sum[b] / reps as f64;
            let var = sum2[b] / reps as f64 - mean * mean;
            let se = (var / reps as f64).sqrt();
            assert!((mean - integral).abs() < 5.0 * se, "bin {b}: {mean} vs {integral} (se {se})");
        }
    }

    #[test]
    fn hkpv_matches_the_jittered_shortcut_in_law() {
        // running the generic sampler on the indicator basis must still put
        // exactly one point in every cell
        let m = Manifold::Sphere2;
        let j = JitteredSpec::new(&m, 12).unwrap();
        let mut rng = stream(4);
        let mut meta = SampleMeta::default();
        let pts = hkpv(&j, &mut rng, &mut meta).unwrap();
        let mut cells: Vec<usize> = pts.iter().map(|p| j.partition().locate(p)).collect();
        cells.sort();
        assert_eq!(cells, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn dpp_points_are_distinct_and_valid() {
        let t = Manifold::standard_torus(2).unwrap();
        let specs = [
            EnsembleSpec::Harmonic(HarmonicSpec::sphere(7)),
            EnsembleSpec::Harmonic(HarmonicSpec::torus(&t, 4.0, 2.0).unwrap()),
            EnsembleSpec::Harmonic(HarmonicSpec::torus(&t, 3.0, f64::INFINITY).unwrap()),
        ];
        for spec in &specs {
            for seed in 0..5 {
                let ps = sample(spec, seed).unwrap();
                assert_eq!(ps.len(), spec.n());
                assert!(ps.min_separation() > 0.0);
                for p in &ps.points {
                    ps.manifold.validate(p).unwrap();
                }
            }
        }
    }

    #[test]
    fn torus_harmonic_is_uniform() {
        let t = Manifold::standard_torus(2).unwrap();
        let spec = EnsembleSpec::Harmonic(HarmonicSpec::torus(&t, 2.0, 2.0).unwrap());
        let mut pts = Vec::new();
        for r in 0..3000u64 {
            pts.extend(sample(&spec, r).unwrap().points);
        }
        let chi = chi_square(&pts, &t, 32);
        assert!(chi < CHI2_31_999, "chi2 = {chi}");
    }

    #[test]
    fn spherical_single_point_is_rotation_invariant() {
        let draws = 100_000;
        let (mean, n) = sphere_mean((0..draws).map(|s| sample_spherical_ensemble(1, s).unwrap().points[0]));
        // each coordinate of a uniform point has variance 1/3
        let sigma = (1.0 / 3.0 / n as f64).sqrt();
        for c in mean {
            assert!(c.abs() < 4.0 * sigma, "{mean:?}");
        }
    }

    #[test]
    fn spherical_ensemble_is_deterministic_and_uniform() {
        let a = sample_spherical_ensemble(20, 77).unwrap();
        let b = sample_spherical_ensemble(20, 77).unwrap();
        assert_eq!(a.points, b.points);
        let mut pts = Vec::new();
        for r in 0..500u64 {
            pts.extend(sample_spherical_ensemble(16, r).unwrap().points);
        }
        assert_eq!(pts.len(), 8000);
        let chi = chi_square(&pts, &Manifold::Sphere2, 32);
        assert!(chi < CHI2_31_999, "chi2 = {chi}");
    }

    #[test]
    fn pencil_eigenvalues_solve_the_pencil() {
        let mut rng = stream(12);
        let n = 6;
        let a = Mat::<Complex64>::from_fn(n, n, |_, _| complex_gaussian(&mut rng));
        let b = Mat::<Complex64>::from_fn(n, n, |_, _| complex_gaussian(&mut rng));
        use faer::linalg::solvers::Solve;
        let ainv_b = a.partial_piv_lu().solve(&b);
        let mut direct = ainv_b.eigenvalues().unwrap();
        let mut pencil: Vec<Complex64> = pencil_eigenvalues(&a, &b)
            .unwrap()
            .into_iter()
            .map(|(al, be)| al / be)
            .collect();
        let key = |z: &Complex64| (z.re * 1e6).round() as i64;
        direct.sort_by_key(key);
        pencil.sort_by_key(key);
        for (x, y) in direct.iter().zip(&pencil) {
            assert!((x - y).norm() < 1e-8 * (1.0 + x.norm()), "{x} vs {y}");
        }
    }

    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(|a, b| a.total_cmp(b));
        v[v.len() / 2]
    }

    fn nn_distances(ps: &PointSet, out: &mut Vec<f64>) {
        for (i, p) in ps.points.iter().enumerate() {
            let d = ps
                .points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| ps.manifold.distance(p, q))
                .fold(f64::INFINITY, f64::min);
            out.push(d);
        }
    }

    #[test]
    fn spherical_ensemble_repels() {
        let mut dpp = Vec::new();
        let mut base = Vec::new();
        for r in 0..1000u64 {
            nn_distances(&sample_spherical_ensemble(64, r).unwrap(), &mut dpp);
            nn_distances(&sample_iid(&Manifold::Sphere2, 64, r).unwrap(), &mut base);
        }
        assert!(median(dpp) > median(base));
    }

    #[test]
    fn gaf_single_zero() {
        let draws = 100_000;
        let (mean, n) = sphere_mean(
            (0..draws).map(|s| sample_gaf_zeros(1, GafIndexing::FromZero, s).unwrap().points[0]),
        );
        let sigma = (1.0 / 3.0 / n as f64).sqrt();
        for c in mean {
            assert!(c.abs() < 4.0 * sigma, "{mean:?}");
        }
        // the single root is −a₀/a₁
        let mut rng = stream(5);
        let a0 = complex_gaussian(&mut rng);
        let a1 = complex_gaussian(&mut rng);
        let r = polynomial_roots(&[a0, a1]).unwrap();
        assert!((r[0] + a0 / a1).norm() < 1e-15);
    }

    #[test]
    fn roots_of_unity() {
        for n in [1usize, 2, 5, 16, 100, 300] {
            let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
            c[0] = Complex64::new(-1.0, 0.0);
            c[n] = Complex64::new(1.0, 0.0);
            let roots = polynomial_roots(&c).unwrap();
            assert_eq!(roots.len(), n);
            for k in 0..n {
                let want = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
                let close = roots.iter().filter(|z| (*z - want).norm() < 1e-10).count();
                assert_eq!(close, 1, "n={n} k={k}");
            }
        }
        assert!(polynomial_roots(&[Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn gaf_counts_residuals_and_determinism() {
        for n in [8usize, 64, 256, 400] {
            for seed in 0..3 {
                let ps = sample_gaf_zeros(n, GafIndexing::FromZero, seed).unwrap();
                assert_eq!(ps.len(), n);
                assert!(ps.meta.max_residual < ROOT_RESIDUAL_WARNING, "n={n}: {}", ps.meta.max_residual);
                assert!(ps.min_separation() > 0.0);
            }
        }
        let a = sample_gaf_zeros(50, GafIndexing::FromZero, 8).unwrap();
        let b = sample_gaf_zeros(50, GafIndexing::FromZero, 8).unwrap();
        assert_eq!(a.points, b.points);
        let pinned = sample_gaf_zeros(10, GafIndexing::FromOne, 8).unwrap();
        assert!(pinned.points.iter().any(|p| p.0 == [0.0, 0.0, -1.0]));
        assert!(sample_gaf_zeros(0, GafIndexing::FromZero, 1).is_err());
        assert!(sample_gaf_zeros(1001, GafIndexing::FromZero, 1).is_err());
    }

    #[test]
    fn gaf_is_uniform() {
        let mut pts = Vec::new();
        for r in 0..500u64 {
            pts.extend(sample_gaf_zeros(16, GafIndexing::FromZero, r).unwrap().points);
        }
        let chi = chi_square(&pts, &Manifold::Sphere2, 32);
        assert!(chi < CHI2_31_999, "chi2 = {chi}");
    }

    #[test]
    fn iid_is_uniform_and_deterministic() {
        let t = Manifold::standard_torus(2).unwrap();
        let ps = sample_iid(&t, 10_000, 21).unwrap();
        // χ²₉₉ 99.9% quantile
        assert!(chi_square(&ps.points, &t, 100) < 148.23);
        assert_eq!(ps.points, sample_iid(&t, 10_000, 21).unwrap().points);
    }

    #[test]
    fn sqrt_binomials_are_exact_for_small_n() {
        let s = sqrt_binomials(6);
        let want = [1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0];
        for (a, b) in s.iter().zip(want) {
            assert!((a * a - b).abs() < 1e-12 * b);
        }
        assert!(sqrt_binomials(1000).iter().all(|v| v.is_finite()));
    }
}
