//! Projection kernels and orthonormal bases for the supported ensembles.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::lattice::{ball_points, LatticeNorm};
use crate::manifold::{equal_area_partition, uniform_sample, Manifold, Partition, Point};
use crate::spectral::legendre_all;

/// Coefficient range of the Gaussian analytic function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GafIndexing {
    /// f(z) = Σ_{n=0}^N a_n √C(N,n) z^n, the rotation-invariant ensemble.
    #[default]
    FromZero,
    /// f(z) = Σ_{n=1}^N …, which pins one zero at z = 0.
    FromOne,
}

/// Band-limited harmonic ensemble: the span of all eigenfunctions up to a
/// frequency level.
#[derive(Clone, Debug)]
pub struct HarmonicSpec {
    manifold: Manifold,
    level: f64,
    p: f64,
    /// Torus only: 0 first, then each half-space frequency h followed by −h.
    frequencies: Arc<Vec<[i64; 3]>>,
    /// Largest |k_c| over the frequency set, per coordinate.
    reach: [usize; 3],
}

impl HarmonicSpec {
    /// Spherical harmonics of degree ≤ `degree`; N = (degree + 1)².
    pub fn sphere(degree: usize) -> HarmonicSpec {
        HarmonicSpec {
            manifold: Manifold::Sphere2,
            level: degree as f64,
            p: 2.0,
            frequencies: Arc::new(Vec::new()),
            reach: [0; 3],
        }
    }

    /// Exponentials e^{2πi⟨k, s⟩} with ‖k‖ ≤ `level`, the norm chosen by
    /// [`LatticeNorm::for_torus`].
    pub fn torus(m: &Manifold, level: f64, p: f64) -> Result<HarmonicSpec> {
        let Manifold::Torus(t) = m else {
            return Err(invalid("torus harmonic ensemble needs a torus"));
        };
        let norm = LatticeNorm::for_torus(t, p)?;
        let ball = ball_points(&norm, level, t.dim())?;
        let mut frequencies = Vec::with_capacity(ball.len());
        frequencies.push([0; 3]);
        let mut reach = [0usize; 3];
        for k in ball {
            let positive = k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0);
            if positive {
                frequencies.push(k);
                frequencies.push(k.map(|c| -c));
            }
            for c in 0..3 {
                reach[c] = reach[c].max(k[c].unsigned_abs() as usize);
            }
        }
        Ok(HarmonicSpec {
            manifold: *m,
            level,
            p,
            frequencies: Arc::new(frequencies),
            reach,
        })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.level as usize
    }

    pub fn n(&self) -> usize {
        match self.manifold {
            Manifold::Sphere2 => (self.degree() + 1).pow(2),
            Manifold::Torus(_) => self.frequencies.len(),
        }
    }

    /// Torus frequencies in basis order (0, h₁, −h₁, h₂, −h₂, …).
    pub fn frequencies(&self) -> &[[i64; 3]] {
        &self.frequencies
    }

    fn exp_table(&self, s: &[f64; 3]) -> ExpTable {
        ExpTable::new(s, &self.reach, self.manifold.dim())
    }

    fn kernel(&self, x: &Point, y: &Point) -> Complex64 {
        match self.manifold {
            Manifold::Sphere2 => {
                let mut p = vec![0.0; self.degree() + 1];
                legendre_all(x.dot(y).clamp(-1.0, 1.0), &mut p);
                let k: f64 = p.iter().enumerate().map(|(l, v)| (2 * l + 1) as f64 * v).sum();
                Complex64::new(k, 0.0)
            }
            Manifold::Torus(_) => {
                let d = [x.0[0] - y.0[0], x.0[1] - y.0[1], x.0[2] - y.0[2]];
                let table = self.exp_table(&d);
                let mut sum = Complex64::new(1.0, 0.0);
                for pair in self.frequencies[1..].chunks_exact(2) {
                    // e^{iθ} + e^{-iθ} = 2 cos θ
                    sum.re += 2.0 * table.eval(&pair[0]).re;
                }
                sum
            }
        }
    }
}

/// Powers e^{2πi m s_c} for |m| ≤ reach_c.
struct ExpTable {
    reach: [usize; 3],
    rows: [Vec<Complex64>; 3],
}

impl ExpTable {
    fn new(s: &[f64; 3], reach: &[usize; 3], dim: usize) -> ExpTable {
        let mut rows: [Vec<Complex64>; 3] = Default::default();
        for c in 0..dim {
            let r = reach[c];
            let mut row = vec![Complex64::new(1.0, 0.0); 2 * r + 1];
            let step = Complex64::from_polar(1.0, 2.0 * PI * s[c]);
            let mut w = Complex64::new(1.0, 0.0);
            for m in 1..=r {
                // refresh from the exact value now and then to stop drift
                w = if m % 16 == 0 {
                    Complex64::from_polar(1.0, 2.0 * PI * s[c] * m as f64)
                } else {
                    w * step
                };
                row[r + m] = w;
                row[r - m] = w.conj();
            }
            rows[c] = row;
        }
        ExpTable { reach: *reach, rows }
    }

    fn eval(&self, k: &[i64; 3]) -> Complex64 {
        let mut z = Complex64::new(1.0, 0.0);
        for c in 0..3 {
            if !self.rows[c].is_empty() {
                z *= self.rows[c][(self.reach[c] as i64 + k[c]) as usize];
            }
        }
        z
    }
}

/// One uniform point per cell of an equal-area partition.
#[derive(Clone, Debug)]
pub struct JitteredSpec {
    partition: Arc<Partition>,
}

impl JitteredSpec {
    pub fn new(m: &Manifold, n: usize) -> Result<JitteredSpec> {
        Ok(JitteredSpec {
            partition: Arc::new(equal_area_partition(m, n)?),
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.partition.len()
    }
}

/// Which point process to draw.
#[derive(Clone, Debug)]
pub enum EnsembleSpec {
    Harmonic(HarmonicSpec),
    Spherical { n: usize },
    GafZeros { n: usize, indexing: GafIndexing },
    Jittered(JitteredSpec),
    Iid { manifold: Manifold, n: usize },
}

impl EnsembleSpec {
    pub fn n(&self) -> usize {
        match self {
            EnsembleSpec::Harmonic(h) => h.n(),
            EnsembleSpec::Spherical { n } | EnsembleSpec::GafZeros { n, .. } => *n,
            EnsembleSpec::Jittered(j) => j.n(),
            EnsembleSpec::Iid { n, .. } => *n,
        }
    }

    pub fn manifold(&self) -> Manifold {
        match self {
            EnsembleSpec::Harmonic(h) => h.manifold,
            EnsembleSpec::Spherical { .. } | EnsembleSpec::GafZeros { .. } => Manifold::Sphere2,
            EnsembleSpec::Jittered(j) => *j.partition.manifold(),
            EnsembleSpec::Iid { manifold, .. } => *manifold,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EnsembleSpec::Harmonic(_) => "harmonic",
            EnsembleSpec::Spherical { .. } => "spherical",
            EnsembleSpec::GafZeros { .. } => "gaf",
            EnsembleSpec::Jittered(_) => "jittered",
            EnsembleSpec::Iid { .. } => "iid",
        }
    }

    /// Harmonic or jittered: a determinantal process with a finite
    /// orthonormal basis we can evaluate.
    pub fn is_projection(&self) -> bool {
        matches!(self, EnsembleSpec::Harmonic(_) | EnsembleSpec::Jittered(_))
    }
}

fn unsupported(spec: &EnsembleSpec, what: &str) -> Error {
    Error::Unsupported(format!("{what} is not available for the {} ensemble", spec.label()))
}

/// Real orthonormal spherical harmonics of degree ≤ `lmax` under the
/// normalized area, written to `out[l² + l + m]`; m < 0 carries sin(|m|φ).
pub fn real_spherical_harmonics(lmax: usize, x: &Point, out: &mut [f64]) {
    let n = (lmax + 1) * (lmax + 1);
    assert!(out.len() >= n);
    let z = x.0[2].clamp(-1.0, 1.0);
    let rho = x.0[0].hypot(x.0[1]);
    let s = rho;
    let (cphi, sphi) = if rho > 0.0 { (x.0[0] / rho, x.0[1] / rho) } else { (1.0, 0.0) };
    let mut pmm = 1.0;
    let (mut cm, mut sm) = (1.0, 0.0);
    for m in 0..=lmax {
        if m > 0 {
            pmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
            let c = cm * cphi - sm * sphi;
            sm = sm * cphi + cm * sphi;
            cm = c;
        }
        let (fc, fs) = if m == 0 { (1.0, 0.0) } else { (SQRT_2 * cm, SQRT_2 * sm) };
        let mut put = |l: usize, p: f64| {
            let base = l * l + l;
            out[base + m] = p * fc;
            if m > 0 {
                out[base - m] = p * fs;
            }
        };
        put(m, pmm);
        if m == lmax {
            break;
        }
        let mut p_prev = pmm;
        let mut p_cur = ((2 * m + 3) as f64).sqrt() * z * pmm;
        put(m + 1, p_cur);
        for l in (m + 2)..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let l1 = lf - 1.0;
            let b = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
            let p_next = a * (z * p_cur - b * p_prev);
            p_prev = p_cur;
            p_cur = p_next;
            put(l, p_cur);
        }
    }
}

/// A finite real orthonormal basis whose projection kernel defines the
/// process; what the sequential sampler consumes.
pub trait RealBasis: Sync {
    fn manifold(&self) -> &Manifold;
    fn rank(&self) -> usize;
    /// Writes the `rank()` basis values at `x`; Σ out² = N everywhere.
    fn eval_real(&self, x: &Point, out: &mut [f64]);
}

impl RealBasis for HarmonicSpec {
    fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    fn rank(&self) -> usize {
        self.n()
    }

    /// Sphere: real harmonics. Torus: 1, √2 cos 2π⟨h, s⟩, √2 sin 2π⟨h, s⟩.
    fn eval_real(&self, x: &Point, out: &mut [f64]) {
        match self.manifold {
            Manifold::Sphere2 => real_spherical_harmonics(self.degree(), x, out),
            Manifold::Torus(_) => {
                let table = self.exp_table(&x.0);
                out[0] = 1.0;
                for (i, pair) in self.frequencies[1..].chunks_exact(2).enumerate() {
                    let e = table.eval(&pair[0]);
                    out[1 + 2 * i] = SQRT_2 * e.re;
                    out[2 + 2 * i] = SQRT_2 * e.im;
                }
            }
        }
    }
}

impl RealBasis for JitteredSpec {
    fn manifold(&self) -> &Manifold {
        self.partition.manifold()
    }

    fn rank(&self) -> usize {
        self.n()
    }

    fn eval_real(&self, x: &Point, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[self.partition.locate(x)] = (self.n() as f64).sqrt();
    }
}

/// The N orthonormal basis functions at `x`.
pub fn basis_eval(spec: &EnsembleSpec, x: &Point) -> Result<Vec<Complex64>> {
    spec.manifold().validate(x)?;
    match spec {
        EnsembleSpec::Harmonic(h) => match h.manifold {
            Manifold::Sphere2 => {
                let mut out = vec![0.0; h.n()];
                real_spherical_harmonics(h.degree(), x, &mut out);
                Ok(out.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
            }
            Manifold::Torus(_) => {
                let table = h.exp_table(&x.0);
                Ok(h.frequencies.iter().map(|k| table.eval(k)).collect())
            }
        },
        EnsembleSpec::Jittered(j) => {
            let mut out = vec![0.0; j.n()];
            j.eval_real(x, &mut out);
            Ok(out.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        }
        _ => Err(unsupported(spec, "an orthonormal basis")),
    }
}

/// Inverse of the lift z ↦ (2u, 2v, |z|² − 1)/(|z|² + 1); the north pole
/// maps to ∞.
pub fn stereographic_chart(p: &Point) -> Complex64 {
    let d = 1.0 - p.0[2];
    Complex64::new(p.0[0] / d, p.0[1] / d)
}

/// Inverse stereographic lift to the unit sphere.
pub fn stereographic_lift(z: Complex64) -> Point {
    let r2 = z.norm_sqr();
    if !r2.is_finite() {
        return Point([0.0, 0.0, 1.0]);
    }
    let d = r2 + 1.0;
    Point([2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d])
}

const POLE_GUARD: f64 = 1e-6;

/// Rotations tried in turn so that neither argument sits near the chart's
/// pole; two points cannot be near the preimages of all three poles.
const CHART_ROTATIONS: [fn(&Point) -> Point; 3] = [
    |p| *p,
    |p| Point([p.0[0], -p.0[2], p.0[1]]),
    |p| Point([p.0[2], p.0[1], -p.0[0]]),
];

fn near_pole(p: &Point) -> bool {
    // chordal distance to (0,0,1) is √(2(1−z))
    (2.0 * (1.0 - p.0[2])).max(0.0).sqrt() < POLE_GUARD
}

fn spherical_ensemble_kernel(n: usize, x: &Point, y: &Point) -> Complex64 {
    let nf = n as f64;
    if n == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let rotate = CHART_ROTATIONS
        .iter()
        .find(|r| !near_pole(&r(x)) && !near_pole(&r(y)))
        .expect("two points block at most two charts");
    let (fx, fy) = (stereographic_chart(&rotate(x)), stereographic_chart(&rotate(y)));
    let w = Complex64::new(1.0, 0.0) + fx * fy.conj();
    let e = nf - 1.0;
    let log = e * (w.ln() - 0.5 * (1.0 + fx.norm_sqr()).ln() - 0.5 * (1.0 + fy.norm_sqr()).ln());
    nf * log.exp()
}

/// |K_N(x, y)| = N cos(d(x, y)/2)^{N−1} for the spherical ensemble: chart free.
pub fn spherical_ensemble_modulus(n: usize, x: &Point, y: &Point) -> f64 {
    let c = ((1.0 + x.dot(y)) / 2.0).clamp(0.0, 1.0).sqrt();
    n as f64 * c.powi(n as i32 - 1)
}

/// K(x, y) for every determinantal ensemble.
pub fn kernel_eval(spec: &EnsembleSpec, x: &Point, y: &Point) -> Result<Complex64> {
    let m = spec.manifold();
    m.validate(x)?;
    m.validate(y)?;
    match spec {
        EnsembleSpec::Harmonic(h) => Ok(h.kernel(x, y)),
        EnsembleSpec::Spherical { n } => Ok(spherical_ensemble_kernel(*n, x, y)),
        EnsembleSpec::Jittered(j) => {
            let same = j.partition.locate(x) == j.partition.locate(y);
            Ok(Complex64::new(if same { j.n() as f64 } else { 0.0 }, 0.0))
        }
        _ => Err(unsupported(spec, "a determinantal kernel")),
    }
}

/// max |K(x, x) − N| over `samples` uniform points.
pub fn kernel_diag_check<R: Rng + ?Sized>(spec: &EnsembleSpec, samples: usize, rng: &mut R) -> Result<f64> {
    let m = spec.manifold();
    let n = spec.n() as f64;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = uniform_sample(&m, rng);
        worst = worst.max((kernel_eval(spec, &x, &x)? - n).norm());
    }
    Ok(worst)
}
