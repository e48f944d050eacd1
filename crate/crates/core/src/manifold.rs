//! Geometry of the supported spaces.
//!
//! Two manifolds are supported: the unit sphere in R^3 and flat tori
//! R^d / Γ for d in {2, 3}. Volumes are normalized to one everywhere.
//! Torus points are stored in fractional coordinates with respect to the
//! (reduced) lattice basis, so the normalized volume is Lebesgue measure on
//! the unit cube and the eigenfunctions are e^{2πi⟨k, s⟩} with k ∈ Z^d.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

pub const MAX_TORUS_DIM: usize = 3;

/// A point on a manifold: a unit 3-vector on the sphere, or fractional
/// coordinates in `[0, 1)^d` on a torus (unused trailing entries are zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub fn sphere(x: f64, y: f64, z: f64) -> Point {
        let r = (x * x + y * y + z * z).sqrt();
        Point([x / r, y / r, z / r])
    }

    pub fn torus(coords: &[f64]) -> Point {
        let mut p = [0.0; 3];
        for (dst, &c) in p.iter_mut().zip(coords) {
            *dst = c - c.floor();
            if *dst >= 1.0 {
                *dst = 0.0;
            }
        }
        Point(p)
    }

    /// Point on the sphere from colatitude `theta` and longitude `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Point {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Point([st * cp, st * sp, ct])
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Torus {
    dim: usize,
    /// `basis[i]` is the i-th lattice generator.
    basis: [[f64; 3]; 3],
    /// `dual[i]` is the i-th dual generator, ⟨dual_i, basis_j⟩ = δ_ij.
    dual: [[f64; 3]; 3],
    covolume: f64,
    orthogonal: bool,
    diameter: f64,
}

impl Torus {
    /// The standard torus R^d / Z^d.
    pub fn standard(dim: usize) -> Result<Torus> {
        if !(2..=MAX_TORUS_DIM).contains(&dim) {
            return Err(invalid(format!(
                "torus dimension must be 2 or 3, got {dim}"
            )));
        }
        let gens: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Torus::new(&gens)
    }

    /// The hexagonal torus with unit covolume.
    pub fn hexagonal() -> Torus {
        let c = (2.0 / 3f64.sqrt()).sqrt();
        Torus::new(&[vec![c, 0.0], vec![0.5 * c, 0.5 * 3f64.sqrt() * c]])
            .expect("hexagonal generators are independent")
    }

    /// Torus R^d / Γ with Γ spanned by `generators` (one vector per entry).
    /// Two-dimensional bases are Lagrange–Gauss reduced first.
    pub fn new(generators: &[Vec<f64>]) -> Result<Torus> {
        let dim = generators.len();
        if !(2..=MAX_TORUS_DIM).contains(&dim) {
            return Err(invalid(format!(
                "torus dimension must be 2 or 3, got {dim}"
            )));
        }
        let mut basis = [[0.0; 3]; 3];
        for (i, g) in generators.iter().enumerate() {
            if g.len() != dim || g.iter().any(|c| !c.is_finite()) {
                return Err(invalid("generators must be finite vectors of length d"));
            }
            basis[i][..dim].copy_from_slice(g);
        }
        if dim == 2 {
            gauss_reduce(&mut basis);
        }
        let det = determinant(&basis, dim);
        let scale = basis
            .iter()
            .take(dim)
            .map(norm)
            .fold(1.0_f64, f64::max);
        if !(det.abs() > 1e-12 * scale.powi(dim as i32)) {
            return Err(invalid("lattice generators are linearly dependent"));
        }
        let dual = dual_basis(&basis, dim, det);
        let mut orthogonal = true;
        for i in 0..dim {
            for j in (i + 1)..dim {
                if dot(&basis[i], &basis[j]).abs() > 1e-14 * norm(&basis[i]) * norm(&basis[j]) {
                    orthogonal = false;
                }
            }
        }
        let mut torus = Torus {
            dim,
            basis,
            dual,
            covolume: det.abs(),
            orthogonal,
            diameter: 0.0,
        };
        torus.diameter = torus.covering_radius();
        Ok(torus)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn basis(&self) -> &[[f64; 3]; 3] {
        &self.basis
    }

    pub fn dual(&self) -> &[[f64; 3]; 3] {
        &self.dual
    }

    /// Euclidean image A·s of fractional coordinates.
    pub fn embed(&self, s: &[f64; 3]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (i, b) in self.basis.iter().enumerate().take(self.dim) {
            for k in 0..3 {
                x[k] += s[i] * b[k];
            }
        }
        x
    }

    /// Dual lattice vector B·k for an integer frequency vector.
    pub fn dual_vector(&self, k: &[i64; 3]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (i, b) in self.dual.iter().enumerate().take(self.dim) {
            for c in 0..3 {
                x[c] += k[i] as f64 * b[c];
            }
        }
        x
    }

    /// Squared flat-torus distance between fractional coordinates.
    pub fn sq_distance(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let mut delta = [0.0; 3];
        for i in 0..self.dim {
            let d = a[i] - b[i];
            delta[i] = d - d.round();
        }
        self.sq_norm_wrapped(&delta)
    }

    /// Squared length of the shortest lattice translate of `A·delta`, for
    /// `delta` already wrapped into `[-1/2, 1/2]^d`.
    fn sq_norm_wrapped(&self, delta: &[f64; 3]) -> f64 {
        if self.orthogonal {
            return sq_norm(&self.embed(delta));
        }
        let mut best = f64::INFINITY;
        let shifts: &[[f64; 3]] = if self.dim == 2 { &SHIFTS_2D } else { &SHIFTS_3D };
        for g in shifts {
            let s = [delta[0] - g[0], delta[1] - g[1], delta[2] - g[2]];
            best = best.min(sq_norm(&self.embed(&s)));
        }
        best
    }

    /// Largest distance from a point to the lattice (the torus diameter).
    fn covering_radius(&self) -> f64 {
        if self.orthogonal {
            let mut half = [0.0; 3];
            half[..self.dim].fill(0.5);
            return norm(&self.embed(&half));
        }
        if self.dim == 2 {
            // A reduced basis with ⟨u, v⟩ ≥ 0 spans a non-obtuse Delaunay
            // triangle, whose circumradius is the covering radius.
            let u = self.basis[0];
            let mut v = self.basis[1];
            if dot(&u, &v) < 0.0 {
                v = [-v[0], -v[1], 0.0];
            }
            let a = norm(&u);
            let b = norm(&v);
            let c = norm(&[u[0] - v[0], u[1] - v[1], 0.0]);
            return a * b * c / (2.0 * self.covolume);
        }
        // Grid search plus a Lipschitz margin; an upper bound.
        let steps = 24;
        let h = 1.0 / steps as f64;
        let mut best: f64 = 0.0;
        for i in 0..=steps {
            for j in 0..=steps {
                for k in 0..=steps {
                    let s = [i as f64 * h - 0.5, j as f64 * h - 0.5, k as f64 * h - 0.5];
                    best = best.max(self.sq_norm_wrapped(&s).sqrt());
                }
            }
        }
        let cell = [h / 2.0, h / 2.0, h / 2.0];
        let margin = (0..8)
            .map(|m| {
                let s = [
                    if m & 1 == 0 { cell[0] } else { -cell[0] },
                    if m & 2 == 0 { cell[1] } else { -cell[1] },
                    if m & 4 == 0 { cell[2] } else { -cell[2] },
                ];
                norm(&self.embed(&s))
            })
            .fold(0.0, f64::max);
        best + margin
    }
}

const SHIFTS_2D: [[f64; 3]; 9] = [
    [-1.0, -1.0, 0.0],
    [-1.0, 0.0, 0.0],
    [-1.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [1.0, -1.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0],
];

const SHIFTS_3D: [[f64; 3]; 27] = {
    let mut out = [[0.0; 3]; 27];
    let mut idx = 0;
    while idx < 27 {
        out[idx] = [
            (idx / 9) as f64 - 1.0,
            ((idx / 3) % 3) as f64 - 1.0,
            (idx % 3) as f64 - 1.0,
        ];
        idx += 1;
    }
    out
};

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sq_norm(a: &[f64; 3]) -> f64 {
    dot(a, a)
}

fn norm(a: &[f64; 3]) -> f64 {
    sq_norm(a).sqrt()
}

fn determinant(b: &[[f64; 3]; 3], dim: usize) -> f64 {
    if dim == 2 {
        b[0][0] * b[1][1] - b[0][1] * b[1][0]
    } else {
        b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0])
    }
}

fn dual_basis(b: &[[f64; 3]; 3], dim: usize, det: f64) -> [[f64; 3]; 3] {
    let mut d = [[0.0; 3]; 3];
    if dim == 2 {
        d[0] = [b[1][1] / det, -b[1][0] / det, 0.0];
        d[1] = [-b[0][1] / det, b[0][0] / det, 0.0];
    } else {
        let cross = |u: &[f64; 3], v: &[f64; 3]| {
            [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ]
        };
        let c0 = cross(&b[1], &b[2]);
        let c1 = cross(&b[2], &b[0]);
        let c2 = cross(&b[0], &b[1]);
        for k in 0..3 {
            d[0][k] = c0[k] / det;
            d[1][k] = c1[k] / det;
            d[2][k] = c2[k] / det;
        }
    }
    d
}

fn gauss_reduce(b: &mut [[f64; 3]; 3]) {
    let (mut u, mut v) = (b[0], b[1]);
    if sq_norm(&u) > sq_norm(&v) {
        std::mem::swap(&mut u, &mut v);
    }
    for _ in 0..64 {
        if sq_norm(&u) == 0.0 {
            break;
        }
        let m = (dot(&u, &v) / sq_norm(&u)).round();
        v = [v[0] - m * u[0], v[1] - m * u[1], 0.0];
        if sq_norm(&v) < sq_norm(&u) {
            std::mem::swap(&mut u, &mut v);
        } else {
            break;
        }
    }
    b[0] = u;
    b[1] = v;
}

/// Which space, with its geodesic metric and normalized volume.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Manifold {
    Sphere2,
    Torus(Torus),
}

impl Manifold {
    pub fn standard_torus(dim: usize) -> Result<Manifold> {
        Torus::standard(dim).map(Manifold::Torus)
    }

    pub fn dim(&self) -> usize {
        match self {
            Manifold::Sphere2 => 2,
            Manifold::Torus(t) => t.dim,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Manifold::Sphere2 => PI,
            Manifold::Torus(t) => t.diameter,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Manifold::Sphere2 => "sphere2".to_string(),
            Manifold::Torus(t) if t.orthogonal && (t.covolume - 1.0).abs() < 1e-12 => {
                format!("torus{}", t.dim)
            }
            Manifold::Torus(t) => format!("torus{}-lattice", t.dim),
        }
    }

    /// Constant c with Vol B(x, δ) ≤ c δ^d for every x and δ.
    pub fn ball_volume_constant(&self) -> f64 {
        match self {
            // (1 - cos δ) / 2 ≤ δ² / 4
            Manifold::Sphere2 => 0.25,
            Manifold::Torus(t) => {
                let unit_ball = if t.dim == 2 { PI } else { 4.0 * PI / 3.0 };
                unit_ball / t.covolume
            }
        }
    }

    /// Geodesic distance without input validation.
    #[inline]
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match self {
            Manifold::Sphere2 => x.dot(y).clamp(-1.0, 1.0).acos(),
            Manifold::Torus(t) => t.sq_distance(&x.0, &y.0).sqrt(),
        }
    }

    #[inline]
    pub fn sq_distance(&self, x: &Point, y: &Point) -> f64 {
        match self {
            Manifold::Sphere2 => {
                let d = x.dot(y).clamp(-1.0, 1.0).acos();
                d * d
            }
            Manifold::Torus(t) => t.sq_distance(&x.0, &y.0),
        }
    }

    /// Bring a point to canonical form (unit length / fundamental domain).
    pub fn canonical(&self, p: Point) -> Point {
        match self {
            Manifold::Sphere2 => Point::sphere(p.0[0], p.0[1], p.0[2]),
            Manifold::Torus(t) => Point::torus(&p.0[..t.dim]),
        }
    }

    pub fn validate(&self, p: &Point) -> Result<()> {
        if !p.is_finite() {
            return Err(invalid(format!("non-finite coordinates {:?}", p.0)));
        }
        match self {
            Manifold::Sphere2 => {
                let n = p.dot(p).sqrt();
                if (n - 1.0).abs() > 1e-9 {
                    return Err(invalid(format!("sphere point has norm {n}")));
                }
            }
            Manifold::Torus(t) => {
                if p.0[t.dim..].iter().any(|&c| c != 0.0) {
                    return Err(invalid("torus point has coordinates beyond its dimension"));
                }
            }
        }
        Ok(())
    }
}

/// Geodesic distance with validation of both arguments.
pub fn geodesic_distance(m: &Manifold, x: &Point, y: &Point) -> Result<f64> {
    if !x.is_finite() || !y.is_finite() {
        return Err(invalid("non-finite coordinates"));
    }
    Ok(m.distance(x, y))
}

/// A point drawn from the normalized volume.
pub fn uniform_sample<R: Rng + ?Sized>(m: &Manifold, rng: &mut R) -> Point {
    match m {
        Manifold::Sphere2 => loop {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let z: f64 = rng.sample(StandardNormal);
            let r2 = x * x + y * y + z * z;
            if r2 > 1e-24 {
                break Point::sphere(x, y, z);
            }
        },
        Manifold::Torus(t) => {
            let mut s = [0.0; 3];
            for c in s.iter_mut().take(t.dim) {
                *c = rng.random::<f64>();
            }
            Point(s)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub center: Point,
    pub volume: f64,
    /// Certified upper bound on the geodesic diameter of the cell.
    pub diameter: f64,
    /// Upper bound on the distance from `center` to any point of the cell.
    pub radius: f64,
}

/// Equal-area partition with enough layout information to locate points
/// and to sample uniformly inside a cell.
#[derive(Clone, Debug)]
pub struct Partition {
    manifold: Manifold,
    cells: Vec<Cell>,
    layout: Layout,
}

#[derive(Clone, Debug)]
enum Layout {
    Zonal(Zonal),
    Boxes { root: BoxLayout, boxes: Vec<([f64; 3], [f64; 3])> },
}

/// Recursive zonal layout of the sphere: zone z spans cosines
/// `cos_bounds[z] ≥ cos θ ≥ cos_bounds[z + 1]` and holds `counts[z]` equal
/// longitude sectors.
#[derive(Clone, Debug)]
struct Zonal {
    cos_bounds: Vec<f64>,
    counts: Vec<usize>,
    offsets: Vec<usize>,
}

#[derive(Clone, Debug)]
struct BoxLayout {
    cuts: Vec<f64>,
    offsets: Vec<usize>,
    children: Vec<BoxLayout>,
}

impl Partition {
    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_diameter(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    /// Index of the cell containing `p`.
    pub fn locate(&self, p: &Point) -> usize {
        match &self.layout {
            Layout::Zonal(z) => {
                let c = p.0[2].clamp(-1.0, 1.0);
                // cos_bounds is decreasing; find the zone with bounds[z] ≥ c ≥ bounds[z+1].
                let nz = z.counts.len();
                let zone = z.cos_bounds[1..nz]
                    .partition_point(|&b| b > c)
                    .min(nz - 1);
                let count = z.counts[zone];
                let mut phi = p.0[1].atan2(p.0[0]);
                if phi < 0.0 {
                    phi += 2.0 * PI;
                }
                let sector = ((phi / (2.0 * PI)) * count as f64) as usize;
                z.offsets[zone] + sector.min(count - 1)
            }
            Layout::Boxes { root, .. } => locate_box(root, p, 0),
        }
    }

    /// A point drawn uniformly from cell `idx`.
    pub fn sample_in_cell<R: Rng + ?Sized>(&self, idx: usize, rng: &mut R) -> Point {
        match &self.layout {
            Layout::Zonal(z) => {
                let zone = z.offsets.partition_point(|&o| o <= idx) - 1;
                let sector = idx - z.offsets[zone];
                let count = z.counts[zone] as f64;
                let (hi, lo) = (z.cos_bounds[zone], z.cos_bounds[zone + 1]);
                let c: f64 = lo + (hi - lo) * rng.random::<f64>();
                let phi = 2.0 * PI * (sector as f64 + rng.random::<f64>()) / count;
                let s = (1.0 - c * c).max(0.0).sqrt();
                Point::sphere(s * phi.cos(), s * phi.sin(), c)
            }
            Layout::Boxes { boxes, .. } => {
                let (lo, hi) = boxes[idx];
                let mut s = [0.0; 3];
                let dim = self.manifold.dim();
                for k in 0..dim {
                    s[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
                }
                Point::torus(&s[..dim])
            }
        }
    }
}

fn locate_box(node: &BoxLayout, p: &Point, axis: usize) -> usize {
    let c = p.0[axis];
    let slots = node.cuts.len() - 1;
    let r = node.cuts[1..slots].partition_point(|&b| b <= c).min(slots - 1);
    if node.children.is_empty() {
        node.offsets[r]
    } else {
        node.offsets[r] + locate_box(&node.children[r], p, axis + 1)
    }
}

/// Partition `m` into `n` cells of volume exactly 1/n.
///
/// The sphere uses the recursive zonal construction (two polar caps and
/// collars split into equal longitude sectors). Tori are split into slabs
/// with near-equal cell counts along each axis, slab thickness proportional
/// to the count, recursively; for n = k^d this is the k×…×k grid.
pub fn equal_area_partition(m: &Manifold, n: usize) -> Result<Partition> {
    if n == 0 {
        return Err(invalid("partition needs at least one cell"));
    }
    match m {
        Manifold::Sphere2 => Ok(sphere_partition(n)),
        Manifold::Torus(t) => Ok(torus_partition(m, t, n)),
    }
}

fn sphere_partition(n: usize) -> Partition {
    let zonal = zonal_layout(n);
    let mut cells = Vec::with_capacity(n);
    let nz = zonal.counts.len();
    for zone in 0..nz {
        let (hi, lo) = (zonal.cos_bounds[zone], zonal.cos_bounds[zone + 1]);
        let count = zonal.counts[zone];
        let dphi = 2.0 * PI / count as f64;
        let volume = (hi - lo) / 2.0 / count as f64;
        let (diameter, radius) = zone_cell_extent(hi, lo, count);
        let is_north_cap = hi >= 1.0 && count == 1;
        let is_south_cap = lo <= -1.0 && count == 1;
        for k in 0..count {
            let center = if n == 1 || (is_north_cap && !is_south_cap) {
                Point([0.0, 0.0, 1.0])
            } else if is_south_cap {
                Point([0.0, 0.0, -1.0])
            } else {
                let c = 0.5 * (hi + lo);
                let phi = dphi * (k as f64 + 0.5);
                let s = (1.0 - c * c).max(0.0).sqrt();
                Point::sphere(s * phi.cos(), s * phi.sin(), c)
            };
            cells.push(Cell {
                center,
                volume,
                diameter,
                radius,
            });
        }
    }
    Partition {
        manifold: Manifold::Sphere2,
        cells,
        layout: Layout::Zonal(zonal),
    }
}

fn zonal_layout(n: usize) -> Zonal {
    let mut counts = Vec::new();
    if n == 1 {
        counts.push(1);
    } else if n == 2 {
        counts.extend([1, 1]);
    } else {
        let area = 4.0 * PI / n as f64;
        let cap = 2.0 * (1.0 / n as f64).sqrt().asin();
        let ideal_angle = area.sqrt();
        let n_collars = (((PI - 2.0 * cap) / ideal_angle).round() as usize).max(1);
        let fit_angle = (PI - 2.0 * cap) / n_collars as f64;
        let cap_area = |theta: f64| 2.0 * PI * (1.0 - theta.cos());
        counts.push(1);
        let mut carry = 0.0;
        let mut assigned = 0usize;
        for i in 0..n_collars {
            let a = cap + i as f64 * fit_angle;
            let b = a + fit_angle;
            let ideal = (cap_area(b) - cap_area(a)) / area;
            let mut r = (ideal + carry).round();
            if r < 1.0 {
                r = 1.0;
            }
            carry += ideal - r;
            counts.push(r as usize);
            assigned += r as usize;
        }
        // Rounding with carry keeps the total; repair any residual drift.
        let target = n - 2;
        let last = counts.len() - 1;
        if assigned != target {
            let fixed = counts[last] as i64 + target as i64 - assigned as i64;
            counts[last] = fixed.max(1) as usize;
        }
        counts.push(1);
    }
    let mut offsets = Vec::with_capacity(counts.len() + 1);
    let mut cos_bounds = Vec::with_capacity(counts.len() + 1);
    let mut cum = 0usize;
    offsets.push(0);
    cos_bounds.push(1.0);
    for &c in &counts {
        cum += c;
        offsets.push(cum);
        cos_bounds.push(1.0 - 2.0 * cum as f64 / n as f64);
    }
    *cos_bounds.last_mut().unwrap() = -1.0;
    Zonal {
        cos_bounds,
        counts,
        offsets,
    }
}

/// Upper bounds on the diameter of one sector of a zone and on the distance
/// from its center: exact for caps, boundary sampling plus the sampling
/// spacing otherwise.
fn zone_cell_extent(cos_hi: f64, cos_lo: f64, count: usize) -> (f64, f64) {
    let theta_a = cos_hi.clamp(-1.0, 1.0).acos();
    let theta_b = cos_lo.clamp(-1.0, 1.0).acos();
    if count == 1 && (theta_a == 0.0 || theta_b == PI) {
        let cap = if theta_a == 0.0 { theta_b } else { PI - theta_a };
        return ((2.0 * cap).min(PI), cap);
    }
    let dphi = 2.0 * PI / count as f64;
    const K: usize = 48;
    let mut boundary = Vec::with_capacity(4 * K);
    for i in 0..K {
        let f = i as f64 / (K - 1) as f64;
        boundary.push(Point::from_angles(theta_a, f * dphi));
        boundary.push(Point::from_angles(theta_b, f * dphi));
        boundary.push(Point::from_angles(theta_a + f * (theta_b - theta_a), 0.0));
        boundary.push(Point::from_angles(theta_a + f * (theta_b - theta_a), dphi));
    }
    let angle = |a: &Point, b: &Point| a.dot(b).clamp(-1.0, 1.0).acos();
    let mut best: f64 = 0.0;
    for i in 0..boundary.len() {
        for j in (i + 1)..boundary.len() {
            best = best.max(angle(&boundary[i], &boundary[j]));
        }
    }
    let c = 0.5 * (cos_hi + cos_lo);
    let center = Point::from_angles(c.clamp(-1.0, 1.0).acos(), 0.5 * dphi);
    let reach = boundary.iter().map(|b| angle(&center, b)).fold(0.0, f64::max);
    let spacing = (dphi * theta_a.sin().max(theta_b.sin())).max(theta_b - theta_a) / (K - 1) as f64;
    ((best + spacing).min(PI), (reach + spacing).min(PI))
}

fn torus_partition(m: &Manifold, t: &Torus, n: usize) -> Partition {
    let dim = t.dim;
    let root = build_boxes(n, 0, dim);
    let mut boxes = Vec::with_capacity(n);
    collect_boxes(&root, 0, dim, [0.0; 3], [1.0; 3], &mut boxes);
    let cells = boxes
        .iter()
        .map(|(lo, hi)| {
            let mut center = [0.0; 3];
            let mut volume = 1.0;
            let mut side = [0.0; 3];
            for k in 0..dim {
                center[k] = 0.5 * (lo[k] + hi[k]);
                side[k] = hi[k] - lo[k];
                volume *= side[k];
            }
            let half = side.map(|h| 0.5 * h);
            Cell {
                center: Point(center),
                volume,
                diameter: box_diameter(t, &side),
                radius: box_diameter(t, &half),
            }
        })
        .collect();
    Partition {
        manifold: *m,
        cells,
        layout: Layout::Boxes { root, boxes },
    }
}

fn build_boxes(n: usize, depth: usize, dim: usize) -> BoxLayout {
    let remaining = dim - depth;
    if remaining == 1 {
        return BoxLayout {
            cuts: (0..=n).map(|k| k as f64 / n as f64).collect(),
            offsets: (0..=n).collect(),
            children: Vec::new(),
        };
    }
    let mut slabs = (n as f64).powf(1.0 / remaining as f64).round() as usize;
    slabs = slabs.clamp(1, n);
    let base = n / slabs;
    let extra = n % slabs;
    let mut cuts = vec![0.0];
    let mut offsets = vec![0];
    let mut children = Vec::with_capacity(slabs);
    let mut cum = 0;
    for r in 0..slabs {
        let count = base + usize::from(r < extra);
        cum += count;
        cuts.push(cum as f64 / n as f64);
        offsets.push(cum);
        children.push(build_boxes(count, depth + 1, dim));
    }
    *cuts.last_mut().unwrap() = 1.0;
    BoxLayout {
        cuts,
        offsets,
        children,
    }
}

fn collect_boxes(
    node: &BoxLayout,
    axis: usize,
    dim: usize,
    lo: [f64; 3],
    hi: [f64; 3],
    out: &mut Vec<([f64; 3], [f64; 3])>,
) {
    for r in 0..node.cuts.len() - 1 {
        let mut l = lo;
        let mut h = hi;
        l[axis] = node.cuts[r];
        h[axis] = node.cuts[r + 1];
        if node.children.is_empty() {
            for k in (axis + 1)..3 {
                l[k] = 0.0;
                h[k] = if k < dim { 1.0 } else { 0.0 };
            }
            out.push((l, h));
        } else {
            collect_boxes(&node.children[r], axis + 1, dim, l, h, out);
        }
    }
}

fn box_diameter(t: &Torus, side: &[f64; 3]) -> f64 {
    let dim = t.dim;
    if side[..dim].iter().any(|&h| h > 0.5 + 1e-15) {
        return t.diameter;
    }
    let mut best: f64 = 0.0;
    for mask in 0..(1usize << dim) {
        let mut v = [0.0; 3];
        for k in 0..dim {
            v[k] = if mask & (1 << k) == 0 { side[k] } else { -side[k] };
        }
        best = best.max(t.sq_norm_wrapped(&v).sqrt().max(0.0));
        if t.orthogonal {
            // exact: the box fits in the injectivity region
            continue;
        }
        best = best.max(sq_norm(&t.embed(&v)).sqrt().min(t.diameter));
    }
    best.min(t.diameter)
}

/// Discrete stand-in for the volume: `M` equal-weight nodes at the cell
/// centers of an equal-area partition.
#[derive(Clone, Debug)]
pub struct QuadratureTarget {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    /// Max distance from a node to a point of its cell; bounds
    /// W₂(Vol, quantized Vol) from above.
    pub radius: f64,
}

pub fn quadrature_target(m: &Manifold, count: usize) -> Result<QuadratureTarget> {
    let partition = equal_area_partition(m, count)?;
    let w = 1.0 / count as f64;
    Ok(QuadratureTarget {
        nodes: partition.cells.iter().map(|c| c.center).collect(),
        weights: vec![w; count],
        radius: partition.cells.iter().map(|c| c.radius).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn t2() -> Manifold {
        Manifold::standard_torus(2).unwrap()
    }

    #[test]
    fn sphere_distance_cases() {
        let m = Manifold::Sphere2;
        let x = Point::sphere(0.3, -0.2, 0.9);
        let y = Point([-x.0[0], -x.0[1], -x.0[2]]);
        assert_eq!(geodesic_distance(&m, &x, &x).unwrap(), 0.0);
        assert!((geodesic_distance(&m, &x, &y).unwrap() - PI).abs() < 1e-7);
        assert!(geodesic_distance(&m, &Point([f64::NAN, 0.0, 0.0]), &x).is_err());
    }

    #[test]
    fn torus_distance_matches_brute_force_shifts() {
        let m = t2();
        let x = Point::torus(&[0.1, 0.1]);
        let y = Point::torus(&[0.9, 0.9]);
        let mut brute = f64::INFINITY;
        for a in -1..=1 {
            for b in -1..=1 {
                let dx = 0.1 - 0.9 - a as f64;
                let dy = 0.1 - 0.9 - b as f64;
                brute = brute.min((dx * dx + dy * dy).sqrt());
            }
        }
        let d = geodesic_distance(&m, &x, &y).unwrap();
        assert!((d - brute).abs() < 1e-12);
        assert!((d - 0.282_842_712_474_619).abs() < 1e-12);
    }

    #[test]
    fn hexagonal_torus_geometry() {
        let t = Torus::hexagonal();
        assert!((t.covolume() - 1.0).abs() < 1e-12);
        let side = (2.0 / 3f64.sqrt()).sqrt();
        // covering radius of the triangular lattice is side / √3
        assert!((Manifold::Torus(t).diameter() - side / 3f64.sqrt()).abs() < 1e-12);
        // distance to a lattice translate of the origin is zero
        let m = Manifold::Torus(t);
        let a = Point::torus(&[0.25, 0.6]);
        let b = Point::torus(&[0.25 + 1.0, 0.6 - 1.0]);
        assert!(m.distance(&a, &b) < 1e-12);
        // brute force over a wide shift block agrees with the 3×3 search
        let mut rng = stream(3);
        for _ in 0..2000 {
            let p = uniform_sample(&m, &mut rng);
            let q = uniform_sample(&m, &mut rng);
            let mut brute = f64::INFINITY;
            for i in -3..=3 {
                for j in -3..=3 {
                    let s = [p.0[0] - q.0[0] - i as f64, p.0[1] - q.0[1] - j as f64, 0.0];
                    brute = brute.min(norm(&t.embed(&s)));
                }
            }
            assert!((m.distance(&p, &q) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn reduction_keeps_the_lattice() {
        // skewed basis of Z^2
        let t = Torus::new(&[vec![1.0, 0.0], vec![7.0, 1.0]]).unwrap();
        assert!(t.is_orthogonal());
        assert!((Manifold::Torus(t).diameter() - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(Torus::new(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
        assert!(Torus::standard(4).is_err());
    }

    #[test]
    fn uniform_sample_replays() {
        let mut a = stream(11);
        let mut b = stream(11);
        for m in [Manifold::Sphere2, t2()] {
            assert_eq!(uniform_sample(&m, &mut a), uniform_sample(&m, &mut b));
        }
    }

    #[test]
    fn sphere_uniform_coordinate_means() {
        let m = Manifold::Sphere2;
        let mut rng = stream(5);
        let n = 100_000;
        let mut sum = [0.0; 3];
        for _ in 0..n {
            let p = uniform_sample(&m, &mut rng);
            assert!((p.dot(&p) - 1.0).abs() < 1e-12);
            for k in 0..3 {
                sum[k] += p.0[k];
            }
        }
        let sigma = (1.0 / 3f64.sqrt()) / (n as f64).sqrt();
        for s in sum {
            assert!((s / n as f64).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn torus_uniform_ks_statistic() {
        let m = t2();
        let mut rng = stream(6);
        let n = 100_000;
        let pts: Vec<Point> = (0..n).map(|_| uniform_sample(&m, &mut rng)).collect();
        // 99.9% asymptotic Kolmogorov quantile is 1.9495 / √n
        let crit = 1.9495 / (n as f64).sqrt();
        for axis in 0..2 {
            let mut xs: Vec<f64> = pts.iter().map(|p| p.0[axis]).collect();
            xs.sort_by(f64::total_cmp);
            let d = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let lo = x - i as f64 / n as f64;
                    let hi = (i + 1) as f64 / n as f64 - x;
                    lo.max(hi)
                })
                .fold(0.0, f64::max);
            assert!(d < crit, "KS statistic {d} above {crit}");
        }
    }

    #[test]
    fn partition_single_cell() {
        let p = equal_area_partition(&Manifold::Sphere2, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.cells()[0].volume - 1.0).abs() < 1e-12);
        assert!((p.cells()[0].diameter - PI).abs() < 1e-12);
        let q = equal_area_partition(&t2(), 1).unwrap();
        assert!((q.cells()[0].diameter - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(equal_area_partition(&t2(), 0).is_err());
    }

    #[test]
    fn torus_grid_partition() {
        for k in 1..=6 {
            let p = equal_area_partition(&t2(), k * k).unwrap();
            assert_eq!(p.len(), k * k);
            for c in p.cells() {
                assert!((c.volume - 1.0 / (k * k) as f64).abs() < 1e-12);
                if k > 1 {
                    assert!((c.diameter - 2f64.sqrt() / k as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sphere_partition_hundred_cells() {
        let p = equal_area_partition(&Manifold::Sphere2, 100).unwrap();
        assert_eq!(p.len(), 100);
        for c in p.cells() {
            assert!((c.volume - 0.01).abs() < 1e-12);
        }
        assert!(p.max_diameter() <= 0.7, "max diameter {}", p.max_diameter());
    }

    #[test]
    fn volumes_sum_to_one_and_locate_agrees() {
        let mut rng = stream(9);
        let cases = [
            (Manifold::Sphere2, vec![2, 3, 7, 17, 64, 333, 1000]),
            (t2(), vec![2, 3, 7, 17, 64, 333]),
            (Manifold::standard_torus(3).unwrap(), vec![5, 8, 27, 100]),
            (Manifold::Torus(Torus::hexagonal()), vec![6, 49]),
        ];
        for (m, ns) in cases {
            for n in ns {
                let p = equal_area_partition(&m, n).unwrap();
                assert_eq!(p.len(), n);
                let total: f64 = p.cells().iter().map(|c| c.volume).sum();
                assert!((total - 1.0).abs() < 1e-12);
                for c in p.cells() {
                    assert!((c.volume - 1.0 / n as f64).abs() < 1e-12);
                }
                for idx in 0..n {
                    for _ in 0..5 {
                        let x = p.sample_in_cell(idx, &mut rng);
                        assert_eq!(p.locate(&x), idx, "n={n} idx={idx}");
                        let d = m.distance(&x, &p.cells()[idx].center);
                        assert!(d <= p.cells()[idx].diameter + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn quadrature_targets() {
        let q1 = quadrature_target(&t2(), 1).unwrap();
        assert_eq!(q1.nodes[0].0[..2], [0.5, 0.5]);
        assert!((q1.radius - 2f64.sqrt() / 2.0).abs() < 1e-12);
        let q4 = quadrature_target(&t2(), 4).unwrap();
        let mut centers: Vec<[f64; 2]> = q4.nodes.iter().map(|p| [p.0[0], p.0[1]]).collect();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(centers, vec![[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]]);
        assert!((q4.radius - 2f64.sqrt() / 4.0).abs() < 1e-12);
        let qs = quadrature_target(&Manifold::Sphere2, 1024).unwrap();
        assert!(qs.weights.iter().all(|&w| w == 1.0 / 1024.0));
        assert!(qs.radius <= 0.22, "q = {}", qs.radius);
    }

    #[test]
    fn doubling_shrinks_radius() {
        for m in [Manifold::Sphere2, t2()] {
            let mut prev = quadrature_target(&m, 16).unwrap().radius;
            for k in 5..12 {
                let q = quadrature_target(&m, 1 << k).unwrap().radius;
                assert!(q <= prev + 1e-12, "{} M={} q={q} prev={prev}", m.label(), 1 << k);
                assert!(prev / q <= 2.2);
                prev = q;
            }
        }
    }
}
