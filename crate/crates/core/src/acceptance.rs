//! The acceptance suite: rate reproduction sweeps plus the inequality and
//! oracle checks, one verdict line per criterion.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::kernels::{EnsembleSpec, GafIndexing, HarmonicSpec, JitteredSpec};
use crate::lattice::{annulus_difference_count, ball_points, count_ball, gauss_circle_check, LatticeNorm};
use crate::manifold::{Manifold, Point, Torus};
use crate::report::{build_report, render_svg};
use crate::rng::{derive_seed, stream};
use crate::samplers::{sample, PointSet};
use crate::spectral::{jacobi_p, szego_quantities};
use crate::statistics::{
    gaf_variance_bound, summed_variance_mc, variance_exact, variance_mc, RateModel, SmoothingBoundConfig,
};
use crate::sweep::{run_plan, summarize, write_records, write_summary, Summary, SweepPlan, SweepRecord};
use crate::transport::{solve_discrete_ot, w1_packing_lower_bound, w2_to_volume, CostMatrix, OtOptions, SolverKind};

/// Harmonic torus levels shared by criteria 4 and 5.
pub const TORUS_LEVELS: [f64; 7] = [3.0, 4.0, 5.0, 7.0, 9.0, 12.0, 15.0];
/// Sphere degrees of criterion 1; i.i.d. on S² reuses N = (L+1)².
pub const SPHERE_DEGREES: [usize; 7] = [3, 5, 7, 11, 15, 23, 31];

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let v = if self.passed { "PASS" } else { "FAIL" };
        format!("{v} {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct AcceptanceConfig {
    pub seed: u64,
    pub m_mult: usize,
    pub solver: SolverKind,
    /// When set, sweep data, summary, report and plots are written here.
    pub out: Option<PathBuf>,
    /// Criteria to run; empty runs all. Any of 1-7 or 13 runs every sweep.
    pub only: Vec<u32>,
}

/// Criteria that need the rate sweeps.
const SWEEP_CRITERIA: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 13];

impl AcceptanceConfig {
    fn wants(&self, id: u32) -> bool {
        self.only.is_empty() || self.only.contains(&id)
    }
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            seed: 1,
            m_mult: 64,
            solver: SolverKind::Exact,
            out: None,
            only: Vec::new(),
        }
    }
}

struct Sweeps {
    records: Vec<SweepRecord>,
    summary: Summary,
}

impl Sweeps {
    fn slope(&self, ensemble: &str, manifold: &str) -> Option<f64> {
        self.summary.fit_of(ensemble, manifold, RateModel::PurePower).map(|f| f.slope)
    }

    fn errors(&self, ensemble: &str, manifold: &str) -> usize {
        self.records
            .iter()
            .filter(|r| r.ensemble == ensemble && r.manifold == manifold && !r.is_ok())
            .count()
    }
}

fn run_sweep_specs(cfg: &AcceptanceConfig, specs: Vec<EnsembleSpec>, replicas: usize, bound: bool) -> Result<Vec<SweepRecord>> {
    let plan = SweepPlan {
        specs,
        replicas,
        seed: cfg.seed,
        m_mult: cfg.m_mult,
        ot: OtOptions {
            solver: cfg.solver,
            ..OtOptions::default()
        },
        bound: bound.then(|| SmoothingBoundConfig {
            k_m: 0.0,
            ..SmoothingBoundConfig::default()
        }),
        bias_check: 0.0,
    };
    Ok(run_plan(&plan, |_| Ok(()))?.0)
}

fn slope_check(id: u32, name: &'static str, sw: &Sweeps, groups: &[(&str, &str, f64, f64)]) -> CriterionResult {
    let mut passed = true;
    let mut parts = Vec::new();
    for &(e, m, lo, hi) in groups {
        let errs = sw.errors(e, m);
        match sw.slope(e, m) {
            Some(s) => {
                let ok = s >= lo && s <= hi && errs == 0;
                passed &= ok;
                parts.push(format!("{e}/{m} slope {s:.4} in [{lo:.2}, {hi:.2}]"));
            }
            None => {
                passed = false;
                parts.push(format!("{e}/{m} no fit"));
            }
        }
        if errs > 0 {
            parts.push(format!("{errs} error rows"));
        }
    }
    CriterionResult {
        id,
        name,
        passed,
        detail: parts.join("; "),
    }
}

fn torus2() -> Manifold {
    Manifold::Torus(Torus::standard(2).expect("d = 2"))
}

fn hexagonal() -> Manifold {
    Manifold::Torus(Torus::hexagonal())
}

fn torus_specs(m: &Manifold, p: f64) -> Result<Vec<EnsembleSpec>> {
    TORUS_LEVELS
        .iter()
        .map(|&l| HarmonicSpec::torus(m, l, p).map(EnsembleSpec::Harmonic))
        .collect()
}

/// Runs every criterion in order, handing each verdict to `report` as soon
/// as it is known.
pub fn run_acceptance(cfg: &AcceptanceConfig, mut report: impl FnMut(&CriterionResult)) -> Result<Vec<CriterionResult>> {
    let mut results = Vec::new();
    let mut push = |r: CriterionResult, results: &mut Vec<CriterionResult>| {
        if cfg.wants(r.id) {
            report(&r);
            results.push(r);
        }
    };
    let records = if SWEEP_CRITERIA.iter().any(|&id| cfg.wants(id)) {
        run_sweeps(cfg, &mut |r| push(r, &mut results))?
    } else {
        Vec::new()
    };
    if cfg.wants(8) {
        push(variance_agreement(cfg.seed)?, &mut results);
    }
    if cfg.wants(9) {
        push(gaf_eigenspace(cfg.seed)?, &mut results);
    }
    if cfg.wants(10) {
        push(lattice_suite(cfg.seed)?, &mut results);
    }
    if cfg.wants(11) {
        push(transport_oracle(cfg.seed)?, &mut results);
    }
    if cfg.wants(12) {
        push(szego_jacobi()?, &mut results);
    }
    if cfg.wants(13) {
        push(packing(&records), &mut results);
    }
    Ok(results)
}

/// Criteria 1-7; returns every sweep record for criterion 13.
fn run_sweeps(cfg: &AcceptanceConfig, emit: &mut dyn FnMut(CriterionResult)) -> Result<Vec<SweepRecord>> {
    let t2 = torus2();
    let hex = hexagonal();

    // 1: harmonic ensemble on the sphere, with the smoothing bound for 7
    let mut recs = run_sweep_specs(
        cfg,
        SPHERE_DEGREES
            .iter()
            .map(|&l| EnsembleSpec::Harmonic(HarmonicSpec::sphere(l)))
            .collect(),
        20,
        true,
    )?;
    let mut sw = Sweeps {
        summary: summarize(&recs),
        records: recs.clone(),
    };
    emit(slope_check(1, "harmonic ensemble on S2", &sw, &[("harmonic", "sphere2", -0.58, -0.42)]));

    let add = |sw: &mut Sweeps, more: Vec<SweepRecord>| {
        sw.records.extend(more);
        sw.summary = summarize(&sw.records);
    };

    // 2, 3: spherical ensemble and GAF zeros
    let specs = [16usize, 32, 64, 128, 256, 512]
        .iter()
        .map(|&n| EnsembleSpec::Spherical { n })
        .collect();
    add(&mut sw, run_sweep_specs(cfg, specs, 20, false)?);
    emit(slope_check(2, "spherical ensemble", &sw, &[("spherical", "sphere2", -0.58, -0.42)]));
    let specs = [16usize, 32, 64, 128, 256]
        .iter()
        .map(|&n| EnsembleSpec::GafZeros {
            n,
            indexing: GafIndexing::FromZero,
        })
        .collect();
    add(&mut sw, run_sweep_specs(cfg, specs, 30, false)?);
    emit(slope_check(3, "GAF zeros", &sw, &[("gaf", "sphere2", -0.60, -0.40)]));

    // 4: torus harmonic ensembles
    let mut specs = torus_specs(&t2, 2.0)?;
    specs.extend(torus_specs(&t2, f64::INFINITY)?);
    specs.extend(torus_specs(&hex, 2.0)?);
    let torus = run_sweep_specs(cfg, specs, 20, true)?;
    recs.extend(torus.iter().cloned());
    add(&mut sw, torus);
    emit(slope_check(
            4,
            "torus harmonic ensembles",
            &sw,
            &[
                ("harmonic", "torus2", -0.58, -0.42),
                ("harmonic_pinf", "torus2", -0.58, -0.42),
                ("harmonic", "torus2-lattice", -0.60, -0.40),
            ],
        ));

    // 5: i.i.d. contrast on matched schedules
    let s2_ns: Vec<usize> = SPHERE_DEGREES.iter().map(|l| (l + 1) * (l + 1)).collect();
    let t2_ns: Vec<usize> = torus_specs(&t2, 2.0)?.iter().map(|s| s.n()).collect();
    let mut specs: Vec<EnsembleSpec> = s2_ns
        .iter()
        .map(|&n| EnsembleSpec::Iid {
            manifold: Manifold::Sphere2,
            n,
        })
        .collect();
    specs.extend(t2_ns.iter().map(|&n| EnsembleSpec::Iid { manifold: t2, n }));
    add(&mut sw, run_sweep_specs(cfg, specs, 20, false)?);
    emit(iid_contrast(&sw));

    // 6: jittered sampling on the 3-torus
    let t3 = Manifold::Torus(Torus::standard(3).expect("d = 3"));
    let specs = (2usize..=8)
        .map(|k| JitteredSpec::new(&t3, k * k * k).map(EnsembleSpec::Jittered))
        .collect::<Result<Vec<_>>>()?;
    add(&mut sw, run_sweep_specs(cfg, specs, 20, false)?);
    emit(slope_check(6, "jittered sampling on T3", &sw, &[("jittered", "torus3", -0.40, -0.27)]));

    // 7: smoothing bound never below the certified lower end
    emit(smoothing_soundness(&recs));

    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir)?;
        write_records(&dir.join("data.csv"), &sw.records)?;
        write_summary(&dir.join("summary.csv"), &sw.summary)?;
        let rep = build_report(&sw.summary);
        fs::write(dir.join("report.txt"), &rep.text)?;
        for (e, m) in sw.summary.groups() {
            fs::write(dir.join(format!("{e}_{m}.svg")), render_svg(&sw.summary, &e, &m))?;
        }
    }

    Ok(sw.records)
}

fn iid_contrast(sw: &Sweeps) -> CriterionResult {
    let dpp = [
        ("harmonic", "sphere2"),
        ("spherical", "sphere2"),
        ("gaf", "sphere2"),
        ("harmonic", "torus2"),
        ("harmonic_pinf", "torus2"),
        ("harmonic", "torus2-lattice"),
    ];
    let steepest_dpp = dpp
        .iter()
        .filter_map(|(e, m)| sw.slope(e, m))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut passed = true;
    let mut parts = Vec::new();
    for m in ["sphere2", "torus2"] {
        let pure = sw.summary.fit_of("iid", m, RateModel::PurePower);
        let log = sw.summary.fit_of("iid", m, RateModel::PowerWithSqrtLog);
        match (pure, log) {
            (Some(p), Some(l)) => {
                let sse_ok = l.residual_sse < p.residual_sse;
                let slope_ok = p.slope > steepest_dpp;
                passed &= sse_ok && slope_ok && sw.errors("iid", m) == 0;
                parts.push(format!(
                    "iid/{m} slope {:.4} (max DPP {:.4}: {}), sse log {:.3e} vs pure {:.3e} ({})",
                    p.slope,
                    steepest_dpp,
                    if slope_ok { "above" } else { "NOT above" },
                    l.residual_sse,
                    p.residual_sse,
                    if sse_ok { "lower" } else { "NOT lower" }
                ));
            }
            _ => {
                passed = false;
                parts.push(format!("iid/{m} no fit"));
            }
        }
    }
    CriterionResult {
        id: 5,
        name: "i.i.d. contrast",
        passed,
        detail: parts.join("; "),
    }
}

fn smoothing_soundness(recs: &[SweepRecord]) -> CriterionResult {
    let mut checked = 0;
    let mut violations = 0;
    let mut missing = 0;
    let mut tightest = f64::INFINITY;
    for r in recs {
        match r.bound {
            Some(b) if r.is_ok() => {
                checked += 1;
                tightest = tightest.min(b / r.bracket_low.max(f64::MIN_POSITIVE));
                if !(b >= r.bracket_low) {
                    violations += 1;
                }
            }
            _ => missing += 1,
        }
    }
    CriterionResult {
        id: 7,
        name: "smoothing bound soundness",
        passed: violations == 0 && missing == 0 && checked > 0,
        detail: format!(
            "{checked} records, {violations} violations, {missing} without a bound, min bound/low {tightest:.3}"
        ),
    }
}

fn y10(x: &Point) -> f64 {
    3f64.sqrt() * x.0[2]
}

fn y20(x: &Point) -> f64 {
    5f64.sqrt() * (3.0 * x.0[2] * x.0[2] - 1.0) / 2.0
}

fn variance_agreement(seed: u64) -> Result<CriterionResult> {
    let mut passed = true;
    let mut parts = Vec::new();
    let fs: [(&str, fn(&Point) -> f64); 2] = [("Y10", y10), ("Y20", y20)];
    for l in [2usize, 4] {
        let spec = EnsembleSpec::Harmonic(HarmonicSpec::sphere(l));
        for (i, (name, f)) in fs.iter().enumerate() {
            let exact = variance_exact(&spec, f, 4000)?;
            let mc = variance_mc(&spec, f, 2000, derive_seed(seed, &[8, l as u64, i as u64]))?;
            let z = (exact.value - mc.variance).abs() / mc.stderr;
            passed &= z <= 5.0;
            parts.push(format!("L={l} {name}: {:.4} vs {:.4} ({z:.2} SE)", exact.value, mc.variance));
        }
    }
    Ok(CriterionResult {
        id: 8,
        name: "linear statistic variance",
        passed,
        detail: parts.join("; "),
    })
}

/// Real orthonormal degree-ℓ harmonics under the normalized area, ℓ ≤ 2.
fn harmonics(l: usize, x: &Point, out: &mut [f64]) {
    let [a, b, c] = x.0;
    match l {
        1 => {
            let s = 3f64.sqrt();
            out.copy_from_slice(&[s * a, s * b, s * c]);
        }
        _ => {
            let s = 15f64.sqrt();
            out.copy_from_slice(&[
                s * a * b,
                s * b * c,
                5f64.sqrt() * (3.0 * c * c - 1.0) / 2.0,
                s * a * c,
                s * (a * a - b * b) / 2.0,
            ]);
        }
    }
}

fn gaf_eigenspace(seed: u64) -> Result<CriterionResult> {
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [32usize, 64] {
        let spec = EnsembleSpec::GafZeros {
            n,
            indexing: GafIndexing::FromZero,
        };
        for l in [1usize, 2] {
            let f = move |x: &Point, out: &mut [f64]| harmonics(l, x, out);
            let mc = summed_variance_mc(&spec, &f, 2 * l + 1, 2000, derive_seed(seed, &[9, n as u64, l as u64]))?;
            let bound = gaf_variance_bound(l, n)?;
            let ok = mc.variance <= bound + 5.0 * mc.stderr;
            passed &= ok;
            parts.push(format!("N={n} l={l}: {:.4} ± {:.4} vs {bound:.4}", mc.variance, mc.stderr));
        }
    }
    Ok(CriterionResult {
        id: 9,
        name: "GAF eigenspace variance bound",
        passed,
        detail: parts.join("; "),
    })
}

/// Geometry of a planar norm used in the packing constant: unit-ball area,
/// largest norm of a half-diagonal of the unit square, the shortest nonzero
/// lattice vector, and max ‖k‖/|k|₂.
struct NormGeometry {
    name: &'static str,
    norm: LatticeNorm,
    area: f64,
    corner: f64,
    shortest: f64,
    stretch: f64,
}

impl NormGeometry {
    /// Counting unit squares around the lattice points of the shell
    /// L − ‖k‖ < ‖j‖ ≤ L gives ≤ C·L·|k|₂ with this C for every L ≥ 1.
    fn packing_constant(&self) -> f64 {
        self.area * (1.0 + 2.0 * self.corner / self.shortest) * (2.0 + self.corner) * self.stretch
    }
}

fn norm_geometries() -> Result<Vec<NormGeometry>> {
    let mut out = vec![
        NormGeometry {
            name: "p=1",
            norm: LatticeNorm::p(1.0)?,
            area: 2.0,
            corner: 1.0,
            shortest: 1.0,
            stretch: 2f64.sqrt(),
        },
        NormGeometry {
            name: "p=2",
            norm: LatticeNorm::p(2.0)?,
            area: PI,
            corner: 0.5 * 2f64.sqrt(),
            shortest: 1.0,
            stretch: 1.0,
        },
        NormGeometry {
            name: "p=inf",
            norm: LatticeNorm::p(f64::INFINITY)?,
            area: 4.0,
            corner: 0.5,
            shortest: 1.0,
            stretch: 1.0,
        },
    ];
    let hex = Torus::hexagonal();
    let d = hex.dual();
    let (v, w) = ([d[0][0], d[0][1]], [d[1][0], d[1][1]]);
    let norm = LatticeNorm::for_torus(&hex, 2.0)?;
    let det = (v[0] * w[1] - v[1] * w[0]).abs();
    let corner = (0.5 * (v[0] + w[0]).hypot(v[1] + w[1])).max(0.5 * (v[0] - w[0]).hypot(v[1] - w[1]));
    // σ_max of [v w] from its Gram matrix
    let (g11, g12, g22) = (v[0] * v[0] + v[1] * v[1], v[0] * w[0] + v[1] * w[1], w[0] * w[0] + w[1] * w[1]);
    let tr = g11 + g22;
    let stretch = (0.5 * (tr + ((g11 - g22).powi(2) + 4.0 * g12 * g12).sqrt())).sqrt();
    let mut shortest = f64::INFINITY;
    for a in -4i64..=4 {
        for b in -4i64..=4 {
            if (a, b) != (0, 0) {
                shortest = shortest.min(norm.eval(&[a, b, 0]));
            }
        }
    }
    out.push(NormGeometry {
        name: "hexagonal dual",
        norm,
        area: PI / det,
        corner,
        shortest,
        stretch,
    });
    Ok(out)
}

fn lattice_suite(seed: u64) -> Result<CriterionResult> {
    let mut passed = true;
    let mut parts = Vec::new();

    // MC identity for the p = 2, L = 3 harmonic ensemble on T²
    let t2 = torus2();
    let spec = EnsembleSpec::Harmonic(HarmonicSpec::torus(&t2, 3.0, 2.0)?);
    let shifts = [[1i64, 0, 0], [1, 1, 0], [2, 1, 0]];
    let reps = 2000;
    let samples: Vec<PointSet> = (0..reps)
        .into_par_iter()
        .map(|r| sample(&spec, derive_seed(seed, &[10, r as u64])))
        .collect::<Result<_>>()?;
    let norm2 = LatticeNorm::p(2.0)?;
    for k in &shifts {
        let vals: Vec<f64> = samples
            .iter()
            .map(|ps| {
                let s: Complex64 = ps
                    .points
                    .iter()
                    .map(|x| Complex64::from_polar(1.0, 2.0 * PI * (k[0] as f64 * x.0[0] + k[1] as f64 * x.0[1])))
                    .sum();
                s.norm_sqr()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0)).sqrt();
        let se = sd / (reps as f64).sqrt();
        let exact = annulus_difference_count(&norm2, k, 3.0, 2)? as f64;
        let z = (mean - exact).abs() / se;
        passed &= z <= 5.0;
        parts.push(format!("k=({},{}) {exact} vs {mean:.3} ({z:.2} SE)", k[0], k[1]));
    }

    // inclusion and packing invariants for every L ≤ 64 and every shift
    // k inside the ball of radius L
    for g in norm_geometries()? {
        let c = g.packing_constant();
        let mut worst = 0.0_f64;
        let mut bad = 0u64;
        let mut cases = 0u64;
        for l in 1..=64 {
            let lf = l as f64;
            let full = count_ball(&g.norm, lf, 2)?;
            for k in ball_points(&g.norm, lf, 2)? {
                if k == [0, 0, 0] {
                    continue;
                }
                cases += 1;
                let a = annulus_difference_count(&g.norm, &k, lf, 2)?;
                let w = g.norm.eval(&k);
                let inner = if w < lf { count_ball(&g.norm, lf - w, 2)? } else { 0 };
                let k2 = (k[0] as f64).hypot(k[1] as f64);
                worst = worst.max(a as f64 / (lf * k2));
                if a > full - inner || a as f64 > c * lf * k2 {
                    bad += 1;
                }
            }
        }
        passed &= bad == 0;
        parts.push(format!(
            "{}: {cases} shifts, {bad} violations, max count/(L|k|) {worst:.3} ≤ C={c:.3}",
            g.name
        ));
    }

    let mut gauss_bad = 0;
    for r in 1..=200 {
        if !gauss_circle_check(r as f64)?.holds() {
            gauss_bad += 1;
        }
    }
    passed &= gauss_bad == 0;
    parts.push(format!("Gauss circle r=1..200: {gauss_bad} violations"));
    Ok(CriterionResult {
        id: 10,
        name: "lattice suite",
        passed,
        detail: parts.join("; "),
    })
}

/// Minimum cost over the vertices of the transportation polytope: every
/// choice of m + n − 1 cells whose linear system has a unique nonnegative
/// solution.
fn brute_force_ot(cost: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
    let (m, n) = (a.len(), b.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let basis = m + n - 1;
    let mut best = f64::INFINITY;
    let mut pick: Vec<usize> = (0..basis).collect();
    loop {
        // equations: row sums (m) and the first n − 1 column sums
        let mut mat = vec![vec![0.0; basis + 1]; basis];
        for (c, &ci) in pick.iter().enumerate() {
            let (i, j) = cells[ci];
            mat[i][c] = 1.0;
            if j + 1 < n {
                mat[m + j][c] = 1.0;
            }
        }
        for i in 0..m {
            mat[i][basis] = a[i];
        }
        for j in 0..n - 1 {
            mat[m + j][basis] = b[j];
        }
        if let Some(x) = gauss_solve(mat) {
            if x.iter().all(|&v| v >= -1e-12) {
                let v: f64 = pick.iter().zip(&x).map(|(&ci, &xv)| cost[cells[ci].0][cells[ci].1] * xv).sum();
                best = best.min(v);
            }
        }
        // next combination
        let mut i = basis;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < cells.len() - basis + i {
                pick[i] += 1;
                for j in i + 1..basis {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..n).map(|r| a[r][n] / a[r][r]).collect())
}

fn transport_oracle(seed: u64) -> Result<CriterionResult> {
    let mut rng = stream(derive_seed(seed, &[11]));
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let cost: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
        let mut a: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.05).collect();
        let mut b: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.05).collect();
        let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
        a.iter_mut().for_each(|v| *v /= sa);
        b.iter_mut().for_each(|v| *v /= sb);
        let oracle = brute_force_ot(&cost, &a, &b);
        let sol = solve_discrete_ot(&CostMatrix::from_rows(&cost)?, &a, &b, &OtOptions::default())?;
        worst = worst.max((sol.value - oracle).abs());
    }
    let ps = PointSet::from_points(Manifold::Sphere2, vec![Point::sphere(0.0, 0.0, 1.0)])?;
    let est = w2_to_volume(&ps, 8192, &OtOptions::default())?;
    let truth = ((PI * PI - 4.0) / 2.0).sqrt();
    let atom_ok = est.bracket_low <= truth && truth <= est.bracket_high;
    Ok(CriterionResult {
        id: 11,
        name: "transport oracle",
        passed: worst <= 1e-9 && atom_ok,
        detail: format!(
            "100 random 3x3 instances, max |exact - brute force| {worst:.2e}; single atom {truth:.6} in [{:.6}, {:.6}]",
            est.bracket_low, est.bracket_high
        ),
    })
}

fn szego_jacobi() -> Result<CriterionResult> {
    let mut passed = true;
    let mut parts = Vec::new();
    for &(a, b) in &[(1.0, 0.0), (1.0, 0.5), (2.0, 1.0), (4.0, 3.0)] {
        let mut small = 0.0_f64;
        let mut all = 0.0_f64;
        for l in 10..=200usize {
            let lf = l as f64;
            for i in 0..=40 {
                let theta = PI - 3.0 / lf * (i as f64 / 40.0);
                if theta >= PI {
                    continue;
                }
                let q = szego_quantities(l, a, b, theta)?.bound_quantity;
                all = all.max(q);
                if l <= 20 {
                    small = small.max(q);
                }
            }
        }
        let ok = all <= 2.0 * small && all.is_finite();
        passed &= ok;
        parts.push(format!("({a},{b}) max {all:.4} vs {small:.4} for L≤20"));
    }
    let mut worst = 0.0_f64;
    for &(a, b) in &[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0), (2.0, 1.0), (4.0, 3.0), (-0.5, 0.5)] {
        for i in 0..=20 {
            let x = -1.0 + 0.1 * i as f64;
            let closed = [
                1.0,
                (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0,
                (a + 1.0) * (a + 2.0) / 2.0
                    + (a + 2.0) * (a + b + 3.0) * (x - 1.0) / 2.0
                    + (a + b + 3.0) * (a + b + 4.0) * (x - 1.0) * (x - 1.0) / 8.0,
            ];
            for (deg, c) in closed.iter().enumerate() {
                worst = worst.max((jacobi_p(deg, a, b, x)? - c).abs());
            }
        }
    }
    passed &= worst <= 1e-12;
    parts.push(format!("Jacobi degree ≤ 2 max error {worst:.1e}"));
    Ok(CriterionResult {
        id: 12,
        name: "Szego and Jacobi",
        passed,
        detail: parts.join("; "),
    })
}

fn packing(records: &[SweepRecord]) -> CriterionResult {
    let manifolds: Vec<(String, Manifold)> = [
        Manifold::Sphere2,
        torus2(),
        hexagonal(),
        Manifold::Torus(Torus::standard(3).expect("d = 3")),
    ]
    .into_iter()
    .map(|m| (m.label(), m))
    .collect();
    let mut checked = 0;
    let mut bad = 0;
    for r in records.iter().filter(|r| r.is_ok()) {
        let Some((_, m)) = manifolds.iter().find(|(l, _)| *l == r.manifold) else {
            bad += 1;
            continue;
        };
        checked += 1;
        if !(r.bracket_high >= w1_packing_lower_bound(r.n, m)) {
            bad += 1;
        }
    }
    CriterionResult {
        id: 13,
        name: "packing lower bound",
        passed: bad == 0 && checked > 0,
        detail: format!("{checked} records, {bad} violations"),
    }
}
