//! Seeded replica sweeps: sample, transport to the volume, optionally bound,
//! and persist one CSV row per replica.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{EnsembleKind, ExperimentConfig};
use crate::error::{Error, Result};
use crate::kernels::EnsembleSpec;
use crate::manifold::{quadrature_target, Manifold};
use crate::rng::derive_seed;
use crate::samplers::sample;
use crate::statistics::{fit_rate, optimize_smoothing_time, RateFit, RateModel, RatePoint, SmoothingBoundConfig};
use crate::transport::{w2_to_target, OtOptions, SolverKind};

/// Bumped whenever the data or summary columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const DATA_HEADER: [&str; 14] = [
    "ensemble",
    "manifold",
    "n",
    "replica",
    "seed",
    "w2",
    "bracket_low",
    "bracket_high",
    "m",
    "runtime_ms",
    "solver",
    "bound",
    "t_star",
    "error",
];

pub const SUMMARY_HEADER: [&str; 11] = [
    "ensemble",
    "manifold",
    "kind",
    "n",
    "replicas",
    "mean_w2",
    "stderr_w2",
    "model",
    "slope",
    "intercept",
    "sse",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub ensemble: String,
    pub manifold: String,
    pub n: usize,
    pub replica: usize,
    pub seed: u64,
    pub w2: f64,
    pub bracket_low: f64,
    pub bracket_high: f64,
    pub m: usize,
    pub runtime_ms: u64,
    pub solver: SolverKind,
    pub bound: Option<f64>,
    pub t_star: Option<f64>,
    /// Set when the replica failed; numeric fields are then NaN.
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// CSV fields; floats carry 17 significant digits.
    pub fn fields(&self) -> Vec<String> {
        let ok = self.is_ok();
        let f = |x: f64| if ok { fmt17(x) } else { String::new() };
        let opt = |x: Option<f64>| x.map_or(String::new(), fmt17);
        vec![
            self.ensemble.clone(),
            self.manifold.clone(),
            self.n.to_string(),
            self.replica.to_string(),
            self.seed.to_string(),
            f(self.w2),
            f(self.bracket_low),
            f(self.bracket_high),
            self.m.to_string(),
            self.runtime_ms.to_string(),
            self.solver.label().to_string(),
            opt(self.bound),
            opt(self.t_star),
            self.error.clone().unwrap_or_default(),
        ]
    }

    /// Fields that must replay bit for bit under a fixed seed.
    pub fn data_fields(&self) -> Vec<String> {
        let mut f = self.fields();
        f.remove(9);
        f
    }
}

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Relative change of W₂ when the target grows from M to 4M.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasCheck {
    pub ensemble: String,
    pub n: usize,
    pub replica: usize,
    pub w2: f64,
    pub w2_4m: f64,
}

/// Everything a sweep needs besides the ensembles.
#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub specs: Vec<EnsembleSpec>,
    pub replicas: usize,
    pub seed: u64,
    pub m_mult: usize,
    pub ot: OtOptions,
    pub bound: Option<SmoothingBoundConfig>,
    pub bias_check: f64,
}

impl SweepPlan {
    pub fn from_config(cfg: &ExperimentConfig) -> (SweepPlan, Vec<SweepRecord>) {
        let mut specs = Vec::new();
        let mut failed = Vec::new();
        let manifold = cfg.manifold.manifold();
        for &kind in &cfg.ensembles {
            for &n in &cfg.n_schedule {
                match cfg.spec(kind, n) {
                    Ok(s) => specs.push(s),
                    Err(e) => {
                        let label = match (kind, manifold) {
                            (EnsembleKind::Harmonic, Manifold::Torus(_)) => harmonic_label(cfg.norm_p),
                            _ => kind.key().to_string(),
                        };
                        failed.push(error_record(&label, &manifold, n, 0, 0, cfg.solver, e));
                    }
                }
            }
        }
        let plan = SweepPlan {
            specs,
            replicas: cfg.replicas,
            seed: cfg.seed,
            m_mult: cfg.m_mult,
            ot: OtOptions {
                solver: cfg.solver,
                ..OtOptions::default()
            },
            bound: cfg.bound.then(|| SmoothingBoundConfig {
                k_m: cfg.k_m,
                ..SmoothingBoundConfig::default()
            }),
            bias_check: cfg.bias_check,
        };
        (plan, failed)
    }
}

fn error_record(ens: &str, m: &Manifold, n: usize, replica: usize, seed: u64, solver: SolverKind, e: Error) -> SweepRecord {
    SweepRecord {
        ensemble: ens.to_string(),
        manifold: m.label(),
        n,
        replica,
        seed,
        w2: f64::NAN,
        bracket_low: f64::NAN,
        bracket_high: f64::NAN,
        m: 0,
        runtime_ms: 0,
        solver,
        bound: None,
        t_star: None,
        error: Some(e.to_string().replace([',', '\n'], ";")),
    }
}

/// FNV-1a, so replica seeds do not depend on the order of ensembles.
fn label_hash(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Row label of an ensemble: the sampler label, with the frequency norm
/// appended for harmonic ensembles on tori with p ≠ 2 (`harmonic_pinf`).
pub fn record_label(spec: &EnsembleSpec) -> String {
    match spec {
        EnsembleSpec::Harmonic(h) if matches!(h.manifold(), Manifold::Torus(_)) => harmonic_label(h.p()),
        _ => spec.label().to_string(),
    }
}

fn harmonic_label(p: f64) -> String {
    if p == 2.0 {
        "harmonic".to_string()
    } else if p == f64::INFINITY {
        "harmonic_pinf".to_string()
    } else {
        format!("harmonic_p{p}")
    }
}

pub fn replica_seed(master: u64, label: &str, n: usize, replica: usize) -> u64 {
    derive_seed(master, &[label_hash(label), n as u64, replica as u64])
}

fn one_replica(spec: &EnsembleSpec, target: &crate::manifold::QuadratureTarget, plan: &SweepPlan, replica: usize) -> (SweepRecord, Option<BiasCheck>) {
    let m = spec.manifold();
    let label = record_label(spec);
    let seed = replica_seed(plan.seed, &label, spec.n(), replica);
    let start = Instant::now();
    let run = || -> Result<(SweepRecord, Option<BiasCheck>)> {
        let ps = sample(spec, seed)?;
        let est = w2_to_target(&ps, target, &plan.ot)?;
        let (bound, t_star) = match &plan.bound {
            Some(cfg) => {
                let opt = optimize_smoothing_time(&ps, cfg)?;
                (Some(opt.bound), Some(opt.t))
            }
            None => (None, None),
        };
        let cutoff = (plan.bias_check * plan.replicas as f64).ceil() as usize;
        let bias = if replica < cutoff {
            let big = quadrature_target(&m, 4 * target.nodes.len())?;
            let e4 = w2_to_target(&ps, &big, &plan.ot)?;
            Some(BiasCheck {
                ensemble: label.clone(),
                n: spec.n(),
                replica,
                w2: est.value,
                w2_4m: e4.value,
            })
        } else {
            None
        };
        let rec = SweepRecord {
            ensemble: label.clone(),
            manifold: m.label(),
            n: spec.n(),
            replica,
            seed,
            w2: est.value,
            bracket_low: est.bracket_low,
            bracket_high: est.bracket_high,
            m: est.m,
            runtime_ms: start.elapsed().as_millis() as u64,
            solver: est.solver,
            bound,
            t_star,
            error: None,
        };
        Ok((rec, bias))
    };
    match run() {
        Ok(r) => r,
        Err(e) => {
            let mut rec = error_record(&label, &m, spec.n(), replica, seed, plan.ot.solver, e);
            rec.runtime_ms = start.elapsed().as_millis() as u64;
            (rec, None)
        }
    }
}

/// Runs every (ensemble, N) block; replicas of a block run concurrently and
/// `sink` receives the block's rows in replica order.
pub fn run_plan(plan: &SweepPlan, mut sink: impl FnMut(&[SweepRecord]) -> Result<()>) -> Result<(Vec<SweepRecord>, Vec<BiasCheck>)> {
    let mut records = Vec::new();
    let mut bias = Vec::new();
    for spec in &plan.specs {
        let m = spec.manifold();
        let n = spec.n();
        let label = record_label(spec);
        let rows: Vec<(SweepRecord, Option<BiasCheck>)> = match quadrature_target(&m, plan.m_mult * n) {
            Ok(target) => (0..plan.replicas)
                .into_par_iter()
                .map(|r| one_replica(spec, &target, plan, r))
                .collect(),
            Err(e) => {
                let msg = e.to_string();
                (0..plan.replicas)
                    .map(|r| {
                        let seed = replica_seed(plan.seed, &label, n, r);
                        let err = Error::InvalidInput(msg.clone());
                        (error_record(&label, &m, n, r, seed, plan.ot.solver, err), None)
                    })
                    .collect()
            }
        };
        let block: Vec<SweepRecord> = rows.iter().map(|r| r.0.clone()).collect();
        sink(&block)?;
        records.extend(block);
        bias.extend(rows.into_iter().filter_map(|r| r.1));
    }
    Ok((records, bias))
}

/// Per-N means and standard errors for one ensemble on one manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryPoint {
    pub ensemble: String,
    pub manifold: String,
    pub n: usize,
    pub replicas: usize,
    pub mean_w2: f64,
    pub stderr_w2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryFit {
    pub ensemble: String,
    pub manifold: String,
    pub fit: RateFit,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub points: Vec<SummaryPoint>,
    pub fits: Vec<SummaryFit>,
}

impl Summary {
    pub fn groups(&self) -> Vec<(String, String)> {
        let mut g: Vec<(String, String)> = Vec::new();
        for p in &self.points {
            let key = (p.ensemble.clone(), p.manifold.clone());
            if !g.contains(&key) {
                g.push(key);
            }
        }
        g
    }

    pub fn points_of(&self, ensemble: &str, manifold: &str) -> Vec<&SummaryPoint> {
        self.points
            .iter()
            .filter(|p| p.ensemble == ensemble && p.manifold == manifold)
            .collect()
    }

    pub fn fit_of(&self, ensemble: &str, manifold: &str, model: RateModel) -> Option<&RateFit> {
        self.fits
            .iter()
            .find(|f| f.ensemble == ensemble && f.manifold == manifold && f.fit.model == model)
            .map(|f| &f.fit)
    }
}

/// Means per (ensemble, manifold, N) over successful rows, then both rate
/// fits wherever ≥ 4 distinct N are present.
pub fn summarize(records: &[SweepRecord]) -> Summary {
    let mut summary = Summary::default();
    let mut keys: Vec<(String, String, usize)> = Vec::new();
    for r in records.iter().filter(|r| r.is_ok()) {
        let k = (r.ensemble.clone(), r.manifold.clone(), r.n);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    for (e, m, n) in keys {
        let vals: Vec<f64> = records
            .iter()
            .filter(|r| r.is_ok() && r.ensemble == e && r.manifold == m && r.n == n)
            .map(|r| r.w2)
            .collect();
        let k = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / k;
        let se = if vals.len() > 1 {
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
        } else {
            f64::NAN
        };
        summary.points.push(SummaryPoint {
            ensemble: e,
            manifold: m,
            n,
            replicas: vals.len(),
            mean_w2: mean,
            stderr_w2: se,
        });
    }
    for (e, m) in summary.groups() {
        let pts: Vec<RatePoint> = summary
            .points_of(&e, &m)
            .iter()
            .map(|p| RatePoint {
                n: p.n as f64,
                mean: p.mean_w2,
                stderr: p.stderr_w2,
            })
            .collect();
        for model in [RateModel::PurePower, RateModel::PowerWithSqrtLog] {
            if let Ok(fit) = fit_rate(&pts, model) {
                summary.fits.push(SummaryFit {
                    ensemble: e.clone(),
                    manifold: m.clone(),
                    fit,
                });
            }
        }
    }
    summary
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    for p in &summary.points {
        w.write_record([
            p.ensemble.as_str(),
            &p.manifold,
            "point",
            &p.n.to_string(),
            &p.replicas.to_string(),
            &fmt17(p.mean_w2),
            &fmt17(p.stderr_w2),
            "",
            "",
            "",
            "",
        ])
        .map_err(csv_err)?;
    }
    for f in &summary.fits {
        w.write_record([
            f.ensemble.as_str(),
            &f.manifold,
            "fit",
            "",
            "",
            "",
            "",
            f.fit.model.label(),
            &fmt17(f.fit.slope),
            &fmt17(f.fit.intercept),
            &fmt17(f.fit.residual_sse),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?)))
}

/// Reads a summary CSV; malformed rows are reported by number.
pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path)?;
    parse_summary(&text)
}

pub fn parse_summary(text: &str) -> Result<Summary> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| row_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != SUMMARY_HEADER {
        return Err(row_err(1, "header does not match the summary schema".into()));
    }
    let mut summary = Summary::default();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| row_err(row, e.to_string()))?;
        let get = |c: usize| rec.get(c).unwrap_or("");
        let num = |c: usize| -> Result<f64> {
            get(c)
                .parse::<f64>()
                .map_err(|_| row_err(row, format!("column {} is not a number: {:?}", SUMMARY_HEADER[c], get(c))))
        };
        let int = |c: usize| -> Result<usize> {
            get(c)
                .parse::<usize>()
                .map_err(|_| row_err(row, format!("column {} is not an integer: {:?}", SUMMARY_HEADER[c], get(c))))
        };
        match get(2) {
            "point" => summary.points.push(SummaryPoint {
                ensemble: get(0).to_string(),
                manifold: get(1).to_string(),
                n: int(3)?,
                replicas: int(4)?,
                mean_w2: num(5)?,
                stderr_w2: num(6)?,
            }),
            "fit" => {
                let model = get(7).parse().map_err(|_| row_err(row, format!("unknown model {:?}", get(7))))?;
                summary.fits.push(SummaryFit {
                    ensemble: get(0).to_string(),
                    manifold: get(1).to_string(),
                    fit: RateFit {
                        slope: num(8)?,
                        intercept: num(9)?,
                        model,
                        residual_sse: num(10)?,
                        slope_stderr: f64::NAN,
                        point_stderr: Vec::new(),
                    },
                });
            }
            other => return Err(row_err(row, format!("unknown row kind {other:?}"))),
        }
    }
    Ok(summary)
}

fn row_err(row: usize, message: String) -> Error {
    Error::Parse {
        location: format!("row {row}"),
        message,
    }
}

/// Reads a data CSV written by [`run_sweep`].
pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = fs::read_to_string(path)?;
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| row_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != DATA_HEADER {
        return Err(row_err(1, "header does not match the data schema".into()));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| row_err(row, e.to_string()))?;
        let get = |c: usize| rec.get(c).unwrap_or("");
        let bad = |c: usize| row_err(row, format!("column {} is malformed: {:?}", DATA_HEADER[c], get(c)));
        let f = |c: usize| -> Result<f64> {
            if get(c).is_empty() {
                Ok(f64::NAN)
            } else {
                get(c).parse().map_err(|_| bad(c))
            }
        };
        let opt = |c: usize| -> Result<Option<f64>> {
            if get(c).is_empty() {
                Ok(None)
            } else {
                get(c).parse().map(Some).map_err(|_| bad(c))
            }
        };
        out.push(SweepRecord {
            ensemble: get(0).to_string(),
            manifold: get(1).to_string(),
            n: get(2).parse().map_err(|_| bad(2))?,
            replica: get(3).parse().map_err(|_| bad(3))?,
            seed: get(4).parse().map_err(|_| bad(4))?,
            w2: f(5)?,
            bracket_low: f(6)?,
            bracket_high: f(7)?,
            m: get(8).parse().map_err(|_| bad(8))?,
            runtime_ms: get(9).parse().map_err(|_| bad(9))?,
            solver: get(10).parse().map_err(|_| bad(10))?,
            bound: opt(11)?,
            t_star: opt(12)?,
            error: (!get(13).is_empty()).then(|| get(13).to_string()),
        });
    }
    Ok(out)
}

pub fn version_string() -> String {
    format!("ppw {} (csv schema {CSV_SCHEMA_VERSION})", env!("CARGO_PKG_VERSION"))
}

/// Files written by a sweep.
#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub bias: Vec<BiasCheck>,
    pub summary: Summary,
    pub data_csv: PathBuf,
    pub summary_csv: PathBuf,
}

/// Runs the configured sweep into `cfg.out`: `data.csv` streamed block by
/// block, `summary.csv`, `bias_check.csv`, the echoed `config.txt` and
/// `VERSION`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join("config.txt"), cfg.to_text())?;
    fs::write(cfg.out.join("VERSION"), version_string() + "\n")?;
    let data_csv = cfg.out.join("data.csv");
    let mut w = csv_writer(&data_csv)?;
    w.write_record(DATA_HEADER).map_err(csv_err)?;
    let (plan, failed) = SweepPlan::from_config(cfg);
    for r in &failed {
        w.write_record(r.fields()).map_err(csv_err)?;
    }
    w.flush()?;
    let (mut records, bias) = run_plan(&plan, |block| {
        for r in block {
            w.write_record(r.fields()).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    })?;
    drop(w);
    records.splice(0..0, failed);
    let summary = summarize(&records);
    let summary_csv = cfg.out.join("summary.csv");
    write_summary(&summary_csv, &summary)?;
    let mut bw = csv_writer(&cfg.out.join("bias_check.csv"))?;
    bw.write_record(["ensemble", "n", "replica", "w2", "w2_4m", "relative_change"])
        .map_err(csv_err)?;
    for b in &bias {
        bw.write_record([
            b.ensemble.clone(),
            b.n.to_string(),
            b.replica.to_string(),
            fmt17(b.w2),
            fmt17(b.w2_4m),
            fmt17((b.w2_4m - b.w2) / b.w2),
        ])
        .map_err(csv_err)?;
    }
    bw.flush()?;
    Ok(SweepOutput {
        records,
        bias,
        summary,
        data_csv,
        summary_csv,
    })
}

/// Writes `rows` as a data CSV (used by the acceptance harness).
pub fn write_records(path: &Path, rows: &[SweepRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(DATA_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.fields()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ManifoldChoice;

    fn tiny(out: PathBuf) -> ExperimentConfig {
        ExperimentConfig {
            manifold: ManifoldChoice::Sphere,
            ensembles: vec![EnsembleKind::Harmonic],
            n_schedule: vec![4],
            replicas: 1,
            seed: 5,
            m_mult: 8,
            out,
            bias_check: 0.0,
            ..ExperimentConfig::default()
        }
    }

    fn tmp(name: &str) -> PathBuf {
        let p = std::env::temp_dir().join(format!("ppw-sweep-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&p);
        p
    }

    #[test]
    fn one_row_and_replay() {
        let dir = tmp("one");
        let out = run_sweep(&tiny(dir.clone())).unwrap();
        let text = fs::read_to_string(&out.data_csv).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(&DATA_HEADER.join(",")));
        assert!(fs::read_to_string(dir.join("config.txt")).unwrap().contains("m_mult = 8"));
        assert!(fs::read_to_string(dir.join("VERSION")).unwrap().starts_with("ppw "));
        let again = run_sweep(&tiny(tmp("two"))).unwrap();
        assert_eq!(out.records[0].data_fields(), again.records[0].data_fields());
        let back = read_records(&out.data_csv).unwrap();
        assert_eq!(back[0].data_fields(), out.records[0].data_fields());
        assert_eq!(back[0].w2.to_bits(), out.records[0].w2.to_bits());
    }

    #[test]
    fn bad_sizes_become_error_rows() {
        let mut cfg = tiny(tmp("bad"));
        cfg.n_schedule = vec![5, 9];
        cfg.bias_check = 1.0;
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.records.len(), 2);
        assert!(out.records[0].error.as_deref().unwrap().contains("(L+1)"));
        assert!(out.records[1].is_ok());
        assert_eq!(out.bias.len(), 1);
        assert!(out.bias[0].w2_4m > 0.0);
    }

    #[test]
    fn summary_round_trip() {
        let recs: Vec<SweepRecord> = [16usize, 64, 256, 1024]
            .iter()
            .flat_map(|&n| {
                (0..3).map(move |r| SweepRecord {
                    ensemble: "iid".into(),
                    manifold: "sphere".into(),
                    n,
                    replica: r,
                    seed: 0,
                    w2: (n as f64).powf(-0.5) * (1.0 + 0.01 * r as f64),
                    bracket_low: 0.0,
                    bracket_high: 1.0,
                    m: n,
                    runtime_ms: 0,
                    solver: SolverKind::Exact,
                    bound: None,
                    t_star: None,
                    error: None,
                })
            })
            .collect();
        let s = summarize(&recs);
        assert_eq!(s.points.len(), 4);
        assert_eq!(s.fits.len(), 2);
        let fit = s.fit_of("iid", "sphere", RateModel::PurePower).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-9);
        let dir = tmp("summary");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("summary.csv");
        write_summary(&path, &s).unwrap();
        let back = read_summary(&path).unwrap();
        assert_eq!(back.points, s.points);
        assert_eq!(back.fits[0].fit.slope.to_bits(), s.fits[0].fit.slope.to_bits());
        let bad = "ensemble,manifold,kind,n,replicas,mean_w2,stderr_w2,model,slope,intercept,sse\niid,sphere,point,x,1,1,1,,,,\n";
        let err = parse_summary(bad).unwrap_err().to_string();
        assert!(err.contains("row 2"), "{err}");
    }
}
