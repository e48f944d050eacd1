//! Command-line front end; `src/bin/ppw.rs` only calls [`main`].

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::acceptance::{run_acceptance, AcceptanceConfig};
use crate::config::{build_spec, EnsembleKind, ExperimentConfig, ManifoldChoice};
use crate::error::{invalid, Error, Result};
use crate::kernels::{EnsembleSpec, GafIndexing};
use crate::lattice::{annulus_difference_count, count_ball, gauss_circle_check, LatticeNorm};
use crate::manifold::{Manifold, Point};
use crate::report::{emit_outputs, EXIT_NO_DATA};
use crate::samplers::{sample, PointSet};
use crate::statistics::{optimize_smoothing_time, variance_exact, variance_mc, RateModel, SmoothingBoundConfig};
use crate::sweep::{read_records, run_sweep, summarize, write_summary};
use crate::transport::{w2_to_volume, OtOptions, SolverKind};

/// Exit code for a failed acceptance criterion.
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverArg {
    Exact,
    Entropic,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> SolverKind {
        match s {
            SolverArg::Exact => SolverKind::Exact,
            SolverArg::Entropic => SolverKind::Entropic,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ppw", version, about = "Wasserstein convergence of point processes on the sphere and flat tori")]
pub struct Cli {
    /// Experiment config (key = value with [experiment] and [flags] sections).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides PPW_SEED and the config.
    #[arg(long, global = true, env = "PPW_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub solver: Option<SolverArg>,
    /// Target size M as a multiple of N.
    #[arg(long = "m-mult", global = true)]
    pub m_mult: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one configuration and print it as CSV.
    Sample(EnsembleArgs),
    /// W2 distance from a configuration to the volume measure.
    W2(PointsArgs),
    /// Run the configured sweep, then write the report and plots.
    Sweep,
    /// Exact and Monte Carlo variance of a linear statistic.
    Variance(VarianceArgs),
    /// Optimized smoothing upper bound for one configuration.
    Bound(PointsArgs),
    /// Lattice-point counts in a norm ball.
    Lattice(LatticeArgs),
    /// Fit both rate models to a data CSV.
    Fit {
        data: PathBuf,
    },
    /// Report and SVG plots from a summary CSV.
    Plot {
        summary: PathBuf,
    },
    /// Run the acceptance suite.
    Accept {
        /// Comma-separated criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    /// harmonic | spherical | gaf | jittered | iid
    #[arg(long, default_value = "harmonic")]
    pub ensemble: String,
    /// sphere | torus2 | torus3 | hexagonal
    #[arg(long, default_value = "sphere")]
    pub manifold: String,
    #[arg(long)]
    pub n: usize,
    /// Frequency norm for torus harmonic ensembles (`inf` for the max norm).
    #[arg(long, default_value = "2")]
    pub p: String,
    /// GAF sum starting at degree one.
    #[arg(long)]
    pub gaf_from_one: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PointsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Read the configuration from a CSV written by `sample` instead of drawing one.
    #[arg(long)]
    pub points: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TestFn {
    Y10,
    Y20,
}

#[derive(Debug, Clone, Args)]
pub struct VarianceArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value = "y10")]
    pub function: TestFn,
    #[arg(long, default_value_t = 2000)]
    pub replicas: usize,
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    #[arg(long, default_value = "2")]
    pub p: String,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Shift k for the annulus count, e.g. `1,0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub shift: Vec<i64>,
}

/// Effective settings after merging config file, environment and flags.
#[derive(Clone, Debug)]
pub struct Settings {
    pub experiment: ExperimentConfig,
    pub threads: Option<usize>,
}

impl Cli {
    pub fn settings(&self) -> Result<Settings> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(s) = self.solver {
            cfg.solver = s.into();
        }
        if let Some(m) = self.m_mult {
            cfg.m_mult = m;
        }
        Ok(Settings {
            experiment: cfg,
            threads: self.threads,
        })
    }
}

fn parse_p(s: &str) -> Result<f64> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s.parse().map_err(|_| invalid(format!("p must be a number or inf, got {s:?}"))),
    }
}

fn spec_of(a: &EnsembleArgs) -> Result<EnsembleSpec> {
    let kind = EnsembleKind::from_key(&a.ensemble).ok_or_else(|| invalid(format!("unknown ensemble {:?}", a.ensemble)))?;
    let m = ManifoldChoice::from_key(&a.manifold).ok_or_else(|| invalid(format!("unknown manifold {:?}", a.manifold)))?;
    let gaf = if a.gaf_from_one {
        GafIndexing::FromOne
    } else {
        GafIndexing::FromZero
    };
    build_spec(kind, &m.manifold(), a.n, parse_p(&a.p)?, gaf)
}

/// Points as CSV: three columns, Cartesian on the sphere and fractional
/// coordinates on tori.
pub fn write_points(w: &mut impl std::io::Write, ps: &PointSet) -> Result<()> {
    writeln!(w, "c0,c1,c2")?;
    for p in &ps.points {
        writeln!(w, "{:.17e},{:.17e},{:.17e}", p.0[0], p.0[1], p.0[2])?;
    }
    Ok(())
}

pub fn read_points(path: &Path, manifold: Manifold) -> Result<PointSet> {
    let text = fs::read_to_string(path)?;
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let mut pts = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            location: format!("row {row}"),
            message: e.to_string(),
        })?;
        let mut c = [0.0; 3];
        for (j, v) in c.iter_mut().enumerate() {
            *v = rec.get(j).and_then(|s| s.trim().parse().ok()).ok_or_else(|| Error::Parse {
                location: format!("row {row}"),
                message: format!("column {j} is not a number"),
            })?;
        }
        pts.push(Point(c));
    }
    PointSet::from_points(manifold, pts)
}

fn points_of(a: &PointsArgs, seed: u64) -> Result<PointSet> {
    match &a.points {
        Some(path) => {
            let m = ManifoldChoice::from_key(&a.ensemble.manifold)
                .ok_or_else(|| invalid(format!("unknown manifold {:?}", a.ensemble.manifold)))?;
            read_points(path, m.manifold())
        }
        None => sample(&spec_of(&a.ensemble)?, seed),
    }
}

fn y10(x: &Point) -> f64 {
    3f64.sqrt() * x.0[2]
}

fn y20(x: &Point) -> f64 {
    5f64.sqrt() * (3.0 * x.0[2] * x.0[2] - 1.0) / 2.0
}

/// Runs one parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let settings = cli.settings()?;
    if let Some(k) = settings.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let cfg = &settings.experiment;
    let ot = OtOptions {
        solver: cfg.solver,
        ..OtOptions::default()
    };
    let mut stdout = std::io::stdout().lock();
    match &cli.command {
        Command::Sample(a) => {
            let ps = sample(&spec_of(a)?, cfg.seed)?;
            match &cli.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    let mut f = std::io::BufWriter::new(fs::File::create(dir.join("points.csv"))?);
                    write_points(&mut f, &ps)?;
                    f.flush()?;
                }
                None => write_points(&mut stdout, &ps)?,
            }
            for w in &ps.meta.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::W2(a) => {
            let ps = points_of(a, cfg.seed)?;
            let est = w2_to_volume(&ps, cfg.m_mult * ps.len(), &ot)?;
            writeln!(
                stdout,
                "w2 {:.9} bracket [{:.9}, {:.9}] m {} q {:.6e} solver {} gap {:.3e}",
                est.value,
                est.bracket_low,
                est.bracket_high,
                est.m,
                est.q,
                est.solver.label(),
                est.duality_gap
            )?;
            for w in &est.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Sweep => {
            let out = run_sweep(cfg)?;
            let emitted = emit_outputs(&out.summary_csv, &cfg.out)?;
            write!(stdout, "{}", emitted.report.text)?;
            let failed = out.records.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                eprintln!("{failed} rows carry errors; see {}", out.data_csv.display());
            }
        }
        Command::Variance(a) => {
            let spec = spec_of(&a.ensemble)?;
            let f: fn(&Point) -> f64 = match a.function {
                TestFn::Y10 => y10,
                TestFn::Y20 => y20,
            };
            if spec.manifold() != Manifold::Sphere2 {
                return Err(invalid("the test functions Y10 and Y20 live on the sphere"));
            }
            match variance_exact(&spec, &f, a.grid) {
                Ok(v) => writeln!(stdout, "exact {:.9} (grid {}, refinement delta {:.3e})", v.value, v.grid, v.refinement_delta)?,
                Err(Error::Unsupported(m)) => writeln!(stdout, "exact unavailable: {m}")?,
                Err(e) => return Err(e),
            }
            let mc = variance_mc(&spec, &f, a.replicas, cfg.seed)?;
            writeln!(stdout, "mc {:.9} ± {:.9} ({} replicas)", mc.variance, mc.stderr, mc.replicas)?;
        }
        Command::Bound(a) => {
            let ps = points_of(a, cfg.seed)?;
            let opt = optimize_smoothing_time(
                &ps,
                &SmoothingBoundConfig {
                    k_m: cfg.k_m,
                    ..SmoothingBoundConfig::default()
                },
            )?;
            writeln!(stdout, "bound {:.9} t* {:.6e} l_max {}", opt.bound, opt.t, opt.l_max)?;
        }
        Command::Lattice(a) => {
            let norm = LatticeNorm::p(parse_p(&a.p)?)?;
            writeln!(stdout, "count {}", count_ball(&norm, a.radius, a.dim)?)?;
            if !a.shift.is_empty() {
                let mut k = [0i64; 3];
                if a.shift.len() != a.dim {
                    return Err(invalid(format!("shift needs {} components", a.dim)));
                }
                k[..a.dim].copy_from_slice(&a.shift);
                writeln!(stdout, "annulus {}", annulus_difference_count(&norm, &k, a.radius, a.dim)?)?;
            }
            if a.dim == 2 && parse_p(&a.p)? == 2.0 {
                let g = gauss_circle_check(a.radius)?;
                writeln!(stdout, "gauss error {:.6} bound {:.6} holds {}", g.error, g.bound, g.holds())?;
            }
        }
        Command::Fit { data } => {
            let records = read_records(data)?;
            let summary = summarize(&records);
            if summary.points.is_empty() {
                writeln!(stdout, "no data")?;
                return Ok(EXIT_NO_DATA);
            }
            for (e, m) in summary.groups() {
                for model in [RateModel::PurePower, RateModel::PowerWithSqrtLog] {
                    match summary.fit_of(&e, &m, model) {
                        Some(f) => writeln!(
                            stdout,
                            "{e} {m} {} slope {:.6} ± {:.6} sse {:.6e}",
                            model.label(),
                            f.slope,
                            f.slope_stderr,
                            f.residual_sse
                        )?,
                        None => writeln!(stdout, "{e} {m} {}: insufficient N values", model.label())?,
                    }
                }
            }
            if let Some(dir) = &cli.out {
                fs::create_dir_all(dir)?;
                write_summary(&dir.join("summary.csv"), &summary)?;
            }
        }
        Command::Plot { summary } => {
            let dir = match &cli.out {
                Some(d) => d.clone(),
                None => summary.parent().map(Path::to_path_buf).unwrap_or_default(),
            };
            let emitted = emit_outputs(summary, &dir)?;
            write!(stdout, "{}", emitted.report.text)?;
            if emitted.report.is_empty() {
                return Ok(EXIT_NO_DATA);
            }
        }
        Command::Accept { only } => {
            let acfg = AcceptanceConfig {
                seed: cfg.seed,
                m_mult: cfg.m_mult,
                solver: cfg.solver,
                out: cli.out.clone(),
                only: only.clone(),
            };
            let results = run_acceptance(&acfg, |r| {
                println!("{}", r.line());
            })?;
            if results.iter().any(|r| !r.passed) {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
    }
    Ok(0)
}

/// Parses `std::env::args`, runs, and maps errors to exit code 1.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_flag_beats_env() {
        // clap reads PPW_SEED only when --seed is absent
        let cli = Cli::try_parse_from(["ppw", "--seed", "9", "lattice", "--radius", "2"]).unwrap();
        assert_eq!(cli.settings().unwrap().experiment.seed, 9);
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["ppw", "sweep", "--m-mult", "8", "--solver", "entropic"]).unwrap();
        let s = cli.settings().unwrap();
        assert_eq!(s.experiment.m_mult, 8);
        assert_eq!(s.experiment.solver, SolverKind::Entropic);
    }
}
