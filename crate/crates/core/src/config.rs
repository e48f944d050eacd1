//! Experiment configuration: flat `key = value` text with `[section]`
//! headers. The accepted keys are listed in `config/schema.txt`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kernels::{EnsembleSpec, GafIndexing, HarmonicSpec, JitteredSpec};
use crate::lattice::{ball_points, LatticeNorm};
use crate::manifold::{Manifold, Torus};
use crate::transport::SolverKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldChoice {
    Sphere,
    Torus2,
    Torus3,
    Hexagonal,
}

impl ManifoldChoice {
    pub fn manifold(&self) -> Manifold {
        match self {
            ManifoldChoice::Sphere => Manifold::Sphere2,
            ManifoldChoice::Torus2 => Manifold::Torus(Torus::standard(2).expect("d = 2")),
            ManifoldChoice::Torus3 => Manifold::Torus(Torus::standard(3).expect("d = 3")),
            ManifoldChoice::Hexagonal => Manifold::Torus(Torus::hexagonal()),
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            ManifoldChoice::Sphere => "sphere",
            ManifoldChoice::Torus2 => "torus2",
            ManifoldChoice::Torus3 => "torus3",
            ManifoldChoice::Hexagonal => "hexagonal",
        }
    }

    pub fn from_key(s: &str) -> Option<ManifoldChoice> {
        Some(match s {
            "sphere" => ManifoldChoice::Sphere,
            "torus2" => ManifoldChoice::Torus2,
            "torus3" => ManifoldChoice::Torus3,
            "hexagonal" => ManifoldChoice::Hexagonal,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleKind {
    Harmonic,
    Spherical,
    Gaf,
    Jittered,
    Iid,
}

impl EnsembleKind {
    pub fn key(&self) -> &'static str {
        match self {
            EnsembleKind::Harmonic => "harmonic",
            EnsembleKind::Spherical => "spherical",
            EnsembleKind::Gaf => "gaf",
            EnsembleKind::Jittered => "jittered",
            EnsembleKind::Iid => "iid",
        }
    }

    pub fn from_key(s: &str) -> Option<EnsembleKind> {
        Some(match s {
            "harmonic" => EnsembleKind::Harmonic,
            "spherical" => EnsembleKind::Spherical,
            "gaf" => EnsembleKind::Gaf,
            "jittered" => EnsembleKind::Jittered,
            "iid" => EnsembleKind::Iid,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub manifold: ManifoldChoice,
    pub ensembles: Vec<EnsembleKind>,
    pub n_schedule: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub m_mult: usize,
    pub out: PathBuf,
    pub gaf_indexing: GafIndexing,
    /// p of the frequency norm for torus harmonic ensembles.
    pub norm_p: f64,
    pub k_m: f64,
    pub solver: SolverKind,
    /// Also evaluate the optimized smoothing bound per replica.
    pub bound: bool,
    /// Fraction of replicas re-solved against a 4M target.
    pub bias_check: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            manifold: ManifoldChoice::Sphere,
            ensembles: vec![EnsembleKind::Harmonic],
            n_schedule: vec![16, 36, 64, 144],
            replicas: 20,
            seed: 1,
            m_mult: 64,
            out: PathBuf::from("out"),
            gaf_indexing: GafIndexing::FromZero,
            norm_p: 2.0,
            k_m: 0.0,
            solver: SolverKind::Exact,
            bound: false,
            bias_check: 0.1,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("line {line}"),
        message: message.into(),
    }
}

fn list<T>(line: usize, v: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| f(s).ok_or_else(|| parse_err(line, format!("bad list entry {s:?}"))))
        .collect()
}

fn value<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| parse_err(line, format!("bad value {v:?} for {key}")))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line, "unterminated section header"))?;
                section = name.trim().to_string();
                if !matches!(section.as_str(), "experiment" | "flags") {
                    return Err(parse_err(line, format!("unknown section [{section}]")));
                }
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| parse_err(line, "expected key = value"))?;
            let (k, v) = (k.trim(), v.trim());
            match (section.as_str(), k) {
                ("experiment", "manifold") => {
                    cfg.manifold =
                        ManifoldChoice::from_key(v).ok_or_else(|| parse_err(line, format!("unknown manifold {v:?}")))?
                }
                ("experiment", "ensembles") => cfg.ensembles = list(line, v, EnsembleKind::from_key)?,
                ("experiment", "n") => cfg.n_schedule = list(line, v, |s| s.parse().ok())?,
                ("experiment", "replicas") => cfg.replicas = value(line, k, v)?,
                ("experiment", "seed") => cfg.seed = value(line, k, v)?,
                ("experiment", "m_mult") => cfg.m_mult = value(line, k, v)?,
                ("experiment", "out") => cfg.out = PathBuf::from(v),
                ("flags", "gaf_indexing") => {
                    cfg.gaf_indexing = match v {
                        "from_zero" => GafIndexing::FromZero,
                        "from_one" => GafIndexing::FromOne,
                        _ => return Err(parse_err(line, format!("gaf_indexing must be from_zero or from_one, got {v:?}"))),
                    }
                }
                ("flags", "norm_p") => {
                    cfg.norm_p = if v == "inf" { f64::INFINITY } else { value(line, k, v)? }
                }
                ("flags", "k_m") => cfg.k_m = value(line, k, v)?,
                ("flags", "solver") => cfg.solver = v.parse().map_err(|_| parse_err(line, format!("unknown solver {v:?}")))?,
                ("flags", "bound") => cfg.bound = value(line, k, v)?,
                ("flags", "bias_check") => cfg.bias_check = value(line, k, v)?,
                ("", _) => return Err(parse_err(line, "key outside a section")),
                _ => return Err(parse_err(line, format!("unknown key {k:?} in [{section}]"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        ExperimentConfig::parse(&text).map_err(|e| match e {
            Error::Parse { location, message } => Error::Parse {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.ensembles.is_empty() {
            return bad("no ensembles".into());
        }
        if self.n_schedule.is_empty() || self.n_schedule.contains(&0) {
            return bad("N schedule must be nonempty and positive".into());
        }
        if self.replicas == 0 || self.m_mult == 0 {
            return bad("replicas and m_mult must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.bias_check) {
            return bad(format!("bias_check must lie in [0, 1], got {}", self.bias_check));
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back the same config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: Vec<String>| v.join(", ");
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "manifold = {}", self.manifold.key());
        let _ = writeln!(s, "ensembles = {}", join(self.ensembles.iter().map(|e| e.key().to_string()).collect()));
        let _ = writeln!(s, "n = {}", join(self.n_schedule.iter().map(|n| n.to_string()).collect()));
        let _ = writeln!(s, "replicas = {}", self.replicas);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "m_mult = {}", self.m_mult);
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "\n[flags]");
        let gaf = match self.gaf_indexing {
            GafIndexing::FromZero => "from_zero",
            GafIndexing::FromOne => "from_one",
        };
        let _ = writeln!(s, "gaf_indexing = {gaf}");
        let p = if self.norm_p.is_infinite() { "inf".to_string() } else { self.norm_p.to_string() };
        let _ = writeln!(s, "norm_p = {p}");
        let _ = writeln!(s, "k_m = {}", self.k_m);
        let _ = writeln!(s, "solver = {}", self.solver.label());
        let _ = writeln!(s, "bound = {}", self.bound);
        let _ = writeln!(s, "bias_check = {}", self.bias_check);
        s
    }

    /// The ensemble of size N, or an error naming why N is not attainable.
    pub fn spec(&self, kind: EnsembleKind, n: usize) -> Result<EnsembleSpec> {
        build_spec(kind, &self.manifold.manifold(), n, self.norm_p, self.gaf_indexing)
    }
}

/// Harmonic ensembles only exist at particular sizes: (L + 1)² on the
/// sphere, lattice-ball counts on tori.
pub fn build_spec(kind: EnsembleKind, m: &Manifold, n: usize, p: f64, gaf: GafIndexing) -> Result<EnsembleSpec> {
    let sphere_only = |what: &str| -> Result<()> {
        if *m != Manifold::Sphere2 {
            return Err(Error::Unsupported(format!("the {what} ensemble lives on the sphere")));
        }
        Ok(())
    };
    match kind {
        EnsembleKind::Harmonic => match m {
            Manifold::Sphere2 => {
                let l = (n as f64).sqrt().round() as usize;
                if l * l != n || l == 0 {
                    return Err(Error::InvalidInput(format!("harmonic N on the sphere must be (L+1)², got {n}")));
                }
                Ok(EnsembleSpec::Harmonic(HarmonicSpec::sphere(l - 1)))
            }
            Manifold::Torus(t) => {
                let level = torus_level_for(t, n, p)?;
                Ok(EnsembleSpec::Harmonic(HarmonicSpec::torus(m, level, p)?))
            }
        },
        EnsembleKind::Spherical => {
            sphere_only("spherical")?;
            Ok(EnsembleSpec::Spherical { n })
        }
        EnsembleKind::Gaf => {
            sphere_only("GAF")?;
            Ok(EnsembleSpec::GafZeros { n, indexing: gaf })
        }
        EnsembleKind::Jittered => Ok(EnsembleSpec::Jittered(JitteredSpec::new(m, n)?)),
        EnsembleKind::Iid => Ok(EnsembleSpec::Iid { manifold: *m, n }),
    }
}

/// Level L whose ball holds exactly N frequencies.
pub fn torus_level_for(t: &Torus, n: usize, p: f64) -> Result<f64> {
    torus_harmonic_sizes(t, p, n)?
        .into_iter()
        .find(|&(_, count)| count == n)
        .map(|(r, _)| r)
        .ok_or_else(|| Error::InvalidInput(format!("no frequency ball on this torus holds exactly {n} points")))
}

/// Sizes N attainable by torus harmonic ensembles, up to `max_n`.
pub fn torus_harmonic_sizes(t: &Torus, p: f64, max_n: usize) -> Result<Vec<(f64, usize)>> {
    let norm = LatticeNorm::for_torus(t, p)?;
    let mut radius = 1.0;
    loop {
        let pts = ball_points(&norm, radius, t.dim())?;
        if pts.len() > max_n {
            let mut norms: Vec<f64> = pts.iter().map(|k| norm.eval(k)).collect();
            norms.sort_by(f64::total_cmp);
            let mut out = Vec::new();
            let mut i = 0;
            while i < norms.len() {
                let r = norms[i];
                let mut j = i;
                while j < norms.len() && norms[j] <= r * (1.0 + 1e-12) + 1e-12 {
                    j += 1;
                }
                if j > max_n {
                    break;
                }
                out.push((r, j));
                i = j;
            }
            return Ok(out);
        }
        radius *= 1.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demo
[experiment]
manifold = torus2
ensembles = harmonic, iid
n = 29, 49
replicas = 3
seed = 9
m_mult = 16
out = results/demo

[flags]
norm_p = inf
bound = true
";

    #[test]
    fn parse_and_echo_round_trip() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.manifold, ManifoldChoice::Torus2);
        assert_eq!(cfg.ensembles, vec![EnsembleKind::Harmonic, EnsembleKind::Iid]);
        assert_eq!(cfg.n_schedule, vec![29, 49]);
        assert!(cfg.norm_p.is_infinite() && cfg.bound);
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_line() {
        let err = ExperimentConfig::parse("[experiment]\nreplicas = many\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(ExperimentConfig::parse("[nope]\n").is_err());
        assert!(ExperimentConfig::parse("replicas = 3\n").is_err());
        assert!(ExperimentConfig::parse("[experiment]\ncolour = red\n").is_err());
        assert!(ExperimentConfig::parse("[experiment]\nn = 0\n").is_err());
    }

    #[test]
    fn attainable_sizes() {
        let t = Torus::standard(2).unwrap();
        assert_eq!(torus_level_for(&t, 13, 2.0).unwrap(), 2.0);
        assert_eq!(torus_level_for(&t, 9, f64::INFINITY).unwrap(), 1.0);
        assert!(torus_level_for(&t, 10, 2.0).is_err());
        let sizes = torus_harmonic_sizes(&t, 2.0, 30).unwrap();
        assert_eq!(sizes.iter().map(|s| s.1).collect::<Vec<_>>(), vec![1, 5, 9, 13, 21, 25, 29]);
        let m = Manifold::Sphere2;
        assert!(build_spec(EnsembleKind::Harmonic, &m, 15, 2.0, GafIndexing::FromZero).is_err());
        assert_eq!(build_spec(EnsembleKind::Harmonic, &m, 16, 2.0, GafIndexing::FromZero).unwrap().n(), 16);
        let t2 = Manifold::Torus(t);
        assert!(build_spec(EnsembleKind::Gaf, &t2, 16, 2.0, GafIndexing::FromZero).is_err());
    }
}
