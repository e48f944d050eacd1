//! Plain-text report and SVG log-log plots built from a summary CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::statistics::{RateFit, RateModel};
use crate::sweep::{read_summary, Summary};

/// Process exit code when the summary holds no data rows.
pub const EXIT_NO_DATA: i32 = 3;

/// Slope windows of the rate checks, keyed by (ensemble, manifold) labels.
pub fn slope_window(ensemble: &str, manifold: &str) -> Option<(f64, f64)> {
    Some(match (ensemble, manifold) {
        ("harmonic", "sphere2") | ("spherical", "sphere2") => (-0.58, -0.42),
        ("harmonic", "torus2") | ("harmonic_pinf", "torus2") => (-0.58, -0.42),
        ("harmonic", "torus2-lattice") => (-0.60, -0.40),
        ("gaf", "sphere2") => (-0.60, -0.40),
        ("jittered", "torus3") => (-0.40, -0.27),
        _ => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// No check is defined for this group.
    Unchecked,
    /// Fewer distinct N than a fit needs.
    Insufficient,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Unchecked => "-",
            Verdict::Insufficient => "insufficient N values",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroupReport {
    pub ensemble: String,
    pub manifold: String,
    pub n_values: usize,
    pub pure: Option<RateFit>,
    pub log: Option<RateFit>,
    pub verdict: Verdict,
    pub check: String,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub groups: Vec<GroupReport>,
    pub text: String,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

fn verdict_of(ensemble: &str, manifold: &str, pure: Option<&RateFit>, log: Option<&RateFit>) -> (Verdict, String) {
    let Some(pure) = pure else {
        return (Verdict::Insufficient, String::new());
    };
    if ensemble == "iid" {
        // i.i.d. points carry the log factor: its model should fit better.
        return match log {
            Some(log) => {
                let ok = log.residual_sse < pure.residual_sse;
                let v = if ok { Verdict::Pass } else { Verdict::Fail };
                (v, "log-corrected SSE < pure-power SSE".to_string())
            }
            None => (Verdict::Insufficient, String::new()),
        };
    }
    match slope_window(ensemble, manifold) {
        Some((lo, hi)) => {
            let ok = pure.slope >= lo && pure.slope <= hi;
            let v = if ok { Verdict::Pass } else { Verdict::Fail };
            (v, format!("slope in [{lo:.2}, {hi:.2}]"))
        }
        None => (Verdict::Unchecked, String::new()),
    }
}

pub fn build_report(summary: &Summary) -> Report {
    let mut groups = Vec::new();
    for (e, m) in summary.groups() {
        let mut ns: Vec<usize> = summary.points_of(&e, &m).iter().map(|p| p.n).collect();
        ns.sort_unstable();
        ns.dedup();
        let pure = summary.fit_of(&e, &m, RateModel::PurePower).cloned();
        let log = summary.fit_of(&e, &m, RateModel::PowerWithSqrtLog).cloned();
        let (verdict, check) = verdict_of(&e, &m, pure.as_ref(), log.as_ref());
        groups.push(GroupReport {
            ensemble: e,
            manifold: m,
            n_values: ns.len(),
            pure,
            log,
            verdict,
            check,
        });
    }
    let text = render_text(&groups);
    Report { groups, text }
}

fn render_text(groups: &[GroupReport]) -> String {
    let mut s = String::new();
    if groups.is_empty() {
        s.push_str("no data\n");
        return s;
    }
    for g in groups {
        let _ = writeln!(s, "{} on {} ({} N values)", g.ensemble, g.manifold, g.n_values);
        for fit in [&g.pure, &g.log].into_iter().flatten() {
            let _ = writeln!(
                s,
                "  {:<20} slope {:+.6}  intercept {:+.6}  sse {:.6e}",
                fit.model.label(),
                fit.slope,
                fit.intercept,
                fit.residual_sse
            );
        }
        if g.check.is_empty() {
            let _ = writeln!(s, "  verdict: {}", g.verdict.label());
        } else {
            let _ = writeln!(s, "  verdict: {} ({})", g.verdict.label(), g.check);
        }
    }
    let fails = groups.iter().filter(|g| g.verdict == Verdict::Fail).count();
    let passes = groups.iter().filter(|g| g.verdict == Verdict::Pass).count();
    let _ = writeln!(s, "checks: {passes} passed, {fails} failed");
    s
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;

/// Log-log scatter of per-N means with ±1 SE bars and, when fitted, both
/// model curves.
pub fn render_svg(summary: &Summary, ensemble: &str, manifold: &str) -> String {
    let pts = summary.points_of(ensemble, manifold);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{ensemble} on {manifold}: mean W2 vs N</text>"#,
        W / 2.0
    );
    if pts.is_empty() {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif">no data</text>"#, W / 2.0, H / 2.0);
        s.push_str("</svg>\n");
        return s;
    }
    let lx: Vec<f64> = pts.iter().map(|p| (p.n as f64).log10()).collect();
    let lo_y = |p: &&crate::sweep::SummaryPoint| {
        let se = if p.stderr_w2.is_finite() { p.stderr_w2 } else { 0.0 };
        (p.mean_w2 - se).max(p.mean_w2 * 0.5).log10()
    };
    let hi_y = |p: &&crate::sweep::SummaryPoint| {
        let se = if p.stderr_w2.is_finite() { p.stderr_w2 } else { 0.0 };
        (p.mean_w2 + se).log10()
    };
    let (mut x0, mut x1) = (lx.iter().cloned().fold(f64::INFINITY, f64::min), lx.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (mut y0, mut y1) = (
        pts.iter().map(lo_y).fold(f64::INFINITY, f64::min),
        pts.iter().map(hi_y).fold(f64::NEG_INFINITY, f64::max),
    );
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let mx = 0.05 * (x1 - x0);
    let my = 0.05 * (y1 - y0);
    let (x0, x1, y0, y1) = (x0 - mx, x1 + mx, y0 - my, y1 + my);
    let sx = |v: f64| PAD + (v - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - (v - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for d in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = sx(d as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">1e{d}</text>"#,
            H - PAD + 18.0
        );
    }
    for d in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = sy(d as f64);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-family="sans-serif" font-size="12">1e{d}</text>"#,
            PAD - 6.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">N</text>"#,
        W / 2.0,
        H - 16.0
    );

    let curve = |fit: &RateFit, style: &str, s: &mut String| {
        let mut path = String::new();
        for i in 0..=64 {
            let v = x0 + (x1 - x0) * i as f64 / 64.0;
            let n = 10f64.powf(v);
            let mut ly = fit.intercept / std::f64::consts::LN_10 + fit.slope * v;
            if fit.model == RateModel::PowerWithSqrtLog {
                if n <= 1.0 {
                    continue;
                }
                ly += 0.5 * n.ln().log10();
            }
            let cmd = if path.is_empty() { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.2},{:.2} ", sx(v), sy(ly).clamp(PAD, H - PAD));
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" {style}/>"#, path.trim_end());
    };
    if let Some(f) = summary.fit_of(ensemble, manifold, RateModel::PurePower) {
        curve(f, r#"stroke="steelblue" stroke-width="1.5""#, &mut s);
    }
    if let Some(f) = summary.fit_of(ensemble, manifold, RateModel::PowerWithSqrtLog) {
        curve(f, r#"stroke="darkorange" stroke-width="1.5" stroke-dasharray="6,4""#, &mut s);
    }
    for (p, &x) in pts.iter().zip(&lx) {
        let cx = sx(x);
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
            sy(lo_y(p)),
            sy(hi_y(p))
        );
        let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{:.2}" r="3.5" fill="black"/>"#, sy(p.mean_w2.log10()));
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Clone, Debug)]
pub struct Emitted {
    pub report: Report,
    pub report_path: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Reads `summary_csv` and writes `report.txt` plus one SVG per
/// (ensemble, manifold) group into `out_dir`.
pub fn emit_outputs(summary_csv: &Path, out_dir: &Path) -> Result<Emitted> {
    let summary = read_summary(summary_csv)?;
    fs::create_dir_all(out_dir)?;
    let report = build_report(&summary);
    let report_path = out_dir.join("report.txt");
    fs::write(&report_path, &report.text)?;
    let mut plots = Vec::new();
    for (e, m) in summary.groups() {
        let path = out_dir.join(format!("{e}_{m}.svg"));
        fs::write(&path, render_svg(&summary, &e, &m))?;
        plots.push(path);
    }
    Ok(Emitted {
        report,
        report_path,
        plots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::parse_summary;

    const HEADER: &str = "ensemble,manifold,kind,n,replicas,mean_w2,stderr_w2,model,slope,intercept,sse\n";

    #[test]
    fn empty_summary_is_no_data() {
        let s = parse_summary(HEADER).unwrap();
        let r = build_report(&s);
        assert!(r.is_empty());
        assert_eq!(r.text, "no data\n");
    }

    #[test]
    fn single_n_has_no_fit_line() {
        let s = parse_summary(&format!("{HEADER}gaf,sphere2,point,16,3,0.2,0.01,,,,\n")).unwrap();
        let r = build_report(&s);
        assert_eq!(r.groups[0].verdict, Verdict::Insufficient);
        assert!(r.text.contains("insufficient N values"));
        let svg = render_svg(&s, "gaf", "sphere2");
        assert!(svg.contains("<circle"));
        assert!(!svg.contains("<path"));
    }
}
