//! A small seeded sweep from a config file, written with its summary,
//! report and plots.
//!
//!     cargo run --release --example rate_sweep -- config/smoke.txt /tmp/ppw-sweep

use std::path::PathBuf;

use ppw::config::ExperimentConfig;
use ppw::report::emit_outputs;
use ppw::sweep::run_sweep;

fn main() -> ppw::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = PathBuf::from(args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/config/smoke.txt").into()));
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(out) = args.next() {
        cfg.out = out.into();
    }
    let out = run_sweep(&cfg)?;
    let emitted = emit_outputs(&out.summary_csv, &cfg.out)?;
    print!("{}", emitted.report.text);
    println!("{} rows in {}", out.records.len(), out.data_csv.display());
    Ok(())
}
