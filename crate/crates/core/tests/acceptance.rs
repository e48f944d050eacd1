//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. `PPW_ACCEPT_ONLY=8,10` restricts the run; `PPW_ACCEPT_OUT=dir`
//! keeps the sweep CSVs, report and plots.

use std::process::ExitCode;
use std::time::Instant;

use ppw::acceptance::{run_acceptance, AcceptanceConfig};

fn main() -> ExitCode {
    let mut cfg = AcceptanceConfig::default();
    if let Ok(list) = std::env::var("PPW_ACCEPT_ONLY") {
        cfg.only = list.split(',').filter_map(|s| s.trim().parse().ok()).collect();
    }
    if let Ok(dir) = std::env::var("PPW_ACCEPT_OUT") {
        cfg.out = Some(dir.into());
    }
    let start = Instant::now();
    let results = match run_acceptance(&cfg, |r| println!("{}", r.line())) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.0} s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
