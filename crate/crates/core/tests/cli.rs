use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use ppw::config::ExperimentConfig;

fn ppw(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ppw"));
    cmd.args(args).env_remove("PPW_SEED");
    if let Some(s) = env_seed {
        cmd.env("PPW_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("ppw-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&p);
    fs::create_dir_all(&p).unwrap();
    p
}

fn manifest(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

#[test]
fn env_seed_is_overridden_by_flag() {
    let sample = ["sample", "--ensemble", "spherical", "--n", "6"];
    let by_env = ppw(&sample, Some("5"));
    let by_flag = ppw(&[&["--seed", "5"], &sample[..]].concat(), None);
    assert!(by_env.status.success());
    assert_eq!(by_env.stdout, by_flag.stdout);
    let both = ppw(&[&["--seed", "6"], &sample[..]].concat(), Some("5"));
    let six = ppw(&[&["--seed", "6"], &sample[..]].concat(), None);
    assert_eq!(both.stdout, six.stdout);
    assert_ne!(both.stdout, by_env.stdout);
}

#[test]
fn sample_then_w2_from_file() {
    let dir = scratch("w2");
    let out = ppw(
        &["--seed", "3", "--out", dir.to_str().unwrap(), "sample", "--ensemble", "harmonic", "--n", "9"],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let points = dir.join("points.csv");
    assert_eq!(fs::read_to_string(&points).unwrap().lines().count(), 10);
    let out = ppw(&["--m-mult", "16", "w2", "--n", "9", "--points", points.to_str().unwrap()], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("w2 "), "{text}");
    assert!(text.contains("m 144"), "{text}");
}

#[test]
fn lattice_counts() {
    let out = ppw(&["lattice", "--radius", "3", "--shift", "1,0"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("count 29\n"), "{text}");
    assert!(text.contains("annulus 7\n"), "{text}");
    assert!(text.contains("holds true"), "{text}");
}

#[test]
fn empty_summary_exits_with_no_data() {
    let dir = scratch("empty");
    let summary = dir.join("summary.csv");
    fs::write(&summary, "ensemble,manifold,kind,n,replicas,mean_w2,stderr_w2,model,slope,intercept,sse\n").unwrap();
    let out = ppw(&["plot", summary.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(ppw::report::EXIT_NO_DATA));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "no data\n");
}

#[test]
fn malformed_summary_names_the_row() {
    let dir = scratch("bad");
    let summary = dir.join("summary.csv");
    fs::write(
        &summary,
        "ensemble,manifold,kind,n,replicas,mean_w2,stderr_w2,model,slope,intercept,sse\ngaf,sphere2,point,16,3,0.2,0.01,,,,\ngaf,sphere2,point,x,3,0.2,0.01,,,,\n",
    )
    .unwrap();
    let out = ppw(&["plot", summary.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"));
}

#[test]
fn single_n_plot_has_no_fit_line() {
    let dir = scratch("single");
    let summary = dir.join("summary.csv");
    fs::write(
        &summary,
        "ensemble,manifold,kind,n,replicas,mean_w2,stderr_w2,model,slope,intercept,sse\niid,torus2,point,64,5,0.1,0.004,,,,\n",
    )
    .unwrap();
    let out = ppw(&["plot", summary.to_str().unwrap()], None);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("insufficient N values"));
    let svg = fs::read_to_string(dir.join("iid_torus2.svg")).unwrap();
    assert!(svg.contains("<circle") && !svg.contains("<path"));
}

#[test]
fn unwritable_output_fails() {
    let dir = scratch("ro");
    let blocker = dir.join("file");
    fs::write(&blocker, "").unwrap();
    let out = ppw(
        &["--config", manifest("config/smoke.txt").to_str().unwrap(), "--out", blocker.join("sub").to_str().unwrap(), "sweep"],
        None,
    );
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn config_errors_name_the_line() {
    let dir = scratch("cfg");
    let path = dir.join("bad.txt");
    fs::write(&path, "[experiment]\nmanifold = sphere\nreplicas = many\n").unwrap();
    let out = ppw(&["--config", path.to_str().unwrap(), "sweep"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn shipped_configs_parse() {
    let schema = ExperimentConfig::load(&manifest("config/schema.txt")).unwrap();
    let d = ExperimentConfig::default();
    assert_eq!(schema.to_text(), d.to_text());
    for name in ["harmonic_sphere.txt", "torus_pinf.txt", "smoke.txt"] {
        let cfg = ExperimentConfig::load(&manifest(&format!("config/{name}"))).unwrap();
        for &kind in &cfg.ensembles {
            for &n in &cfg.n_schedule {
                cfg.spec(kind, n).unwrap_or_else(|e| panic!("{name}: N={n}: {e}"));
            }
        }
    }
}

#[test]
fn sweep_echoes_config_and_replays() {
    let cfg_text = "[experiment]\nmanifold = torus2\nensembles = jittered\nn = 4, 9\nreplicas = 2\nseed = 11\nm_mult = 8\n\n[flags]\nbias_check = 0\n";
    let run = |name: &str| {
        let dir = scratch(name);
        let cfg = dir.join("cfg.txt");
        fs::write(&cfg, cfg_text).unwrap();
        let out = ppw(&["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "sweep"], None);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        dir
    };
    let (a, b) = (run("replay-a"), run("replay-b"));
    let echoed = fs::read_to_string(a.join("config.txt")).unwrap();
    assert!(echoed.contains("seed = 11") && echoed.contains(&format!("out = {}", a.display())));
    assert!(fs::read_to_string(a.join("VERSION")).unwrap().starts_with("ppw "));
    let rows = |d: &PathBuf| -> Vec<Vec<String>> {
        ppw::sweep::read_records(&d.join("data.csv"))
            .unwrap()
            .iter()
            .map(|r| r.data_fields())
            .collect()
    };
    assert_eq!(rows(&a).len(), 4);
    assert_eq!(rows(&a), rows(&b));
}
