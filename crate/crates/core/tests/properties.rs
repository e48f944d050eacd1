use proptest::prelude::*;

use ppw::config::{EnsembleKind, ExperimentConfig, ManifoldChoice};
use ppw::lattice::{annulus_difference_count, count_ball, LatticeNorm};
use ppw::manifold::{Manifold, Point};
use ppw::samplers::PointSet;
use ppw::statistics::{fit_rate, RateModel, RatePoint};
use ppw::sweep::{parse_summary, summarize, write_summary, SweepRecord};
use ppw::transport::{solve_discrete_ot, w2_to_volume, CostMatrix, OtOptions, SolverKind};

fn norm_strategy() -> impl Strategy<Value = LatticeNorm> {
    prop_oneof![
        Just(LatticeNorm::P(1.0)),
        Just(LatticeNorm::P(2.0)),
        Just(LatticeNorm::P(f64::INFINITY)),
        (1.0f64..6.0).prop_map(LatticeNorm::P),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_plan_is_feasible_and_certified(
        rows in 1usize..6,
        cols in 1usize..6,
        seed in any::<u64>(),
    ) {
        let mut s = seed | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let vals: Vec<f64> = (0..rows * cols).map(|_| next()).collect();
        let cost = CostMatrix::from_fn(rows, cols, |i, j| vals[i * cols + j]).unwrap();
        let mut a: Vec<f64> = (0..rows).map(|_| 0.1 + next()).collect();
        let mut b: Vec<f64> = (0..cols).map(|_| 0.1 + next()).collect();
        let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
        a.iter_mut().for_each(|v| *v /= sa);
        b.iter_mut().for_each(|v| *v /= sb);
        let exact = solve_discrete_ot(&cost, &a, &b, &OtOptions::default()).unwrap();
        prop_assert!(exact.marginal_error < 1e-12);
        prop_assert!(exact.lower_bound <= exact.value + 1e-12);
        let mut row = vec![0.0; rows];
        let mut col = vec![0.0; cols];
        let mut total = 0.0;
        for &(i, j, m) in &exact.plan {
            prop_assert!(m >= 0.0);
            row[i] += m;
            col[j] += m;
            total += m * cost.get(i, j);
        }
        for (x, y) in row.iter().zip(&a).chain(col.iter().zip(&b)) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((total - exact.value).abs() < 1e-12);
        let ent = solve_discrete_ot(
            &cost,
            &a,
            &b,
            &OtOptions { solver: SolverKind::Entropic, ..OtOptions::default() },
        )
        .unwrap();
        // both certified brackets contain the optimum
        prop_assert!(ent.lower_bound <= exact.value + 1e-9);
        prop_assert!(exact.value <= ent.value + 1e-9);
    }

    #[test]
    fn torus_bracket_contains_estimate(coords in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..12)) {
        let m = Manifold::standard_torus(2).unwrap();
        let pts = coords.iter().map(|&(x, y)| Point::torus(&[x, y])).collect();
        let ps = PointSet::from_points(m, pts).unwrap();
        let est = w2_to_volume(&ps, 16 * ps.len(), &OtOptions::default()).unwrap();
        prop_assert!(est.bracket_low <= est.value && est.value <= est.bracket_high);
        // no configuration is farther from the volume than the diameter
        prop_assert!(est.bracket_low <= m.diameter());
    }

    #[test]
    fn annulus_counts_are_symmetric_and_bounded(
        norm in norm_strategy(),
        a in -6i64..=6,
        b in -6i64..=6,
        radius in 0.5f64..12.0,
    ) {
        prop_assume!((a, b) != (0, 0));
        let k = [a, b, 0];
        let neg = [-a, -b, 0];
        let full = count_ball(&norm, radius, 2).unwrap();
        let fwd = annulus_difference_count(&norm, &k, radius, 2).unwrap();
        prop_assert_eq!(fwd, annulus_difference_count(&norm, &neg, radius, 2).unwrap());
        prop_assert!(fwd <= full);
        prop_assert!(count_ball(&norm, radius + 0.5, 2).unwrap() >= full);
    }

    #[test]
    fn config_text_round_trips(
        manifold in prop::sample::select(vec![ManifoldChoice::Sphere, ManifoldChoice::Torus2, ManifoldChoice::Torus3, ManifoldChoice::Hexagonal]),
        ensembles in prop::sample::subsequence(vec![EnsembleKind::Harmonic, EnsembleKind::Spherical, EnsembleKind::Gaf, EnsembleKind::Jittered, EnsembleKind::Iid], 1..=5),
        n_schedule in prop::collection::vec(1usize..5000, 1..8),
        replicas in 1usize..100,
        seed in any::<u64>(),
        m_mult in 1usize..256,
        bias_check in 0.0f64..=1.0,
        bound in any::<bool>(),
    ) {
        let cfg = ExperimentConfig { manifold, ensembles, n_schedule, replicas, seed, m_mult, bias_check, bound, ..ExperimentConfig::default() };
        let back = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), cfg.to_text());
        prop_assert_eq!(back.seed, seed);
        prop_assert_eq!(back.bias_check.to_bits(), bias_check.to_bits());
    }

    #[test]
    fn summary_csv_is_bit_stable(means in prop::collection::vec(1e-6f64..10.0, 4..9)) {
        let recs: Vec<SweepRecord> = means
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| {
                (0..2).map(move |r| SweepRecord {
                    ensemble: "iid".into(),
                    manifold: "torus2".into(),
                    n: 10 * (i + 1),
                    replica: r,
                    seed: 0,
                    w2: m * (1.0 + 0.1 * r as f64),
                    bracket_low: 0.0,
                    bracket_high: 1.0,
                    m: 1,
                    runtime_ms: 0,
                    solver: SolverKind::Exact,
                    bound: None,
                    t_star: None,
                    error: None,
                })
            })
            .collect();
        let s = summarize(&recs);
        let dir = std::env::temp_dir().join(format!("ppw-prop-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("summary.csv");
        write_summary(&path, &s).unwrap();
        let back = parse_summary(&std::fs::read_to_string(&path).unwrap()).unwrap();
        for (x, y) in s.points.iter().zip(&back.points) {
            prop_assert_eq!(x.mean_w2.to_bits(), y.mean_w2.to_bits());
            prop_assert_eq!(x.stderr_w2.to_bits(), y.stderr_w2.to_bits());
        }
        for (x, y) in s.fits.iter().zip(&back.fits) {
            prop_assert_eq!(x.fit.slope.to_bits(), y.fit.slope.to_bits());
            prop_assert_eq!(x.fit.residual_sse.to_bits(), y.fit.residual_sse.to_bits());
        }
    }

    #[test]
    fn exact_power_laws_are_recovered(slope in -1.5f64..0.0, scale in 0.01f64..10.0) {
        let pts: Vec<RatePoint> = [16.0, 64.0, 256.0, 1024.0, 4096.0]
            .iter()
            .map(|&n: &f64| RatePoint { n, mean: scale * n.powf(slope), stderr: 0.0 })
            .collect();
        let fit = fit_rate(&pts, RateModel::PurePower).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!(fit.residual_sse < 1e-20);
    }
}
