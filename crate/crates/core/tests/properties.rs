use proptest::prelude::*;

use edi_core::estimators::{mutual_information, EstimatorChoice, Variable};
use edi_core::harness::{aggregate, agreement_matrix, spearman_rho};
use edi_core::io::{read_representation_csv, write_representation_csv};
use edi_core::metrics::{exclusivity, parse_metric, JointPolicy, Metric, MiCache};
use edi_core::synth::{gen_boundary, gen_sweep, tangent_warp, BoundaryCase, Family, SweepSpec};
use edi_core::{validate_representation, Component, FactorKind, Matrix, MetricReport, Representation, ResultRow};

fn discrete_rep(n: usize, cats: Vec<u32>, d: usize, seed: u64) -> Representation {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let k = cats.len();
    let factors: Vec<Vec<f64>> = (0..n)
        .map(|_| cats.iter().map(|&c| rng.gen_range(0..c) as f64).collect())
        .collect();
    // each code mixes a couple of factors with a little label noise
    let codes: Vec<Vec<f64>> = factors
        .iter()
        .map(|z| {
            (0..d)
                .map(|i| {
                    let a = z[i % k];
                    let b = z[(i + 1) % k];
                    let noise = if rng.gen_bool(0.2) { rng.gen_range(0..3) as f64 } else { 0.0 };
                    a * (1 + i % 2) as f64 + b * (i % 3) as f64 + noise
                })
                .collect()
        })
        .collect();
    Representation::new(
        Matrix::from_rows(&factors).unwrap(),
        Matrix::from_rows(&codes).unwrap(),
        cats.iter().map(|&c| FactorKind::Discrete { categories: c }).collect(),
        seed,
        None,
    )
    .unwrap()
}

fn scores(rep: &Representation) -> Vec<Option<f64>> {
    let est = EstimatorChoice::DiscretePlugin;
    let cache = MiCache::new(rep);
    let mut out = Vec::new();
    for name in ["edi", "mig", "mig_sup", "modularity", "dcimig"] {
        let m = parse_metric(name, &est, &JointPolicy::Auto).unwrap();
        match m.evaluate(&cache, 1) {
            Ok(r) => out.extend(r.entries().iter().map(|e| Some(e.value))),
            Err(_) => out.push(None),
        }
    }
    out
}

fn close(a: &[Option<f64>], b: &[Option<f64>]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => (x - y).abs() <= 1e-9,
            (None, None) => true,
            _ => false,
        })
}

fn rep_strategy() -> impl Strategy<Value = Representation> {
    (60usize..200, prop::collection::vec(2u32..5, 1..4), 1usize..4, any::<u64>())
        .prop_map(|(n, cats, d, seed)| discrete_rep(n, cats, d, seed))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn representation_csv_round_trip(
        rows in prop::collection::vec((0u32..7, -1e9f64..1e9, -1.0f64..1.0), 2..40),
        tiny in -1e-300f64..1e-300,
    ) {
        let factors: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.0 as f64]).collect();
        let mut codes: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.1, r.2]).collect();
        codes[0][1] = tiny;
        let rep = Representation::new(
            Matrix::from_rows(&factors).unwrap(),
            Matrix::from_rows(&codes).unwrap(),
            vec![FactorKind::Discrete { categories: 7 }],
            0,
            None,
        ).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (c, k) = (dir.path().join("r.csv"), dir.path().join("r.kinds.json"));
        write_representation_csv(&rep, &c, &k).unwrap();
        let back = read_representation_csv(&c, &k).unwrap();
        for (a, b) in rep.codes.as_slice().iter().zip(back.codes.as_slice()) {
            prop_assert!(a == b || ((a - b) / a).abs() < 1e-12);
        }
        prop_assert_eq!(back.factors, rep.factors);
    }

    #[test]
    fn validation_accepts_exactly_valid(
        n in 2usize..30,
        corruption in 0usize..7,
        r in any::<prop::sample::Index>(),
    ) {
        let factors: Vec<Vec<f64>> = (0..n).map(|i| vec![(i % 4) as f64, i as f64 / n as f64]).collect();
        let codes: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * 0.5]).collect();
        let mut rep = Representation {
            factors: Matrix::from_rows(&factors).unwrap(),
            codes: Matrix::from_rows(&codes).unwrap(),
            factor_kinds: vec![
                FactorKind::Discrete { categories: 4 },
                FactorKind::Continuous { lower: 0.0, upper: 1.0 },
            ],
            seed: 0,
            alpha: Some(0.5),
        };
        let row = r.index(n);
        match corruption {
            1 => rep.codes.set(row, 0, f64::NAN),
            2 => rep.factors.set(row, 1, f64::NEG_INFINITY),
            3 => rep.factors.set(row, 0, 1.5),
            4 => rep.factors.set(row, 0, 4.0),
            5 => rep.codes = rep.codes.select_rows(&(0..n - 1).collect::<Vec<_>>()),
            6 => rep.alpha = Some(1.5),
            _ => {}
        }
        prop_assert_eq!(validate_representation(&rep).is_ok(), corruption == 0);
    }

    #[test]
    fn scores_ignore_code_order(rep in rep_strategy(), rot in 0usize..3) {
        let d = rep.d();
        let perm: Vec<usize> = (0..d).map(|i| (i + rot) % d).rev().collect();
        let mut shuffled = rep.clone();
        shuffled.codes = rep.codes.select_columns(&perm);
        prop_assert!(close(&scores(&rep), &scores(&shuffled)));
    }

    #[test]
    fn scores_ignore_factor_order(rep in rep_strategy(), rot in 0usize..3) {
        let k = rep.k();
        let perm: Vec<usize> = (0..k).map(|j| (j + rot) % k).rev().collect();
        let mut shuffled = rep.clone();
        shuffled.factors = rep.factors.select_columns(&perm);
        shuffled.factor_kinds = perm.iter().map(|&j| rep.factor_kinds[j]).collect();
        prop_assert!(close(&scores(&rep), &scores(&shuffled)));
    }

    #[test]
    fn scores_ignore_row_order(rep in rep_strategy(), shift in 1usize..50) {
        let n = rep.n();
        let idx: Vec<usize> = (0..n).map(|i| (i * 7 + shift) % n).collect();
        // 7 is coprime with n only sometimes; fall back to a rotation otherwise
        let mut seen = idx.clone();
        seen.sort_unstable();
        seen.dedup();
        let idx = if seen.len() == n { idx } else { (0..n).map(|i| (i + shift) % n).collect() };
        prop_assert!(close(&scores(&rep), &scores(&rep.select_rows(&idx))));
    }

    #[test]
    fn plugin_and_binned_are_symmetric_and_nonnegative(
        xs in prop::collection::vec(0u8..6, 20..200),
        ys in prop::collection::vec(0u8..6, 20..200),
    ) {
        let n = xs.len().min(ys.len());
        let x: Vec<f64> = xs[..n].iter().map(|&v| v as f64).collect();
        let y: Vec<f64> = ys[..n].iter().map(|&v| v as f64).collect();
        for est in [EstimatorChoice::DiscretePlugin, EstimatorChoice::Binned { bins: 4 }] {
            let (vx, vy) = (Variable::discrete(&x), Variable::discrete(&y));
            let a = mutual_information(&vx, &vy, &est).unwrap();
            let b = mutual_information(&vy, &vx, &est).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn exclusivity_properties(mut v in prop::collection::vec(0.0f64..1.0, 1..8), zero_rest in any::<bool>()) {
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if zero_rest {
            let best = v.iter().position(|&x| x == max).unwrap();
            for (i, x) in v.iter_mut().enumerate() {
                if i != best {
                    *x = 0.0;
                }
            }
        }
        let e = exclusivity(&v).unwrap();
        prop_assert!(e <= max + 1e-15);
        let others_zero = {
            let mut sorted = v.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            sorted[1..].iter().all(|&x| x == 0.0)
        };
        prop_assert_eq!(e == max, others_zero);
        let mut rev = v.clone();
        rev.reverse();
        rev.rotate_left(v.len() / 2);
        prop_assert!((exclusivity(&rev).unwrap() - e).abs() <= 1e-12);
    }

    #[test]
    fn boundary_generators_validate_and_depend_on_seed(case in 0usize..8, seed in any::<u64>()) {
        let case = &BoundaryCase::all()[case];
        let a = gen_boundary(case, 200, seed).unwrap();
        prop_assert!(validate_representation(&a).is_ok());
        prop_assert_eq!(&gen_boundary(case, 200, seed).unwrap(), &a);
        let b = gen_boundary(case, 200, seed.wrapping_add(1)).unwrap();
        prop_assert_ne!(a.factors, b.factors);
    }

    #[test]
    fn rotation_preserves_row_sums(alpha in 0.0f64..=1.0, seed in any::<u64>()) {
        let rep = gen_sweep(&SweepSpec { n: 300, ..SweepSpec::new(Family::Rotation, alpha, seed) }).unwrap();
        for r in 0..rep.n() {
            let zs: f64 = rep.factors.row(r).iter().sum();
            let cs: f64 = rep.codes.row(r).iter().sum();
            prop_assert!((zs - cs).abs() <= 1e-12);
        }
    }

    #[test]
    fn warp_is_increasing_bijection(alpha in 0.0f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        prop_assert!(tangent_warp(alpha, 0.0).abs() < 1e-12);
        prop_assert!((tangent_warp(alpha, 1.0) - 1.0).abs() < 1e-12);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if lo < hi {
            prop_assert!(tangent_warp(alpha, lo) < tangent_warp(alpha, hi));
        }
    }

    #[test]
    fn aggregate_ignores_row_order(values in prop::collection::vec(-1e3f64..1e3, 1..60), rot in 0usize..60) {
        let rows: Vec<ResultRow> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| ResultRow {
                experiment: "noise".into(),
                alpha: (i % 3) as f64 * 0.5,
                seed: i as u64,
                rep_index: 0,
                metric: if i % 2 == 0 { "edi".into() } else { "mig".into() },
                component: "score".into(),
                value: v,
                elapsed_ms: 0.0,
            })
            .collect();
        let mut shuffled = rows.clone();
        shuffled.rotate_left(rot % rows.len());
        shuffled.reverse();
        prop_assert_eq!(aggregate(&rows), aggregate(&shuffled));
    }

    #[test]
    fn agreement_is_symmetric_and_rank_based(
        scores in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 3..25),
    ) {
        let keys = vec![
            ("a".to_string(), Component::Single),
            ("b".to_string(), Component::Single),
            ("c".to_string(), Component::Modularity),
        ];
        let build = |f: &dyn Fn(f64) -> f64| -> Vec<MetricReport> {
            scores
                .iter()
                .map(|&(a, b, c)| {
                    let mut r = MetricReport::new();
                    r.insert("a", Component::Single, a).unwrap();
                    r.insert("b", Component::Single, f(b)).unwrap();
                    r.insert("c", Component::Modularity, c).unwrap();
                    r
                })
                .collect()
        };
        let Ok(m) = agreement_matrix(&build(&|x| x), &keys) else {
            // constant series have no rank correlation
            return Ok(());
        };
        for i in 0..3 {
            prop_assert_eq!(m.get(i, i), 1.0);
            for j in 0..3 {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                prop_assert!((-1.0..=1.0).contains(&m.get(i, j)));
            }
        }
        let rescaled = agreement_matrix(&build(&|x| (3.0 * x).exp() - 7.0), &keys).unwrap();
        prop_assert_eq!(rescaled, m);
    }

    #[test]
    fn spearman_is_symmetric(v in prop::collection::vec((0u8..10, 0u8..10), 2..40)) {
        let a: Vec<f64> = v.iter().map(|p| p.0 as f64).collect();
        let b: Vec<f64> = v.iter().map(|p| p.1 as f64).collect();
        match (spearman_rho(&a, &b), spearman_rho(&b, &a)) {
            (Ok(x), Ok(y)) => {
                prop_assert!((x - y).abs() <= 1e-12);
                prop_assert!((-1.0..=1.0).contains(&x));
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "asymmetric failure"),
        }
    }
}
