use edi_core::estimators::ksg_mi;
use edi_core::metrics::impact_intensity;
use edi_core::estimators::EstimatorChoice;
use edi_core::harness::spearman_rho;
use edi_core::synth::{gen_boundary, gen_sweep, subsample, tangent_warp, BoundaryCase, Family, SweepSpec};
use edi_core::{validate_representation, Error};

fn sweep(family: Family, alpha: f64, n: usize, seed: u64) -> edi_core::Representation {
    gen_sweep(&SweepSpec {
        n,
        ..SweepSpec::new(family, alpha, seed)
    })
    .unwrap()
}

#[test]
fn boundary_shapes() {
    let shape = |c: &str| {
        let r = gen_boundary(&BoundaryCase::new(c), 500, 1).unwrap();
        (r.k(), r.d())
    };
    assert_eq!(shape("111"), (2, 2));
    assert_eq!(shape("011"), (3, 2));
    assert_eq!(shape("101"), (2, 3));
}

#[test]
fn ideal_case_is_a_permutation() {
    let rep = gen_boundary(&BoundaryCase::new("111"), 50_000, 2).unwrap();
    let im = impact_intensity(&rep, &EstimatorChoice::DiscretePlugin).unwrap();
    assert!(im.intensities.get(0, 0) >= 0.95 && im.intensities.get(1, 1) >= 0.95);
    assert!(im.intensities.get(0, 1) <= 0.05 && im.intensities.get(1, 0) <= 0.05);
}

#[test]
fn merged_code_is_a_function_of_two_factors() {
    let rep = gen_boundary(&BoundaryCase::new("011"), 2000, 3).unwrap();
    let mut seen = std::collections::HashMap::new();
    for r in 0..rep.n() {
        let z = rep.factors.row(r);
        let prev = seen.insert((z[0] as i64, z[1] as i64), rep.codes.get(r, 0));
        assert!(prev.map_or(true, |p| p == rep.codes.get(r, 0)));
    }
}

#[test]
fn split_codes_jointly_determine_the_factor() {
    let rep = gen_boundary(&BoundaryCase::new("101"), 2000, 4).unwrap();
    let mut seen = std::collections::HashMap::new();
    for r in 0..rep.n() {
        let key = (rep.codes.get(r, 0) as i64, rep.codes.get(r, 1) as i64);
        let prev = seen.insert(key, rep.factors.get(r, 0));
        assert!(prev.map_or(true, |p| p == rep.factors.get(r, 0)));
    }
}

#[test]
fn all_cases_validate_across_seeds() {
    for case in BoundaryCase::all() {
        for seed in 0..10 {
            assert!(validate_representation(&gen_boundary(&case, 300, seed).unwrap()).is_ok());
        }
    }
}

#[test]
fn unknown_case_is_rejected() {
    assert!(matches!(gen_boundary(&BoundaryCase::new("2x1"), 100, 0), Err(Error::InvalidCase(_))));
}

#[test]
fn nonlinear_identity_limit_and_monotonicity() {
    let rep = sweep(Family::Nonlinear, 0.0, 5000, 5);
    let dev = rep
        .factors
        .as_slice()
        .iter()
        .zip(rep.codes.as_slice())
        .map(|(z, c)| (z - c).abs())
        .fold(0.0, f64::max);
    assert!(dev <= 1e-3, "{dev}");
    for alpha in [0.3, 0.7, 1.0] {
        let rep = sweep(Family::Nonlinear, alpha, 3000, 6);
        for j in 0..rep.k() {
            let rho = spearman_rho(&rep.factors.column(j), &rep.codes.column(j)).unwrap();
            assert_eq!(rho, 1.0);
        }
    }
}

#[test]
fn warp_steepens_with_alpha() {
    let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    let max_dev = |a: f64| grid.iter().map(|&z| (tangent_warp(a, z) - z).abs()).fold(0.0, f64::max);
    let devs: Vec<f64> = (0..=10).map(|i| max_dev(i as f64 / 10.0)).collect();
    assert!(devs.windows(2).all(|w| w[1] > w[0]), "{devs:?}");
}

#[test]
fn rotation_examples() {
    let rep = sweep(Family::Rotation, 0.0, 1000, 7);
    assert_eq!(rep.codes, rep.factors);
    let rep = sweep(Family::Rotation, 0.5, 1000, 8);
    let k = rep.k();
    for r in 0..rep.n() {
        let z = rep.factors.row(r);
        for i in 0..k {
            let expected = 0.5 * z[i] + 0.5 * z[(i + k - 1) % k];
            assert!((rep.codes.get(r, i) - expected).abs() <= 1e-15);
        }
    }
}

#[test]
fn rotation_needs_square_layout() {
    let spec = SweepSpec {
        d: 4,
        ..SweepSpec::new(Family::Rotation, 0.3, 0)
    };
    assert!(gen_sweep(&spec).is_err());
}

#[test]
fn noise_examples() {
    let rep = sweep(Family::Noise, 0.0, 1000, 9);
    assert_eq!(rep.codes, rep.factors);

    let rep = sweep(Family::Noise, 1.0, 20_000, 10);
    let (z, c) = (rep.factors.column(0), rep.codes.column(0));
    assert!(ksg_mi(&[&c], &[&z], 3).unwrap() <= 0.02);

    let rep = sweep(Family::Noise, 0.5, 20_000, 11);
    let (z, c) = (rep.factors.column(2), rep.codes.column(2));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mz, mc) = (mean(&z), mean(&c));
    let cov: f64 = z.iter().zip(&c).map(|(a, b)| (a - mz) * (b - mc)).sum();
    let vz: f64 = z.iter().map(|a| (a - mz).powi(2)).sum();
    let vc: f64 = c.iter().map(|b| (b - mc).powi(2)).sum();
    let corr = cov / (vz * vc).sqrt();
    assert!((corr - 0.5f64.sqrt()).abs() <= 0.02, "{corr}");
}

#[test]
fn subsample_examples() {
    let rep = gen_boundary(&BoundaryCase::new("110"), 1000, 12).unwrap();
    let all = subsample(&rep, 1000, 3).unwrap();
    let key = |r: &edi_core::Representation| {
        let mut rows: Vec<String> = (0..r.n())
            .map(|i| format!("{:?}{:?}", r.factors.row(i), r.codes.row(i)))
            .collect();
        rows.sort();
        rows
    };
    assert_eq!(key(&all), key(&rep));

    let big = gen_boundary(&BoundaryCase::new("111"), 100_000, 13).unwrap();
    let small = subsample(&big, 100, 4).unwrap();
    assert_eq!(small.n(), 100);
    let universe: std::collections::HashSet<String> = key(&big).into_iter().collect();
    assert!(key(&small).iter().all(|r| universe.contains(r)));
    assert_eq!(subsample(&big, 100, 4).unwrap(), small);

    assert!(matches!(subsample(&rep, 1001, 0), Err(Error::TooFewRequested { .. })));
    assert!(matches!(subsample(&rep, 1, 0), Err(Error::TooFewRequested { .. })));
}

#[test]
fn generators_are_deterministic() {
    for family in [Family::Nonlinear, Family::Rotation, Family::Noise] {
        assert_eq!(sweep(family, 0.4, 500, 14), sweep(family, 0.4, 500, 14));
        assert_ne!(sweep(family, 0.4, 500, 14).factors, sweep(family, 0.4, 500, 15).factors);
    }
}
