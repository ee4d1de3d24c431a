use std::fs;

use edi_core::io::{read_representation_csv, read_results_csv, write_representation_csv, write_results_csv, RESULTS_HEADER};
use edi_core::{validate_representation, Error, FactorKind, Matrix, Representation, ResultRow};

fn small_rep() -> Representation {
    let factors = Matrix::from_rows(&[vec![0.0, 1.0], vec![3.0, 9.0], vec![7.0, 2.0]]).unwrap();
    let codes = Matrix::from_rows(&[vec![0.25, -1.5], vec![1e-7, 3.0], vec![12345.678, 0.1]]).unwrap();
    Representation::new(factors, codes, vec![FactorKind::Discrete { categories: 10 }; 2], 0, None).unwrap()
}

#[test]
fn three_row_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, kinds) = (dir.path().join("r.csv"), dir.path().join("r.kinds.json"));
    let rep = small_rep();
    write_representation_csv(&rep, &csv, &kinds).unwrap();
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("z0,z1,c0,c1\n"));
    let back = read_representation_csv(&csv, &kinds).unwrap();
    assert_eq!((back.n(), back.k(), back.d()), (3, 2, 2));
    assert_eq!(back.factors, rep.factors);
    assert_eq!(back.codes, rep.codes);
    assert_eq!(back.factor_kinds, rep.factor_kinds);
}

#[test]
fn wrong_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, kinds) = (dir.path().join("r.csv"), dir.path().join("k.json"));
    fs::write(&csv, "a,b\n1,2\n3,4\n").unwrap();
    fs::write(&kinds, r#"[{"kind":"discrete","categories":10}]"#).unwrap();
    assert!(matches!(read_representation_csv(&csv, &kinds), Err(Error::HeaderMismatch(_))));
}

#[test]
fn short_row_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, kinds) = (dir.path().join("r.csv"), dir.path().join("k.json"));
    fs::write(&csv, "z0,z1,c0,c1\n1,2,0.5,0.5\n1,2,0.5\n").unwrap();
    fs::write(&kinds, r#"[{"kind":"discrete","categories":10},{"kind":"discrete","categories":10}]"#).unwrap();
    assert!(matches!(read_representation_csv(&csv, &kinds), Err(Error::Parse(_))));
}

#[test]
fn missing_or_bad_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    fs::write(&csv, "z0,c0\n1,0.5\n2,0.5\n").unwrap();
    let kinds = dir.path().join("k.json");
    fs::write(&kinds, "not json").unwrap();
    assert!(matches!(read_representation_csv(&csv, &kinds), Err(Error::MissingKinds(_))));
    let absent = dir.path().join("absent.json");
    match read_representation_csv(&csv, &absent) {
        Err(e @ Error::Io { .. }) => assert!(e.to_string().contains("absent.json")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_csv_is_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, kinds) = (dir.path().join("r.csv"), dir.path().join("k.json"));
    fs::write(&csv, "").unwrap();
    fs::write(&kinds, r#"[{"kind":"discrete","categories":10}]"#).unwrap();
    assert!(read_representation_csv(&csv, &kinds).is_err());
}

#[test]
fn validation_examples() {
    let good = small_rep();
    assert!(validate_representation(&good).is_ok());

    let mut short = good.clone();
    short.codes = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert!(matches!(validate_representation(&short), Err(Error::DimensionMismatch(_))));

    let mut frac = good.clone();
    frac.factors.set(1, 0, 2.5);
    assert!(matches!(validate_representation(&frac), Err(Error::DomainViolation(_))));

    let mut out_of_range = good.clone();
    out_of_range.factors.set(1, 0, 10.0);
    assert!(matches!(validate_representation(&out_of_range), Err(Error::DomainViolation(_))));

    let mut nan = good.clone();
    nan.codes.set(0, 1, f64::NAN);
    assert!(matches!(validate_representation(&nan), Err(Error::NonFinite(_))));

    let mut inf = good;
    inf.codes.set(2, 0, f64::INFINITY);
    assert!(matches!(validate_representation(&inf), Err(Error::NonFinite(_))));
}

fn row(i: u64) -> ResultRow {
    ResultRow {
        experiment: "rotation".into(),
        alpha: 0.1 * (i % 6) as f64,
        seed: u64::MAX - i,
        rep_index: i,
        metric: "edi".into(),
        component: "mod".into(),
        value: (i as f64).sin() / 3.0,
        elapsed_ms: i as f64 * 0.137,
    }
}

#[test]
fn results_header_only_for_empty_list() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    write_results_csv(&[], &p).unwrap();
    assert_eq!(fs::read_to_string(&p).unwrap(), format!("{}\n", RESULTS_HEADER.join(",")));
    assert!(read_results_csv(&p).unwrap().is_empty());
}

#[test]
fn one_row_is_two_lines() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    write_results_csv(&[row(3)], &p).unwrap();
    assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 2);
}

#[test]
fn thousand_rows_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    let rows: Vec<ResultRow> = (0..1000).map(row).collect();
    write_results_csv(&rows, &p).unwrap();
    assert_eq!(read_results_csv(&p).unwrap(), rows);
}
