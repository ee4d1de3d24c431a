//! CSV and JSON interchange for representations and results.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::repr::{validate_representation, FactorKind, Representation, ResultRow};

/// Header of every results CSV.
pub const RESULTS_HEADER: [&str; 8] = [
    "experiment",
    "alpha",
    "seed",
    "rep_index",
    "metric",
    "component",
    "value",
    "elapsed_ms",
];

/// Default kinds sidecar for a representation CSV: `foo.csv` → `foo.kinds.json`.
pub fn kinds_path_for(csv_path: &Path) -> std::path::PathBuf {
    csv_path.with_extension("kinds.json")
}

pub fn read_kinds(path: &Path) -> Result<Vec<FactorKind>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let kinds: Vec<FactorKind> = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::MissingKinds(format!("{}: {e}", path.display())))?;
    for k in &kinds {
        k.validate()?;
    }
    Ok(kinds)
}

pub fn write_kinds(kinds: &[FactorKind], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, kinds)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn expected_header(k: usize, d: usize) -> Vec<String> {
    (0..k)
        .map(|j| format!("z{j}"))
        .chain((0..d).map(|i| format!("c{i}")))
        .collect()
}

/// Reads a representation CSV with header `z0..z{k-1},c0..c{d-1}` and its kinds sidecar.
pub fn read_representation_csv(path: &Path, kinds_path: &Path) -> Result<Representation> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let kinds = read_kinds(kinds_path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    let k = header.iter().take_while(|h| h.starts_with('z')).count();
    let d = header.len() - k;
    if header != expected_header(k, d) || k == 0 || d == 0 {
        return Err(Error::HeaderMismatch(format!(
            "expected z0..z{{k-1}},c0..c{{d-1}}, found {}",
            header.join(",")
        )));
    }
    if kinds.len() != k {
        return Err(Error::MissingKinds(format!(
            "{} kinds for {k} factor columns",
            kinds.len()
        )));
    }
    let mut factors = Vec::new();
    let mut codes = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        for (f, field) in record.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Parse(format!("row {}: field {f} `{field}` is not a number", line + 1))
            })?;
            if f < k {
                factors.push(v);
            } else {
                codes.push(v);
            }
        }
    }
    let n = factors.len() / k;
    let rep = Representation {
        factors: Matrix::new(n, k, factors)?,
        codes: Matrix::new(n, d, codes)?,
        factor_kinds: kinds,
        seed: 0,
        alpha: None,
    };
    validate_representation(&rep)?;
    Ok(rep)
}

/// Writes the representation CSV and, next to it, the kinds sidecar.
pub fn write_representation_csv(rep: &Representation, path: &Path, kinds_path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(expected_header(rep.k(), rep.d()))?;
    let mut buf = Vec::with_capacity(rep.k() + rep.d());
    for r in 0..rep.n() {
        buf.clear();
        buf.extend(rep.factors.row(r).iter().map(|v| v.to_string()));
        buf.extend(rep.codes.row(r).iter().map(|v| v.to_string()));
        w.write_record(&buf)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    write_kinds(&rep.factor_kinds, kinds_path)
}

/// Long-format results CSV. Values use the shortest exact decimal form.
pub fn write_results_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(file));
    w.write_record(RESULTS_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(Error::HeaderMismatch(format!(
            "expected {}, found {}",
            RESULTS_HEADER.join(","),
            header.join(",")
        )));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(|e: csv::Error| Error::Parse(e.to_string())))
        .collect()
}
