//! CSV and JSON file formats.
//!
//! Reals are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distances::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::sifting::{DecompositionResult, ImfMeta};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn reader(path: &Path, headers: bool) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(headers)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_f64(field: &str, path: &Path, line: u64, column: &str) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| {
        Error::invalid(format!(
            "{}: line {line}: column {column}: {field:?} is not a number",
            path.display()
        ))
    })?;
    if !v.is_finite() {
        return Err(Error::invalid(format!(
            "{}: line {line}: column {column}: value {field} is not finite",
            path.display()
        )));
    }
    Ok(v)
}

fn parse_index(field: &str, path: &Path, line: u64, column: &str) -> Result<usize> {
    field.parse().map_err(|_| {
        Error::invalid(format!(
            "{}: line {line}: column {column}: {field:?} is not a non-negative integer",
            path.display()
        ))
    })
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn check_header(rec: &csv::StringRecord, expected: &[&str], path: &Path) -> Result<()> {
    let got: Vec<&str> = rec.iter().collect();
    if got != expected {
        return Err(Error::invalid(format!(
            "{}: expected header {:?}, found {:?}",
            path.display(),
            expected.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

/// Vertex coordinates keyed by id.
#[derive(Debug, Clone, PartialEq)]
pub enum Coordinates {
    Line(Vec<f64>),
    Plane(Vec<[f64; 2]>),
}

impl Coordinates {
    pub fn len(&self) -> usize {
        match self {
            Coordinates::Line(v) => v.len(),
            Coordinates::Plane(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointsFile {
    pub ids: Vec<usize>,
    pub coords: Coordinates,
}

/// Reads `id,x` (or `id,t`) or `id,x,y`.
pub fn read_points(path: &Path) -> Result<PointsFile> {
    let mut rdr = reader(path, true)?;
    let header = rdr.headers()?.clone();
    let planar = match header.len() {
        2 => {
            if header.iter().collect::<Vec<_>>() != ["id", "t"] {
                check_header(&header, &["id", "x"], path)?;
            }
            false
        }
        3 => {
            check_header(&header, &["id", "x", "y"], path)?;
            true
        }
        _ => check_header(&header, &["id", "x", "y"], path).map(|_| true)?,
    };
    let mut ids = Vec::new();
    let mut line = Vec::new();
    let mut plane = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let ln = line_of(&rec);
        ids.push(parse_index(&rec[0], path, ln, "id")?);
        let x = parse_f64(&rec[1], path, ln, "x")?;
        if planar {
            plane.push([x, parse_f64(&rec[2], path, ln, "y")?]);
        } else {
            line.push(x);
        }
    }
    let coords = if planar {
        Coordinates::Plane(plane)
    } else {
        Coordinates::Line(line)
    };
    Ok(PointsFile { ids, coords })
}

pub fn write_points(path: &Path, coords: &Coordinates) -> Result<()> {
    let mut w = writer(path)?;
    match coords {
        Coordinates::Line(xs) => {
            w.write_record(["id", "x"])?;
            for (i, x) in xs.iter().enumerate() {
                w.write_record([i.to_string(), fmt_f64(*x)])?;
            }
        }
        Coordinates::Plane(ps) => {
            w.write_record(["id", "x", "y"])?;
            for (i, p) in ps.iter().enumerate() {
                w.write_record([i.to_string(), fmt_f64(p[0]), fmt_f64(p[1])])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads `id,value` rows in file order. Non-finite values are rejected.
pub fn read_signal(path: &Path) -> Result<Vec<(usize, f64)>> {
    let mut rdr = reader(path, true)?;
    check_header(&rdr.headers()?.clone(), &["id", "value"], path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let ln = line_of(&rec);
        out.push((parse_index(&rec[0], path, ln, "id")?, parse_f64(&rec[1], path, ln, "value")?));
    }
    Ok(out)
}

/// Reads a signal whose ids are exactly `0..n`, in any order.
pub fn read_signal_values(path: &Path) -> Result<Vec<f64>> {
    let rows = read_signal(path)?;
    let ids: Vec<usize> = (0..rows.len()).collect();
    bind_signal(&ids, &rows)
}

pub fn write_signal(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["id", "value"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), fmt_f64(*v)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn duplicates(ids: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut dup = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            dup.insert(id);
        }
    }
    dup.into_iter().collect()
}

fn preview(ids: &[usize]) -> String {
    let shown: Vec<String> = ids.iter().take(20).map(|i| i.to_string()).collect();
    let more = if ids.len() > 20 {
        format!(" and {} more", ids.len() - 20)
    } else {
        String::new()
    };
    format!("[{}]{more}", shown.join(", "))
}

/// Orders signal values to match `point_ids`; both id sets must be equal
/// and free of duplicates.
pub fn bind_signal(point_ids: &[usize], rows: &[(usize, f64)]) -> Result<Vec<f64>> {
    let dup = duplicates(point_ids.iter().copied());
    if !dup.is_empty() {
        return Err(Error::Ingestion(format!("duplicate point ids {}", preview(&dup))));
    }
    let dup = duplicates(rows.iter().map(|r| r.0));
    if !dup.is_empty() {
        return Err(Error::Ingestion(format!("duplicate signal ids {}", preview(&dup))));
    }
    let by_id: BTreeMap<usize, f64> = rows.iter().copied().collect();
    let point_set: BTreeSet<usize> = point_ids.iter().copied().collect();
    let missing_values: Vec<usize> = point_ids.iter().copied().filter(|i| !by_id.contains_key(i)).collect();
    let missing_points: Vec<usize> = by_id.keys().copied().filter(|i| !point_set.contains(i)).collect();
    if !missing_values.is_empty() || !missing_points.is_empty() {
        let mut parts = Vec::new();
        if !missing_values.is_empty() {
            parts.push(format!("ids without a signal value {}", preview(&missing_values)));
        }
        if !missing_points.is_empty() {
            parts.push(format!("ids without a point {}", preview(&missing_points)));
        }
        return Err(Error::Ingestion(parts.join("; ")));
    }
    Ok(point_ids.iter().map(|i| by_id[i]).collect())
}

pub fn read_edges(path: &Path) -> Result<Vec<Edge>> {
    let mut rdr = reader(path, true)?;
    check_header(&rdr.headers()?.clone(), &["i", "j", "weight"], path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let ln = line_of(&rec);
        out.push(Edge {
            i: parse_index(&rec[0], path, ln, "i")?,
            j: parse_index(&rec[1], path, ln, "j")?,
            weight: parse_f64(&rec[2], path, ln, "weight")?,
        });
    }
    Ok(out)
}

pub fn write_edges(path: &Path, edges: &[Edge]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["i", "j", "weight"])?;
    for e in edges {
        w.write_record([e.i.to_string(), e.j.to_string(), fmt_f64(e.weight)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `n` lines of `n` comma-separated reals, no header.
pub fn write_distance_matrix(path: &Path, c: &DistanceMatrix) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    for i in 0..c.n() {
        w.write_record((0..c.n()).map(|j| fmt_f64(c.get(i, j))))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_distance_matrix(path: &Path) -> Result<DistanceMatrix> {
    let mut rdr = reader(path, false)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let ln = line_of(&rec);
        rows.push(
            rec.iter()
                .enumerate()
                .map(|(j, f)| parse_f64(f, path, ln, &j.to_string()))
                .collect::<Result<_>>()?,
        );
    }
    let n = rows.len();
    if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::invalid(format!(
            "{}: row {i} has {} entries, expected {n}",
            path.display(),
            rows[i].len()
        )));
    }
    DistanceMatrix::new(nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Metadata sidecar of a decomposition CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionMeta {
    pub method: String,
    pub n: usize,
    pub imf_count: usize,
    pub input_checksum: String,
    pub imfs: Vec<ImfMeta>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

/// Writes `vertex,imf_0,…,imf_{K-1},residual` to `csv_path` and the
/// metadata to `json_path`.
pub fn write_decomposition(
    csv_path: &Path,
    json_path: &Path,
    method: &str,
    result: &DecompositionResult,
    extra: serde_json::Map<String, serde_json::Value>,
) -> Result<()> {
    let mut w = writer(csv_path)?;
    let mut header = vec!["vertex".to_string()];
    header.extend((0..result.imfs.len()).map(|k| format!("imf_{k}")));
    header.push("residual".into());
    w.write_record(&header)?;
    for v in 0..result.residual.len() {
        let mut row = vec![v.to_string()];
        row.extend(result.imfs.iter().map(|imf| fmt_f64(imf[v])));
        row.push(fmt_f64(result.residual[v]));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(csv_path, e))?;
    let meta = DecompositionMeta {
        method: method.to_string(),
        n: result.residual.len(),
        imf_count: result.imfs.len(),
        input_checksum: result.input_checksum.clone(),
        imfs: result.meta.clone(),
        extra,
    };
    write_json(json_path, &meta)
}

/// Columns of a decomposition CSV: IMFs followed by the residual.
pub fn read_decomposition(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut rdr = reader(path, true)?;
    let header = rdr.headers()?.clone();
    let k = header.len();
    if k < 2 || &header[0] != "vertex" || &header[k - 1] != "residual" {
        return Err(Error::invalid(format!("{}: not a decomposition file", path.display())));
    }
    let mut cols = vec![Vec::new(); k - 1];
    for rec in rdr.records() {
        let rec = rec?;
        let ln = line_of(&rec);
        for (c, col) in cols.iter_mut().enumerate() {
            col.push(parse_f64(&rec[c + 1], path, ln, &header[c + 1])?);
        }
    }
    let residual = cols.pop().unwrap_or_default();
    Ok((cols, residual))
}

/// `index,eigenvalue,coefficient[,kernel]`.
pub fn write_spectrum(path: &Path, eigenvalues: &[f64], coefficients: &[f64], kernel: Option<&[f64]>) -> Result<()> {
    let mut w = writer(path)?;
    if kernel.is_some() {
        w.write_record(["index", "eigenvalue", "coefficient", "kernel"])?;
    } else {
        w.write_record(["index", "eigenvalue", "coefficient"])?;
    }
    for i in 0..eigenvalues.len() {
        let mut row = vec![i.to_string(), fmt_f64(eigenvalues[i]), fmt_f64(coefficients[i])];
        if let Some(k) = kernel {
            row.push(fmt_f64(k[i]));
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `index,eigenvalue,kernel_value,imf_coefficient` for one IMF.
pub fn write_imf_spectrum(path: &Path, eigenvalues: &[f64], kernel: &[f64], imf_coefficients: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["index", "eigenvalue", "kernel_value", "imf_coefficient"])?;
    for i in 0..eigenvalues.len() {
        w.write_record([
            i.to_string(),
            fmt_f64(eigenvalues[i]),
            fmt_f64(kernel[i]),
            fmt_f64(imf_coefficients[i]),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a headed CSV of reals into named columns.
pub fn read_columns(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let mut rdr = reader(path, true)?;
    let header = rdr.headers()?.clone();
    let mut cols: Vec<(String, Vec<f64>)> = header.iter().map(|h| (h.to_string(), Vec::new())).collect();
    for rec in rdr.records() {
        let rec = rec?;
        let ln = line_of(&rec);
        for (c, (name, col)) in cols.iter_mut().enumerate() {
            col.push(parse_f64(&rec[c], path, ln, name)?);
        }
    }
    Ok(cols)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    f.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Signal;
    use crate::sifting::OperatorDescriptor;
    use std::fs;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn points_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.csv");
        let coords = Coordinates::Plane(vec![[0.1, 0.2], [1.0 / 3.0, -7.0]]);
        write_points(&p, &coords).unwrap();
        let back = read_points(&p).unwrap();
        assert_eq!(back.ids, vec![0, 1]);
        assert_eq!(back.coords, coords);
        let coords = Coordinates::Line(vec![0.5, 1.5, 2.5]);
        write_points(&p, &coords).unwrap();
        assert_eq!(read_points(&p).unwrap().coords, coords);
    }

    #[test]
    fn signal_parsing_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        fs::write(&p, "id,value\n0,1.0\n1,NaN\n").unwrap();
        assert_eq!(read_signal(&p).unwrap_err().kind(), "invalid_input");
        fs::write(&p, "id,value\n0,abc\n").unwrap();
        assert!(read_signal(&p).is_err());
        fs::write(&p, "vertex,value\n0,1\n").unwrap();
        assert!(read_signal(&p).is_err());
        fs::write(&p, "id,value\n1, 2.0\n0,1.0\n").unwrap();
        assert_eq!(read_signal_values(&p).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn binding_reports_mismatches() {
        let rows = [(0, 1.0), (2, 3.0), (5, 0.0)];
        let err = bind_signal(&[0, 1, 2], &rows).unwrap_err();
        let msg = err.to_string();
        assert_eq!(err.kind(), "ingestion");
        assert!(msg.contains("[1]") && msg.contains("[5]"), "{msg}");
        assert!(bind_signal(&[0, 0], &[(0, 1.0)]).is_err());
        assert!(bind_signal(&[0], &[(0, 1.0), (0, 2.0)]).is_err());
        assert_eq!(bind_signal(&[2, 0], &[(0, 1.0), (2, 3.0)]).unwrap(), vec![3.0, 1.0]);
    }

    #[test]
    fn distance_matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let c = crate::distances::circular_distance_matrix(&[0.0, 1.0, 4.0]).unwrap();
        write_distance_matrix(&p, &c).unwrap();
        assert_eq!(read_distance_matrix(&p).unwrap().as_matrix(), c.as_matrix());
        fs::write(&p, "0,1\n1,0,2\n").unwrap();
        assert!(read_distance_matrix(&p).is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (c, j) = (dir.path().join("d.csv"), dir.path().join("d.json"));
        let res = DecompositionResult {
            imfs: vec![Signal::new(vec![0.1, -0.2]).unwrap()],
            residual: Signal::new(vec![1.0, 2.0 / 3.0]).unwrap(),
            meta: vec![ImfMeta {
                iterations: 4,
                extrema_count: 2,
                elapsed_seconds: 0.5,
                operator: OperatorDescriptor::new("dense"),
            }],
            input_checksum: "abc".into(),
        };
        write_decomposition(&c, &j, "dense", &res, Default::default()).unwrap();
        let header = fs::read_to_string(&c).unwrap();
        assert!(header.starts_with("vertex,imf_0,residual\n"));
        let (imfs, residual) = read_decomposition(&c).unwrap();
        assert_eq!(imfs, vec![vec![0.1, -0.2]]);
        assert_eq!(residual, vec![1.0, 2.0 / 3.0]);
        let meta: DecompositionMeta = read_json(&j).unwrap();
        assert_eq!(meta.imfs, res.meta);
        assert_eq!(meta.imf_count, 1);
    }

    #[test]
    fn edges_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        let edges = vec![Edge { i: 0, j: 1, weight: 0.25 }, Edge { i: 1, j: 2, weight: 1.0 / 7.0 }];
        write_edges(&p, &edges).unwrap();
        assert_eq!(read_edges(&p).unwrap(), edges);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = write_signal(&blocker.join("s.csv"), &[1.0]).unwrap_err();
        assert_eq!(err.kind(), "io");
    }
}
