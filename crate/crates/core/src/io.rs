//! CSV formats for points, edges, fields, labels and vertex lists.

use std::io::{Read, Write};

use crate::error::{GacError, Result};
use crate::field::{ScalarField, VectorField};
use crate::geometry::Point2;
use crate::graph::SpatialGraph;

fn expect_header(rdr: &mut csv::Reader<impl Read>, allowed: &[&[&str]]) -> Result<usize> {
    let h = rdr.headers()?.clone();
    let cols: Vec<&str> = h.iter().map(str::trim).collect();
    allowed
        .iter()
        .position(|a| *a == cols.as_slice())
        .ok_or_else(|| {
            let want: Vec<String> = allowed.iter().map(|a| a.join(",")).collect();
            GacError::Csv(format!("header `{}` is not one of: {}", cols.join(","), want.join(" | ")))
        })
}

fn parse<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let s = rec.get(i).unwrap_or("").trim();
    s.parse().map_err(|_| GacError::Csv(format!("line {line}: cannot parse `{s}`")))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// Writes `x,y` or `x,y,value`.
pub fn write_points_csv(w: impl Write, points: &[Point2], values: Option<&[f64]>) -> Result<()> {
    if let Some(v) = values {
        if v.len() != points.len() {
            return Err(GacError::FieldMismatch { expected: points.len(), found: v.len() });
        }
    }
    let mut out = csv::Writer::from_writer(w);
    match values {
        Some(v) => {
            out.write_record(["x", "y", "value"])?;
            for (p, val) in points.iter().zip(v) {
                out.serialize((p.x, p.y, val))?;
            }
        }
        None => {
            out.write_record(["x", "y"])?;
            for p in points {
                out.serialize((p.x, p.y))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads `x,y[,value]`; the values are returned when the column exists.
pub fn read_points_csv(r: impl Read) -> Result<(Vec<Point2>, Option<Vec<f64>>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let with_values = expect_header(&mut rdr, &[&["x", "y"], &["x", "y", "value"]])? == 1;
    let mut points = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        points.push(Point2::new(parse(&rec, 0, line)?, parse(&rec, 1, line)?));
        if with_values {
            values.push(parse(&rec, 2, line)?);
        }
    }
    Ok((points, with_values.then_some(values)))
}

/// Writes every undirected edge once as `src,dst` with `src < dst`.
pub fn write_edges_csv(w: impl Write, graph: &SpatialGraph) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["src", "dst"])?;
    for e in graph.edges() {
        out.serialize(e)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_edges_csv(r: impl Read) -> Result<Vec<(usize, usize)>> {
    let mut rdr = csv::Reader::from_reader(r);
    expect_header(&mut rdr, &[&["src", "dst"]])?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let line = line_of(&rec);
            Ok((parse(&rec, 0, line)?, parse(&rec, 1, line)?))
        })
        .collect()
}

/// Writes `vertex,value`.
pub fn write_scalar_csv(w: impl Write, f: &ScalarField) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["vertex", "value"])?;
    for (v, x) in f.values().iter().enumerate() {
        out.serialize((v, x))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `vertex,vx,vy`.
pub fn write_vector_csv(w: impl Write, f: &VectorField) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["vertex", "vx", "vy"])?;
    for (v, x) in f.values().iter().enumerate() {
        out.serialize((v, x[0], x[1]))?;
    }
    out.flush()?;
    Ok(())
}

// Rows of `vertex,<cols>` that must list vertices 0..n exactly once.
fn read_vertex_rows(r: impl Read, cols: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut header = vec!["vertex"];
    header.extend_from_slice(cols);
    expect_header(&mut rdr, &[header.as_slice()])?;
    let mut rows: Vec<Option<Vec<f64>>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let v: usize = parse(&rec, 0, line)?;
        let vals = (1..=cols.len()).map(|i| parse(&rec, i, line)).collect::<Result<Vec<f64>>>()?;
        if v >= rows.len() {
            rows.resize(v + 1, None);
        }
        if rows[v].replace(vals).is_some() {
            return Err(GacError::Csv(format!("line {line}: vertex {v} listed twice")));
        }
    }
    rows.into_iter()
        .enumerate()
        .map(|(v, r)| r.ok_or_else(|| GacError::Csv(format!("vertex {v} is missing"))))
        .collect()
}

pub fn read_scalar_csv(r: impl Read) -> Result<Vec<f64>> {
    Ok(read_vertex_rows(r, &["value"])?.into_iter().map(|x| x[0]).collect())
}

pub fn read_vector_csv(r: impl Read) -> Result<Vec<[f64; 2]>> {
    Ok(read_vertex_rows(r, &["vx", "vy"])?.into_iter().map(|x| [x[0], x[1]]).collect())
}

/// Writes `vertex,interior` with 0/1 flags.
pub fn write_labels_csv(w: impl Write, labels: &[bool]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["vertex", "interior"])?;
    for (v, &b) in labels.iter().enumerate() {
        out.serialize((v, u8::from(b)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_labels_csv(r: impl Read) -> Result<Vec<bool>> {
    read_vertex_rows(r, &["interior"])?
        .into_iter()
        .enumerate()
        .map(|(v, x)| match x[0] {
            x if x == 0.0 => Ok(false),
            x if x == 1.0 => Ok(true),
            x => Err(GacError::Csv(format!("vertex {v}: interior flag {x} is not 0 or 1"))),
        })
        .collect()
}

/// Reads a single `vertex` column of indices.
pub fn read_indices_csv(r: impl Read) -> Result<Vec<usize>> {
    let mut rdr = csv::Reader::from_reader(r);
    expect_header(&mut rdr, &[&["vertex"]])?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            parse(&rec, 0, line_of(&rec))
        })
        .collect()
}

pub fn write_indices_csv(w: impl Write, indices: &[usize]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["vertex"])?;
    for i in indices {
        out.serialize(i)?;
    }
    out.flush()?;
    Ok(())
}
