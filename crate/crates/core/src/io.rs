//! CSV formats exchanged with plotting scripts and between CLI runs.
//!
//! Floats are written in the shortest form that parses back to the same
//! double, switching to scientific notation outside `1e-6 <= |v| < 1e6`.

use std::io::{Read, Write};

use crate::evaluator::GridPoint;
use crate::system::{CoefficientSet, SolveMethod};
use crate::{Error, Result, Vec3};

/// Shortest round-trip decimal form of `v`.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let a = v.abs();
    if v == 0.0 || (1e-6..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub const FIELD_HEADER: [&str; 9] = ["x", "y", "z", "u", "gx", "gy", "gz", "gnorm", "region"];

/// Writes sampled grid points as `x,y,z,u,gx,gy,gz,gnorm,region`. Points
/// outside the domain keep their coordinates and carry `nan` elsewhere.
pub fn write_field_csv<W: Write>(out: W, points: &[GridPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FIELD_HEADER)?;
    for p in points {
        let pos = p.position();
        let mut row = vec![format_f64(pos.x), format_f64(pos.y), format_f64(pos.z)];
        match p {
            GridPoint::Field(s) => {
                row.extend([s.u, s.grad.x, s.grad.y, s.grad.z, s.grad_norm].map(format_f64));
                row.push(s.region.code().to_string());
            }
            GridPoint::Outside(_) => row.extend(std::iter::repeat_n("nan".to_string(), 6)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const COEFF_HEADER: [&str; 6] = ["index", "cx", "cy", "cz", "method", "residual"];

/// Writes `index,cx,cy,cz,method,residual`, one row per inclusion.
pub fn write_coefficients<W: Write>(out: W, coeffs: &CoefficientSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COEFF_HEADER)?;
    for (i, c) in coeffs.vectors.iter().enumerate() {
        w.write_record([
            i.to_string(),
            format_f64(c.x),
            format_f64(c.y),
            format_f64(c.z),
            coeffs.method.to_string(),
            format_f64(coeffs.residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_float(s: &str, line: usize, column: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}, column {column}: `{s}` is not a number")))
}

/// Reads a coefficient file written by [`write_coefficients`]. The
/// iteration count is not stored and reads back as zero.
pub fn read_coefficients<R: Read>(input: R) -> Result<CoefficientSet> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != COEFF_HEADER {
        return Err(Error::Parse(format!("expected header {}", COEFF_HEADER.join(","))));
    }
    let mut vectors = Vec::new();
    let mut method = None;
    let mut residual = f64::NAN;
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let index: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}, column index: `{}` is not an index", &rec[0])))?;
        if index != row {
            return Err(Error::Parse(format!("line {line}: expected index {row}, found {index}")));
        }
        vectors.push(Vec3::new(
            parse_float(&rec[1], line, "cx")?,
            parse_float(&rec[2], line, "cy")?,
            parse_float(&rec[3], line, "cz")?,
        ));
        method = Some(rec[4].parse::<SolveMethod>()?);
        residual = parse_float(&rec[5], line, "residual")?;
    }
    let method = method.ok_or_else(|| Error::Parse("coefficient file has no rows".into()))?;
    Ok(CoefficientSet {
        vectors,
        method,
        iterations: 0,
        residual,
    })
}

/// Writes the `x1,u_minus_wf_system,u_minus_wf_homog` comparison followed
/// by a `sup_gap=<value>` line.
pub fn write_homog_compare<W: Write>(mut out: W, x1: &[f64], system: &[f64], homog: &[f64], sup_gap: f64) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["x1", "u_minus_wf_system", "u_minus_wf_homog"])?;
        for ((x, s), h) in x1.iter().zip(system).zip(homog) {
            w.write_record([format_f64(*x), format_f64(*s), format_f64(*h)])?;
        }
        w.flush()?;
    }
    writeln!(out, "sup_gap={}", format_f64(sup_gap))?;
    Ok(())
}
