//! CSV interchange: grid data in, bin-point estimates and rate reports out.
//!
//! Numbers are written with 17 significant digits so doubles survive a
//! round trip exactly; files use LF line endings and end with a newline.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::GridValue;
use crate::simulation::RateStudyReport;

/// Formats a double with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Coordinates and responses read from a `u1,...,uq,y` file.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCsv {
    pub q: usize,
    /// Row-major `n x q`.
    pub u: Vec<f64>,
    pub y: Vec<f64>,
}

impl GridCsv {
    pub fn n(&self) -> usize {
        self.y.len()
    }
}

fn coordinate_header(q: usize) -> Vec<String> {
    (1..=q).map(|s| format!("u{s}")).collect()
}

/// Reads a grid data file with header `u1,...,uq,y`.
pub fn read_grid_csv(path: &Path) -> Result<GridCsv> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.len() < 2 || header.last().map(String::as_str) != Some("y") {
        return Err(Error::HeaderMismatch(format!(
            "expected `u1,...,uq,y`, found `{}`",
            header.join(",")
        )));
    }
    let q = header.len() - 1;
    if header[..q] != coordinate_header(q)[..] {
        return Err(Error::HeaderMismatch(format!(
            "expected coordinate columns `{}`, found `{}`",
            coordinate_header(q).join(","),
            header[..q].join(",")
        )));
    }

    let mut u = Vec::new();
    let mut y = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != q + 1 {
            return Err(Error::Parse {
                path: path.to_owned(),
                line,
                message: format!("expected {} fields, found {}", q + 1, record.len()),
            });
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.to_owned(),
                line,
                message: format!("`{field}` in column {} is not a number", header[col]),
            })?;
            if col < q {
                u.push(value);
            } else {
                y.push(value);
            }
        }
    }
    Ok(GridCsv { q, u, y })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            path: path.to_owned(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn write_rows<'a>(
    path: &Path,
    header: &[String],
    rows: impl Iterator<Item = (&'a [f64], f64)>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for (coords, value) in rows {
        for c in coords {
            write!(out, "{},", format_f64(*c))?;
        }
        writeln!(out, "{}", format_f64(value))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a grid data file readable by [`read_grid_csv`].
pub fn write_grid_csv(path: &Path, q: usize, u: &[f64], y: &[f64]) -> Result<()> {
    if u.len() != q * y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} coordinates for {} responses in dimension {q}",
            u.len(),
            y.len()
        )));
    }
    let mut header = coordinate_header(q);
    header.push("y".into());
    write_rows(path, &header, u.chunks_exact(q).zip(y.iter().copied()))
}

/// Writes bin-point estimates with header `u1,...,uq,fhat`.
pub fn write_estimate_csv(path: &Path, rows: &[GridValue]) -> Result<()> {
    write_grid_values(path, rows, "fhat")
}

/// Writes bin-point values with header `u1,...,uq,<column>`.
pub fn write_grid_values(path: &Path, rows: &[GridValue], column: &str) -> Result<()> {
    let q = rows.first().map_or(0, |r| r.point.len());
    let mut header = coordinate_header(q);
    header.push(column.into());
    write_rows(path, &header, rows.iter().map(|r| (r.point.as_slice(), r.value)))
}

/// Writes `rates.csv`: one row per sample size.
pub fn write_rates_csv(path: &Path, report: &RateStudyReport) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let pointwise = report.pointwise_slope.is_some();
    write!(out, "n,mean_mise,se,slope")?;
    if pointwise {
        write!(out, ",pointwise_mean,pointwise_se,pointwise_slope")?;
    }
    writeln!(out)?;
    for row in &report.rows {
        write!(
            out,
            "{},{},{},{}",
            row.n,
            format_f64(row.mean_mise),
            format_f64(row.se),
            format_f64(report.slope)
        )?;
        if let (Some(m), Some(s), Some(slope)) =
            (row.pointwise_mean, row.pointwise_se, report.pointwise_slope)
        {
            write!(out, ",{},{},{}", format_f64(m), format_f64(s), format_f64(slope))?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Human-readable summary of a rate study.
pub fn rate_summary(report: &RateStudyReport) -> String {
    let mut s = String::new();
    s.push_str("       n      mean MISE        std err\n");
    for row in &report.rows {
        s.push_str(&format!("{:>8} {:>14.6e} {:>14.6e}\n", row.n, row.mean_mise, row.se));
    }
    s.push_str(&format!(
        "log-log slope {:.4} (nominal target {:.4})\n",
        report.slope, report.target_slope
    ));
    if let Some(p) = report.pointwise_slope {
        s.push_str(&format!("pointwise log-log slope {p:.4}\n"));
    }
    for w in &report.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s
}
