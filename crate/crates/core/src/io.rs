//! Text formats for point samples and frequency tables.
//!
//! Point file: `dim <n>`, `region <R_s>`, then one point per line as
//! whitespace-separated decimals. Table file: `dim <n>`, `cutoff <c>`,
//! `density <d>`, optionally `uncertainty <u>`, then `v_1 … v_n rho` per line
//! in lexicographic order. Blank lines and lines starting with `#` are
//! skipped.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::frequency::{FrequencyEntry, FrequencyTable};
use crate::linalg;
use crate::pointset::{DensityEstimate, PointSample};

fn content_lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|r| match r {
            Ok((_, l)) => {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        })
}

fn header<T: std::str::FromStr>(line: Option<Result<(usize, String)>>, key: &str) -> Result<T> {
    let (no, text) = line.ok_or_else(|| Error::parse(0, format!("missing `{key}` header")))??;
    let mut parts = text.split_whitespace();
    if parts.next() != Some(key) {
        return Err(Error::parse(no, format!("expected `{key} <value>`")));
    }
    let value = parts
        .next()
        .ok_or_else(|| Error::parse(no, format!("`{key}` needs a value")))?;
    if parts.next().is_some() {
        return Err(Error::parse(no, format!("trailing text after `{key}`")));
    }
    value
        .parse()
        .map_err(|_| Error::parse(no, format!("bad value {value:?} for `{key}`")))
}

fn numbers(no: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(no, format!("bad number {t:?}")))
        })
        .collect()
}

pub fn read_points(reader: impl BufRead) -> Result<PointSample> {
    let mut lines = content_lines(reader);
    let dim: usize = header(lines.next(), "dim")?;
    let region: f64 = header(lines.next(), "region")?;
    if dim == 0 {
        return Err(Error::parse(1, "dimension must be positive"));
    }
    let mut coords = Vec::new();
    for line in lines {
        let (no, text) = line?;
        let p = numbers(no, &text)?;
        if p.len() != dim {
            return Err(Error::parse(no, format!("expected {dim} coordinates, got {}", p.len())));
        }
        coords.extend(p);
    }
    PointSample::new(dim, coords, region, "read from file")
}

pub fn write_points(sample: &PointSample, mut writer: impl Write) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "dim {}", sample.dim()).unwrap();
    writeln!(out, "region {}", sample.region_radius()).unwrap();
    for p in sample.points() {
        let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    writer.write_all(out.as_bytes())?;
    Ok(())
}

pub fn write_table(table: &FrequencyTable, mut writer: impl Write) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "dim {}", table.dim).unwrap();
    writeln!(out, "cutoff {}", table.cutoff).unwrap();
    writeln!(out, "density {}", table.density.value).unwrap();
    writeln!(out, "uncertainty {}", table.sampling_uncertainty()).unwrap();
    for e in &table.entries {
        let row: Vec<String> = e.v.iter().chain([&e.rho]).map(|x| x.to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    writer.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a table. The density becomes a single-radius estimate whose trace
/// reproduces the recorded uncertainty; the source counts as integral when
/// every difference vector is.
pub fn read_table(reader: impl BufRead) -> Result<FrequencyTable> {
    let mut lines = content_lines(reader).peekable();
    let dim: usize = header(lines.next(), "dim")?;
    let cutoff: f64 = header(lines.next(), "cutoff")?;
    let density: f64 = header(lines.next(), "density")?;
    if dim == 0 {
        return Err(Error::parse(1, "dimension must be positive"));
    }
    let uncertainty: f64 = match lines.peek() {
        Some(Ok((_, t))) if t.trim_start().starts_with("uncertainty") => header(lines.next(), "uncertainty")?,
        _ => 0.0,
    };
    let mut entries = Vec::new();
    for line in lines {
        let (no, text) = line?;
        let mut row = numbers(no, &text)?;
        if row.len() != dim + 1 {
            return Err(Error::parse(no, format!("expected {} values, got {}", dim + 1, row.len())));
        }
        let rho = row.pop().unwrap();
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::parse(no, format!("frequency {rho} outside [0, 1]")));
        }
        entries.push(FrequencyEntry {
            v: row,
            rho,
            exact: None,
        });
    }
    entries.sort_by(|a, b| linalg::lex_cmp(&a.v, &b.v));
    let source_integral = entries.iter().all(|e| e.v.iter().all(|x| x.fract() == 0.0));
    let trace = if uncertainty > 0.0 {
        vec![(cutoff, density - uncertainty), (cutoff, density)]
    } else {
        vec![(cutoff, density)]
    };
    Ok(FrequencyTable {
        dim,
        entries,
        density: DensityEstimate {
            value: density,
            radius_used: cutoff,
            erosion_margin: 0.0,
            center_count: 1,
            sup_over_centers: false,
            grid_spacing: None,
            trace,
        },
        exact_density: None,
        cutoff,
        radius: cutoff,
        source_label: "read from file".to_string(),
        source_integral,
    })
}
