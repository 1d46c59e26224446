//! CSV tables and SVG heatmaps for experiment results.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so parsing
//! an emitted table gives back the exact values; infinity is written `inf`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::aggregation::Variant;
use crate::error::{Error, Result};
use crate::experiments::{PerformanceMatrix, RatioTable};

/// A result that can be written as CSV.
pub trait CsvTable {
    fn header(&self) -> Vec<String>;
    fn records(&self) -> Vec<Vec<String>>;

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for r in self.records() {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn emit_csv(table: &impl CsvTable, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, table.to_csv()?)?;
    Ok(())
}

fn num(v: f64) -> String {
    v.to_string()
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("'{s}' is not a number")))
}

impl CsvTable for PerformanceMatrix {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["criterion".to_string()];
        h.extend(self.labels.iter().cloned());
        h.push("row_average".into());
        h
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.labels
            .iter()
            .zip(&self.normalized)
            .zip(&self.row_averages)
            .map(|((label, row), avg)| {
                let mut r = vec![label.clone()];
                r.extend(row.iter().copied().map(num));
                r.push(num(*avg));
                r
            })
            .collect()
    }
}

/// Normalized matrix and row averages parsed from [`PerformanceMatrix`] CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTable {
    pub labels: Vec<String>,
    pub normalized: Vec<Vec<f64>>,
    pub row_averages: Vec<f64>,
}

pub fn parse_matrix_csv(text: &str) -> Result<MatrixTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    let c = header.len().saturating_sub(2);
    if header.get(0) != Some("criterion") || header.get(c + 1) != Some("row_average") {
        return Err(Error::Malformed("matrix CSV header must be criterion,...,row_average".into()));
    }
    let labels: Vec<String> = header.iter().skip(1).take(c).map(String::from).collect();
    let mut normalized = Vec::new();
    let mut row_averages = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.get(0) != labels.get(i).map(String::as_str) {
            return Err(Error::Malformed(format!("row {} label does not match its column", i + 1)));
        }
        let vals = rec.iter().skip(1).map(parse_num).collect::<Result<Vec<f64>>>()?;
        row_averages.push(vals[c]);
        normalized.push(vals[..c].to_vec());
    }
    if normalized.len() != c {
        return Err(Error::Malformed(format!("expected {c} rows, found {}", normalized.len())));
    }
    Ok(MatrixTable {
        labels,
        normalized,
        row_averages,
    })
}

impl CsvTable for RatioTable {
    fn header(&self) -> Vec<String> {
        let mut h = vec![self.parameter.label().to_string()];
        h.extend(self.variants.iter().map(Variant::to_string));
        h
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .zip(&self.mean)
            .map(|(p, row)| {
                let mut r = vec![num(*p)];
                r.extend(row.iter().copied().map(num));
                r
            })
            .collect()
    }
}

/// Sweep points and mean ratios parsed from [`RatioTable`] CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCsv {
    pub parameter: String,
    pub variants: Vec<Variant>,
    pub points: Vec<f64>,
    pub mean: Vec<Vec<f64>>,
}

pub fn parse_ratio_csv(text: &str) -> Result<RatioCsv> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    let parameter = header
        .get(0)
        .ok_or_else(|| Error::Malformed("empty ratio CSV header".into()))?
        .to_string();
    let variants = header.iter().skip(1).map(str::parse).collect::<Result<Vec<Variant>>>()?;
    let mut points = Vec::new();
    let mut mean = Vec::new();
    for rec in r.records() {
        let vals = rec?.iter().map(parse_num).collect::<Result<Vec<f64>>>()?;
        points.push(vals[0]);
        mean.push(vals[1..].to_vec());
    }
    Ok(RatioCsv {
        parameter,
        variants,
        points,
        mean,
    })
}

const CELL: usize = 56;
const MARGIN: usize = 90;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

// white at 1.0 shading to red at `hi` and beyond
fn colour(v: f64, hi: f64) -> String {
    let t = if v.is_finite() && hi > 1.0 {
        ((v - 1.0) / (hi - 1.0)).clamp(0.0, 1.0)
    } else if v.is_finite() {
        0.0
    } else {
        1.0
    };
    let g = (255.0 - 175.0 * t).round() as u8;
    format!("#ff{g:02x}{g:02x}")
}

/// Heatmap of the normalized matrix with two-decimal cell labels.
pub fn heatmap_svg(matrix: &PerformanceMatrix) -> String {
    let c = matrix.labels.len();
    let hi = matrix
        .normalized
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(1.0, f64::max);
    let size = MARGIN + c * CELL + 10;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="11">"#
    );
    for (j, label) in matrix.labels.iter().enumerate() {
        let x = MARGIN + j * CELL + CELL / 2;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="middle">{}</text>"#,
            escape(label),
            y = MARGIN - 8
        );
    }
    for (i, row) in matrix.normalized.iter().enumerate() {
        let y = MARGIN + i * CELL;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{ty}" text-anchor="end">{}</text>"#,
            escape(&matrix.labels[i]),
            x = MARGIN - 6,
            ty = y + CELL / 2 + 4
        );
        for (j, &v) in row.iter().enumerate() {
            let x = MARGIN + j * CELL;
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="grey"/>"#,
                colour(v, hi)
            );
            let label = if v.is_finite() { format!("{v:.2}") } else { "inf".into() };
            let _ = writeln!(
                s,
                r#"<text x="{tx}" y="{ty}" text-anchor="middle">{label}</text>"#,
                tx = x + CELL / 2,
                ty = y + CELL / 2 + 4
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_heatmap_svg(matrix: &PerformanceMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, heatmap_svg(matrix))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::SweepParam;

    fn matrix() -> PerformanceMatrix {
        PerformanceMatrix::from_values(
            vec!["regret".into(), "OWA_2".into()],
            vec![vec![vec![1.0, 3.0], vec![2.0, 2.5]], vec![vec![0.0, 1.0], vec![3.0, 1.0]]],
            Vec::new(),
        )
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = matrix();
        let text = m.to_csv().unwrap();
        assert!(text.starts_with("criterion,regret,OWA_2,row_average\n"));
        assert!(text.contains("inf"));
        let back = parse_matrix_csv(&text).unwrap();
        assert_eq!(back.labels, m.labels);
        assert_eq!(back.normalized, m.normalized);
        assert_eq!(back.row_averages, m.row_averages);
    }

    #[test]
    fn svg_has_one_label_per_cell_and_is_stable() {
        let m = matrix();
        let svg = heatmap_svg(&m);
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.contains(">1.00<"));
        assert!(svg.contains(">inf<"));
        assert_eq!(svg, heatmap_svg(&m));
    }

    #[test]
    fn ratio_csv_round_trip() {
        let t = RatioTable {
            parameter: SweepParam::KPrime,
            points: vec![1.0, 2.0],
            variants: vec![Variant::KOoDw, Variant::Random],
            mean: vec![vec![1.25, 1.5], vec![1.0, 1.0 / 3.0 + 1.0]],
            min: Vec::new(),
            max: Vec::new(),
            repetitions: 1,
        };
        let text = t.to_csv().unwrap();
        assert!(text.starts_with("Kprime,K-OO-DW,Random\n1,1.25,1.5\n"));
        let back = parse_ratio_csv(&text).unwrap();
        assert_eq!(back.parameter, "Kprime");
        assert_eq!(back.variants, t.variants);
        assert_eq!(back.points, t.points);
        assert_eq!(back.mean, t.mean);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_matrix_csv("a,b\n").is_err());
        assert!(parse_matrix_csv("criterion,x,row_average\ny,1,1\n").is_err());
        assert!(parse_ratio_csv("K,Nope\n1,1\n").is_err());
    }
}
