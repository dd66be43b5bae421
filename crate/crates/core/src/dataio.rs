//! CSV ingestion and report output.
//!
//! The CSV dialect is fixed: comma delimiter, a header row, UTF-8, and
//! locale-independent numbers. Columns are located by header name.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimators::XYDataset;
use crate::metrics::PairedObservations;

/// A titled rectangular table of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct TableDocument {
    pub title: String,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl TableDocument {
    pub fn new<S: Into<String>>(
        title: impl Into<String>,
        columns: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            title: title.into(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::domain(format!(
                "row has {} values but the table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column_index(&self, label: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == label)
    }
}

/// Renders a number with at most six significant digits, without exponent
/// notation or digit grouping.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatted float parses");
    rounded.to_string()
}

struct ColumnReader {
    path: PathBuf,
    headers: csv::StringRecord,
    records: Vec<csv::StringRecord>,
}

impl ColumnReader {
    fn open(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = reader.headers()?.clone();
        let records = reader
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self {
            path: path.to_path_buf(),
            headers,
            records,
        })
    }

    fn index(&self, column: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| Error::MissingColumn {
                path: self.path.clone(),
                column: column.to_string(),
            })
    }

    /// Parses one column, requiring finite values and, when `positive` is
    /// set, values strictly above zero.
    fn column(&self, column: &str, positive: bool) -> Result<Vec<f64>> {
        let idx = self.index(column)?;
        self.records
            .iter()
            .enumerate()
            .map(|(i, record)| {
                let row = i + 1;
                let line = record.position().map_or(row + 1, |p| p.line() as usize);
                let raw = record.get(idx).unwrap_or("");
                let value: f64 = raw.parse().map_err(|_| Error::Parse {
                    path: self.path.clone(),
                    row,
                    line,
                    column: column.to_string(),
                    value: raw.to_string(),
                })?;
                let problem = if !value.is_finite() {
                    Some(format!("value {raw} is not finite"))
                } else if positive && value <= 0.0 {
                    Some(format!("value {raw} must be strictly positive"))
                } else {
                    None
                };
                match problem {
                    Some(message) => Err(Error::Validation {
                        path: self.path.clone(),
                        row,
                        line,
                        column: column.to_string(),
                        message,
                    }),
                    None => Ok(value),
                }
            })
            .collect()
    }
}

pub fn load_xy_csv(path: impl AsRef<Path>, x_column: &str, y_column: &str) -> Result<XYDataset> {
    let reader = ColumnReader::open(path.as_ref())?;
    reader.index(x_column)?;
    reader.index(y_column)?;
    let xs = reader.column(x_column, false)?;
    let ys = reader.column(y_column, true)?;
    XYDataset::new(xs, ys)
}

pub fn load_paired_csv(
    path: impl AsRef<Path>,
    actual_column: &str,
    predicted_column: &str,
) -> Result<PairedObservations> {
    let reader = ColumnReader::open(path.as_ref())?;
    reader.index(actual_column)?;
    reader.index(predicted_column)?;
    let actuals = reader.column(actual_column, true)?;
    let predictions = reader.column(predicted_column, true)?;
    PairedObservations::new(actuals, predictions)
}

/// Writes an XY dataset with full round-trip precision.
pub fn write_xy_csv(
    data: &XYDataset,
    x_label: &str,
    y_label: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{x_label},{y_label}")?;
    for (x, y) in data.xs().iter().zip(data.ys()) {
        writeln!(out, "{x},{y}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_table_csv(doc: &TableDocument, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", doc.columns.join(","))?;
    for row in &doc.rows {
        let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a table written by [`write_table_csv`]; the title is the file stem.
pub fn read_table_csv(path: impl AsRef<Path>) -> Result<TableDocument> {
    let path = path.as_ref();
    let reader = ColumnReader::open(path)?;
    let title = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let columns: Vec<String> = reader.headers.iter().map(str::to_string).collect();
    let data = columns
        .iter()
        .map(|c| reader.column(c, false))
        .collect::<Result<Vec<_>>>()?;
    let mut doc = TableDocument::new(title, columns);
    for r in 0..reader.records.len() {
        doc.push_row(data.iter().map(|col| col[r]).collect())?;
    }
    Ok(doc)
}

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;
/// Smallest half-range of the vertical axis, in log units.
const MIN_LNQ_RANGE: f64 = 0.01;

/// Draws one vertical bar per observation at its x position, above the zero
/// baseline for over-predictions and below it for under-predictions. Also
/// writes the `(x, ln_q)` series next to the SVG with a `.csv` extension and
/// returns that path.
pub fn write_residual_svg(
    ln_q_residuals: &[f64],
    xs: &[f64],
    path: impl AsRef<Path>,
) -> Result<PathBuf> {
    if ln_q_residuals.len() != xs.len() {
        return Err(Error::domain(format!(
            "{} residuals but {} x values",
            ln_q_residuals.len(),
            xs.len()
        )));
    }
    let path = path.as_ref();

    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let r_max = ln_q_residuals
        .iter()
        .fold(MIN_LNQ_RANGE, |m, r| m.max(r.abs()));
    let plot_w = SVG_WIDTH - 2.0 * MARGIN;
    let half_h = 0.5 * (SVG_HEIGHT - 2.0 * MARGIN);
    let baseline = SVG_HEIGHT / 2.0;
    let x_pos = |x: f64| {
        if x_max > x_min {
            MARGIN + (x - x_min) / (x_max - x_min) * plot_w
        } else {
            MARGIN + 0.5 * plot_w
        }
    };
    let y_scale = half_h / r_max;
    let bar_w = (plot_w / (xs.len().max(1) as f64 * 1.5)).clamp(1.0, 12.0);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\">\n\
         <title>Log accuracy ratio by x</title>\n\
         <text x=\"{MARGIN}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\">ln(predicted / actual); positive bars are over-predictions</text>\n",
        MARGIN / 2.0
    ));
    for (x, r) in xs.iter().zip(ln_q_residuals) {
        let h = r.abs() * y_scale;
        let top = if *r > 0.0 { baseline - h } else { baseline };
        let fill = if *r > 0.0 { "#4a7fb5" } else { "#c0504d" };
        svg.push_str(&format!(
            "<rect class=\"bar\" data-x=\"{x}\" data-lnq=\"{r}\" x=\"{:.3}\" y=\"{top:.3}\" width=\"{bar_w:.3}\" height=\"{h:.3}\" fill=\"{fill}\"/>\n",
            x_pos(*x) - bar_w / 2.0
        ));
    }
    svg.push_str(&format!(
        "<line class=\"baseline\" x1=\"{MARGIN}\" y1=\"{baseline}\" x2=\"{}\" y2=\"{baseline}\" stroke=\"black\" stroke-width=\"1\"/>\n</svg>\n",
        SVG_WIDTH - MARGIN
    ));
    std::fs::write(path, svg)?;

    let csv_path = path.with_extension("csv");
    let mut out = BufWriter::new(File::create(&csv_path)?);
    writeln!(out, "x,ln_q")?;
    for (x, r) in xs.iter().zip(ln_q_residuals) {
        writeln!(out, "{x},{r}")?;
    }
    out.flush()?;
    Ok(csv_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_number(86.9), "86.9");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0 / 3.0), "0.333333");
        assert_eq!(format_number(1234567.0), "1234570");
        assert_eq!(format_number(-4.567891234), "-4.56789");
        assert_eq!(format_number(100.0), "100");
    }

    #[test]
    fn table_rows_must_be_rectangular() {
        let mut t = TableDocument::new("t", ["a", "b"]);
        assert!(t.push_row(vec![1.0, 2.0]).is_ok());
        assert!(t.push_row(vec![1.0]).is_err());
        assert_eq!(t.rows().len(), 1);
    }
}
