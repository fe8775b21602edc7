//! Comma-separated point files.
//!
//! One point per row. A first row containing any non-numeric cell is a
//! header. When the header's last cell is `label`, that column holds integer
//! labels rather than a coordinate. Values are written in shortest
//! round-trip form, so write-then-read is exact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Result, WfrError};
use crate::types::{Dataset, Labels};

/// Name of the label column.
pub const LABEL_COLUMN: &str = "label";

/// Raw contents of a point file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointTable {
    pub header: Option<Vec<String>>,
    /// Coordinates only; any label column is split off into `labels`.
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<i32>>,
}

impl PointTable {
    pub fn row_slices(&self) -> Vec<&[f64]> {
        self.rows.iter().map(Vec::as_slice).collect()
    }

    pub fn to_dataset(&self) -> Result<Dataset> {
        Dataset::from_rows(&self.rows)
    }
}

fn csv_err(path: &Path, row: usize, message: impl Into<String>) -> WfrError {
    WfrError::Csv {
        path: path.to_path_buf(),
        row,
        message: message.into(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => WfrError::Io {
                path: path.to_path_buf(),
                source,
            },
            other => csv_err(path, 0, format!("{other:?}")),
        })
}

/// Reads every record as strings, with 1-based line numbers, skipping blank lines.
fn records(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, rec) in reader(path)?.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(i + 1, |p| p.line() as usize);
            csv_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

fn parse_label(path: &Path, line: usize, cell: &str) -> Result<i32> {
    let v: i32 = cell
        .parse()
        .map_err(|_| csv_err(path, line, format!("label `{cell}` is not an integer")))?;
    if v < -1 {
        return Err(csv_err(path, line, format!("label {v} below -1")));
    }
    Ok(v)
}

pub fn read_table(path: &Path) -> Result<PointTable> {
    let mut recs = records(path)?.into_iter().peekable();
    let header = match recs.peek() {
        Some((_, cells)) if cells.iter().any(|c| c.parse::<f64>().is_err()) => {
            recs.next().map(|(_, cells)| cells)
        }
        _ => None,
    };
    let has_labels = header
        .as_ref()
        .and_then(|h| h.last())
        .is_some_and(|c| c.eq_ignore_ascii_case(LABEL_COLUMN));
    let mut width = header.as_ref().map(Vec::len);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (line, cells) in recs {
        match width {
            Some(w) if w != cells.len() => {
                return Err(csv_err(
                    path,
                    line,
                    format!("expected {w} cells, found {}", cells.len()),
                ))
            }
            None => width = Some(cells.len()),
            _ => {}
        }
        let coords = if has_labels {
            let (last, rest) = cells.split_last().expect("width checked");
            labels.push(parse_label(path, line, last)?);
            rest
        } else {
            &cells[..]
        };
        let row = coords
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| csv_err(path, line, format!("`{c}` is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if has_labels && width == Some(1) {
        // a labels-only file has no coordinates
        rows.clear();
    }
    Ok(PointTable {
        header,
        rows,
        labels: has_labels.then_some(labels),
    })
}

/// Reads points, dropping any label column.
pub fn read_points_csv(path: &Path) -> Result<Dataset> {
    let table = read_table(path)?;
    if table.rows.is_empty() || table.rows[0].is_empty() {
        return Err(csv_err(path, 0, "no points"));
    }
    table.to_dataset()
}

/// Reads labels from a `label` column, or from a single-column file.
pub fn read_labels_csv(path: &Path) -> Result<Labels> {
    let table = read_table(path)?;
    if let Some(labels) = table.labels {
        return Labels::new(labels);
    }
    let mut out = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let [v] = row.as_slice() else {
            return Err(csv_err(path, i + 1, "no label column"));
        };
        if v.fract() != 0.0 || *v < -1.0 || *v > i32::MAX as f64 {
            return Err(csv_err(path, i + 1, format!("label {v} is not a valid id")));
        }
        out.push(*v as i32);
    }
    Labels::new(out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| WfrError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Writes `x0,…,x{d-1}[,label]` with a header row.
pub fn write_points_csv(path: &Path, data: &Dataset, labels: Option<&Labels>) -> Result<()> {
    if let Some(l) = labels {
        if l.len() != data.n() {
            return Err(WfrError::LengthMismatch {
                left: data.n(),
                right: l.len(),
            });
        }
    }
    let io = |source| WfrError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = create(path)?;
    let mut header: Vec<String> = (0..data.d()).map(|a| format!("x{a}")).collect();
    if labels.is_some() {
        header.push(LABEL_COLUMN.into());
    }
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for (i, p) in data.rows().enumerate() {
        let mut cells: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        if let Some(l) = labels {
            cells.push(l[i].to_string());
        }
        writeln!(w, "{}", cells.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Writes a single `label` column.
pub fn write_labels_csv(path: &Path, labels: &Labels) -> Result<()> {
    let io = |source| WfrError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = create(path)?;
    writeln!(w, "{LABEL_COLUMN}").map_err(io)?;
    for l in labels.as_slice() {
        writeln!(w, "{l}").map_err(io)?;
    }
    w.flush().map_err(io)
}
