//! Typed result tables, written as CSV with a TOML metadata sidecar.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ResolvedConfig;
use crate::error::{CliError, Result};

/// Significant digits of every float written to CSV.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Int,
    Float,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    /// Quantity undefined for this row (e.g. `I/H_S` with `H_S = 0`).
    Missing,
}

impl Cell {
    fn fits(&self, kind: ColumnKind) -> bool {
        matches!(
            (self, kind),
            (Cell::Missing, _)
                | (Cell::Int(_), ColumnKind::Int)
                | (Cell::Float(_), ColumnKind::Float)
                | (Cell::Text(_), ColumnKind::Text)
        )
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

/// `%.12g`-style rendering, independent of locale; `-0` prints as `0`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `(N, n)` of sector ground states with a degenerate level.
    pub degenerate_sectors: Vec<(usize, usize)>,
    /// Largest BLP convergence estimate over all rows.
    pub blp_convergence: Option<f64>,
    /// Largest BLP grid used.
    pub blp_grid_points: Option<usize>,
    /// Worst deviation from the dense oracles, per check.
    pub oracle_deviations: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub code_version: String,
    pub columns: Vec<Column>,
    pub rows: usize,
    pub wall_time_s: f64,
    pub workers: usize,
    pub diagnostics: Diagnostics,
    pub config: Option<ResolvedConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub diagnostics: Diagnostics,
    pub config: Option<ResolvedConfig>,
    pub wall_time_s: f64,
}

impl ResultTable {
    pub fn new(name: impl Into<String>, columns: &[(&str, ColumnKind)]) -> Self {
        Self {
            name: name.into(),
            columns: columns
                .iter()
                .map(|(n, k)| Column {
                    name: n.to_string(),
                    kind: *k,
                })
                .collect(),
            rows: Vec::new(),
            diagnostics: Diagnostics::default(),
            config: None,
            wall_time_s: 0.0,
        }
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(CliError::Validation(format!(
                "row has {} cells, schema has {}",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some((cell, col)) = row.iter().zip(&self.columns).find(|(c, col)| !c.fits(col.kind)) {
            return Err(CliError::Validation(format!(
                "cell {cell:?} does not fit column {}",
                col.name
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Values of a column, `None` where missing.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            columns: self.columns.clone(),
            rows: self.rows.len(),
            wall_time_s: self.wall_time_s,
            workers: rayon::current_num_threads(),
            diagnostics: self.diagnostics.clone(),
            config: self.config.clone(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.column_names())?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.meta.toml`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        let meta_path = dir.join(format!("{}.meta.toml", self.name));
        std::fs::write(&csv_path, self.to_csv()?)?;
        std::fs::write(&meta_path, toml::to_string(&self.metadata())?)?;
        Ok((csv_path, meta_path))
    }
}
