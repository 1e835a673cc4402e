//! File ingestion and serialization: numeric CSV readers for each backend,
//! the JSON fit document, and small write helpers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclidean::{Euclidean, VecPoint};
use crate::metric::{Space, TimeSeries};
use crate::solver::FitResult;
use crate::spd::{SpdMetric, SpdPoint, SpdSpace, SymMat};
use crate::wasserstein::{quantile_from_samples, QuantilePoint, WassersteinSpace};

/// Current version of the JSON documents written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// Parse comma-separated numeric rows. Blank lines and lines starting with
/// `#` are skipped; every remaining cell must parse as a float.
pub fn parse_numeric_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "line {}: cell {cell:?} is not a number",
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse(format!(
                    "line {}: expected {w} columns, got {}",
                    lineno + 1,
                    row.len()
                )));
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(rows)
}

/// Write rows as plain CSV.
pub fn write_csv(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Converts points to/from their flat numeric row representation; this is
/// the on-disk vocabulary shared by CSV input and JSON output.
pub trait PointCodec: Space {
    fn encode_row(&self, p: &Self::Point) -> Vec<f64>;
    fn decode_row(&self, row: &[f64], scale: f64) -> Result<Self::Point>;
    fn space_name(&self) -> String;
}

impl PointCodec for Euclidean {
    fn encode_row(&self, p: &VecPoint) -> Vec<f64> {
        p.coords().to_vec()
    }

    fn decode_row(&self, row: &[f64], scale: f64) -> Result<VecPoint> {
        if row.len() != self.dim() {
            return Err(Error::invalid(format!(
                "expected {} columns, got {}",
                self.dim(),
                row.len()
            )));
        }
        let p = VecPoint::new(row.iter().map(|v| v * scale).collect());
        self.check(&p)?;
        Ok(p)
    }

    fn space_name(&self) -> String {
        "euclidean".into()
    }
}

impl PointCodec for SpdSpace {
    fn encode_row(&self, p: &SpdPoint) -> Vec<f64> {
        p.mat().data().to_vec()
    }

    /// Row-major m² entries; symmetry and positive definiteness validated.
    fn decode_row(&self, row: &[f64], scale: f64) -> Result<SpdPoint> {
        let m = self.dim();
        if row.len() != m * m {
            return Err(Error::invalid(format!(
                "expected {} columns for a {m}x{m} matrix, got {}",
                m * m,
                row.len()
            )));
        }
        let mat = SymMat::from_row_major(m, row.iter().map(|v| v * scale).collect())?;
        SpdPoint::new(mat)
    }

    fn space_name(&self) -> String {
        match self.metric() {
            SpdMetric::AffineInvariant => "spd-ai".into(),
            SpdMetric::LogEuclidean => "spd-le".into(),
        }
    }
}

impl PointCodec for WassersteinSpace {
    fn encode_row(&self, p: &QuantilePoint) -> Vec<f64> {
        p.values().to_vec()
    }

    fn decode_row(&self, row: &[f64], scale: f64) -> Result<QuantilePoint> {
        if row.len() != self.grid_size() {
            return Err(Error::invalid(format!(
                "expected {} quantile columns, got {}",
                self.grid_size(),
                row.len()
            )));
        }
        QuantilePoint::new(row.iter().map(|v| v * scale).collect())
    }

    fn space_name(&self) -> String {
        "wasserstein".into()
    }
}

fn rows_to_series<S: PointCodec>(
    rows: &[Vec<f64>],
    space: &S,
    scale: f64,
) -> Result<TimeSeries<S::Point>> {
    let pts = rows
        .iter()
        .map(|r| space.decode_row(r, scale))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::equispaced(pts, space)
}

/// Load a Euclidean series: n rows × k columns of reals; k inferred.
pub fn load_euclidean(path: &Path, scale: f64) -> Result<(Euclidean, TimeSeries<VecPoint>)> {
    let rows = parse_numeric_csv(&fs::read_to_string(path)?)?;
    let space = Euclidean::new(rows[0].len());
    let series = rows_to_series(&rows, &space, scale)?;
    Ok((space, series))
}

/// Load an SPD series: each row the row-major vectorization (m² columns) of
/// one matrix; m inferred from the column count.
pub fn load_spd(
    path: &Path,
    metric: SpdMetric,
    scale: f64,
) -> Result<(SpdSpace, TimeSeries<SpdPoint>)> {
    let rows = parse_numeric_csv(&fs::read_to_string(path)?)?;
    let cols = rows[0].len();
    let m = (cols as f64).sqrt().round() as usize;
    if m * m != cols {
        return Err(Error::invalid(format!(
            "{cols} columns is not a square matrix size"
        )));
    }
    let space = SpdSpace::new(m, metric);
    let series = rows_to_series(&rows, &space, scale)?;
    Ok((space, series))
}

/// Load a Wasserstein series in quantile mode: n rows × G columns of
/// nondecreasing quantile values; G inferred.
pub fn load_wasserstein(
    path: &Path,
    scale: f64,
) -> Result<(WassersteinSpace, TimeSeries<QuantilePoint>)> {
    let rows = parse_numeric_csv(&fs::read_to_string(path)?)?;
    let space = WassersteinSpace::new(rows[0].len());
    let series = rows_to_series(&rows, &space, scale)?;
    Ok((space, series))
}

/// Load a Wasserstein series in sample mode: one file of raw samples per
/// time point inside `dir` (lexicographic file order = time order), each
/// converted to a quantile function on `grid_size` nodes.
pub fn load_wasserstein_samples(
    dir: &Path,
    grid_size: usize,
    scale: f64,
) -> Result<(WassersteinSpace, TimeSeries<QuantilePoint>)> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::invalid(format!(
            "no sample files in {}",
            dir.display()
        )));
    }
    let space = WassersteinSpace::new(grid_size);
    let mut points = Vec::with_capacity(files.len());
    for f in &files {
        let rows = parse_numeric_csv(&fs::read_to_string(f)?)
            .map_err(|e| Error::Parse(format!("{}: {e}", f.display())))?;
        let samples: Vec<f64> = rows.into_iter().flatten().map(|v| v * scale).collect();
        points.push(quantile_from_samples(&samples, grid_size)?);
    }
    let series = TimeSeries::equispaced(points, &space)?;
    Ok((space, series))
}

/// JSON-shaped fit output: fitted values are rows in the same vectorized
/// form the CSV readers accept, so output can be re-ingested.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitDocument {
    pub schema_version: u32,
    pub space: String,
    pub lambda: f64,
    pub breakpoints: Vec<f64>,
    pub fitted: Vec<Vec<f64>>,
    pub jumps: Vec<usize>,
    pub objective_trace: Vec<f64>,
    pub cycles_run: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_jumps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub achieved_jumps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_jump_count: Option<bool>,
}

impl FitDocument {
    pub fn from_result<S: PointCodec>(space: &S, res: &FitResult<S::Point>) -> Self {
        FitDocument {
            schema_version: SCHEMA_VERSION,
            space: space.space_name(),
            lambda: res.lambda,
            breakpoints: res.step.breakpoints().to_vec(),
            fitted: res.fitted.iter().map(|p| space.encode_row(p)).collect(),
            jumps: res.jumps.clone(),
            objective_trace: res.objective_trace.clone(),
            cycles_run: res.cycles_run,
            converged: res.converged,
            target_jumps: None,
            achieved_jumps: None,
            exact_jump_count: None,
        }
    }
}

/// Serialize any document as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
