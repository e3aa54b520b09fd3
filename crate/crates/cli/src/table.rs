//! Frequency-response tables and per-iteration trace tables as CSV.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const DB_FLOOR: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseRow {
    /// Frequency in units of π.
    pub omega: f64,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub magnitude_db: f64,
    pub phase: f64,
}

impl ResponseRow {
    pub fn new(omega: f64, h: Complex64) -> Self {
        let magnitude = h.norm();
        let magnitude_db = if magnitude > 0.0 {
            (20.0 * magnitude.log10()).max(DB_FLOOR)
        } else {
            DB_FLOOR
        };
        Self {
            omega,
            re: h.re,
            im: h.im,
            magnitude,
            magnitude_db,
            phase: h.arg(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTable {
    pub rows: Vec<ResponseRow>,
}

impl ResponseTable {
    /// Samples `response` at `points` uniformly spaced frequencies on `[0, π]`.
    pub fn sample<F>(points: usize, mut response: F) -> sharpkit::error::Result<Self>
    where
        F: FnMut(f64) -> sharpkit::error::Result<Complex64>,
    {
        let points = points.max(2);
        let rows = (0..points)
            .map(|i| {
                let frac = i as f64 / (points - 1) as f64;
                response(PI * frac).map(|h| ResponseRow::new(frac, h))
            })
            .collect::<sharpkit::error::Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_rows(path, &self.rows)
    }
}

/// One Remez iteration.
#[derive(Debug, Clone, Serialize)]
pub struct RemezRow {
    pub iteration: usize,
    pub reference_size: usize,
    pub discrete_delta: f64,
    pub continuum_delta: f64,
    /// Newly added reference point in units of π.
    pub new_point: f64,
}

pub fn remez_rows(trace: &sharpkit::remez::RemezTrace, scale: f64) -> Vec<RemezRow> {
    trace
        .iterations
        .iter()
        .enumerate()
        .map(|(i, it)| RemezRow {
            iteration: i + 1,
            reference_size: it.reference_size,
            discrete_delta: it.discrete_delta,
            continuum_delta: it.continuum_delta,
            new_point: it.new_point / scale,
        })
        .collect()
}

/// One outer iteration of magnitude sharpening.
#[derive(Debug, Clone, Serialize)]
pub struct MagRow {
    pub iteration: usize,
    pub delta: f64,
    pub magnitude_error: f64,
}

pub fn mag_rows(trace: &sharpkit::magsharpen::MagSharpenTrace) -> Vec<MagRow> {
    trace
        .deltas
        .iter()
        .zip(&trace.magnitude_errors)
        .enumerate()
        .map(|(i, (&delta, &magnitude_error))| MagRow {
            iteration: i + 1,
            delta,
            magnitude_error,
        })
        .collect()
}

/// Error after each accepted decomposition step.
#[derive(Debug, Clone, Serialize)]
pub struct HistoryRow {
    pub step: usize,
    pub l2_error: f64,
}

pub fn history_rows(history: &[f64]) -> Vec<HistoryRow> {
    history
        .iter()
        .enumerate()
        .map(|(step, &l2_error)| HistoryRow { step, l2_error })
        .collect()
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let to_io = |e: csv::Error| CliError::io(path, std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(to_io)?;
    for row in rows {
        w.serialize(row).map_err(to_io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
