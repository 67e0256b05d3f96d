//! Size sweep report with a linear fit of re-mesh time against texels.

use std::io::{self, Write};

use thiserror::Error;

use crate::depth_model::{fit_linear, r_squared, LinearModel, ModelError};
use crate::heightfield::HeightfieldError;
use crate::timing::{update_timing_sweep, SweepOptions, SweepRow};

/// Full-mesh update time measured for a 1e6-texel terrain on the reference
/// GPU workstation, ms. Hardware-bound; printed for comparison only.
pub const REFERENCE_REMESH_MS_AT_1M: f64 = 12.9;

pub const DEFAULT_EXTENTS: [f64; 3] = [10.0, 20.0, 40.0];
pub const DEFAULT_RESOLUTIONS: [f64; 3] = [0.05, 0.1, 0.2];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("need at least 3 size/resolution points, got {0}")]
    TooFewPoints(usize),
    #[error(transparent)]
    Map(#[from] HeightfieldError),
    #[error("fit failed: {0}")]
    Fit(#[from] ModelError),
}

/// Cross product of extents and resolutions, extent-major.
pub fn size_grid(extents: &[f64], resolutions: &[f64]) -> Vec<(f64, f64)> {
    extents
        .iter()
        .flat_map(|&e| resolutions.iter().map(move |&r| (e, r)))
        .collect()
}

pub fn default_sizes() -> Vec<(f64, f64)> {
    size_grid(&DEFAULT_EXTENTS, &DEFAULT_RESOLUTIONS)
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<SweepRow>,
    /// `remesh_ms ≈ intercept + slope * texels`.
    pub remesh_fit: LinearModel,
    pub remesh_r2: f64,
}

impl BenchReport {
    pub fn from_rows(rows: Vec<SweepRow>) -> Result<Self, BenchError> {
        if rows.len() < 3 {
            return Err(BenchError::TooFewPoints(rows.len()));
        }
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.texels as f64, r.remesh_ms)).collect();
        let remesh_fit = fit_linear(&pts)?;
        let remesh_r2 = r_squared(&remesh_fit, &pts);
        Ok(Self {
            rows,
            remesh_fit,
            remesh_r2,
        })
    }

    /// Fitted re-mesh time at one million texels, ms.
    pub fn remesh_ms_at_1m(&self) -> f64 {
        self.remesh_fit.evaluate(1e6)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "texels,stamp_ms,remesh_ms,grid_bytes")?;
        for r in &self.rows {
            writeln!(out, "{},{:.6},{:.6},{}", r.texels, r.stamp_ms, r.remesh_ms, r.grid_bytes)?;
        }
        writeln!(
            out,
            "# remesh_ms = {:.6e} + {:.6e} * texels; r2 = {:.4}",
            self.remesh_fit.intercept, self.remesh_fit.slope, self.remesh_r2
        )?;
        writeln!(
            out,
            "# fitted remesh at 1e6 texels: {:.3} ms (reference hardware: {} ms)",
            self.remesh_ms_at_1m(),
            REFERENCE_REMESH_MS_AT_1M
        )?;
        out.flush()
    }
}

pub fn run_bench(sizes: &[(f64, f64)], opts: &SweepOptions) -> Result<BenchReport, BenchError> {
    if sizes.len() < 3 {
        return Err(BenchError::TooFewPoints(sizes.len()));
    }
    BenchReport::from_rows(update_timing_sweep(sizes, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(texels: usize, remesh_ms: f64) -> SweepRow {
        SweepRow {
            extent: 0.0,
            resolution: 0.0,
            texels,
            stamp_ms: 0.01,
            remesh_ms,
            grid_bytes: 48 + 8 * texels,
        }
    }

    #[test]
    fn default_grid_has_nine_points() {
        let sizes = default_sizes();
        assert_eq!(sizes.len(), 9);
        let texels: Vec<usize> = sizes.iter().map(|(e, r)| ((e / r).round() as usize).pow(2)).collect();
        assert_eq!(*texels.iter().min().unwrap(), 2_500);
        assert_eq!(*texels.iter().max().unwrap(), 640_000);
    }

    #[test]
    fn exact_line_has_unit_r2() {
        let rows = vec![row(100, 1.0), row(200, 2.0), row(400, 4.0)];
        let rep = BenchReport::from_rows(rows).unwrap();
        assert!((rep.remesh_r2 - 1.0).abs() < 1e-12);
        assert!((rep.remesh_ms_at_1m() - 1e4).abs() < 1e-6);
    }

    #[test]
    fn csv_layout() {
        let rep = BenchReport::from_rows(vec![row(100, 1.0), row(200, 2.5), row(400, 4.0)]).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("texels,stamp_ms,remesh_ms,grid_bytes"));
        assert_eq!(lines.next(), Some("100,0.010000,1.000000,848"));
        assert!(text.contains("r2 = "));
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            run_bench(&[(10.0, 0.1), (20.0, 0.1)], &SweepOptions::default()),
            Err(BenchError::TooFewPoints(2))
        ));
    }
}
