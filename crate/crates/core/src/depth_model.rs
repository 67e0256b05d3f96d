//! Load-to-depth regression from single-wheel-test trace measurements.
//!
//! A measurement records the trough and crest height of the grouser wave
//! left by a wheel under a given vertical load. From each one we derive the
//! mean height and the peak-to-peak amplitude, then fit one straight line per
//! quantity against load. All depths are in millimeters, signed, with
//! negative meaning below the undisturbed surface.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("line {line}: invalid measurement: {msg}")]
    InvalidMeasurement { line: u64, msg: String },
    #[error("need at least two distinct x values to fit a line (got {distinct})")]
    DegenerateData { distinct: usize },
    #[error("observed value at index {index} is zero; percentage error undefined")]
    ZeroObservation { index: usize },
    #[error("no data points")]
    Empty,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model file: {0}")]
    ModelFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwtMeasurement {
    pub load_n: f64,
    pub trough_mm: f64,
    pub crest_mm: f64,
}

impl SwtMeasurement {
    pub fn new(load_n: f64, trough_mm: f64, crest_mm: f64) -> Result<Self, ModelError> {
        let m = Self {
            load_n,
            trough_mm,
            crest_mm,
        };
        m.validate().map_err(|msg| ModelError::InvalidMeasurement { line: 0, msg })?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.load_n.is_finite() && self.load_n > 0.0) {
            return Err(format!("load {} N must be positive", self.load_n));
        }
        if !(self.trough_mm.is_finite() && self.crest_mm.is_finite()) {
            return Err("trough and crest must be finite".into());
        }
        if self.trough_mm > self.crest_mm {
            return Err(format!(
                "trough {} mm lies above crest {} mm",
                self.trough_mm, self.crest_mm
            ));
        }
        Ok(())
    }
}

/// Mean height and peak-to-peak amplitude of one measurement, in mm.
pub fn derive_mean_amplitude(m: &SwtMeasurement) -> Result<(f64, f64), ModelError> {
    m.validate().map_err(|msg| ModelError::InvalidMeasurement { line: 0, msg })?;
    Ok(((m.trough_mm + m.crest_mm) / 2.0, m.crest_mm - m.trough_mm))
}

/// `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearModel {
    pub const fn new(intercept: f64, slope: f64) -> Self {
        Self { intercept, slope }
    }

    #[inline]
    pub fn evaluate(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least-squares line through `points`.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<LinearModel, ModelError> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 {
        return Err(ModelError::DegenerateData { distinct: xs.len() });
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    Ok(LinearModel::new(mean_y - slope * mean_x, slope))
}

/// Coefficient of determination of `model` on `points`.
pub fn r_squared(model: &LinearModel, points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|&(x, y)| (y - model.evaluate(x)).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}

/// Mean absolute error (same unit as y) and mean absolute percentage error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitErrors {
    pub mae: f64,
    pub mpe_percent: f64,
}

pub fn fit_errors(model: &LinearModel, points: &[(f64, f64)]) -> Result<FitErrors, ModelError> {
    if points.is_empty() {
        return Err(ModelError::Empty);
    }
    if let Some(index) = points.iter().position(|p| p.1 == 0.0) {
        return Err(ModelError::ZeroObservation { index });
    }
    let n = points.len() as f64;
    let (mut abs, mut pct) = (0.0, 0.0);
    for &(x, y) in points {
        let r = y - model.evaluate(x);
        abs += r.abs();
        pct += (r / y).abs();
    }
    Ok(FitErrors {
        mae: abs / n,
        mpe_percent: 100.0 * pct / n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Least-squares fit of measurement data.
    Fitted,
    /// The published regression coefficients.
    Published,
    /// Coefficients supplied directly by the user.
    Manual,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Fitted => "fitted",
            Provenance::Published => "published",
            Provenance::Manual => "manual",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFitReport {
    pub mean: FitErrors,
    pub amplitude: FitErrors,
}

/// Mean-depth and amplitude lines, both in mm as a function of load in N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthModel {
    pub provenance: Provenance,
    /// Mean trace height.
    pub mu: LinearModel,
    /// Peak-to-peak wave amplitude.
    pub amp: LinearModel,
    /// Loads the model was fitted over, `[min, max]` in N.
    pub load_range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<ModelFitReport>,
}

/// Mean-height regression as published: `-1.32 - 0.458 F`.
pub const PUBLISHED_MU: LinearModel = LinearModel::new(-1.32, -0.458);
/// Amplitude regression as published: `7.98 + 0.066 F`.
pub const PUBLISHED_AMP: LinearModel = LinearModel::new(7.98, 0.066);

/// Single-wheel-test measurements bundled with the crate.
pub const BUNDLED_MEASUREMENTS: &str = include_str!("../data/swt_measurements.csv");

impl DepthModel {
    pub fn new(
        provenance: Provenance,
        mu: LinearModel,
        amp: LinearModel,
        load_range: [f64; 2],
    ) -> Result<Self, ModelError> {
        let model = Self {
            provenance,
            mu,
            amp,
            load_range,
            errors: None,
        };
        model.validate()?;
        Ok(model)
    }

    /// The published coefficients over the measured load range (3.0-17.9 N).
    pub fn published() -> Self {
        Self::new(Provenance::Published, PUBLISHED_MU, PUBLISHED_AMP, [3.0, 17.9])
            .expect("published coefficients are valid")
    }

    /// Fits both lines to `measurements` and records the fit errors.
    pub fn fit(measurements: &[SwtMeasurement]) -> Result<Self, ModelError> {
        let mut means = Vec::with_capacity(measurements.len());
        let mut amps = Vec::with_capacity(measurements.len());
        for m in measurements {
            let (mean, amp) = derive_mean_amplitude(m)?;
            means.push((m.load_n, mean));
            amps.push((m.load_n, amp));
        }
        let mu = fit_linear(&means)?;
        let amp = fit_linear(&amps)?;
        let lo = measurements.iter().map(|m| m.load_n).fold(f64::INFINITY, f64::min);
        let hi = measurements.iter().map(|m| m.load_n).fold(f64::NEG_INFINITY, f64::max);
        let mut model = Self::new(Provenance::Fitted, mu, amp, [lo, hi])?;
        model.errors = Some(ModelFitReport {
            mean: fit_errors(&mu, &means)?,
            amplitude: fit_errors(&amp, &amps)?,
        });
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = [self.mu.intercept, self.mu.slope, self.amp.intercept, self.amp.slope]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(ModelError::InvalidModel("coefficients must be finite".into()));
        }
        let [lo, hi] = self.load_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ModelError::InvalidModel(format!("load range [{lo}, {hi}] is empty")));
        }
        // amp is linear, so checking the endpoints covers the whole range
        if self.amp.evaluate(lo) <= 0.0 || self.amp.evaluate(hi) <= 0.0 {
            return Err(ModelError::InvalidModel(
                "amplitude must be positive over the load range".into(),
            ));
        }
        Ok(())
    }

    /// Mean trace height at `load_n`, mm.
    #[inline]
    pub fn mean_mm(&self, load_n: f64) -> f64 {
        self.mu.evaluate(load_n)
    }

    /// Peak-to-peak amplitude at `load_n`, mm.
    #[inline]
    pub fn amplitude_mm(&self, load_n: f64) -> f64 {
        self.amp.evaluate(load_n)
    }

    pub fn covers(&self, load_n: f64) -> bool {
        (self.load_range[0]..=self.load_range[1]).contains(&load_n)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("depth model serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, ModelError> {
        let model: Self = toml::from_str(text).map_err(|e| ModelError::ModelFile(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }
}

const HEADER: [&str; 3] = ["load_n", "trough_mm", "crest_mm"];

/// Parses `load_n,trough_mm,crest_mm` rows. `#` starts a comment line.
pub fn parse_measurements(text: &str) -> Result<Vec<SwtMeasurement>, ModelError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(false)
        .from_reader(text.as_bytes());

    let mut rows = Vec::new();
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| ModelError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !header_seen {
            if record.iter().collect::<Vec<_>>() != HEADER {
                return Err(ModelError::Parse {
                    line,
                    msg: format!("expected header `{}`", HEADER.join(",")),
                });
            }
            header_seen = true;
            continue;
        }
        if record.len() != 3 {
            return Err(ModelError::Parse {
                line,
                msg: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let field = |i: usize| -> Result<f64, ModelError> {
            record[i].parse::<f64>().map_err(|e| ModelError::Parse {
                line,
                msg: format!("{}: {e}", HEADER[i]),
            })
        };
        let m = SwtMeasurement {
            load_n: field(0)?,
            trough_mm: field(1)?,
            crest_mm: field(2)?,
        };
        m.validate().map_err(|msg| ModelError::InvalidMeasurement { line, msg })?;
        rows.push(m);
    }
    if !header_seen {
        return Err(ModelError::Parse {
            line: 1,
            msg: "missing header line".into(),
        });
    }
    if rows.is_empty() {
        return Err(ModelError::Parse {
            line: 1,
            msg: "no measurement rows".into(),
        });
    }
    Ok(rows)
}

pub fn load_measurements(path: impl AsRef<Path>) -> Result<Vec<SwtMeasurement>, ModelError> {
    parse_measurements(&fs::read_to_string(path)?)
}

pub fn bundled_measurements() -> Vec<SwtMeasurement> {
    parse_measurements(BUNDLED_MEASUREMENTS).expect("bundled measurements parse")
}
