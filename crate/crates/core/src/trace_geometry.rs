//! Geometry of a single grouser-wheel trace.
//!
//! A trace is the product of a lateral trench profile `g(y)` and a
//! longitudinal grouser wave `h(ξ)` whose depth and amplitude come from the
//! load regression in [`crate::depth_model`]. Lateral coordinates are in the
//! wheel's local frame (x forward, y left); `ξ` is arc length along the trace
//! in world meters.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::depth_model::DepthModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("slip ratio {0} >= 1 makes the wave frequency singular")]
    SlipSingularity(f64),
    #[error("slip ratio {0} must be >= 0")]
    InvalidSlip(f64),
    #[error("invalid wheel: {0}")]
    InvalidWheel(String),
    #[error("repose angle {0} rad must lie in (0, pi/2)")]
    InvalidReposeAngle(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WheelSpec {
    pub radius: f64,
    pub width: f64,
    pub grouser_count: u32,
    /// Not used by the trace model; kept for bookkeeping.
    #[serde(default)]
    pub grouser_length: f64,
}

impl WheelSpec {
    pub fn new(radius: f64, width: f64, grouser_count: u32) -> Result<Self, TraceError> {
        let w = Self {
            radius,
            width,
            grouser_count,
            grouser_length: 0.0,
        };
        w.validate()?;
        Ok(w)
    }

    /// 200 mm diameter, 80 mm wide, 14 grousers of 20 mm.
    pub fn rashid() -> Self {
        Self {
            radius: 0.1,
            width: 0.08,
            grouser_count: 14,
            grouser_length: 0.02,
        }
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(TraceError::InvalidWheel(format!("radius {} must be > 0", self.radius)));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(TraceError::InvalidWheel(format!("width {} must be > 0", self.width)));
        }
        if self.grouser_count == 0 {
            return Err(TraceError::InvalidWheel("grouser count must be >= 1".into()));
        }
        Ok(())
    }

    /// Footprint of the wheel projected on the ground.
    pub fn foot_profile(&self) -> FootProfile {
        FootProfile {
            half_length: self.radius,
            half_width: 0.5 * self.width,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoilParams {
    /// Angle of repose, radians.
    pub repose_angle: f64,
}

impl SoilParams {
    pub fn new(repose_angle: f64) -> Result<Self, TraceError> {
        if !(repose_angle > 0.0 && repose_angle < FRAC_PI_2) {
            return Err(TraceError::InvalidReposeAngle(repose_angle));
        }
        Ok(Self { repose_angle })
    }

    pub fn from_degrees(deg: f64) -> Result<Self, TraceError> {
        Self::new(deg.to_radians())
    }
}

/// Edge tolerance for footprint membership, m.
pub const EDGE_TOLERANCE: f64 = 1e-9;

/// Rectangle `[-half_length, half_length] x [-half_width, half_width]` in the
/// wheel's local frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootProfile {
    pub half_length: f64,
    pub half_width: f64,
}

impl FootProfile {
    /// Half-open membership: inclusive on the min edges, exclusive on the max
    /// edges. Points within [`EDGE_TOLERANCE`] of an edge are treated as on it,
    /// so texel centers that sit exactly on an edge classify the same way
    /// regardless of rounding in the pose transform.
    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (hx, hy) = (self.half_length, self.half_width);
        x >= -hx - EDGE_TOLERANCE
            && x < hx - EDGE_TOLERANCE
            && y >= -hy - EDGE_TOLERANCE
            && y < hy - EDGE_TOLERANCE
    }

    /// Local points sampled on a `step` lattice centered on the wheel.
    pub fn sample_points(&self, step: f64) -> Vec<[f64; 2]> {
        let nx = (self.half_length / step + 1e-9).floor() as i64;
        let ny = (self.half_width / step + 1e-9).floor() as i64;
        let mut pts = Vec::new();
        for j in -ny..=ny {
            for i in -nx..=nx {
                let (x, y) = (i as f64 * step, j as f64 * step);
                if self.contains(x, y) {
                    pts.push([x, y]);
                }
            }
        }
        pts
    }
}

/// Longitudinal wave of one trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceWave {
    /// Spatial frequency `n`, 1/m; the wave is `cos(n π ξ)`.
    pub frequency: f64,
    pub slip: f64,
}

impl TraceWave {
    pub fn new(wheel: &WheelSpec, slip: f64) -> Result<Self, TraceError> {
        Ok(Self {
            frequency: wave_frequency(wheel, slip)?,
            slip,
        })
    }

    /// Distance between successive troughs, `2 / n`.
    pub fn period(&self) -> f64 {
        2.0 / self.frequency
    }

    pub fn at(&self, xi: f64) -> f64 {
        longitudinal_profile(xi, self.frequency)
    }
}

pub fn check_slip(slip: f64) -> Result<(), TraceError> {
    if slip >= 1.0 {
        Err(TraceError::SlipSingularity(slip))
    } else if slip < 0.0 || slip.is_nan() {
        Err(TraceError::InvalidSlip(slip))
    } else {
        Ok(())
    }
}

/// `n = N / (2π r (1 - s))`.
pub fn wave_frequency(wheel: &WheelSpec, slip: f64) -> Result<f64, TraceError> {
    check_slip(slip)?;
    Ok(wheel.grouser_count as f64 / (2.0 * PI * wheel.radius * (1.0 - slip)))
}

/// `h(ξ) = cos(n π ξ)`.
#[inline]
pub fn longitudinal_profile(xi: f64, frequency: f64) -> f64 {
    (frequency * PI * xi).cos()
}

/// Trapezoidal trench cross-section in `[-1, 0]`; zero outside the wheel.
///
/// With `u = 2y/w`, `g = max(-1, tanθ (|u| - 1))`. For `θ >= 45°` this is the
/// three-branch trapezoid; shallower angles give a V whose floor never
/// reaches -1.
#[inline]
pub fn lateral_profile(y: f64, width: f64, repose_angle: f64) -> f64 {
    lateral_profile_tan(y, 0.5 * width, repose_angle.tan())
}

#[inline]
pub(crate) fn lateral_profile_tan(y: f64, half_width: f64, tan_theta: f64) -> f64 {
    let u = y.abs() / half_width;
    if u >= 1.0 {
        return 0.0;
    }
    (tan_theta * (u - 1.0)).max(-1.0)
}

/// Signed elevation change in meters at trace coordinate `(ξ, y)`.
///
/// `Δz = -g(y) (A(F)/2 · h(ξ) + μ(F))`, where `A` is the model's peak-to-peak
/// amplitude and `μ` its (negative) mean height. On the centerline the wave
/// runs between `μ - A/2` (trough) and `μ + A/2` (crest).
pub fn deformation_depth(
    xi: f64,
    y: f64,
    load_n: f64,
    slip: f64,
    wheel: &WheelSpec,
    soil: &SoilParams,
    model: &DepthModel,
) -> Result<f64, TraceError> {
    let n = wave_frequency(wheel, slip)?;
    let g = lateral_profile(y, wheel.width, soil.repose_angle);
    let h = longitudinal_profile(xi, n);
    let depth_mm = -g * (0.5 * model.amplitude_mm(load_n) * h + model.mean_mm(load_n));
    Ok(depth_mm * 1e-3)
}

/// Largest `|Δz|` in meters that [`deformation_depth`] can produce at `load_n`.
pub fn depth_bound(load_n: f64, model: &DepthModel) -> f64 {
    (0.5 * model.amplitude_mm(load_n).abs() + model.mean_mm(load_n).abs()) * 1e-3
}

#[cfg(test)]
mod tests {
    use super::*;

    fn soil(deg: f64) -> SoilParams {
        SoilParams::from_degrees(deg).unwrap()
    }

    #[test]
    fn frequency_examples() {
        let w = WheelSpec::rashid();
        let n0 = wave_frequency(&w, 0.0).unwrap();
        assert!((n0 - 22.281692032865347).abs() < 1e-12);
        let n5 = wave_frequency(&w, 0.5).unwrap();
        assert!((n5 - 2.0 * n0).abs() < 1e-12);
        assert_eq!(wave_frequency(&w, 1.0), Err(TraceError::SlipSingularity(1.0)));
        assert_eq!(wave_frequency(&w, -0.1), Err(TraceError::InvalidSlip(-0.1)));
    }

    #[test]
    fn longitudinal_examples() {
        let n = wave_frequency(&WheelSpec::rashid(), 0.0).unwrap();
        assert_eq!(longitudinal_profile(0.0, n), 1.0);
        assert!((longitudinal_profile(1.0 / n, n) + 1.0).abs() < 1e-12);
        // one grouser pitch (2πr/N) lands near a trough
        assert!((longitudinal_profile(0.0449, n) + 1.0).abs() < 1e-5);
    }

    #[test]
    fn lateral_examples() {
        let w = 0.08;
        assert_eq!(lateral_profile(0.0, w, 60f64.to_radians()), -1.0);
        assert_eq!(lateral_profile(0.04, w, 60f64.to_radians()), 0.0);
        assert_eq!(lateral_profile(-0.04, w, 60f64.to_radians()), 0.0);
        assert!((lateral_profile(0.02, w, 45f64.to_radians()) + 0.5).abs() < 1e-12);
        assert_eq!(lateral_profile(0.05, w, 60f64.to_radians()), 0.0);
    }

    #[test]
    fn shallow_repose_gives_v_profile() {
        let g0 = lateral_profile(0.0, 0.08, 30f64.to_radians());
        assert!((g0 + 30f64.to_radians().tan()).abs() < 1e-12);
    }

    #[test]
    fn depth_matches_measured_trough_and_crest_at_3n() {
        let model = DepthModel::published();
        let wheel = WheelSpec::rashid();
        let n = wave_frequency(&wheel, 0.0).unwrap();
        let s = soil(60.0);
        let trough = deformation_depth(1.0 / n, 0.0, 3.0, 0.0, &wheel, &s, &model).unwrap();
        let crest = deformation_depth(0.0, 0.0, 3.0, 0.0, &wheel, &s, &model).unwrap();
        assert!((trough * 1e3 - (-2.694 - 4.089)).abs() < 1e-9);
        assert!((crest * 1e3 - (-2.694 + 4.089)).abs() < 1e-9);
        assert!((trough * 1e3 + 6.5).abs() < 0.75);
        assert!((crest * 1e3 - 1.5).abs() < 0.75);
    }

    #[test]
    fn depth_vanishes_at_trench_edge() {
        let model = DepthModel::published();
        let wheel = WheelSpec::rashid();
        for f in [0.0, 3.0, 9.0, 17.9] {
            for y in [0.04, -0.04] {
                let dz = deformation_depth(0.013, y, f, 0.2, &wheel, &soil(50.0), &model).unwrap();
                assert_eq!(dz, 0.0);
            }
        }
    }

    #[test]
    fn depth_propagates_slip_errors() {
        let model = DepthModel::published();
        let r = deformation_depth(0.0, 0.0, 3.0, 1.0, &WheelSpec::rashid(), &soil(60.0), &model);
        assert!(matches!(r, Err(TraceError::SlipSingularity(_))));
    }

    #[test]
    fn foot_profile_lattice() {
        let fp = WheelSpec::rashid().foot_profile();
        // x in {-0.1..0.08} (10), y in {-0.04..0.02} (4)
        assert_eq!(fp.sample_points(0.02).len(), 40);
    }

    #[test]
    fn wheel_and_soil_validation() {
        assert!(WheelSpec::new(0.0, 0.08, 14).is_err());
        assert!(WheelSpec::new(0.1, 0.08, 0).is_err());
        assert!(SoilParams::new(0.0).is_err());
        assert!(SoilParams::new(FRAC_PI_2).is_err());
    }
}
