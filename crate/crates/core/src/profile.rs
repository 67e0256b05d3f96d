//! Interchangeable trace profiles, selected by name at runtime.
//!
//! A [`TraceProfile`] turns a wheel, soil and load into a [`StampKernel`]:
//! the per-stamp constants that the engine evaluates at every texel. Profiles
//! are registered in a [`ProfileRegistry`] and looked up by the name given in
//! the scenario config (`profile.kind`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::depth_model::DepthModel;
use crate::trace_geometry::{lateral_profile_tan, wave_frequency, SoilParams, TraceError, WheelSpec};

/// Constants for evaluating one stamp. Depths in mm, lengths in m.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StampKernel {
    /// Multiplier `k` in `cos(k π ξ)`.
    pub wave_number: f64,
    pub half_amplitude_mm: f64,
    pub mean_mm: f64,
    pub half_width: f64,
    pub tan_repose: f64,
}

impl StampKernel {
    /// Signed elevation change in meters at trace coordinate `(ξ, y)`.
    #[inline]
    pub fn depth(&self, xi: f64, y: f64) -> f64 {
        let g = lateral_profile_tan(y, self.half_width, self.tan_repose);
        if g == 0.0 {
            return 0.0;
        }
        let h = (self.wave_number * PI * xi).cos();
        -g * (self.half_amplitude_mm * h + self.mean_mm) * 1e-3
    }

    /// Upper bound on `|depth|`, meters.
    pub fn bound(&self) -> f64 {
        (self.half_amplitude_mm.abs() + self.mean_mm.abs()) * 1e-3
    }
}

pub trait TraceProfile: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn kernel(
        &self,
        wheel: &WheelSpec,
        soil: &SoilParams,
        model: &DepthModel,
        load_n: f64,
        slip: f64,
    ) -> Result<StampKernel, TraceError>;
}

impl fmt::Debug for dyn TraceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TraceProfile({})", self.name())
    }
}

fn base_kernel(
    wheel: &WheelSpec,
    soil: &SoilParams,
    model: &DepthModel,
    load_n: f64,
    slip: f64,
) -> Result<StampKernel, TraceError> {
    Ok(StampKernel {
        wave_number: wave_frequency(wheel, slip)?,
        half_amplitude_mm: 0.5 * model.amplitude_mm(load_n),
        mean_mm: model.mean_mm(load_n),
        half_width: 0.5 * wheel.width,
        tan_repose: soil.repose_angle.tan(),
    })
}

/// `cos(nπξ)` with `n = N / (2πr(1-s))`, taken literally. Its period is
/// `2/n`, twice the grouser pitch.
#[derive(Debug, Default)]
pub struct GrouserWave;

impl TraceProfile for GrouserWave {
    fn name(&self) -> &'static str {
        "grouser-wave"
    }

    fn description(&self) -> &'static str {
        "cos(n*pi*xi) grouser wave over a trapezoidal trench"
    }

    fn kernel(
        &self,
        wheel: &WheelSpec,
        soil: &SoilParams,
        model: &DepthModel,
        load_n: f64,
        slip: f64,
    ) -> Result<StampKernel, TraceError> {
        base_kernel(wheel, soil, model, load_n, slip)
    }
}

/// Same wave with its period set to one grouser pitch, `2πr(1-s)/N`.
#[derive(Debug, Default)]
pub struct GrouserPitch;

impl TraceProfile for GrouserPitch {
    fn name(&self) -> &'static str {
        "grouser-pitch"
    }

    fn description(&self) -> &'static str {
        "grouser wave with one trough per grouser pitch"
    }

    fn kernel(
        &self,
        wheel: &WheelSpec,
        soil: &SoilParams,
        model: &DepthModel,
        load_n: f64,
        slip: f64,
    ) -> Result<StampKernel, TraceError> {
        let mut k = base_kernel(wheel, soil, model, load_n, slip)?;
        k.wave_number *= 2.0;
        Ok(k)
    }
}

/// Mean sinkage only, no grouser wave. Useful for smooth wheels.
#[derive(Debug, Default)]
pub struct FlatRut;

impl TraceProfile for FlatRut {
    fn name(&self) -> &'static str {
        "flat-rut"
    }

    fn description(&self) -> &'static str {
        "trapezoidal rut at mean depth without grouser marks"
    }

    fn kernel(
        &self,
        wheel: &WheelSpec,
        soil: &SoilParams,
        model: &DepthModel,
        load_n: f64,
        slip: f64,
    ) -> Result<StampKernel, TraceError> {
        let mut k = base_kernel(wheel, soil, model, load_n, slip)?;
        k.half_amplitude_mm = 0.0;
        Ok(k)
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown trace profile `{name}` (available: {})", available.join(", "))]
pub struct UnknownProfile {
    pub name: String,
    pub available: Vec<&'static str>,
}

pub const DEFAULT_PROFILE: &str = "grouser-wave";

#[derive(Clone, Default)]
pub struct ProfileRegistry {
    entries: BTreeMap<&'static str, Arc<dyn TraceProfile>>,
}

impl ProfileRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry holding every built-in profile.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(GrouserWave));
        r.register(Arc::new(GrouserPitch));
        r.register(Arc::new(FlatRut));
        r
    }

    /// Adds `profile`, replacing any entry of the same name. Returns the
    /// replaced entry.
    pub fn register(&mut self, profile: Arc<dyn TraceProfile>) -> Option<Arc<dyn TraceProfile>> {
        self.entries.insert(profile.name(), profile)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn TraceProfile>, UnknownProfile> {
        self.entries.get(name).cloned().ok_or_else(|| UnknownProfile {
            name: name.to_string(),
            available: self.names(),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn TraceProfile>> {
        self.entries.values()
    }
}

impl fmt::Debug for ProfileRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}
