//! Per-frame terrain update from wheel contacts.
//!
//! For each contact the engine finds the pixel rectangle covering the wheel
//! footprint, then writes `pristine + Δz` into every texel whose center lies
//! inside the footprint. Writes are absolute and last-write-wins, so
//! re-stamping the same contact is a no-op and overlapping stamps never
//! accumulate.
//!
//! The wave phase `ξ` of a texel is its projection on the contact's
//! `travel_axis`, measured from `trace_origin`. Straight-line stamps that
//! share an origin therefore agree texel-for-texel wherever they overlap.

use std::sync::Arc;
use std::time::{Duration, Instant};

use log::warn;
use thiserror::Error;

use crate::depth_model::DepthModel;
use crate::heightfield::{Heightmap, PixelRegion};
use crate::profile::{GrouserWave, StampKernel, TraceProfile};
use crate::trace_geometry::{check_slip, SoilParams, TraceError, WheelSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("wheel footprint lies entirely off the map")]
    Disjoint,
    #[error("vertical load {0} N must be finite and >= 0")]
    InvalidLoad(f64),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WheelContact {
    /// Wheel center projected on the ground, world m.
    pub position: [f64; 2],
    /// Yaw of the wheel's forward axis, rad.
    pub heading: f64,
    pub load_n: f64,
    pub slip: f64,
    /// World point where the trace coordinate `ξ` is zero.
    pub trace_origin: [f64; 2],
    /// Unit vector along which `ξ` grows.
    pub travel_axis: [f64; 2],
}

impl WheelContact {
    /// Contact whose trace starts at `position` and runs along `heading`.
    pub fn new(position: [f64; 2], heading: f64, load_n: f64, slip: f64) -> Self {
        Self {
            position,
            heading,
            load_n,
            slip,
            trace_origin: position,
            travel_axis: [heading.cos(), heading.sin()],
        }
    }

    /// Anchors the wave so that `ξ` at the wheel center equals `travel`.
    pub fn with_travel(mut self, travel: f64) -> Self {
        let [ax, ay] = self.travel_axis;
        self.trace_origin = [self.position[0] - travel * ax, self.position[1] - travel * ay];
        self
    }

    pub fn with_trace(mut self, origin: [f64; 2], axis: [f64; 2]) -> Self {
        self.trace_origin = origin;
        self.travel_axis = axis;
        self
    }

    fn validate(&self) -> Result<(), EngineError> {
        check_slip(self.slip)?;
        if !(self.load_n.is_finite() && self.load_n >= 0.0) {
            return Err(EngineError::InvalidLoad(self.load_n));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StampReport {
    pub pixels_written: usize,
    /// `None` when the footprint missed the map.
    pub roi: Option<PixelRegion>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct StepReport {
    /// One report per contact, in input order.
    pub stamps: Vec<StampReport>,
    /// Failed contacts by index. Their report shows zero pixels.
    pub errors: Vec<(usize, EngineError)>,
    pub elapsed: Duration,
}

impl StepReport {
    pub fn pixels_written(&self) -> usize {
        self.stamps.iter().map(|s| s.pixels_written).sum()
    }
}

// Pixel bounds are widened by this much so texel centers lying exactly on the
// footprint boundary are not lost to rounding.
const ROI_SLACK: f64 = 1e-9;

/// Smallest pixel rectangle containing the closed footprint rectangle at the
/// contact pose, clamped to the map.
pub fn region_of_interest(
    contact: &WheelContact,
    wheel: &WheelSpec,
    map: &Heightmap,
) -> Result<PixelRegion, EngineError> {
    let (sin, cos) = contact.heading.sin_cos();
    let (hx, hy) = (wheel.radius, 0.5 * wheel.width);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for (lx, ly) in [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)] {
        let wx = contact.position[0] + lx * cos - ly * sin;
        let wy = contact.position[1] + lx * sin + ly * cos;
        let px = map.world_to_pixel([wx, wy]);
        lo = [lo[0].min(px.col), lo[1].min(px.row)];
        hi = [hi[0].max(px.col), hi[1].max(px.row)];
    }
    let c0 = (lo[0] - ROI_SLACK).ceil().max(0.0);
    let r0 = (lo[1] - ROI_SLACK).ceil().max(0.0);
    let c1 = (hi[0] + ROI_SLACK).floor().min((map.cols() - 1) as f64);
    let r1 = (hi[1] + ROI_SLACK).floor().min((map.rows() - 1) as f64);
    if !(c0 <= c1 && r0 <= r1) {
        return Err(EngineError::Disjoint);
    }
    Ok(PixelRegion::new(c0 as usize, r0 as usize, c1 as usize, r1 as usize))
}

/// Writes one stamp into `map` using a prepared kernel.
fn apply_kernel(
    map: &mut Heightmap,
    contact: &WheelContact,
    wheel: &WheelSpec,
    kernel: &StampKernel,
    roi: PixelRegion,
) -> usize {
    let (sin, cos) = contact.heading.sin_cos();
    let foot = wheel.foot_profile();
    let [ox, oy] = contact.trace_origin;
    let [ax, ay] = contact.travel_axis;
    let mut written = 0;
    for row in roi.min_row..=roi.max_row {
        for col in roi.min_col..=roi.max_col {
            let [wx, wy] = map.pixel_to_world(col as f64, row as f64);
            let (dx, dy) = (wx - contact.position[0], wy - contact.position[1]);
            let lx = dx * cos + dy * sin;
            let ly = -dx * sin + dy * cos;
            if !foot.contains(lx, ly) {
                continue;
            }
            let xi = (wx - ox) * ax + (wy - oy) * ay;
            let dz = kernel.depth(xi, ly);
            let z = (map.pristine_at(col, row) as f64 + dz) as f32;
            map.set(col, row, z);
            written += 1;
        }
    }
    written
}

/// Stamps a single contact with the literal grouser-wave profile.
pub fn stamp(
    map: &mut Heightmap,
    contact: &WheelContact,
    wheel: &WheelSpec,
    soil: &SoilParams,
    model: &DepthModel,
) -> Result<StampReport, EngineError> {
    stamp_with(map, contact, wheel, soil, model, &GrouserWave)
}

pub fn stamp_with(
    map: &mut Heightmap,
    contact: &WheelContact,
    wheel: &WheelSpec,
    soil: &SoilParams,
    model: &DepthModel,
    profile: &dyn TraceProfile,
) -> Result<StampReport, EngineError> {
    let start = Instant::now();
    contact.validate()?;
    let kernel = profile.kernel(wheel, soil, model, contact.load_n, contact.slip)?;
    let roi = region_of_interest(contact, wheel, map)?;
    let pixels_written = apply_kernel(map, contact, wheel, &kernel, roi);
    Ok(StampReport {
        pixels_written,
        roi: Some(roi),
        elapsed: start.elapsed(),
    })
}

/// Owns a height map and stamps wheel contacts into it.
#[derive(Debug)]
pub struct DeformationEngine {
    map: Heightmap,
    wheel: WheelSpec,
    soil: SoilParams,
    model: DepthModel,
    profile: Arc<dyn TraceProfile>,
    stamp_time: Duration,
    stamps: u64,
    warned_load: bool,
}

impl DeformationEngine {
    pub fn new(map: Heightmap, wheel: WheelSpec, soil: SoilParams, model: DepthModel) -> Self {
        Self::with_profile(map, wheel, soil, model, Arc::new(GrouserWave))
    }

    pub fn with_profile(
        map: Heightmap,
        wheel: WheelSpec,
        soil: SoilParams,
        model: DepthModel,
        profile: Arc<dyn TraceProfile>,
    ) -> Self {
        Self {
            map,
            wheel,
            soil,
            model,
            profile,
            stamp_time: Duration::ZERO,
            stamps: 0,
            warned_load: false,
        }
    }

    pub fn map(&self) -> &Heightmap {
        &self.map
    }

    pub fn into_map(self) -> Heightmap {
        self.map
    }

    pub fn wheel(&self) -> &WheelSpec {
        &self.wheel
    }

    pub fn model(&self) -> &DepthModel {
        &self.model
    }

    pub fn profile(&self) -> &dyn TraceProfile {
        self.profile.as_ref()
    }

    /// Total time spent in stamps and number of stamps applied.
    pub fn stamp_stats(&self) -> (Duration, u64) {
        (self.stamp_time, self.stamps)
    }

    pub fn stamp(&mut self, contact: &WheelContact) -> Result<StampReport, EngineError> {
        if !self.warned_load && contact.load_n.is_finite() && !self.model.covers(contact.load_n) {
            warn!(
                "load {:.3} N is outside the model's fitted range [{}, {}] N; extrapolating",
                contact.load_n, self.model.load_range[0], self.model.load_range[1]
            );
            self.warned_load = true;
        }
        let report = stamp_with(
            &mut self.map,
            contact,
            &self.wheel,
            &self.soil,
            &self.model,
            self.profile.as_ref(),
        )?;
        self.stamp_time += report.elapsed;
        self.stamps += 1;
        Ok(report)
    }

    /// Stamps every contact in order. Failures are collected, not fatal.
    pub fn step(&mut self, contacts: &[WheelContact]) -> StepReport {
        let start = Instant::now();
        let mut out = StepReport {
            stamps: Vec::with_capacity(contacts.len()),
            ..Default::default()
        };
        for (i, c) in contacts.iter().enumerate() {
            match self.stamp(c) {
                Ok(r) => out.stamps.push(r),
                Err(e) => {
                    out.stamps.push(StampReport {
                        pixels_written: 0,
                        roi: None,
                        elapsed: Duration::ZERO,
                    });
                    out.errors.push((i, e));
                }
            }
        }
        out.elapsed = start.elapsed();
        out
    }
}
