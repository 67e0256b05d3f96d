//! Stamp and re-mesh timing across map sizes.
//!
//! Each configuration gets a flat square map and a fixed scripted pass: a
//! single wheel is stamped along a straight line through the map center,
//! then the full vertex grid is rebuilt several times. Times are reported as
//! the median per operation so one scheduler hiccup does not skew a row.

use std::time::{Duration, Instant};

use crate::depth_model::DepthModel;
use crate::engine::{DeformationEngine, WheelContact};
use crate::heightfield::{grid_file_bytes, HeightfieldError, Heightmap};
use crate::trace_geometry::{SoilParams, WheelSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// Stamps per configuration.
    pub stamps: usize,
    /// Full-mesh rebuilds per configuration.
    pub remesh_reps: usize,
    pub load_n: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            stamps: 400,
            remesh_reps: 7,
            load_n: 8.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub extent: f64,
    pub resolution: f64,
    pub texels: usize,
    /// Median time per stamp, ms.
    pub stamp_ms: f64,
    /// Median time per full-mesh rebuild, ms.
    pub remesh_ms: f64,
    /// Bytes of the map's file image: header plus two f32 grids.
    pub grid_bytes: usize,
}

fn median_ms(mut samples: Vec<Duration>) -> f64 {
    samples.sort();
    let n = samples.len();
    let mid = if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2
    };
    mid.as_secs_f64() * 1e3
}

/// Median stamp time for a straight pass on a flat map.
///
/// The contact advances half a texel per stamp and wraps around so every
/// stamp lands fully inside the map, whatever its size.
pub fn time_stamps(map: Heightmap, opts: &SweepOptions) -> f64 {
    let wheel = WheelSpec::rashid();
    let soil = SoilParams::from_degrees(60.0).expect("valid repose angle");
    let res = map.resolution();
    let [x0, _] = map.pixel_to_world(0.0, 0.0);
    let [x1, _] = map.pixel_to_world((map.cols() - 1) as f64, 0.0);
    let margin = wheel.radius + res;
    let span = (x1 - x0 - 2.0 * margin).max(res);
    let y = map.pixel_to_world(0.0, 0.5 * (map.rows() - 1) as f64)[1];
    let mut engine = DeformationEngine::new(map, wheel, soil, DepthModel::published());
    let base = WheelContact::new([x0 + margin, y], 0.0, opts.load_n, 0.0);
    let mut samples = Vec::with_capacity(opts.stamps);
    for k in 0..opts.stamps {
        let contact = WheelContact {
            position: [x0 + margin + (0.5 * res * k as f64) % span, y],
            ..base
        };
        let t = Instant::now();
        let _ = engine.stamp(&contact);
        samples.push(t.elapsed());
    }
    median_ms(samples)
}

/// Median time to rebuild the full mesh of `map`.
pub fn time_remesh(map: &Heightmap, reps: usize) -> f64 {
    // warm-up: fault in the allocator's pages once
    std::hint::black_box(map.export_mesh(None).expect("map is at least 2x2"));
    let samples = (0..reps.max(1))
        .map(|_| {
            let t = Instant::now();
            let mesh = map.export_mesh(None).expect("map is at least 2x2");
            let dt = t.elapsed();
            std::hint::black_box(mesh);
            dt
        })
        .collect();
    median_ms(samples)
}

/// Runs the scripted pass for every `(extent m, resolution m/texel)` pair.
pub fn update_timing_sweep(sizes: &[(f64, f64)], opts: &SweepOptions) -> Result<Vec<SweepRow>, HeightfieldError> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &(extent, resolution) in sizes {
        let map = Heightmap::square(extent, resolution, 0.0)?;
        let texels = map.texels();
        let remesh_ms = time_remesh(&map, opts.remesh_reps);
        let stamp_ms = time_stamps(map, opts);
        rows.push(SweepRow {
            extent,
            resolution,
            texels,
            stamp_ms,
            remesh_ms,
            grid_bytes: grid_file_bytes(texels),
        });
    }
    Ok(rows)
}
