//! Scripted traversals: config, simulation loop and run summary.
//!
//! A scenario file is TOML written with dotted keys:
//!
//! ```toml
//! terrain.extent_m = 20.0
//! terrain.resolution_m = 0.02
//! terrain.seed = 7
//! soil.repose_angle_deg = 60.0
//! trajectory.path = "drive.txt"
//! output.snapshot_interval_s = 10.0
//! ```
//!
//! Every section except `soil` and `trajectory` has defaults. Relative paths
//! resolve against the directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use log::info;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::depth_model::{
    bundled_measurements, load_measurements, DepthModel, LinearModel, ModelError, Provenance,
};
use crate::engine::{DeformationEngine, EngineError, WheelContact};
use crate::heightfield::{HeightfieldError, Heightmap, PixelRegion};
use crate::kinematics::{
    integrate, static_wheel_loads, wheel_contacts, ControlInput, KinematicsError, RoverSpec, RoverState,
    LUNAR_GRAVITY,
};
use crate::profile::{ProfileRegistry, TraceProfile, UnknownProfile, DEFAULT_PROFILE};
use crate::terrain::{value_noise_terrain, NoiseParams};
use crate::trace_geometry::{SoilParams, TraceError, WheelSpec};
use crate::trajectory::{Trajectory, TrajectoryError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config: {0}")]
    Syntax(String),
    #[error("config field `{field}`: {msg}")]
    Field { field: &'static str, msg: String },
    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("heightmap {path}: {source}")]
    Heightmap {
        path: PathBuf,
        #[source]
        source: HeightfieldError,
    },
    #[error("trajectory {path}: {source}")]
    Trajectory {
        path: PathBuf,
        #[source]
        source: TrajectoryError,
    },
    #[error("depth model: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Profile(#[from] UnknownProfile),
    #[error("at t = {time:.3} s: {source}")]
    Kinematics {
        time: f64,
        #[source]
        source: KinematicsError,
    },
    #[error("at t = {time:.3} s: {source}")]
    Stamp {
        time: f64,
        #[source]
        source: EngineError,
    },
    #[error("every wheel contact missed the map")]
    OffMap,
    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn field(field: &'static str, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Field { field, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerrainConfig {
    pub extent_m: f64,
    pub resolution_m: f64,
    pub seed: u64,
    pub noise_amplitude_m: f64,
    pub noise_wavelength_m: f64,
    pub noise_octaves: u32,
    /// Existing heightmap file; overrides the procedural terrain.
    pub heightmap: Option<PathBuf>,
}

impl Default for TerrainConfig {
    fn default() -> Self {
        Self {
            extent_m: 20.0,
            resolution_m: 0.02,
            seed: 0,
            noise_amplitude_m: 0.03,
            noise_wavelength_m: 2.0,
            noise_octaves: 3,
            heightmap: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WheelConfig {
    pub radius_m: f64,
    pub width_m: f64,
    pub grouser_count: u32,
    pub grouser_length_m: f64,
}

impl Default for WheelConfig {
    fn default() -> Self {
        let w = WheelSpec::rashid();
        Self {
            radius_m: w.radius,
            width_m: w.width,
            grouser_count: w.grouser_count,
            grouser_length_m: w.grouser_length,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoilConfig {
    pub repose_angle_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoverConfig {
    pub wheelbase_m: f64,
    pub track_m: f64,
    pub mass_kg: f64,
    pub gravity_mps2: f64,
    pub com_forward_m: f64,
    pub com_left_m: f64,
    pub slip: f64,
    pub start_x_m: f64,
    pub start_y_m: f64,
    pub start_yaw_rad: f64,
}

impl Default for RoverConfig {
    fn default() -> Self {
        Self {
            wheelbase_m: 0.5,
            track_m: 0.4,
            mass_kg: 20.0,
            gravity_mps2: LUNAR_GRAVITY,
            com_forward_m: 0.0,
            com_left_m: 0.0,
            slip: 0.0,
            start_x_m: 0.0,
            start_y_m: 0.0,
            start_yaw_rad: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSource {
    /// Least-squares fit of `model.measurements` (bundled data if unset).
    #[default]
    Fitted,
    Published,
    /// `model.mu_*` / `model.amp_*` coefficients.
    Coefficients,
    /// A model file written by `fit`.
    File,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub source: ModelSource,
    pub measurements: Option<PathBuf>,
    pub file: Option<PathBuf>,
    pub mu_intercept_mm: Option<f64>,
    pub mu_slope_mm_per_n: Option<f64>,
    pub amp_intercept_mm: Option<f64>,
    pub amp_slope_mm_per_n: Option<f64>,
    pub load_min_n: Option<f64>,
    pub load_max_n: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: String,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            kind: DEFAULT_PROFILE.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub path: PathBuf,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshExport {
    /// Bounding box of every stamped region.
    #[default]
    Traversed,
    Full,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Seconds between numbered heightmap snapshots; 0 disables them.
    pub snapshot_interval_s: f64,
    pub mesh: MeshExport,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            snapshot_interval_s: 0.0,
            mesh: MeshExport::Traversed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt_s: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt_s: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub terrain: TerrainConfig,
    #[serde(default)]
    pub wheel: WheelConfig,
    pub soil: SoilConfig,
    #[serde(default)]
    pub rover: RoverConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub profile: ProfileConfig,
    pub trajectory: TrajectoryConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub sim: SimConfig,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ScenarioError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let t = &self.terrain;
        if !(t.resolution_m.is_finite() && t.resolution_m > 0.0) {
            return Err(field("terrain.resolution_m", "must be > 0"));
        }
        if t.heightmap.is_none() && (t.extent_m.is_nan() || (t.extent_m / t.resolution_m).round() < 2.0) {
            return Err(field("terrain.extent_m", "must span at least 2x2 texels"));
        }
        if !(t.noise_amplitude_m.is_finite() && t.noise_amplitude_m >= 0.0) {
            return Err(field("terrain.noise_amplitude_m", "must be >= 0"));
        }
        if !(t.noise_wavelength_m.is_finite() && t.noise_wavelength_m > 0.0) {
            return Err(field("terrain.noise_wavelength_m", "must be > 0"));
        }
        self.wheel_spec()?;
        self.soil_params()?;
        self.rover_spec()?;
        if !(self.sim.dt_s.is_finite() && self.sim.dt_s > 0.0) {
            return Err(field("sim.dt_s", "must be > 0"));
        }
        if !(self.output.snapshot_interval_s.is_finite() && self.output.snapshot_interval_s >= 0.0) {
            return Err(field("output.snapshot_interval_s", "must be >= 0"));
        }
        ProfileRegistry::builtin()
            .get(&self.profile.kind)
            .map_err(|e| field("profile.kind", e.to_string()))?;
        let m = &self.model;
        match m.source {
            ModelSource::File if m.file.is_none() => {
                return Err(field("model.file", "required when model.source = \"file\""))
            }
            ModelSource::Coefficients => {
                for (name, v) in [
                    ("model.mu_intercept_mm", m.mu_intercept_mm),
                    ("model.mu_slope_mm_per_n", m.mu_slope_mm_per_n),
                    ("model.amp_intercept_mm", m.amp_intercept_mm),
                    ("model.amp_slope_mm_per_n", m.amp_slope_mm_per_n),
                ] {
                    if v.is_none() {
                        return Err(field(name, "required when model.source = \"coefficients\""));
                    }
                }
            }
            _ => {}
        }
        for (name, p) in [
            ("trajectory.path", Some(&self.trajectory.path)),
            ("terrain.heightmap", t.heightmap.as_ref()),
            ("model.measurements", m.measurements.as_ref()),
            ("model.file", m.file.as_ref()),
        ] {
            if let Some(p) = p {
                let full = self.resolve(p);
                if !full.is_file() {
                    return Err(field(name, format!("file {} does not exist", full.display())));
                }
            }
        }
        Ok(())
    }

    pub fn wheel_spec(&self) -> Result<WheelSpec, ScenarioError> {
        let w = &self.wheel;
        let spec = WheelSpec {
            radius: w.radius_m,
            width: w.width_m,
            grouser_count: w.grouser_count,
            grouser_length: w.grouser_length_m,
        };
        spec.validate().map_err(|e| match e {
            TraceError::InvalidWheel(msg) if msg.starts_with("radius") => field("wheel.radius_m", msg),
            TraceError::InvalidWheel(msg) if msg.starts_with("width") => field("wheel.width_m", msg),
            other => field("wheel.grouser_count", other.to_string()),
        })?;
        Ok(spec)
    }

    pub fn soil_params(&self) -> Result<SoilParams, ScenarioError> {
        SoilParams::from_degrees(self.soil.repose_angle_deg)
            .map_err(|_| field("soil.repose_angle_deg", "must lie strictly between 0 and 90"))
    }

    pub fn rover_spec(&self) -> Result<RoverSpec, ScenarioError> {
        let r = &self.rover;
        let spec = RoverSpec {
            wheelbase: r.wheelbase_m,
            track: r.track_m,
            mass: r.mass_kg,
            gravity: r.gravity_mps2,
            com_offset: [r.com_forward_m, r.com_left_m],
            wheel: self.wheel_spec()?,
            slip: r.slip,
        };
        spec.validate().map_err(|e| {
            let name = match &e {
                KinematicsError::ComOutsideSupport(..) => "rover.com_forward_m",
                KinematicsError::Trace(_) => "rover.slip",
                KinematicsError::InvalidRover(m) if m.starts_with("wheelbase") => "rover.wheelbase_m",
                KinematicsError::InvalidRover(m) if m.starts_with("track") => "rover.track_m",
                KinematicsError::InvalidRover(m) if m.starts_with("mass") => "rover.mass_kg",
                _ => "rover.gravity_mps2",
            };
            field(name, e.to_string())
        })?;
        Ok(spec)
    }

    pub fn depth_model(&self) -> Result<DepthModel, ScenarioError> {
        let m = &self.model;
        let model = match m.source {
            ModelSource::Published => DepthModel::published(),
            ModelSource::Fitted => {
                let rows = match &m.measurements {
                    Some(p) => load_measurements(self.resolve(p))?,
                    None => bundled_measurements(),
                };
                DepthModel::fit(&rows)?
            }
            ModelSource::File => DepthModel::load(self.resolve(m.file.as_ref().expect("validated")))?,
            ModelSource::Coefficients => DepthModel::new(
                Provenance::Manual,
                LinearModel::new(m.mu_intercept_mm.unwrap_or_default(), m.mu_slope_mm_per_n.unwrap_or_default()),
                LinearModel::new(m.amp_intercept_mm.unwrap_or_default(), m.amp_slope_mm_per_n.unwrap_or_default()),
                [m.load_min_n.unwrap_or(3.0), m.load_max_n.unwrap_or(17.9)],
            )?,
        };
        Ok(model)
    }

    pub fn terrain(&self) -> Result<Heightmap, ScenarioError> {
        let t = &self.terrain;
        match &t.heightmap {
            Some(p) => {
                let path = self.resolve(p);
                Heightmap::load(&path).map_err(|source| ScenarioError::Heightmap { path, source })
            }
            None => {
                let params = NoiseParams {
                    seed: t.seed,
                    amplitude: t.noise_amplitude_m,
                    wavelength: t.noise_wavelength_m,
                    octaves: t.noise_octaves,
                };
                value_noise_terrain(t.extent_m, t.resolution_m, &params).map_err(|e| field("terrain.extent_m", e.to_string()))
            }
        }
    }

    pub fn trajectory(&self) -> Result<Trajectory, ScenarioError> {
        let path = self.resolve(&self.trajectory.path);
        Trajectory::load(&path).map_err(|source| ScenarioError::Trajectory { path, source })
    }

    pub fn profile(&self, registry: &ProfileRegistry) -> Result<Arc<dyn TraceProfile>, ScenarioError> {
        Ok(registry.get(&self.profile.kind)?)
    }
}

/// Per-wheel results of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WheelTrace {
    pub wheel: String,
    pub load_n: f64,
    /// Final accumulated travel, m.
    pub travel_m: f64,
    /// Troughs counted along the wheel's centerline path.
    pub trough_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub profile: String,
    pub model_provenance: Provenance,
    pub duration_s: f64,
    pub frames: usize,
    /// Path length of the rover's reference point, m.
    pub distance_m: f64,
    pub final_pose: [f64; 3],
    pub texels_deformed: usize,
    pub stamps: u64,
    pub stamp_mean_ms: f64,
    pub stamp_max_ms: f64,
    pub wheels: Vec<WheelTrace>,
    pub snapshots: Vec<String>,
    pub heightmap: String,
    pub mesh: Option<String>,
}

impl RunSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("profile            {}\n", self.profile));
        s.push_str(&format!("depth model        {}\n", self.model_provenance));
        s.push_str(&format!("simulated time     {:.3} s ({} frames)\n", self.duration_s, self.frames));
        s.push_str(&format!("distance driven    {:.3} m\n", self.distance_m));
        s.push_str(&format!(
            "final pose         x={:.3} m y={:.3} m yaw={:.4} rad\n",
            self.final_pose[0], self.final_pose[1], self.final_pose[2]
        ));
        s.push_str(&format!("texels deformed    {}\n", self.texels_deformed));
        s.push_str(&format!(
            "stamps             {} (mean {:.4} ms, max {:.4} ms)\n",
            self.stamps, self.stamp_mean_ms, self.stamp_max_ms
        ));
        for w in &self.wheels {
            s.push_str(&format!(
                "wheel {:<12} load {:.3} N, travel {:.3} m, troughs {}\n",
                w.wheel, w.load_n, w.travel_m, w.trough_count
            ));
        }
        s
    }
}

const WHEEL_NAMES: [&str; 4] = ["front-left", "front-right", "rear-left", "rear-right"];

/// Counts troughs in the deformation sampled along `path`: every entry of the
/// signal into the region below `mean_m` counts once.
pub fn count_troughs(map: &Heightmap, path: &[[f64; 2]], mean_m: f64) -> usize {
    let step = 0.25 * map.resolution();
    let mut count = 0;
    let mut below = None::<bool>;
    let mut visit = |p: [f64; 2]| {
        if let Ok(dz) = map.sample_deformation(p) {
            let now = dz < mean_m;
            if now && below != Some(true) {
                // a run that starts below the mean at the very first sample is
                // a truncated trough and still counts
                count += 1;
            }
            below = Some(now);
        }
    };
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 0..n {
            let t = k as f64 / n as f64;
            visit([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    if let Some(&last) = path.last() {
        visit(last);
    }
    count
}

/// Runs `config` and writes all outputs under `out_dir`.
pub fn simulate(config: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary, ScenarioError> {
    simulate_with(config, out_dir, &ProfileRegistry::builtin())
}

pub fn simulate_with(
    config: &ScenarioConfig,
    out_dir: &Path,
    registry: &ProfileRegistry,
) -> Result<RunSummary, ScenarioError> {
    let map = config.terrain()?;
    let wheel = config.wheel_spec()?;
    let soil = config.soil_params()?;
    let model = config.depth_model()?;
    let profile = config.profile(registry)?;
    let rover = config.rover_spec()?;
    let trajectory = config.trajectory()?;
    let loads = static_wheel_loads(&rover).map_err(|source| ScenarioError::Kinematics { time: 0.0, source })?;

    fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Write {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let provenance = model.provenance;
    let profile_name = profile.name().to_string();
    let mut engine = DeformationEngine::with_profile(map, wheel, soil, model, profile);
    let r = &config.rover;
    let mut state = RoverState::at(r.start_x_m, r.start_y_m, r.start_yaw_rad);
    let mut paths: [Vec<[f64; 2]>; 4] = Default::default();
    let mut roi_union: Option<PixelRegion> = None;
    let mut snapshots = Vec::new();
    let mut distance = 0.0;
    let mut frames = 0usize;
    let mut stamp_max = Duration::ZERO;
    let mut time = trajectory.start();

    let interval = config.output.snapshot_interval_s;
    let mut next_snapshot = if interval > 0.0 { time + interval } else { f64::INFINITY };
    let dt = config.sim.dt_s;

    for seg in trajectory.segments() {
        let steps = ((seg.end - seg.start) / dt - 1e-9).ceil().max(1.0) as usize;
        let h = (seg.end - seg.start) / steps as f64;
        for k in 0..steps {
            let t = seg.start + (k + 1) as f64 * h;
            let input = ControlInput::new(seg.velocity, seg.steering, h)
                .map_err(|source| ScenarioError::Kinematics { time: t, source })?;
            state = integrate(&state, &input, &rover).map_err(|source| ScenarioError::Kinematics { time: t, source })?;
            distance += (seg.velocity * h).abs();
            time = t;
            frames += 1;

            let contacts: [WheelContact; 4] = wheel_contacts(&state, &rover, &loads);
            let step = engine.step(&contacts);
            for (i, e) in &step.errors {
                if *e != EngineError::Disjoint {
                    return Err(ScenarioError::Stamp {
                        time: t,
                        source: e.clone(),
                    });
                }
                let _ = i;
            }
            if step.errors.len() == contacts.len() {
                return Err(ScenarioError::OffMap);
            }
            for (i, s) in step.stamps.iter().enumerate() {
                stamp_max = stamp_max.max(s.elapsed);
                if let Some(roi) = s.roi {
                    roi_union = Some(match roi_union {
                        None => roi,
                        Some(u) => PixelRegion::new(
                            u.min_col.min(roi.min_col),
                            u.min_row.min(roi.min_row),
                            u.max_col.max(roi.max_col),
                            u.max_row.max(roi.max_row),
                        ),
                    });
                }
                paths[i].push(contacts[i].position);
            }

            while time + 1e-9 >= next_snapshot {
                let name = format!("heightmap_{:04}.rgt", snapshots.len());
                save_map(engine.map(), &out_dir.join(&name))?;
                snapshots.push(name);
                next_snapshot += interval;
            }
        }
    }

    let map = engine.map();
    let heightmap = "heightmap_final.rgt".to_string();
    save_map(map, &out_dir.join(&heightmap))?;

    let mesh_region = match config.output.mesh {
        MeshExport::None => None,
        MeshExport::Full => Some(map.full_region()),
        MeshExport::Traversed => roi_union.map(|u| {
            PixelRegion::new(
                u.min_col.saturating_sub(1),
                u.min_row.saturating_sub(1),
                (u.max_col + 1).min(map.cols() - 1),
                (u.max_row + 1).min(map.rows() - 1),
            )
        }),
    };
    let mesh = match mesh_region {
        Some(region) => {
            let name = "final.obj".to_string();
            let path = out_dir.join(&name);
            let mesh = map
                .export_mesh(Some(region))
                .map_err(|e| field("output.mesh", e.to_string()))?;
            let file = fs::File::create(&path).map_err(|source| ScenarioError::Write {
                path: path.clone(),
                source,
            })?;
            mesh.write_obj(std::io::BufWriter::new(file))
                .map_err(|source| ScenarioError::Write { path, source })?;
            Some(name)
        }
        None => None,
    };

    let texels_deformed = map
        .elevations()
        .iter()
        .zip(map.pristine())
        .filter(|(a, b)| a.to_bits() != b.to_bits())
        .count();
    let (stamp_total, stamps) = engine.stamp_stats();
    let stamp_mean_ms = if stamps > 0 {
        stamp_total.as_secs_f64() * 1e3 / stamps as f64
    } else {
        0.0
    };
    let wheels = (0..4)
        .map(|i| {
            let mean_m = engine.model().mean_mm(loads[i]) * 1e-3;
            WheelTrace {
                wheel: WHEEL_NAMES[i].to_string(),
                load_n: loads[i],
                travel_m: state.travel[i],
                trough_count: count_troughs(map, &paths[i], mean_m),
            }
        })
        .collect();

    let summary = RunSummary {
        profile: profile_name,
        model_provenance: provenance,
        duration_s: trajectory.duration(),
        frames,
        distance_m: distance,
        final_pose: state.pose,
        texels_deformed,
        stamps,
        stamp_mean_ms,
        stamp_max_ms: stamp_max.as_secs_f64() * 1e3,
        wheels,
        snapshots,
        heightmap,
        mesh,
    };
    write_text(&out_dir.join("summary.txt"), &summary.to_text())?;
    write_text(
        &out_dir.join("stats.json"),
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    info!(
        "simulated {:.2} s over {} frames, {} texels deformed",
        summary.duration_s, frames, texels_deformed
    );
    Ok(summary)
}

fn save_map(map: &Heightmap, path: &Path) -> Result<(), ScenarioError> {
    map.save(path).map_err(|e| match e {
        HeightfieldError::Io(source) => ScenarioError::Write {
            path: path.to_path_buf(),
            source,
        },
        other => ScenarioError::Heightmap {
            path: path.to_path_buf(),
            source: other,
        },
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), ScenarioError> {
    fs::write(path, text).map_err(|source| ScenarioError::Write {
        path: path.to_path_buf(),
        source,
    })
}
