//! Wheel-trace deformation for planetary rover terrain.
//!
//! A [`Heightmap`] holds the terrain. The [`DeformationEngine`] stamps wheel
//! contacts into it using a load-dependent [`DepthModel`] and the grouser
//! wave geometry in [`trace_geometry`]. [`kinematics`] turns velocity and
//! steering commands into per-wheel contacts, and [`scenario`] ties all of it
//! to a config file.

pub mod bench;
pub mod depth_model;
pub mod engine;
pub mod heightfield;
pub mod kinematics;
pub mod profile;
pub mod scenario;
pub mod terrain;
pub mod timing;
pub mod trace_geometry;
pub mod trajectory;

pub use depth_model::{DepthModel, LinearModel, Provenance, SwtMeasurement};
pub use engine::{DeformationEngine, EngineError, WheelContact};
pub use heightfield::{Heightmap, HeightfieldError, PixelRegion, TriangleMesh};
pub use kinematics::{ControlInput, RoverSpec, RoverState};
pub use profile::{ProfileRegistry, TraceProfile};
pub use scenario::{simulate, ScenarioConfig};
pub use trace_geometry::{SoilParams, TraceError, WheelSpec};
