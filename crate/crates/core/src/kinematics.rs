//! Kinematic four-wheel rover with front Ackermann steering.
//!
//! Body frame is x forward, y left. The pose tracks the geometric center of
//! the wheel rectangle; the commanded speed `v` is the speed of the rear-axle
//! midpoint, which is the point that moves on the turning circle of radius
//! `L / tan δ`. Wheels are ordered front-left, front-right, rear-left,
//! rear-right.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::WheelContact;
use crate::trace_geometry::{check_slip, TraceError, WheelSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("turn radius {radius} m is within half the track ({half_track} m)")]
    TurnRadiusDegenerate { radius: f64, half_track: f64 },
    #[error("center of mass offset ({0}, {1}) m lies outside the wheel support")]
    ComOutsideSupport(f64, f64),
    #[error("invalid control input: {0}")]
    InvalidInput(String),
    #[error("invalid rover: {0}")]
    InvalidRover(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

pub const FRONT_LEFT: usize = 0;
pub const FRONT_RIGHT: usize = 1;
pub const REAR_LEFT: usize = 2;
pub const REAR_RIGHT: usize = 3;

pub const LUNAR_GRAVITY: f64 = 1.625;
pub const EARTH_GRAVITY: f64 = 9.80665;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoverSpec {
    pub wheelbase: f64,
    pub track: f64,
    pub mass: f64,
    pub gravity: f64,
    /// Center of mass relative to the geometric center, (forward, left) m.
    pub com_offset: [f64; 2],
    pub wheel: WheelSpec,
    pub slip: f64,
}

impl RoverSpec {
    pub fn validate(&self) -> Result<(), KinematicsError> {
        let bad = |m: String| Err(KinematicsError::InvalidRover(m));
        if !(self.wheelbase > 0.0 && self.wheelbase.is_finite()) {
            return bad(format!("wheelbase {} must be > 0", self.wheelbase));
        }
        if !(self.track > 0.0 && self.track.is_finite()) {
            return bad(format!("track {} must be > 0", self.track));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return bad(format!("mass {} must be > 0", self.mass));
        }
        if !(self.gravity >= 0.0 && self.gravity.is_finite()) {
            return bad(format!("gravity {} must be >= 0", self.gravity));
        }
        self.wheel.validate()?;
        check_slip(self.slip)?;
        let [a, b] = self.com_offset;
        if !(a.abs() < 0.5 * self.wheelbase && b.abs() < 0.5 * self.track) {
            return Err(KinematicsError::ComOutsideSupport(a, b));
        }
        Ok(())
    }

    /// Wheel mounting points in the body frame, FL, FR, RL, RR.
    pub fn wheel_offsets(&self) -> [[f64; 2]; 4] {
        let (x, y) = (0.5 * self.wheelbase, 0.5 * self.track);
        [[x, y], [x, -y], [-x, y], [-x, -y]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    pub velocity: f64,
    pub steering: f64,
    pub dt: f64,
}

impl ControlInput {
    pub fn new(velocity: f64, steering: f64, dt: f64) -> Result<Self, KinematicsError> {
        let c = Self {
            velocity,
            steering,
            dt,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(KinematicsError::InvalidInput(format!("dt {} must be > 0", self.dt)));
        }
        if self.steering.is_nan() || self.steering.abs() >= FRAC_PI_2 {
            return Err(KinematicsError::InvalidInput(format!(
                "steering {} rad must be within (-pi/2, pi/2)",
                self.steering
            )));
        }
        if !self.velocity.is_finite() {
            return Err(KinematicsError::InvalidInput("velocity must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoverState {
    /// Geometric center (x, y) and yaw.
    pub pose: [f64; 3],
    /// Steering angle per wheel, rad. Rear wheels stay at zero.
    pub steering: [f64; 4],
    /// Drive angular velocity per wheel, rad/s.
    pub spin: [f64; 4],
    /// Signed distance rolled by each wheel center, m.
    pub travel: [f64; 4],
}

impl RoverState {
    pub fn at(x: f64, y: f64, yaw: f64) -> Self {
        Self {
            pose: [x, y, yaw],
            ..Default::default()
        }
    }

    /// Midpoint of the rear axle in world coordinates.
    pub fn rear_axle_center(&self, spec: &RoverSpec) -> [f64; 2] {
        let [x, y, yaw] = self.pose;
        let h = 0.5 * spec.wheelbase;
        [x - h * yaw.cos(), y - h * yaw.sin()]
    }
}

/// Left and right front-wheel angles for a virtual center steering angle.
///
/// With `R = L / tan δ`, the wheel on the side of the turn center gets
/// `atan(L / (R - T/2))` and the other `atan(L / (R + T/2))`.
pub fn ackermann_angles(steering: f64, wheelbase: f64, track: f64) -> Result<(f64, f64), KinematicsError> {
    if steering.is_nan() || steering.abs() >= FRAC_PI_2 {
        return Err(KinematicsError::InvalidInput(format!(
            "steering {steering} rad must be within (-pi/2, pi/2)"
        )));
    }
    if steering == 0.0 {
        return Ok((0.0, 0.0));
    }
    // Signed radius: positive turns left, center on the +y side.
    let radius = wheelbase / steering.tan();
    let half = 0.5 * track;
    if radius.abs() <= half {
        return Err(KinematicsError::TurnRadiusDegenerate {
            radius: radius.abs(),
            half_track: half,
        });
    }
    let left = (wheelbase / (radius - half)).atan();
    let right = (wheelbase / (radius + half)).atan();
    Ok((left, right))
}

/// `ω = v / (r (1 - s))`.
pub fn wheel_angular_velocity(velocity: f64, wheel: &WheelSpec, slip: f64) -> Result<f64, TraceError> {
    check_slip(slip)?;
    Ok(velocity / (wheel.radius * (1.0 - slip)))
}

/// Static loads on flat ground with the weight split bilinearly by CoM
/// position: forces sum to `m g` and both moments balance.
pub fn static_wheel_loads(spec: &RoverSpec) -> Result<[f64; 4], KinematicsError> {
    let [a, b] = spec.com_offset;
    if !(a.abs() < 0.5 * spec.wheelbase && b.abs() < 0.5 * spec.track) {
        return Err(KinematicsError::ComOutsideSupport(a, b));
    }
    let weight = spec.mass * spec.gravity;
    let front = 0.5 + a / spec.wheelbase;
    let left = 0.5 + b / spec.track;
    Ok([
        weight * front * left,
        weight * front * (1.0 - left),
        weight * (1.0 - front) * left,
        weight * (1.0 - front) * (1.0 - left),
    ])
}

/// Advances the rover along the exact constant-curvature arc for `input`.
pub fn integrate(state: &RoverState, input: &ControlInput, spec: &RoverSpec) -> Result<RoverState, KinematicsError> {
    input.validate()?;
    let (left, right) = ackermann_angles(input.steering, spec.wheelbase, spec.track)?;
    let [_, _, yaw] = state.pose;
    let [px, py] = state.rear_axle_center(spec);
    let v = input.velocity;
    let dist = v * input.dt;
    let curvature = input.steering.tan() / spec.wheelbase;
    let dyaw = dist * curvature;

    let (nx, ny) = if curvature == 0.0 {
        (px + dist * yaw.cos(), py + dist * yaw.sin())
    } else {
        let r = 1.0 / curvature;
        (
            px + r * ((yaw + dyaw).sin() - yaw.sin()),
            py - r * ((yaw + dyaw).cos() - yaw.cos()),
        )
    };
    let new_yaw = yaw + dyaw;
    let h = 0.5 * spec.wheelbase;

    // Path radius of each wheel relative to the rear-axle path radius.
    let ratios = wheel_path_ratios(spec, curvature);
    let mut travel = state.travel;
    let mut spin = [0.0; 4];
    for i in 0..4 {
        travel[i] += dist * ratios[i];
        spin[i] = wheel_angular_velocity(v * ratios[i], &spec.wheel, spec.slip)?;
    }

    Ok(RoverState {
        pose: [nx + h * new_yaw.cos(), ny + h * new_yaw.sin(), new_yaw],
        steering: [left, right, 0.0, 0.0],
        spin,
        travel,
    })
}

/// `|R_i| / |R|` for each wheel; all ones when driving straight.
fn wheel_path_ratios(spec: &RoverSpec, curvature: f64) -> [f64; 4] {
    if curvature == 0.0 {
        return [1.0; 4];
    }
    let r = 1.0 / curvature;
    let l = spec.wheelbase;
    spec.wheel_offsets().map(|[x, y]| {
        // turn center sits at (-L/2, r) in the body frame
        let dx = x + 0.5 * l;
        let dy = y - r;
        (dx * dx + dy * dy).sqrt() / r.abs()
    })
}

/// World-frame contacts for the four wheels.
///
/// Each contact's trace is anchored so that `ξ` at the wheel center equals
/// that wheel's accumulated travel.
pub fn wheel_contacts(state: &RoverState, spec: &RoverSpec, loads: &[f64; 4]) -> [WheelContact; 4] {
    let [x, y, yaw] = state.pose;
    let (sin, cos) = yaw.sin_cos();
    let offsets = spec.wheel_offsets();
    std::array::from_fn(|i| {
        let [ox, oy] = offsets[i];
        let position = [x + ox * cos - oy * sin, y + ox * sin + oy * cos];
        WheelContact::new(position, yaw + state.steering[i], loads[i], spec.slip).with_travel(state.travel[i])
    })
}
