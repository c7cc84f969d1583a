use serde::{Deserialize, Serialize};

use crate::geom::{wrap_angle, Point2, Pose2};
use crate::{Error, Result};

/// Unicycle state: pose plus the currently realised velocities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub v: f64,
    pub omega: f64,
}

impl State {
    pub fn at_rest(pose: Pose2) -> Self {
        State {
            x: pose.x,
            y: pose.y,
            psi: wrap_angle(pose.psi),
            v: 0.0,
            omega: 0.0,
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn pose(&self) -> Pose2 {
        Pose2::new(self.x, self.y, self.psi)
    }
}

/// Velocity command `(v, omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Control {
    pub v: f64,
    pub omega: f64,
}

impl Control {
    pub const STOP: Control = Control { v: 0.0, omega: 0.0 };

    pub const fn new(v: f64, omega: f64) -> Self {
        Control { v, omega }
    }
}

/// Footprint and actuation limits. Defaults follow a Jackal-sized platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotSpec {
    pub length: f64,
    pub width: f64,
    /// Forward speed limit; this is the benchmark's speed setting.
    pub v_max: f64,
    /// Reverse speed limit (non-positive).
    pub v_min: f64,
    pub omega_max: f64,
    pub a_max: f64,
    pub alpha_max: f64,
    /// Number of footprint boundary points.
    pub n: usize,
}

impl Default for RobotSpec {
    fn default() -> Self {
        RobotSpec {
            length: 0.508,
            width: 0.430,
            v_max: 1.5,
            v_min: -0.5,
            omega_max: 2.0,
            a_max: 2.0,
            alpha_max: 4.0,
            n: 16,
        }
    }
}

impl RobotSpec {
    pub fn with_speed(&self, v_max: f64) -> Self {
        RobotSpec {
            v_max,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.width > 0.0) {
            return Err(Error::invalid("robot length and width must be > 0"));
        }
        if !(self.v_min <= 0.0 && self.v_max >= 0.0) {
            return Err(Error::invalid("need v_min <= 0 <= v_max"));
        }
        if !(self.omega_max > 0.0 && self.a_max > 0.0 && self.alpha_max > 0.0) {
            return Err(Error::invalid("omega_max, a_max and alpha_max must be > 0"));
        }
        if self.n < 4 || self.n % 4 != 0 {
            return Err(Error::invalid(format!(
                "boundary point count must be >= 4 and divisible by 4, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Radius of the largest circle inside the footprint.
    pub fn inscribed_radius(&self) -> f64 {
        0.5 * self.length.min(self.width)
    }

    pub fn clamp(&self, u: Control) -> Control {
        Control {
            v: u.v.clamp(self.v_min, self.v_max),
            omega: u.omega.clamp(-self.omega_max, self.omega_max),
        }
    }
}

const STRAIGHT_EPS: f64 = 1e-6;

/// Advances the unicycle by `dt` seconds.
///
/// The command is clamped to the acceleration window around the current
/// velocities and then to the global limits; the resulting constant twist is
/// integrated exactly along its arc.
#[inline]
pub fn step_unicycle(s: &State, u: Control, dt: f64, spec: &RobotSpec) -> State {
    let dv = spec.a_max * dt;
    let dw = spec.alpha_max * dt;
    let v = u.v.clamp(s.v - dv, s.v + dv).clamp(spec.v_min, spec.v_max);
    let w = u
        .omega
        .clamp(s.omega - dw, s.omega + dw)
        .clamp(-spec.omega_max, spec.omega_max);

    let psi_end = s.psi + w * dt;
    let (x, y) = if w.abs() > STRAIGHT_EPS {
        let r = v / w;
        let (s0, c0) = s.psi.sin_cos();
        let (s1, c1) = psi_end.sin_cos();
        (s.x + r * (s1 - s0), s.y - r * (c1 - c0))
    } else {
        let (sn, cs) = s.psi.sin_cos();
        (s.x + v * dt * cs, s.y + v * dt * sn)
    };
    State {
        x,
        y,
        psi: wrap_angle(psi_end),
        v,
        omega: w,
    }
}
