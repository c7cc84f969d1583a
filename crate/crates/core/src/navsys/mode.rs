use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryKind {
    Rotate,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    HighSpeed,
    LowSpeed,
    Braking,
    Recovery(RecoveryKind),
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::HighSpeed => "high",
            Mode::LowSpeed => "low",
            Mode::Braking => "brake",
            Mode::Recovery(RecoveryKind::Rotate) => "rotate",
            Mode::Recovery(RecoveryKind::Reverse) => "reverse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub mode: Mode,
    /// Seconds the measured speed has stayed below the active threshold.
    pub below_timer: f64,
    /// Seconds the measured speed has stayed above the active threshold.
    pub above_timer: f64,
    /// Seconds spent in the current braking or recovery maneuver.
    pub maneuver_timer: f64,
}

impl Default for ModeState {
    fn default() -> Self {
        ModeState::enter(Mode::HighSpeed)
    }
}

impl ModeState {
    pub fn enter(mode: Mode) -> Self {
        ModeState {
            mode,
            below_timer: 0.0,
            above_timer: 0.0,
            maneuver_timer: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeThresholds {
    pub v_low: f64,
    pub t_low: f64,
    pub v_rec: f64,
    pub t_rec: f64,
    pub t_brake: f64,
    pub v_resume: f64,
    pub t_resume: f64,
    /// Low-speed caps as fractions of the robot limits.
    pub low_v_fraction: f64,
    pub low_omega_fraction: f64,
}

impl Default for ModeThresholds {
    fn default() -> Self {
        ModeThresholds {
            v_low: 0.25,
            t_low: 1.0,
            v_rec: 0.1,
            t_rec: 1.5,
            t_brake: 0.5,
            v_resume: 0.5,
            t_resume: 2.0,
            low_v_fraction: 0.5,
            low_omega_fraction: 0.7,
        }
    }
}

impl ModeThresholds {
    pub fn validate(&self, v_max: f64) -> Result<()> {
        if !(self.v_rec < self.v_low && self.v_low < self.v_resume && self.v_resume <= v_max) {
            return Err(Error::invalid(format!(
                "need v_rec < v_low < v_resume <= v_max ({} < {} < {} <= {v_max})",
                self.v_rec, self.v_low, self.v_resume
            )));
        }
        let times = [self.t_low, self.t_rec, self.t_brake, self.t_resume];
        if times.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::invalid("mode timers must be > 0"));
        }
        if !(self.low_v_fraction > 0.0 && self.low_v_fraction <= 1.0)
            || !(self.low_omega_fraction > 0.0 && self.low_omega_fraction <= 1.0)
        {
            return Err(Error::invalid("low-speed cap fractions must lie in (0, 1]"));
        }
        Ok(())
    }
}

// timers accumulate dt in floating point; 20 x 0.05 must count as 1.0
const TIMER_EPS: f64 = 1e-9;

fn sustained(timer: f64, limit: f64) -> bool {
    timer >= limit - TIMER_EPS
}

/// Advances the mode machine by one tick of `dt` seconds at measured
/// linear speed `v`.
///
/// Recovery entered here always carries [`RecoveryKind::Rotate`]; the
/// navigator picks the actual maneuver from the scan.
pub fn update_mode(m: ModeState, v: f64, dt: f64, th: &ModeThresholds) -> ModeState {
    let mut next = m;
    match m.mode {
        Mode::HighSpeed => {
            if v < th.v_low {
                next.below_timer += dt;
                if sustained(next.below_timer, th.t_low) {
                    return ModeState::enter(Mode::LowSpeed);
                }
            } else {
                next.below_timer = 0.0;
            }
        }
        Mode::LowSpeed => {
            if v < th.v_rec {
                next.below_timer += dt;
                if sustained(next.below_timer, th.t_rec) {
                    return ModeState::enter(Mode::Braking);
                }
            } else {
                next.below_timer = 0.0;
            }
            if v > th.v_resume {
                next.above_timer += dt;
                if sustained(next.above_timer, th.t_resume) {
                    return ModeState::enter(Mode::HighSpeed);
                }
            } else {
                next.above_timer = 0.0;
            }
        }
        Mode::Braking => {
            next.maneuver_timer += dt;
            if sustained(next.maneuver_timer, th.t_brake) {
                return ModeState::enter(Mode::Recovery(RecoveryKind::Rotate));
            }
        }
        Mode::Recovery(_) => {
            next.maneuver_timer += dt;
            if v > th.v_rec {
                next.above_timer += dt;
                if sustained(next.above_timer, th.t_resume) {
                    return ModeState::enter(Mode::LowSpeed);
                }
            } else {
                next.above_timer = 0.0;
            }
        }
    }
    next
}
