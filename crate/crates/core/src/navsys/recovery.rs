use std::f64::consts::FRAC_PI_6;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Control, RobotSpec, State};
use crate::geom::{wrap_angle, Point2};
use crate::world::LidarScan;

use super::mode::RecoveryKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoveryConfig {
    /// Sectors the field of view is split into for rotation targeting.
    pub sectors: usize,
    /// Penalty per radian between a sector and the goal bearing.
    pub goal_bias: f64,
    pub reverse_speed: f64,
    /// Seconds of reversing before handing back to the planner.
    pub reverse_duration: f64,
    /// Rotation gives up after this many seconds.
    pub rotate_timeout: f64,
    /// Heading tolerance for a finished rotation, radians.
    pub align_tolerance: f64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            sectors: 9,
            goal_bias: 0.5,
            reverse_speed: 0.2,
            reverse_duration: 1.0,
            rotate_timeout: 3.0,
            align_tolerance: 0.1,
        }
    }
}

/// Reverse when anything in the front 60° is closer than the robot length.
pub fn select_recovery(scan: &LidarScan, spec: &RobotSpec) -> RecoveryKind {
    let front_min = (0..scan.n_beams())
        .filter(|&i| scan.relative_bearing(i).abs() <= FRAC_PI_6)
        .map(|i| scan.ranges[i])
        .fold(f64::INFINITY, f64::min);
    if front_min < spec.length {
        RecoveryKind::Reverse
    } else {
        RecoveryKind::Rotate
    }
}

/// Relative bearing of the best-scoring sector: mean free range minus the
/// goal-bias penalty. Ties go to the more counter-clockwise sector.
fn best_sector(s: &State, scan: &LidarScan, goal: Point2, cfg: &RecoveryConfig) -> f64 {
    let k = cfg.sectors.max(1);
    let width = scan.fov / k as f64;
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for i in 0..scan.n_beams() {
        let b = scan.relative_bearing(i);
        let idx = if width > 0.0 {
            (((b + scan.fov / 2.0) / width).floor() as usize).min(k - 1)
        } else {
            k / 2
        };
        sums[idx] += scan.ranges[i];
        counts[idx] += 1;
    }
    let to_goal = goal - s.position();
    let goal_rel = wrap_angle(to_goal.y.atan2(to_goal.x) - s.psi);

    let mut best = (f64::NEG_INFINITY, 0.0);
    for idx in 0..k {
        if counts[idx] == 0 {
            continue;
        }
        let center = -scan.fov / 2.0 + (idx as f64 + 0.5) * width;
        let mean = sums[idx] / counts[idx] as f64;
        let score = mean - cfg.goal_bias * wrap_angle(center - goal_rel).abs();
        // ascending sweep: >= lets the later (more positive) sector win ties
        if score >= best.0 - 1e-12 {
            best = (score.max(best.0), center);
        }
    }
    best.1
}

/// Command for the active recovery maneuver.
pub fn recovery_command(
    kind: RecoveryKind,
    s: &State,
    scan: &LidarScan,
    goal: Point2,
    spec: &RobotSpec,
    cfg: &RecoveryConfig,
) -> Control {
    match kind {
        RecoveryKind::Reverse => Control::new(-cfg.reverse_speed.abs().min(-spec.v_min), 0.0),
        RecoveryKind::Rotate => {
            let target = best_sector(s, scan, goal, cfg);
            let w = 0.5 * spec.omega_max;
            Control::new(0.0, if target >= 0.0 { w } else { -w })
        }
    }
}

/// Absolute heading of the best sector, latched when a rotation starts so
/// the turn direction cannot flip between ticks.
pub fn rotation_heading(s: &State, scan: &LidarScan, goal: Point2, cfg: &RecoveryConfig) -> f64 {
    wrap_angle(s.psi + best_sector(s, scan, goal, cfg))
}

/// Turns in place toward a latched heading.
pub fn rotate_toward(heading: f64, s: &State, spec: &RobotSpec) -> Control {
    let w = 0.5 * spec.omega_max;
    Control::new(0.0, if wrap_angle(heading - s.psi) >= 0.0 { w } else { -w })
}

/// The robot faces a latched heading.
pub fn heading_reached(heading: f64, s: &State, cfg: &RecoveryConfig) -> bool {
    wrap_angle(heading - s.psi).abs() <= cfg.align_tolerance
}

/// The robot faces the best sector.
pub fn rotation_complete(s: &State, scan: &LidarScan, goal: Point2, cfg: &RecoveryConfig) -> bool {
    best_sector(s, scan, goal, cfg).abs() <= cfg.align_tolerance
}
