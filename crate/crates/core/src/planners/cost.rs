use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::geom::{wrap_angle, Point2};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostWeights {
    pub w_goal: f64,
    pub w_obstacle: f64,
    pub w_path: f64,
    pub w_smooth: f64,
    pub w_heading: f64,
    /// Clearance (m) beyond which the obstacle term vanishes.
    pub obstacle_saturation: f64,
    /// Added to the cost of colliding trajectories.
    pub collision_penalty: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights {
            w_goal: 1.0,
            w_obstacle: 0.05,
            w_path: 0.0,
            w_smooth: 0.05,
            w_heading: 0.1,
            obstacle_saturation: 0.3,
            collision_penalty: 1000.0,
        }
    }
}

impl CostWeights {
    /// Binary obstacle handling: no clearance shaping, only the collision
    /// penalty.
    pub fn binary() -> Self {
        CostWeights {
            w_obstacle: 0.0,
            ..CostWeights::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.w_goal,
            self.w_obstacle,
            self.w_path,
            self.w_smooth,
            self.w_heading,
            self.collision_penalty,
        ];
        if all.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::invalid("cost weights must be nonnegative"));
        }
        if !(self.obstacle_saturation > 0.0) {
            return Err(Error::invalid("obstacle_saturation must be > 0"));
        }
        Ok(())
    }
}

/// Five-term trajectory cost, plus the collision penalty when the
/// trajectory collided.
pub fn evaluate_cost(traj: &Trajectory, goal: Point2, weights: &CostWeights) -> f64 {
    let last = traj.final_state();
    let to_goal = goal - last.position();
    let goal_term = to_goal.norm();

    // Each step is weighted by its share of the horizon relative to a
    // uniform split, so the sum does not depend on how the horizon is cut.
    // With uniform intervals every weight is 1.
    let sat = weights.obstacle_saturation;
    let horizon: f64 = traj.deltas.iter().sum();
    let steps = traj.deltas.len() as f64;
    let obstacle_term: f64 = traj
        .clearance
        .iter()
        .zip(&traj.deltas)
        .map(|(&c, &d)| step_weight(d, horizon, steps) * (sat - c).max(0.0) / sat)
        .sum();

    let path_term = traj.arc_length();

    let smooth_term: f64 = traj
        .states
        .windows(2)
        .map(|w| (w[1].omega - w[0].omega).abs())
        .sum();

    let heading_term = if goal_term > 1e-9 {
        wrap_angle(to_goal.y.atan2(to_goal.x) - last.psi).abs()
    } else {
        0.0
    };

    let mut cost = weights.w_goal * goal_term
        + weights.w_obstacle * obstacle_term
        + weights.w_path * path_term
        + weights.w_smooth * smooth_term
        + weights.w_heading * heading_term;
    if traj.collision {
        cost += weights.collision_penalty;
    }
    cost
}

fn step_weight(delta: f64, horizon: f64, steps: f64) -> f64 {
    let uniform = horizon / steps;
    if delta == uniform {
        1.0
    } else {
        delta / uniform
    }
}
