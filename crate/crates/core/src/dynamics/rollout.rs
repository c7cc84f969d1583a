use crate::world::DistanceField;
use crate::{Error, Result};

use super::footprint::Footprint;
use super::schedule::FidelitySchedule;
use super::state::{step_unicycle, Control, RobotSpec, State};

/// What a rollout collision-checks after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Probe {
    /// The schedule's masked footprint boundary points.
    #[default]
    Boundary,
    /// Only the robot center.
    Center,
}

/// A rolled-out state sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `T + 1` states starting at the initial state.
    pub states: Vec<State>,
    /// Integration interval of each step.
    pub deltas: Vec<f64>,
    /// Minimum clearance over the checked points after each step.
    pub clearance: Vec<f64>,
    pub collision: bool,
    /// Step whose resulting state collided.
    pub first_collision_step: Option<usize>,
    /// Filled in by planners.
    pub cost: f64,
    /// Boundary points positioned and checked.
    pub points_checked: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn arc_length(&self) -> f64 {
        self.states
            .windows(2)
            .map(|w| w[0].position().distance(w[1].position()))
            .sum()
    }
}

/// Rolls out `controls` (one per step, or a single constant command) under
/// the schedule, checking the masked boundary points after every step.
pub fn rollout(
    s0: &State,
    controls: &[Control],
    sched: &FidelitySchedule,
    field: &DistanceField,
    spec: &RobotSpec,
) -> Result<Trajectory> {
    rollout_with(s0, controls, sched, field, spec, &Footprint::new(spec), Probe::Boundary)
}

/// [`rollout`] with a prebuilt footprint and an explicit probe.
pub fn rollout_with(
    s0: &State,
    controls: &[Control],
    sched: &FidelitySchedule,
    field: &DistanceField,
    spec: &RobotSpec,
    footprint: &Footprint,
    probe: Probe,
) -> Result<Trajectory> {
    let steps = sched.steps();
    if sched.n() != spec.n || footprint.points().len() != spec.n {
        return Err(Error::invalid(format!(
            "schedule has {} boundary points, robot has {}",
            sched.n(),
            spec.n
        )));
    }
    if controls.len() != 1 && controls.len() != steps {
        return Err(Error::invalid(format!(
            "expected 1 or {steps} controls, got {}",
            controls.len()
        )));
    }

    let mut states = Vec::with_capacity(steps + 1);
    let mut clearance = Vec::with_capacity(steps);
    states.push(*s0);
    let mut s = *s0;
    let mut first_collision = None;
    let mut checked = 0;
    let body = footprint.points();

    for t in 0..steps {
        let u = if controls.len() == 1 { controls[0] } else { controls[t] };
        s = step_unicycle(&s, u, sched.deltas()[t], spec);
        let (min_clear, hit) = match probe {
            Probe::Center => {
                let d = field.at(s.position());
                (d, field.collides(s.position()))
            }
            Probe::Boundary => {
                let (sn, cs) = s.psi.sin_cos();
                let mut min_clear = f64::INFINITY;
                let mut hit = false;
                for &i in sched.active(t) {
                    let b = body[i];
                    let p = crate::geom::Point2::new(
                        s.x + cs * b.x - sn * b.y,
                        s.y + sn * b.x + cs * b.y,
                    );
                    let d = field.at(p);
                    min_clear = min_clear.min(d);
                    hit |= field.collides(p);
                }
                checked += sched.active(t).len();
                (min_clear, hit)
            }
        };
        states.push(s);
        clearance.push(min_clear);
        if hit {
            first_collision = Some(t);
            break;
        }
    }

    // pad the tail with the colliding state
    while states.len() < steps + 1 {
        states.push(s);
        clearance.push(*clearance.last().expect("at least one step taken"));
    }

    Ok(Trajectory {
        states,
        deltas: sched.deltas().to_vec(),
        clearance,
        collision: first_collision.is_some(),
        first_collision_step: first_collision,
        cost: 0.0,
        points_checked: checked,
    })
}
