use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::geom::Point2;
use crate::dynamics::{step_unicycle, Control, Footprint, RobotSpec, State};
use crate::planners::{Observation, Planner};
use crate::world::{simulate_lidar, DistanceField, LidarConfig, OccupancyGrid};
use crate::{Error, Result};

use super::optimal::{guidance_route, optimal_time};

/// Clearance the guidance route prefers, meters.
const GUIDE_CLEARANCE: f64 = 0.6;
/// Extra relative cost of a cell touching an obstacle on the guidance route.
const GUIDE_PENALTY: f64 = 4.0;

/// Sub-goal selection along the reference route.
struct Guide {
    waypoints: Vec<Point2>,
    arc: Vec<f64>,
    nearest: usize,
}

impl Guide {
    const SEARCH: usize = 40;

    fn new(waypoints: Vec<Point2>) -> Self {
        let mut arc = Vec::with_capacity(waypoints.len());
        let mut acc = 0.0;
        for (i, p) in waypoints.iter().enumerate() {
            if i > 0 {
                acc += p.distance(waypoints[i - 1]);
            }
            arc.push(acc);
        }
        Guide {
            waypoints,
            arc,
            nearest: 0,
        }
    }

    /// Advances the progress marker and returns a sub-goal `lookahead` away
    /// in the direction of the farthest route point within `lookahead` that
    /// is in line of sight. Once the final goal is that close the sub-goal
    /// lies on the ray through the goal, so planners drive into the goal
    /// region instead of braking for the goal point; `None` when the goal
    /// is close but hidden.
    fn sub_goal(&mut self, env: &OccupancyGrid, p: Point2, lookahead: f64) -> Option<Point2> {
        let end = (self.nearest + Self::SEARCH).min(self.waypoints.len());
        let mut best = (f64::INFINITY, self.nearest);
        for k in self.nearest..end {
            let d = p.distance(self.waypoints[k]);
            if d < best.0 {
                best = (d, k);
            }
        }
        self.nearest = best.1;
        let reach = self.arc[self.nearest] + lookahead;
        let last = self.arc.len() - 1;
        let goal = self.waypoints[last];
        if self.arc[last] <= reach && p.distance(goal) <= lookahead {
            let dir = goal - p;
            let len = dir.norm();
            if len < 1e-9 || !line_of_sight(env, p, goal) {
                return None;
            }
            return Some(p + dir * (lookahead / len));
        }
        let mut aim = self.waypoints[(self.nearest + 1).min(last)];
        for k in self.nearest + 1..=last {
            if self.arc[k] > reach {
                break;
            }
            if line_of_sight(env, p, self.waypoints[k]) {
                aim = self.waypoints[k];
            }
        }
        let dir = aim - p;
        let len = dir.norm();
        if len < 1e-9 {
            return Some(aim);
        }
        Some(p + dir * (lookahead / len))
    }
}

/// No occupied cell along the segment, sampled at quarter-cell spacing.
fn line_of_sight(env: &OccupancyGrid, a: Point2, b: Point2) -> bool {
    let d = b - a;
    let n = (d.norm() / (0.25 * env.resolution())).ceil().max(1.0) as usize;
    (0..=n).all(|i| !env.is_occupied_at(a + d * (i as f64 / n as f64)))
}

/// Header of the optional per-episode trace.
pub const TRACE_HEADER: &str = "t,x,y,psi,v,omega,mode";

/// Obstacle information handed to the planner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Perception {
    /// A local field rebuilt every tick from the lidar endpoints.
    #[serde(rename = "scan")]
    Scan,
    /// The full ground-truth field.
    #[serde(rename = "ground-truth")]
    GroundTruth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    /// Control rate, Hz.
    pub rate: f64,
    pub max_time: f64,
    pub goal_tolerance: f64,
    pub perception: Perception,
    /// Distance along the reference route to the sub-goal handed to the
    /// planner; 0 hands over the final goal directly.
    pub lookahead: f64,
    /// Half-size of the scan field window, meters.
    pub scan_extent: f64,
    pub max_clearance: f64,
    pub lidar: LidarConfig,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            rate: 20.0,
            max_time: 50.0,
            goal_tolerance: 0.5,
            perception: Perception::Scan,
            lookahead: 3.0,
            scan_extent: 5.0,
            max_clearance: 2.0,
            lidar: LidarConfig::default(),
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.max_time > 0.0 && self.goal_tolerance > 0.0) {
            return Err(Error::invalid("rate, max_time and goal_tolerance must be > 0"));
        }
        if !(self.lookahead >= 0.0) {
            return Err(Error::invalid("lookahead must be >= 0"));
        }
        if !(self.scan_extent > 0.0 && self.max_clearance > 0.0) {
            return Err(Error::invalid("scan_extent and max_clearance must be > 0"));
        }
        if self.lidar.n_beams == 0 || !(self.lidar.max_range > 0.0) {
            return Err(Error::invalid("lidar needs at least one beam and a positive range"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Success,
    Collision,
    Timeout,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Collision => "collision",
            Outcome::Timeout => "timeout",
        }
    }

    /// Process exit code used by the `run` command.
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Collision => 1,
            Outcome::Timeout => 2,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Normalised score: `OT / clamp(AT, 2·OT, 8·OT)` on success, else 0.
pub fn score(outcome: Outcome, at: f64, ot: f64) -> f64 {
    if outcome != Outcome::Success {
        return 0.0;
    }
    ot / at.clamp(2.0 * ot, 8.0 * ot)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub env_id: String,
    pub planner: String,
    pub ddp: bool,
    pub speed: f64,
    pub repeat: usize,
    pub seed: u64,
    pub outcome: Outcome,
    /// Traversal time; `None` unless the episode succeeded.
    pub at: Option<f64>,
    /// Simulated seconds until the episode ended.
    pub elapsed: f64,
    pub ot: f64,
    pub over_constrained: bool,
    pub score: f64,
    pub path_length: f64,
    /// Control ticks spent in each planner mode.
    pub modes: BTreeMap<&'static str, u32>,
    pub planning_calls: u64,
    pub point_evaluations: u64,
}

impl EpisodeResult {
    /// One results-CSV row. The `AT` column holds the elapsed time for
    /// every outcome.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{:.3},{:.6},{:.3}",
            self.env_id,
            self.planner,
            self.ddp,
            self.speed,
            self.repeat,
            self.outcome,
            self.elapsed,
            self.ot,
            self.score,
            self.path_length
        )
    }
}

/// Runs one closed-loop episode with the ground-truth judge.
pub fn run_episode(
    env: &OccupancyGrid,
    planner: &mut dyn Planner,
    spec: &RobotSpec,
    cfg: &HarnessConfig,
) -> Result<EpisodeResult> {
    drive(env, planner, spec, cfg, None)
}

/// [`run_episode`] that also writes a trace with [`TRACE_HEADER`].
pub fn run_episode_traced(
    env: &OccupancyGrid,
    planner: &mut dyn Planner,
    spec: &RobotSpec,
    cfg: &HarnessConfig,
    trace: &mut dyn Write,
) -> Result<EpisodeResult> {
    drive(env, planner, spec, cfg, Some(trace))
}

fn drive(
    env: &OccupancyGrid,
    planner: &mut dyn Planner,
    spec: &RobotSpec,
    cfg: &HarnessConfig,
    mut trace: Option<&mut dyn Write>,
) -> Result<EpisodeResult> {
    spec.validate()?;
    cfg.validate()?;
    let dt = 1.0 / cfg.rate;
    let max_ticks = (cfg.max_time * cfg.rate - 1e-9).ceil() as u64;
    let footprint = Footprint::new(spec);
    let truth = match cfg.perception {
        Perception::GroundTruth => Some(DistanceField::compute(env, cfg.max_clearance)),
        Perception::Scan => None,
    };
    let goal = env.goal();
    let mut guide = if cfg.lookahead > 0.0 {
        guidance_route(env, spec, GUIDE_CLEARANCE, GUIDE_PENALTY).ok().map(Guide::new)
    } else {
        None
    };

    if let Some(w) = trace.as_deref_mut() {
        writeln!(w, "{TRACE_HEADER}")?;
    }

    let mut s = State::at_rest(env.start());
    let mut modes = BTreeMap::new();
    let mut path_length = 0.0;
    let mut tick = 0u64;
    let outcome = loop {
        if s.position().distance(goal) < cfg.goal_tolerance {
            break Outcome::Success;
        }
        if tick >= max_ticks {
            break Outcome::Timeout;
        }
        let scan = simulate_lidar(env, s.pose(), &cfg.lidar);
        let local;
        let field = match &truth {
            Some(f) => f,
            None => {
                local = DistanceField::from_scan(&scan, env.resolution(), cfg.scan_extent, cfg.max_clearance);
                &local
            }
        };
        let target = guide
            .as_mut()
            .and_then(|g| g.sub_goal(env, s.position(), cfg.lookahead))
            .unwrap_or(goal);
        let obs = Observation {
            state: s,
            scan: &scan,
            field,
            goal: target,
            dt,
        };
        let u = match planner.plan(&obs) {
            Ok(u) => u,
            Err(Error::NoFeasibleTrajectory) => Control::STOP,
            Err(e) => return Err(e),
        };
        *modes.entry(planner.mode_label()).or_insert(0) += 1;
        if let Some(w) = trace.as_deref_mut() {
            write_trace(w, tick as f64 * dt, &s, planner.mode_label())?;
        }

        let next = step_unicycle(&s, u, dt, spec);
        path_length += next.position().distance(s.position());
        s = next;
        tick += 1;
        if footprint.full_outline(s.pose()).any(|p| env.is_occupied_at(p)) {
            break Outcome::Collision;
        }
    };
    let elapsed = tick as f64 * dt;
    if let Some(w) = trace.as_deref_mut() {
        write_trace(w, elapsed, &s, planner.mode_label())?;
    }

    let (ot, over_constrained) = match optimal_time(env, spec, spec.v_max) {
        Ok(o) => (o.seconds, o.over_constrained),
        // unreachable goal: fall back to the straight-line time
        Err(_) => (env.start().position().distance(goal) / spec.v_max, true),
    };
    let at = (outcome == Outcome::Success).then_some(elapsed);
    let stats = planner.stats();
    Ok(EpisodeResult {
        env_id: String::new(),
        planner: String::new(),
        ddp: false,
        speed: spec.v_max,
        repeat: 0,
        seed: 0,
        outcome,
        at,
        elapsed,
        ot,
        over_constrained,
        score: score(outcome, elapsed, ot),
        path_length,
        modes,
        planning_calls: stats.calls,
        point_evaluations: stats.total_point_evaluations,
    })
}

fn write_trace(w: &mut dyn Write, t: f64, s: &State, mode: &str) -> Result<()> {
    writeln!(w, "{t:.3},{:.4},{:.4},{:.4},{:.4},{:.4},{mode}", s.x, s.y, s.psi, s.v, s.omega)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_formula() {
        assert_eq!(score(Outcome::Collision, 1.0, 1.0), 0.0);
        assert_eq!(score(Outcome::Timeout, 1.0, 1.0), 0.0);
        assert_eq!(score(Outcome::Success, 1.0, 1.0), 0.5);
        assert_eq!(score(Outcome::Success, 4.0, 1.0), 0.25);
        assert_eq!(score(Outcome::Success, 100.0, 1.0), 0.125);
    }

    #[test]
    fn csv_row_layout() {
        let r = EpisodeResult {
            env_id: "env_000".into(),
            planner: "dwa".into(),
            ddp: false,
            speed: 1.5,
            repeat: 2,
            seed: 0,
            outcome: Outcome::Timeout,
            at: None,
            elapsed: 50.0,
            ot: 6.0,
            over_constrained: false,
            score: 0.0,
            path_length: 1.25,
            modes: BTreeMap::new(),
            planning_calls: 0,
            point_evaluations: 0,
        };
        assert_eq!(r.csv_row(), "env_000,dwa,false,1.5,2,timeout,50.000,6.000,0.000000,1.250");
    }
}
