use crate::dynamics::{rollout_with, Control, FidelitySchedule, Footprint, RobotSpec, State};
use crate::geom::Point2;
use crate::world::DistanceField;
use crate::{Error, Result};

use super::cost::evaluate_cost;
use super::{check_spec, Observation, PlanStats, Planner, PlannerConfig};

/// `count` evenly spaced values over `[lo, hi]`.
fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| {
        if count == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        }
    })
}

/// One-tick dynamic window `(v_lo, v_hi, w_lo, w_hi)`; forward motion only.
pub(crate) fn dynamic_window(s: &State, spec: &RobotSpec, dt: f64) -> (f64, f64, f64, f64) {
    let v_lo = (s.v - spec.a_max * dt).max(0.0);
    let v_hi = (s.v + spec.a_max * dt).min(spec.v_max).max(v_lo);
    let w_lo = (s.omega - spec.alpha_max * dt).max(-spec.omega_max);
    let w_hi = (s.omega + spec.alpha_max * dt).min(spec.omega_max).max(w_lo);
    (v_lo, v_hi, w_lo, w_hi)
}

pub(crate) struct DwaOutcome {
    pub control: Control,
    pub points: usize,
}

pub(crate) fn dwa_search(
    s: &State,
    field: &DistanceField,
    goal: Point2,
    cfg: &PlannerConfig,
    spec: &RobotSpec,
    sched: &FidelitySchedule,
    footprint: &Footprint,
    dt: f64,
) -> Result<DwaOutcome> {
    let (v_lo, v_hi, w_lo, w_hi) = dynamic_window(s, spec, dt);
    let mut best: Option<(f64, Control)> = None;
    let mut points = 0;
    for v in linspace(v_lo, v_hi, cfg.dwa_v_samples) {
        for w in linspace(w_lo, w_hi, cfg.dwa_omega_samples) {
            let u = Control::new(v, w);
            let tr = rollout_with(s, &[u], sched, field, spec, footprint, cfg.probe.into())?;
            points += tr.points_checked;
            if tr.collision {
                continue;
            }
            let c = evaluate_cost(&tr, goal, &cfg.weights);
            if best.is_none_or(|(bc, _)| c < bc) {
                best = Some((c, u));
            }
        }
    }
    match best {
        Some((_, control)) => Ok(DwaOutcome { control, points }),
        None => Err(Error::NoFeasibleTrajectory),
    }
}

/// Dynamic-window search: a regular `(v, ω)` grid over the window reachable
/// in one control period, each rolled out as a constant command. Returns
/// the cheapest collision-free command.
pub fn dwa_plan(
    s: &State,
    field: &DistanceField,
    goal: Point2,
    cfg: &PlannerConfig,
    spec: &RobotSpec,
    dt: f64,
) -> Result<Control> {
    let sched = check_spec(spec, cfg)?;
    let footprint = Footprint::new(spec);
    dwa_search(s, field, goal, cfg, spec, &sched, &footprint, dt).map(|o| o.control)
}

pub struct DwaPlanner {
    cfg: PlannerConfig,
    spec: RobotSpec,
    sched: FidelitySchedule,
    footprint: Footprint,
    stats: PlanStats,
}

impl DwaPlanner {
    pub fn new(cfg: PlannerConfig, spec: RobotSpec) -> Result<Self> {
        let sched = check_spec(&spec, &cfg)?;
        let footprint = Footprint::new(&spec);
        Ok(DwaPlanner {
            cfg,
            spec,
            sched,
            footprint,
            stats: PlanStats::default(),
        })
    }
}

impl Planner for DwaPlanner {
    fn plan(&mut self, obs: &Observation<'_>) -> Result<Control> {
        let out = dwa_search(
            &obs.state,
            obs.field,
            obs.goal,
            &self.cfg,
            &self.spec,
            &self.sched,
            &self.footprint,
            obs.dt,
        );
        let points = out.as_ref().map_or(0, |o| o.points);
        self.stats.record(points);
        out.map(|o| o.control)
    }

    fn stats(&self) -> PlanStats {
        self.stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2;
    use crate::planners::PlannerKind;
    use crate::world::OccupancyGrid;

    fn open_field() -> DistanceField {
        let (w, h) = (100, 100);
        let g = OccupancyGrid::new(
            w,
            h,
            0.1,
            Point2::new(-5.0, -5.0),
            vec![false; w * h],
            Pose2::default(),
            Point2::new(4.0, 0.0),
        )
        .unwrap();
        DistanceField::compute(&g, 2.0)
    }

    #[test]
    fn window_is_clipped() {
        let spec = RobotSpec::default();
        let (v_lo, v_hi, w_lo, w_hi) = dynamic_window(&State::default(), &spec, 0.05);
        assert_eq!(v_lo, 0.0);
        assert!((v_hi - 0.1).abs() < 1e-12);
        assert!((w_lo + 0.2).abs() < 1e-12 && (w_hi - 0.2).abs() < 1e-12);
    }

    #[test]
    fn repeatable() {
        let spec = RobotSpec::default();
        let cfg = PlannerConfig::for_kind(PlannerKind::Dwa);
        let f = open_field();
        let s = State { v: 0.5, ..State::default() };
        let a = dwa_plan(&s, &f, Point2::new(4.0, 1.0), &cfg, &spec, 0.05).unwrap();
        let b = dwa_plan(&s, &f, Point2::new(4.0, 1.0), &cfg, &spec, 0.05).unwrap();
        assert_eq!(a, b);
    }
}
