use std::f64::consts::FRAC_PI_6;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    build_schedule, rollout_with, step_unicycle, Control, FidelitySchedule, Footprint, Probe, RobotSpec, State,
};
use crate::geom::Point2;
use crate::planners::{evaluate_cost, softmax_weights, CostWeights, Observation, PlanStats, Planner};
use crate::world::{DistanceField, LidarScan};
use crate::{Error, Result};

use super::mode::{update_mode, Mode, ModeState, ModeThresholds};
use super::recovery::{
    heading_reached, recovery_command, rotate_toward, rotation_complete, rotation_heading,
    select_recovery, RecoveryConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NavsysConfig {
    pub steps: usize,
    pub horizon: f64,
    pub p: f64,
    pub samples_high: usize,
    pub samples_low: usize,
    pub sigma_v: f64,
    pub sigma_omega: f64,
    pub lambda: f64,
    pub retain: usize,
    pub weights: CostWeights,
    pub thresholds: ModeThresholds,
    pub recovery: RecoveryConfig,
    /// Cell size and half-extent of the scan-built field used by
    /// [`ddp_navigate`].
    pub scan_resolution: f64,
    pub scan_extent: f64,
    pub max_clearance: f64,
    /// Distance kept between the robot center and the nearest return in
    /// the front 60° when braking at `a_max`; caps the sampled speed.
    /// 0 disables the cap.
    pub stop_margin: f64,
    /// Smallest fraction of the speed cap kept near obstacles.
    pub slow_floor: f64,
    /// Samples keeping every checked point at least this clear are
    /// preferred over ones that merely avoid collision, meters.
    pub margin: f64,
    /// Seconds of a recovery command checked for collision before use.
    pub maneuver_check: f64,
    pub seed: u64,
}

impl Default for NavsysConfig {
    fn default() -> Self {
        NavsysConfig {
            steps: 30,
            horizon: 2.0,
            p: 1.4,
            samples_high: 500,
            samples_low: 800,
            sigma_v: 0.15,
            sigma_omega: 0.4,
            lambda: 0.3,
            retain: 10,
            weights: CostWeights {
                w_goal: 1.0,
                w_obstacle: 0.04,
                w_path: 0.05,
                w_smooth: 0.05,
                w_heading: 0.05,
                obstacle_saturation: 0.3,
                collision_penalty: 1000.0,
            },
            thresholds: ModeThresholds::default(),
            recovery: RecoveryConfig::default(),
            scan_resolution: 0.15,
            scan_extent: 5.0,
            max_clearance: 2.0,
            stop_margin: 0.35,
            slow_floor: 0.2,
            margin: 0.2,
            maneuver_check: 0.5,
            seed: 0,
        }
    }
}

impl NavsysConfig {
    pub fn validate(&self, spec: &RobotSpec) -> Result<()> {
        if self.samples_high == 0 || self.samples_low == 0 || self.retain == 0 {
            return Err(Error::invalid("navsys sample and retain counts must be >= 1"));
        }
        if !(self.lambda > 0.0) || self.sigma_v < 0.0 || self.sigma_omega < 0.0 {
            return Err(Error::invalid("navsys needs lambda > 0 and sigma >= 0"));
        }
        if !(self.scan_resolution > 0.0 && self.scan_extent > 0.0) {
            return Err(Error::invalid("scan field resolution and extent must be > 0"));
        }
        if !(self.margin >= 0.0 && self.maneuver_check >= 0.0) {
            return Err(Error::invalid("navsys margin and maneuver_check must be >= 0"));
        }
        if !(self.stop_margin >= 0.0) || !(self.slow_floor > 0.0 && self.slow_floor <= 1.0) {
            return Err(Error::invalid("navsys needs stop_margin >= 0 and slow_floor in (0, 1]"));
        }
        self.weights.validate()?;
        self.thresholds.validate(spec.v_max)
    }
}

/// Stateful navigator: mode machine, sampler and schedule.
pub struct DdpNavigator {
    cfg: NavsysConfig,
    spec: RobotSpec,
    sched: FidelitySchedule,
    footprint: Footprint,
    rng: ChaCha8Rng,
    mode: ModeState,
    stats: PlanStats,
    /// Heading latched when a rotate recovery begins.
    rotate_heading: Option<f64>,
}

impl DdpNavigator {
    pub fn new(cfg: NavsysConfig, spec: RobotSpec) -> Result<Self> {
        spec.validate()?;
        cfg.validate(&spec)?;
        let sched = build_schedule(cfg.steps, cfg.horizon, cfg.p, spec.n)?;
        Ok(DdpNavigator {
            footprint: Footprint::new(&spec),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            mode: ModeState::default(),
            stats: PlanStats::default(),
            rotate_heading: None,
            sched,
            cfg,
            spec,
        })
    }

    pub fn with_mode(mut self, mode: ModeState) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> ModeState {
        self.mode
    }

    pub fn schedule(&self) -> &FidelitySchedule {
        &self.sched
    }

    /// Speed caps `(v, ω)` of a mode.
    pub fn caps(&self, mode: Mode) -> (f64, f64) {
        match mode {
            Mode::LowSpeed => (
                self.cfg.thresholds.low_v_fraction * self.spec.v_max,
                self.cfg.thresholds.low_omega_fraction * self.spec.omega_max,
            ),
            _ => (self.spec.v_max, self.spec.omega_max),
        }
    }

    /// One control tick against a prepared obstacle field.
    pub fn navigate(
        &mut self,
        s: &State,
        field: &DistanceField,
        scan: &LidarScan,
        goal: Point2,
        dt: f64,
    ) -> Control {
        let before = self.mode.mode;
        self.mode = update_mode(self.mode, s.v, dt, &self.cfg.thresholds);
        if let Mode::Recovery(_) = self.mode.mode {
            if !matches!(before, Mode::Recovery(_)) {
                let kind = select_recovery(scan, &self.spec);
                self.mode.mode = Mode::Recovery(kind);
                self.rotate_heading = (kind == super::RecoveryKind::Rotate)
                    .then(|| rotation_heading(s, scan, goal, &self.cfg.recovery));
            }
        }

        match self.mode.mode {
            Mode::Braking => {
                self.stats.record(0);
                return Control::STOP;
            }
            Mode::Recovery(kind) => {
                let rc = &self.cfg.recovery;
                let heading = self.rotate_heading;
                let done = match (kind, heading) {
                    (super::RecoveryKind::Rotate, Some(h)) => {
                        self.mode.maneuver_timer >= rc.rotate_timeout || heading_reached(h, s, rc)
                    }
                    (super::RecoveryKind::Rotate, None) => {
                        self.mode.maneuver_timer >= rc.rotate_timeout
                            || rotation_complete(s, scan, goal, rc)
                    }
                    (super::RecoveryKind::Reverse, _) => {
                        self.mode.maneuver_timer >= rc.reverse_duration
                    }
                };
                if !done {
                    self.stats.record(0);
                    let u = match (kind, heading) {
                        (super::RecoveryKind::Rotate, Some(h)) => rotate_toward(h, s, &self.spec),
                        _ => recovery_command(kind, s, scan, goal, &self.spec, rc),
                    };
                    return self.guarded(u, s, field, dt);
                }
                self.rotate_heading = None;
                self.mode = ModeState::enter(Mode::LowSpeed);
            }
            Mode::HighSpeed | Mode::LowSpeed => {}
        }

        match self.sample_and_select(s, field, scan, goal, dt) {
            Some(u) => u,
            None => {
                self.mode = ModeState::enter(Mode::Braking);
                Control::STOP
            }
        }
    }

    /// `u` if holding it for `maneuver_check` seconds stays clear. A blocked
    /// turn tries the other direction, then reversing, then stopping.
    fn guarded(&self, u: Control, s: &State, field: &DistanceField, dt: f64) -> Control {
        let mut options = vec![u];
        if u.v == 0.0 && u.omega != 0.0 {
            options.push(Control::new(0.0, -u.omega));
            options.push(Control::new(-self.cfg.recovery.reverse_speed.abs().min(-self.spec.v_min), 0.0));
        }
        options
            .into_iter()
            .find(|c| self.maneuver_clear(s, *c, field, dt))
            .unwrap_or(Control::STOP)
    }

    /// Holding `u` for `maneuver_check` seconds stays clear, and so does
    /// stopping after one tick of it, so braking next tick is always safe.
    fn maneuver_clear(&self, s: &State, u: Control, field: &DistanceField, dt: f64) -> bool {
        let clear = |x: &State| !self.footprint.full_outline(x.pose()).any(|p| field.collides(p));
        let ticks = (self.cfg.maneuver_check / dt).ceil() as usize;
        let mut x = *s;
        let holds = (0..ticks).all(|_| {
            x = step_unicycle(&x, u, dt, &self.spec);
            clear(&x)
        });
        if !holds {
            return false;
        }
        let mut x = step_unicycle(s, u, dt, &self.spec);
        let stop_ticks = (x.v.abs() / self.spec.a_max).max(x.omega.abs() / self.spec.alpha_max) / dt;
        (0..stop_ticks.ceil() as usize + 1).all(|_| {
            x = step_unicycle(&x, Control::STOP, dt, &self.spec);
            clear(&x)
        })
    }

    /// Speed from which the robot can still stop short of the nearest
    /// frontal return, never below `slow_floor` of `v_cap`.
    pub fn stopping_cap(&self, scan: &LidarScan, v_cap: f64) -> f64 {
        if self.cfg.stop_margin <= 0.0 {
            return v_cap;
        }
        let front = (0..scan.n_beams())
            .filter(|&i| scan.relative_bearing(i).abs() <= FRAC_PI_6)
            .map(|i| scan.ranges[i])
            .fold(f64::INFINITY, f64::min);
        let room = (front - self.cfg.stop_margin).max(0.0);
        (2.0 * self.spec.a_max * room).sqrt().clamp(self.cfg.slow_floor * v_cap, v_cap)
    }

    fn sample_and_select(
        &mut self,
        s: &State,
        field: &DistanceField,
        scan: &LidarScan,
        goal: Point2,
        dt: f64,
    ) -> Option<Control> {
        let mode = self.mode.mode;
        let (v_cap, w_cap) = self.caps(mode);
        let v_cap = self.stopping_cap(scan, v_cap);
        let k_total = if mode == Mode::LowSpeed {
            self.cfg.samples_low
        } else {
            self.cfg.samples_high
        };

        let mut candidates = Vec::with_capacity(k_total);
        let mut points = 0;
        for _ in 0..k_total {
            let zv: f64 = StandardNormal.sample(&mut self.rng);
            let zw: f64 = StandardNormal.sample(&mut self.rng);
            let v = (self.rng.random_range(0.0..=v_cap) + self.cfg.sigma_v * zv).clamp(0.0, v_cap);
            let w = (self.rng.random_range(-w_cap..=w_cap) + self.cfg.sigma_omega * zw)
                .clamp(-w_cap, w_cap);
            let u = Control::new(v, w);
            let tr = rollout_with(s, &[u], &self.sched, field, &self.spec, &self.footprint, Probe::Boundary)
                .expect("schedule built for this robot");
            points += tr.points_checked;
            if !tr.collision {
                let safe = tr.clearance.iter().all(|&c| c >= self.cfg.margin);
                candidates.push((evaluate_cost(&tr, goal, &self.cfg.weights), u, safe));
            }
        }
        if candidates.is_empty() {
            self.stats.record(points);
            return None;
        }
        // the margin is only worth keeping while some clear sample still moves
        let with_margin = candidates.iter().any(|c| c.2 && c.1.v > self.cfg.thresholds.v_low);
        if with_margin {
            candidates.retain(|c| c.2);
        }
        // stable sort keeps sample order among equal costs
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        candidates.truncate(self.cfg.retain);
        let costs: Vec<f64> = candidates.iter().map(|c| c.0).collect();
        let weights = softmax_weights(&costs, self.cfg.lambda);
        let (v, w) = candidates
            .iter()
            .zip(&weights)
            .fold((0.0, 0.0), |(v, w), ((_, u, _), &k)| (v + k * u.v, w + k * u.omega));
        let blended = Control::new(v.clamp(0.0, v_cap), w.clamp(-w_cap, w_cap));
        // a blend of safe arcs is not always safe, so the blend and then the
        // candidates in cost order must also clear the tick-rate check
        let check = rollout_with(s, &[blended], &self.sched, field, &self.spec, &self.footprint, Probe::Boundary)
            .expect("schedule built for this robot");
        self.stats.record(points + check.points_checked);
        let blend_ok = !check.collision
            && !(with_margin && check.clearance.iter().any(|&c| c < self.cfg.margin));
        std::iter::once(blended)
            .filter(|_| blend_ok)
            .chain(candidates.iter().map(|c| c.1))
            .find(|u| self.maneuver_clear(s, *u, field, dt))
    }
}

impl Planner for DdpNavigator {
    fn plan(&mut self, obs: &Observation<'_>) -> Result<Control> {
        Ok(self.navigate(&obs.state, obs.field, obs.scan, obs.goal, obs.dt))
    }

    fn stats(&self) -> PlanStats {
        self.stats
    }

    fn mode_label(&self) -> &'static str {
        self.mode.mode.label()
    }
}

/// Single tick of the navigator from a raw scan: builds the scan-only
/// obstacle field, advances `mode`, and returns the command with the new
/// mode.
pub fn ddp_navigate(
    s: &State,
    scan: &LidarScan,
    goal: Point2,
    mode: ModeState,
    cfg: &NavsysConfig,
    spec: &RobotSpec,
    dt: f64,
) -> Result<(Control, ModeState)> {
    let field = DistanceField::from_scan(scan, cfg.scan_resolution, cfg.scan_extent, cfg.max_clearance);
    let mut nav = DdpNavigator::new(cfg.clone(), spec.clone())?.with_mode(mode);
    let u = nav.navigate(s, &field, scan, goal, dt);
    Ok((u, nav.mode()))
}
