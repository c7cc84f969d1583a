//! Sampling planners sharing one rollout engine and cost.
//!
//! Every planner runs either with a fixed fidelity (uniform interval, every
//! boundary point checked) or with the decaying schedule, selected by
//! [`PlannerConfig::ddp_enabled`]. Nothing else in a planner branches on
//! that flag.

mod cost;
mod dwa;
mod mppi;

use serde::{Deserialize, Serialize};

use crate::dynamics::{build_schedule, Control, FidelitySchedule, Probe, RobotSpec, State};
use crate::geom::Point2;
use crate::world::{DistanceField, LidarScan};
use crate::{Error, Result};

pub use cost::{evaluate_cost, CostWeights};
pub use dwa::{dwa_plan, DwaPlanner};
pub use mppi::{
    log_mppi_plan, mppi_plan, softmax_weights, LogMppiPlanner, MppiPlanner, NoiseSampler,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlannerKind {
    #[serde(rename = "dwa")]
    Dwa,
    #[serde(rename = "mppi")]
    Mppi,
    #[serde(rename = "log-mppi")]
    LogMppi,
}

impl PlannerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlannerKind::Dwa => "dwa",
            PlannerKind::Mppi => "mppi",
            PlannerKind::LogMppi => "log-mppi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub kind: PlannerKind,
    pub ddp_enabled: bool,
    /// Rollout steps `T`.
    pub steps: usize,
    /// Rollout horizon in seconds.
    pub horizon: f64,
    /// Schedule exponent; only used when `ddp_enabled`.
    pub p: f64,
    /// Drop boundary points along the horizon; only used when `ddp_enabled`.
    pub decay_points: bool,
    /// Sample count `K`.
    pub samples: usize,
    /// Softmax temperature.
    pub lambda: f64,
    pub sigma_v: f64,
    pub sigma_omega: f64,
    /// Log-normal spread of the Log-MPPI multiplier.
    pub sigma_n: f64,
    /// Best collision-free trajectories kept for averaging.
    pub retain: usize,
    pub probe: ProbeSetting,
    /// DWA grid density.
    pub dwa_v_samples: usize,
    pub dwa_omega_samples: usize,
    pub weights: CostWeights,
    pub seed: u64,
}

/// Serializable mirror of [`Probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeSetting {
    #[serde(rename = "boundary")]
    Boundary,
    #[serde(rename = "center")]
    Center,
}

impl From<ProbeSetting> for Probe {
    fn from(p: ProbeSetting) -> Probe {
        match p {
            ProbeSetting::Boundary => Probe::Boundary,
            ProbeSetting::Center => Probe::Center,
        }
    }
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig::for_kind(PlannerKind::Mppi)
    }
}

impl PlannerConfig {
    /// Fixed-fidelity defaults for a planner family.
    pub fn for_kind(kind: PlannerKind) -> Self {
        let base = PlannerConfig {
            kind,
            ddp_enabled: false,
            steps: 30,
            horizon: 2.0,
            p: 1.4,
            decay_points: true,
            samples: 300,
            lambda: 0.3,
            sigma_v: 0.5,
            sigma_omega: 1.0,
            sigma_n: 0.0,
            retain: 10,
            probe: ProbeSetting::Boundary,
            dwa_v_samples: 11,
            dwa_omega_samples: 21,
            weights: CostWeights::default(),
            seed: 0,
        };
        match kind {
            PlannerKind::Dwa => PlannerConfig {
                samples: 11 * 21,
                weights: CostWeights {
                    w_obstacle: 0.2,
                    w_heading: 0.05,
                    ..CostWeights::default()
                },
                ..base
            },
            PlannerKind::Mppi => base,
            PlannerKind::LogMppi => PlannerConfig {
                sigma_v: 0.3,
                sigma_omega: 0.6,
                sigma_n: 0.6,
                lambda: 0.05,
                probe: ProbeSetting::Center,
                weights: CostWeights::binary(),
                ..base
            },
        }
    }

    /// The scheduled-fidelity variant of `self`. Log-MPPI also switches
    /// from center-point to boundary-point checking.
    pub fn augmented(mut self) -> Self {
        self.ddp_enabled = true;
        if self.kind == PlannerKind::LogMppi {
            self.probe = ProbeSetting::Boundary;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("sample count must be >= 1"));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::invalid("lambda must be > 0"));
        }
        if self.sigma_v < 0.0 || self.sigma_omega < 0.0 || self.sigma_n < 0.0 {
            return Err(Error::invalid("noise standard deviations must be >= 0"));
        }
        if self.retain == 0 {
            return Err(Error::invalid("retain must be >= 1"));
        }
        if self.dwa_v_samples == 0 || self.dwa_omega_samples == 0 {
            return Err(Error::invalid("DWA grid needs at least one sample per axis"));
        }
        self.weights.validate()
    }

    pub fn schedule(&self, n: usize) -> Result<FidelitySchedule> {
        if self.ddp_enabled {
            let s = build_schedule(self.steps, self.horizon, self.p, n)?;
            Ok(if self.decay_points { s } else { s.with_full_masks() })
        } else {
            FidelitySchedule::fixed(self.steps, self.horizon, n)
        }
    }
}

/// What a planner sees each control tick.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub state: State,
    pub scan: &'a LidarScan,
    /// Obstacle field the planner should plan against.
    pub field: &'a DistanceField,
    pub goal: Point2,
    /// Control period, seconds.
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlanStats {
    pub calls: u64,
    /// Boundary points evaluated during the most recent call.
    pub last_point_evaluations: usize,
    pub total_point_evaluations: u64,
}

impl PlanStats {
    pub(crate) fn record(&mut self, points: usize) {
        self.calls += 1;
        self.last_point_evaluations = points;
        self.total_point_evaluations += points as u64;
    }
}

/// A closed-loop controller.
pub trait Planner: Send {
    fn plan(&mut self, obs: &Observation<'_>) -> Result<Control>;

    fn stats(&self) -> PlanStats;

    /// Short label for the current internal mode, used in traces.
    fn mode_label(&self) -> &'static str {
        "-"
    }
}

pub(crate) fn check_spec(spec: &RobotSpec, cfg: &PlannerConfig) -> Result<FidelitySchedule> {
    spec.validate()?;
    cfg.validate()?;
    cfg.schedule(spec.n)
}
