use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::{rollout_with, Control, FidelitySchedule, Footprint, RobotSpec, State};
use crate::geom::Point2;
use crate::world::DistanceField;
use crate::{Error, Result};

use super::cost::evaluate_cost;
use super::{check_spec, Observation, PlanStats, Planner, PlannerConfig};

/// Seeded perturbation source.
///
/// Gaussian draws and Log-MPPI's log-normal multipliers come from separate
/// streams, so MPPI and Log-MPPI planners built from the same seed see the
/// same Gaussian part.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    gauss: ChaCha8Rng,
    mult: ChaCha8Rng,
}

impl NoiseSampler {
    pub fn new(seed: u64) -> Self {
        NoiseSampler {
            gauss: ChaCha8Rng::seed_from_u64(seed),
            mult: ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15),
        }
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.gauss)
    }

    /// Log-normal multiplier with unit median; exactly 1 when `sigma_n` is 0.
    pub fn multiplier(&mut self, sigma_n: f64) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.mult);
        (sigma_n * z).exp()
    }

    /// `samples * steps` perturbations in sample-major order.
    fn perturbations(
        &mut self,
        samples: usize,
        steps: usize,
        cfg: &PlannerConfig,
        log_normal: bool,
    ) -> Vec<Control> {
        (0..samples * steps)
            .map(|_| {
                let mut dv = cfg.sigma_v * self.normal();
                let mut dw = cfg.sigma_omega * self.normal();
                if log_normal {
                    dv *= self.multiplier(cfg.sigma_n);
                    dw *= self.multiplier(cfg.sigma_n);
                }
                Control::new(dv, dw)
            })
            .collect()
    }
}

/// Normalised `exp(-(c - c_min) / λ)`.
pub fn softmax_weights(costs: &[f64], lambda: f64) -> Vec<f64> {
    let c_min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = costs.iter().map(|c| (-(c - c_min) / lambda).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    /// Average only the best collision-free samples.
    Filtered,
    /// Log-normal noise, every sample averaged.
    LogNormal,
}

pub(crate) struct PathIntegralOutcome {
    pub control: Control,
    pub nominal: Vec<Control>,
    pub points: usize,
}

#[allow(clippy::too_many_arguments)]
fn path_integral(
    s: &State,
    field: &DistanceField,
    goal: Point2,
    cfg: &PlannerConfig,
    spec: &RobotSpec,
    sched: &FidelitySchedule,
    footprint: &Footprint,
    nominal: &[Control],
    sampler: &mut NoiseSampler,
    variant: Variant,
) -> Result<PathIntegralOutcome> {
    let steps = sched.steps();
    if nominal.len() != steps {
        return Err(Error::invalid(format!(
            "nominal sequence has {} controls, schedule has {steps} steps",
            nominal.len()
        )));
    }
    let k_total = cfg.samples;
    let noise = sampler.perturbations(k_total, steps, cfg, variant == Variant::LogNormal);

    let mut sequences: Vec<Vec<Control>> = Vec::with_capacity(k_total);
    let mut costs = Vec::with_capacity(k_total);
    let mut collided = Vec::with_capacity(k_total);
    let mut points = 0;
    for k in 0..k_total {
        // averaged unclamped so samples cut at a bound do not bias the mean
        let seq: Vec<Control> = nominal
            .iter()
            .zip(&noise[k * steps..(k + 1) * steps])
            .map(|(u, e)| Control::new(u.v + e.v, u.omega + e.omega))
            .collect();
        let applied: Vec<Control> = seq.iter().map(|&u| spec.clamp(u)).collect();
        let tr = rollout_with(s, &applied, sched, field, spec, footprint, cfg.probe.into())?;
        points += tr.points_checked;
        costs.push(evaluate_cost(&tr, goal, &cfg.weights));
        collided.push(tr.collision);
        sequences.push(seq);
    }

    let mut chosen: Vec<usize> = match variant {
        Variant::LogNormal => (0..k_total).collect(),
        Variant::Filtered => {
            let mut free: Vec<usize> = (0..k_total).filter(|&k| !collided[k]).collect();
            if free.is_empty() {
                return Err(Error::NoFeasibleTrajectory);
            }
            free.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
            free.truncate(cfg.retain);
            free
        }
    };
    // reduce in sample-index order
    chosen.sort_unstable();
    let chosen_costs: Vec<f64> = chosen.iter().map(|&k| costs[k]).collect();
    let weights = softmax_weights(&chosen_costs, cfg.lambda);

    let mut averaged = vec![Control::STOP; steps];
    for (&k, &w) in chosen.iter().zip(&weights) {
        for (acc, u) in averaged.iter_mut().zip(&sequences[k]) {
            acc.v += w * u.v;
            acc.omega += w * u.omega;
        }
    }
    let averaged: Vec<Control> = averaged.into_iter().map(|u| spec.clamp(u)).collect();
    Ok(PathIntegralOutcome {
        control: averaged[0],
        nominal: averaged,
        points,
    })
}

/// One MPPI update: perturb the nominal sequence, roll out every sample,
/// keep the `retain` cheapest collision-free ones and average them with
/// softmax weights. Returns the first control and the new nominal.
pub fn mppi_plan(
    s: &State,
    field: &DistanceField,
    goal: Point2,
    cfg: &PlannerConfig,
    spec: &RobotSpec,
    nominal: &[Control],
    sampler: &mut NoiseSampler,
) -> Result<(Control, Vec<Control>)> {
    let sched = check_spec(spec, cfg)?;
    let fp = Footprint::new(spec);
    path_integral(s, field, goal, cfg, spec, &sched, &fp, nominal, sampler, Variant::Filtered)
        .map(|o| (o.control, o.nominal))
}

/// Log-MPPI update: normal times log-normal perturbations, binary
/// collision cost, and every sample enters the weighted average.
pub fn log_mppi_plan(
    s: &State,
    field: &DistanceField,
    goal: Point2,
    cfg: &PlannerConfig,
    spec: &RobotSpec,
    nominal: &[Control],
    sampler: &mut NoiseSampler,
) -> Result<(Control, Vec<Control>)> {
    let sched = check_spec(spec, cfg)?;
    let fp = Footprint::new(spec);
    path_integral(s, field, goal, cfg, spec, &sched, &fp, nominal, sampler, Variant::LogNormal)
        .map(|o| (o.control, o.nominal))
}

/// Receding-horizon wrapper shared by the MPPI family.
struct PathIntegralPlanner {
    cfg: PlannerConfig,
    spec: RobotSpec,
    sched: FidelitySchedule,
    footprint: Footprint,
    nominal: Vec<Control>,
    sampler: NoiseSampler,
    stats: PlanStats,
    variant: Variant,
}

impl PathIntegralPlanner {
    fn new(cfg: PlannerConfig, spec: RobotSpec, variant: Variant) -> Result<Self> {
        let sched = check_spec(&spec, &cfg)?;
        Ok(PathIntegralPlanner {
            footprint: Footprint::new(&spec),
            nominal: vec![Control::STOP; cfg.steps],
            sampler: NoiseSampler::new(cfg.seed),
            stats: PlanStats::default(),
            cfg,
            spec,
            sched,
            variant,
        })
    }

    fn plan(&mut self, obs: &Observation<'_>) -> Result<Control> {
        let out = path_integral(
            &obs.state,
            obs.field,
            obs.goal,
            &self.cfg,
            &self.spec,
            &self.sched,
            &self.footprint,
            &self.nominal,
            &mut self.sampler,
            self.variant,
        );
        match out {
            Ok(o) => {
                self.stats.record(o.points);
                self.nominal = o.nominal;
                shift(&mut self.nominal);
                Ok(o.control)
            }
            Err(e) => {
                self.stats.record(0);
                shift(&mut self.nominal);
                Err(e)
            }
        }
    }
}

/// Drops the executed first control and repeats the last one.
fn shift(nominal: &mut [Control]) {
    if nominal.len() > 1 {
        nominal.rotate_left(1);
        let n = nominal.len();
        nominal[n - 1] = nominal[n - 2];
    }
}

pub struct MppiPlanner(PathIntegralPlanner);

impl MppiPlanner {
    pub fn new(cfg: PlannerConfig, spec: RobotSpec) -> Result<Self> {
        PathIntegralPlanner::new(cfg, spec, Variant::Filtered).map(MppiPlanner)
    }
}

impl Planner for MppiPlanner {
    fn plan(&mut self, obs: &Observation<'_>) -> Result<Control> {
        self.0.plan(obs)
    }

    fn stats(&self) -> PlanStats {
        self.0.stats
    }
}

pub struct LogMppiPlanner(PathIntegralPlanner);

impl LogMppiPlanner {
    pub fn new(cfg: PlannerConfig, spec: RobotSpec) -> Result<Self> {
        PathIntegralPlanner::new(cfg, spec, Variant::LogNormal).map(LogMppiPlanner)
    }
}

impl Planner for LogMppiPlanner {
    fn plan(&mut self, obs: &Observation<'_>) -> Result<Control> {
        self.0.plan(obs)
    }

    fn stats(&self) -> PlanStats {
        self.0.stats
    }
}
