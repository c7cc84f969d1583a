//! Planner outputs checked against exhaustive or replayed computations.

mod common;

use common::{grid_with, open_room};
use ddp_nav::dynamics::{rollout, rollout_with, Control, Footprint, RobotSpec, State, Trajectory};
use ddp_nav::planners::{
    dwa_plan, evaluate_cost, log_mppi_plan, mppi_plan, softmax_weights, CostWeights, DwaPlanner, LogMppiPlanner,
    MppiPlanner, NoiseSampler, Observation, Planner, PlannerConfig, PlannerKind,
};
use ddp_nav::world::{simulate_lidar, DistanceField, LidarConfig};
use ddp_nav::{wrap_angle, Error, Point2, Pose2};
use proptest::prelude::*;

fn spec() -> RobotSpec {
    RobotSpec::default()
}

/// 8 m x 8 m room, robot in the middle of the bottom half facing +y.
fn room() -> (ddp_nav::world::OccupancyGrid, DistanceField) {
    let g = open_room(54, 54, 0.15, Pose2::new(4.0, 2.0, std::f64::consts::FRAC_PI_2), Point2::new(4.0, 6.5));
    let f = DistanceField::compute(&g, 2.0);
    (g, f)
}

fn grid_values(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn dwa_picks_the_exhaustive_minimum() {
    let (g, field) = room();
    let sp = spec();
    let dt = 0.05;
    for cfg in [PlannerConfig::for_kind(PlannerKind::Dwa), PlannerConfig::for_kind(PlannerKind::Dwa).augmented()] {
        let s = State::at_rest(g.start());
        let u = dwa_plan(&s, &field, g.goal(), &cfg, &sp, dt).unwrap();

        let sched = cfg.schedule(sp.n).unwrap();
        let vs = grid_values(0.0, sp.a_max * dt, cfg.dwa_v_samples);
        let ws = grid_values(-sp.alpha_max * dt, sp.alpha_max * dt, cfg.dwa_omega_samples);
        let mut best = (f64::INFINITY, Control::STOP);
        for &v in &vs {
            for &w in &ws {
                let tr = rollout(&s, &[Control::new(v, w)], &sched, &field, &sp).unwrap();
                let c = evaluate_cost(&tr, g.goal(), &cfg.weights);
                if !tr.collision && c < best.0 {
                    best = (c, Control::new(v, w));
                }
            }
        }
        assert!((u.v - best.1.v).abs() < 1e-12 && (u.omega - best.1.omega).abs() < 1e-12, "{u:?} vs {:?}", best.1);
        let step = ws[1] - ws[0];
        assert!(u.v > 0.0 && u.omega.abs() <= step + 1e-12, "{u:?}");
    }
}

#[test]
fn dwa_boxed_in_has_no_feasible_command() {
    // 1.2 m square cell around a robot already moving at 1 m/s
    let g = grid_with(40, 40, 0.1, Pose2::new(2.0, 2.0, 0.0), Point2::new(2.0, 2.3), |i, j| {
        !(14..26).contains(&i) || !(14..26).contains(&j)
    });
    let field = DistanceField::compute(&g, 2.0);
    let s = State { v: 1.0, ..State::at_rest(g.start()) };
    let cfg = PlannerConfig::for_kind(PlannerKind::Dwa);
    let out = dwa_plan(&s, &field, g.goal(), &cfg, &spec(), 0.05);
    assert!(matches!(out, Err(Error::NoFeasibleTrajectory)), "{out:?}");
}

/// Replays the sampler: first-step perturbation of each sample.
fn first_perturbations(seed: u64, cfg: &PlannerConfig, log_normal: bool) -> Vec<Control> {
    let mut s = NoiseSampler::new(seed);
    let mut out = Vec::new();
    for _k in 0..cfg.samples {
        for t in 0..cfg.steps {
            let mut dv = cfg.sigma_v * s.normal();
            let mut dw = cfg.sigma_omega * s.normal();
            if log_normal {
                dv *= s.multiplier(cfg.sigma_n);
                dw *= s.multiplier(cfg.sigma_n);
            }
            if t == 0 {
                out.push(Control::new(dv, dw));
            }
        }
    }
    out
}

fn zero_weights() -> CostWeights {
    CostWeights { w_goal: 0.0, w_obstacle: 0.0, w_path: 0.0, w_smooth: 0.0, w_heading: 0.0, ..CostWeights::default() }
}

#[test]
fn single_sample_mppi_returns_that_sample() {
    let (g, field) = room();
    let sp = spec();
    let cfg = PlannerConfig { samples: 1, steps: 10, ..PlannerConfig::for_kind(PlannerKind::Mppi) };
    let nominal = vec![Control::new(0.5, 0.1); cfg.steps];
    let s = State::at_rest(g.start());
    let (u, _) = mppi_plan(&s, &field, g.goal(), &cfg, &sp, &nominal, &mut NoiseSampler::new(7)).unwrap();
    let e = first_perturbations(7, &cfg, false)[0];
    let want = sp.clamp(Control::new(0.5 + e.v, 0.1 + e.omega));
    assert_eq!(u, want);
}

#[test]
fn equal_costs_average_first_controls() {
    let (g, field) = room();
    let sp = spec();
    for kind in [PlannerKind::Mppi, PlannerKind::LogMppi] {
        let cfg = PlannerConfig {
            samples: 6,
            retain: 6,
            steps: 8,
            weights: zero_weights(),
            ..PlannerConfig::for_kind(kind)
        };
        let nominal = vec![Control::new(0.3, 0.0); cfg.steps];
        let s = State::at_rest(g.start());
        let mut sampler = NoiseSampler::new(3);
        let (u, _) = match kind {
            PlannerKind::Mppi => mppi_plan(&s, &field, g.goal(), &cfg, &sp, &nominal, &mut sampler),
            _ => log_mppi_plan(&s, &field, g.goal(), &cfg, &sp, &nominal, &mut sampler),
        }
        .unwrap();
        let firsts: Vec<Control> = first_perturbations(3, &cfg, kind == PlannerKind::LogMppi)
            .into_iter()
            .map(|e| Control::new(0.3 + e.v, e.omega))
            .collect();
        // perturbed sequences are averaged as sampled, then clamped
        let n = firsts.len() as f64;
        let mean = sp.clamp(Control::new(
            firsts.iter().map(|c| c.v).sum::<f64>() / n,
            firsts.iter().map(|c| c.omega).sum::<f64>() / n,
        ));
        assert!((u.v - mean.v).abs() < 1e-12 && (u.omega - mean.omega).abs() < 1e-12, "{kind:?}: {u:?} vs {mean:?}");
    }
}

#[test]
fn low_temperature_selects_the_cheapest() {
    let w = softmax_weights(&[0.0, 100.0], 0.01);
    let (a, b) = (Control::new(0.7, -0.3), Control::new(-0.2, 1.1));
    let v = w[0] * a.v + w[1] * b.v;
    let om = w[0] * a.omega + w[1] * b.omega;
    assert!((v - a.v).abs() < 1e-6 && (om - a.omega).abs() < 1e-6);
}

#[test]
fn vanishing_multiplier_spread_recovers_mppi() {
    let (g, field) = room();
    let sp = spec();
    let base = PlannerConfig {
        samples: 12,
        retain: 12,
        steps: 10,
        horizon: 1.0,
        weights: CostWeights::default(),
        ..PlannerConfig::for_kind(PlannerKind::Mppi)
    };
    let s = State { v: 0.5, ..State::at_rest(g.start()) };
    let nominal = vec![Control::new(0.5, 0.0); base.steps];
    let mut means = Vec::new();
    for sigma_n in [0.3, 0.1, 0.03, 0.01, 0.0] {
        let log_cfg = PlannerConfig { kind: PlannerKind::LogMppi, sigma_n, ..base.clone() };
        let mut total = 0.0;
        for seed in 0..1000 {
            let (a, _) = mppi_plan(&s, &field, g.goal(), &base, &sp, &nominal, &mut NoiseSampler::new(seed)).unwrap();
            let (b, _) = log_mppi_plan(&s, &field, g.goal(), &log_cfg, &sp, &nominal, &mut NoiseSampler::new(seed)).unwrap();
            total += (a.v - b.v).abs() + (a.omega - b.omega).abs();
        }
        means.push(total / 1000.0);
    }
    for w in means.windows(2) {
        assert!(w[1] < w[0], "mean differences not shrinking: {means:?}");
    }
    assert!(means[3] < 0.1 * means[0], "{means:?}");
    assert_eq!(means[4], 0.0);
}

#[test]
fn center_probe_misses_a_side_contact() {
    // wall band y in [2.15, 2.45): center at y = 2.0 is clear, the left
    // edge at y = 2.215 is inside it
    let res = 0.05;
    let g = grid_with(80, 80, res, Pose2::new(2.0, 2.0, 0.0), Point2::new(3.5, 1.0), |_, j| (43..49).contains(&j));
    let field = DistanceField::compute(&g, 2.0);
    let sp = spec();
    let s = State::at_rest(g.start());
    assert!(field.at(s.position()) > 0.0);
    let base = PlannerConfig::for_kind(PlannerKind::LogMppi);
    let aug = base.clone().augmented();
    let fp = Footprint::new(&sp);
    let run = |cfg: &PlannerConfig| -> Trajectory {
        let sched = cfg.schedule(sp.n).unwrap();
        let mut tr = rollout_with(&s, &[Control::STOP], &sched, &field, &sp, &fp, cfg.probe.into()).unwrap();
        tr.cost = evaluate_cost(&tr, g.goal(), &cfg.weights);
        tr
    };
    let (b, a) = (run(&base), run(&aug));
    assert!(!b.collision && a.collision);
    assert!((a.cost - b.cost - base.weights.collision_penalty).abs() < 1e-9);
}

/// Straight reimplementation of the five cost terms.
fn oracle_cost(tr: &Trajectory, goal: Point2, w: &CostWeights) -> f64 {
    let last = tr.states.last().unwrap();
    let (gx, gy) = (goal.x - last.x, goal.y - last.y);
    let dist = (gx * gx + gy * gy).sqrt();
    let horizon: f64 = tr.deltas.iter().sum();
    let uniform = horizon / tr.deltas.len() as f64;
    let mut obstacle = 0.0;
    for k in 0..tr.clearance.len() {
        let shortfall = (w.obstacle_saturation - tr.clearance[k]).max(0.0) / w.obstacle_saturation;
        obstacle += tr.deltas[k] / uniform * shortfall;
    }
    let mut arc = 0.0;
    let mut smooth = 0.0;
    for k in 1..tr.states.len() {
        let (a, b) = (&tr.states[k - 1], &tr.states[k]);
        arc += ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
        smooth += (b.omega - a.omega).abs();
    }
    let heading = if dist > 1e-9 { wrap_angle(gy.atan2(gx) - last.psi).abs() } else { 0.0 };
    let mut c = w.w_goal * dist + w.w_obstacle * obstacle + w.w_path * arc + w.w_smooth * smooth + w.w_heading * heading;
    if tr.collision {
        c += w.collision_penalty;
    }
    c
}

fn any_controls() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-0.5f64..1.5, -2.0f64..2.0), 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cost_matches_term_by_term_recomputation(
        controls in any_controls(), p in 1.0f64..2.5, seed in 0u64..200,
        wg in 0.0f64..2.0, wo in 0.0f64..2.0, wp in 0.0f64..2.0, ws in 0.0f64..2.0, wh in 0.0f64..2.0, sat in 0.05f64..1.0,
    ) {
        let g = common::random_grid(40, 40, 0.15, 0.05, seed);
        let field = DistanceField::compute(&g, 2.0);
        let sp = spec();
        let steps = controls.len();
        let sched = ddp_nav::dynamics::build_schedule(steps, 1.0, p, sp.n).unwrap();
        let us: Vec<Control> = controls.iter().map(|&(v, w)| Control::new(v, w)).collect();
        let s = State::at_rest(Pose2::new(3.0, 3.0, 0.4));
        let tr = rollout(&s, &us, &sched, &field, &sp).unwrap();
        let w = CostWeights { w_goal: wg, w_obstacle: wo, w_path: wp, w_smooth: ws, w_heading: wh, obstacle_saturation: sat, collision_penalty: 1000.0 };
        let goal = Point2::new(4.5, 5.0);
        let (a, b) = (evaluate_cost(&tr, goal, &w), oracle_cost(&tr, goal, &w));
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn planner_outputs_respect_robot_bounds(seed in 0u64..500, v in 0.0f64..1.5, w in -2.0f64..2.0, kind in 0usize..6) {
        let g = common::random_grid(40, 40, 0.15, 0.03, seed);
        let field = DistanceField::compute(&g, 2.0);
        let sp = spec();
        let s = State { v, omega: w, ..State::at_rest(Pose2::new(3.0, 3.0, 0.0)) };
        prop_assume!(!field.collides(s.position()));
        let k = [PlannerKind::Dwa, PlannerKind::Mppi, PlannerKind::LogMppi][kind % 3];
        let mut cfg = PlannerConfig { samples: 40, seed, ..PlannerConfig::for_kind(k) };
        if kind >= 3 {
            cfg = cfg.augmented();
        }
        let scan = simulate_lidar(&g, s.pose(), &LidarConfig::default());
        let obs = Observation { state: s, scan: &scan, field: &field, goal: Point2::new(5.0, 5.0), dt: 0.05 };
        let mut planner: Box<dyn Planner> = match k {
            PlannerKind::Dwa => Box::new(DwaPlanner::new(cfg, sp.clone()).unwrap()),
            PlannerKind::Mppi => Box::new(MppiPlanner::new(cfg, sp.clone()).unwrap()),
            PlannerKind::LogMppi => Box::new(LogMppiPlanner::new(cfg, sp.clone()).unwrap()),
        };
        if let Ok(u) = planner.plan(&obs) {
            prop_assert!(u.v >= sp.v_min - 1e-12 && u.v <= sp.v_max + 1e-12);
            prop_assert!(u.omega.abs() <= sp.omega_max + 1e-12);
        }
    }
}

#[test]
fn seeded_planners_repeat_exactly() {
    let (g, field) = room();
    let sp = spec();
    let scan = simulate_lidar(&g, g.start(), &LidarConfig::default());
    let trace = |mk: &dyn Fn() -> Box<dyn Planner>| -> Vec<Control> {
        let mut p = mk();
        let obs = Observation { state: State::at_rest(g.start()), scan: &scan, field: &field, goal: g.goal(), dt: 0.05 };
        (0..5).map(|_| p.plan(&obs).unwrap()).collect()
    };
    for kind in [PlannerKind::Mppi, PlannerKind::LogMppi] {
        let cfg = PlannerConfig { seed: 42, ..PlannerConfig::for_kind(kind) }.augmented();
        let mk = || -> Box<dyn Planner> {
            match kind {
                PlannerKind::Mppi => Box::new(MppiPlanner::new(cfg.clone(), sp.clone()).unwrap()),
                _ => Box::new(LogMppiPlanner::new(cfg.clone(), sp.clone()).unwrap()),
            }
        };
        assert_eq!(trace(&mk), trace(&mk));
        let other = PlannerConfig { seed: 43, ..cfg.clone() };
        let mut p = MppiPlanner::new(PlannerConfig { kind: PlannerKind::Mppi, ..other }, sp.clone()).unwrap();
        let obs = Observation { state: State::at_rest(g.start()), scan: &scan, field: &field, goal: g.goal(), dt: 0.05 };
        if kind == PlannerKind::Mppi {
            assert_ne!(p.plan(&obs).unwrap(), trace(&mk)[0]);
        }
    }
}
