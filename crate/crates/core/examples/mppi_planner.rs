//! MPPI with fixed and decaying fidelity: softmax weights, a few receding
//! horizon updates and the boundary points each spends.
//!
//! cargo run --example mppi_planner

use ddp_nav::dynamics::{Control, RobotSpec, State};
use ddp_nav::planners::{
    mppi_plan, softmax_weights, NoiseSampler, Planner, PlannerConfig, PlannerKind, MppiPlanner, Observation,
};
use ddp_nav::world::{generate_environment, simulate_lidar, DistanceField, EnvParams, LidarConfig};

fn main() -> ddp_nav::Result<()> {
    println!("softmax weights of costs [1, 2, 4] at lambda 1: {:?}", softmax_weights(&[1.0, 2.0, 4.0], 1.0));

    let grid = generate_environment(4, &EnvParams::default())?;
    let field = DistanceField::compute(&grid, 2.0);
    let spec = RobotSpec::default();
    let s0 = State::at_rest(grid.start());

    let cfg = PlannerConfig::for_kind(PlannerKind::Mppi);
    let mut sampler = NoiseSampler::new(1);
    let (u, nominal) = mppi_plan(&s0, &field, grid.goal(), &cfg, &spec, &vec![Control::new(0.0, 0.0); cfg.steps], &mut sampler)?;
    println!("stateless update: v={:.3} omega={:.3}, nominal of {} steps", u.v, u.omega, nominal.len());

    let scan = simulate_lidar(&grid, s0.pose(), &LidarConfig::default());
    for cfg in [cfg.clone(), cfg.augmented()] {
        let mut planner = MppiPlanner::new(cfg.clone(), spec.clone())?;
        let obs = Observation { state: s0, scan: &scan, field: &field, goal: grid.goal(), dt: 0.05 };
        let mut last = None;
        for _ in 0..3 {
            last = Some(planner.plan(&obs)?);
        }
        let u = last.unwrap();
        println!(
            "ddp={}: v={:.3} omega={:.3}, {} boundary points per call",
            cfg.ddp_enabled,
            u.v,
            u.omega,
            planner.stats().last_point_evaluations
        );
    }
    Ok(())
}
