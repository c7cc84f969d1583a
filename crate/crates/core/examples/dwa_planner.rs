//! One dynamic-window planning call per fidelity setting, then a short
//! closed loop with each.
//!
//! cargo run --example dwa_planner

use ddp_nav::dynamics::{RobotSpec, State};
use ddp_nav::harness::{run_episode, HarnessConfig};
use ddp_nav::planners::{dwa_plan, DwaPlanner, PlannerConfig, PlannerKind};
use ddp_nav::world::{generate_environment, DistanceField, EnvParams};

fn main() -> ddp_nav::Result<()> {
    let grid = generate_environment(2, &EnvParams::default())?;
    let field = DistanceField::compute(&grid, 2.0);
    let spec = RobotSpec::default();
    let s0 = State::at_rest(grid.start());

    for cfg in [PlannerConfig::for_kind(PlannerKind::Dwa), PlannerConfig::for_kind(PlannerKind::Dwa).augmented()] {
        let u = dwa_plan(&s0, &field, grid.goal(), &cfg, &spec, 0.05)?;
        let mut planner = DwaPlanner::new(cfg.clone(), spec.clone())?;
        let r = run_episode(&grid, &mut planner, &spec, &HarnessConfig::default())?;
        println!(
            "ddp={}: first command v={:.3} omega={:.3}; episode {} after {:.2} s, score {:.3}",
            cfg.ddp_enabled, u.v, u.omega, r.outcome, r.elapsed, r.score
        );
    }
    Ok(())
}
