//! Log-MPPI with its center-point probe, and the augmented version that
//! checks the footprint boundary under the decaying schedule.
//!
//! cargo run --example log_mppi_planner

use ddp_nav::harness::{run_episode, HarnessConfig};
use ddp_nav::dynamics::RobotSpec;
use ddp_nav::planners::{LogMppiPlanner, PlannerConfig, PlannerKind};
use ddp_nav::world::{generate_environment, EnvParams};

fn main() -> ddp_nav::Result<()> {
    let spec = RobotSpec::default();
    let base = PlannerConfig::for_kind(PlannerKind::LogMppi);
    for seed in 0..3 {
        let grid = generate_environment(seed, &EnvParams::default())?;
        for cfg in [base.clone(), base.clone().augmented()] {
            let mut planner = LogMppiPlanner::new(cfg.clone(), spec.clone())?;
            let r = run_episode(&grid, &mut planner, &spec, &HarnessConfig::default())?;
            println!(
                "map {seed} probe={:?} ddp={}: {} after {:.2} s",
                cfg.probe, cfg.ddp_enabled, r.outcome, r.elapsed
            );
        }
    }
    Ok(())
}
