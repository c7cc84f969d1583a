//! The navigator's mode machine driven by a scripted speed profile, and the
//! recovery maneuver it would pick at a start pose.
//!
//! cargo run --example mode_machine

use ddp_nav::dynamics::{RobotSpec, State};
use ddp_nav::navsys::{recovery_command, select_recovery, update_mode, ModeState, ModeThresholds, RecoveryConfig};
use ddp_nav::world::{generate_environment, simulate_lidar, EnvParams, LidarConfig};

fn main() -> ddp_nav::Result<()> {
    let th = ModeThresholds::default();
    let dt = 0.05;
    // cruise, stall, then pick up speed again
    let profile = [(1.2, 2.0), (0.2, 2.0), (0.0, 3.0), (0.6, 5.0)];
    let mut m = ModeState::default();
    let mut t = 0.0;
    for (v, secs) in profile {
        for _ in 0..(secs / dt) as usize {
            let before = m.mode;
            m = update_mode(m, v, dt, &th);
            t += dt;
            if m.mode != before {
                println!("t={t:>5.2} s  v={v:.1}  {} -> {}", before.label(), m.mode.label());
            }
        }
    }

    let grid = generate_environment(1, &EnvParams::default())?;
    let spec = RobotSpec::default();
    let s = State::at_rest(grid.start());
    let scan = simulate_lidar(&grid, s.pose(), &LidarConfig::default());
    let kind = select_recovery(&scan, &spec);
    let u = recovery_command(kind, &s, &scan, grid.goal(), &spec, &RecoveryConfig::default());
    println!("recovery at start: {kind:?}, command v={:.2} omega={:.2}", u.v, u.omega);
    Ok(())
}
