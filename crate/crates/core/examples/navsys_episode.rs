//! One closed-loop episode of the standalone navigator, with the time spent
//! in each mode and an optional trace file.
//!
//! cargo run --example navsys_episode -- [seed] [trace.csv]

use std::fs::File;
use std::io::BufWriter;

use ddp_nav::dynamics::RobotSpec;
use ddp_nav::harness::{run_episode, run_episode_traced, HarnessConfig};
use ddp_nav::navsys::{DdpNavigator, NavsysConfig};
use ddp_nav::world::{generate_environment, EnvParams};

fn main() -> ddp_nav::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let trace = args.next();

    let grid = generate_environment(seed, &EnvParams::default())?;
    let spec = RobotSpec::default();
    let mut nav = DdpNavigator::new(NavsysConfig::default(), spec.clone())?;
    let harness = HarnessConfig::default();
    let r = match trace {
        Some(path) => run_episode_traced(&grid, &mut nav, &spec, &harness, &mut BufWriter::new(File::create(path)?))?,
        None => run_episode(&grid, &mut nav, &spec, &harness)?,
    };
    println!("{} after {:.2} s (optimal {:.2} s), score {:.3}", r.outcome, r.elapsed, r.ot, r.score);
    println!("path {:.2} m, {} planning calls, {} boundary points", r.path_length, r.planning_calls, r.point_evaluations);
    for (mode, ticks) in &r.modes {
        println!("  {mode:>8}: {ticks} ticks");
    }
    Ok(())
}
