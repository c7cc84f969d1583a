//! A small benchmark: every planner variant on a few generated maps, the
//! aggregate table and the hardest maps by mean score.
//!
//! cargo run --release --example benchmark -- [maps]

use ddp_nav::cli::generate_suite;
use ddp_nav::config::RunConfig;
use ddp_nav::harness::{hardest_subset, run_benchmark, PlannerVariant, RESULTS_HEADER};

fn main() -> ddp_nav::Result<()> {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let cfg = RunConfig::default();
    let envs = generate_suite(count, cfg.seed, &cfg.env)?;
    let mut plan = cfg.plan();
    plan.speeds = vec![1.5];
    plan.repeats = 1;

    let mut results = Vec::new();
    println!("{RESULTS_HEADER}");
    let table = run_benchmark(&envs, &PlannerVariant::ALL, &cfg.suite(), &cfg.robot, &cfg.harness, &plan, |r| {
        println!("{}", r.csv_row());
        results.push(r.clone());
        Ok(())
    })?;
    println!("\n{table}");
    println!("hardest maps: {:?}", hardest_subset(&results, 2));
    Ok(())
}
