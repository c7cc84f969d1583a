//! Closed-loop simulation, scoring and the benchmark runner.

mod bench;
mod episode;
mod optimal;

pub use bench::{
    episode_seed, hardest_subset, run_benchmark, BenchmarkPlan, BenchmarkTable, EnvEntry, PlannerSuite,
    PlannerVariant, TableRow, RESULTS_HEADER, SUMMARY_HEADER,
};
pub use episode::{
    run_episode, run_episode_traced, score, EpisodeResult, HarnessConfig, Outcome, Perception, TRACE_HEADER,
};
pub use optimal::{optimal_time, OptimalTime};
