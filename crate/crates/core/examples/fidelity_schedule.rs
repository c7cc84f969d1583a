//! Decaying fidelity schedules: integration intervals and active boundary
//! points per step, and the point evaluations saved against a fixed
//! schedule.
//!
//! cargo run --example fidelity_schedule

use ddp_nav::dynamics::{build_schedule, FidelitySchedule};

fn main() -> ddp_nav::Result<()> {
    let (steps, horizon, n) = (10, 2.0, 16);
    let fixed = FidelitySchedule::fixed(steps, horizon, n)?;
    for p in [1.0, 1.4, 2.0] {
        let s = build_schedule(steps, horizon, p, n)?;
        println!("p = {p}");
        for t in 0..steps {
            println!("  t={t:>2}  dt={:.4} s  points={:>2}  {:?}", s.deltas()[t], s.n_points()[t], s.active(t));
        }
        println!(
            "  sum dt = {:.12}  point evaluations {} vs {} fixed",
            s.deltas().iter().sum::<f64>(),
            s.point_evaluations(),
            fixed.point_evaluations()
        );
    }
    Ok(())
}
