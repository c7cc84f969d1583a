//! Exact-arc unicycle rollouts of one command under a fixed and a decaying
//! schedule, checked against an obstacle field.
//!
//! cargo run --example rollout

use ddp_nav::dynamics::{build_schedule, rollout, step_unicycle, Control, FidelitySchedule, RobotSpec, State};
use ddp_nav::world::{generate_environment, DistanceField, EnvParams};

fn main() -> ddp_nav::Result<()> {
    let grid = generate_environment(5, &EnvParams::default())?;
    let field = DistanceField::compute(&grid, 2.0);
    let spec = RobotSpec::default();
    let s0 = State::at_rest(grid.start());
    let u = Control::new(1.2, 0.4);

    let one = step_unicycle(&s0, u, 0.05, &spec);
    println!("one 50 ms step: x={:.4} y={:.4} psi={:.4} v={:.2} omega={:.2}", one.x, one.y, one.psi, one.v, one.omega);

    let fixed = FidelitySchedule::fixed(30, 2.0, spec.n)?;
    let ddp = build_schedule(30, 2.0, 1.4, spec.n)?;
    for (name, sched) in [("fixed", &fixed), ("ddp", &ddp)] {
        let tr = rollout(&s0, &[u], sched, &field, &spec)?;
        let end = tr.final_state();
        println!(
            "{name:>5}: end ({:.3}, {:.3}) arc {:.3} m, collision {} at step {:?}, {} points checked",
            end.x,
            end.y,
            tr.arc_length(),
            tr.collision,
            tr.first_collision_step,
            tr.points_checked
        );
    }
    Ok(())
}
