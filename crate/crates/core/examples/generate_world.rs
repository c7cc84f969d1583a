//! Generates one procedural environment, prints it and checks that start
//! and goal are connected.
//!
//! cargo run --example generate_world -- [seed]

use ddp_nav::world::{generate_environment, EnvParams};

fn main() -> ddp_nav::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let params = EnvParams::default();
    let grid = generate_environment(seed, &params)?;

    let (start, goal) = (grid.start_cell(), grid.goal_cell());
    for j in (0..grid.height()).rev() {
        let row: String = (0..grid.width())
            .map(|i| match (i, j) {
                c if c == start => 'S',
                c if c == goal => 'G',
                c if grid.get(c) => '#',
                _ => '.',
            })
            .collect();
        println!("{row}");
    }
    let occupancy = grid.occupied_count() as f64 / grid.cells().len() as f64;
    println!(
        "seed {seed}: {}x{} cells at {} m, {:.1}% occupied, start-goal connected: {}",
        grid.width(),
        grid.height(),
        grid.resolution(),
        100.0 * occupancy,
        grid.start_goal_connected()
    );
    Ok(())
}
