//! Exact Euclidean distance field of a map, and the local field rebuilt
//! from a single lidar scan.
//!
//! cargo run --example distance_field

use ddp_nav::world::{generate_environment, simulate_lidar, DistanceField, EnvParams, LidarConfig};

fn main() -> ddp_nav::Result<()> {
    let grid = generate_environment(3, &EnvParams::default())?;
    let truth = DistanceField::compute(&grid, 2.0);

    // clearance rendered in 0.15 m bands: 0 is occupied, 9 is >= 1.35 m
    for j in (0..grid.height()).rev().step_by(2) {
        let row: String = (0..grid.width())
            .map(|i| {
                let d = truth.at_cell((i, j));
                char::from_digit(((d / 0.15) as u32).min(9), 10).unwrap()
            })
            .collect();
        println!("{row}");
    }

    let start = grid.start();
    let scan = simulate_lidar(&grid, start, &LidarConfig::default());
    let local = DistanceField::from_scan(&scan, grid.resolution(), 5.0, 2.0);
    let p = start.position();
    println!("clearance at start: ground truth {:.3} m, from one scan {:.3} m", truth.at(p), local.at(p));
    println!("field cells: ground truth {}, scan window {}", truth.values().len(), local.values().len());
    Ok(())
}
