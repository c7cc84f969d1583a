//! Simulated 2D lidar: ranges from the start pose of a generated map and
//! the scan converted to world-frame points.
//!
//! cargo run --example lidar_scan

use ddp_nav::world::{generate_environment, scan_to_points, simulate_lidar, EnvParams, LidarConfig};

fn main() -> ddp_nav::Result<()> {
    let grid = generate_environment(11, &EnvParams::default())?;
    let cfg = LidarConfig::default();
    let scan = simulate_lidar(&grid, grid.start(), &cfg);

    println!("{} beams over {:.0} degrees, max range {} m", scan.n_beams(), cfg.fov.to_degrees(), cfg.max_range);
    for i in (0..scan.n_beams()).step_by(30) {
        println!(
            "bearing {:>7.1} deg  range {:>6.3} m",
            scan.relative_bearing(i).to_degrees(),
            scan.ranges[i]
        );
    }
    let hits: Vec<_> = scan_to_points(&scan);
    let nearest = scan.ranges.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("{} endpoints, nearest return {nearest:.3} m", hits.len());
    Ok(())
}
