//! The perception substrate: occupancy grids, procedural environments,
//! distance fields and a simulated planar lidar.

mod field;
mod generate;
mod grid;
mod io;
mod lidar;

pub use field::{DistanceField, GridGeometry};
pub(crate) use field::squared_edt;
pub use generate::{generate_environment, EnvParams};
pub use grid::{Cell, OccupancyGrid};
pub use io::{parse_env, read_env_file, write_env_file};
pub use lidar::{raycast, scan_to_points, simulate_lidar, LidarConfig, LidarScan};
