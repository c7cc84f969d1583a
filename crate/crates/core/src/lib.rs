//! Kinodynamic 2D navigation with decremental dynamics fidelity.
//!
//! Trajectory rollouts here use a fidelity schedule: the integration interval
//! grows and the number of collision-checked footprint points shrinks along
//! the horizon. The crate is organised bottom-up:
//!
//! - [`world`]: occupancy grids, procedural environments, exact distance
//!   fields and a simulated 2D lidar.
//! - [`dynamics`]: unicycle integration, fidelity schedules, footprint
//!   boundary points and the rollout engine.
//! - [`planners`]: DWA, MPPI and Log-MPPI, each in fixed-fidelity or
//!   scheduled-fidelity form.
//! - [`navsys`]: the standalone scheduled-fidelity navigator with its
//!   high-speed / low-speed / braking / recovery mode machine.
//! - [`harness`]: closed-loop episodes, scoring and benchmark aggregation.
//! - [`config`] and [`cli`]: plain-text run configuration and the command
//!   front end used by the `ddp-nav` binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod config;
pub mod dynamics;
mod error;
pub mod geom;
pub mod harness;
pub mod navsys;
pub mod planners;
pub mod world;

pub use error::{Error, Result};
pub use geom::{wrap_angle, Point2, Pose2};
