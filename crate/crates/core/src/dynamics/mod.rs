//! Differential-drive dynamics with a decaying fidelity schedule.
//!
//! A [`FidelitySchedule`] fixes, for every rollout step, the integration
//! interval and which footprint boundary points are computed and checked.
//! Early steps are integrated finely against the whole footprint; later
//! steps use longer intervals and fewer points.

mod footprint;
mod rollout;
mod schedule;
mod state;

pub use footprint::{boundary_points, Footprint};
pub use rollout::{rollout, rollout_with, Probe, Trajectory};
pub use schedule::{build_schedule, FidelitySchedule};
pub use state::{step_unicycle, Control, RobotSpec, State};
