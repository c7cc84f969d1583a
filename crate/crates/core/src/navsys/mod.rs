//! The standalone scheduled-fidelity navigator.
//!
//! Each tick samples constant `(v, ω)` commands with noise, rolls them out
//! under the decaying schedule, and averages the cheapest collision-free
//! ones. A mode machine lowers the speed caps when progress stalls, then
//! brakes and runs a rotate or reverse recovery.

mod mode;
mod navigator;
mod recovery;

pub use mode::{update_mode, Mode, ModeState, ModeThresholds, RecoveryKind};
pub use navigator::{ddp_navigate, DdpNavigator, NavsysConfig};
pub use recovery::{
    heading_reached, recovery_command, rotate_toward, rotation_complete, rotation_heading,
    select_recovery, RecoveryConfig,
};
