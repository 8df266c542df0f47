//! Planning and control toolkit for a multirotor UAV that relays data
//! between a base station and a second UAV.
//!
//! The library couples vehicle motion to link quality: a multirotor has to
//! tilt to accelerate, the tilt rotates its body-fixed antenna, and the
//! antenna gain seen on each link changes with it. Everything downstream of
//! that observation lives here:
//!
//! - [`geometry`] — frames, quaternions, and the acceleration→attitude map.
//! - [`kinematics`] — quintic motion primitives and sampled trajectories.
//! - [`channel`] — dipole pattern, free-space SNR, rate and bit/outage
//!   evaluators.
//! - [`constraints`] — hard constraints with exponential-penalty and
//!   slack-variable relaxations.
//! - [`planner`] — the waypoint trajectory optimizer maximizing relayed bits.
//! - [`gtmr`] — generically tilted multirotor dynamics, the NMPC tracking
//!   controller, and the closed-loop simulator.
//! - [`scenario`] — config file schema, validation, and loading.
//! - [`experiment`] — plan / simulate / compare runs with CSV/JSON output.

pub mod channel;
pub mod constraints;
pub mod experiment;
pub mod geometry;
pub mod gtmr;
pub mod kinematics;
pub mod planner;
pub mod scenario;

/// Formats a float with 9 significant digits, the precision used by every
/// CSV emitted from this crate. Output is locale-independent and stable
/// across runs, which keeps fixed-seed runs byte-identical.
pub fn fmt_sig9(x: f64) -> String {
    format!("{x:.8e}")
}
