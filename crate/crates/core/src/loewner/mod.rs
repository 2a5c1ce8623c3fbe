//! Chordal Loewner evolution: SLE_κ(ρ) driving processes, the forward flow
//! of points, trace extraction, the Schramm–Wilson weight and rectangle
//! exit statistics.

mod driving;
mod exit;
mod flow;
mod sw;
mod zipper;

pub use driving::{drive_sle, drive_sle_rho_bessel, DrivingPath, ForcePoint, Side};
pub use exit::{exit_side_stats, exit_through, sample_exit_side, ExitSide, ExitSideStats};
pub use flow::{evolve_point, PointFlow};
pub use sw::{sw_stopped_sample, sw_weight, MarkedPoint, SwState};
pub use zipper::{loewner_slit_curve, loewner_trace, TraceCursor};
