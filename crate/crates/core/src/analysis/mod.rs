//! Metrics, dimension estimates and formulas, δ-closeness, recovery of
//! flow lines from the fan, and the reversal and coverage experiments.

mod coverage;
mod delta;
mod dimension;
mod metric;
mod recover;
mod reversal;

pub use coverage::{covers_segment, coverage_level, coverage_run, coverage_stats, hausdorff_to_positive_axis, sample_sle_kappa_rho, CoverageLevel};
pub use delta::{delta_close_check, Region, NEAR_INTERSECTION};
pub use dimension::{
    box_dimension, boundary_dimension, critical_angle, dyadic_scales, intersection_dimension, koch_curve, linear_fit,
    DimensionReport,
};
pub use metric::{bounded_metric, directed_hausdorff, hausdorff_distance, is_infinite, phi, Metric, PointIndex};
pub use recover::{component_brackets, pixels_to_trace, recover_flow_line, recovered_pixels, to_half_plane};
pub use reversal::{mapped_setup, reversal_pair, reversal_report, reversal_stats, FanSummary, ReversalReport, ANNULUS_RADIUS, MIN_COMPONENT, WINDOW_HALF_WIDTH};
