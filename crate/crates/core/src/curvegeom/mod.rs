//! Geometric primitives on polylines: curvature, area and extent measures,
//! Hausdorff distance, resampling, symmetric unfolding and osculating disks.

mod arc;
mod curvature;
mod hausdorff;
mod nesting;
mod point;
mod resample;
mod symmetry;

pub use arc::{
    arc_measures, quarter_area, signed_area, validate_arc, ArcMeasures, ClosedPolyline, QuarterArc,
    CONVEXITY_TOL, ENDPOINT_TOL, MIN_ARC_VERTICES,
};
pub use curvature::menger_curvature;
pub(crate) use curvature::{curvature_vector, turning_angle};
pub use hausdorff::{
    default_eps, dense_samples, directed_hausdorff, hausdorff_distance, hausdorff_distance_with,
    SegmentIndex,
};
pub use nesting::{osculating_disks_nested, NestingReport};
pub use point::{point_segment_distance, Point2};
pub use resample::{arc_conforms, resample_arc, resample_polyline, ResamplePolicy};
pub use symmetry::{reconstruct_figure_eight, second_crossing_index, self_intersections};
