//! Counting and locating a-points of analytic functions.

mod locate;
mod winding;

pub use locate::{locate_a_points, locate_with_count};
pub use winding::{
    winding_count, winding_count_jittered, winding_count_rect, winding_count_sector, Rect, Sector, WindingResult,
    OBSTRUCTION_RATIO, RADIUS_JITTER, SNAP_THRESHOLD,
};
