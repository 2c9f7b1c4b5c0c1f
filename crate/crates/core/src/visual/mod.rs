//! Camera-side TV detection over short grayscale frame sequences.

pub mod background;
pub mod contours;
pub mod detect;
pub mod edges;
pub mod geometry;
pub mod image;
pub mod rdp;
pub mod rect;

pub use background::{update_background, BackgroundModel, BackgroundParams, Gaussian};
pub use contours::{find_contours, Contour};
pub use detect::{component_centroids, detect_tv, CenterMode, IntersectionMode, VisualConfig, VisualDetection};
pub use edges::{binarize_edges, sobel_magnitude};
pub use geometry::{convex_contains, convex_hull, is_convex, perimeter, shoelace_area, Point, PointF};
pub use image::{frame_file_name, read_pgm, read_shot, write_pgm, write_shot, ForegroundMask, GrayImage};
pub use rdp::{distance_to_polygon, simplify_polyline, simplify_rdp};
pub use rect::{
    rectangle_candidate, rectangle_candidates, rectangle_candidates_with, RectCandidate, RectParams,
    EPSILON_FRACTION, MAX_AREA_FRACTION, MIN_AREA_FRACTION,
};
