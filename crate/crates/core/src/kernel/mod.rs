//! Exact predicates, constructions and the perturbation used to escape
//! degenerate configurations.

pub mod exact;
pub mod perturb;
pub mod predicates;
pub mod projection;
pub mod tritri;

pub use perturb::{perturb, PerturbationPolicy};
pub use predicates::{orient2d, orient3d, Sign};
pub use projection::{project_to_plane, PlaneProjection};
pub use tritri::{tri_tri_intersect, Adjacency, BoundaryDetail, Segment, SegmentEnd, TriTriResult};
