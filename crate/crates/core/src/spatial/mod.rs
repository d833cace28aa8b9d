//! Planar geometry for activity location search: projection, aggregate
//! distance, minimum enclosing circle, an MBR hierarchy, and the
//! depth-first aggregate nearest neighbor search over it.

mod ann;
mod geo;
mod index;
mod mec;

pub use ann::{
    adist, brute_force_ann, spa_df, spa_df_traced, AnnEntry, AnnResult, PruneRule, SearchTrace,
};
pub use geo::{project, PlanarPoint, Projection, EARTH_RADIUS_M};
pub use index::{mindist, Node, Rect, SpatialIndex, DEFAULT_FANOUT};
pub use mec::{minimum_enclosing_circle, Circle};
