//! Geo-social group recommendation.
//!
//! Given a target user, the engine finds an `h`-sized connected k-core group
//! of the user's friends in which the target has the most influence, picks
//! the group's activity topic with attention-weighted pairwise ranking, and
//! returns the top-`K` venues of that topic by aggregate (max) distance.

pub mod abpr;
pub mod attention;
pub mod error;
pub mod eval;
pub mod graph;
pub mod groups;
pub mod ingest;
pub mod network;
pub mod oracle;
pub mod persist;
pub mod pipeline;
pub mod spatial;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use graph::{CoreNumbers, SocialGraph};
pub use groups::{CandidateGroup, CandidatePool, Query, SearchOptions};
pub use ingest::{DatasetSplit, DatasetStats, GroupEvent};
pub use network::GeoSocialNetwork;
pub use types::{CheckIn, Poi, PoiId, TopicId, UserId, Vocabulary};
