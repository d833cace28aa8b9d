//! Identifiers and the raw records of a geo-social network.

use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $inner:ty) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub $inner);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl From<$inner> for $name {
            fn from(v: $inner) -> Self {
                Self(v)
            }
        }
    };
}

id_type!(
    /// A user node.
    UserId,
    u64
);
id_type!(
    /// A point of interest (venue).
    PoiId,
    u64
);
id_type!(
    /// A POI category, which doubles as an activity topic.
    TopicId,
    u32
);

/// A venue with WGS84 coordinates and a category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Poi {
    pub id: PoiId,
    pub lat: f64,
    pub lon: f64,
    pub topic: TopicId,
}

impl Poi {
    pub fn has_valid_coordinates(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }
}

/// A user activity: user `user` checked in at `poi` at `time` (epoch seconds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CheckIn {
    pub user: UserId,
    pub poi: PoiId,
    pub time: i64,
}

/// Category names, indexed by [`TopicId`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    names: Vec<String>,
}

impl Vocabulary {
    /// Builds a vocabulary from arbitrary names. Ids are assigned in sorted
    /// name order so the mapping does not depend on row order.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        names.sort();
        names.dedup();
        Self { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<TopicId> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| TopicId(i as u32))
    }

    pub fn name(&self, topic: TopicId) -> Option<&str> {
        self.names.get(topic.0 as usize).map(String::as_str)
    }

    pub fn contains(&self, topic: TopicId) -> bool {
        (topic.0 as usize) < self.names.len()
    }

    pub fn topics(&self) -> impl Iterator<Item = TopicId> + '_ {
        (0..self.names.len() as u32).map(TopicId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}
