use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::types::{CheckIn, Poi, PoiId, TopicId, UserId, Vocabulary};

/// The heterogeneous geo-social network: users, venues, friendships,
/// check-ins, and (stored but otherwise unused) venue-to-venue links.
#[derive(Debug, Clone, Default)]
pub struct GeoSocialNetwork {
    graph: SocialGraph,
    pois: BTreeMap<PoiId, Poi>,
    checkins: Vec<CheckIn>,
    vocabulary: Vocabulary,
    poi_links: Vec<(PoiId, PoiId)>,
}

impl GeoSocialNetwork {
    /// Assembles a network. Users are the union of edge endpoints and
    /// check-in users. Check-ins must reference known POIs; POIs must carry
    /// valid coordinates and a topic from `vocabulary`.
    pub fn new(
        edges: &[(UserId, UserId)],
        pois: impl IntoIterator<Item = Poi>,
        checkins: Vec<CheckIn>,
        vocabulary: Vocabulary,
    ) -> Result<Self> {
        Self::with_users(std::iter::empty(), edges, pois, checkins, vocabulary)
    }

    /// Like [`GeoSocialNetwork::new`], also registering `users` that may
    /// have neither friends nor check-ins.
    pub fn with_users(
        users: impl IntoIterator<Item = UserId>,
        edges: &[(UserId, UserId)],
        pois: impl IntoIterator<Item = Poi>,
        checkins: Vec<CheckIn>,
        vocabulary: Vocabulary,
    ) -> Result<Self> {
        let mut catalog = BTreeMap::new();
        for p in pois {
            if !p.has_valid_coordinates() {
                return Err(Error::Format(format!(
                    "poi {} has out-of-range coordinates ({}, {})",
                    p.id, p.lat, p.lon
                )));
            }
            if !vocabulary.contains(p.topic) {
                return Err(Error::Format(format!("poi {} has unregistered topic {}", p.id, p.topic)));
            }
            catalog.entry(p.id).or_insert(p);
        }
        for c in &checkins {
            if !catalog.contains_key(&c.poi) {
                return Err(Error::Format(format!("check-in references unknown poi {}", c.poi)));
            }
            if c.time < 0 {
                return Err(Error::Format(format!("negative check-in time {}", c.time)));
            }
        }
        let users: BTreeSet<UserId> = users.into_iter().chain(checkins.iter().map(|c| c.user)).collect();
        let graph = SocialGraph::with_users(users, edges);
        Ok(Self { graph, pois: catalog, checkins, vocabulary, poi_links: Vec::new() })
    }

    pub fn with_poi_links(mut self, links: Vec<(PoiId, PoiId)>) -> Self {
        self.poi_links = links;
        self
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn pois(&self) -> &BTreeMap<PoiId, Poi> {
        &self.pois
    }

    pub fn poi(&self, id: PoiId) -> Option<&Poi> {
        self.pois.get(&id)
    }

    pub fn checkins(&self) -> &[CheckIn] {
        &self.checkins
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn poi_links(&self) -> &[(PoiId, PoiId)] {
        &self.poi_links
    }

    pub fn topic_of(&self, poi: PoiId) -> Option<TopicId> {
        self.pois.get(&poi).map(|p| p.topic)
    }

    /// Check-ins grouped per user, each list in input order.
    pub fn checkins_by_user(&self) -> BTreeMap<UserId, Vec<CheckIn>> {
        let mut out: BTreeMap<UserId, Vec<CheckIn>> = BTreeMap::new();
        for c in &self.checkins {
            out.entry(c.user).or_default().push(*c);
        }
        out
    }

    /// Most recent check-in venue per user (ties on time go to the larger
    /// POI id so the choice does not depend on row order). Only check-ins
    /// with `time <= until` are considered when `until` is set.
    pub fn current_locations(&self, until: Option<i64>) -> BTreeMap<UserId, PoiId> {
        let mut latest: BTreeMap<UserId, (i64, PoiId)> = BTreeMap::new();
        for c in &self.checkins {
            if until.is_some_and(|t| c.time > t) {
                continue;
            }
            let e = latest.entry(c.user).or_insert((c.time, c.poi));
            if (c.time, c.poi) > *e {
                *e = (c.time, c.poi);
            }
        }
        latest.into_iter().map(|(u, (_, p))| (u, p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poi(id: u64, topic: u32) -> Poi {
        Poi { id: PoiId(id), lat: 10.0, lon: 20.0, topic: TopicId(topic) }
    }

    #[test]
    fn users_include_checkin_only_users() {
        let vocab = Vocabulary::from_names(["a", "b"]);
        let checkins = vec![
            CheckIn { user: UserId(9), poi: PoiId(1), time: 5 },
            CheckIn { user: UserId(1), poi: PoiId(2), time: 7 },
        ];
        let g = GeoSocialNetwork::new(
            &[(UserId(1), UserId(2))],
            [poi(1, 0), poi(2, 1)],
            checkins,
            vocab,
        )
        .unwrap();
        assert_eq!(g.graph().users(), &[UserId(1), UserId(2), UserId(9)]);
        assert_eq!(g.topic_of(PoiId(2)), Some(TopicId(1)));
    }

    #[test]
    fn rejects_dangling_checkin_and_bad_topic() {
        let vocab = Vocabulary::from_names(["a"]);
        let bad = vec![CheckIn { user: UserId(1), poi: PoiId(3), time: 0 }];
        assert!(GeoSocialNetwork::new(&[], [poi(1, 0)], bad, vocab.clone()).is_err());
        assert!(GeoSocialNetwork::new(&[], [poi(1, 4)], vec![], vocab).is_err());
    }

    #[test]
    fn current_location_is_latest_checkin() {
        let vocab = Vocabulary::from_names(["a"]);
        let checkins = vec![
            CheckIn { user: UserId(1), poi: PoiId(2), time: 50 },
            CheckIn { user: UserId(1), poi: PoiId(1), time: 10 },
            CheckIn { user: UserId(1), poi: PoiId(3), time: 90 },
        ];
        let g = GeoSocialNetwork::new(&[], [poi(1, 0), poi(2, 0), poi(3, 0)], checkins, vocab)
            .unwrap();
        assert_eq!(g.current_locations(None)[&UserId(1)], PoiId(3));
        assert_eq!(g.current_locations(Some(60))[&UserId(1)], PoiId(2));
    }
}
