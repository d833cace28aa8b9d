//! End-to-end query answering: group, then topic, then locations.

use std::collections::BTreeMap;

use crate::abpr::{AttentionModel, ModelConfig, TrainingSet};
use crate::attention::{attention_scores, select_group, TopicPreferences};
use crate::error::{Error, Result};
use crate::graph::{core_decomposition, CoreNumbers};
use crate::groups::{candidate_pool, Query, SearchOptions};
use crate::ingest::{visited_topics, GroupEvent};
use crate::network::GeoSocialNetwork;
use crate::spatial::{spa_df, AnnEntry, AnnResult, PlanarPoint, Projection, SpatialIndex};
use crate::types::{CheckIn, TopicId, UserId};

/// Answer to one query.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    /// Sorted member ids, target included.
    pub group: Vec<UserId>,
    pub group_score: f64,
    pub topic: TopicId,
    pub locations: AnnResult,
    /// Number of candidate groups the attention step chose from.
    pub pool_size: usize,
}

fn checkins_until(network: &GeoSocialNetwork, until: Option<i64>) -> Vec<CheckIn> {
    network
        .checkins()
        .iter()
        .filter(|c| until.is_none_or(|t| c.time <= t))
        .copied()
        .collect()
}

/// Topic preferences from check-ins up to `until` (all when `None`).
pub fn preferences(network: &GeoSocialNetwork, until: Option<i64>) -> TopicPreferences {
    TopicPreferences::from_checkins(&checkins_until(network, until), |p| network.topic_of(p))
}

/// A fresh model covering every user in the graph and every topic.
pub fn new_model(network: &GeoSocialNetwork, cfg: &ModelConfig) -> AttentionModel {
    AttentionModel::new(network.graph().users().iter().copied(), network.vocabulary().topics(), cfg)
}

/// Ranking pairs from training events, using check-ins up to `until` for
/// visited topics and influence.
pub fn training_set(
    network: &GeoSocialNetwork,
    events: &[GroupEvent],
    until: Option<i64>,
    neg_ratio: usize,
    seed: u64,
) -> TrainingSet {
    let checkins = checkins_until(network, until);
    let visited = visited_topics(&checkins, |p| network.topic_of(p));
    let prefs = TopicPreferences::from_checkins(&checkins, |p| network.topic_of(p));
    let groups: Vec<Vec<UserId>> = events.iter().map(|e| e.members.clone()).collect();
    let topics: Vec<TopicId> = network.vocabulary().topics().collect();
    TrainingSet::from_groups(&groups, &visited, &topics, &prefs, neg_ratio, seed)
}

/// Precomputed state for answering queries against one network.
pub struct Recommender<'n> {
    network: &'n GeoSocialNetwork,
    model: AttentionModel,
    cores: CoreNumbers,
    prefs: TopicPreferences,
    locations: BTreeMap<UserId, PlanarPoint>,
    indexes: BTreeMap<TopicId, SpatialIndex>,
    options: SearchOptions,
}

impl<'n> Recommender<'n> {
    /// Uses check-ins up to `until` for preferences and current locations.
    pub fn new(network: &'n GeoSocialNetwork, model: AttentionModel, until: Option<i64>) -> Self {
        let projection = Projection::centered_on(network.pois().values().map(|p| (p.lat, p.lon)));
        let mut by_topic: BTreeMap<TopicId, Vec<AnnEntry>> = BTreeMap::new();
        for p in network.pois().values() {
            by_topic.entry(p.topic).or_default().push(AnnEntry {
                poi: p.id,
                point: projection.project(p.lat, p.lon),
                topic: p.topic,
            });
        }
        let indexes = by_topic.into_iter().map(|(t, e)| (t, SpatialIndex::build(e))).collect();
        let locations = network
            .current_locations(until)
            .into_iter()
            .filter_map(|(u, poi)| network.poi(poi).map(|p| (u, projection.project(p.lat, p.lon))))
            .collect();
        Self {
            network,
            model,
            cores: core_decomposition(network.graph()),
            prefs: preferences(network, until),
            locations,
            indexes,
            options: SearchOptions::default(),
        }
    }

    pub fn with_options(mut self, options: SearchOptions) -> Self {
        self.options = options;
        self
    }

    pub fn network(&self) -> &GeoSocialNetwork {
        self.network
    }

    pub fn model(&self) -> &AttentionModel {
        &self.model
    }

    pub fn cores(&self) -> &CoreNumbers {
        &self.cores
    }

    pub fn index(&self, topic: TopicId) -> Option<&SpatialIndex> {
        self.indexes.get(&topic)
    }

    pub fn recommend(&self, q: &Query) -> Result<Recommendation> {
        q.validate()?;
        let pool = candidate_pool(self.network.graph(), &self.cores, q, &self.options)?;
        let weights = attention_scores(&pool, q.target, self.model.w(), self.model.c(), &self.prefs);
        let j = select_group(&weights).ok_or(Error::EmptyResult)?;
        let group = pool.groups[j].members.clone();
        let group_score = weights.group_score[j];
        let topics: Vec<TopicId> = self.indexes.keys().copied().collect();
        let topic = self.model.select_topic(q.target, group_score, &topics)?;
        let points: Vec<PlanarPoint> = group.iter().filter_map(|u| self.locations.get(u).copied()).collect();
        if points.is_empty() {
            return Err(Error::EmptyResult);
        }
        let locations = match self.indexes.get(&topic) {
            Some(index) => spa_df(index, &points, q.top_k)?,
            None => AnnResult::default(),
        };
        Ok(Recommendation { group, group_score, topic, locations, pool_size: pool.len() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Poi, PoiId, Vocabulary};

    fn network() -> GeoSocialNetwork {
        let mut edges = Vec::new();
        for a in 1..=4u64 {
            for b in a + 1..=4 {
                edges.push((UserId(a), UserId(b)));
            }
        }
        edges.push((UserId(4), UserId(5)));
        let vocab = Vocabulary::from_names(["bar", "park"]);
        let pois = vec![
            Poi { id: PoiId(10), lat: 40.0, lon: -73.0, topic: TopicId(0) },
            Poi { id: PoiId(11), lat: 40.01, lon: -73.0, topic: TopicId(0) },
            Poi { id: PoiId(12), lat: 40.0, lon: -73.01, topic: TopicId(1) },
        ];
        let checkins = (1..=5u64)
            .map(|u| CheckIn { user: UserId(u), poi: PoiId(10), time: u as i64 })
            .collect();
        GeoSocialNetwork::new(&edges, pois, checkins, vocab).unwrap()
    }

    #[test]
    fn answers_a_clique_query() {
        let net = network();
        let model = new_model(&net, &ModelConfig { dim: 4, ..ModelConfig::default() });
        let r = Recommender::new(&net, model, None);
        let rec = r.recommend(&Query::new(UserId(1), 4, 3, 2).unwrap()).unwrap();
        assert_eq!(rec.group, vec![UserId(1), UserId(2), UserId(3), UserId(4)]);
        assert_eq!(rec.pool_size, 1);
        assert!(rec.locations.len() <= 2 && !rec.locations.is_empty());
        let idx = r.index(rec.topic).unwrap();
        assert!(rec.locations.ids().iter().all(|p| idx.entries().iter().any(|e| e.poi == *p)));
    }

    #[test]
    fn error_cases() {
        let net = network();
        let model = new_model(&net, &ModelConfig { dim: 4, ..ModelConfig::default() });
        let r = Recommender::new(&net, model, None);
        assert!(matches!(r.recommend(&Query::new(UserId(5), 4, 3, 2).unwrap()), Err(Error::EmptyResult)));
        assert!(matches!(r.recommend(&Query::new(UserId(99), 4, 3, 2).unwrap()), Err(Error::UnknownUser(_))));
    }
}
