//! Synthetic geo-social networks with a planted friend group.
//!
//! A target user sits in a 5-clique whose members mostly visit one topic
//! and meet repeatedly at venues of that topic, last at one fixed venue. A
//! second clique around the target with mixed tastes competes for
//! selection. Everyone else gets random friendships, check-ins drawn from a
//! personal topic mix, and occasional outings with friends.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{extract_implicit_groups, GroupEvent, DEFAULT_WINDOW_SECS};
use crate::network::GeoSocialNetwork;
use crate::types::{CheckIn, Poi, PoiId, TopicId, UserId, Vocabulary};

const ORIGIN: (f64, f64) = (40.0, -74.0);
const METERS_PER_DEG: f64 = 111_195.0;
const DAY: i64 = 86_400;
const EPOCH: i64 = 1_600_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub n_users: usize,
    pub n_topics: usize,
    pub n_pois: usize,
    /// Side of the square city, meters.
    pub extent_m: f64,
    pub edge_prob: f64,
    pub outings: usize,
    pub planted_meetings: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            n_users: 200,
            n_topics: 8,
            n_pois: 400,
            extent_m: 10_000.0,
            edge_prob: 0.03,
            outings: 150,
            planted_meetings: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedDataset {
    pub network: GeoSocialNetwork,
    pub events: Vec<GroupEvent>,
    pub target: UserId,
    /// Sorted, target included.
    pub group: Vec<UserId>,
    pub topic: TopicId,
    pub poi: PoiId,
    pub edges: Vec<(UserId, UserId)>,
    /// Category name per topic id.
    pub category_names: Vec<String>,
}

fn to_latlon(x: f64, y: f64) -> (f64, f64) {
    let lat = ORIGIN.0 + y / METERS_PER_DEG;
    let lon = ORIGIN.1 + x / (METERS_PER_DEG * ORIGIN.0.to_radians().cos());
    (lat, lon)
}

pub fn planted(cfg: &PlantedConfig) -> PlantedDataset {
    assert!(cfg.n_users >= 20 && cfg.n_topics >= 3 && cfg.n_pois >= 4 * cfg.n_topics);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let target = UserId(0);
    let planted_members: Vec<u64> = (0..5).collect();
    let rivals: Vec<u64> = vec![0, 5, 6, 7, 8];
    let topic = TopicId(0);
    let category_names: Vec<String> = (0..cfg.n_topics).map(|t| format!("cat{t:02}")).collect();

    // Venues. The planted venue sits at the center; other venues of its
    // topic keep at least 1.5 km away.
    let half = cfg.extent_m / 2.0;
    let mut pois = vec![{
        let (lat, lon) = to_latlon(0.0, 0.0);
        Poi { id: PoiId(0), lat, lon, topic }
    }];
    let mut by_topic: Vec<Vec<PoiId>> = vec![Vec::new(); cfg.n_topics];
    by_topic[0].push(PoiId(0));
    for i in 1..cfg.n_pois {
        let t = i % cfg.n_topics;
        let (x, y) = loop {
            let x = rng.gen_range(-half..half);
            let y = rng.gen_range(-half..half);
            if t != 0 || x.hypot(y) >= 1500.0 {
                break (x, y);
            }
        };
        let (lat, lon) = to_latlon(x, y);
        pois.push(Poi { id: PoiId(i as u64), lat, lon, topic: TopicId(t as u32) });
        by_topic[t].push(PoiId(i as u64));
    }

    // Friendships.
    let mut edge_set: BTreeSet<(u64, u64)> = BTreeSet::new();
    let add = |a: u64, b: u64, set: &mut BTreeSet<(u64, u64)>| {
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    };
    for clique in [&planted_members, &rivals] {
        for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[i + 1..] {
                add(a, b, &mut edge_set);
            }
        }
    }
    let n = cfg.n_users as u64;
    for a in 1..n {
        for b in a + 1..n {
            if rng.gen_bool(cfg.edge_prob) {
                add(a, b, &mut edge_set);
            }
        }
    }
    let edges: Vec<(UserId, UserId)> = edge_set.iter().map(|&(a, b)| (UserId(a), UserId(b))).collect();
    let mut friends: Vec<Vec<u64>> = vec![Vec::new(); cfg.n_users];
    for &(a, b) in &edge_set {
        friends[a as usize].push(b);
        friends[b as usize].push(a);
    }

    // Topic mixes. Planted members lean hard on the planted topic, the
    // target exclusively so; everyone else favors some other topic.
    let mixes: Vec<Vec<f64>> = (0..cfg.n_users)
        .map(|u| {
            let mut w = vec![1.0; cfg.n_topics];
            if u == 0 {
                w = vec![0.0; cfg.n_topics];
                w[0] = 1.0;
            } else if u < 5 {
                w = vec![0.02; cfg.n_topics];
                w[0] = 1.0;
            } else {
                w[rng.gen_range(1..cfg.n_topics)] = 1.5 * cfg.n_topics as f64;
            }
            w
        })
        .collect();

    let mut checkins = Vec::new();
    let visit = |user: u64, t: usize, time: i64, rng: &mut ChaCha8Rng, out: &mut Vec<CheckIn>| {
        let poi = *by_topic[t].choose(rng).expect("every topic has venues");
        out.push(CheckIn { user: UserId(user), poi, time });
    };
    for u in 0..cfg.n_users {
        let dist = WeightedIndex::new(&mixes[u]).expect("positive weights");
        let count = rng.gen_range(15..=25);
        // Planted users stop wandering before their first meeting so their
        // last known position is the meeting venue.
        let span = if u < 5 { 10 * DAY } else { 100 * DAY };
        for _ in 0..count {
            let t = dist.sample(&mut rng);
            let time = EPOCH + rng.gen_range(0..span);
            visit(u as u64, t, time, &mut rng, &mut checkins);
        }
    }

    // Background outings with friends; planted users stay out of them.
    for _ in 0..cfg.outings {
        let a = rng.gen_range(9..n);
        let pals: Vec<u64> = friends[a as usize].iter().copied().filter(|&f| f >= 9).collect();
        if pals.is_empty() {
            continue;
        }
        let take = rng.gen_range(1..=pals.len().min(3));
        let mut party: Vec<u64> = pals.choose_multiple(&mut rng, take).copied().collect();
        party.push(a);
        let t = WeightedIndex::new(&mixes[a as usize]).expect("positive weights").sample(&mut rng);
        let poi = *by_topic[t].choose(&mut rng).expect("venues");
        let time = EPOCH + rng.gen_range(0..100 * DAY);
        for u in party {
            checkins.push(CheckIn { user: UserId(u), poi, time: time + rng.gen_range(0..600) });
        }
    }

    // Rival clique meets at venues of mixed topics.
    for m in 0..cfg.planted_meetings {
        let t = rng.gen_range(1..cfg.n_topics);
        let poi = *by_topic[t].choose(&mut rng).expect("venues");
        let time = EPOCH + 12 * DAY + m as i64 * 8 * DAY + rng.gen_range(0..DAY);
        for &u in &rivals[1..] {
            checkins.push(CheckIn { user: UserId(u), poi, time: time + rng.gen_range(0..600) });
        }
    }

    // Planted meetings at distinct venues of the planted topic, ending at
    // the planted venue.
    let mut venues: Vec<PoiId> = by_topic[0][1..]
        .choose_multiple(&mut rng, cfg.planted_meetings.saturating_sub(1))
        .copied()
        .collect();
    venues.push(PoiId(0));
    for (m, &poi) in venues.iter().enumerate() {
        let time = EPOCH + 15 * DAY + m as i64 * 8 * DAY;
        for &u in &planted_members {
            checkins.push(CheckIn { user: UserId(u), poi, time: time + rng.gen_range(0..300) });
        }
    }

    checkins.sort_by_key(|c| (c.time, c.user, c.poi));
    let vocabulary = Vocabulary::from_names(category_names.iter().cloned());
    let users = (0..n).map(UserId);
    let network = GeoSocialNetwork::with_users(users, &edges, pois, checkins, vocabulary).expect("generated data is valid");
    let events = extract_implicit_groups(network.checkins(), network.graph(), DEFAULT_WINDOW_SECS);
    PlantedDataset {
        network,
        events,
        target,
        group: planted_members.into_iter().map(UserId).collect(),
        topic,
        poi: PoiId(0),
        edges,
        category_names,
    }
}

impl PlantedDataset {
    /// Writes `checkins.csv` and `edges.csv` in the ingest formats.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut s = String::from("user_id,poi_id,timestamp,lat,lon,category\n");
        for c in self.network.checkins() {
            let p = self.network.poi(c.poi).expect("known poi");
            let name = &self.category_names[p.topic.0 as usize];
            let _ = writeln!(s, "{},{},{},{:.7},{:.7},{}", c.user, c.poi, c.time, p.lat, p.lon, name);
        }
        let path = dir.join("checkins.csv");
        fs::write(&path, s).map_err(|e| Error::io(&path, e))?;
        let mut s = String::from("u,v\n");
        for (a, b) in &self.edges {
            let _ = writeln!(s, "{a},{b}");
        }
        let path = dir.join("edges.csv");
        fs::write(&path, s).map_err(|e| Error::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_structure() {
        let d = planted(&PlantedConfig::default());
        assert_eq!(d.network.graph().num_users(), 200);
        for (i, &a) in d.group.iter().enumerate() {
            for &b in &d.group[i + 1..] {
                assert!(d.network.graph().are_friends(a, b));
            }
        }
        let meetings = d
            .events
            .iter()
            .filter(|e| e.members == d.group && d.network.topic_of(e.poi) == Some(d.topic))
            .count();
        assert_eq!(meetings, 10);
        assert_eq!(d.network.vocabulary().name(d.topic), Some("cat00"));
        let loc = d.network.current_locations(None);
        assert!(d.group.iter().all(|u| loc[u] == d.poi));
    }

    #[test]
    fn reproducible() {
        let cfg = PlantedConfig { seed: 5, ..PlantedConfig::default() };
        let a = planted(&cfg);
        let b = planted(&cfg);
        assert_eq!(a.network.checkins(), b.network.checkins());
        assert_eq!(a.events, b.events);
    }
}
