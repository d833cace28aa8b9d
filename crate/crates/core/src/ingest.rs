//! Dataset loading and implicit group extraction.
//!
//! Check-in rows are `user_id,poi_id,timestamp,lat,lon,category`; edge rows
//! are `u,v`. Both may carry a header line, detected by a non-numeric first
//! field. Malformed rows are skipped and counted; more than half malformed
//! is a format error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::types::{CheckIn, Poi, PoiId, TopicId, UserId, Vocabulary};

/// Co-check-in window in seconds; time differences must be strictly below it.
pub const DEFAULT_WINDOW_SECS: i64 = 1800;

/// Row counts from one parsed file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RowStats {
    pub rows: usize,
    pub malformed: usize,
    pub header: bool,
}

impl RowStats {
    fn check(&self, path: &Path) -> Result<()> {
        if self.rows > 0 && self.malformed * 2 > self.rows {
            return Err(Error::Format(format!(
                "{}: {} of {} rows malformed",
                path.display(),
                self.malformed,
                self.rows
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedCheckins {
    pub checkins: Vec<CheckIn>,
    /// Venue catalog; the first row mentioning a POI defines it.
    pub pois: Vec<Poi>,
    pub vocabulary: Vocabulary,
    pub stats: RowStats,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedEdges<T> {
    pub edges: Vec<(T, T)>,
    pub stats: RowStats,
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file))
}

/// Runs `row` over every record, handling header detection and counting.
fn scan(path: &Path, mut row: impl FnMut(&csv::StringRecord) -> bool) -> Result<RowStats> {
    let mut stats = RowStats::default();
    let mut first = true;
    for rec in reader(path)?.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) if e.is_io_error() => {
                return Err(match e.into_kind() {
                    csv::ErrorKind::Io(io) => Error::io(path, io),
                    _ => unreachable!(),
                })
            }
            Err(_) => {
                stats.rows += 1;
                stats.malformed += 1;
                continue;
            }
        };
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if std::mem::take(&mut first) && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            stats.header = true;
            continue;
        }
        stats.rows += 1;
        if !row(&rec) {
            stats.malformed += 1;
        }
    }
    stats.check(path)?;
    Ok(stats)
}

fn parse_time(s: &str) -> Option<i64> {
    if let Ok(t) = s.parse::<i64>() {
        return (t >= 0).then_some(t);
    }
    let f = s.parse::<f64>().ok()?;
    (f.is_finite() && f >= 0.0 && f < i64::MAX as f64).then(|| f.trunc() as i64)
}

pub fn parse_checkins(path: impl AsRef<Path>) -> Result<ParsedCheckins> {
    let path = path.as_ref();
    let mut rows: Vec<(UserId, PoiId, i64)> = Vec::new();
    let mut catalog: BTreeMap<PoiId, (f64, f64, String)> = BTreeMap::new();
    let stats = scan(path, |rec| {
        if rec.len() < 6 {
            return false;
        }
        let parsed = (|| {
            let user = rec[0].parse::<u64>().ok()?;
            let poi = rec[1].parse::<u64>().ok()?;
            let time = parse_time(&rec[2])?;
            let lat = rec[3].parse::<f64>().ok()?;
            let lon = rec[4].parse::<f64>().ok()?;
            let category = &rec[5];
            let valid = (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) && !category.is_empty();
            valid.then(|| (UserId(user), PoiId(poi), time, lat, lon, category.to_string()))
        })();
        match parsed {
            Some((user, poi, time, lat, lon, category)) => {
                catalog.entry(poi).or_insert((lat, lon, category));
                rows.push((user, poi, time));
                true
            }
            None => false,
        }
    })?;
    let vocabulary = Vocabulary::from_names(catalog.values().map(|(_, _, c)| c.clone()));
    let pois = catalog
        .into_iter()
        .map(|(id, (lat, lon, c))| Poi { id, lat, lon, topic: vocabulary.id(&c).expect("registered") })
        .collect();
    let checkins = rows.into_iter().map(|(user, poi, time)| CheckIn { user, poi, time }).collect();
    Ok(ParsedCheckins { checkins, pois, vocabulary, stats })
}

fn parse_pairs<T: From<u64>>(path: &Path) -> Result<ParsedEdges<T>> {
    let mut edges = Vec::new();
    let stats = scan(path, |rec| {
        if rec.len() < 2 {
            return false;
        }
        match (rec[0].parse::<u64>(), rec[1].parse::<u64>()) {
            (Ok(a), Ok(b)) => {
                edges.push((T::from(a), T::from(b)));
                true
            }
            _ => false,
        }
    })?;
    Ok(ParsedEdges { edges, stats })
}

/// Social edges `u,v`.
pub fn parse_edges(path: impl AsRef<Path>) -> Result<ParsedEdges<UserId>> {
    parse_pairs(path.as_ref())
}

/// Venue association links `a,b`. Stored with the network, not used by any
/// algorithm.
pub fn parse_poi_links(path: impl AsRef<Path>) -> Result<ParsedEdges<PoiId>> {
    parse_pairs(path.as_ref())
}

/// A set of friends who checked in together at one venue.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupEvent {
    /// Sorted, distinct.
    pub members: Vec<UserId>,
    pub poi: PoiId,
    /// Earliest member check-in of the event.
    pub time: i64,
}

impl GroupEvent {
    fn sort_key(&self) -> (i64, PoiId, Option<UserId>, &[UserId]) {
        (self.time, self.poi, self.members.first().copied(), &self.members)
    }

    pub fn contains(&self, u: UserId) -> bool {
        self.members.binary_search(&u).is_ok()
    }
}

/// Sorts events chronologically, breaking ties by POI and then members.
pub fn sort_events(events: &mut [GroupEvent]) {
    events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Explicit groups, one member per row: `event_id,user_id,poi_id,timestamp`.
/// An event's POI is the one on its first row; its time is the earliest row.
pub fn parse_explicit_groups(path: impl AsRef<Path>) -> Result<(Vec<GroupEvent>, RowStats)> {
    let path = path.as_ref();
    let mut events: BTreeMap<String, (BTreeSet<UserId>, PoiId, i64)> = BTreeMap::new();
    let stats = scan(path, |rec| {
        if rec.len() < 4 || rec[0].is_empty() {
            return false;
        }
        let (Ok(user), Ok(poi), Some(time)) = (rec[1].parse::<u64>(), rec[2].parse::<u64>(), parse_time(&rec[3]))
        else {
            return false;
        };
        let e = events
            .entry(rec[0].to_string())
            .or_insert_with(|| (BTreeSet::new(), PoiId(poi), time));
        e.0.insert(UserId(user));
        e.2 = e.2.min(time);
        true
    })?;
    let mut out: Vec<GroupEvent> = events
        .into_values()
        .filter(|(m, _, _)| m.len() >= 2)
        .map(|(m, poi, time)| GroupEvent { members: m.into_iter().collect(), poi, time })
        .collect();
    sort_events(&mut out);
    Ok((out, stats))
}

/// Implicit groups from co-located check-ins.
///
/// Every check-in acts as an anchor: the anchor's user plus each friend who
/// checked in at the same POI less than `window` seconds from the anchor's
/// time. Groups of one are dropped; repeats of the same (members, POI) keep
/// the earliest time. The result is sorted and does not depend on input
/// order.
pub fn extract_implicit_groups(checkins: &[CheckIn], graph: &SocialGraph, window: i64) -> Vec<GroupEvent> {
    let mut by_poi: BTreeMap<PoiId, Vec<(i64, UserId)>> = BTreeMap::new();
    for c in checkins {
        by_poi.entry(c.poi).or_default().push((c.time, c.user));
    }
    let mut found: BTreeMap<(Vec<UserId>, PoiId), i64> = BTreeMap::new();
    for (poi, mut visits) in by_poi {
        visits.sort_unstable();
        visits.dedup();
        for &(t, anchor) in &visits {
            let lo = visits.partition_point(|&(s, _)| s <= t.saturating_sub(window));
            let hi = visits.partition_point(|&(s, _)| s < t.saturating_add(window));
            let mut members: BTreeMap<UserId, i64> = BTreeMap::new();
            members.insert(anchor, t);
            for &(s, v) in &visits[lo..hi] {
                if v != anchor && graph.are_friends(anchor, v) {
                    let e = members.entry(v).or_insert(s);
                    *e = (*e).min(s);
                }
            }
            if members.len() < 2 {
                continue;
            }
            let start = *members.values().min().expect("non-empty");
            let key = (members.into_keys().collect::<Vec<_>>(), poi);
            let e = found.entry(key).or_insert(start);
            *e = (*e).min(start);
        }
    }
    let mut out: Vec<GroupEvent> = found
        .into_iter()
        .map(|((members, poi), time)| GroupEvent { members, poi, time })
        .collect();
    sort_events(&mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitPolicy {
    /// Oldest 80% train, newest 20% test.
    ByTime80,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<GroupEvent>,
    pub test: Vec<GroupEvent>,
    pub policy: SplitPolicy,
}

impl DatasetSplit {
    /// Time of the last training event, if any.
    pub fn cutoff(&self) -> Option<i64> {
        self.train.last().map(|e| e.time)
    }
}

/// Chronological split; the test side gets `floor(n / 5)` events.
pub fn split(mut events: Vec<GroupEvent>) -> DatasetSplit {
    sort_events(&mut events);
    let n_test = events.len() / 5;
    let test = events.split_off(events.len() - n_test);
    DatasetSplit { train: events, test, policy: SplitPolicy::ByTime80 }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DatasetStats {
    pub users: usize,
    pub group_events: usize,
    pub items: usize,
    pub avg_group_size: f64,
    pub avg_friends: f64,
}

pub fn dataset_stats(graph: &SocialGraph, events: &[GroupEvent], items: usize) -> DatasetStats {
    let users = graph.num_users();
    let total_members: usize = events.iter().map(|e| e.members.len()).sum();
    DatasetStats {
        users,
        group_events: events.len(),
        items,
        avg_group_size: if events.is_empty() { 0.0 } else { total_members as f64 / events.len() as f64 },
        avg_friends: if users == 0 { 0.0 } else { 2.0 * graph.num_edges() as f64 / users as f64 },
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# Users                 {}", self.users)?;
        writeln!(f, "# Group Events          {}", self.group_events)?;
        writeln!(f, "# Items                 {}", self.items)?;
        writeln!(f, "Avg. Group Size         {:.3}", self.avg_group_size)?;
        write!(f, "Avg. #Friends for a User {:.3}", self.avg_friends)
    }
}

/// `poi_id,time,members` with members pipe-joined in id order.
pub fn write_group_events(path: impl AsRef<Path>, events: &[GroupEvent]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("poi_id,time,members\n");
    for e in events {
        let members: Vec<String> = e.members.iter().map(|u| u.to_string()).collect();
        out.push_str(&format!("{},{},{}\n", e.poi, e.time, members.join("|")));
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_group_events(path: impl AsRef<Path>) -> Result<Vec<GroupEvent>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("poi_id")) {
            continue;
        }
        let bad = || Error::Format(format!("{}:{}: bad group event row", path.display(), i + 1));
        let mut parts = line.splitn(3, ',');
        let poi = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let time = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let mut members = parts
            .next()
            .ok_or_else(bad)?
            .split('|')
            .map(|s| s.parse::<u64>().map(UserId).map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        members.sort_unstable();
        members.dedup();
        out.push(GroupEvent { members, poi: PoiId(poi), time });
    }
    Ok(out)
}

/// Topics each user has visited.
pub fn visited_topics<F>(checkins: &[CheckIn], topic_of: F) -> BTreeMap<UserId, BTreeSet<TopicId>>
where
    F: Fn(PoiId) -> Option<TopicId>,
{
    let mut out: BTreeMap<UserId, BTreeSet<TopicId>> = BTreeMap::new();
    for c in checkins {
        if let Some(t) = topic_of(c.poi) {
            out.entry(c.user).or_default().insert(t);
        }
    }
    out
}
