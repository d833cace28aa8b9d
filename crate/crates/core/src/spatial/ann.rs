//! Aggregate (max-distance) nearest neighbor search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::geo::PlanarPoint;
use super::index::{mindist, Node, SpatialIndex};
use super::mec::minimum_enclosing_circle;
use crate::error::{Error, Result};
use crate::types::{PoiId, TopicId};

/// One indexed venue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnEntry {
    pub poi: PoiId,
    pub point: PlanarPoint,
    pub topic: TopicId,
}

/// Ranked venues, ascending by aggregate distance, then by POI id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnResult {
    pub ranked: Vec<(PoiId, f64)>,
}

impl AnnResult {
    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn ids(&self) -> Vec<PoiId> {
        self.ranked.iter().map(|r| r.0).collect()
    }

    /// The first `k` results.
    pub fn truncated(&self, k: usize) -> AnnResult {
        AnnResult { ranked: self.ranked.iter().take(k).copied().collect() }
    }

    /// `rank,poi_id,adist_meters` with a header row; ranks start at 1.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,poi_id,adist_meters\n");
        for (i, (poi, d)) in self.ranked.iter().enumerate() {
            let _ = writeln!(s, "{},{},{:.3}", i + 1, poi, d);
        }
        s
    }
}

/// Maximum Euclidean distance from `l` to any group location.
pub fn adist(l: &PlanarPoint, group: &[PlanarPoint]) -> Result<f64> {
    if group.is_empty() {
        return Err(Error::EmptyGroup);
    }
    Ok(max_dist(l, group))
}

fn max_dist(l: &PlanarPoint, group: &[PlanarPoint]) -> f64 {
    group.iter().map(|g| l.dist(g)).fold(0.0, f64::max)
}

/// Full scan over `entries`.
pub fn brute_force_ann(entries: &[AnnEntry], group: &[PlanarPoint], k: usize) -> Result<AnnResult> {
    if group.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut all: Vec<(PoiId, f64)> = entries.iter().map(|e| (e.poi, max_dist(&e.point, group))).collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    Ok(AnnResult { ranked: all })
}

/// Subtree pruning test used by [`spa_df`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PruneRule {
    /// Skip a subtree when `mindist(mbr, centroid) - min_i |u_i, centroid|`
    /// exceeds the current K-th best aggregate distance.
    #[default]
    Centroid,
    /// Deliberately unsafe bound (slack added instead of subtracted).
    /// Exists only to confirm that the oracle checks catch pruning bugs.
    Faulty,
}

/// Counters and pruned subtrees from one search.
#[derive(Debug, Default)]
pub struct SearchTrace<'a> {
    pub visited_nodes: usize,
    pub visited_entries: usize,
    pub pruned: Vec<&'a Node>,
}

#[derive(PartialEq)]
struct Candidate {
    dist: f64,
    poi: PoiId,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then(self.poi.cmp(&other.poi))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search<'a, 'g> {
    group: &'g [PlanarPoint],
    centroid: PlanarPoint,
    slack: f64,
    k: usize,
    rule: PruneRule,
    best: BinaryHeap<Candidate>,
    trace: SearchTrace<'a>,
}

impl<'a> Search<'a, '_> {
    fn kth_best(&self) -> f64 {
        if self.best.len() < self.k {
            f64::INFINITY
        } else {
            self.best.peek().map_or(f64::INFINITY, |c| c.dist)
        }
    }

    fn prunable(&self, node: &Node) -> bool {
        let d = mindist(node.mbr(), &self.centroid);
        match self.rule {
            PruneRule::Centroid => d - self.slack > self.kth_best(),
            PruneRule::Faulty => d + self.slack > self.kth_best(),
        }
    }

    fn visit(&mut self, node: &'a Node) {
        self.trace.visited_nodes += 1;
        match node {
            Node::Leaf { entries, .. } => {
                for e in entries {
                    self.trace.visited_entries += 1;
                    let cand = Candidate { dist: max_dist(&e.point, self.group), poi: e.poi };
                    if self.best.len() < self.k {
                        self.best.push(cand);
                    } else if self.best.peek().is_some_and(|top| cand < *top) {
                        self.best.pop();
                        self.best.push(cand);
                    }
                }
            }
            Node::Inner { children, .. } => {
                let mut order: Vec<(f64, &'a Node)> =
                    children.iter().map(|c| (mindist(c.mbr(), &self.centroid), c)).collect();
                order.sort_by(|a, b| a.0.total_cmp(&b.0));
                for (i, &(_, child)) in order.iter().enumerate() {
                    // Children are in ascending mindist, so once one fails
                    // the bound every later one does too.
                    if self.prunable(child) {
                        self.trace.pruned.extend(order[i..].iter().map(|&(_, c)| c));
                        break;
                    }
                    self.visit(child);
                }
            }
        }
    }
}

/// Depth-first aggregate nearest neighbor search guided by the minimum
/// enclosing circle of the group.
pub fn spa_df(index: &SpatialIndex, group: &[PlanarPoint], k: usize) -> Result<AnnResult> {
    spa_df_traced(index, group, k, PruneRule::Centroid).map(|(r, _)| r)
}

/// [`spa_df`] with an explicit pruning rule, returning the search trace.
pub fn spa_df_traced<'a>(
    index: &'a SpatialIndex,
    group: &[PlanarPoint],
    k: usize,
    rule: PruneRule,
) -> Result<(AnnResult, SearchTrace<'a>)> {
    let circle = minimum_enclosing_circle(group).ok_or(Error::EmptyGroup)?;
    let slack = group.iter().map(|g| g.dist(&circle.center)).fold(f64::INFINITY, f64::min);
    let mut search = Search {
        group,
        centroid: circle.center,
        slack,
        k,
        rule,
        best: BinaryHeap::with_capacity(k + 1),
        trace: SearchTrace::default(),
    };
    if let (Some(root), true) = (index.root(), k > 0) {
        search.visit(root);
    }
    let ranked = search
        .best
        .into_sorted_vec()
        .into_iter()
        .map(|c| (c.poi, c.dist))
        .collect();
    Ok((AnnResult { ranked }, search.trace))
}
