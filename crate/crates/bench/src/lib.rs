//! Workload generators shared by the benchmarks and the pruning report.

use agsgr_core::spatial::{spa_df_traced, AnnEntry, PlanarPoint, PruneRule, SpatialIndex};
use agsgr_core::{PoiId, SocialGraph, TopicId, UserId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sparse random graph with about `avg_degree * n / 2` edges.
pub fn random_graph(n: u64, avg_degree: f64, seed: u64) -> SocialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = (avg_degree * n as f64 / 2.0) as usize;
    let edges: Vec<(UserId, UserId)> =
        (0..m).map(|_| (UserId(rng.gen_range(0..n)), UserId(rng.gen_range(0..n)))).collect();
    SocialGraph::with_users((0..n).map(UserId), &edges)
}

/// Random graph plus a dense friend circle around user 0, so group search
/// has real work to do.
pub fn graph_with_circle(n: u64, circle: u64, p: f64, seed: u64) -> SocialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(UserId, UserId)> = (1..=circle).map(|v| (UserId(0), UserId(v))).collect();
    for a in 1..=circle {
        for b in a + 1..=circle {
            if rng.gen_bool(p) {
                edges.push((UserId(a), UserId(b)));
            }
        }
    }
    for _ in 0..3 * n {
        edges.push((UserId(rng.gen_range(0..n)), UserId(rng.gen_range(0..n))));
    }
    SocialGraph::with_users((0..n).map(UserId), &edges)
}

/// `n` venues uniform in a `extent` meter square.
pub fn random_pois(n: usize, extent: f64, seed: u64) -> Vec<AnnEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| AnnEntry {
            poi: PoiId(i as u64),
            point: PlanarPoint::new(rng.gen_range(0.0..extent), rng.gen_range(0.0..extent)),
            topic: TopicId(0),
        })
        .collect()
}

/// `m` group locations clustered within `spread` meters of a random point.
pub fn random_group(m: usize, extent: f64, spread: f64, seed: u64) -> Vec<PlanarPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cx = rng.gen_range(0.0..extent);
    let cy = rng.gen_range(0.0..extent);
    (0..m)
        .map(|_| PlanarPoint::new(cx + rng.gen_range(-spread..spread), cy + rng.gen_range(-spread..spread)))
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PruningStats {
    pub queries: usize,
    pub entries: usize,
    pub mean_visited_entries: f64,
    pub mean_visited_nodes: f64,
    pub mean_pruned_subtrees: f64,
}

impl PruningStats {
    pub fn scanned_fraction(&self) -> f64 {
        self.mean_visited_entries / self.entries as f64
    }
}

/// Average search effort over `queries` random groups against one index.
pub fn pruning_stats(index: &SpatialIndex, queries: usize, group_size: usize, k: usize, seed: u64) -> PruningStats {
    let extent = 20_000.0;
    let mut s = PruningStats { queries, entries: index.len(), ..PruningStats::default() };
    for q in 0..queries {
        let group = random_group(group_size, extent, 1_000.0, seed.wrapping_add(q as u64));
        let (_, trace) = spa_df_traced(index, &group, k, PruneRule::Centroid).expect("non-empty group");
        s.mean_visited_entries += trace.visited_entries as f64;
        s.mean_visited_nodes += trace.visited_nodes as f64;
        s.mean_pruned_subtrees += trace.pruned.len() as f64;
    }
    let n = queries.max(1) as f64;
    s.mean_visited_entries /= n;
    s.mean_visited_nodes /= n;
    s.mean_pruned_subtrees /= n;
    s
}
