//! Brute-force equivalence suites run by `oracle-check`.
//!
//! Each suite draws random instances from a seed, solves them with the fast
//! algorithm and with a naive reference, and reports the first mismatch as
//! a serializable instance that can be replayed.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{core_decomposition, SocialGraph};
use crate::groups::{candidate_pool, Query, SearchOptions};
use crate::spatial::{minimum_enclosing_circle, spa_df_traced, AnnEntry, PlanarPoint, PruneRule, SpatialIndex};
use crate::types::{PoiId, TopicId, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Suite {
    KCore,
    Groups,
    Mec,
    Ann,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::KCore, Suite::Groups, Suite::Mec, Suite::Ann];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::KCore => "k-core",
            Suite::Groups => "group-enumeration",
            Suite::Mec => "min-enclosing-circle",
            Suite::Ann => "aggregate-nn",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub trials: usize,
    pub seed: u64,
    /// Use the deliberately unsafe pruning rule in the ANN suite.
    pub inject_fault: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { trials: 200, seed: 0, inject_fault: false }
    }
}

/// A single problem instance, enough to rerun one comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Instance {
    KCore { edges: Vec<(u64, u64)> },
    Groups { edges: Vec<(u64, u64)>, target: u64, k: usize, h: usize },
    Mec { points: Vec<(f64, f64)> },
    Ann { pois: Vec<(u64, f64, f64)>, group: Vec<(f64, f64)>, k: usize },
}

impl Instance {
    pub fn suite(&self) -> Suite {
        match self {
            Instance::KCore { .. } => Suite::KCore,
            Instance::Groups { .. } => Suite::Groups,
            Instance::Mec { .. } => Suite::Mec,
            Instance::Ann { .. } => Suite::Ann,
        }
    }

    /// True when the fast algorithm agrees with the reference.
    pub fn check(&self, inject_fault: bool) -> bool {
        match self {
            Instance::KCore { edges } => check_kcore(edges),
            Instance::Groups { edges, target, k, h } => check_groups(edges, *target, *k, *h),
            Instance::Mec { points } => check_mec(points),
            Instance::Ann { pois, group, k } => check_ann(pois, group, *k, inject_fault),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: Suite,
    pub trials: usize,
    pub mismatches: usize,
    pub first_failure: Option<Instance>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

fn graph_of(edges: &[(u64, u64)]) -> SocialGraph {
    let e: Vec<(UserId, UserId)> = edges.iter().map(|&(a, b)| (UserId(a), UserId(b))).collect();
    SocialGraph::from_edges(&e)
}

fn random_edges(rng: &mut ChaCha8Rng, max_nodes: u64) -> Vec<(u64, u64)> {
    let n = rng.gen_range(2..=max_nodes);
    let p = rng.gen_range(0.1..0.5);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Core numbers by repeated peeling at every level.
fn peel_cores(nodes: &[u64], edges: &[(u64, u64)]) -> Vec<u32> {
    let mut core = vec![0u32; nodes.len()];
    let pos = |u: u64| nodes.binary_search(&u).expect("node");
    for k in 1.. {
        let mut alive = vec![true; nodes.len()];
        loop {
            let mut deg = vec![0usize; nodes.len()];
            for &(a, b) in edges {
                let (i, j) = (pos(a), pos(b));
                if alive[i] && alive[j] {
                    deg[i] += 1;
                    deg[j] += 1;
                }
            }
            let drop: Vec<usize> = (0..nodes.len()).filter(|&i| alive[i] && deg[i] < k).collect();
            if drop.is_empty() {
                break;
            }
            drop.into_iter().for_each(|i| alive[i] = false);
        }
        if !alive.iter().any(|&a| a) {
            break;
        }
        for (i, a) in alive.iter().enumerate() {
            if *a {
                core[i] = k as u32;
            }
        }
    }
    core
}

fn check_kcore(edges: &[(u64, u64)]) -> bool {
    let g = graph_of(edges);
    let nodes: Vec<u64> = g.users().iter().map(|u| u.0).collect();
    let mut dedup: BTreeSet<(u64, u64)> = BTreeSet::new();
    for &(a, b) in edges {
        if a != b {
            dedup.insert((a.min(b), a.max(b)));
        }
    }
    let edges: Vec<(u64, u64)> = dedup.into_iter().collect();
    core_decomposition(&g).as_slice() == peel_cores(&nodes, &edges).as_slice()
}

/// Every h-subset of the target's friends plus the target that is
/// connected with induced min degree `>= k`.
fn exhaustive_groups(edges: &[(u64, u64)], target: u64, k: usize, h: usize) -> BTreeSet<Vec<u64>> {
    let adj: BTreeSet<(u64, u64)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    let friends: Vec<u64> = adj.iter().filter(|e| e.0 == target).map(|e| e.1).collect();
    let mut out = BTreeSet::new();
    if h == 0 || friends.len() < h - 1 {
        return out;
    }
    for mask in 0u64..(1 << friends.len()) {
        if mask.count_ones() as usize != h - 1 {
            continue;
        }
        let mut members: Vec<u64> = (0..friends.len()).filter(|i| mask >> i & 1 == 1).map(|i| friends[i]).collect();
        members.push(target);
        members.sort_unstable();
        let deg = |u: u64| members.iter().filter(|&&v| adj.contains(&(u, v))).count();
        if members.iter().any(|&u| deg(u) < k) {
            continue;
        }
        let mut reached = vec![target];
        let mut i = 0;
        while i < reached.len() {
            let u = reached[i];
            for &v in &members {
                if !reached.contains(&v) && adj.contains(&(u, v)) {
                    reached.push(v);
                }
            }
            i += 1;
        }
        if reached.len() == h {
            out.insert(members);
        }
    }
    out
}

fn check_groups(edges: &[(u64, u64)], target: u64, k: usize, h: usize) -> bool {
    let g = graph_of(edges);
    let want = exhaustive_groups(edges, target, k, h);
    let Ok(q) = Query::new(UserId(target), h, k, 1) else { return want.is_empty() };
    let opts = SearchOptions { cap: usize::MAX, require_friendship: true };
    let got: BTreeSet<Vec<u64>> = match candidate_pool(&g, &core_decomposition(&g), &q, &opts) {
        Ok(pool) => pool.groups.iter().map(|c| c.members.iter().map(|u| u.0).collect()).collect(),
        Err(_) => return want.is_empty() && !g.contains(UserId(target)),
    };
    got == want
}

fn to_points(p: &[(f64, f64)]) -> Vec<PlanarPoint> {
    p.iter().map(|&(x, y)| PlanarPoint::new(x, y)).collect()
}

/// Smallest enclosing radius over all pair and triple circles.
fn mec_reference(points: &[PlanarPoint]) -> f64 {
    if points.len() <= 1 {
        return 0.0;
    }
    let covers = |c: PlanarPoint, r: f64| points.iter().all(|p| p.dist(&c) <= r * (1.0 + 1e-9) + 1e-9);
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (a, b) = (points[i], points[j]);
            let c = PlanarPoint::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
            let r = a.dist(&b) / 2.0;
            if r < best && covers(c, r) {
                best = r;
            }
            for &p3 in &points[j + 1..] {
                let d = 2.0 * (a.x * (b.y - p3.y) + b.x * (p3.y - a.y) + p3.x * (a.y - b.y));
                if d == 0.0 {
                    continue;
                }
                let (a2, b2, c2) = (a.x * a.x + a.y * a.y, b.x * b.x + b.y * b.y, p3.x * p3.x + p3.y * p3.y);
                let ux = (a2 * (b.y - p3.y) + b2 * (p3.y - a.y) + c2 * (a.y - b.y)) / d;
                let uy = (a2 * (p3.x - b.x) + b2 * (a.x - p3.x) + c2 * (b.x - a.x)) / d;
                let c = PlanarPoint::new(ux, uy);
                let r = c.dist(&a).max(c.dist(&b)).max(c.dist(&p3));
                if r < best && covers(c, r) {
                    best = r;
                }
            }
        }
    }
    best
}

fn check_mec(points: &[(f64, f64)]) -> bool {
    let pts = to_points(points);
    match minimum_enclosing_circle(&pts) {
        None => pts.is_empty(),
        Some(c) => {
            pts.iter().all(|p| c.center.dist(p) <= c.radius + 1e-6) && (c.radius - mec_reference(&pts)).abs() <= 1e-6
        }
    }
}

fn check_ann(pois: &[(u64, f64, f64)], group: &[(f64, f64)], k: usize, inject_fault: bool) -> bool {
    let group = to_points(group);
    let entries: Vec<AnnEntry> = pois
        .iter()
        .map(|&(id, x, y)| AnnEntry { poi: PoiId(id), point: PlanarPoint::new(x, y), topic: TopicId(0) })
        .collect();
    let mut want: Vec<(f64, u64)> = entries
        .iter()
        .map(|e| (group.iter().map(|g| g.dist(&e.point)).fold(0.0, f64::max), e.poi.0))
        .collect();
    want.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    want.truncate(k);
    let index = SpatialIndex::build(entries);
    let rule = if inject_fault { PruneRule::Faulty } else { PruneRule::Centroid };
    let Ok((got, _)) = spa_df_traced(&index, &group, k, rule) else { return false };
    got.ranked.len() == want.len()
        && got
            .ranked
            .iter()
            .zip(&want)
            .all(|(g, w)| g.0 .0 == w.1 && (g.1 - w.0).abs() <= 1e-6)
}

fn random_instance(suite: Suite, rng: &mut ChaCha8Rng) -> Instance {
    match suite {
        Suite::KCore => Instance::KCore { edges: random_edges(rng, 30) },
        Suite::Groups => {
            let edges = random_edges(rng, 12);
            let k = rng.gen_range(1..=3);
            let h = rng.gen_range(k + 1..=6);
            let target = edges.first().map_or(0, |e| e.0);
            Instance::Groups { edges, target, k, h }
        }
        Suite::Mec => {
            let n = rng.gen_range(1..=60);
            let points = (0..n).map(|_| (rng.gen_range(-1e4..1e4), rng.gen_range(-1e4..1e4))).collect();
            Instance::Mec { points }
        }
        Suite::Ann => {
            let n = rng.gen_range(1..=2000);
            let pois = (0..n as u64).map(|i| (i, rng.gen_range(0.0..2e4), rng.gen_range(0.0..2e4))).collect();
            let m = rng.gen_range(1..=10);
            let group = (0..m).map(|_| (rng.gen_range(0.0..2e4), rng.gen_range(0.0..2e4))).collect();
            Instance::Ann { pois, group, k: rng.gen_range(1..=20) }
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &OracleConfig) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (suite as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut result = SuiteResult { suite, trials: cfg.trials, mismatches: 0, first_failure: None };
    for _ in 0..cfg.trials {
        let inst = random_instance(suite, &mut rng);
        if !inst.check(cfg.inject_fault) {
            result.mismatches += 1;
            result.first_failure.get_or_insert(inst);
        }
    }
    result
}
