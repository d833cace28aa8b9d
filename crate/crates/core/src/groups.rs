//! Candidate group enumeration: h-sized connected k-core friend groups that
//! contain the target user.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{
    connected_components, is_valid_group, k_core_subgraph, CoreNumbers, InducedSubgraph,
    SocialGraph,
};
use crate::types::UserId;

pub const DEFAULT_CAP: usize = 10_000;

/// A group query for one target user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Query {
    pub target: UserId,
    /// Group size `h`.
    pub group_size: usize,
    /// Core constraint `k`.
    pub core: usize,
    /// Length `K` of the location list.
    pub top_k: usize,
}

impl Query {
    pub fn new(target: UserId, group_size: usize, core: usize, top_k: usize) -> Result<Self> {
        let q = Self { target, group_size, core, top_k };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.core < 1 {
            return Err(Error::InvalidQuery("core must be at least 1".into()));
        }
        if self.group_size < self.core + 1 {
            return Err(Error::InvalidQuery(format!(
                "group size {} must be at least core + 1 = {}",
                self.group_size,
                self.core + 1
            )));
        }
        if self.top_k < 1 {
            return Err(Error::InvalidQuery("top-k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Knobs for candidate enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of groups in the pool.
    pub cap: usize,
    /// When false, members need not be direct friends of the target.
    pub require_friendship: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP, require_friendship: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateGroup {
    /// Sorted member ids, target included.
    pub members: Vec<UserId>,
    pub component_id: usize,
}

impl CandidateGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: UserId) -> bool {
        self.members.binary_search(&u).is_ok()
    }

    /// Members other than `target`, in id order.
    pub fn others(&self, target: UserId) -> impl Iterator<Item = UserId> + '_ {
        self.members.iter().copied().filter(move |&u| u != target)
    }
}

/// Deduplicated candidate groups in lexicographic member order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidatePool {
    pub groups: Vec<CandidateGroup>,
    pub cap: usize,
}

impl CandidatePool {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn member_sets(&self) -> Vec<Vec<UserId>> {
        self.groups.iter().map(|g| g.members.clone()).collect()
    }
}

/// A partially grown group, as node indices of the social graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialGroup {
    /// Sorted member indices.
    pub members: Vec<u32>,
    /// Members whose neighborhoods have already been used for growth.
    pub expanded: Vec<u32>,
}

impl PartialGroup {
    pub fn seed(idx: usize) -> Self {
        Self { members: vec![idx as u32], expanded: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Grows `partial` by subsets of one member's neighborhood.
///
/// The member is the unexpanded one with the highest degree in `sub`
/// (smallest id on ties). A subset `Vp` of its outside neighbors is accepted
/// when `|partial| + |Vp| <= h` and `k <= |Vp| + deg_partial(u)`. Successors
/// come out largest `Vp` first, then in lexicographic order. With
/// `friends_of` set, only the target and its friends may join.
pub fn expand_group(
    sub: &InducedSubgraph<'_>,
    partial: &PartialGroup,
    group_size: usize,
    core: usize,
    friends_of: Option<&[bool]>,
) -> Vec<PartialGroup> {
    let mut out = Vec::new();
    expand_group_into(sub, partial, group_size, core, friends_of, &mut |p| {
        out.push(p);
        true
    });
    out
}

/// Streaming form of [`expand_group`]; `emit` returns false to stop early.
fn expand_group_into(
    sub: &InducedSubgraph<'_>,
    partial: &PartialGroup,
    group_size: usize,
    core: usize,
    friends_of: Option<&[bool]>,
    emit: &mut dyn FnMut(PartialGroup) -> bool,
) {
    if partial.len() >= group_size {
        return;
    }
    let pick = partial
        .members
        .iter()
        .copied()
        .filter(|m| partial.expanded.binary_search(m).is_err())
        .max_by(|&a, &b| {
            sub.degree(a as usize)
                .cmp(&sub.degree(b as usize))
                .then_with(|| b.cmp(&a))
        });
    let Some(u) = pick else { return };

    let in_partial = |v: usize| partial.members.binary_search(&(v as u32)).is_ok();
    let deg_in_partial = sub.neighbors(u as usize).filter(|&v| in_partial(v)).count();
    let outside: Vec<u32> = sub
        .neighbors(u as usize)
        .filter(|&v| !in_partial(v))
        .filter(|&v| friends_of.is_none_or(|f| f[v]))
        .map(|v| v as u32)
        .collect();

    let mut expanded = partial.expanded.clone();
    let at = expanded.binary_search(&u).unwrap_err();
    expanded.insert(at, u);

    let room = group_size - partial.len();
    let max_take = room.min(outside.len());
    for take in (1..=max_take).rev() {
        if take + deg_in_partial < core {
            break;
        }
        let mut stop = false;
        for_each_combination(&outside, take, &mut |chosen| {
            let mut members = partial.members.clone();
            members.extend_from_slice(chosen);
            members.sort_unstable();
            if !emit(PartialGroup { members, expanded: expanded.clone() }) {
                stop = true;
            }
            !stop
        });
        if stop {
            return;
        }
    }
}

/// Calls `f` with every `take`-subset of `items` in lexicographic order
/// until it returns false.
fn for_each_combination(items: &[u32], take: usize, f: &mut dyn FnMut(&[u32]) -> bool) {
    let n = items.len();
    if take == 0 || take > n {
        return;
    }
    let mut idx: Vec<usize> = (0..take).collect();
    let mut buf: Vec<u32> = idx.iter().map(|&i| items[i]).collect();
    loop {
        if !f(&buf) {
            return;
        }
        let mut i = take;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - take {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..take {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i..take {
            buf[j] = items[idx[j]];
        }
    }
}

/// Breadth-first enumeration of candidate groups inside one connected
/// k-core component.
///
/// `pending` holds unextended partial groups in FIFO order; `seen` is the
/// union of everything ever queued or completed, so no member set is
/// processed twice. Completed size-`h` sets are validated and pooled until
/// the cap is reached.
pub fn get_candidate_groups(
    g: &SocialGraph,
    component: &[UserId],
    component_id: usize,
    q: &Query,
    opts: &SearchOptions,
) -> CandidatePool {
    let mut pool = CandidatePool { groups: Vec::new(), cap: opts.cap };
    let h = q.group_size;
    if component.len() < h || opts.cap == 0 {
        return pool;
    }
    let Some(target) = g.index_of(q.target) else { return pool };
    let sub = InducedSubgraph::from_users(g, component);
    if !sub.contains(target) {
        return pool;
    }
    let friends: Option<Vec<bool>> = opts.require_friendship.then(|| {
        let mut f = vec![false; g.num_users()];
        for &v in g.neighbors(target) {
            f[v as usize] = true;
        }
        f
    });

    // Bounds memory of the dedup set when the cap cuts enumeration short.
    let seen_limit = opts.cap.saturating_mul(64).max(1 << 16);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut pending: VecDeque<PartialGroup> = VecDeque::new();
    let seed = PartialGroup::seed(target);
    seen.insert(seed.members.clone());
    pending.push_back(seed);

    let mut accepted: Vec<Vec<UserId>> = Vec::new();
    let mut done = false;
    while let Some(partial) = pending.pop_front() {
        if done {
            break;
        }
        expand_group_into(&sub, &partial, h, q.core, friends.as_deref(), &mut |next| {
            if seen.contains(&next.members) {
                return true;
            }
            if next.len() == h {
                seen.insert(next.members.clone());
                let ids: Vec<UserId> = next.members.iter().map(|&i| g.user(i as usize)).collect();
                if is_valid_group(g, &ids, q.core, h, q.target, opts.require_friendship) {
                    accepted.push(ids);
                    if accepted.len() >= opts.cap {
                        done = true;
                        return false;
                    }
                }
            } else if seen.len() < seen_limit {
                seen.insert(next.members.clone());
                pending.push_back(next);
            }
            true
        });
    }

    accepted.sort();
    pool.groups = accepted
        .into_iter()
        .map(|members| CandidateGroup { members, component_id })
        .collect();
    pool
}

/// Builds the candidate pool for a query: restrict to the k-core, locate the
/// target's connected component, and enumerate inside it. Targets whose
/// degree or core number is below `k` yield an empty pool.
pub fn candidate_pool(
    g: &SocialGraph,
    cores: &CoreNumbers,
    q: &Query,
    opts: &SearchOptions,
) -> Result<CandidatePool> {
    q.validate()?;
    let Some(t) = g.index_of(q.target) else {
        return Err(Error::UnknownUser(q.target));
    };
    let empty = CandidatePool { groups: Vec::new(), cap: opts.cap };
    if g.degree(t) < q.core || (cores.of_index(t) as usize) < q.core {
        return Ok(empty);
    }
    let sub = k_core_subgraph(g, cores, q.core as u32);
    let components = connected_components(&sub);
    let found = components
        .iter()
        .enumerate()
        .find(|(_, c)| c.binary_search(&q.target).is_ok());
    Ok(match found {
        Some((id, comp)) => get_candidate_groups(g, comp, id, q, opts),
        None => empty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::core_decomposition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clique(nodes: &[u64]) -> Vec<(UserId, UserId)> {
        let mut e = Vec::new();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                e.push((UserId(a), UserId(b)));
            }
        }
        e
    }

    fn users(v: &[u64]) -> Vec<UserId> {
        v.iter().copied().map(UserId).collect()
    }

    /// Every h-subset of the graph's users that passes the validity check.
    fn exhaustive(g: &SocialGraph, q: &Query, friendship: bool) -> Vec<Vec<UserId>> {
        let n = g.num_users();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != q.group_size {
                continue;
            }
            let members: Vec<UserId> =
                (0..n).filter(|i| mask & (1 << i) != 0).map(|i| g.user(i)).collect();
            if is_valid_group(g, &members, q.core, q.group_size, q.target, friendship) {
                out.push(members);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn query_validation() {
        assert!(Query::new(UserId(1), 3, 2, 1).is_ok());
        assert!(Query::new(UserId(1), 2, 2, 1).is_err());
        assert!(Query::new(UserId(1), 3, 0, 1).is_err());
        assert!(Query::new(UserId(1), 3, 1, 0).is_err());
    }

    #[test]
    fn k4_pool_has_all_three_subsets_with_target() {
        let g = SocialGraph::from_edges(&clique(&[1, 2, 3, 4]));
        let q = Query::new(UserId(1), 3, 2, 1).unwrap();
        let pool = get_candidate_groups(&g, &users(&[1, 2, 3, 4]), 0, &q, &SearchOptions::default());
        assert_eq!(
            pool.member_sets(),
            vec![users(&[1, 2, 3]), users(&[1, 2, 4]), users(&[1, 3, 4])]
        );
        assert_eq!(pool.member_sets(), exhaustive(&g, &q, true));
    }

    #[test]
    fn small_component_gives_empty_pool() {
        let g = SocialGraph::from_edges(&clique(&[1, 2, 3]));
        let q = Query::new(UserId(1), 4, 2, 1).unwrap();
        assert!(get_candidate_groups(&g, &users(&[1, 2, 3]), 0, &q, &SearchOptions::default())
            .is_empty());
    }

    #[test]
    fn cap_is_honored() {
        let g = SocialGraph::from_edges(&clique(&[1, 2, 3, 4, 5]));
        let q = Query::new(UserId(1), 3, 2, 1).unwrap();
        let opts = SearchOptions { cap: 1, ..Default::default() };
        let pool = get_candidate_groups(&g, &users(&[1, 2, 3, 4, 5]), 0, &q, &opts);
        assert_eq!(pool.len(), 1);
        assert!(is_valid_group(&g, &pool.groups[0].members, 2, 3, UserId(1), true));
    }

    #[test]
    fn expansion_from_target_seed() {
        // Target 1 with neighbors 2, 3, 4; 2-3 adjacent.
        let e: Vec<(UserId, UserId)> = [(1, 2), (1, 3), (1, 4), (2, 3)]
            .iter()
            .map(|&(a, b)| (UserId(a), UserId(b)))
            .collect();
        let g = SocialGraph::from_edges(&e);
        let sub = InducedSubgraph::new(&g, 0..4);
        let seed = PartialGroup::seed(0);
        let sets = |v: Vec<PartialGroup>| v.into_iter().map(|p| p.members).collect::<Vec<_>>();

        // k = 1: all 2-subsets first, then all 1-subsets.
        let succ = sets(expand_group(&sub, &seed, 3, 1, None));
        assert_eq!(
            succ,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![0, 1], vec![0, 2], vec![0, 3]]
        );
        // k = 2: singletons cannot reach degree 2 for the expanded member.
        let succ = sets(expand_group(&sub, &seed, 3, 2, None));
        assert_eq!(succ, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3]]);

        // Full partial: nothing to do.
        let full = PartialGroup { members: vec![0, 1, 2], expanded: vec![] };
        assert!(expand_group(&sub, &full, 3, 1, None).is_empty());

        // Highest-degree unexpanded member is 0 (degree 3); once it is
        // expanded, member 3 has no outside neighbors left.
        let p = PartialGroup { members: vec![0, 3], expanded: vec![0] };
        assert!(expand_group(&sub, &p, 3, 1, None).is_empty());
    }

    #[test]
    fn expansion_picks_highest_degree_then_smallest_id() {
        // Path 1-2-3 plus 3-4: nodes 2 and 3 both have degree 2.
        let e: Vec<(UserId, UserId)> =
            [(1, 2), (2, 3), (3, 4)].iter().map(|&(a, b)| (UserId(a), UserId(b))).collect();
        let g = SocialGraph::from_edges(&e);
        let sub = InducedSubgraph::new(&g, 0..4);
        let p = PartialGroup { members: vec![1, 2], expanded: vec![] };
        let succ = expand_group(&sub, &p, 3, 1, None);
        // Node index 1 (user 2) is chosen; its only outside neighbor is index 0.
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].members, vec![0, 1, 2]);
        assert_eq!(succ[0].expanded, vec![1]);
    }

    #[test]
    fn candidate_pool_fails_fast_below_core() {
        let mut e = clique(&[1, 2, 3, 4, 5]);
        e.push((UserId(1), UserId(9)));
        let g = SocialGraph::from_edges(&e);
        let cores = core_decomposition(&g);
        let q = Query::new(UserId(9), 3, 2, 1).unwrap();
        assert!(candidate_pool(&g, &cores, &q, &SearchOptions::default()).unwrap().is_empty());
        let q = Query::new(UserId(42), 3, 2, 1).unwrap();
        assert!(matches!(
            candidate_pool(&g, &cores, &q, &SearchOptions::default()),
            Err(Error::UnknownUser(_))
        ));
        let q = Query::new(UserId(1), 3, 2, 1).unwrap();
        let pool = candidate_pool(&g, &cores, &q, &SearchOptions::default()).unwrap();
        assert_eq!(pool.len(), 6);
        assert!(pool.groups.iter().all(|c| c.contains(UserId(1))));
    }

    #[test]
    fn enumeration_is_complete_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(4..=10u64);
            let p: f64 = rng.gen_range(0.3..0.8);
            let mut e = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(p) {
                        e.push((UserId(a), UserId(b)));
                    }
                }
            }
            let g = SocialGraph::with_users((0..n).map(UserId), &e);
            let cores = core_decomposition(&g);
            for k in 1..=3 {
                for h in k + 1..=6 {
                    let q = Query::new(UserId(0), h, k, 1).unwrap();
                    let opts = SearchOptions { cap: usize::MAX, require_friendship: true };
                    let pool = candidate_pool(&g, &cores, &q, &opts).unwrap();
                    assert_eq!(pool.member_sets(), exhaustive(&g, &q, true), "k={k} h={h}");
                    let again = candidate_pool(&g, &cores, &q, &opts).unwrap();
                    assert_eq!(pool, again);
                }
            }
        }
    }

    #[test]
    fn relaxed_pool_members_are_valid_and_distinct() {
        let mut e = clique(&[1, 2, 3, 4]);
        e.extend(clique(&[3, 4, 5, 6]));
        let g = SocialGraph::from_edges(&e);
        let cores = core_decomposition(&g);
        let q = Query::new(UserId(1), 4, 2, 1).unwrap();
        let opts = SearchOptions { cap: usize::MAX, require_friendship: false };
        let pool = candidate_pool(&g, &cores, &q, &opts).unwrap();
        let strict = candidate_pool(&g, &cores, &q, &SearchOptions::default()).unwrap();
        assert!(pool.len() > strict.len());
        let mut sets = pool.member_sets();
        sets.dedup();
        assert_eq!(sets.len(), pool.len());
        for c in &pool.groups {
            assert!(is_valid_group(&g, &c.members, 2, 4, UserId(1), false));
        }
    }
}
