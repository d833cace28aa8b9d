//! Undirected social graph in compressed sparse row form, with k-core
//! decomposition and the connectivity checks used by group search.

use std::collections::VecDeque;

use crate::types::UserId;

/// Friendship graph over users.
///
/// Nodes are addressed by a dense index (`usize`) assigned in ascending
/// [`UserId`] order, so iterating indices is iterating ids in order.
/// Adjacency lists are sorted and free of duplicates and self-loops.
#[derive(Debug, Clone, Default)]
pub struct SocialGraph {
    ids: Vec<UserId>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
}

impl SocialGraph {
    /// Builds the graph from raw edge pairs. Every endpoint is registered as
    /// a user, including endpoints of dropped self-loops.
    pub fn from_edges(edges: &[(UserId, UserId)]) -> Self {
        Self::with_users(std::iter::empty(), edges)
    }

    /// Builds the graph with an explicit user set in addition to edge endpoints.
    pub fn with_users<I>(users: I, edges: &[(UserId, UserId)]) -> Self
    where
        I: IntoIterator<Item = UserId>,
    {
        let mut ids: Vec<UserId> = users.into_iter().collect();
        ids.extend(edges.iter().flat_map(|&(a, b)| [a, b]));
        ids.sort_unstable();
        ids.dedup();

        let index = |u: UserId| ids.binary_search(&u).expect("endpoint registered") as u32;
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edges.len() * 2);
        for &(a, b) in edges {
            if a == b {
                continue;
            }
            let (ia, ib) = (index(a), index(b));
            pairs.push((ia, ib));
            pairs.push((ib, ia));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; ids.len() + 1];
        for &(a, _) in &pairs {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..ids.len() {
            offsets[i + 1] += offsets[i];
        }
        let adj = pairs.into_iter().map(|(_, b)| b).collect();
        Self { ids, offsets, adj }
    }

    pub fn num_users(&self) -> usize {
        self.ids.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn users(&self) -> &[UserId] {
        &self.ids
    }

    pub fn index_of(&self, u: UserId) -> Option<usize> {
        self.ids.binary_search(&u).ok()
    }

    pub fn contains(&self, u: UserId) -> bool {
        self.index_of(u).is_some()
    }

    pub fn user(&self, idx: usize) -> UserId {
        self.ids[idx]
    }

    pub fn neighbors(&self, idx: usize) -> &[u32] {
        &self.adj[self.offsets[idx]..self.offsets[idx + 1]]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.offsets[idx + 1] - self.offsets[idx]
    }

    /// Degree by id; unknown users have degree 0.
    pub fn degree_of(&self, u: UserId) -> usize {
        self.index_of(u).map_or(0, |i| self.degree(i))
    }

    pub fn neighbor_ids(&self, u: UserId) -> impl Iterator<Item = UserId> + '_ {
        let slice = match self.index_of(u) {
            Some(i) => self.neighbors(i),
            None => &[],
        };
        slice.iter().map(move |&j| self.ids[j as usize])
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn are_friends(&self, a: UserId, b: UserId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(ia), Some(ib)) => self.has_edge(ia, ib),
            _ => false,
        }
    }

    /// All undirected edges as `(a, b)` with `a < b`, in id order.
    pub fn edges(&self) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        (0..self.ids.len()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| (j as usize) > i)
                .map(move |&j| (self.ids[i], self.ids[j as usize]))
        })
    }
}

/// Core number of every user, indexed like the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreNumbers {
    core: Vec<u32>,
}

impl CoreNumbers {
    pub fn of_index(&self, idx: usize) -> u32 {
        self.core[idx]
    }

    pub fn get(&self, g: &SocialGraph, u: UserId) -> Option<u32> {
        g.index_of(u).map(|i| self.core[i])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.core
    }

    pub fn max_core(&self) -> u32 {
        self.core.iter().copied().max().unwrap_or(0)
    }
}

/// Batagelj–Zaversnik bucket peeling, O(|U| + |E|).
pub fn core_decomposition(g: &SocialGraph) -> CoreNumbers {
    let n = g.num_users();
    if n == 0 {
        return CoreNumbers { core: Vec::new() };
    }
    let mut deg: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d] = start of the block of vertices with current degree d in `vert`.
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut vert = vec![0usize; n];
    let mut pos = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                    pos[u] = pw;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    CoreNumbers { core: deg.into_iter().map(|d| d as u32).collect() }
}

/// A node-induced subgraph of a [`SocialGraph`].
#[derive(Debug, Clone)]
pub struct InducedSubgraph<'g> {
    graph: &'g SocialGraph,
    member: Vec<bool>,
    nodes: Vec<u32>,
}

impl<'g> InducedSubgraph<'g> {
    pub fn new<I: IntoIterator<Item = usize>>(graph: &'g SocialGraph, nodes: I) -> Self {
        let mut member = vec![false; graph.num_users()];
        for i in nodes {
            member[i] = true;
        }
        let nodes = member
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i as u32))
            .collect();
        Self { graph, member, nodes }
    }

    pub fn from_users(graph: &'g SocialGraph, users: &[UserId]) -> Self {
        Self::new(graph, users.iter().filter_map(|&u| graph.index_of(u)))
    }

    pub fn graph(&self) -> &'g SocialGraph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.member.get(idx).copied().unwrap_or(false)
    }

    /// Node indices in ascending order.
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().map(|&i| i as usize)
    }

    pub fn user_ids(&self) -> Vec<UserId> {
        self.nodes().map(|i| self.graph.user(i)).collect()
    }

    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph
            .neighbors(idx)
            .iter()
            .map(|&j| j as usize)
            .filter(move |&j| self.member[j])
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.neighbors(idx).count()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.nodes().map(|i| self.degree(i)).min()
    }
}

/// Subgraph induced on `{u : core(u) >= k}`.
pub fn k_core_subgraph<'g>(g: &'g SocialGraph, cores: &CoreNumbers, k: u32) -> InducedSubgraph<'g> {
    InducedSubgraph::new(g, (0..g.num_users()).filter(|&i| cores.of_index(i) >= k))
}

/// Connected components as sorted user-id lists, ordered by smallest member.
pub fn connected_components(sub: &InducedSubgraph<'_>) -> Vec<Vec<UserId>> {
    let g = sub.graph();
    let mut seen = vec![false; g.num_users()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in sub.nodes() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for u in sub.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp.into_iter().map(|i| g.user(i)).collect());
    }
    out
}

/// True when the induced subgraph on `members` is connected (empty sets are not).
pub fn is_connected(g: &SocialGraph, members: &[UserId]) -> bool {
    let sub = InducedSubgraph::from_users(g, members);
    if sub.is_empty() || sub.len() != members.len() {
        return false;
    }
    connected_components(&sub).len() == 1
}

/// Checks every candidate-group constraint for a target user:
/// size `h`, contains `target`, connected, induced min degree `>= k`, and
/// (unless `require_friendship` is false) every other member befriends `target`.
pub fn is_valid_group(
    g: &SocialGraph,
    members: &[UserId],
    k: usize,
    h: usize,
    target: UserId,
    require_friendship: bool,
) -> bool {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != members.len() || sorted.len() != h || sorted.binary_search(&target).is_err() {
        return false;
    }
    let sub = InducedSubgraph::from_users(g, &sorted);
    if sub.len() != h {
        return false;
    }
    if sub.min_degree().unwrap_or(0) < k {
        return false;
    }
    if require_friendship && sorted.iter().any(|&u| u != target && !g.are_friends(u, target)) {
        return false;
    }
    connected_components(&sub).len() == 1
}
