//! Topic preferences, the topic-gated influence function, and hard attention
//! over a pool of candidate groups.

use std::collections::BTreeMap;

use crate::groups::CandidatePool;
use crate::types::{CheckIn, PoiId, TopicId, UserId};

/// One user's topic distribution: normalized check-in frequency per topic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PreferenceRow {
    /// `(topic, p(topic, user))`, sorted by topic.
    entries: Vec<(TopicId, f64)>,
    norm: f64,
}

impl PreferenceRow {
    pub fn from_counts(counts: &BTreeMap<TopicId, u64>) -> Self {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Self::default();
        }
        let entries: Vec<(TopicId, f64)> = counts
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(&t, &n)| (t, n as f64 / total as f64))
            .collect();
        let norm = entries.iter().map(|(_, p)| p * p).sum::<f64>().sqrt();
        Self { entries, norm }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, t: TopicId) -> f64 {
        self.entries
            .binary_search_by_key(&t, |&(k, _)| k)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn entries(&self) -> &[(TopicId, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// p(t, u) for one user's check-ins. Check-ins at POIs without a known topic
/// are ignored.
pub fn topic_preference<'a, I, F>(checkins: I, topic_of: F) -> PreferenceRow
where
    I: IntoIterator<Item = &'a CheckIn>,
    F: Fn(PoiId) -> Option<TopicId>,
{
    let mut counts: BTreeMap<TopicId, u64> = BTreeMap::new();
    for c in checkins {
        if let Some(t) = topic_of(c.poi) {
            *counts.entry(t).or_default() += 1;
        }
    }
    PreferenceRow::from_counts(&counts)
}

/// Preference rows for every user with at least one check-in.
#[derive(Debug, Clone, Default)]
pub struct TopicPreferences {
    rows: BTreeMap<UserId, PreferenceRow>,
}

impl TopicPreferences {
    pub fn from_checkins<F>(checkins: &[CheckIn], topic_of: F) -> Self
    where
        F: Fn(PoiId) -> Option<TopicId>,
    {
        let mut counts: BTreeMap<UserId, BTreeMap<TopicId, u64>> = BTreeMap::new();
        for c in checkins {
            if let Some(t) = topic_of(c.poi) {
                *counts.entry(c.user).or_default().entry(t).or_default() += 1;
            }
        }
        let rows = counts
            .into_iter()
            .map(|(u, c)| (u, PreferenceRow::from_counts(&c)))
            .collect();
        Self { rows }
    }

    pub fn insert(&mut self, user: UserId, row: PreferenceRow) {
        self.rows.insert(user, row);
    }

    /// The user's row; users without history get the empty row.
    pub fn row(&self, u: UserId) -> &PreferenceRow {
        static EMPTY: PreferenceRow = PreferenceRow { entries: Vec::new(), norm: 0.0 };
        self.rows.get(&u).unwrap_or(&EMPTY)
    }

    /// σ(target, other) between two registered users.
    pub fn influence(&self, target: UserId, other: UserId) -> f64 {
        influence(self.row(target), self.row(other))
    }
}

/// Influence of the target on another user: the cosine of their preference
/// rows, where a shared topic contributes to the numerator only if the
/// target's preference for it is at least the other user's.
pub fn influence(target: &PreferenceRow, other: &PreferenceRow) -> f64 {
    if target.is_empty() || other.is_empty() {
        return 0.0;
    }
    let (a, b) = (&target.entries, &other.entries);
    let (mut i, mut j) = (0, 0);
    let mut num = 0.0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let (pt, po) = (a[i].1, b[j].1);
                if pt >= po {
                    num += pt * po;
                }
                i += 1;
                j += 1;
            }
        }
    }
    // Rounding can push identical rows a hair above 1.
    (num / (target.norm * other.norm)).clamp(0.0, 1.0)
}

/// Attention over every (group, non-target member) pair of a pool.
///
/// Indexing is `[j][i]`: group `j` of the pool, `i`-th non-target member in
/// id order.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionWeights {
    pub members: Vec<Vec<UserId>>,
    pub influence: Vec<Vec<f64>>,
    pub raw: Vec<Vec<f64>>,
    pub normalized: Vec<Vec<f64>>,
    pub group_score: Vec<f64>,
}

impl AttentionWeights {
    /// Normalizes already computed raw scores with one softmax across all
    /// pairs of all groups.
    pub fn from_raw(members: Vec<Vec<UserId>>, influence: Vec<Vec<f64>>, raw: Vec<Vec<f64>>) -> Self {
        let max = raw
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<Vec<f64>> = raw
            .iter()
            .map(|row| row.iter().map(|&a| (a - max).exp()).collect())
            .collect();
        let z: f64 = exp.iter().flatten().sum();
        let normalized: Vec<Vec<f64>> = exp
            .iter()
            .map(|row| row.iter().map(|&e| e / z).collect())
            .collect();
        let group_score = normalized.iter().map(|row| row.iter().sum()).collect();
        Self { members, influence, raw, normalized, group_score }
    }

    pub fn num_groups(&self) -> usize {
        self.group_score.len()
    }
}

/// Raw scores `w * σ(target, member) + c`, normalized over the whole pool.
pub fn attention_scores(
    pool: &CandidatePool,
    target: UserId,
    w: f64,
    c: f64,
    prefs: &TopicPreferences,
) -> AttentionWeights {
    let members: Vec<Vec<UserId>> = pool
        .groups
        .iter()
        .map(|g| g.others(target).collect())
        .collect();
    let influence: Vec<Vec<f64>> = members
        .iter()
        .map(|row| row.iter().map(|&u| prefs.influence(target, u)).collect())
        .collect();
    let raw = influence
        .iter()
        .map(|row| row.iter().map(|&s| w * s + c).collect())
        .collect();
    AttentionWeights::from_raw(members, influence, raw)
}

/// Hard attention: the group with the largest score, smallest index on ties.
/// Returns `None` for an empty pool.
pub fn select_group(weights: &AttentionWeights) -> Option<usize> {
    argmax(&weights.group_score)
}

pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::CandidateGroup;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn row(pairs: &[(u32, f64)]) -> PreferenceRow {
        // Scale to integer counts so from_counts reproduces the fractions.
        let counts = pairs
            .iter()
            .map(|&(t, p)| (TopicId(t), (p * 1000.0).round() as u64))
            .collect();
        PreferenceRow::from_counts(&counts)
    }

    fn ci(user: u64, poi: u64) -> CheckIn {
        CheckIn { user: UserId(user), poi: PoiId(poi), time: 0 }
    }

    #[test]
    fn preference_frequencies() {
        let topic = |p: PoiId| Some(TopicId(p.0 as u32 % 2));
        let r = topic_preference(&[ci(1, 2), ci(1, 4), ci(1, 6)], topic);
        assert_eq!(r.entries(), &[(TopicId(0), 1.0)]);
        let r = topic_preference(&[ci(1, 2), ci(1, 3), ci(1, 4), ci(1, 5)], topic);
        assert_eq!(r.get(TopicId(0)), 0.5);
        assert_eq!(r.get(TopicId(1)), 0.5);
        assert!(topic_preference(&[], topic).is_empty());
    }

    #[test]
    fn preferences_sum_to_one() {
        let topic = |p: PoiId| Some(TopicId((p.0 % 3) as u32));
        let checkins: Vec<CheckIn> = (0..17).map(|i| ci(i % 4, i * 7)).collect();
        let prefs = TopicPreferences::from_checkins(&checkins, topic);
        for u in 0..4 {
            let s: f64 = prefs.row(UserId(u)).entries().iter().map(|e| e.1).sum();
            assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        }
        assert!(prefs.row(UserId(99)).is_empty());
    }

    #[test]
    fn influence_cases() {
        let a = row(&[(0, 1.0)]);
        assert_eq!(influence(&a, &a), 1.0);
        assert_eq!(influence(&a, &row(&[(1, 1.0)])), 0.0);
        assert_eq!(influence(&a, &PreferenceRow::default()), 0.0);

        let t = row(&[(0, 0.8), (1, 0.2)]);
        let o = row(&[(0, 0.5), (1, 0.5)]);
        let expected = (0.8 * 0.5) / (0.68f64.sqrt() * 0.5f64.sqrt());
        assert_relative_eq!(influence(&t, &o), expected, epsilon = 1e-12);
    }

    fn pool(groups: &[&[u64]]) -> CandidatePool {
        CandidatePool {
            groups: groups
                .iter()
                .map(|g| CandidateGroup {
                    members: g.iter().copied().map(UserId).collect(),
                    component_id: 0,
                })
                .collect(),
            cap: 100,
        }
    }

    #[test]
    fn single_group_equal_influence() {
        let mut prefs = TopicPreferences::default();
        for u in 1..=3 {
            prefs.insert(UserId(u), row(&[(0, 1.0)]));
        }
        let w = attention_scores(&pool(&[&[1, 2, 3]]), UserId(1), 1.0, 0.0, &prefs);
        assert_eq!(w.normalized, vec![vec![0.5, 0.5]]);
        assert_relative_eq!(w.group_score[0], 1.0);
    }

    #[test]
    fn equal_influence_scores_follow_member_count() {
        let prefs = TopicPreferences::default();
        let w = attention_scores(&pool(&[&[1, 2, 3], &[1, 4, 5, 6]]), UserId(1), 1.0, 0.0, &prefs);
        assert_relative_eq!(w.group_score[0], 2.0 / 5.0, epsilon = 1e-12);
        assert_relative_eq!(w.group_score[1], 3.0 / 5.0, epsilon = 1e-12);
        assert_eq!(select_group(&w), Some(1));
    }

    #[test]
    fn softmax_of_zero_and_ln2() {
        let w = AttentionWeights::from_raw(
            vec![vec![UserId(2), UserId(3)]],
            vec![vec![0.0, 2f64.ln()]],
            vec![vec![0.0, 2f64.ln()]],
        );
        assert_relative_eq!(w.normalized[0][0], 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(w.normalized[0][1], 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn select_group_ties_and_order() {
        let mk = |s: Vec<f64>| AttentionWeights {
            members: vec![],
            influence: vec![],
            raw: vec![],
            normalized: vec![],
            group_score: s,
        };
        assert_eq!(select_group(&mk(vec![0.2, 0.5, 0.3])), Some(1));
        assert_eq!(select_group(&mk(vec![0.25; 4])), Some(0));
        assert_eq!(select_group(&mk(vec![])), None);
    }

    proptest! {
        #[test]
        fn softmax_sums_to_one_and_argmax_is_shift_invariant(
            raw in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 1..6), 1..8),
            shift in -50.0f64..50.0,
        ) {
            let members: Vec<Vec<UserId>> = raw.iter().map(|r| vec![UserId(0); r.len()]).collect();
            let w = AttentionWeights::from_raw(members.clone(), raw.clone(), raw.clone());
            let total: f64 = w.normalized.iter().flatten().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert!(w.normalized.iter().flatten().all(|&a| a > 0.0 && a <= 1.0));
            let shifted: Vec<Vec<f64>> =
                raw.iter().map(|r| r.iter().map(|a| a + shift).collect()).collect();
            let ws = AttentionWeights::from_raw(members, shifted.clone(), shifted);
            prop_assert_eq!(select_group(&w), select_group(&ws));
        }

        #[test]
        fn influence_is_bounded(
            a in proptest::collection::btree_map(0u32..6, 1u64..20, 1..6),
            b in proptest::collection::btree_map(0u32..6, 1u64..20, 1..6),
        ) {
            let ra = PreferenceRow::from_counts(&a.iter().map(|(&k, &v)| (TopicId(k), v)).collect());
            let rb = PreferenceRow::from_counts(&b.iter().map(|(&k, &v)| (TopicId(k), v)).collect());
            let s = influence(&ra, &rb);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!((influence(&ra, &ra) - 1.0).abs() < 1e-12);
            if a.keys().all(|k| !b.contains_key(k)) {
                prop_assert_eq!(s, 0.0);
            }
        }
    }
}
