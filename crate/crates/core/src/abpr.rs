//! Attention-weighted Bayesian personalized ranking over activity topics.
//!
//! The predicted score of topic `v` for a group selected for target `t` is
//! `g · ⟨u_t, v⟩`, where `g` is the group's attention score inside its pool.
//! Training minimizes
//!
//! ```text
//! Σ_(pool, group, v_q, v_s)  −ln φ(g · ⟨u_t, v_q − v_s⟩)  +  λ‖Θ‖²
//! ```
//!
//! over `Θ = {user vectors, topic vectors, w, c}` with full-batch Adam, one
//! step per epoch.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::attention::{argmax, TopicPreferences};
use crate::error::{Error, Result};
use crate::types::{TopicId, UserId};

pub const DEFAULT_DIM: usize = 32;
pub const DEFAULT_NEG_RATIO: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub dim: usize,
    pub init_std: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { dim: DEFAULT_DIM, init_std: 0.1, l2: 1e-4, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub epochs: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { lr: 1e-2, beta1: 0.9, beta2: 0.999, eps: 1e-8, epochs: 200 }
    }
}

/// First and second moment estimates, shaped like the flat parameter vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
}

impl AdamState {
    fn new(n: usize) -> Self {
        Self { m: vec![0.0; n], v: vec![0.0; n], step: 0 }
    }

    fn update(&mut self, params: &mut [f64], grad: &[f64], cfg: &AdamConfig) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);
        for (((p, g), m), v) in params
            .iter_mut()
            .zip(grad)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
        }
    }
}

/// Latent user and topic vectors plus the scalar attention weight `w` and
/// bias `c`.
///
/// All trainable values live in one flat vector laid out as
/// `[user vectors | topic vectors | w | c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionModel {
    dim: usize,
    users: Vec<UserId>,
    topics: Vec<TopicId>,
    params: Vec<f64>,
    l2: f64,
    adam: AdamState,
}

impl AttentionModel {
    /// Gaussian-initialized vectors for the given users and topics; `w = 1`, `c = 0`.
    pub fn new<U, T>(users: U, topics: T, cfg: &ModelConfig) -> Self
    where
        U: IntoIterator<Item = UserId>,
        T: IntoIterator<Item = TopicId>,
    {
        let mut users: Vec<UserId> = users.into_iter().collect();
        users.sort_unstable();
        users.dedup();
        let mut topics: Vec<TopicId> = topics.into_iter().collect();
        topics.sort_unstable();
        topics.dedup();
        let n_vec = (users.len() + topics.len()) * cfg.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let normal = Normal::new(0.0, cfg.init_std).expect("finite std");
        let mut params: Vec<f64> = (0..n_vec).map(|_| normal.sample(&mut rng)).collect();
        params.push(1.0);
        params.push(0.0);
        let adam = AdamState::new(params.len());
        Self { dim: cfg.dim, users, topics, params, l2: cfg.l2, adam }
    }

    /// Rebuilds a model from stored parts. `user_vecs` and `topic_vecs` are
    /// row-major with `dim` columns.
    pub fn from_parts(
        dim: usize,
        users: Vec<UserId>,
        user_vecs: Vec<f64>,
        topics: Vec<TopicId>,
        topic_vecs: Vec<f64>,
        w: f64,
        c: f64,
        l2: f64,
    ) -> Result<Self> {
        if user_vecs.len() != users.len() * dim || topic_vecs.len() != topics.len() * dim {
            return Err(Error::Format("vector block sizes do not match dimension".into()));
        }
        if !users.windows(2).all(|p| p[0] < p[1]) || !topics.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::Format("ids must be strictly increasing".into()));
        }
        let mut params = user_vecs;
        params.extend(topic_vecs);
        params.push(w);
        params.push(c);
        let adam = AdamState::new(params.len());
        Ok(Self { dim, users, topics, params, l2, adam })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn users(&self) -> &[UserId] {
        &self.users
    }

    pub fn topics(&self) -> &[TopicId] {
        &self.topics
    }

    pub fn w(&self) -> f64 {
        self.params[self.params.len() - 2]
    }

    pub fn c(&self) -> f64 {
        self.params[self.params.len() - 1]
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn adam_state(&self) -> &AdamState {
        &self.adam
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Overwrites the flat parameter vector (same length required).
    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.params.len(), "parameter length mismatch");
        self.params.copy_from_slice(params);
    }

    pub fn param_norm_sq(&self) -> f64 {
        self.params.iter().map(|p| p * p).sum()
    }

    fn user_offset(&self, u: UserId) -> Option<usize> {
        self.users.binary_search(&u).ok().map(|i| i * self.dim)
    }

    fn topic_offset(&self, t: TopicId) -> Option<usize> {
        self.topics
            .binary_search(&t)
            .ok()
            .map(|i| (self.users.len() + i) * self.dim)
    }

    pub fn user_vec(&self, u: UserId) -> Option<&[f64]> {
        self.user_offset(u).map(|o| &self.params[o..o + self.dim])
    }

    pub fn topic_vec(&self, t: TopicId) -> Option<&[f64]> {
        self.topic_offset(t).map(|o| &self.params[o..o + self.dim])
    }

    /// `group_score · ⟨u_target, v_topic⟩`.
    pub fn predicted_score(&self, target: UserId, topic: TopicId, group_score: f64) -> Result<f64> {
        let v = self.topic_vec(topic).ok_or(Error::UnknownTopic(topic))?;
        let u = self.user_vec(target).ok_or(Error::UnknownUser(target))?;
        Ok(group_score * dot(u, v))
    }

    /// The highest-scoring candidate topic; smallest id on ties.
    pub fn select_topic(&self, target: UserId, group_score: f64, candidates: &[TopicId]) -> Result<TopicId> {
        let mut cands = candidates.to_vec();
        cands.sort_unstable();
        cands.dedup();
        if cands.is_empty() {
            return Err(Error::NoTopic);
        }
        let scores = cands
            .iter()
            .map(|&t| self.predicted_score(target, t, group_score))
            .collect::<Result<Vec<f64>>>()?;
        Ok(cands[argmax(&scores).expect("non-empty")])
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Topic pairs `(v_q, v_s)` for one group: `v_q` is visited by every member,
/// `v_s` by at most a strict subset. Each positive is paired with up to
/// `neg_ratio` negatives drawn uniformly without replacement (`0` keeps all).
pub fn build_pairs(
    members: &[UserId],
    visited: &BTreeMap<UserId, BTreeSet<TopicId>>,
    vocabulary: &[TopicId],
    neg_ratio: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(TopicId, TopicId)> {
    let empty = BTreeSet::new();
    let Some((first, rest)) = members.split_first() else { return Vec::new() };
    let mut common: BTreeSet<TopicId> = visited.get(first).unwrap_or(&empty).clone();
    for m in rest {
        let seen = visited.get(m).unwrap_or(&empty);
        common.retain(|t| seen.contains(t));
    }
    let mut vocab = vocabulary.to_vec();
    vocab.sort_unstable();
    vocab.dedup();
    let positives: Vec<TopicId> = vocab.iter().copied().filter(|t| common.contains(t)).collect();
    let negatives: Vec<TopicId> = vocab.iter().copied().filter(|t| !common.contains(t)).collect();
    let mut out = Vec::new();
    for &q in &positives {
        if neg_ratio == 0 || neg_ratio >= negatives.len() {
            out.extend(negatives.iter().map(|&s| (q, s)));
        } else {
            let mut picked: Vec<usize> = sample(rng, negatives.len(), neg_ratio).into_vec();
            picked.sort_unstable();
            out.extend(picked.into_iter().map(|i| (q, negatives[i])));
        }
    }
    out
}

/// All groups that share one target user; group scores are normalized
/// across this pool.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPool {
    pub target: UserId,
    /// σ(target, member) for the non-target members of each group.
    pub influence: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSample {
    pub pool: usize,
    pub group: usize,
    pub pos: TopicId,
    pub neg: TopicId,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingSet {
    pub pools: Vec<TrainingPool>,
    pub pairs: Vec<PairSample>,
}

impl TrainingSet {
    /// Every member of every group acts once as target. A target's pool is
    /// the list of groups it belongs to.
    pub fn from_groups(
        groups: &[Vec<UserId>],
        visited: &BTreeMap<UserId, BTreeSet<TopicId>>,
        vocabulary: &[TopicId],
        prefs: &TopicPreferences,
        neg_ratio: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut by_target: BTreeMap<UserId, Vec<usize>> = BTreeMap::new();
        let mut group_pairs = Vec::with_capacity(groups.len());
        for (gi, members) in groups.iter().enumerate() {
            let mut sorted = members.clone();
            sorted.sort_unstable();
            sorted.dedup();
            group_pairs.push(build_pairs(&sorted, visited, vocabulary, neg_ratio, &mut rng));
            for &m in &sorted {
                by_target.entry(m).or_default().push(gi);
            }
        }
        let mut set = TrainingSet::default();
        for (target, group_ids) in by_target {
            let pool_idx = set.pools.len();
            let mut influence = Vec::with_capacity(group_ids.len());
            for (local, &gi) in group_ids.iter().enumerate() {
                let mut others: Vec<UserId> = groups[gi].iter().copied().filter(|&u| u != target).collect();
                others.sort_unstable();
                others.dedup();
                influence.push(others.iter().map(|&u| prefs.influence(target, u)).collect());
                set.pairs.extend(group_pairs[gi].iter().map(|&(pos, neg)| PairSample {
                    pool: pool_idx,
                    group: local,
                    pos,
                    neg,
                }));
            }
            set.pools.push(TrainingPool { target, influence });
        }
        set
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Group scores `g_j` and their derivatives `∂g_j/∂w` within one pool.
fn pool_scores(influence: &[Vec<f64>], w: f64, c: f64) -> (Vec<f64>, Vec<f64>) {
    let max = influence
        .iter()
        .flatten()
        .map(|&s| w * s + c)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    let mut z_sigma = 0.0;
    let mut sums = Vec::with_capacity(influence.len());
    for row in influence {
        let mut s = 0.0;
        let mut s_sigma = 0.0;
        for &sigma in row {
            let e = (w * sigma + c - max).exp();
            s += e;
            s_sigma += e * sigma;
        }
        z += s;
        z_sigma += s_sigma;
        sums.push((s, s_sigma));
    }
    if z == 0.0 {
        return (vec![0.0; influence.len()], vec![0.0; influence.len()]);
    }
    let mu_all = z_sigma / z;
    sums.into_iter()
        .map(|(s, s_sigma)| {
            let g = s / z;
            let dg_dw = if s > 0.0 { g * (s_sigma / s - mu_all) } else { 0.0 };
            (g, dg_dw)
        })
        .unzip()
}

/// `−ln φ(x)`, computed without overflow.
fn neg_log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// φ(−x).
fn sigmoid_neg(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

fn check_set(model: &AttentionModel, set: &TrainingSet) -> Result<()> {
    for p in &set.pairs {
        let pool = set.pools.get(p.pool).ok_or_else(|| Error::Format("pair pool out of range".into()))?;
        if p.group >= pool.influence.len() {
            return Err(Error::Format("pair group out of range".into()));
        }
        if model.user_vec(pool.target).is_none() {
            return Err(Error::UnknownUser(pool.target));
        }
        for t in [p.pos, p.neg] {
            if model.topic_vec(t).is_none() {
                return Err(Error::UnknownTopic(t));
            }
        }
    }
    Ok(())
}

/// Objective value at the model's current parameters.
pub fn loss(model: &AttentionModel, set: &TrainingSet) -> Result<f64> {
    check_set(model, set)?;
    Ok(loss_unchecked(model, set, false).0)
}

/// Objective value and its gradient with respect to the flat parameter vector.
pub fn loss_and_grad(model: &AttentionModel, set: &TrainingSet) -> Result<(f64, Vec<f64>)> {
    check_set(model, set)?;
    let (l, g) = loss_unchecked(model, set, true);
    Ok((l, g.expect("gradient requested")))
}

fn loss_unchecked(model: &AttentionModel, set: &TrainingSet, want_grad: bool) -> (f64, Option<Vec<f64>>) {
    let (w, c) = (model.w(), model.c());
    let dim = model.dim;
    let n = model.params.len();
    let w_idx = n - 2;
    let mut grad = want_grad.then(|| vec![0.0; n]);
    let scores: Vec<(Vec<f64>, Vec<f64>)> =
        set.pools.iter().map(|p| pool_scores(&p.influence, w, c)).collect();

    let mut total = 0.0;
    for pair in &set.pairs {
        let pool = &set.pools[pair.pool];
        let (g, dg_dw) = (scores[pair.pool].0[pair.group], scores[pair.pool].1[pair.group]);
        let uo = model.user_offset(pool.target).expect("checked");
        let qo = model.topic_offset(pair.pos).expect("checked");
        let so = model.topic_offset(pair.neg).expect("checked");
        let p = &model.params;
        let diff: f64 = (0..dim).map(|d| p[uo + d] * (p[qo + d] - p[so + d])).sum();
        let x = g * diff;
        total += neg_log_sigmoid(x);
        if let Some(grad) = grad.as_mut() {
            let dl_dx = -sigmoid_neg(x);
            for d in 0..dim {
                let (u, vq, vs) = (p[uo + d], p[qo + d], p[so + d]);
                grad[uo + d] += dl_dx * g * (vq - vs);
                grad[qo + d] += dl_dx * g * u;
                grad[so + d] -= dl_dx * g * u;
            }
            grad[w_idx] += dl_dx * diff * dg_dw;
        }
    }

    let lambda = model.l2;
    total += lambda * model.param_norm_sq();
    if let Some(grad) = grad.as_mut() {
        for (gi, p) in grad.iter_mut().zip(&model.params) {
            *gi += 2.0 * lambda * p;
        }
    }
    (total, grad)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    /// Objective at the start of each epoch, before that epoch's update.
    pub epoch_loss: Vec<f64>,
    pub final_loss: f64,
}

/// Full-batch Adam; calls `on_epoch(epoch, loss)` after each loss evaluation.
pub fn train_with(
    model: &mut AttentionModel,
    set: &TrainingSet,
    cfg: &AdamConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<TrainReport> {
    if set.is_empty() {
        return Err(Error::NoTrainingData);
    }
    check_set(model, set)?;
    let mut report = TrainReport::default();
    for epoch in 0..cfg.epochs {
        let (l, grad) = loss_unchecked(model, set, true);
        report.epoch_loss.push(l);
        on_epoch(epoch, l);
        let grad = grad.expect("gradient requested");
        let mut adam = std::mem::take(&mut model.adam);
        adam.update(&mut model.params, &grad, cfg);
        model.adam = adam;
    }
    report.final_loss = loss_unchecked(model, set, false).0;
    Ok(report)
}

pub fn train(model: &mut AttentionModel, set: &TrainingSet, cfg: &AdamConfig) -> Result<TrainReport> {
    train_with(model, set, cfg, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn t(i: u32) -> TopicId {
        TopicId(i)
    }

    fn visited(rows: &[(u64, &[u32])]) -> BTreeMap<UserId, BTreeSet<TopicId>> {
        rows.iter()
            .map(|&(u, ts)| (UserId(u), ts.iter().copied().map(TopicId).collect()))
            .collect()
    }

    fn small_model(users: &[u64], topics: u32, seed: u64, l2: f64) -> AttentionModel {
        let cfg = ModelConfig { dim: 4, init_std: 0.3, l2, seed };
        AttentionModel::new(users.iter().copied().map(UserId), (0..topics).map(TopicId), &cfg)
    }

    #[test]
    fn predicted_score_cases() {
        let users = vec![UserId(1)];
        let topics = vec![t(0), t(1), t(2)];
        let m = AttentionModel::from_parts(
            2,
            users,
            vec![1.0, 0.0],
            topics,
            vec![1.0, 0.0, 0.0, 0.0, 2.5, 7.0],
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        assert_eq!(m.predicted_score(UserId(1), t(0), 1.0).unwrap(), 1.0);
        assert_eq!(m.predicted_score(UserId(1), t(1), 1.0).unwrap(), 0.0);
        assert_relative_eq!(m.predicted_score(UserId(1), t(2), 0.4).unwrap(), 1.0);
        assert!(matches!(m.predicted_score(UserId(1), t(9), 1.0), Err(Error::UnknownTopic(_))));
    }

    #[test]
    fn select_topic_cases() {
        let m = AttentionModel::from_parts(
            1,
            vec![UserId(1)],
            vec![1.0],
            vec![t(0), t(1), t(2)],
            vec![0.9, 0.1, 0.9],
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        assert_eq!(m.select_topic(UserId(1), 1.0, &[t(1)]).unwrap(), t(1));
        assert_eq!(m.select_topic(UserId(1), 1.0, &[t(1), t(0)]).unwrap(), t(0));
        assert_eq!(m.select_topic(UserId(1), 1.0, &[t(2), t(0)]).unwrap(), t(0));
        assert!(matches!(m.select_topic(UserId(1), 1.0, &[]), Err(Error::NoTopic)));
    }

    #[test]
    fn pairs_from_common_topics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = visited(&[(1, &[0]), (2, &[0])]);
        assert_eq!(build_pairs(&[UserId(1), UserId(2)], &v, &[t(0), t(1)], 4, &mut rng), vec![(t(0), t(1))]);

        let v = visited(&[(1, &[0]), (2, &[1])]);
        assert!(build_pairs(&[UserId(1), UserId(2)], &v, &[t(0), t(1)], 4, &mut rng).is_empty());

        // Two common topics, eight others: 4 negatives each.
        let v = visited(&[(1, &[0, 1, 2]), (2, &[0, 1, 3])]);
        let vocab: Vec<TopicId> = (0..10).map(TopicId).collect();
        let pairs = build_pairs(&[UserId(1), UserId(2)], &v, &vocab, 4, &mut rng);
        assert_eq!(pairs.len(), 8);
        for (q, s) in &pairs {
            assert!(q.0 <= 1 && s.0 >= 2);
        }
        let distinct: BTreeSet<_> = pairs.iter().collect();
        assert_eq!(distinct.len(), 8);
    }

    fn fixture(seed: u64, l2: f64) -> (AttentionModel, TrainingSet) {
        let groups = vec![
            vec![UserId(1), UserId(2), UserId(3)],
            vec![UserId(1), UserId(2)],
            vec![UserId(2), UserId(3)],
        ];
        let v = visited(&[(1, &[0, 1]), (2, &[0, 1]), (3, &[0])]);
        let mut prefs = TopicPreferences::default();
        let mk = |c: &[(u32, u64)]| {
            crate::attention::PreferenceRow::from_counts(&c.iter().map(|&(a, b)| (TopicId(a), b)).collect())
        };
        prefs.insert(UserId(1), mk(&[(0, 3), (1, 1)]));
        prefs.insert(UserId(2), mk(&[(0, 1), (1, 1)]));
        prefs.insert(UserId(3), mk(&[(0, 2)]));
        let set = TrainingSet::from_groups(&groups, &v, &[t(0), t(1)], &prefs, 4, seed);
        (small_model(&[1, 2, 3], 2, seed, l2), set)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for seed in 0..5 {
            let (mut model, set) = fixture(seed, 0.05);
            // Move w away from 1 so the pool softmax is not symmetric.
            let mut p = model.params().to_vec();
            let n = p.len();
            p[n - 2] = 1.7;
            p[n - 1] = 0.3;
            model.set_params(&p);
            let (_, grad) = loss_and_grad(&model, &set).unwrap();
            let h = 1e-5;
            for i in 0..n {
                let mut plus = p.clone();
                plus[i] += h;
                let mut minus = p.clone();
                minus[i] -= h;
                model.set_params(&plus);
                let lp = loss(&model, &set).unwrap();
                model.set_params(&minus);
                let lm = loss(&model, &set).unwrap();
                model.set_params(&p);
                let fd = (lp - lm) / (2.0 * h);
                let rel = (fd - grad[i]).abs() / fd.abs().max(grad[i].abs()).max(1e-5);
                assert!(rel < 1e-4, "param {i}: analytic {} vs fd {fd}", grad[i]);
            }
        }
    }

    #[test]
    fn single_pair_becomes_separated() {
        let mut m = small_model(&[1], 2, 3, 0.0);
        let set = TrainingSet {
            pools: vec![TrainingPool { target: UserId(1), influence: vec![vec![0.5]] }],
            pairs: vec![PairSample { pool: 0, group: 0, pos: t(0), neg: t(1) }],
        };
        let cfg = AdamConfig { epochs: 300, ..Default::default() };
        train(&mut m, &set, &cfg).unwrap();
        let a = m.predicted_score(UserId(1), t(0), 1.0).unwrap();
        let b = m.predicted_score(UserId(1), t(1), 1.0).unwrap();
        assert!(a > b, "{a} <= {b}");
    }

    #[test]
    fn heavy_regularization_shrinks_parameters() {
        let (mut m, set) = fixture(2, 50.0);
        let cfg = AdamConfig { lr: 1e-3, epochs: 1, ..Default::default() };
        let mut last = m.param_norm_sq();
        for _ in 0..40 {
            train(&mut m, &set, &cfg).unwrap();
            let now = m.param_norm_sq();
            assert!(now < last, "{now} >= {last}");
            last = now;
        }
    }

    #[test]
    fn loss_does_not_increase() {
        let (mut m, set) = fixture(4, 1e-3);
        let report = train(&mut m, &set, &AdamConfig { epochs: 150, ..Default::default() }).unwrap();
        for w in report.epoch_loss.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "{} -> {}", w[0], w[1]);
        }
        assert!(report.final_loss < report.epoch_loss[0]);
    }

    #[test]
    fn training_is_reproducible() {
        let run = || {
            let (mut m, set) = fixture(9, 1e-3);
            train(&mut m, &set, &AdamConfig { epochs: 20, ..Default::default() }).unwrap();
            m.params().to_vec()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn empty_training_set_is_an_error() {
        let mut m = small_model(&[1], 2, 0, 0.0);
        assert!(matches!(
            train(&mut m, &TrainingSet::default(), &AdamConfig::default()),
            Err(Error::NoTrainingData)
        ));
    }
}
