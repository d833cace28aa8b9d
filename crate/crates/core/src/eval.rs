//! Group and location precision, nDCG, and the grid experiment runner.

use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::Query;
use crate::ingest::GroupEvent;
use crate::pipeline::Recommender;
use crate::types::{PoiId, UserId};

/// `|rec ∩ truth| / |rec|`; an empty recommendation scores 0.
pub fn overlap_ratio<T: Ord>(recommended: &[T], truth: &BTreeSet<T>) -> f64 {
    let rec: BTreeSet<&T> = recommended.iter().collect();
    if rec.is_empty() {
        return 0.0;
    }
    rec.iter().filter(|x| truth.contains(x)).count() as f64 / rec.len() as f64
}

fn mean_over_truth<T: Ord>(recommended: &[Vec<T>], truth: &[Option<BTreeSet<T>>]) -> Option<f64> {
    assert_eq!(recommended.len(), truth.len(), "one truth entry per recommendation");
    let (sum, n) = recommended
        .iter()
        .zip(truth)
        .filter_map(|(r, t)| t.as_ref().map(|t| overlap_ratio(r, t)))
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mean group precision over targets that have a truth group. `None` when
/// no target has one.
pub fn precision_at_h(recommended: &[Vec<UserId>], truth: &[Option<BTreeSet<UserId>>]) -> Option<f64> {
    mean_over_truth(recommended, truth)
}

/// Mean location precision over targets with truth locations.
pub fn precision_at_k(recommended: &[Vec<PoiId>], truth: &[Option<BTreeSet<PoiId>>]) -> Option<f64> {
    mean_over_truth(recommended, truth)
}

fn dcg(rel: &[bool]) -> f64 {
    let mut total = 0.0;
    for (pos, &r) in rel.iter().enumerate() {
        if r {
            total += if pos == 0 { 1.0 } else { 1.0 / ((pos + 1) as f64).log2() };
        }
    }
    total
}

/// DCG over MaxDCG for the first `k` flags. The first position counts in
/// full and position `i >= 2` is divided by `log2(i)`. No relevant items
/// gives 0.
pub fn ndcg_at_k(rel: &[bool], k: usize) -> f64 {
    let rel = &rel[..rel.len().min(k)];
    let hits = rel.iter().filter(|&&r| r).count();
    if hits == 0 {
        return 0.0;
    }
    let ideal: Vec<bool> = (0..rel.len()).map(|i| i < hits).collect();
    dcg(rel) / dcg(&ideal)
}

/// Grid and sampling settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub n_targets: usize,
    pub seed: u64,
    pub k_range: Vec<usize>,
    pub h_range: Vec<usize>,
    pub top_k_range: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_targets: 100,
            seed: 0,
            k_range: (1..=5).collect(),
            h_range: (2..=10).collect(),
            top_k_range: vec![5, 10],
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_targets == 0 {
            return Err(Error::InvalidQuery("eval.n_targets must be positive".into()));
        }
        if self.k_range.is_empty() || self.h_range.is_empty() || self.top_k_range.is_empty() {
            return Err(Error::InvalidQuery("evaluation ranges must not be empty".into()));
        }
        if self.k_range.contains(&0) || self.top_k_range.contains(&0) {
            return Err(Error::InvalidQuery("k and K values must be positive".into()));
        }
        Ok(())
    }
}

/// Metrics for one `(k, h, K)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub k: usize,
    pub h: usize,
    pub top_k: usize,
    pub pre_at_h: Option<f64>,
    pub pre_at_k: Option<f64>,
    pub ndcg_at_k: Option<f64>,
    /// Targets contributing to the averages.
    pub n: usize,
    /// Targets dropped because the pipeline failed for them.
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub cells: Vec<CellReport>,
    pub n_targets: usize,
    pub seed: u64,
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

impl MetricReport {
    /// `k,h,K,metric,value,n`; undefined values are written as `NA`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,h,K,metric,value,n\n");
        for c in &self.cells {
            for (name, v) in [("pre_at_h", c.pre_at_h), ("pre_at_k", c.pre_at_k), ("ndcg_at_k", c.ndcg_at_k)] {
                s.push_str(&format!("{},{},{},{},{},{}\n", c.k, c.h, c.top_k, name, fmt_value(v), c.n));
            }
        }
        s
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "targets: {}  seed: {}", self.n_targets, self.seed)?;
        writeln!(f, "{:>3} {:>3} {:>3} {:>9} {:>9} {:>9} {:>5} {:>6}", "k", "h", "K", "Pre@h", "Pre@K", "nDCG@K", "n", "failed")?;
        for c in &self.cells {
            writeln!(
                f,
                "{:>3} {:>3} {:>3} {:>9} {:>9} {:>9} {:>5} {:>6}",
                c.k,
                c.h,
                c.top_k,
                fmt_value(c.pre_at_h),
                fmt_value(c.pre_at_k),
                fmt_value(c.ndcg_at_k),
                c.n,
                c.failed
            )?;
        }
        Ok(())
    }
}

/// Ground truth for one target user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truth {
    pub target: UserId,
    /// Members of the earliest test event containing the target.
    pub group: BTreeSet<UserId>,
    /// Venues of every test event containing the target.
    pub locations: BTreeSet<PoiId>,
}

/// Samples up to `n` distinct targets among users of the test events, then
/// returns them in id order with their truth.
pub fn sample_targets(test: &[GroupEvent], n: usize, seed: u64) -> Vec<Truth> {
    let users: Vec<UserId> = test
        .iter()
        .flat_map(|e| e.members.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<UserId> = rand::seq::index::sample(&mut rng, users.len(), n.min(users.len()))
        .into_iter()
        .map(|i| users[i])
        .collect();
    picked.sort_unstable();
    picked
        .into_iter()
        .map(|target| {
            let mine: Vec<&GroupEvent> = test.iter().filter(|e| e.contains(target)).collect();
            let first = mine
                .iter()
                .min_by(|a, b| (a.time, a.poi, &a.members).cmp(&(b.time, b.poi, &b.members)))
                .expect("sampled from test members");
            Truth {
                target,
                group: first.members.iter().copied().collect(),
                locations: mine.iter().map(|e| e.poi).collect(),
            }
        })
        .collect()
}

enum Outcome {
    Answered { group: Vec<UserId>, locations: Vec<PoiId> },
    Failed,
}

/// Runs every grid cell for every sampled target. Targets run in parallel
/// on the current rayon pool; results are reduced in target order.
pub fn run_experiment(rec: &Recommender<'_>, test: &[GroupEvent], cfg: &ExperimentConfig) -> Result<MetricReport> {
    cfg.validate()?;
    let truths = sample_targets(test, cfg.n_targets, cfg.seed);
    let mut cells = Vec::new();
    for &k in &cfg.k_range {
        for &h in &cfg.h_range {
            if h < k + 1 {
                continue;
            }
            let max_k = *cfg.top_k_range.iter().max().expect("validated");
            let outcomes: Vec<Outcome> = truths
                .par_iter()
                .map(|t| match rec.recommend(&Query { target: t.target, group_size: h, core: k, top_k: max_k }) {
                    Ok(r) => Outcome::Answered { group: r.group, locations: r.locations.ids() },
                    Err(Error::EmptyResult) => Outcome::Answered { group: Vec::new(), locations: Vec::new() },
                    Err(_) => Outcome::Failed,
                })
                .collect();
            for &top_k in &cfg.top_k_range {
                let mut groups = Vec::new();
                let mut group_truth = Vec::new();
                let mut locs = Vec::new();
                let mut loc_truth = Vec::new();
                let mut ndcg_sum = 0.0;
                let mut failed = 0;
                for (t, o) in truths.iter().zip(&outcomes) {
                    let Outcome::Answered { group, locations } = o else {
                        failed += 1;
                        continue;
                    };
                    let top: Vec<PoiId> = locations.iter().take(top_k).copied().collect();
                    let rel: Vec<bool> = top.iter().map(|p| t.locations.contains(p)).collect();
                    ndcg_sum += ndcg_at_k(&rel, top_k);
                    groups.push(group.clone());
                    group_truth.push(Some(t.group.clone()));
                    locs.push(top);
                    loc_truth.push(Some(t.locations.clone()));
                }
                let n = groups.len();
                cells.push(CellReport {
                    k,
                    h,
                    top_k,
                    pre_at_h: precision_at_h(&groups, &group_truth),
                    pre_at_k: precision_at_k(&locs, &loc_truth),
                    ndcg_at_k: (n > 0).then(|| ndcg_sum / n as f64),
                    n,
                    failed,
                });
            }
        }
    }
    Ok(MetricReport { cells, n_targets: truths.len(), seed: cfg.seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn users(ids: &[u64]) -> Vec<UserId> {
        ids.iter().copied().map(UserId).collect()
    }

    fn set(ids: &[u64]) -> BTreeSet<UserId> {
        users(ids).into_iter().collect()
    }

    /// Straight transcription of the gain formula with explicit sums.
    fn direct_ndcg(rel: &[u8], k: usize) -> f64 {
        let rel = &rel[..rel.len().min(k)];
        let gain = |r: &[u8]| {
            let mut s = 0.0;
            for i in 1..=r.len() {
                let g = r[i - 1] as f64;
                s += if i == 1 { g } else { g / (i as f64).log2() };
            }
            s
        };
        let mut ideal = rel.to_vec();
        ideal.sort_unstable_by(|a, b| b.cmp(a));
        let max = gain(&ideal);
        if max == 0.0 {
            0.0
        } else {
            gain(rel) / max
        }
    }

    #[test]
    fn ndcg_fixed_cases() {
        assert_eq!(ndcg_at_k(&[true, true, true], 3), 1.0);
        assert_eq!(ndcg_at_k(&[false, false, false], 3), 0.0);
        // [0,1,0,0,1]: DCG = 1/log2(2) + 1/log2(5); ideal = 1 + 1/log2(2) = 2.
        let want = (1.0 + 1.0 / 5f64.log2()) / 2.0;
        assert!((ndcg_at_k(&[false, true, false, false, true], 5) - want).abs() < 1e-15);
        // Positions 1 and 2 carry the same weight.
        assert_eq!(ndcg_at_k(&[false, true], 2), 1.0);
    }

    #[test]
    fn ndcg_matches_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let len = rng.gen_range(0..=20);
            let rel: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
            let k = rng.gen_range(1..=20);
            let flags: Vec<bool> = rel.iter().map(|&r| r == 1).collect();
            assert_eq!(ndcg_at_k(&flags, k), direct_ndcg(&rel, k));
        }
    }

    #[test]
    fn precision_cases() {
        assert_eq!(precision_at_h(&[users(&[1, 2, 3, 4, 5])], &[Some(set(&[1, 2, 3, 4, 5]))]), Some(1.0));
        assert_eq!(precision_at_h(&[users(&[1, 2, 3, 4, 5])], &[Some(set(&[6, 7, 8, 9, 10]))]), Some(0.0));
        assert_eq!(precision_at_h(&[users(&[1, 2, 3, 4, 5])], &[Some(set(&[1, 2, 3, 8, 9]))]), Some(0.6));
        // Targets without truth are skipped.
        assert_eq!(precision_at_h(&[users(&[1, 2]), users(&[3, 4])], &[None, Some(set(&[3]))]), Some(0.5));
        assert_eq!(precision_at_h(&[users(&[1, 2])], &[None]), None);
        // Empty recommendation counts as zero.
        assert_eq!(precision_at_h(&[vec![], users(&[1, 2])], &[Some(set(&[1])), Some(set(&[1, 2]))]), Some(0.5));
        let p = |ids: &[u64]| ids.iter().copied().map(PoiId).collect::<Vec<_>>();
        let truth = Some(p(&[7]).into_iter().collect::<BTreeSet<_>>());
        assert_eq!(precision_at_k(&[p(&[7, 1, 2, 3])], &[truth.clone()]), Some(0.25));
        assert_eq!(precision_at_k(&[p(&[1, 2])], &[truth]), Some(0.0));
        assert_eq!(precision_at_k(&[], &[]), None);
    }

    #[test]
    fn member_order_does_not_matter() {
        let truth = [Some(set(&[1, 3, 5]))];
        assert_eq!(
            precision_at_h(&[users(&[5, 4, 3, 2, 1])], &truth),
            precision_at_h(&[users(&[1, 2, 3, 4, 5])], &truth)
        );
    }

    #[test]
    fn sampling_is_seeded() {
        let ev = |t: i64, poi: u64, m: &[u64]| GroupEvent { members: users(m), poi: PoiId(poi), time: t };
        let test: Vec<GroupEvent> = (0..30).map(|i| ev(i, i as u64 % 4, &[i as u64, i as u64 + 1])).collect();
        let a = sample_targets(&test, 10, 1);
        assert_eq!(a, sample_targets(&test, 10, 1));
        assert_ne!(a, sample_targets(&test, 10, 2));
        assert_eq!(a.len(), 10);
        let t5 = sample_targets(&test, 100, 0).into_iter().find(|t| t.target == UserId(5)).unwrap();
        assert_eq!(t5.group, set(&[4, 5]));
        assert_eq!(t5.locations, [PoiId(0), PoiId(1)].into_iter().collect());
    }

    #[test]
    fn csv_layout() {
        let cell = |k, h| CellReport { k, h, top_k: 5, pre_at_h: Some(0.5), pre_at_k: None, ndcg_at_k: Some(1.0), n: 3, failed: 0 };
        let r = MetricReport { cells: vec![cell(1, 2), cell(1, 3)], n_targets: 3, seed: 0 };
        let csv = r.to_csv();
        assert!(csv.starts_with("k,h,K,metric,value,n\n1,2,5,pre_at_h,0.500000,3\n1,2,5,pre_at_k,NA,3\n"));
        for m in ["pre_at_h", "pre_at_k", "ndcg_at_k"] {
            assert_eq!(csv.lines().filter(|l| l.contains(m)).count(), 2);
        }
    }

    #[test]
    fn zero_targets_is_invalid() {
        let cfg = ExperimentConfig { n_targets: 0, ..ExperimentConfig::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidQuery(_))));
    }
}
