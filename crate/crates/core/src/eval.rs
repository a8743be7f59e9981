//! External clustering indices computed from a class-vs-cluster contingency
//! table, best-map accuracy, and a manifold alignment score.
//!
//! Entropies use natural logarithms. Every floating-point sum over table
//! cells is accumulated in sorted order, which makes the indices exactly
//! invariant under relabeling of classes or clusters.

use std::collections::BTreeMap;
use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A sequence of nonnegative integer labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Labeling(pub Vec<usize>);

impl Deref for Labeling {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Labeling {
    fn from(v: Vec<usize>) -> Self {
        Labeling(v)
    }
}

impl Labeling {
    pub fn distinct(&self) -> usize {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}

/// Joint counts of true classes (rows) and predicted clusters (columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    /// Row-major `rows x cols`.
    counts: Vec<u64>,
    rows: usize,
    cols: usize,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
    /// Original label value of each row / column, ascending.
    class_ids: Vec<usize>,
    cluster_ids: Vec<usize>,
}

fn dense_ids(labels: &[usize]) -> (Vec<usize>, BTreeMap<usize, usize>) {
    let ids: Vec<usize> = {
        let mut v = labels.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let index = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    (ids, index)
}

/// Builds the table of `truth` classes against `pred` clusters.
pub fn contingency(truth: &[usize], pred: &[usize]) -> Result<ContingencyTable> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            labels: pred.len(),
            points: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Empty("labeling"));
    }
    let (class_ids, class_ix) = dense_ids(truth);
    let (cluster_ids, cluster_ix) = dense_ids(pred);
    let (rows, cols) = (class_ids.len(), cluster_ids.len());
    let mut counts = vec![0u64; rows * cols];
    for (t, p) in truth.iter().zip(pred) {
        counts[class_ix[t] * cols + cluster_ix[p]] += 1;
    }
    Ok(ContingencyTable::from_counts(
        counts,
        rows,
        cols,
        class_ids,
        cluster_ids,
    ))
}

impl ContingencyTable {
    fn from_counts(
        counts: Vec<u64>,
        rows: usize,
        cols: usize,
        class_ids: Vec<usize>,
        cluster_ids: Vec<usize>,
    ) -> Self {
        let mut row_sums = vec![0u64; rows];
        let mut col_sums = vec![0u64; cols];
        for i in 0..rows {
            for j in 0..cols {
                let c = counts[i * cols + j];
                row_sums[i] += c;
                col_sums[j] += c;
            }
        }
        let n = row_sums.iter().sum();
        ContingencyTable {
            counts,
            rows,
            cols,
            row_sums,
            col_sums,
            n,
            class_ids,
            cluster_ids,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, class: usize, cluster: usize) -> u64 {
        self.counts[class * self.cols + cluster]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn class_ids(&self) -> &[usize] {
        &self.class_ids
    }

    pub fn cluster_ids(&self) -> &[usize] {
        &self.cluster_ids
    }

    /// Same table with the roles of classes and clusters swapped.
    pub fn transpose(&self) -> ContingencyTable {
        let mut counts = vec![0u64; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                counts[j * self.rows + i] = self.get(i, j);
            }
        }
        ContingencyTable::from_counts(
            counts,
            self.cols,
            self.rows,
            self.cluster_ids.clone(),
            self.class_ids.clone(),
        )
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.rows).flat_map(move |i| (0..self.cols).map(move |j| (i, j, self.get(i, j))))
    }

    /// Every row and every column has exactly one nonzero cell, i.e. the two
    /// labelings agree up to a renaming.
    pub fn is_relabeling(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let mut row_nz = vec![0usize; self.rows];
        let mut col_nz = vec![0usize; self.cols];
        for (i, j, c) in self.cells() {
            if c > 0 {
                row_nz[i] += 1;
                col_nz[j] += 1;
            }
        }
        row_nz.iter().chain(&col_nz).all(|&k| k == 1)
    }
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().fold(0.0, |acc, t| acc + t)
}

fn comb2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

struct PairCounts {
    /// Pairs together in both labelings.
    both: f64,
    /// Pairs together in the truth.
    truth: f64,
    /// Pairs together in the prediction.
    pred: f64,
    total: f64,
}

fn pair_counts(t: &ContingencyTable) -> PairCounts {
    let both: u128 = t.counts.iter().map(|&c| comb2(c)).sum();
    let truth: u128 = t.row_sums.iter().map(|&c| comb2(c)).sum();
    let pred: u128 = t.col_sums.iter().map(|&c| comb2(c)).sum();
    PairCounts {
        both: both as f64,
        truth: truth as f64,
        pred: pred as f64,
        total: comb2(t.n) as f64,
    }
}

/// Hubert–Arabie adjusted Rand index. Degenerate tables (expected index
/// equal to its maximum) score 1.
pub fn adjusted_rand_index(t: &ContingencyTable) -> f64 {
    let p = pair_counts(t);
    if p.total == 0.0 {
        return 1.0;
    }
    let expected = p.truth * p.pred / p.total;
    let max = (p.truth + p.pred) / 2.0;
    if max == expected {
        return 1.0;
    }
    (p.both - expected) / (max - expected)
}

fn entropy(marginals: &[u64], n: u64) -> f64 {
    let n = n as f64;
    let terms = marginals
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .collect();
    sorted_sum(terms)
}

/// `H(rows | cols)` when `given_cols`, else `H(cols | rows)`.
fn conditional_entropy(t: &ContingencyTable, given_cols: bool) -> f64 {
    let n = t.n as f64;
    let terms = t
        .cells()
        .filter(|&(_, _, c)| c > 0)
        .map(|(i, j, c)| {
            let marginal = if given_cols {
                t.col_sums[j]
            } else {
                t.row_sums[i]
            };
            let c = c as f64;
            -(c / n) * (c / marginal as f64).ln()
        })
        .collect();
    sorted_sum(terms)
}

/// `(homogeneity, completeness)`: `1 - H(C|K)/H(C)` and `1 - H(K|C)/H(K)`,
/// each defined as 1 when the corresponding marginal entropy is 0.
pub fn homogeneity_completeness(t: &ContingencyTable) -> (f64, f64) {
    let h_c = entropy(&t.row_sums, t.n);
    let h_k = entropy(&t.col_sums, t.n);
    let homogeneity = if h_c == 0.0 {
        1.0
    } else {
        1.0 - conditional_entropy(t, true) / h_c
    };
    let completeness = if h_k == 0.0 {
        1.0
    } else {
        1.0 - conditional_entropy(t, false) / h_k
    };
    (homogeneity, completeness)
}

pub fn v_measure(t: &ContingencyTable) -> f64 {
    let (h, c) = homogeneity_completeness(t);
    if h + c == 0.0 {
        0.0
    } else {
        2.0 * h * c / (h + c)
    }
}

pub fn mutual_info(t: &ContingencyTable) -> f64 {
    let n = t.n as f64;
    let terms = t
        .cells()
        .filter(|&(_, _, c)| c > 0)
        .map(|(i, j, c)| {
            let c = c as f64;
            let outer = t.row_sums[i] as f64 * t.col_sums[j] as f64;
            (c / n) * (n * c / outer).ln()
        })
        .collect();
    sorted_sum(terms)
}

/// `ln(k!)` for `k = 0..=n`.
fn log_factorials(n: u64) -> Vec<f64> {
    let mut lf = Vec::with_capacity(n as usize + 1);
    lf.push(0.0);
    let mut acc = 0.0f64;
    for k in 1..=n {
        acc += (k as f64).ln();
        lf.push(acc);
    }
    lf
}

/// Expected mutual information of two labelings with the table's marginals
/// under the hypergeometric (permutation) model.
pub fn expected_mutual_info(t: &ContingencyTable) -> f64 {
    let n = t.n;
    let lf = log_factorials(n);
    let nf = n as f64;
    let mut terms = Vec::new();
    for &a in &t.row_sums {
        for &b in &t.col_sums {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let x = nij as f64;
                let weight = (x / nf) * (nf * x / (a as f64 * b as f64)).ln();
                let log_p = (lf[a as usize] + lf[b as usize])
                    + (lf[(n - a) as usize] + lf[(n - b) as usize])
                    - lf[n as usize]
                    - lf[nij as usize]
                    - (lf[(a - nij) as usize] + lf[(b - nij) as usize])
                    - lf[(n + nij - a - b) as usize];
                terms.push(weight * log_p.exp());
            }
        }
    }
    sorted_sum(terms)
}

/// Adjusted mutual information with arithmetic-mean normalization:
/// `(MI - E[MI]) / (mean(H(C), H(K)) - E[MI])`.
///
/// Labelings equal up to renaming score exactly 1; a zero denominator
/// otherwise scores 0.
pub fn adjusted_mutual_info(t: &ContingencyTable) -> f64 {
    if t.is_relabeling() {
        return 1.0;
    }
    let mi = mutual_info(t);
    let emi = expected_mutual_info(t);
    let h_c = entropy(&t.row_sums, t.n);
    let h_k = entropy(&t.col_sums, t.n);
    let denom = (h_c + h_k) / 2.0 - emi;
    if denom == 0.0 {
        return 0.0;
    }
    (mi - emi) / denom
}

/// Fowlkes–Mallows index `TP / sqrt((TP + FP)(TP + FN))` over point pairs;
/// 0 when no pair is co-clustered in both labelings.
pub fn fowlkes_mallows(t: &ContingencyTable) -> f64 {
    let p = pair_counts(t);
    if p.both == 0.0 {
        return 0.0;
    }
    p.both / (p.truth * p.pred).sqrt()
}

/// All indices reported for a clustering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusteringScores {
    pub ari: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
    pub ami: f64,
    pub fmi: f64,
    pub best_map_accuracy: f64,
}

pub fn score_all(truth: &[usize], pred: &[usize]) -> Result<ClusteringScores> {
    let t = contingency(truth, pred)?;
    let (homogeneity, completeness) = homogeneity_completeness(&t);
    Ok(ClusteringScores {
        ari: adjusted_rand_index(&t),
        homogeneity,
        completeness,
        v_measure: v_measure(&t),
        ami: adjusted_mutual_info(&t),
        fmi: fowlkes_mallows(&t),
        best_map_accuracy: best_map(&t)?.accuracy,
    })
}

/// Largest label count accepted by [`best_map_accuracy`].
pub const MAX_MAP_LABELS: usize = 64;
/// Up to this many labels the mapping is found by exhaustive search.
pub const EXHAUSTIVE_MAP_LABELS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestMap {
    pub accuracy: f64,
    pub correct: u64,
    /// For each cluster (by original id), the class id it is mapped to, if any.
    pub mapping: Vec<(usize, Option<usize>)>,
}

/// Square weight matrix `w[cluster][class]`, zero-padded.
fn map_weights(t: &ContingencyTable) -> (usize, Vec<i64>) {
    let size = t.rows.max(t.cols);
    let mut w = vec![0i64; size * size];
    for (i, j, c) in t.cells() {
        w[j * size + i] = c as i64;
    }
    (size, w)
}

fn finish_map(t: &ContingencyTable, size: usize, w: &[i64], assign: &[usize]) -> BestMap {
    let correct: i64 = assign
        .iter()
        .enumerate()
        .map(|(r, &c)| w[r * size + c])
        .sum();
    let mapping = (0..t.cols)
        .map(|j| {
            (
                t.cluster_ids[j],
                (assign[j] < t.rows).then(|| t.class_ids[assign[j]]),
            )
        })
        .collect();
    BestMap {
        accuracy: correct as f64 / t.n as f64,
        correct: correct as u64,
        mapping,
    }
}

/// Optimal injective cluster-to-class mapping: exhaustive search for at
/// most 8 labels, Hungarian method above.
pub fn best_map(t: &ContingencyTable) -> Result<BestMap> {
    let size = t.rows.max(t.cols);
    if size > MAX_MAP_LABELS {
        return Err(Error::TooManyLabels(size));
    }
    if size <= EXHAUSTIVE_MAP_LABELS {
        best_map_exhaustive(t)
    } else {
        best_map_hungarian(t)
    }
}

pub fn best_map_accuracy(truth: &[usize], pred: &[usize]) -> Result<f64> {
    Ok(best_map(&contingency(truth, pred)?)?.accuracy)
}

pub fn best_map_hungarian(t: &ContingencyTable) -> Result<BestMap> {
    let (size, w) = map_weights(t);
    if size > MAX_MAP_LABELS {
        return Err(Error::TooManyLabels(size));
    }
    let assign = max_weight_assignment(size, &w);
    Ok(finish_map(t, size, &w, &assign))
}

pub fn best_map_exhaustive(t: &ContingencyTable) -> Result<BestMap> {
    let (size, w) = map_weights(t);
    if size > EXHAUSTIVE_MAP_LABELS {
        return Err(Error::TooManyLabels(size));
    }
    let mut perm: Vec<usize> = (0..size).collect();
    let mut best = perm.clone();
    let mut best_score = i64::MIN;
    permute(&mut perm, 0, &mut |p| {
        let s: i64 = p.iter().enumerate().map(|(r, &c)| w[r * size + c]).sum();
        if s > best_score {
            best_score = s;
            best.copy_from_slice(p);
        }
    });
    Ok(finish_map(t, size, &w, &best))
}

fn permute(p: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Hungarian method (shortest augmenting paths with potentials) on a square
/// `size x size` weight matrix; returns the column assigned to each row in
/// a maximum-weight perfect matching.
pub fn max_weight_assignment(size: usize, w: &[i64]) -> Vec<usize> {
    assert_eq!(w.len(), size * size);
    if size == 0 {
        return Vec::new();
    }
    let max = *w.iter().max().unwrap();
    let cost = |r: usize, c: usize| max - w[r * size + c];
    const INF: i64 = i64::MAX / 4;
    // 1-based potentials; column 0 is the virtual start
    let mut u = vec![0i64; size + 1];
    let mut v = vec![0i64; size + 1];
    let mut owner = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for row in 1..=size {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![INF; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = INF;
            let mut col1 = 0;
            for c in 1..=size {
                if used[c] {
                    continue;
                }
                let cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
                if cur < minv[c] {
                    minv[c] = cur;
                    way[c] = col0;
                }
                if minv[c] < delta {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for c in 0..=size {
                if used[c] {
                    u[owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; size];
    for c in 1..=size {
        assign[owner[c] - 1] = c - 1;
    }
    assign
}

/// Unweighted mean over clusters `0..=max(labels)` of the population
/// variance (divisor = cluster size) of `t` within each cluster.
pub fn manifold_alignment<F: Scalar>(t: &[F], labels: &[usize]) -> Result<F> {
    if t.len() != labels.len() {
        return Err(Error::LengthMismatch {
            labels: labels.len(),
            points: t.len(),
        });
    }
    let Some(&max) = labels.iter().max() else {
        return Err(Error::Empty("labeling"));
    };
    let k = max + 1;
    let mut sums = vec![F::zero(); k];
    let mut counts = vec![0usize; k];
    for (&v, &l) in t.iter().zip(labels) {
        sums[l] += v;
        counts[l] += 1;
    }
    if let Some(j) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyCluster(j));
    }
    let means: Vec<F> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| s / F::from_count(c))
        .collect();
    let mut sq = vec![F::zero(); k];
    for (&v, &l) in t.iter().zip(labels) {
        let d = v - means[l];
        sq[l] += d * d;
    }
    let total: F = sq
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| s / F::from_count(c))
        .sum();
    Ok(total / F::from_count(k))
}
