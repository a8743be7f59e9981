//! K-nearest-neighbours classification under either metric.
//!
//! Neighbours are ranked by distance, then by training index. The predicted
//! label is the plain majority among the `k` nearest; a vote tie goes to the
//! smallest label value.

use std::collections::BTreeMap;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metric::MetricKind;
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    LeaveOneOut,
    KFold { folds: usize, seed: u64 },
    HoldOut { fraction: f64, seed: u64 },
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Protocol::LeaveOneOut => write!(f, "leave-one-out"),
            Protocol::KFold { folds, seed } => write!(f, "{folds}-fold (seed {seed})"),
            Protocol::HoldOut { fraction, seed } => write!(f, "hold-out {fraction} (seed {seed})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: MetricKind,
    pub protocol: Protocol,
}

impl KnnConfig {
    pub fn new(k: usize, metric: MetricKind) -> Self {
        KnnConfig {
            k,
            metric,
            protocol: Protocol::LeaveOneOut,
        }
    }

    pub fn with_protocol(mut self, protocol: Protocol) -> Self {
        self.protocol = protocol;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        match self.protocol {
            Protocol::KFold { folds, .. } if folds < 2 => Err(Error::InvalidConfig(format!(
                "need at least 2 folds, got {folds}"
            ))),
            Protocol::HoldOut { fraction, .. } if !(fraction > 0.0 && fraction < 1.0) => {
                Err(Error::InvalidConfig(format!(
                    "hold-out fraction must be in (0, 1), got {fraction}"
                )))
            }
            _ => Ok(()),
        }
    }
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig::new(5, MetricKind::Euclidean)
    }
}

/// Majority label among the `k` nearest of `candidates` to `query`.
fn vote<F, P>(
    points: &[P],
    labels: &[usize],
    candidates: &[usize],
    query: &[F],
    k: usize,
    metric: MetricKind,
) -> usize
where
    F: Scalar,
    P: AsRef<[F]>,
{
    let mut ranked: Vec<(F, usize)> = candidates
        .iter()
        .map(|&j| (metric.eval(query, points[j].as_ref()), j))
        .collect();
    let order = |a: &(F, usize), b: &(F, usize)| {
        a.0.partial_cmp(&b.0)
            .expect("finite distances")
            .then(a.1.cmp(&b.1))
    };
    if k < ranked.len() {
        ranked.select_nth_unstable_by(k - 1, order);
        ranked.truncate(k);
    }
    let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
    for &(_, j) in &ranked {
        *tally.entry(labels[j]).or_default() += 1;
    }
    let mut best = (0usize, 0usize);
    for (label, count) in tally {
        if count > best.1 {
            best = (label, count);
        }
    }
    best.0
}

fn check_shapes<F: Scalar, P: AsRef<[F]>>(
    points: &[P],
    labels: &[usize],
    metric: MetricKind,
) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if labels.len() != points.len() {
        return Err(Error::LengthMismatch {
            labels: labels.len(),
            points: points.len(),
        });
    }
    let m = points[0].as_ref().len();
    metric.check_dim(m)?;
    if let Some(p) = points.iter().find(|p| p.as_ref().len() != m) {
        return Err(Error::DimensionMismatch {
            left: m,
            right: p.as_ref().len(),
        });
    }
    Ok(m)
}

/// Predicts the label of `query` from a labelled training set.
pub fn knn_classify<F, P>(
    train_points: &[P],
    train_labels: &[usize],
    query: &[F],
    config: &KnnConfig,
) -> Result<usize>
where
    F: Scalar,
    P: AsRef<[F]>,
{
    config.validate()?;
    let m = check_shapes(train_points, train_labels, config.metric)?;
    if query.len() != m {
        return Err(Error::DimensionMismatch {
            left: m,
            right: query.len(),
        });
    }
    if config.k > train_points.len() {
        return Err(Error::TooFewPoints {
            k: config.k,
            n: train_points.len(),
        });
    }
    let all: Vec<usize> = (0..train_points.len()).collect();
    Ok(vote(
        train_points,
        train_labels,
        &all,
        query,
        config.k,
        config.metric,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnnReport {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// One entry per fold; leave-one-out reports a single aggregate entry.
    pub folds: Vec<FoldResult>,
    pub config: KnnConfig,
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng::seeded(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

/// Test/train index splits for the configured protocol.
fn splits(n: usize, protocol: Protocol) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    match protocol {
        Protocol::LeaveOneOut => Ok(Vec::new()),
        Protocol::KFold { folds, seed } => {
            if folds > n {
                return Err(Error::InvalidConfig(format!(
                    "{folds} folds for {n} points"
                )));
            }
            let order = shuffled(n, seed);
            let (base, extra) = (n / folds, n % folds);
            let mut start = 0;
            let mut out = Vec::with_capacity(folds);
            for f in 0..folds {
                let len = base + usize::from(f < extra);
                let test = order[start..start + len].to_vec();
                let train = order[..start]
                    .iter()
                    .chain(&order[start + len..])
                    .copied()
                    .collect();
                out.push((test, train));
                start += len;
            }
            Ok(out)
        }
        Protocol::HoldOut { fraction, seed } => {
            if n < 2 {
                return Err(Error::TooFewPoints { k: 2, n });
            }
            let order = shuffled(n, seed);
            let n_test = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
            Ok(vec![(order[..n_test].to_vec(), order[n_test..].to_vec())])
        }
    }
}

/// Accuracy of KNN on a labelled dataset under the configured protocol.
pub fn knn_evaluate<F: Scalar>(dataset: &Dataset<F>, config: &KnnConfig) -> Result<KnnReport> {
    config.validate()?;
    let labels = dataset.labels().ok_or(Error::Unlabeled)?;
    let points = dataset.points();
    check_shapes(points, labels, config.metric)?;
    let n = points.len();
    let (k, metric) = (config.k, config.metric);

    let folds = if let Protocol::LeaveOneOut = config.protocol {
        if k > n - 1 {
            return Err(Error::TooFewPoints { k, n: n - 1 });
        }
        let correct = (0..n)
            .into_par_iter()
            .filter(|&i| {
                let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                vote(points, labels, &others, &points[i], k, metric) == labels[i]
            })
            .count();
        vec![FoldResult {
            correct,
            total: n,
            accuracy: correct as f64 / n as f64,
        }]
    } else {
        let mut out = Vec::new();
        for (test, train) in splits(n, config.protocol)? {
            if k > train.len() {
                return Err(Error::TooFewPoints { k, n: train.len() });
            }
            let correct = test
                .par_iter()
                .filter(|&&i| vote(points, labels, &train, &points[i], k, metric) == labels[i])
                .count();
            out.push(FoldResult {
                correct,
                total: test.len(),
                accuracy: correct as f64 / test.len() as f64,
            });
        }
        out
    };
    let correct: usize = folds.iter().map(|f| f.correct).sum();
    let total: usize = folds.iter().map(|f| f.total).sum();
    Ok(KnnReport {
        accuracy: correct as f64 / total as f64,
        correct,
        total,
        folds,
        config: *config,
    })
}
