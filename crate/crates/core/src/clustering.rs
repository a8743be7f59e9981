//! Lloyd-style K-Means with a pluggable distance.
//!
//! Only the assignment step depends on the metric; centroids are always the
//! arithmetic mean of their members. Under the Euclidean metric the usual
//! monotone-descent guarantee holds. Under the view metric the mean is not
//! the cluster cost minimizer, so the loop is stopped by the centroid shift
//! test or `max_iter`, and the per-iteration inertia is kept in
//! [`KMeansModel::history`] for inspection.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{MetricKind, Vector};
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Init<F> {
    /// D^2 sampling under the configured metric.
    KMeansPP,
    /// `k` distinct points chosen uniformly.
    RandomPoints,
    /// Fixed starting centroids; restarts are redundant and skipped.
    Provided(Vec<Vector<F>>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansConfig<F> {
    pub k: usize,
    pub metric: MetricKind,
    pub init: Init<F>,
    pub seed: u64,
    pub max_iter: usize,
    /// Convergence threshold on the largest centroid shift, measured in the
    /// configured metric.
    pub tol: F,
    /// Restart `r` uses seed `seed + r`; the lowest-inertia run wins.
    pub restarts: usize,
}

impl<F: Scalar> KMeansConfig<F> {
    pub fn new(k: usize, metric: MetricKind) -> Self {
        KMeansConfig {
            k,
            metric,
            init: Init::KMeansPP,
            seed: 0,
            max_iter: 300,
            tol: F::lit(1e-6),
            restarts: 10,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_init(mut self, init: Init<F>) -> Self {
        self.init = init;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: F) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.tol >= F::zero() && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(
                "tol must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansModel<F> {
    pub centroids: Vec<Vector<F>>,
    pub labels: Vec<usize>,
    /// Sum of squared metric distances from each point to its centroid.
    pub inertia: F,
    pub iterations: usize,
    pub converged: bool,
    /// Inertia right after each assignment step.
    pub history: Vec<F>,
    /// Index of the winning restart.
    pub restart: usize,
    pub config: KMeansConfig<F>,
}

impl<F: Scalar> KMeansModel<F> {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn metric(&self) -> MetricKind {
        self.config.metric
    }

    /// Number of iterations whose inertia exceeded the previous one.
    pub fn inertia_increases(&self) -> usize {
        self.history.windows(2).filter(|w| w[1] > w[0]).count()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

fn validate_points<F: Scalar, P: AsRef<[F]>>(points: &[P], metric: MetricKind) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::Empty("point set"));
    };
    let m = first.as_ref().len();
    metric.check_dim(m)?;
    for (i, p) in points.iter().enumerate() {
        let p = p.as_ref();
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: p.len(),
            });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(m)
}

/// K-Means++ seeding: the first centroid is uniform over the points, each
/// further one is drawn with probability proportional to the squared
/// distance to the nearest centroid chosen so far.
pub fn kmeanspp_init<F, P>(
    points: &[P],
    k: usize,
    metric: MetricKind,
    seed: u64,
) -> Result<Vec<Vector<F>>>
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    validate_points(points, metric)?;
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if k > points.len() {
        return Err(Error::TooFewPoints { k, n: points.len() });
    }
    let mut rng = rng::seeded(seed);
    Ok(kmeanspp_indices(points, k, metric, &mut rng)
        .into_iter()
        .map(|i| Vector::from_trusted(points[i].as_ref().to_vec()))
        .collect())
}

fn kmeanspp_indices<F, P>(
    points: &[P],
    k: usize,
    metric: MetricKind,
    rng: &mut rng::Rng,
) -> Vec<usize>
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    let n = points.len();
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let first = rng.random_range(0..n);
    chosen.push(first);
    taken[first] = true;

    let sq = |i: usize, c: usize| {
        let d = metric.eval(points[i].as_ref(), points[c].as_ref()).as_f64();
        d * d
    };
    let mut weight: Vec<f64> = (0..n).into_par_iter().map(|i| sq(i, first)).collect();

    while chosen.len() < k {
        let total: f64 = weight.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in weight.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // every remaining point coincides with a centroid
            let free: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        taken[next] = true;
        let fresh: Vec<f64> = (0..n).into_par_iter().map(|i| sq(i, next)).collect();
        for (w, f) in weight.iter_mut().zip(fresh) {
            if f < *w {
                *w = f;
            }
        }
    }
    chosen
}

fn random_indices(n: usize, k: usize, rng: &mut rng::Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Index of the nearest centroid (lowest index on ties) and the distance to it.
#[inline]
fn nearest<F: Scalar, C: AsRef<[F]>>(x: &[F], centroids: &[C], metric: MetricKind) -> (usize, F) {
    let mut best = 0;
    let mut best_d = metric.eval(x, centroids[0].as_ref());
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = metric.eval(x, c.as_ref());
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    (best, best_d)
}

fn assign<F, P>(points: &[P], centroids: &[Vector<F>], metric: MetricKind) -> (Vec<usize>, Vec<F>)
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    points
        .par_iter()
        .map(|p| nearest(p.as_ref(), centroids, metric))
        .unzip()
}

/// Point to seize for an empty cluster: farthest from its own centroid among
/// points whose cluster can spare one.
fn seizure_candidate<F: Scalar>(labels: &[usize], dists: &[F], counts: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, F)> = None;
    for (i, (&l, &d)) in labels.iter().zip(dists).enumerate() {
        if counts[l] > 1 && best.is_none_or(|(_, bd)| d > bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Nearest-centroid assignment that leaves no cluster empty. An empty
/// cluster's centroid is moved onto the seized point and everything is
/// reassigned; if that keeps failing the label is forced.
fn assign_nonempty<F, P>(
    points: &[P],
    centroids: &mut [Vector<F>],
    metric: MetricKind,
) -> Vec<usize>
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    let k = centroids.len();
    for _ in 0..=k {
        let (labels, dists) = assign(points, centroids, metric);
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return labels;
        };
        let Some(p) = seizure_candidate(&labels, &dists, &counts) else {
            return labels;
        };
        centroids[empty] = Vector::from_trusted(points[p].as_ref().to_vec());
    }
    let (mut labels, mut dists) = assign(points, centroids, metric);
    let mut counts = vec![0usize; k];
    for &l in &labels {
        counts[l] += 1;
    }
    while let Some(empty) = counts.iter().position(|&c| c == 0) {
        let Some(p) = seizure_candidate(&labels, &dists, &counts) else {
            break;
        };
        counts[labels[p]] -= 1;
        counts[empty] += 1;
        labels[p] = empty;
        dists[p] = F::zero();
        centroids[empty] = Vector::from_trusted(points[p].as_ref().to_vec());
    }
    labels
}

fn means<F: Scalar, P: AsRef<[F]>>(
    points: &[P],
    labels: &[usize],
    old: &[Vector<F>],
) -> Vec<Vector<F>> {
    let k = old.len();
    let m = old[0].dim();
    let mut sums = vec![vec![F::zero(); m]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, &c) in sums[l].iter_mut().zip(p.as_ref()) {
            *s += c;
        }
    }
    sums.into_iter()
        .zip(counts)
        .zip(old)
        .map(|((mut s, c), prev)| {
            if c == 0 {
                return prev.clone();
            }
            let denom = F::from_count(c);
            for v in &mut s {
                *v /= denom;
            }
            Vector::from_trusted(s)
        })
        .collect()
}

fn inertia<F: Scalar, P: AsRef<[F]>>(
    points: &[P],
    centroids: &[Vector<F>],
    labels: &[usize],
    metric: MetricKind,
) -> F {
    let mut acc = F::zero();
    for (p, &l) in points.iter().zip(labels) {
        let d = metric.eval(p.as_ref(), &centroids[l]);
        acc += d * d;
    }
    acc
}

struct Run<F> {
    centroids: Vec<Vector<F>>,
    labels: Vec<usize>,
    inertia: F,
    iterations: usize,
    converged: bool,
    history: Vec<F>,
}

fn lloyd<F, P>(
    points: &[P],
    mut centroids: Vec<Vector<F>>,
    metric: MetricKind,
    max_iter: usize,
    tol: F,
) -> Run<F>
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    for it in 1..=max_iter {
        iterations = it;
        let labels = assign_nonempty(points, &mut centroids, metric);
        history.push(inertia(points, &centroids, &labels, metric));
        let updated = means(points, &labels, &centroids);
        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| metric.eval(a, b))
            .fold(F::zero(), F::max);
        centroids = updated;
        if shift < tol || shift == F::zero() {
            converged = true;
            break;
        }
    }
    let labels = assign_nonempty(points, &mut centroids, metric);
    let inertia = inertia(points, &centroids, &labels, metric);
    Run {
        centroids,
        labels,
        inertia,
        iterations,
        converged,
        history,
    }
}

/// Fits K-Means, keeping the lowest-inertia model over `config.restarts`
/// seeded runs.
pub fn kmeans_fit<F, P>(points: &[P], config: &KMeansConfig<F>) -> Result<KMeansModel<F>>
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    config.validate()?;
    let m = validate_points(points, config.metric)?;
    let n = points.len();
    if n < config.k {
        return Err(Error::TooFewPoints { k: config.k, n });
    }
    if let Init::Provided(cs) = &config.init {
        if cs.len() != config.k {
            return Err(Error::InvalidConfig(format!(
                "{} initial centroids provided for k = {}",
                cs.len(),
                config.k
            )));
        }
        if let Some(c) = cs.iter().find(|c| c.dim() != m) {
            return Err(Error::DimensionMismatch {
                left: m,
                right: c.dim(),
            });
        }
    }
    let restarts = match config.init {
        Init::Provided(_) => 1,
        _ => config.restarts,
    };

    let runs: Vec<Run<F>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::seeded(config.seed.wrapping_add(r as u64));
            let start = match &config.init {
                Init::Provided(cs) => cs.clone(),
                Init::KMeansPP => kmeanspp_indices(points, config.k, config.metric, &mut rng)
                    .into_iter()
                    .map(|i| Vector::from_trusted(points[i].as_ref().to_vec()))
                    .collect(),
                Init::RandomPoints => random_indices(n, config.k, &mut rng)
                    .into_iter()
                    .map(|i| Vector::from_trusted(points[i].as_ref().to_vec()))
                    .collect(),
            };
            lloyd(points, start, config.metric, config.max_iter, config.tol)
        })
        .collect();

    // strict improvement beyond a relative 1e-9 so near-ties keep the earlier restart
    let rel = F::lit(1e-9);
    let mut best = 0;
    for (r, run) in runs.iter().enumerate().skip(1) {
        let incumbent = runs[best].inertia;
        if run.inertia < incumbent - rel * incumbent {
            best = r;
        }
    }
    let run = runs.into_iter().nth(best).expect("at least one restart");
    Ok(KMeansModel {
        centroids: run.centroids,
        labels: run.labels,
        inertia: run.inertia,
        iterations: run.iterations,
        converged: run.converged,
        history: run.history,
        restart: best,
        config: config.clone(),
    })
}

/// Nearest-centroid labels under the model's metric.
pub fn kmeans_predict<F, P>(model: &KMeansModel<F>, points: &[P]) -> Result<Vec<usize>>
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    let m = model.centroids[0].dim();
    for p in points {
        let p = p.as_ref();
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: p.len(),
            });
        }
    }
    Ok(points
        .par_iter()
        .map(|p| nearest(p.as_ref(), &model.centroids, model.metric()).0)
        .collect())
}

/// Recomputes the inertia of a labelling against given centroids.
pub fn inertia_of<F, P>(
    points: &[P],
    centroids: &[Vector<F>],
    labels: &[usize],
    metric: MetricKind,
) -> Result<F>
where
    F: Scalar,
    P: AsRef<[F]>,
{
    if labels.len() != points.len() {
        return Err(Error::LengthMismatch {
            labels: labels.len(),
            points: points.len(),
        });
    }
    if let Some(&l) = labels.iter().find(|&&l| l >= centroids.len()) {
        return Err(Error::InvalidConfig(format!("label {l} has no centroid")));
    }
    Ok(inertia(points, centroids, labels, metric))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![10.0, 0.0],
            vec![10.0, 1.0],
        ]
    }

    #[test]
    fn separated_pairs() {
        for metric in MetricKind::ALL {
            let model = kmeans_fit(&square(), &KMeansConfig::new(2, metric).with_seed(3)).unwrap();
            assert_eq!(model.labels[0], model.labels[1]);
            assert_eq!(model.labels[2], model.labels[3]);
            assert_ne!(model.labels[0], model.labels[2]);
            let mut cs: Vec<Vec<f64>> = model.centroids.iter().map(|c| c.to_vec()).collect();
            cs.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
            assert_eq!(cs, vec![vec![0.0, 0.5], vec![10.0, 0.5]]);
            assert!(model.converged);
        }
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = vec![
            vec![1.0, 2.0, 0.0],
            vec![3.0, -2.0, 1.0],
            vec![2.0, 3.0, 5.0],
        ];
        for metric in MetricKind::ALL {
            let model = kmeans_fit(&pts, &KMeansConfig::new(1, metric)).unwrap();
            assert_eq!(model.centroids[0].as_slice(), &[2.0, 1.0, 2.0]);
            let expect: f64 = pts
                .iter()
                .map(|p| metric.distance::<f64>(p, &[2.0, 1.0, 2.0]).unwrap().powi(2))
                .sum();
            assert!((model.inertia - expect).abs() <= 1e-12 * expect);
        }
    }

    #[test]
    fn k_equals_n_gives_zero_inertia() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 5.0],
            vec![-3.0, 2.0],
            vec![4.0, 4.0],
        ];
        for metric in MetricKind::ALL {
            let model = kmeans_fit(&pts, &KMeansConfig::new(4, metric)).unwrap();
            assert_eq!(model.inertia, 0.0);
            assert_eq!(model.cluster_sizes(), vec![1; 4]);
        }
    }

    #[test]
    fn kmeanspp_k_equals_n_picks_every_point() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 5.0],
            vec![-3.0, 2.0],
            vec![4.0, 4.0],
            vec![9.0, 1.0],
        ];
        let mut got: Vec<Vec<f64>> = kmeanspp_init(&pts, 5, MetricKind::View, 11)
            .unwrap()
            .into_iter()
            .map(Vector::into_inner)
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want = pts.clone();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn kmeanspp_k_one_is_a_data_point_and_seeded() {
        let pts = square();
        let a = kmeanspp_init(&pts, 1, MetricKind::Euclidean, 42).unwrap();
        let b = kmeanspp_init(&pts, 1, MetricKind::Euclidean, 42).unwrap();
        assert_eq!(a, b);
        assert!(pts.iter().any(|p| p.as_slice() == a[0].as_slice()));
        assert!(matches!(
            kmeanspp_init(&pts, 5, MetricKind::Euclidean, 0),
            Err(Error::TooFewPoints { k: 5, n: 4 })
        ));
    }

    #[test]
    fn kmeanspp_duplicates_still_fill_k() {
        let pts = vec![vec![1.0, 1.0]; 4];
        let cs = kmeanspp_init(&pts, 3, MetricKind::View, 1).unwrap();
        assert_eq!(cs.len(), 3);
    }

    #[test]
    fn errors() {
        let pts = square();
        assert!(matches!(
            kmeans_fit(&pts, &KMeansConfig::new(5, MetricKind::View)),
            Err(Error::TooFewPoints { .. })
        ));
        let one_d = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            kmeans_fit(&one_d, &KMeansConfig::new(1, MetricKind::View)),
            Err(Error::TooFewDimensions(1))
        ));
        assert!(kmeans_fit(&one_d, &KMeansConfig::new(2, MetricKind::Euclidean)).is_ok());
        assert!(kmeans_fit(&pts, &KMeansConfig::new(0, MetricKind::View)).is_err());
        let bad = KMeansConfig::new(2, MetricKind::View)
            .with_init(Init::Provided(vec![Vector::zeros(2)]));
        assert!(kmeans_fit(&pts, &bad).is_err());
    }

    #[test]
    fn predict_rules() {
        let model = kmeans_fit(&square(), &KMeansConfig::new(2, MetricKind::Euclidean)).unwrap();
        assert_eq!(kmeans_predict(&model, &square()).unwrap(), model.labels);
        let empty: Vec<Vec<f64>> = vec![];
        assert!(kmeans_predict(&model, &empty).unwrap().is_empty());
        assert!(kmeans_predict(&model, &[vec![1.0, 2.0, 3.0]]).is_err());

        let cs = vec![
            Vector::new(vec![0.0, 0.0]).unwrap(),
            Vector::new(vec![2.0, 0.0]).unwrap(),
        ];
        let fixed = KMeansConfig::new(2, MetricKind::View)
            .with_init(Init::Provided(cs.clone()))
            .with_max_iter(1);
        let mut model = kmeans_fit(&square(), &fixed).unwrap();
        model.centroids = cs;
        assert_eq!(kmeans_predict(&model, &[vec![1.0, 0.0]]).unwrap(), vec![0]);
    }

    #[test]
    fn empty_cluster_is_repaired() {
        // the third provided centroid is far from everything and starts empty
        let pts = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![5.0, 0.0],
            vec![5.2, 0.0],
            vec![5.4, 0.1],
        ];
        let cs = vec![
            Vector::new(vec![0.0, 0.0]).unwrap(),
            Vector::new(vec![5.0, 0.0]).unwrap(),
            Vector::new(vec![100.0, 100.0]).unwrap(),
        ];
        for metric in MetricKind::ALL {
            let cfg = KMeansConfig::new(3, metric).with_init(Init::Provided(cs.clone()));
            let model = kmeans_fit(&pts, &cfg).unwrap();
            assert!(model.cluster_sizes().iter().all(|&s| s > 0));
            assert_eq!(kmeans_predict(&model, &pts).unwrap(), model.labels);
        }
    }

    #[test]
    fn random_points_init_works() {
        let cfg = KMeansConfig::new(2, MetricKind::View)
            .with_init(Init::RandomPoints)
            .with_seed(9);
        let model = kmeans_fit(&square(), &cfg).unwrap();
        assert_eq!(model.labels[0], model.labels[1]);
        assert_ne!(model.labels[0], model.labels[3]);
    }

    #[test]
    fn single_precision() {
        let pts: Vec<Vec<f32>> = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![10.0, 0.0],
            vec![10.0, 1.0],
        ];
        let model = kmeans_fit(&pts, &KMeansConfig::new(2, MetricKind::View)).unwrap();
        assert_ne!(model.labels[0], model.labels[2]);
    }
}
