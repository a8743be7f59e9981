//! Euclidean and view distances, the v-norm, and the two similarity
//! discrimination gains built on top of them.
//!
//! The view distance between two points in `m >= 2` dimensions is the sum,
//! over every coordinate pair `i < j`, of the Euclidean distance between the
//! projections of the points onto the `(i, j)` plane:
//!
//! ```text
//! d_v(x, y) = sum_{i<j} sqrt((x_i - y_i)^2 + (x_j - y_j)^2)
//! ```
//!
//! The constant `(m - 2)!` scale factor of the original definition is never
//! applied; multiply externally if the scaled value is needed.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::DistanceMatrix;

/// A point with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector<F> {
    coords: Vec<F>,
}

impl<F: Scalar> Vector<F> {
    pub fn new(coords: Vec<F>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("vector"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Vector { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        Vector {
            coords: vec![F::zero(); dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[F] {
        &self.coords
    }

    pub fn into_inner(self) -> Vec<F> {
        self.coords
    }

    /// Wraps coordinates that are already known to be finite and nonempty.
    pub(crate) fn from_trusted(coords: Vec<F>) -> Self {
        debug_assert!(!coords.is_empty());
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Vector { coords }
    }
}

impl<F> Deref for Vector<F> {
    type Target = [F];

    fn deref(&self) -> &[F] {
        &self.coords
    }
}

impl<F> AsRef<[F]> for Vector<F> {
    fn as_ref(&self) -> &[F] {
        &self.coords
    }
}

impl<F: Scalar> TryFrom<Vec<F>> for Vector<F> {
    type Error = Error;

    fn try_from(coords: Vec<F>) -> Result<Self> {
        Vector::new(coords)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    View,
}

impl MetricKind {
    pub const ALL: [MetricKind; 2] = [MetricKind::Euclidean, MetricKind::View];

    /// Smallest dimension for which the metric is defined.
    pub fn min_dim(self) -> usize {
        match self {
            MetricKind::Euclidean => 1,
            MetricKind::View => 2,
        }
    }

    pub fn distance<F: Scalar>(self, x: &[F], y: &[F]) -> Result<F> {
        match self {
            MetricKind::Euclidean => euclidean_distance(x, y),
            MetricKind::View => view_distance(x, y),
        }
    }

    /// Distance without dimension checks. Callers validate shapes up front.
    #[inline]
    pub(crate) fn eval<F: Scalar>(self, x: &[F], y: &[F]) -> F {
        match self {
            MetricKind::Euclidean => euclidean_unchecked(x, y),
            MetricKind::View => view_unchecked(x, y),
        }
    }

    pub(crate) fn check_dim(self, dim: usize) -> Result<()> {
        match self {
            MetricKind::View if dim < 2 => Err(Error::TooFewDimensions(dim)),
            _ if dim == 0 => Err(Error::Empty("vector")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::View => "view",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "euclid" | "l2" => Ok(MetricKind::Euclidean),
            "view" => Ok(MetricKind::View),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    TwoNorm,
    VNorm,
}

impl NormKind {
    pub fn norm<F: Scalar>(self, x: &[F]) -> Result<F> {
        match self {
            NormKind::TwoNorm => {
                if x.is_empty() {
                    return Err(Error::Empty("vector"));
                }
                finite(x)?;
                Ok(two_norm(x))
            }
            NormKind::VNorm => v_norm(x),
        }
    }
}

fn finite<F: Scalar>(x: &[F]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// Common length of two finite slices.
fn same_dim<F: Scalar>(x: &[F], y: &[F]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    finite(x)?;
    finite(y)?;
    Ok(x.len())
}

#[inline]
fn euclidean_unchecked<F: Scalar>(x: &[F], y: &[F]) -> F {
    let mut acc = F::zero();
    for (&a, &b) in x.iter().zip(y) {
        let d = a - b;
        acc += d * d;
    }
    acc.sqrt()
}

#[inline]
fn view_unchecked<F: Scalar>(x: &[F], y: &[F]) -> F {
    let m = x.len();
    let mut acc = F::zero();
    for i in 0..m {
        let di = x[i] - y[i];
        let si = di * di;
        for j in (i + 1)..m {
            let dj = x[j] - y[j];
            acc += (si + dj * dj).sqrt();
        }
    }
    acc
}

fn two_norm<F: Scalar>(x: &[F]) -> F {
    let mut acc = F::zero();
    for &a in x {
        acc += a * a;
    }
    acc.sqrt()
}

pub fn euclidean_distance<F: Scalar>(x: &[F], y: &[F]) -> Result<F> {
    if same_dim(x, y)? == 0 {
        return Err(Error::Empty("vector"));
    }
    Ok(euclidean_unchecked(x, y))
}

/// Sum of the Euclidean distances between the projections of `x` and `y`
/// onto every coordinate plane.
pub fn view_distance<F: Scalar>(x: &[F], y: &[F]) -> Result<F> {
    let m = same_dim(x, y)?;
    if m < 2 {
        return Err(Error::TooFewDimensions(m));
    }
    Ok(view_unchecked(x, y))
}

/// View distance from `x` to the origin.
pub fn v_norm<F: Scalar>(x: &[F]) -> Result<F> {
    let m = x.len();
    if m < 2 {
        return Err(Error::TooFewDimensions(m));
    }
    finite(x)?;
    let mut acc = F::zero();
    for i in 0..m {
        let si = x[i] * x[i];
        for &xj in &x[i + 1..] {
            acc += (si + xj * xj).sqrt();
        }
    }
    Ok(acc)
}

/// Relative norm growth when `appended` is added as a new last coordinate.
pub fn dim_similarity_gain<F: Scalar>(x: &[F], appended: F, norm: NormKind) -> Result<F> {
    if x.len() < 2 {
        return Err(Error::TooFewDimensions(x.len()));
    }
    if !appended.is_finite() {
        return Err(Error::NonFinite(x.len()));
    }
    let base = norm.norm(x)?;
    if base == F::zero() {
        return Err(Error::ZeroNorm);
    }
    let mut extended = Vec::with_capacity(x.len() + 1);
    extended.extend_from_slice(x);
    extended.push(appended);
    Ok(norm.norm(&extended)? / base - F::one())
}

/// Relative norm growth when the trailing zero coordinate of `x` becomes `last`.
pub fn certain_dim_similarity_gain<F: Scalar>(x: &[F], last: F, norm: NormKind) -> Result<F> {
    if x.len() < 2 {
        return Err(Error::TooFewDimensions(x.len()));
    }
    let tail = x[x.len() - 1];
    if tail != F::zero() {
        return Err(Error::NonZeroBaseline(tail.as_f64()));
    }
    if !last.is_finite() {
        return Err(Error::NonFinite(x.len() - 1));
    }
    let base = norm.norm(x)?;
    if base == F::zero() {
        return Err(Error::ZeroNorm);
    }
    let mut changed = x.to_vec();
    *changed.last_mut().unwrap() = last;
    Ok(norm.norm(&changed)? / base - F::one())
}

/// Dense matrix of pairwise distances under `metric`.
///
/// Each entry is computed independently, so the result does not depend on
/// how the work is scheduled across threads.
pub fn pairwise_distances<F, P>(points: &[P], metric: MetricKind) -> Result<DistanceMatrix<F>>
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    let n = points.len();
    if n == 0 {
        return Err(Error::Empty("point set"));
    }
    let m = points[0].as_ref().len();
    for p in points {
        same_dim(points[0].as_ref(), p.as_ref())?;
    }
    metric.check_dim(m)?;

    let upper: Vec<Vec<F>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = points[i].as_ref();
            ((i + 1)..n)
                .map(|j| metric.eval(xi, points[j].as_ref()))
                .collect()
        })
        .collect();

    let mut entries = vec![F::zero(); n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, d) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix::from_parts(n, entries, metric))
}

/// Samples of the distance to the origin over a square grid in two chosen
/// coordinates, with every other coordinate held fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourGrid<F> {
    pub dim: usize,
    pub axes: (usize, usize),
    pub metric: MetricKind,
    /// Sample positions along each axis; shared by both axes.
    pub ticks: Vec<F>,
    /// Row-major `steps x steps`: `values[i * steps + j]` is the distance at
    /// `(axes.0 = ticks[i], axes.1 = ticks[j])`.
    pub values: Vec<F>,
}

impl<F: Scalar> ContourGrid<F> {
    pub fn steps(&self) -> usize {
        self.ticks.len()
    }

    pub fn at(&self, i: usize, j: usize) -> F {
        self.values[i * self.ticks.len() + j]
    }
}

/// Evaluates the distance to the origin on a `steps x steps` grid spanning
/// `range` inclusively on both axes.
pub fn contour_grid<F: Scalar>(
    dim: usize,
    fixed: &BTreeMap<usize, F>,
    axes: (usize, usize),
    range: (F, F),
    steps: usize,
    metric: MetricKind,
) -> Result<ContourGrid<F>> {
    let bad = |msg: String| Err(Error::InvalidGrid(msg));
    if dim < 2 {
        return bad(format!("dimension must be at least 2, got {dim}"));
    }
    if steps < 2 {
        return bad(format!("steps must be at least 2, got {steps}"));
    }
    let (a, b) = axes;
    if a == b {
        return bad(format!("axes must be distinct, got {a} twice"));
    }
    if a >= dim || b >= dim {
        return bad(format!("axis out of range for dimension {dim}"));
    }
    if fixed.contains_key(&a) || fixed.contains_key(&b) {
        return bad("an axis is also listed as a fixed coordinate".into());
    }
    if let Some(k) = fixed.keys().find(|&&k| k >= dim) {
        return bad(format!(
            "fixed coordinate {k} out of range for dimension {dim}"
        ));
    }
    if let Some(k) = (0..dim).find(|k| *k != a && *k != b && !fixed.contains_key(k)) {
        return bad(format!("coordinate {k} is neither an axis nor fixed"));
    }
    if let Some((k, _)) = fixed.iter().find(|(_, v)| !v.is_finite()) {
        return bad(format!("fixed coordinate {k} is not finite"));
    }
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return bad("range must be finite with lo < hi".into());
    }

    let last = steps - 1;
    let span = hi - lo;
    let ticks: Vec<F> = (0..steps)
        .map(|i| {
            if i == last {
                hi
            } else {
                lo + span * F::from_count(i) / F::from_count(last)
            }
        })
        .collect();

    let mut base = vec![F::zero(); dim];
    for (&k, &v) in fixed {
        base[k] = v;
    }
    let origin = vec![F::zero(); dim];
    let mut values = Vec::with_capacity(steps * steps);
    for &u in &ticks {
        for &v in &ticks {
            base[a] = u;
            base[b] = v;
            values.push(metric.eval(&base, &origin));
        }
    }
    Ok(ContourGrid {
        dim,
        axes,
        metric,
        ticks,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 5.0);
        let d = euclidean_distance(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert!(close(d, 14f64.sqrt(), 1e-15));
    }

    #[test]
    fn dimension_mismatch_names_both() {
        let err = euclidean_distance(&[1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('2') && msg.contains('3'), "{msg}");
        assert!(matches!(
            view_distance(&[1.0, 2.0], &[1.0]),
            Err(Error::DimensionMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn view_examples() {
        assert_eq!(
            view_distance(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]).unwrap(),
            2.0
        );
        let d = view_distance(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert!(close(d, 5f64.sqrt() + 10f64.sqrt() + 13f64.sqrt(), 1e-15));
        let d2 = view_distance(&[0.3, -1.7], &[2.5, 4.0]).unwrap();
        assert_eq!(d2, euclidean_distance(&[0.3, -1.7], &[2.5, 4.0]).unwrap());
    }

    #[test]
    fn view_rejects_one_dimension() {
        assert!(matches!(
            view_distance(&[1.0], &[2.0]),
            Err(Error::TooFewDimensions(1))
        ));
        assert!(matches!(v_norm(&[1.0]), Err(Error::TooFewDimensions(1))));
    }

    #[test]
    fn v_norm_examples() {
        assert_eq!(v_norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(close(
            v_norm(&[1.0, 1.0, 1.0]).unwrap(),
            3.0 * 2f64.sqrt(),
            1e-15
        ));
        let x = [1.0, 2.0, 3.0];
        assert_eq!(v_norm(&x).unwrap(), view_distance(&x, &[0.0; 3]).unwrap());
    }

    #[test]
    fn gain_examples() {
        let s2 = 2f64.sqrt();
        assert_eq!(
            dim_similarity_gain(&[1.0, 0.0], 0.0, NormKind::TwoNorm).unwrap(),
            0.0
        );
        assert!(close(
            dim_similarity_gain(&[1.0, 0.0], 1.0, NormKind::TwoNorm).unwrap(),
            s2 - 1.0,
            1e-15
        ));
        assert!(close(
            dim_similarity_gain(&[1.0, 0.0], 1.0, NormKind::VNorm).unwrap(),
            s2 + 1.0,
            1e-15
        ));

        let x = [1.0, 1.0, 0.0];
        assert_eq!(
            certain_dim_similarity_gain(&x, 0.0, NormKind::VNorm).unwrap(),
            0.0
        );
        let b = certain_dim_similarity_gain(&x, 1.0, NormKind::VNorm).unwrap();
        assert!(close(b, 3.0 * s2 / (s2 + 2.0) - 1.0, 1e-14));
        let b2 = certain_dim_similarity_gain(&x, 1.0, NormKind::TwoNorm).unwrap();
        assert!(close(b2, 3f64.sqrt() / s2 - 1.0, 1e-14));
    }

    #[test]
    fn gain_errors() {
        assert!(matches!(
            dim_similarity_gain(&[0.0, 0.0], 1.0, NormKind::VNorm),
            Err(Error::ZeroNorm)
        ));
        assert!(matches!(
            certain_dim_similarity_gain(&[0.0, 0.0, 0.0], 1.0, NormKind::TwoNorm),
            Err(Error::ZeroNorm)
        ));
        assert!(matches!(
            certain_dim_similarity_gain(&[1.0, 1.0, 2.0], 1.0, NormKind::VNorm),
            Err(Error::NonZeroBaseline(_))
        ));
    }

    #[test]
    fn pairwise_examples() {
        let one = pairwise_distances(&[vec![1.0, 2.0]], MetricKind::View).unwrap();
        assert_eq!(one.n(), 1);
        assert_eq!(one.get(0, 0), 0.0);

        let pts = vec![vec![1.0, 2.0, 3.0], vec![0.0, 0.0, 0.0]];
        let m = pairwise_distances(&pts, MetricKind::View).unwrap();
        assert_eq!(m.get(0, 1), view_distance(&pts[0], &pts[1]).unwrap());
        assert_eq!(m.get(1, 0), m.get(0, 1));
        assert_eq!(m.metric(), MetricKind::View);

        let mixed = vec![vec![1.0, 2.0], vec![1.0, 2.0, 3.0]];
        assert!(pairwise_distances(&mixed, MetricKind::Euclidean).is_err());
        assert!(pairwise_distances(&[vec![1.0], vec![2.0]], MetricKind::View).is_err());
    }

    #[test]
    fn vector_rejects_non_finite() {
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
        assert!(Vector::<f64>::new(vec![]).is_err());
        assert_eq!(Vector::new(vec![1.0f32, 2.0]).unwrap().dim(), 2);
    }

    #[test]
    fn contour_examples() {
        let fixed: BTreeMap<usize, f64> = [(2, 0.0)].into_iter().collect();
        let g = contour_grid(3, &fixed, (0, 1), (-1.0, 1.0), 5, MetricKind::View).unwrap();
        assert_eq!(g.ticks, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.at(2, 2), 0.0);
        for i in 0..5 {
            for j in 0..5 {
                assert!(close(g.at(i, j), g.at(j, i), 1e-12));
            }
        }

        let none = BTreeMap::new();
        let v = contour_grid(2, &none, (0, 1), (-2.0, 3.0), 7, MetricKind::View).unwrap();
        let e = contour_grid(2, &none, (0, 1), (-2.0, 3.0), 7, MetricKind::Euclidean).unwrap();
        assert_eq!(v.values, e.values);
    }

    #[test]
    fn contour_rejects_bad_specs() {
        let none: BTreeMap<usize, f64> = BTreeMap::new();
        let fixed: BTreeMap<usize, f64> = [(0, 1.0)].into_iter().collect();
        let r = (0.0, 1.0);
        assert!(contour_grid(3, &none, (0, 1), r, 4, MetricKind::View).is_err());
        assert!(contour_grid(2, &fixed, (0, 1), r, 4, MetricKind::View).is_err());
        assert!(contour_grid(2, &none, (1, 1), r, 4, MetricKind::View).is_err());
        assert!(contour_grid(2, &none, (0, 1), r, 1, MetricKind::View).is_err());
        assert!(contour_grid(2, &none, (0, 1), (1.0, 1.0), 4, MetricKind::View).is_err());
        let extra: BTreeMap<usize, f64> = [(5, 1.0)].into_iter().collect();
        assert!(contour_grid(2, &extra, (0, 1), r, 4, MetricKind::View).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let d: f32 = view_distance(&[1.0f32, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert!((d - 9.003_897).abs() < 1e-5, "{d}");
    }
}
