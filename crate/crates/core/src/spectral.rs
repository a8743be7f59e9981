//! Eigenstructure diagnostics for distance matrices.
//!
//! A matrix of pairwise distances between distinct points has exactly one
//! positive eigenvalue, zero trace, and a spectral radius equal to that
//! positive eigenvalue. Both Euclidean and view distance matrices are also
//! conditionally negative semidefinite: with `e` the all-ones vector and `s`
//! the first basis vector, `(I - e s^T) M (I - s e^T)` has no positive
//! eigenvalues.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{pairwise_distances, MetricKind};
use crate::scalar::Scalar;

/// Square matrix of pairwise distances, stored row-major, tagged with the
/// metric that produced it.
///
/// Matrices built by [`pairwise_distances`] are symmetric, nonnegative and
/// zero on the diagonal. [`DistanceMatrix::from_rows`] accepts any finite
/// square matrix so that [`check_distance_matrix`] can report on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix<F> {
    n: usize,
    entries: Vec<F>,
    metric: MetricKind,
}

impl<F: Scalar> DistanceMatrix<F> {
    pub(crate) fn from_parts(n: usize, entries: Vec<F>, metric: MetricKind) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        DistanceMatrix { n, entries, metric }
    }

    pub fn from_rows(rows: &[Vec<F>], metric: MetricKind) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty("matrix"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    row,
                    len: r.len(),
                });
            }
            if let Some(c) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(row * n + c));
            }
            entries.extend_from_slice(r);
        }
        Ok(DistanceMatrix { n, entries, metric })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.entries[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[F] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[F]> {
        self.entries.chunks(self.n)
    }

    pub fn frobenius_norm(&self) -> F {
        frobenius(&self.entries)
    }

    pub fn trace(&self) -> F {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn eigenvalues(&self, tol: F) -> Result<Vec<F>> {
        symmetric_eigenvalues(self.n, &self.entries, tol)
    }
}

fn frobenius<F: Scalar>(a: &[F]) -> F {
    let mut acc = F::zero();
    for &v in a {
        acc += v * v;
    }
    acc.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    /// Householder reduction to tridiagonal form followed by implicit QL.
    #[default]
    Tridiagonal,
    /// Cyclic Jacobi rotations.
    Jacobi,
}

/// All eigenvalues of a symmetric matrix, sorted in descending order.
///
/// `a` is row-major `n x n`; entries may differ from their transpose by at
/// most `tol` (absolute), and the symmetric part is what gets decomposed.
pub fn symmetric_eigenvalues<F: Scalar>(n: usize, a: &[F], tol: F) -> Result<Vec<F>> {
    symmetric_eigenvalues_with(n, a, tol, EigenMethod::default())
}

pub fn symmetric_eigenvalues_with<F: Scalar>(
    n: usize,
    a: &[F],
    tol: F,
    method: EigenMethod,
) -> Result<Vec<F>> {
    if n == 0 {
        return Err(Error::Empty("matrix"));
    }
    if a.len() != n * n {
        return Err(Error::NotSquare {
            rows: n,
            row: a.len() / n.max(1),
            len: a.len() % n,
        });
    }
    if let Some(k) = a.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    let half = F::lit(0.5);
    let mut sym = a.to_vec();
    for i in 0..n {
        for j in (i + 1)..n {
            let (u, l) = (a[i * n + j], a[j * n + i]);
            let diff = (u - l).abs();
            if diff > tol {
                return Err(Error::NotSymmetric {
                    i,
                    j,
                    diff: diff.as_f64(),
                });
            }
            let avg = (u + l) * half;
            sym[i * n + j] = avg;
            sym[j * n + i] = avg;
        }
    }
    let mut values = match method {
        EigenMethod::Tridiagonal => {
            let (mut d, mut e) = tridiagonalize(n, sym);
            tridiagonal_ql(&mut d, &mut e)?;
            d
        }
        EigenMethod::Jacobi => jacobi(n, sym)?,
    };
    values.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
    Ok(values)
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns the diagonal and the subdiagonal (`e[i]` couples `i` and `i + 1`,
/// last entry zero).
fn tridiagonalize<F: Scalar>(n: usize, mut a: Vec<F>) -> (Vec<F>, Vec<F>) {
    let mut d = vec![F::zero(); n];
    let mut e = vec![F::zero(); n];
    let two = F::lit(2.0);
    for i in (1..n).rev() {
        let l = i - 1;
        if l > 0 {
            let mut scale = F::zero();
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == F::zero() {
                e[i] = a[i * n + l];
            } else {
                let mut h = F::zero();
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= F::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f = F::zero();
                for j in 0..=l {
                    let mut g = F::zero();
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h * two);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let upd = f * e[k] + g * a[i * n + k];
                        a[j * n + k] -= upd;
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = F::zero();
    (d, e)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
/// On return `d` holds the eigenvalues (unsorted).
fn tridiagonal_ql<F: Scalar>(d: &mut [F], e: &mut [F]) -> Result<()> {
    let n = d.len();
    let max_iter = 60;
    let two = F::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= F::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence(max_iter));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(F::one());
            let signed_r = if g >= F::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (F::one(), F::one(), F::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == F::zero() {
                    d[i + 1] -= p;
                    e[m] = F::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = F::zero();
        }
    }
    Ok(())
}

/// Cyclic Jacobi: sweeps until the off-diagonal Frobenius mass drops below
/// `1e-12 * ||A||` (or a few ulps for narrow types), at most 100 sweeps.
fn jacobi<F: Scalar>(n: usize, mut a: Vec<F>) -> Result<Vec<F>> {
    const MAX_SWEEPS: usize = 100;
    let rel = F::lit(1e-12).max(F::epsilon() * F::lit(64.0));
    let threshold = rel * frobenius(&a);
    let off = |a: &[F]| {
        let mut acc = F::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[i * n + j] * a[i * n + j];
                }
            }
        }
        acc.sqrt()
    };
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == F::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (F::lit(2.0) * apq);
                let t = {
                    let mag = F::one() / (theta.abs() + (theta * theta + F::one()).sqrt());
                    if theta >= F::zero() {
                        mag
                    } else {
                        -mag
                    }
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let nkp = c * akp - s * akq;
                    let nkq = s * akp + c * akq;
                    a[k * n + p] = nkp;
                    a[p * n + k] = nkp;
                    a[k * n + q] = nkq;
                    a[q * n + k] = nkq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = F::zero();
                a[q * n + p] = F::zero();
            }
        }
    }
    if !converged && off(&a) > threshold {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    Ok((0..n).map(|i| a[i * n + i]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    /// Every eigenvalue is within tolerance of zero.
    Zero,
    PositiveSemidefinite,
    NegativeSemidefinite,
    Indefinite,
}

impl Definiteness {
    fn classify<F: Scalar>(eigenvalues: &[F], threshold: F) -> Self {
        let any_pos = eigenvalues.iter().any(|&l| l > threshold);
        let any_neg = eigenvalues.iter().any(|&l| l < -threshold);
        match (any_pos, any_neg) {
            (false, false) => Definiteness::Zero,
            (false, true) => Definiteness::NegativeSemidefinite,
            (true, false) => Definiteness::PositiveSemidefinite,
            (true, true) => Definiteness::Indefinite,
        }
    }

    pub fn is_one_sided(self) -> bool {
        self != Definiteness::Indefinite
    }
}

impl fmt::Display for Definiteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Definiteness::Zero => "zero",
            Definiteness::PositiveSemidefinite => "positive semidefinite",
            Definiteness::NegativeSemidefinite => "negative semidefinite",
            Definiteness::Indefinite => "indefinite",
        })
    }
}

/// Outcome of the three distance-matrix conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport<F> {
    pub nonnegative_symmetric: bool,
    pub zero_diagonal: bool,
    /// Eigenvalues of the doubly centred-on-the-first-point matrix `B`.
    pub centered_eigenvalues: Vec<F>,
    pub centered_definiteness: Definiteness,
    /// `B` is one-sided (all eigenvalues share a sign within tolerance).
    pub conditional_semidefinite: bool,
}

impl<F> ValidityReport<F> {
    pub fn pass(&self) -> bool {
        self.nonnegative_symmetric && self.zero_diagonal && self.conditional_semidefinite
    }
}

/// `B = (I - e s^T) M (I - s e^T)`, i.e. `B_ij = M_ij - M_0j - M_i0 + M_00`.
fn centered_on_first<F: Scalar>(m: &DistanceMatrix<F>) -> Vec<F> {
    let n = m.n();
    let mut b = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = m.get(i, j) - m.get(0, j) - m.get(i, 0) + m.get(0, 0);
        }
    }
    let half = F::lit(0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (b[i * n + j] + b[j * n + i]) * half;
            b[i * n + j] = avg;
            b[j * n + i] = avg;
        }
    }
    b
}

/// Checks nonnegativity and symmetry, the zero diagonal, and one-sidedness
/// of the centred matrix. Failing conditions are reported, not raised.
pub fn check_distance_matrix<F: Scalar>(
    m: &DistanceMatrix<F>,
    tol: F,
) -> Result<ValidityReport<F>> {
    let n = m.n();
    if n < 2 {
        return Err(Error::InvalidConfig(
            "distance-matrix check needs n >= 2".into(),
        ));
    }
    let norm = m.frobenius_norm();
    let sym_tol = tol * norm.max(F::one());
    let mut nonnegative_symmetric = true;
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if v < F::zero() || (v - m.get(j, i)).abs() > sym_tol {
                nonnegative_symmetric = false;
            }
        }
    }
    let zero_diagonal = (0..n).all(|i| m.get(i, i) == F::zero());
    let b = centered_on_first(m);
    let centered_eigenvalues = symmetric_eigenvalues(n, &b, F::infinity())?;
    let centered_definiteness = Definiteness::classify(&centered_eigenvalues, tol * norm);
    Ok(ValidityReport {
        nonnegative_symmetric,
        zero_diagonal,
        conditional_semidefinite: centered_definiteness.is_one_sided(),
        centered_eigenvalues,
        centered_definiteness,
    })
}

/// Largest absolute eigenvalue.
pub fn spectral_radius<F: Scalar>(m: &DistanceMatrix<F>) -> Result<F> {
    let eig = m.eigenvalues(F::infinity())?;
    Ok(eig.iter().fold(F::zero(), |acc, l| acc.max(l.abs())))
}

/// Side-by-side eigen-summary of the view and Euclidean distance matrices of
/// one point set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport<F> {
    pub n: usize,
    pub dim: usize,
    pub tol: F,
    pub eigenvalues_view: Vec<F>,
    pub eigenvalues_euclid: Vec<F>,
    pub positive_count_view: usize,
    pub positive_count_euclid: usize,
    pub rho_view: F,
    pub rho_euclid: F,
    pub trace_view: F,
    pub trace_euclid: F,
    pub norm_view: F,
    pub norm_euclid: F,
    pub conditional_nsd_pass_view: bool,
    pub conditional_nsd_pass_euclid: bool,
}

struct Census<F> {
    eigenvalues: Vec<F>,
    positive: usize,
    rho: F,
    trace: F,
    norm: F,
    nsd: bool,
}

fn census<F: Scalar>(m: &DistanceMatrix<F>, tol: F) -> Result<Census<F>> {
    let norm = m.frobenius_norm();
    let threshold = tol * norm;
    let eigenvalues = m.eigenvalues(F::infinity())?;
    let positive = eigenvalues.iter().filter(|&&l| l > threshold).count();
    let rho = eigenvalues
        .iter()
        .fold(F::zero(), |acc, l| acc.max(l.abs()));
    let b = centered_on_first(m);
    let b_eig = symmetric_eigenvalues(m.n(), &b, F::infinity())?;
    let nsd = b_eig.iter().all(|&l| l <= threshold);
    Ok(Census {
        eigenvalues,
        positive,
        rho,
        trace: m.trace(),
        norm,
        nsd,
    })
}

/// Builds both pairwise matrices for `points` and summarizes their spectra.
/// Positive eigenvalues are counted above `tol * ||M||_F`.
pub fn spectral_report<F, P>(points: &[P], tol: F) -> Result<SpectralReport<F>>
where
    F: Scalar,
    P: AsRef<[F]> + Sync,
{
    if points.len() < 2 {
        return Err(Error::InvalidConfig(
            "spectral report needs at least 2 points".into(),
        ));
    }
    let view = census(&pairwise_distances(points, MetricKind::View)?, tol)?;
    let euclid = census(&pairwise_distances(points, MetricKind::Euclidean)?, tol)?;
    Ok(SpectralReport {
        n: points.len(),
        dim: points[0].as_ref().len(),
        tol,
        eigenvalues_view: view.eigenvalues,
        eigenvalues_euclid: euclid.eigenvalues,
        positive_count_view: view.positive,
        positive_count_euclid: euclid.positive,
        rho_view: view.rho,
        rho_euclid: euclid.rho,
        trace_view: view.trace,
        trace_euclid: euclid.trace,
        norm_view: view.norm,
        norm_euclid: euclid.norm,
        conditional_nsd_pass_view: view.nsd,
        conditional_nsd_pass_euclid: euclid.nsd,
    })
}
