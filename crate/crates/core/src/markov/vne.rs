//! Pearson correlation, density operators and von Neumann entropy.

use nalgebra::{DMatrix, SymmetricEigen};

use super::xlogx;
use crate::error::{invalid, Error, Result};

const TRACE_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;

/// Pearson correlation matrix between equal-length vectors.
///
/// A pair involving a constant vector has correlation 0; the diagonal is 1.
pub fn pearson_matrix<V: AsRef<[f64]>>(vectors: &[V]) -> Result<DMatrix<f64>> {
    let n = vectors.len();
    if n < 2 {
        return Err(invalid("need at least two vectors"));
    }
    let len = vectors[0].as_ref().len();
    if len < 2 {
        return Err(invalid("vectors need at least two entries"));
    }
    let centered: Vec<Option<(Vec<f64>, f64)>> = vectors
        .iter()
        .map(|v| {
            let v = v.as_ref();
            if v.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    got: v.len(),
                });
            }
            Ok(center(v))
        })
        .collect::<Result<_>>()?;
    let mut r = DMatrix::identity(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let c = match (&centered[i], &centered[j]) {
                (Some((a, na)), Some((b, nb))) => {
                    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                    (dot / (na * nb)).clamp(-1.0, 1.0)
                }
                _ => 0.0,
            };
            r[(i, j)] = c;
            r[(j, i)] = c;
        }
    }
    Ok(r)
}

/// Deviations from the mean and their Euclidean norm; `None` for constant input.
fn center(v: &[f64]) -> Option<(Vec<f64>, f64)> {
    let first = v[0];
    if v.iter().all(|&x| x == first) {
        return None;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let dev: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let norm = dev.iter().map(|x| x * x).sum::<f64>().sqrt();
    Some((dev, norm))
}

/// Symmetric, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    rho: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl DensityOperator {
    /// Validates an explicit matrix against the density-operator invariants.
    pub fn new(rho: DMatrix<f64>) -> Result<Self> {
        let n = rho.nrows();
        if n == 0 || rho.ncols() != n {
            return Err(invalid("density operator must be square and non-empty"));
        }
        if rho.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invariant("non-finite entry".into()));
        }
        let asym = (&rho - rho.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::Invariant(format!("not symmetric ({asym:e})")));
        }
        let trace = rho.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::Invariant(format!("trace {trace} != 1")));
        }
        let eig = SymmetricEigen::new(rho.clone());
        let min = eig.eigenvalues.min();
        if min < -PSD_TOL {
            return Err(Error::Invariant(format!("negative eigenvalue {min:e}")));
        }
        // rounding noise below the threshold is clipped to zero
        let eigenvalues = eig
            .eigenvalues
            .iter()
            .map(|&l| if l < PSD_TOL { 0.0 } else { l })
            .collect();
        Ok(DensityOperator { rho, eigenvalues })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Eigenvalues with those below `1e-9` set to zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// `rho = R / N` for an `N x N` correlation matrix `R`.
pub fn density_operator(r: &DMatrix<f64>) -> Result<DensityOperator> {
    let n = r.nrows();
    if n == 0 || r.ncols() != n {
        return Err(invalid("correlation matrix must be square"));
    }
    let trace = r.trace();
    if (trace - n as f64).abs() > TRACE_TOL {
        return Err(invalid(format!("trace(R) = {trace}, expected {n}")));
    }
    DensityOperator::new(r / n as f64)
}

/// `||B - I||_2`, the largest singular value of `B - I`.
pub fn spectral_norm_from_identity(b: &DMatrix<f64>) -> f64 {
    let n = b.nrows();
    let x = b - DMatrix::<f64>::identity(n, n);
    x.singular_values().max()
}

/// Partial sum of the Mercator series for `log(B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MercatorLog {
    pub log: DMatrix<f64>,
    /// Frobenius norm of the last term added.
    pub residual: f64,
    pub terms: usize,
}

/// `log(B) = sum_{k>=1} (-1)^(k+1) (B - I)^k / k`, valid for `||B - I||_2 < 1`.
///
/// Stops once a term's Frobenius norm drops below `tol` or after `k_max` terms.
pub fn matrix_log_mercator(b: &DMatrix<f64>, k_max: usize, tol: f64) -> Result<MercatorLog> {
    let n = b.nrows();
    if n == 0 || b.ncols() != n {
        return Err(invalid("matrix must be square"));
    }
    let norm = spectral_norm_from_identity(b);
    if norm >= 1.0 {
        return Err(Error::SeriesDivergent { norm });
    }
    let x = b - DMatrix::<f64>::identity(n, n);
    let mut power = x.clone();
    let mut log = DMatrix::zeros(n, n);
    let mut residual = f64::INFINITY;
    let mut terms = 0;
    for k in 1..=k_max.max(1) {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = &power * (sign / k as f64);
        residual = term.norm();
        log += term;
        terms = k;
        if residual < tol {
            break;
        }
        power = &power * &x;
    }
    Ok(MercatorLog {
        log,
        residual,
        terms,
    })
}

/// Principal logarithm of a symmetric positive-definite matrix via its
/// eigendecomposition.
pub fn matrix_log_symmetric(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(b.clone());
    if eig.eigenvalues.min() <= 0.0 {
        return Err(invalid("matrix is not positive definite"));
    }
    let log_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::ln));
    Ok(&eig.eigenvectors * log_diag * eig.eigenvectors.transpose())
}

/// Von Neumann entropy `-sum_j lambda_j ln lambda_j` in nats.
pub fn vne(rho: &DensityOperator) -> f64 {
    (-rho.eigenvalues().iter().map(|&l| xlogx(l)).sum::<f64>()).max(0.0)
}

/// `-tr(rho log rho)` with the logarithm from the Mercator series.
pub fn vne_mercator(rho: &DensityOperator, k_max: usize, tol: f64) -> Result<f64> {
    let log = matrix_log_mercator(rho.matrix(), k_max, tol)?.log;
    Ok(-(rho.matrix() * log).trace())
}
