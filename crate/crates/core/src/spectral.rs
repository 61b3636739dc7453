//! Dense symmetric eigenvalue kernel (cyclic Jacobi rotations).
//!
//! Matrices are passed as row-major slices of length `n * n`. The sizes seen
//! in practice are tiny (2x2 to 4x4), so the classic cyclic sweep is more
//! than fast enough and needs no external linear algebra.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Largest `|M v - lambda v|` (infinity norm) over the returned pairs.
    pub residual: f64,
    /// Number of completed sweeps.
    pub iterations: usize,
}

impl SpectrumResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

fn side(m: &[f64]) -> usize {
    let n = (m.len() as f64).sqrt().round() as usize;
    assert_eq!(n * n, m.len(), "matrix slice is not square");
    n
}

/// Largest `|m[i][j] - m[j][i]|`.
pub fn asymmetry(m: &[f64]) -> f64 {
    let n = side(m);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[i * n + j] - m[j * n + i]).abs());
        }
    }
    worst
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a symmetric matrix.
///
/// The input is symmetrised (averaged with its transpose) after the
/// symmetry check, then rotated until the off-diagonal Frobenius norm drops
/// below `tol` (or below rounding level for badly scaled input). Fails with
/// [`Error::NoConvergence`] after 100 sweeps or when the final eigenpair
/// residual exceeds `tol`.
pub fn symmetric_eigenvalues(m: &[f64], tol: f64) -> Result<SpectrumResult> {
    let n = side(m);
    let asym = asymmetry(m);
    if asym > tol {
        return Err(Error::NonSymmetric { asymmetry: asym });
    }
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m[i * n + j] + m[j * n + i]);
        }
    }
    let sym = a.clone();
    let scale = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = (0.01 * tol).max(4.0 * f64::EPSILON * scale);

    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut sweeps = 0;
    while off_diagonal_norm(&a, n) > target {
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- J^T A J, touching rows/cols p and q only.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[i * n + i], i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut residual = 0.0f64;
    for &(lambda, col) in &pairs {
        for i in 0..n {
            let mv: f64 = (0..n).map(|k| sym[i * n + k] * v[k * n + col]).sum();
            residual = residual.max((mv - lambda * v[i * n + col]).abs());
        }
    }

    let result = SpectrumResult {
        eigenvalues: pairs.into_iter().map(|p| p.0).collect(),
        residual,
        iterations: sweeps,
    };
    if residual > tol.max(16.0 * f64::EPSILON * scale) {
        return Err(Error::NoConvergence {
            iterations: sweeps,
            residual,
        });
    }
    Ok(result)
}

/// `m^T m`, computed so that the result is bitwise symmetric.
pub fn gram(m: &[f64]) -> Vec<f64> {
    let n = side(m);
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = (0..n).map(|k| m[k * n + i] * m[k * n + j]).sum();
        }
    }
    g
}

/// Operator 2-norm: square root of the largest eigenvalue of `m^T m`.
pub fn spectral_norm(m: &[f64]) -> Result<f64> {
    let g = gram(m);
    let scale: f64 = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let spec = symmetric_eigenvalues(&g, 1e-12 * scale.max(1.0))?;
    Ok(spec.max().max(0.0).sqrt())
}

/// Loewner positivity: symmetric within `tol` and smallest eigenvalue `>= -tol`.
pub fn loewner_positive(m: &[f64], tol: f64) -> bool {
    match symmetric_eigenvalues(m, tol) {
        Ok(spec) => spec.min() >= -tol,
        Err(_) => false,
    }
}

/// How far `m` is from the positive semidefinite cone: the asymmetry when
/// it is not symmetric, otherwise `max(0, -lambda_min)`.
pub fn loewner_violation(m: &[f64], tol: f64) -> f64 {
    let asym = asymmetry(m);
    if asym > tol {
        return asym;
    }
    match symmetric_eigenvalues(m, tol) {
        Ok(spec) => (-spec.min()).max(0.0),
        Err(_) => f64::INFINITY,
    }
}
