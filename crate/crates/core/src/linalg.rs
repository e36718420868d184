//! Dense symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! The matrices here are covariance matrices of at most a few dozen channels,
//! so a textbook Jacobi sweep is plenty fast, fully deterministic, and keeps
//! the crate free of external LAPACK backends. Output ordering and eigenvector
//! signs are canonicalized so downstream artifacts are reproducible bit for
//! bit.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Relative symmetry tolerance for input checking.
const SYMMETRY_TOL: f64 = 1e-9;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to the
/// matrix Frobenius norm.
const CONVERGENCE_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a symmetric matrix.
///
/// `values[j]` pairs with eigenvector column `vectors.column(j)`. Pairs are
/// sorted by descending eigenvalue; exact ties keep their pre-sort order.
/// Each eigenvector's sign is fixed so its largest-magnitude component is
/// positive (first such component on magnitude ties).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

/// Jacobi eigendecomposition of a symmetric matrix.
pub fn sym_eigen(matrix: &Array2<f64>) -> Result<SymEigen> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: format!("expected square matrix, got {} x {}", n, matrix.ncols()),
        });
    }
    if !matrix.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteSamples { context: "eigendecomposition input".into() });
    }
    let scale = matrix.iter().map(|v| v * v).sum::<f64>().sqrt();
    for p in 0..n {
        for q in (p + 1)..n {
            if (matrix[[p, q]] - matrix[[q, p]]).abs() > SYMMETRY_TOL * scale.max(1.0) {
                return Err(Error::DimensionMismatch {
                    context: format!("matrix not symmetric at ({p}, {q})"),
                });
            }
        }
    }

    let mut a = matrix.clone();
    // Force exact symmetry so rotations stay consistent.
    for p in 0..n {
        for q in (p + 1)..n {
            let m = 0.5 * (a[[p, q]] + a[[q, p]]);
            a[[p, q]] = m;
            a[[q, p]] = m;
        }
    }
    let mut v = Array2::<f64>::eye(n);

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += 2.0 * a[[p, q] ] * a[[p, q]];
                }
            }
            s.sqrt()
        };
        if off <= CONVERGENCE_TOL * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[q, q]];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[[j, j]].partial_cmp(&a[[i, i]]).unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut values = Vec::with_capacity(n);
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (out_col, &src_col) in order.iter().enumerate() {
        values.push(a[[src_col, src_col]]);
        // Canonical sign: the largest-magnitude component is positive.
        let mut best = 0;
        for k in 1..n {
            if v[[k, src_col]].abs() > v[[best, src_col]].abs() {
                best = k;
            }
        }
        let flip = if v[[best, src_col]] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            vectors[[k, out_col]] = flip * v[[k, src_col]];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Quadratic form `w' M w`.
pub fn quad_form(w: &[f64], m: &Array2<f64>) -> f64 {
    let n = w.len();
    debug_assert_eq!(m.nrows(), n);
    debug_assert_eq!(m.ncols(), n);
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += m[[i, j]] * w[j];
        }
        acc += w[i] * row;
    }
    acc
}
