//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! Each sweep visits the strictly upper triangle row by row and annihilates
//! every off-diagonal element with a plane rotation, accumulating the
//! rotations into the eigenvector matrix. The visiting order is fixed, so the
//! result is bit-identical for identical input.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default relative off-diagonal tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Sweeps attempted before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Largest `|s[i][j] - s[j][i]|` accepted as symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Eigenpairs of a symmetric matrix.
///
/// `values` is sorted non-increasing and column `j` of `vectors` pairs with
/// `values[j]`. Columns are orthonormal, and in every column the first entry
/// of largest magnitude is non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Eigendecomposition of the symmetric matrix `s`.
///
/// Iterates until the off-diagonal Frobenius norm drops to `tol` times the
/// Frobenius norm of `s`. The input is symmetrized as `(s + sᵀ) / 2` before
/// rotating, after checking that it is symmetric within
/// [`SYMMETRY_TOLERANCE`].
pub fn jacobi_eigh(s: &Matrix, tol: f64) -> Result<EigenDecomposition> {
    if !s.is_square() {
        return Err(Error::shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::param(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = s.rows();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::Symmetry {
            max_asymmetry: asym,
            tolerance: SYMMETRY_TOLERANCE,
        });
    }

    let mut a = Matrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let mut v = Matrix::identity(n);
    let threshold = tol * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > threshold {
            return Err(Error::Convergence {
                sweeps: MAX_SWEEPS,
                off_diagonal: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their diagonal order
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));

    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    for j in 0..n {
        let mut lead = 0;
        for i in 1..n {
            if vectors[(i, j)].abs() > vectors[(lead, j)].abs() {
                lead = i;
            }
        }
        if vectors[(lead, j)] < 0.0 {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Applies the rotation that zeroes `a[p][q]`, updating `v` in place.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        // theta^2 would overflow; t ~ 1 / (2 theta)
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp;
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn diagonal_input_is_returned_unchanged() {
        let e = jacobi_eigh(&m(&[&[2.0, 0.0], &[0.0, 1.0]]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(e.values, vec![2.0, 1.0]);
        assert_eq!(e.vectors, Matrix::identity(2));
    }

    #[test]
    fn swap_matrix() {
        // characteristic polynomial l^2 - 1: eigenpairs 1 -> (1,1)/sqrt2, -1 -> (1,-1)/sqrt2
        let e = jacobi_eigh(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), DEFAULT_TOLERANCE).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        let expected = m(&[&[r, r], &[r, -r]]);
        assert!(e.vectors.max_abs_diff(&expected) < 1e-14, "{:?}", e.vectors);
    }

    #[test]
    fn covariance_of_two_image_example() {
        // l^2 - l = 0 -> values 1, 0; top vector (1,-1)/sqrt2
        let e = jacobi_eigh(&m(&[&[0.5, -0.5], &[-0.5, 0.5]]), DEFAULT_TOLERANCE).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!(e.values[1].abs() < 1e-14);
        assert!((e.vectors[(0, 0)] - r).abs() < 1e-14);
        assert!((e.vectors[(1, 0)] + r).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_square_and_asymmetric() {
        assert!(matches!(
            jacobi_eigh(&Matrix::zeros(2, 3), DEFAULT_TOLERANCE),
            Err(Error::Shape(_))
        ));
        let asym = m(&[&[1.0, 2.0], &[2.1, 1.0]]);
        assert!(matches!(
            jacobi_eigh(&asym, DEFAULT_TOLERANCE),
            Err(Error::Symmetry { .. })
        ));
        assert!(matches!(
            jacobi_eigh(&Matrix::identity(2), 0.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn tiny_asymmetry_is_tolerated() {
        let s = m(&[&[1.0, 0.5], &[0.5 + 1e-12, 2.0]]);
        assert!(jacobi_eigh(&s, DEFAULT_TOLERANCE).is_ok());
    }

    #[test]
    fn zero_and_one_by_one() {
        let e = jacobi_eigh(&Matrix::zeros(3, 3), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        assert_eq!(e.vectors, Matrix::identity(3));
        let e = jacobi_eigh(&m(&[&[-4.0]]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(e.values, vec![-4.0]);
        assert_eq!(e.vectors, Matrix::identity(1));
    }
}
