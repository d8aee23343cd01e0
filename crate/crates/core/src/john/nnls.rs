//! Lawson–Hanson active-set nonnegative least squares.

use nalgebra::{DMatrix, DVector};

/// Solves `min ‖A x − b‖₂` subject to `x ≥ 0`.
///
/// `tol` is the dual-feasibility threshold: the solver stops once no inactive
/// column has gradient component above `tol`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut active = vec![false; n];
    let max_outer = 3 * n.max(1) + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let Some(t) = (0..n)
            .filter(|&j| !active[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)))
        else {
            break;
        };
        active[t] = true;

        for _ in 0..=n {
            let idx: Vec<usize> = (0..n).filter(|&j| active[j]).collect();
            let s = restricted_lstsq(a, b, &idx);
            if idx.iter().zip(s.iter()).all(|(_, &v)| v > 0.0) {
                x.fill(0.0);
                for (&j, &v) in idx.iter().zip(s.iter()) {
                    x[j] = v;
                }
                break;
            }
            // Step towards s until the first active coordinate hits zero.
            let mut alpha = f64::INFINITY;
            for (&j, &v) in idx.iter().zip(s.iter()) {
                if v <= 0.0 {
                    let denom = x[j] - v;
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            let alpha = if alpha.is_finite() { alpha } else { 0.0 };
            for (&j, &v) in idx.iter().zip(s.iter()) {
                x[j] += alpha * (v - x[j]);
            }
            for &j in &idx {
                if x[j] <= 1e-15 {
                    x[j] = 0.0;
                    active[j] = false;
                }
            }
            if !active.iter().any(|&a| a) {
                break;
            }
        }
    }
    x
}

fn restricted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    let sub = a.select_columns(idx);
    sub.svd(true, true)
        .solve(b, 1e-13)
        .unwrap_or_else(|_| DVector::zeros(idx.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_solution_is_returned_when_nonnegative() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = nnls(&a, &b, 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clamps_negative_components() {
        // Unconstrained optimum is (-1, 1); the constrained one is (0, 1/2).
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![0.0, 1.0]);
        let x = nnls(&a, &b, 1e-12);
        assert!(x[0].abs() < 1e-12);
        assert!((x[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_target_gives_zero() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let x = nnls(&a, &DVector::zeros(2), 1e-12);
        assert_eq!(x, DVector::zeros(2));
    }
}
