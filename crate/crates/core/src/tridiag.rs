use crate::{Error, Result};

/// Solve a tridiagonal system in place (Thomas algorithm, no pivoting).
///
/// `lower[i]` couples row `i` to `i-1` (`lower[0]` unused), `upper[i]`
/// couples row `i` to `i+1` (last entry unused). `rhs` is overwritten
/// with the solution.
pub(crate) fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if beta.abs() < 1e-300 || !beta.is_finite() {
        return Err(Error::SingularJacobian { row: 0, pivot: beta });
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i];
        if beta.abs() < 1e-300 || !beta.is_finite() {
            return Err(Error::SingularJacobian { row: i, pivot: beta });
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i + 1] * rhs[i + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] → x = [1 1 1]
        let lower = [0.0, -1.0, -1.0];
        let diag = [2.0, 2.0, 2.0];
        let upper = [-1.0, -1.0, 0.0];
        let mut rhs = [1.0, 0.0, 1.0];
        solve(&lower, &diag, &upper, &mut rhs).unwrap();
        for v in rhs {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let mut rhs = [1.0, 1.0];
        let err = solve(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &mut rhs).unwrap_err();
        assert!(matches!(err, Error::SingularJacobian { row: 0, .. }));
    }
}
