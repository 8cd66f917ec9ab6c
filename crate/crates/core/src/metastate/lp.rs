//! Dense tableau simplex for small problems `max c.x  s.t.  A x <= b, x >= 0`
//! with `b >= 0`, so the slack basis is feasible from the start. Bland's rule
//! keeps the heavily degenerate problems we feed it from cycling.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    /// One multiplier per constraint row, all nonnegative.
    pub duals: Vec<f64>,
    #[allow(dead_code)]
    pub objective: f64,
}

pub(crate) fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::LpFailure("inconsistent dimensions".into()));
    }
    if b.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::LpFailure("right-hand side must be nonnegative".into()));
    }
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 50 * (n + m) * (n + m) + 100;
    for _ in 0..max_pivots {
        let Some(col) = (0..n + m).find(|&j| t[m][j] < -PIVOT_EPS) else {
            let mut x = vec![0.0; n];
            for (i, &v) in basis.iter().enumerate() {
                if v < n {
                    x[v] = t[i][width - 1];
                }
            }
            let duals = (0..m).map(|i| t[m][n + i].max(0.0)).collect();
            return Ok(LpSolution {
                x,
                duals,
                objective: t[m][width - 1],
            });
        };
        let mut pivot: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][col] > PIVOT_EPS {
                let ratio = t[i][width - 1] / t[i][col];
                let better = match pivot {
                    None => true,
                    Some((r, best)) => ratio < best - PIVOT_EPS || (ratio <= best + PIVOT_EPS && basis[i] < basis[r]),
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = pivot else {
            return Err(Error::LpFailure("problem is unbounded".into()));
        };
        let p = t[row][col];
        for v in t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row {
                let f = r[col];
                if f != 0.0 {
                    for (v, pv) in r.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        basis[row] = col;
    }
    Err(Error::LpFailure("pivot limit reached".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let sol = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert_abs_diff_eq!(sol.objective, 36.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 6.0, epsilon = 1e-12);
        // duals (0, 3/2, 1) reproduce the objective through b
        let dual_obj: f64 = sol.duals.iter().zip([4.0, 12.0, 18.0]).map(|(y, b)| y * b).sum();
        assert_abs_diff_eq!(dual_obj, 36.0, epsilon = 1e-12);
    }

    #[test]
    fn unbounded_is_an_error() {
        assert!(maximize(&[1.0], &[vec![-1.0]], &[1.0]).is_err());
    }

    #[test]
    fn degenerate_origin_terminates() {
        // max t s.t. t - x <= 0, t + x <= 0, x <= 1 : optimum 0 at a degenerate vertex
        let sol = maximize(
            &[1.0, 0.0],
            &[vec![1.0, -1.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            &[0.0, 0.0, 1.0],
        )
        .unwrap();
        assert_abs_diff_eq!(sol.objective, 0.0, epsilon = 1e-14);
    }
}
