//! Dense LU factorization with partial pivoting, generic over the scalar.
//!
//! Graphs here are small; robustness beats scalability.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub(crate) struct LuFactors<R> {
    lu: Vec<Vec<R>>,
    perm: Vec<usize>,
    n: usize,
}

#[allow(clippy::needless_range_loop)] // split-borrow elimination kernel
pub(crate) fn factor<R: Scalar>(mut a: Vec<Vec<R>>) -> Result<LuFactors<R>> {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(R::zero(), |m, &x| m.max(x.abs()));
    let threshold = scale.max(R::one()) * R::epsilon() * R::of_usize(16 * n.max(1));
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty pivot range");
        if a[pivot_row][col].abs() <= threshold {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot_row);
        perm.swap(col, pivot_row);
        let pivot = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            a[row][col] = factor;
            for k in col + 1..n {
                let delta = factor * a[col][k];
                a[row][k] = a[row][k] - delta;
            }
        }
    }
    Ok(LuFactors { lu: a, perm, n })
}

impl<R: Scalar> LuFactors<R> {
    pub fn solve(&self, b: &[R]) -> Vec<R> {
        let n = self.n;
        let mut x: Vec<R> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            for k in 0..i {
                let delta = self.lu[i][k] * x[k];
                x[i] = x[i] - delta;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let delta = self.lu[i][k] * x[k];
                x[i] = x[i] - delta;
            }
            x[i] = x[i] / self.lu[i][i];
        }
        x
    }
}

/// Solves `a x = b` for a single right-hand side.
pub(crate) fn solve_one<R: Scalar>(a: Vec<Vec<R>>, b: &[R]) -> Result<Vec<R>> {
    Ok(factor(a)?.solve(b))
}
