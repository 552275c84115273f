//! LU factorization with partial pivoting.

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Condition estimates beyond this are reported as singular.
const MAX_CONDITION: f64 = 1e14;

struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    min_pivot: f64,
}

fn factor(a: &CMatrix) -> Lu {
    let n = a.rows();
    let mut lu = a.data().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let mut p = k;
        let mut best = lu[k * n + k].norm();
        for i in k + 1..n {
            let v = lu[i * n + k].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        min_pivot = min_pivot.min(best);
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[k * n + k];
        if pivot == ZERO {
            continue;
        }
        for i in k + 1..n {
            let f = lu[i * n + k] / pivot;
            lu[i * n + k] = f;
            if f == ZERO {
                continue;
            }
            for j in k + 1..n {
                let u = lu[k * n + j];
                lu[i * n + j] -= f * u;
            }
        }
    }
    Lu { n, lu, perm, min_pivot }
}

impl Lu {
    fn solve_in_place(&self, b: &mut CMatrix) {
        let n = self.n;
        let m = b.cols();
        let src = b.clone();
        for (i, &pi) in self.perm.iter().enumerate() {
            for j in 0..m {
                b[(i, j)] = src[(pi, j)];
            }
        }
        for j in 0..m {
            for i in 0..n {
                let mut s = b[(i, j)];
                for k in 0..i {
                    s -= self.lu[i * n + k] * b[(k, j)];
                }
                b[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = b[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[i * n + k] * b[(k, j)];
                }
                b[(i, j)] = s / self.lu[i * n + i];
            }
        }
    }
}

/// Solves A X = B. Fails with [`Error::Singular`] when the 1-norm condition
/// estimate of A exceeds 1e14.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.check_square("coefficient matrix")?;
    if b.rows() != n {
        return Err(Error::Shape(format!(
            "right-hand side has {} rows, expected {n}",
            b.rows()
        )));
    }
    let f = factor(a);
    let anorm = a.norm_1();
    if f.min_pivot == 0.0 || !f.min_pivot.is_finite() {
        return Err(Error::Singular { cond: f64::INFINITY });
    }
    let mut inv = CMatrix::identity(n);
    f.solve_in_place(&mut inv);
    let cond = anorm * inv.norm_1();
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::Singular { cond });
    }
    let mut x = b.clone();
    f.solve_in_place(&mut x);
    Ok(x)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    solve(a, &CMatrix::identity(a.rows()))
}
