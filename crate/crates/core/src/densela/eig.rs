//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot a_pq with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation that zeroes it.
//! Sweeps repeat until the off-diagonal mass is at rounding level.

use super::matrix::{CMatrix, HermMatrix, C64, ZERO};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition H = U diag(values) U†, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub values: Vec<f64>,
    /// Columns are eigenvectors.
    pub vectors: CMatrix,
}

impl HermEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// U diag(f(λ)) U†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in fv.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let uik = u[(i, k)] * lam;
                if uik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += uik * u[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a certified Hermitian matrix.
pub fn herm_eig(h: &HermMatrix) -> HermEigen {
    jacobi(h.as_matrix())
}

/// Same as [`herm_eig`] for a matrix the caller knows to be Hermitian; only
/// the upper triangle and the real part of the diagonal are read.
pub(crate) fn herm_eig_unchecked(m: &CMatrix) -> HermEigen {
    jacobi(m)
}

/// Eigenvalues only, ascending.
pub(crate) fn herm_eigvals_unchecked(m: &CMatrix) -> Vec<f64> {
    jacobi(m).values
}

fn jacobi(m: &CMatrix) -> HermEigen {
    let n = m.rows();
    debug_assert!(m.is_square());
    let mut a = vec![ZERO; n * n];
    for i in 0..n {
        a[i * n + i] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            a[i * n + j] = m[(i, j)];
            a[j * n + i] = m[(i, j)].conj();
        }
    }
    let mut v = CMatrix::identity(n);

    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let threshold = (f64::EPSILON * f64::EPSILON * 1e-2) * total;
    let negligible = f64::EPSILON * 1e-3 * total.sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= threshold || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                if g < negligible {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                let phase = apq / g;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U restricted to (p,q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;

                // A <- A U (columns p, q)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * upp + akq * uqp;
                    a[k * n + q] = akp * upq + akq * uqq;
                }
                // A <- U† A (rows p, q)
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = upp.conj() * apk + uqp.conj() * aqk;
                    a[q * n + k] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(app - t * g, 0.0);
                a[q * n + q] = C64::new(aqq + t * g, 0.0);

                // V <- V U
                let vd = v.data_mut();
                for k in 0..n {
                    let vkp = vd[k * n + p];
                    let vkq = vd[k * n + q];
                    vd[k * n + p] = vkp * upp + vkq * uqp;
                    vd[k * n + q] = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densela::matrix::I;

    fn herm(rows: &[Vec<C64>]) -> HermMatrix {
        HermMatrix::try_from_matrix(CMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn pauli_z_and_x() {
        let z = HermMatrix::try_from_matrix(CMatrix::diag_real(&[1.0, -1.0])).unwrap();
        let e = herm_eig(&z);
        assert_eq!(e.values, vec![-1.0, 1.0]);

        let x = HermMatrix::try_from_matrix(CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        let e = herm_eig(&x);
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_has_repeated_eigenvalue() {
        let e = herm_eig(&HermMatrix::identity(2));
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn complex_offdiagonal_reconstructs() {
        let o = C64::new(0.0, 0.0);
        let h = herm(&[
            vec![C64::new(2.0, 0.0), I * 1.5, C64::new(0.3, -0.2)],
            vec![-I * 1.5, C64::new(-1.0, 0.0), o],
            vec![C64::new(0.3, 0.2), o, C64::new(0.5, 0.0)],
        ]);
        let e = herm_eig(&h);
        let r = e.reconstruct_with(|x| x);
        assert!(r.distance(&h) < 1e-13);
        let u = &e.vectors;
        assert!(u.adjoint().matmul(u).distance(&CMatrix::identity(3)) < 1e-13);
    }
}
