//! Dense complex linear algebra kernel.

mod eig;
mod expm;
mod lu;
mod matrix;

pub use eig::{herm_eig, HermEigen};
pub use expm::expm;
pub use lu::{inverse, solve};
pub use matrix::{CMatrix, HermMatrix, C64};

pub(crate) use eig::{herm_eig_unchecked, herm_eigvals_unchecked};
pub(crate) use matrix::{I, ONE, ZERO};

/// Frobenius-nearest positive semidefinite matrix: U diag(max(λ, 0)) U†.
pub fn psd_project(h: &HermMatrix) -> HermMatrix {
    HermMatrix::from_hermitian_part(&psd_project_unchecked(h))
}

pub(crate) fn psd_project_unchecked(m: &CMatrix) -> CMatrix {
    let e = herm_eig_unchecked(m);
    if e.min() >= 0.0 {
        return m.hermitian_part();
    }
    e.reconstruct_with(|l| l.max(0.0))
}

/// Largest singular value, from the spectrum of M†M.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let g = if m.rows() >= m.cols() {
        m.adjoint().matmul(m)
    } else {
        m.matmul(&m.adjoint())
    };
    herm_eigvals_unchecked(&g)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    herm_eigvals_unchecked(&m.hermitian_part())
        .first()
        .copied()
        .unwrap_or(0.0)
}
