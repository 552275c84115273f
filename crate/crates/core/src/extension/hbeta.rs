//! H_β[φ] = Σ_{k≥0} β(1−β)ᵏ φ^{k+1}.

use serde::{Deserialize, Serialize};

use crate::cpmaps::SuperOp;
use crate::densela::{solve, CMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HbetaMode {
    /// Partial sums up to the first K with (1−β)^{K+1} ≤ tol.
    Series,
    /// β·φ∘(id − (1−β)φ)⁻¹.
    Closed,
}

/// For UCP φ the neglected tail of the series has Frobenius norm at most
/// d·(1−β)^{K+1}, since every UCP Choi matrix is PSD with trace d.
pub fn hbeta(phi: &SuperOp, beta: f64, mode: HbetaMode, tol: f64) -> Result<SuperOp> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidInput(format!("β = {beta} must lie in (0, 1]")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidInput(format!("tol = {tol} must lie in (0, 1)")));
    }
    if !phi.is_ucp(tol) {
        return Err(Error::InvalidInput("H_β needs a UCP argument".into()));
    }
    let d = phi.d();
    let t = phi.transfer();
    let n = t.rows();
    let q = 1.0 - beta;
    let out = match mode {
        HbetaMode::Series => {
            let mut acc = CMatrix::zeros(n, n);
            let mut power = t.clone();
            let mut coeff = beta;
            let mut tail = q;
            loop {
                acc += &power.scale(coeff);
                if tail <= tol {
                    break;
                }
                power = power.matmul(&t);
                coeff *= q;
                tail *= q;
            }
            acc
        }
        HbetaMode::Closed => {
            let a = &CMatrix::identity(n) - &t.scale(q);
            solve(&a, &t)?.scale(beta)
        }
    };
    SuperOp::from_transfer(d, &out)
}
