//! Linear maps on M_d stored by their Choi matrix.
//!
//! Convention: `choi = Σ_ij E_ij ⊗ φ(E_ij)`, so the d×d block (i, j) of the
//! Choi matrix is φ(E_ij). Maps act in the Heisenberg picture: Kraus data
//! {K_k, w_k} gives φ(B) = Σ w_k K_k† B K_k, unital when Σ w_k K_k†K_k = I.
//!
//! Composition and exponentials use the transfer matrix T acting on the
//! row-major vectorization, vec(B)[k·d + l] = B[k, l], related to the Choi
//! matrix by T[(k,l), (i,j)] = choi[(i,k), (j,l)].

use crate::densela::{herm_eig_unchecked, CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::opsys::LevelElement;

/// Tag carried by serialized Choi matrices.
pub const CHOI_CONVENTION: &str = "col-stack-blocks-Eij";

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    d: usize,
    choi: CMatrix,
}

/// Outcome of a complete-positivity check.
#[derive(Clone, Debug)]
pub struct CpReport {
    pub is_cp: bool,
    pub min_choi_eigenvalue: f64,
    /// Present iff `is_cp` is false: the level-d element Σ E_ij ⊗ E_ij, whose
    /// image under φ⁽ᵈ⁾ is the Choi matrix itself.
    pub witness: Option<LevelElement>,
}

impl SuperOp {
    pub fn new(d: usize, choi: CMatrix) -> Result<Self> {
        choi.check_dims(d * d, d * d, "Choi matrix")?;
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(Self { d, choi })
    }

    /// Builds φ from its action on matrix units.
    pub fn from_fn(d: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let img = f(&CMatrix::unit(d, i, j));
                assert_eq!((img.rows(), img.cols()), (d, d), "image has wrong shape");
                choi.set_block(i * d, j * d, &img);
            }
        }
        Self { d, choi }
    }

    pub fn from_transfer(d: usize, t: &CMatrix) -> Result<Self> {
        t.check_dims(d * d, d * d, "transfer matrix")?;
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        choi[(i * d + k, j * d + l)] = t[(k * d + l, i * d + j)];
                    }
                }
            }
        }
        Ok(Self { d, choi })
    }

    pub fn transfer(&self) -> CMatrix {
        let d = self.d;
        let mut t = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        t[(k * d + l, i * d + j)] = self.choi[(i * d + k, j * d + l)];
                    }
                }
            }
        }
        t
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, CMatrix::clone)
    }

    pub fn zero(d: usize) -> Self {
        Self {
            d,
            choi: CMatrix::zeros(d * d, d * d),
        }
    }

    /// B ↦ Bᵀ. Its Choi matrix is the swap operator.
    pub fn transpose_map(d: usize) -> Self {
        Self::from_fn(d, CMatrix::transpose)
    }

    /// B ↦ K† B K.
    pub fn conjugation(k: &CMatrix) -> Result<Self> {
        let d = k.check_square("conjugating matrix")?;
        let kh = k.adjoint();
        Ok(Self::from_fn(d, |b| kh.matmul(b).matmul(k)))
    }

    /// φ(B) = Σ w_k K_k† B K_k.
    pub fn from_kraus(d: usize, kraus: &[CMatrix], weights: &[f64]) -> Result<Self> {
        if kraus.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} Kraus operators but {} weights",
                kraus.len(),
                weights.len()
            )));
        }
        for (n, k) in kraus.iter().enumerate() {
            k.check_dims(d, d, &format!("Kraus operator {n}"))?;
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidInput(format!("Kraus weight {w} is not positive")));
        }
        // choi = Σ w (I ⊗ K†) |Ω̃⟩⟨Ω̃| (I ⊗ K), with Ω̃ = Σ e_i ⊗ e_i.
        let mut choi = CMatrix::zeros(d * d, d * d);
        for (k, &w) in kraus.iter().zip(weights) {
            let kh = k.adjoint();
            // v = (I ⊗ K†) Ω̃ has entries v[(i, a)] = K†[a, i].
            let v: Vec<C64> = (0..d * d).map(|r| kh[(r % d, r / d)]).collect();
            for r in 0..d * d {
                let vr = v[r] * w;
                for c in 0..d * d {
                    choi[(r, c)] += vr * v[c].conj();
                }
            }
        }
        Ok(Self { d, choi })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> CMatrix {
        self.choi
    }

    /// φ(E_ij).
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        self.choi.block(i * self.d, j * self.d, self.d, self.d)
    }

    pub fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        m.check_dims(self.d, self.d, "apply")?;
        Ok(self.apply_unchecked(m))
    }

    pub(crate) fn apply_unchecked(&self, m: &CMatrix) -> CMatrix {
        let d = self.d;
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let c = m[(i, j)];
                if c == ZERO {
                    continue;
                }
                for k in 0..d {
                    for l in 0..d {
                        out[(k, l)] += c * self.choi[(i * d + k, j * d + l)];
                    }
                }
            }
        }
        out
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Self::from_transfer(self.d, &self.transfer().matmul(&other.transfer()))
    }

    /// φᵏ, with φ⁰ = id.
    pub fn power(&self, k: usize) -> Self {
        let t = self.transfer();
        let mut acc = CMatrix::identity(self.d * self.d);
        for _ in 0..k {
            acc = acc.matmul(&t);
        }
        Self::from_transfer(self.d, &acc).expect("square transfer")
    }

    /// a·self + b·other.
    pub fn linear_combination(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            d: self.d,
            choi: &self.choi.scale_c(a) + &other.choi.scale_c(b),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            d: self.d,
            choi: self.choi.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(ONE, other, ONE)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(ONE, other, -ONE)
    }

    /// Frobenius distance between Choi (equivalently transfer) matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.d, other.d, "dimension mismatch");
        self.choi.distance(&other.choi)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.choi.frobenius_norm()
    }

    /// Hilbert–Schmidt adjoint φ*, defined by tr(φ*(A)† B) = tr(A† φ(B)).
    pub fn hs_adjoint(&self) -> Self {
        Self::from_transfer(self.d, &self.transfer().adjoint()).expect("square transfer")
    }

    /// Applies id_k ⊗ φ blockwise to a kd×kd matrix.
    pub fn amplification_apply(&self, k: usize, m: &CMatrix) -> Result<CMatrix> {
        let d = self.d;
        m.check_dims(k * d, k * d, "amplification input")?;
        let mut out = CMatrix::zeros(k * d, k * d);
        for a in 0..k {
            for b in 0..k {
                let blk = self.apply_unchecked(&m.block(a * d, b * d, d, d));
                out.set_block(a * d, b * d, &blk);
            }
        }
        Ok(out)
    }

    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.choi.is_hermitian(tol)
    }

    /// Complete positivity through the Choi matrix: CP iff the smallest Choi
    /// eigenvalue is ≥ −tol·(1 + ‖choi‖_F). Positivity at level d suffices.
    pub fn is_completely_positive(&self, tol: f64) -> CpReport {
        let scale = 1.0 + self.choi.frobenius_norm();
        let herm_ok = self.choi.is_hermitian(tol * scale);
        let min = herm_eig_unchecked(&self.choi.hermitian_part()).min();
        let is_cp = herm_ok && min >= -tol * scale;
        let witness = (!is_cp).then(|| LevelElement::unchecked(self.d, max_entangled(self.d)));
        CpReport {
            is_cp,
            min_choi_eigenvalue: min,
            witness,
        }
    }

    /// ‖φ(I) − I‖_F ≤ tol.
    pub fn is_unital(&self, tol: f64) -> bool {
        self.unitality_defect() <= tol
    }

    pub fn unitality_defect(&self) -> f64 {
        let id = CMatrix::identity(self.d);
        self.apply_unchecked(&id).distance(&id)
    }

    pub fn is_ucp(&self, tol: f64) -> bool {
        self.is_unital(tol) && self.is_completely_positive(tol).is_cp
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::Shape(format!("maps act on M_{} and M_{}", self.d, other.d)))
        }
    }
}

/// Σ_ij E_ij ⊗ E_ij, the unnormalized maximally entangled projector d|Ω⟩⟨Ω|.
pub fn max_entangled(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = ONE;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Pauli;
    use crate::densela::{herm_eig, HermMatrix, I};

    #[test]
    fn identity_from_kraus() {
        let id = SuperOp::from_kraus(2, &[CMatrix::identity(2)], &[1.0]).unwrap();
        assert!(id.distance(&SuperOp::identity(2)) < 1e-15);
        assert_eq!(id.choi(), &max_entangled(2));
        let e = herm_eig(&HermMatrix::try_from_matrix(id.choi().clone()).unwrap());
        assert!((e.values[3] - 2.0).abs() < 1e-14 && e.values[0].abs() < 1e-14);
    }

    #[test]
    fn conjugation_by_x_flips_z_and_y() {
        let p = Pauli::new();
        let cx = SuperOp::from_kraus(2, std::slice::from_ref(&p.x), &[1.0]).unwrap();
        assert!(cx.apply(&p.z).unwrap().distance(&-&p.z) < 1e-15);
        assert!(cx.apply(&p.y).unwrap().distance(&-&p.y) < 1e-15);
        assert!(cx.distance(&SuperOp::conjugation(&p.x).unwrap()) < 1e-15);
    }

    #[test]
    fn g1_interior_map_on_y() {
        let p = Pauli::new();
        let phi = SuperOp::from_kraus(2, &[p.x.clone(), p.z.clone()], &[0.5, 0.5]).unwrap();
        // Oracle: direct 2x2 products.
        let direct = &p.x.matmul(&p.y).matmul(&p.x).scale(0.5) + &p.z.matmul(&p.y).matmul(&p.z).scale(0.5);
        assert!(direct.distance(&-&p.y) < 1e-15);
        assert!(phi.apply(&p.y).unwrap().distance(&direct) < 1e-15);
        assert!(phi.is_completely_positive(1e-12).is_cp);
    }

    #[test]
    fn apply_matches_choi_blocks() {
        let p = Pauli::new();
        let phi = SuperOp::from_kraus(2, &[p.x.clone(), &p.y + &p.z], &[0.3, 0.2]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let e = CMatrix::unit(2, i, j);
                assert_eq!(phi.apply(&e).unwrap(), phi.block(i, j));
            }
        }
        assert!(phi.apply(&CMatrix::identity(3)).is_err());
    }

    #[test]
    fn compose_examples() {
        let p = Pauli::new();
        let cx = SuperOp::conjugation(&p.x).unwrap();
        let cz = SuperOp::conjugation(&p.z).unwrap();
        let id = SuperOp::identity(2);
        assert!(id.compose(&cz).unwrap().distance(&cz) < 1e-15);
        assert!(cx.compose(&cx).unwrap().distance(&id) < 1e-15);
        // Oracle: (XZ) Y (ZX), computed directly.
        let xz = p.x.matmul(&p.z);
        let oracle = xz.matmul(&p.y).matmul(&xz.adjoint());
        assert!(oracle.distance(&p.y) < 1e-15);
        let c = cx.compose(&cz).unwrap();
        assert!(c.apply(&p.y).unwrap().distance(&oracle) < 1e-15);
        assert!(cx.compose(&SuperOp::identity(3)).is_err());
    }

    #[test]
    fn transfer_roundtrip_and_composition_order() {
        let p = Pauli::new();
        let a = SuperOp::from_kraus(2, &[p.x.clone(), p.y.clone()], &[0.7, 0.1]).unwrap();
        let b = SuperOp::from_kraus(2, &[&p.z + &p.i.scale(0.5)], &[1.0]).unwrap();
        assert!(SuperOp::from_transfer(2, &a.transfer()).unwrap().distance(&a) == 0.0);
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 0.5, j as f64 - 0.25));
        let ab = a.compose(&b).unwrap();
        let direct = a.apply(&b.apply(&m).unwrap()).unwrap();
        assert!(ab.apply(&m).unwrap().distance(&direct) < 1e-14);
    }

    #[test]
    fn cp_examples() {
        let id = SuperOp::identity(2);
        let r = id.is_completely_positive(1e-12);
        assert!(r.is_cp && r.witness.is_none() && r.min_choi_eigenvalue.abs() < 1e-14);

        // Oracle: the Choi matrix of the transpose is the swap, spectrum ±1.
        let t = SuperOp::transpose_map(2);
        let swap = CMatrix::from_fn(4, 4, |r, c| if c == (r % 2) * 2 + r / 2 { ONE } else { ZERO });
        assert_eq!(t.choi(), &swap);
        let r = t.is_completely_positive(1e-12);
        assert!(!r.is_cp);
        assert!((r.min_choi_eigenvalue + 1.0).abs() < 1e-14);
        let w = r.witness.unwrap();
        let img = t.amplification_apply(2, &w.matrix).unwrap();
        assert_eq!(&img, t.choi());
    }

    #[test]
    fn unitality_examples() {
        let p = Pauli::new();
        assert!(SuperOp::identity(2).is_unital(1e-12));
        assert!(SuperOp::conjugation(&p.x).unwrap().is_unital(1e-12));
        assert!(!SuperOp::identity(2).scale(0.5).is_unital(1e-12));
    }

    #[test]
    fn ucp_examples() {
        let p = Pauli::new();
        assert!(SuperOp::identity(2).is_ucp(1e-12));
        assert!(!SuperOp::transpose_map(2).is_ucp(1e-12));
        let th: f64 = 0.8;
        let u = &p.i.scale((th / 2.0).cos()) - &p.y.scale_c(I * (th / 2.0).sin());
        assert!(SuperOp::conjugation(&u).unwrap().is_ucp(1e-12));
    }

    #[test]
    fn amplification_examples() {
        let p = Pauli::new();
        let m = CMatrix::from_fn(6, 6, |i, j| C64::new((i * 6 + j) as f64, -(i as f64)));
        assert_eq!(SuperOp::identity(3).amplification_apply(2, &m).unwrap(), m);

        let cx = SuperOp::conjugation(&p.x).unwrap();
        let input = CMatrix::unit(2, 0, 0).kron(&p.z);
        let expected = CMatrix::unit(2, 0, 0).kron(&-&p.z);
        assert!(cx.amplification_apply(2, &input).unwrap().distance(&expected) < 1e-15);
        assert!(cx.amplification_apply(2, &CMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn hermiticity_preservation_examples() {
        let p = Pauli::new();
        assert!(SuperOp::identity(2).is_hermiticity_preserving(1e-12));
        let times_i = SuperOp::from_fn(2, |b| b.scale_c(I));
        assert!(!times_i.is_hermiticity_preserving(1e-12));
        let k = SuperOp::from_kraus(2, &[&p.x + &p.y.scale_c(I)], &[2.0]).unwrap();
        assert!(k.is_hermiticity_preserving(1e-12));
    }

    #[test]
    fn kraus_shape_errors() {
        assert!(SuperOp::from_kraus(2, &[CMatrix::identity(3)], &[1.0]).is_err());
        assert!(SuperOp::from_kraus(2, &[CMatrix::identity(2)], &[1.0, 2.0]).is_err());
        assert!(SuperOp::from_kraus(2, &[CMatrix::identity(2)], &[-1.0]).is_err());
    }
}
