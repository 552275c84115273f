//! Matricial systems: unital self-adjoint subspaces V ⊆ M_d, their matrix
//! cones M_k(V)⁺ = M_k(V) ∩ PSD, and the order and matrix norms they induce.

use crate::densela::{min_eigenvalue, solve, CMatrix, HermMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol;

const BISECTION_STEPS: usize = 60;

/// A unital self-adjoint subspace of d×d matrices given by a Hermitian basis
/// whose first element is the identity.
#[derive(Clone, Debug)]
pub struct MatricialSystem {
    d: usize,
    basis: Vec<HermMatrix>,
    /// Hilbert–Schmidt orthonormalization of `basis` (modified Gram–Schmidt).
    orthonormal: Vec<CMatrix>,
    gram: CMatrix,
}

impl MatricialSystem {
    pub fn new(basis: Vec<HermMatrix>) -> Result<Self> {
        let first = basis
            .first()
            .ok_or_else(|| Error::InvalidInput("system basis is empty".into()))?;
        let d = first.dim();
        if d == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        if let Some(bad) = basis.iter().position(|b| b.dim() != d) {
            return Err(Error::Shape(format!(
                "basis element {bad} has dimension {}, expected {d}",
                basis[bad].dim()
            )));
        }
        if first.distance(&CMatrix::identity(d)) > tol::STRUCTURAL {
            return Err(Error::InvalidInput("first basis element must be the identity".into()));
        }

        let k = basis.len();
        let gram = CMatrix::from_fn(k, k, |i, j| basis[i].hs_inner(&basis[j]));
        let smallest = min_eigenvalue(&gram);
        if smallest <= 1e-10 {
            return Err(Error::InvalidInput(format!(
                "basis is linearly dependent (smallest Gram eigenvalue {smallest:.3e})"
            )));
        }

        let mut orthonormal: Vec<CMatrix> = Vec::with_capacity(k);
        for b in &basis {
            let mut v = b.as_matrix().clone();
            for q in &orthonormal {
                let c = q.hs_inner(&v);
                v -= &q.scale_c(c);
            }
            let n = v.frobenius_norm();
            orthonormal.push(v.scale(1.0 / n));
        }

        Ok(Self {
            d,
            basis,
            orthonormal,
            gram,
        })
    }

    /// All of M_d, spanned by I, the diagonal units E_ii (i ≥ 1) and the
    /// Hermitian off-diagonal pairs.
    pub fn full(d: usize) -> Self {
        let mut basis = vec![HermMatrix::identity(d)];
        for i in 1..d {
            basis.push(HermMatrix::from_hermitian_part(&CMatrix::unit(d, i, i)));
        }
        for i in 0..d {
            for j in i + 1..d {
                let sym = &CMatrix::unit(d, i, j) + &CMatrix::unit(d, j, i);
                let mut asym = CMatrix::zeros(d, d);
                asym[(i, j)] = C64::new(0.0, -1.0);
                asym[(j, i)] = C64::new(0.0, 1.0);
                basis.push(HermMatrix::from_hermitian_part(&sym));
                basis.push(HermMatrix::from_hermitian_part(&asym));
            }
        }
        Self::new(basis).expect("full matrix algebra basis is valid")
    }

    /// Ambient dimension d.
    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    /// Dimension of the span.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[HermMatrix] {
        &self.basis
    }

    pub fn orthonormal_basis(&self) -> &[CMatrix] {
        &self.orthonormal
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.d * self.d
    }

    /// Hilbert–Schmidt orthogonal projection onto the (complex) span.
    pub fn project_onto(&self, m: &CMatrix) -> Result<CMatrix> {
        m.check_dims(self.d, self.d, "project_onto")?;
        Ok(self.project_unchecked(m))
    }

    fn project_unchecked(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.d, self.d);
        for q in &self.orthonormal {
            out += &q.scale_c(q.hs_inner(m));
        }
        out
    }

    /// Relative membership test ‖M − P(M)‖_F ≤ tol·(1 + ‖M‖_F). Matrices of
    /// the wrong size are not members.
    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        if m.rows() != self.d || m.cols() != self.d {
            return false;
        }
        self.membership_residual(m) <= tol * (1.0 + m.frobenius_norm())
    }

    fn membership_residual(&self, m: &CMatrix) -> f64 {
        m.distance(&self.project_unchecked(m))
    }

    /// Coefficients of (the projection of) `m` in the user-supplied basis.
    pub fn coordinates(&self, m: &CMatrix) -> Result<Vec<C64>> {
        m.check_dims(self.d, self.d, "coordinates")?;
        let k = self.dim();
        let rhs = CMatrix::from_fn(k, 1, |i, _| self.basis[i].hs_inner(m));
        let c = solve(&self.gram, &rhs)?;
        Ok((0..k).map(|i| c[(i, 0)]).collect())
    }

    /// Σ c_k v_k over the user-supplied basis.
    pub fn from_coordinates(&self, coords: &[C64]) -> Result<CMatrix> {
        if coords.len() != self.dim() {
            return Err(Error::Shape(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            )));
        }
        let mut out = CMatrix::zeros(self.d, self.d);
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c != ZERO {
                out += &b.scale_c(*c);
            }
        }
        Ok(out)
    }

    /// Positivity in the matrix cone at the element's level: the element is
    /// PSD up to `tol`.
    pub fn is_positive_element(&self, el: &LevelElement, tol: f64) -> Result<bool> {
        self.check_member(el)?;
        if !el
            .matrix
            .is_hermitian(tol::FEASIBILITY * (1.0 + el.matrix.frobenius_norm()))
        {
            return Ok(false);
        }
        Ok(min_eigenvalue(&el.matrix) >= -tol)
    }

    /// ‖v‖_k = inf{ r : [[rI, v], [v*, rI]] ∈ M_2k(V)⁺ } by bisection.
    pub fn matrix_norm(&self, el: &LevelElement) -> Result<f64> {
        self.check_member(el)?;
        let v = &el.matrix;
        let n = v.rows();
        let vh = v.adjoint();
        Ok(bisect(v.frobenius_norm(), |r| {
            let mut block = CMatrix::zeros(2 * n, 2 * n);
            block.set_block(0, 0, &CMatrix::identity(n).scale(r));
            block.set_block(n, n, &CMatrix::identity(n).scale(r));
            block.set_block(0, n, v);
            block.set_block(n, 0, &vh);
            min_eigenvalue(&block) >= 0.0
        }))
    }

    /// ‖v‖_h = inf{ r : −rI ≤ v ≤ rI } by bisection.
    pub fn order_norm_h(&self, v: &HermMatrix) -> Result<f64> {
        if v.dim() != self.d {
            return Err(Error::Shape(format!(
                "element has dimension {}, expected {}",
                v.dim(),
                self.d
            )));
        }
        if !self.contains(v, tol::FEASIBILITY) {
            return Err(Error::InvalidInput("element is not in the system".into()));
        }
        let id = CMatrix::identity(self.d);
        Ok(bisect(v.frobenius_norm(), |r| {
            let ri = id.scale(r);
            min_eigenvalue(&(&ri - v.as_matrix())) >= 0.0 && min_eigenvalue(&(&ri + v.as_matrix())) >= 0.0
        }))
    }

    fn check_member(&self, el: &LevelElement) -> Result<()> {
        let kd = el.level * self.d;
        el.matrix.check_dims(kd, kd, "level element")?;
        let residual = self.level_residual(el.level, &el.matrix);
        if residual > tol::FEASIBILITY * (1.0 + el.matrix.frobenius_norm()) {
            return Err(Error::InvalidInput(format!(
                "element is not in M_{}(V) (residual {residual:.3e})",
                el.level
            )));
        }
        Ok(())
    }

    fn level_residual(&self, level: usize, m: &CMatrix) -> f64 {
        let d = self.d;
        let mut sq = 0.0;
        for i in 0..level {
            for j in 0..level {
                let b = m.block(i * d, j * d, d, d);
                sq += self.membership_residual(&b).powi(2);
            }
        }
        sq.sqrt()
    }
}

/// Smallest r in [0, hi] with `feasible(r)`, assuming monotonicity.
fn bisect(hi: f64, feasible: impl Fn(f64) -> bool) -> f64 {
    if hi == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// An element of M_k(V): a kd×kd matrix whose d×d blocks lie in V.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelElement {
    pub level: usize,
    pub matrix: CMatrix,
}

impl LevelElement {
    /// Checks membership in M_k(V) with relative tolerance 1e−8.
    pub fn new(system: &MatricialSystem, level: usize, matrix: CMatrix) -> Result<Self> {
        let el = Self { level, matrix };
        system.check_member(&el)?;
        Ok(el)
    }

    /// Level-1 element.
    pub fn scalar(system: &MatricialSystem, matrix: CMatrix) -> Result<Self> {
        Self::new(system, 1, matrix)
    }

    /// No membership check; the element is then interpreted in M_k(M_d).
    pub fn unchecked(level: usize, matrix: CMatrix) -> Self {
        Self { level, matrix }
    }
}
