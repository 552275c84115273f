//! Exact constructors for the two-dimensional worked example: Pauli algebra,
//! the four subsystems of M_2, the rebit dynamics and their extensions.

use serde::{Deserialize, Serialize};

use crate::cpmaps::SuperOp;
use crate::densela::{CMatrix, HermMatrix, C64, I, ONE, ZERO};
use crate::dynamics::{gksl_generator, Generator, SubsystemGenerator};
use crate::error::{Error, Result};
use crate::opsys::MatricialSystem;

/// The Pauli matrices together with the identity.
#[derive(Clone, Debug)]
pub struct Pauli {
    pub i: CMatrix,
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl Pauli {
    pub fn new() -> Self {
        Self {
            i: CMatrix::identity(2),
            x: CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
            y: CMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
            z: CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]),
        }
    }

    /// (I, X, Y, Z).
    pub fn all(&self) -> [&CMatrix; 4] {
        [&self.i, &self.x, &self.y, &self.z]
    }

    fn herm(m: &CMatrix) -> HermMatrix {
        HermMatrix::try_from_matrix(m.clone()).expect("Pauli matrices are Hermitian")
    }
}

impl Default for Pauli {
    fn default() -> Self {
        Self::new()
    }
}

fn system_from(mats: &[&CMatrix]) -> MatricialSystem {
    MatricialSystem::new(mats.iter().map(|m| Pauli::herm(m)).collect()).expect("catalog bases are valid")
}

/// span{I, X, Z}: the real symmetric 2×2 matrices.
pub fn rebit_system() -> MatricialSystem {
    let p = Pauli::new();
    system_from(&[&p.i, &p.x, &p.z])
}

/// span{I, Z}: the diagonal 2×2 matrices.
pub fn diagonal_system() -> MatricialSystem {
    let p = Pauli::new();
    system_from(&[&p.i, &p.z])
}

/// span{I} ⊂ M_2.
pub fn unit_system() -> MatricialSystem {
    system_from(&[&CMatrix::identity(2)])
}

/// M_2 with the Pauli basis.
pub fn qubit_system() -> MatricialSystem {
    let p = Pauli::new();
    system_from(&p.all())
}

/// Real symmetric d×d matrices: I, E_kk for k ≥ 1, and E_ij + E_ji for i < j.
pub fn real_symmetric_system(d: usize) -> MatricialSystem {
    let mut basis = vec![HermMatrix::identity(d)];
    for k in 1..d {
        basis.push(Pauli::herm(&CMatrix::unit(d, k, k)));
    }
    for i in 0..d {
        for j in i + 1..d {
            basis.push(Pauli::herm(&(&CMatrix::unit(d, i, j) + &CMatrix::unit(d, j, i))));
        }
    }
    MatricialSystem::new(basis).expect("real symmetric basis is valid")
}

/// Metadata on the injective envelope of a catalog system. Not computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub label: String,
    pub dim: usize,
    pub commutative: bool,
}

#[derive(Clone, Debug)]
pub struct CatalogCase {
    pub name: &'static str,
    pub system: MatricialSystem,
    pub envelope: Envelope,
}

/// The four subsystems of M_2 up to isomorphism, with their envelopes.
pub fn four_case_catalog() -> Vec<CatalogCase> {
    let env = |label: &str, dim, commutative| Envelope {
        label: label.into(),
        dim,
        commutative,
    };
    vec![
        CatalogCase {
            name: "unit",
            system: unit_system(),
            envelope: env("C", 1, true),
        },
        CatalogCase {
            name: "diagonal",
            system: diagonal_system(),
            envelope: env("C^2", 2, true),
        },
        CatalogCase {
            name: "rebit",
            system: rebit_system(),
            envelope: env("M_2", 4, false),
        },
        CatalogCase {
            name: "M2",
            system: qubit_system(),
            envelope: env("M_2", 4, false),
        },
    ]
}

/// aI + bX + cZ.
pub fn rebit_element(a: f64, b: f64, c: f64) -> CMatrix {
    let p = Pauli::new();
    &(&p.i.scale(a) + &p.x.scale(b)) + &p.z.scale(c)
}

/// A[aI + bX + cZ] = ω(−cX + bZ).
pub fn rebit_rotation(omega: f64) -> SubsystemGenerator {
    let p = Pauli::new();
    SubsystemGenerator::new(
        rebit_system(),
        vec![CMatrix::zeros(2, 2), p.z.scale(omega), p.x.scale(-omega)],
    )
    .expect("rotation action stays in the rebit")
}

/// A[aI + bX + cZ] = −Δ(bX + cZ).
pub fn rebit_dissipative(delta: f64) -> Result<SubsystemGenerator> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!("Δ = {delta} must be positive")));
    }
    let p = Pauli::new();
    SubsystemGenerator::new(
        rebit_system(),
        vec![CMatrix::zeros(2, 2), p.x.scale(-delta), p.z.scale(-delta)],
    )
}

/// i(ω/2)[Y, ·].
pub fn rotation_generator(omega: f64) -> Generator {
    let p = Pauli::new();
    let h = Pauli::herm(&p.y.scale(omega / 2.0));
    gksl_generator(2, &h, &[]).expect("valid GKSL data")
}

/// Conjugation by exp(−iθY/2): rotates (X, Z) coefficients by θ.
pub fn rotation_map(theta: f64) -> SuperOp {
    let p = Pauli::new();
    let u = &p.i.scale((theta / 2.0).cos()) - &p.y.scale_c(I * (theta / 2.0).sin());
    SuperOp::conjugation(&u).expect("square unitary")
}

/// G₁[B] = Δ(½XBX + ½ZBZ − B).
pub fn g1(delta: f64) -> Generator {
    let p = Pauli::new();
    gksl_generator(
        2,
        &HermMatrix::zeros(2),
        &[(p.x.clone(), delta / 2.0), (p.z.clone(), delta / 2.0)],
    )
    .expect("valid GKSL data")
}

/// Prefactor c in G₂[B] = cΔ(⅓XBX + ⅓YBY + ⅓ZBZ − B).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum G2Prefactor {
    /// 3/4, the value for which G₂ acts as −Δ on X, Y and Z.
    Derived,
    /// 4/3, which scales every traceless Pauli by −16Δ/9 instead.
    Printed,
}

impl G2Prefactor {
    pub fn value(self) -> f64 {
        match self {
            G2Prefactor::Derived => 0.75,
            G2Prefactor::Printed => 4.0 / 3.0,
        }
    }
}

/// G₂ with the derived prefactor; see [`g2_with`].
pub fn g2(delta: f64) -> Generator {
    g2_with(delta, G2Prefactor::Derived)
}

pub fn g2_with(delta: f64, prefactor: G2Prefactor) -> Generator {
    let p = Pauli::new();
    let r = prefactor.value() * delta / 3.0;
    gksl_generator(
        2,
        &HermMatrix::zeros(2),
        &[(p.x.clone(), r), (p.y.clone(), r), (p.z.clone(), r)],
    )
    .expect("valid GKSL data")
}

/// Δ/2·(Y·Y − ·): kills Y and decays X, Z at rate Δ.
pub fn dephasing_y(delta: f64) -> Generator {
    let p = Pauli::new();
    gksl_generator(2, &HermMatrix::zeros(2), &[(p.y.clone(), delta / 2.0)]).expect("valid GKSL data")
}

/// Coefficient of Y in a 2×2 matrix: tr(YM)/2.
pub fn y_coefficient(m: &CMatrix) -> C64 {
    Pauli::new().y.hs_inner(m) / 2.0
}
