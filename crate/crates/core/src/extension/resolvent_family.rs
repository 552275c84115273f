//! Generator extension through a family of extended resolvents: extend
//! ωR(ω, A) to a UCP map F(ω), transport it to F(λ) = H_{λ/ω}[F(ω)], and read
//! the generator off G = λ(id − F(λ)⁻¹).

use serde::{Deserialize, Serialize};

use super::dykstra::StartPoint;
use super::hbeta::{hbeta, HbetaMode};
use super::{solve, ExtensionOptions, ExtensionProblem, ExtensionReport, StartStrategy, Target};
use crate::cpmaps::SuperOp;
use crate::densela::{inverse, CMatrix};
use crate::dynamics::{ccp_violation, Generator, SubsystemGenerator};
use crate::error::{Error, Result};
use crate::extension::dykstra::Cone;

/// Number of doublings of ω before giving up.
const OMEGA_DOUBLINGS: u32 = 10;

#[derive(Clone, Debug)]
pub struct ResolventFamily {
    pub omega: f64,
    pub f_omega: SuperOp,
    pub grid: Vec<f64>,
    /// F(λ) for each grid point.
    pub maps: Vec<SuperOp>,
    /// G_λ = λ(id − F(λ)⁻¹) for each grid point.
    pub generators: Vec<SuperOp>,
    pub diagnostics: FamilyDiagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDiagnostics {
    /// max over the grid of the distance of F(λ) from the UCP maps, measured
    /// as max(unitality defect, −min Choi eigenvalue).
    pub ucp_defect: f64,
    /// max_λ max_k ‖F(λ)(v_k) − λR(λ, A)(v_k)‖_F.
    pub restriction_error: f64,
    /// max over grid pairs of ‖(F(λ)/λ − F(μ)/μ)/(λ − μ) + F(λ)F(μ)/(λμ)‖_F.
    pub hilbert_residual: f64,
    /// max over grid pairs of ‖G_λ − G_μ‖_F.
    pub generator_spread: f64,
    pub ccp_violation: f64,
    /// ω values tried, ending with the accepted one.
    pub omegas_tried: Vec<f64>,
}

fn ucp_defect(phi: &SuperOp) -> f64 {
    let cp = phi.is_completely_positive(0.0);
    phi.unitality_defect().max(-cp.min_choi_eigenvalue)
}

/// Route through the resolvent family. The solver starts from the identity
/// map, whose projection onto the agreement set is ωR(ω, A) whenever A is
/// the restriction of a generator that vanishes off V; random options
/// perturb that start.
pub fn extend_via_resolvent_family(
    prob: &ExtensionProblem,
    omega: f64,
    grid: &[f64],
) -> Result<(Generator, ResolventFamily, ExtensionReport)> {
    let Target::Generator(a) = &prob.target else {
        return Err(Error::InvalidInput("resolvent family needs a generator target".into()));
    };
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidInput(format!("ω = {omega} must be positive")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("grid must be nonempty".into()));
    }
    if let Some(bad) = grid.iter().find(|&&l| !(l > 0.0 && l <= omega)) {
        return Err(Error::InvalidInput(format!("grid point {bad} outside (0, ω]")));
    }
    let tol = prob.options.tol;
    let cap = omega * f64::from(1u32 << OMEGA_DOUBLINGS);
    let mut current = omega;
    let mut tried = Vec::new();
    let mut last_violation = f64::INFINITY;
    while current <= cap {
        tried.push(current);
        let (generator, mut family, report) = attempt(prob, a, current, grid)?;
        last_violation = family.diagnostics.ccp_violation;
        if last_violation <= tol {
            family.diagnostics.omegas_tried = tried;
            return Ok((Generator::with_tol(generator, tol), family, report));
        }
        current *= 2.0;
    }
    Err(Error::OmegaCapReached {
        omega: tried.last().copied().unwrap_or(omega),
        violation: last_violation,
    })
}

fn attempt(
    prob: &ExtensionProblem,
    a: &SubsystemGenerator,
    omega: f64,
    grid: &[f64],
) -> Result<(SuperOp, ResolventFamily, ExtensionReport)> {
    let d = prob.d();
    let opts = &prob.options;
    let identity = SuperOp::identity(d).into_choi();
    let start = match opts.start {
        StartStrategy::Random => StartPoint::Perturbed {
            base: Some(identity),
            seed: opts.seed,
            scale: opts.perturbation,
        },
        StartStrategy::Deterministic | StartStrategy::Identity => StartPoint::Matrix(identity),
    };
    let images = a.scaled_resolvent_images(omega)?;
    let map_prob = ExtensionProblem::map(
        a.system().clone(),
        images,
        ExtensionOptions {
            start: StartStrategy::Identity,
            ..opts.clone()
        },
    )?;
    let (f_omega, mut report) = solve(&map_prob, Cone::Psd, start)?;
    report.start = opts.start;
    if !report.converged {
        return Err(Error::Infeasible(format!(
            "ωR(ω, A) at ω = {omega} has no UCP extension (cone residual {:.3e})",
            report.cone_residual
        )));
    }

    let n = d * d;
    let mut maps = Vec::with_capacity(grid.len());
    let mut generators = Vec::with_capacity(grid.len());
    let mut ucp = 0.0f64;
    let mut restriction = 0.0f64;
    for &lambda in grid {
        let f = hbeta(&f_omega, lambda / omega, HbetaMode::Closed, opts.tol)?;
        ucp = ucp.max(ucp_defect(&f));
        for (v, target) in a.system().basis().iter().zip(a.scaled_resolvent_images(lambda)?) {
            restriction = restriction.max(f.apply_unchecked(v).distance(&target));
        }
        let g = (&CMatrix::identity(n) - &inverse(&f.transfer())?).scale(lambda);
        generators.push(SuperOp::from_transfer(d, &g)?);
        maps.push(f);
    }

    let mut hilbert = 0.0f64;
    let mut spread = 0.0f64;
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            spread = spread.max(generators[i].distance(&generators[j]));
            let (l, m) = (grid[i], grid[j]);
            if l != m {
                let rl = maps[i].transfer().scale(1.0 / l);
                let rm = maps[j].transfer().scale(1.0 / m);
                let lhs = &(&rl - &rm).scale(1.0 / (l - m)) + &rl.matmul(&rm);
                hilbert = hilbert.max(lhs.frobenius_norm());
            }
        }
    }

    // Average the recovered generators; they agree up to rounding.
    let mut sum = CMatrix::zeros(n, n);
    for g in &generators {
        sum += g.choi();
    }
    let mean = SuperOp::new(d, sum.scale(1.0 / generators.len() as f64).hermitian_part())?;
    let family = ResolventFamily {
        omega,
        f_omega,
        grid: grid.to_vec(),
        maps,
        generators,
        diagnostics: FamilyDiagnostics {
            ucp_defect: ucp,
            restriction_error: restriction,
            hilbert_residual: hilbert,
            generator_spread: spread,
            ccp_violation: ccp_violation(&mean),
            omegas_tried: Vec::new(),
        },
    };
    Ok((mean, family, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, Pauli};
    use crate::dynamics::evolve;
    use crate::opsys::MatricialSystem;

    fn grid(omega: f64, n: usize) -> Vec<f64> {
        (1..=n).map(|k| omega * k as f64 / n as f64).collect()
    }

    #[test]
    fn full_system_recovers_the_generator() {
        let g1 = catalog::g1(1.0);
        let a = g1.restrict_to(&MatricialSystem::full(2)).unwrap();
        let prob = ExtensionProblem::generator(a, ExtensionOptions::default()).unwrap();
        let (g, family, _) = extend_via_resolvent_family(&prob, 3.0, &grid(3.0, 4)).unwrap();
        assert!(g.op().distance(g1.op()) < 1e-8);
        assert!(family.diagnostics.generator_spread < 1e-7);
    }

    #[test]
    fn rotation_matches_the_unique_extension() {
        let prob = ExtensionProblem::generator(catalog::rebit_rotation(1.0), ExtensionOptions::default()).unwrap();
        let (g, family, report) = extend_via_resolvent_family(&prob, 4.0, &grid(4.0, 8)).unwrap();
        assert!(report.converged);
        assert!(g.op().distance(catalog::rotation_generator(1.0).op()) < 1e-6);
        let diag = &family.diagnostics;
        assert!(
            diag.generator_spread <= 1e-7 && diag.hilbert_residual <= 1e-8,
            "{diag:?}"
        );
        assert!(diag.restriction_error <= 1e-8 && diag.ucp_defect <= 1e-8);
    }

    #[test]
    fn dissipative_extension_is_ccp_and_decays() {
        let delta = 1.0;
        let prob = ExtensionProblem::generator(catalog::rebit_dissipative(delta).unwrap(), ExtensionOptions::default())
            .unwrap();
        let (g, _, _) = extend_via_resolvent_family(&prob, 10.0 * delta, &grid(10.0, 5)).unwrap();
        assert!(g.is_certified());
        let p = Pauli::new();
        for t in [0.5, 2.0] {
            let phi = evolve(&g, t).unwrap();
            for v in [&p.x, &p.z] {
                assert!(phi.apply(v).unwrap().distance(&v.scale((-delta * t).exp())) < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_grid() {
        let prob = ExtensionProblem::generator(catalog::rebit_rotation(1.0), ExtensionOptions::default()).unwrap();
        assert!(extend_via_resolvent_family(&prob, 2.0, &[3.0]).is_err());
        assert!(extend_via_resolvent_family(&prob, 2.0, &[]).is_err());
        assert!(extend_via_resolvent_family(&prob, -1.0, &[0.5]).is_err());
    }
}
