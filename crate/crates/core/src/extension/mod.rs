//! Extension of UCP maps, generators, semigroups and groups from a subsystem
//! V ⊆ M_d to all of M_d.

mod dykstra;
mod group;
mod hbeta;
mod resolvent_family;
mod rigidity;

use serde::{Deserialize, Serialize};

pub use group::{extend_group, GroupExtension};
pub use hbeta::{hbeta, HbetaMode};
pub use resolvent_family::{extend_via_resolvent_family, ResolventFamily};
pub use rigidity::{rigidity_probe, RigidityReport};

use crate::cpmaps::SuperOp;
use crate::densela::CMatrix;
use crate::dynamics::{Generator, SubsystemGenerator};
use crate::error::{Error, Result};
use crate::opsys::MatricialSystem;
use crate::tol;
use dykstra::{AffineSet, Cone, StartPoint};

/// Where the solver starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartStrategy {
    /// The zero Choi matrix.
    Deterministic,
    /// Zero plus a seeded Hermitian Gaussian perturbation.
    Random,
    /// The Choi matrix of the identity map.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub start: StartStrategy,
    /// Standard deviation of each coordinate of a random start.
    pub perturbation: f64,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self {
            tol: tol::FEASIBILITY,
            max_iter: 200_000,
            seed: 0,
            start: StartStrategy::Deterministic,
            perturbation: 1.0,
        }
    }
}

impl ExtensionOptions {
    pub fn random(seed: u64) -> Self {
        Self {
            seed,
            start: StartStrategy::Random,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidInput(format!("tol = {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return Err(Error::InvalidInput("perturbation must be nonnegative".into()));
        }
        Ok(())
    }

    fn start_point(&self, d: usize) -> StartPoint {
        match self.start {
            StartStrategy::Deterministic => StartPoint::Zero,
            StartStrategy::Identity => StartPoint::Matrix(SuperOp::identity(d).into_choi()),
            StartStrategy::Random => StartPoint::Perturbed {
                base: None,
                seed: self.seed,
                scale: self.perturbation,
            },
        }
    }
}

/// What is being extended.
#[derive(Clone, Debug)]
pub enum Target {
    /// Images φ(v_k) of the system basis.
    Map(Vec<CMatrix>),
    Generator(SubsystemGenerator),
}

#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub system: MatricialSystem,
    pub target: Target,
    pub options: ExtensionOptions,
}

impl ExtensionProblem {
    /// Map case; requires one d×d image per basis element and φ(I) = I.
    pub fn map(system: MatricialSystem, images: Vec<CMatrix>, options: ExtensionOptions) -> Result<Self> {
        options.validate()?;
        if images.len() != system.dim() {
            return Err(Error::Shape(format!(
                "{} images for a {}-dimensional system",
                images.len(),
                system.dim()
            )));
        }
        let d = system.ambient_dim();
        for (k, img) in images.iter().enumerate() {
            img.check_dims(d, d, &format!("image {k}"))?;
        }
        if images[0].distance(&CMatrix::identity(d)) > options.tol {
            return Err(Error::InvalidInput("map must be unital: φ(I) = I".into()));
        }
        Ok(Self {
            system,
            target: Target::Map(images),
            options,
        })
    }

    /// Map case from a map on all of M_d, restricted to the system.
    pub fn restriction_of(system: MatricialSystem, phi: &SuperOp, options: ExtensionOptions) -> Result<Self> {
        let images = system
            .basis()
            .iter()
            .map(|b| phi.apply(b))
            .collect::<Result<Vec<_>>>()?;
        Self::map(system, images, options)
    }

    /// Generator case; A(I) = 0 is enforced by [`SubsystemGenerator`].
    pub fn generator(a: SubsystemGenerator, options: ExtensionOptions) -> Result<Self> {
        options.validate()?;
        Ok(Self {
            system: a.system().clone(),
            target: Target::Generator(a),
            options,
        })
    }

    pub fn d(&self) -> usize {
        self.system.ambient_dim()
    }

    pub fn with_options(&self, options: ExtensionOptions) -> Self {
        Self {
            options,
            ..self.clone()
        }
    }

    fn targets(&self) -> &[CMatrix] {
        match &self.target {
            Target::Map(images) => images,
            Target::Generator(a) => a.action(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub iterations: usize,
    pub cone_residual: f64,
    pub affine_residual: f64,
    /// max_k ‖ψ(v_k) − target_k‖_F, measured by applying the result.
    pub restriction_error: f64,
    pub converged: bool,
    /// The solver gave up because its iterates stopped moving far from the
    /// cone, which signals an empty intersection.
    pub stalled: bool,
    pub start: StartStrategy,
    pub seed: u64,
}

fn solve(prob: &ExtensionProblem, cone: Cone, start: StartPoint) -> Result<(SuperOp, ExtensionReport)> {
    let d = prob.d();
    let inputs: Vec<CMatrix> = prob.system.basis().iter().map(|b| b.as_matrix().clone()).collect();
    let targets = prob.targets();
    let affine = AffineSet::agreement(d, &inputs, targets)?;
    let opts = &prob.options;
    let out = dykstra::run(&affine, &cone, d * d, &start, opts.tol, opts.max_iter);
    let op = SuperOp::new(d, out.choi)?;
    let restriction_error = inputs
        .iter()
        .zip(targets)
        .map(|(v, t)| op.apply_unchecked(v).distance(t))
        .fold(0.0, f64::max);
    let report = ExtensionReport {
        iterations: out.iterations,
        cone_residual: out.cone_residual,
        affine_residual: out.affine_residual,
        restriction_error,
        converged: out.converged && restriction_error <= opts.tol,
        stalled: out.stalled,
        start: opts.start,
        seed: opts.seed,
    };
    Ok((op, report))
}

/// UCP ψ on M_d agreeing with φ on V, found by Dykstra projections between
/// the PSD cone and the agreement subspace. A report with `converged = false`
/// means φ is not UCP on V or the budget was too small.
pub fn extend_ucp_map(prob: &ExtensionProblem) -> Result<(SuperOp, ExtensionReport)> {
    if !matches!(prob.target, Target::Map(_)) {
        return Err(Error::InvalidInput("extend_ucp_map needs a map target".into()));
    }
    solve(prob, Cone::Psd, prob.options.start_point(prob.d()))
}

/// Conditionally completely positive G on M_d with G(I) = 0 agreeing with A
/// on V. The span of V is then invariant under G, so e^{tG} extends e^{tA}.
pub fn extend_generator(prob: &ExtensionProblem) -> Result<(Generator, ExtensionReport)> {
    if !matches!(prob.target, Target::Generator(_)) {
        return Err(Error::InvalidInput("extend_generator needs a generator target".into()));
    }
    let (op, report) = solve(prob, Cone::ccp(prob.d()), prob.options.start_point(prob.d()))?;
    Ok((Generator::with_tol(op, prob.options.tol), report))
}

/// [ψ⁰ = id, ψ¹, …, ψⁿ] for a UCP extension ψ of φ.
pub fn extend_discrete(prob: &ExtensionProblem, n: usize) -> Result<(Vec<SuperOp>, ExtensionReport)> {
    let (psi, report) = extend_ucp_map(prob)?;
    if !report.converged {
        return Err(Error::Infeasible(format!(
            "no UCP extension found (cone residual {:.3e} after {} iterations)",
            report.cone_residual, report.iterations
        )));
    }
    let mut powers = Vec::with_capacity(n + 1);
    powers.push(SuperOp::identity(prob.d()));
    for k in 1..=n {
        let next = powers[k - 1].compose(&psi)?;
        powers.push(next);
    }
    Ok((powers, report))
}

/// Runs `f` for each seed on its own thread; results come back in seed order.
pub(crate) fn fan_out<T: Send>(seeds: &[u64], f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = seeds.iter().map(|&seed| s.spawn(move || f(seed))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, Pauli};
    use crate::dynamics::{evolve, is_conditionally_completely_positive};

    #[test]
    fn full_system_identity_is_already_feasible() {
        for d in [2, 3] {
            let sys = MatricialSystem::full(d);
            let prob =
                ExtensionProblem::restriction_of(sys, &SuperOp::identity(d), ExtensionOptions::default()).unwrap();
            let (psi, report) = extend_ucp_map(&prob).unwrap();
            assert!(report.converged);
            assert_eq!(report.iterations, 1);
            assert!(psi.distance(&SuperOp::identity(d)) < 1e-12);
        }
    }

    #[test]
    fn rebit_rotation_map_extension_is_the_rotation() {
        let theta = 0.7;
        let rot = catalog::rotation_map(theta);
        let prob =
            ExtensionProblem::restriction_of(catalog::rebit_system(), &rot, ExtensionOptions::default()).unwrap();
        let (psi, report) = extend_ucp_map(&prob).unwrap();
        assert!(report.converged, "{report:?}");
        assert!(psi.distance(&rot) < 1e-6, "{}", psi.distance(&rot));
    }

    #[test]
    fn dissipative_map_extension_restricts() {
        let phi = evolve(&catalog::g1(1.0), 1.0).unwrap();
        let prob =
            ExtensionProblem::restriction_of(catalog::rebit_system(), &phi, ExtensionOptions::default()).unwrap();
        let (psi, report) = extend_ucp_map(&prob).unwrap();
        assert!(report.converged);
        assert!(report.restriction_error <= 1e-8);
        assert!(psi.is_ucp(1e-8));
    }

    #[test]
    fn rejects_non_unital_map_and_wrong_target() {
        let sys = catalog::rebit_system();
        let p = Pauli::new();
        let bad = vec![p.i.scale(2.0), p.x.clone(), p.z.clone()];
        assert!(ExtensionProblem::map(sys.clone(), bad, ExtensionOptions::default()).is_err());
        let prob = ExtensionProblem::generator(catalog::rebit_rotation(1.0), ExtensionOptions::default()).unwrap();
        assert!(extend_ucp_map(&prob).is_err());
    }

    #[test]
    fn generator_extension_examples() {
        // Full system: the certified generator is returned unchanged.
        let g1 = catalog::g1(0.7);
        let a = g1.restrict_to(&MatricialSystem::full(2)).unwrap();
        let (g, report) =
            extend_generator(&ExtensionProblem::generator(a, ExtensionOptions::default()).unwrap()).unwrap();
        assert!(report.converged);
        assert!(g.op().distance(g1.op()) < 1e-10);

        let prob = ExtensionProblem::generator(catalog::rebit_rotation(1.0), ExtensionOptions::default()).unwrap();
        let (g, report) = extend_generator(&prob).unwrap();
        assert!(report.converged);
        assert!(g.op().distance(catalog::rotation_generator(1.0).op()) < 1e-6);

        let prob =
            ExtensionProblem::generator(catalog::rebit_dissipative(1.0).unwrap(), ExtensionOptions::default()).unwrap();
        let (g, report) = extend_generator(&prob).unwrap();
        assert!(report.converged && report.restriction_error <= 1e-8);
        assert!(is_conditionally_completely_positive(g.op(), 1e-8));
        assert!(g.is_certified());
    }

    #[test]
    fn discrete_powers() {
        let sys = catalog::rebit_system();
        let prob =
            ExtensionProblem::restriction_of(sys.clone(), &SuperOp::identity(2), ExtensionOptions::default()).unwrap();
        let (powers, _) = extend_discrete(&prob, 3).unwrap();
        assert_eq!(powers.len(), 4);
        for p in &powers {
            assert!(p.distance(&SuperOp::identity(2)) < 1e-6);
        }

        let phi = evolve(&catalog::g1(1.0), 1.0).unwrap();
        let prob = ExtensionProblem::restriction_of(sys, &phi, ExtensionOptions::default()).unwrap();
        let (powers, _) = extend_discrete(&prob, 2).unwrap();
        let x = Pauli::new().x;
        for (k, p) in powers.iter().enumerate() {
            let expected = x.scale((-(k as f64)).exp());
            assert!(p.apply(&x).unwrap().distance(&expected) <= (k as f64 + 1.0) * 1e-8);
        }
    }

    #[test]
    fn fixed_seed_is_bit_reproducible() {
        let prob =
            ExtensionProblem::generator(catalog::rebit_dissipative(1.0).unwrap(), ExtensionOptions::random(5)).unwrap();
        let (a, ra) = extend_generator(&prob).unwrap();
        let (b, rb) = extend_generator(&prob).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(a.op(), b.op());
    }
}
