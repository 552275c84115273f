//! Multi-start probe of rigidity: does id_V have any UCP extension other
//! than the identity?

use serde::{Deserialize, Serialize};

use super::{extend_ucp_map, fan_out, ExtensionOptions, ExtensionProblem, StartStrategy};
use crate::cpmaps::SuperOp;
use crate::error::Result;
use crate::opsys::MatricialSystem;

#[derive(Clone, Debug)]
pub struct RigidityReport {
    pub runs: usize,
    pub converged_runs: usize,
    /// Every run converged to within tol of the identity.
    pub all_identity: bool,
    pub max_distance_from_identity: f64,
    /// max pairwise distance among the converged extensions and id.
    pub max_pairwise: f64,
    /// The farthest-apart pair when some extension differs from id.
    pub witness: Option<(SuperOp, SuperOp)>,
    pub iterations: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigiditySummary {
    pub runs: usize,
    pub converged_runs: usize,
    pub all_identity: bool,
    pub max_distance_from_identity: f64,
    pub max_pairwise: f64,
}

impl RigidityReport {
    pub fn summary(&self) -> RigiditySummary {
        RigiditySummary {
            runs: self.runs,
            converged_runs: self.converged_runs,
            all_identity: self.all_identity,
            max_distance_from_identity: self.max_distance_from_identity,
            max_pairwise: self.max_pairwise,
        }
    }
}

/// Extends id_V from `n_starts` random starts. Evidence, not proof: a
/// rigid system yields the identity every time, a non-rigid one usually
/// exhibits a different extension.
pub fn rigidity_probe(system: &MatricialSystem, n_starts: usize, seed: u64, tol: f64) -> Result<RigidityReport> {
    let d = system.ambient_dim();
    let id = SuperOp::identity(d);
    let base = ExtensionProblem::restriction_of(
        system.clone(),
        &id,
        ExtensionOptions {
            tol,
            ..ExtensionOptions::default()
        },
    )?;
    let seeds: Vec<u64> = (0..n_starts as u64).map(|k| seed.wrapping_add(k)).collect();
    let runs = fan_out(&seeds, |s| {
        extend_ucp_map(&base.with_options(ExtensionOptions {
            seed: s,
            start: StartStrategy::Random,
            ..base.options.clone()
        }))
    });

    let mut found = vec![id.clone()];
    let mut iterations = Vec::with_capacity(n_starts);
    let mut all_converged = true;
    for run in runs {
        let (psi, report) = run?;
        iterations.push(report.iterations);
        if report.converged {
            found.push(psi);
        } else {
            all_converged = false;
        }
    }
    let max_distance_from_identity = found.iter().map(|p| p.distance(&id)).fold(0.0, f64::max);
    let mut max_pairwise = 0.0f64;
    let mut pair = (0, 0);
    for i in 0..found.len() {
        for j in i + 1..found.len() {
            let dist = found[i].distance(&found[j]);
            if dist > max_pairwise {
                max_pairwise = dist;
                pair = (i, j);
            }
        }
    }
    let all_identity = all_converged && max_distance_from_identity <= tol;
    let witness = (!all_identity && pair != (0, 0)).then(|| (found[pair.0].clone(), found[pair.1].clone()));
    Ok(RigidityReport {
        runs: n_starts,
        converged_runs: found.len() - 1,
        all_identity,
        max_distance_from_identity,
        max_pairwise,
        witness,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn full_algebra_is_rigid() {
        let r = rigidity_probe(&MatricialSystem::full(2), 3, 0, 1e-8).unwrap();
        assert!(r.all_identity && r.witness.is_none());
    }

    #[test]
    fn unit_system_is_not_rigid() {
        let sys = catalog::unit_system();
        let r = rigidity_probe(&sys, 3, 0, 1e-8).unwrap();
        assert!(!r.all_identity);
        let (a, b) = r.witness.expect("witness pair");
        assert!(a.distance(&b) > 1e-3);
        for psi in [&a, &b] {
            assert!(psi.is_ucp(1e-8));
        }
    }
}
