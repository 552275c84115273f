//! Extension of one-parameter groups of UCP maps.

use serde::{Deserialize, Serialize};

use super::{extend_generator, fan_out, ExtensionOptions, ExtensionProblem, ExtensionReport, StartStrategy, Target};
use crate::cpmaps::SuperOp;
use crate::densela::CMatrix;
use crate::dynamics::{evolve, validate_subsystem_semigroup, Generator, ValidationOptions};
use crate::error::{Error, Result};

/// Times at which the inverse and multiplicativity checks are sampled.
pub const GROUP_CHECK_TIMES: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Clone, Debug)]
pub struct GroupExtension {
    pub generator: Generator,
    pub report: ExtensionReport,
    pub certificate: GroupCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupCertificate {
    /// max_t ‖e^{tG₊} ∘ e^{tG₋} − id‖_F, with G± extending ±A.
    pub inverse_residual: f64,
    /// max over random starts of ‖G_k − G‖_F.
    pub uniqueness_spread: f64,
    pub starts: usize,
    /// max_t max over matrix-unit pairs of ‖Ψ(AB) − Ψ(A)Ψ(B)‖_F, Ψ = e^{tG}.
    pub multiplicativity_residual: f64,
}

/// Extends a group generator A (both ±A generate UCP semigroups on V). The
/// extensions of +A and −A must be mutually inverse, `n_starts` random runs
/// must reproduce the same generator within 10·tol, and e^{tG} must be
/// multiplicative. These checks hold when V has envelope M_d; a failure
/// means the input is not a group or its envelope is smaller.
pub fn extend_group(prob: &ExtensionProblem, n_starts: usize) -> Result<GroupExtension> {
    let Target::Generator(a) = &prob.target else {
        return Err(Error::InvalidInput("extend_group needs a generator target".into()));
    };
    let tol = prob.options.tol;
    let validation = ValidationOptions {
        extension: ExtensionOptions {
            start: StartStrategy::Deterministic,
            ..prob.options.clone()
        },
        ..ValidationOptions::default()
    };
    let minus = a.negated();
    for (sign, gen) in [("+A", a), ("−A", &minus)] {
        let report = validate_subsystem_semigroup(gen, &validation);
        if let Err(e) = report.ensure_valid() {
            return Err(Error::NotAGroup(format!("{sign} fails validation: {e}")));
        }
    }

    let deterministic = ExtensionOptions {
        start: StartStrategy::Deterministic,
        ..prob.options.clone()
    };
    let (g_plus, report) = extend_generator(&prob.with_options(deterministic.clone()))?;
    let minus_prob = ExtensionProblem::generator(minus, deterministic)?;
    let (g_minus, minus_report) = extend_generator(&minus_prob)?;
    if !report.converged || !minus_report.converged {
        return Err(Error::Infeasible("generator extension did not converge".into()));
    }

    let d = prob.d();
    let id = SuperOp::identity(d);
    let mut inverse_residual = 0.0f64;
    for &t in &GROUP_CHECK_TIMES {
        let prod = evolve(&g_plus, t)?.compose(&evolve(&g_minus, t)?)?;
        inverse_residual = inverse_residual.max(prod.distance(&id));
    }
    if inverse_residual > tol {
        return Err(Error::NotAGroup(format!(
            "extensions of ±A are not inverse (residual {inverse_residual:.3e})"
        )));
    }

    let seeds: Vec<u64> = (0..n_starts as u64)
        .map(|k| prob.options.seed.wrapping_add(k))
        .collect();
    let runs = fan_out(&seeds, |seed| {
        let opts = ExtensionOptions {
            seed,
            start: StartStrategy::Random,
            ..prob.options.clone()
        };
        extend_generator(&prob.with_options(opts))
    });
    let mut spread = 0.0f64;
    for run in runs {
        let (g, r) = run?;
        if !r.converged {
            return Err(Error::NotUnique {
                spread: f64::INFINITY,
                tol: 10.0 * tol,
            });
        }
        spread = spread.max(g.op().distance(g_plus.op()));
    }
    if spread > 10.0 * tol {
        return Err(Error::NotUnique {
            spread,
            tol: 10.0 * tol,
        });
    }

    let mut multiplicativity = 0.0f64;
    for &t in &GROUP_CHECK_TIMES {
        multiplicativity = multiplicativity.max(multiplicativity_defect(&evolve(&g_plus, t)?));
    }
    if multiplicativity > tol {
        return Err(Error::NotAGroup(format!(
            "extended group is not multiplicative (defect {multiplicativity:.3e})"
        )));
    }

    Ok(GroupExtension {
        generator: g_plus,
        report,
        certificate: GroupCertificate {
            inverse_residual,
            uniqueness_spread: spread,
            starts: n_starts,
            multiplicativity_residual: multiplicativity,
        },
    })
}

/// max over matrix-unit pairs of ‖ψ(E_ij E_kl) − ψ(E_ij)ψ(E_kl)‖_F.
pub fn multiplicativity_defect(psi: &SuperOp) -> f64 {
    let d = psi.d();
    let images: Vec<Vec<CMatrix>> = (0..d).map(|i| (0..d).map(|j| psi.block(i, j)).collect()).collect();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let lhs = if j == k {
                        images[i][l].clone()
                    } else {
                        CMatrix::zeros(d, d)
                    };
                    let rhs = images[i][j].matmul(&images[k][l]);
                    worst = worst.max(lhs.distance(&rhs));
                }
            }
        }
    }
    worst
}
