//! The rebit walkthrough: catalog, cone, rotation and dissipative extensions,
//! and the two explicit dissipative generators.

use serde_json::json;

use ucpext::catalog::{self, G2Prefactor, Pauli};
use ucpext::dynamics::{ccp_violation, evolve, is_conditionally_completely_positive};
use ucpext::extension::{extend_generator, extend_group};
use ucpext::io::GeneratorJson;
use ucpext::{ExtensionOptions, ExtensionProblem, LevelElement};

use crate::report::{Check, Outcome};
use crate::scenario::Options;

/// Exact identities are checked to this absolute accuracy.
const EXACT: f64 = 1e-12;

pub fn run(o: &Options, prefactor: G2Prefactor) -> Outcome {
    let mut out = Outcome::new();
    let tol = o.tol();
    let seed = o.seed();
    let delta = o.delta.unwrap_or(1.0);
    let omega = o.omega_param.or(o.omega).unwrap_or(1.0);
    let p = Pauli::new();
    out.put("delta", delta);
    out.put("omega", omega);
    out.put("g2_prefactor", prefactor.value());

    // Four subsystems of M_2.
    let cases = catalog::four_case_catalog();
    let rows: Vec<_> = cases
        .iter()
        .map(|c| json!({ "name": c.name, "dim": c.system.dim(), "envelope": c.envelope }))
        .collect();
    out.put("catalog", rows);
    let dims: Vec<usize> = cases.iter().map(|c| c.system.dim()).collect();
    out.check(Check::holds("catalog dimensions 1, 2, 3, 4", dims == [1, 2, 3, 4]));
    let rebit = catalog::rebit_system();
    out.check(Check::holds(
        "rebit contains X and Z but not Y",
        rebit.contains(&p.x, EXACT) && rebit.contains(&p.z, EXACT) && !rebit.contains(&p.y, EXACT),
    ));

    // aI + bX + cZ ≥ 0 iff a ≥ 0 and b² + c² ≤ a².
    let mut mismatches = 0;
    let mut points = 0;
    for a in -2..=2 {
        for b in -2..=2 {
            for c in -2..=2 {
                let (a, b, c) = (a as f64, b as f64, c as f64);
                let el = LevelElement::scalar(&rebit, catalog::rebit_element(a, b, c)).expect("rebit element");
                let positive = rebit.is_positive_element(&el, EXACT).expect("level 1");
                mismatches += usize::from(positive != (a >= 0.0 && b * b + c * c <= a * a));
                points += 1;
            }
        }
    }
    out.put("cone_grid", json!({ "points": points, "mismatches": mismatches }));
    out.check(Check::at_most("cone grid mismatches", mismatches as f64, 0.0));

    // Rotation: unique group extension.
    let starts = o.starts.unwrap_or(8);
    let prob = ExtensionProblem::generator(catalog::rebit_rotation(omega), ExtensionOptions::random(seed));
    match prob.and_then(|p| extend_group(&p, starts)) {
        Ok(ext) => {
            let err = ext.generator.op().distance(catalog::rotation_generator(omega).op());
            out.put(
                "rotation",
                json!({
                    "generator": GeneratorJson::from(&ext.generator),
                    "distance_to_rotation_generator": err,
                    "certificate": ext.certificate,
                }),
            );
            out.check(Check::at_most("rotation extension is i(ω/2)[Y, ·]", err, 1e-6));
            out.check(Check::at_most(
                "rotation uniqueness spread",
                ext.certificate.uniqueness_spread,
                10.0 * tol,
            ));
        }
        Err(e) => out.check(Check::holds("rotation group extension", false).with_detail(e.to_string())),
    }

    // Dissipative: many extensions.
    let runs = o.starts.unwrap_or(16);
    let mut on_y = Vec::new();
    let (mut worst_restriction, mut worst_ccp) = (0.0f64, 0.0f64);
    let mut all_ccp = true;
    let mut failures = Vec::new();
    for k in 0..runs as u64 {
        let opts = ExtensionOptions {
            tol,
            max_iter: o.max_iter(),
            ..ExtensionOptions::random(seed + k)
        };
        let prob = catalog::rebit_dissipative(delta).and_then(|a| ExtensionProblem::generator(a, opts));
        match prob.and_then(|p| extend_generator(&p)) {
            Ok((g, report)) if report.converged => {
                worst_restriction = worst_restriction.max(report.restriction_error);
                worst_ccp = worst_ccp.max(ccp_violation(g.op()));
                all_ccp &= is_conditionally_completely_positive(g.op(), tol);
                on_y.push(g.apply(&p.y).expect("2×2 input"));
            }
            Ok((_, report)) => failures.push(format!(
                "seed {}: no convergence in {} iterations",
                seed + k,
                report.iterations
            )),
            Err(e) => failures.push(format!("seed {}: {e}", seed + k)),
        }
    }
    let mut spread = 0.0f64;
    for i in 0..on_y.len() {
        for j in i + 1..on_y.len() {
            spread = spread.max(on_y[i].distance(&on_y[j]));
        }
    }
    out.put(
        "dissipative",
        json!({
            "runs": runs,
            "converged": on_y.len(),
            "max_y_spread": spread,
            "max_restriction_error": worst_restriction,
            "max_ccp_violation": worst_ccp,
        }),
    );
    let mut c = Check::holds("every dissipative run converged", failures.is_empty());
    if !failures.is_empty() {
        c = c.with_detail(failures.join("; "));
    }
    out.check(c);
    out.check(Check::at_most("dissipative restriction error", worst_restriction, tol));
    let mut c = Check::at_most("dissipative ccp violation", worst_ccp, tol);
    c.passed = all_ccp;
    out.check(c);
    out.check(Check::at_least("dissipative extensions differ on Y", spread, 1e-3));

    // G1 and G2.
    let g1 = catalog::g1(delta);
    let g2 = catalog::g2_with(delta, prefactor);
    let a = catalog::rebit_dissipative(delta).expect("positive Δ");
    let coefficient = |m: &ucpext::CMatrix, pauli: &ucpext::CMatrix| pauli.hs_inner(m).re / 2.0 / delta;
    let g1y = g1.apply(&p.y).expect("2×2");
    let g2y = g2.apply(&p.y).expect("2×2");
    let g2x = coefficient(&g2.apply(&p.x).expect("2×2"), &p.x);
    out.check(Check::at_most(
        "G1[Y] = -2ΔY",
        g1y.distance(&p.y.scale(-2.0 * delta)),
        EXACT,
    ));
    out.check(
        Check::at_most("G2[Y] = -ΔY", g2y.distance(&p.y.scale(-delta)), EXACT)
            .with_detail(format!("G2[Y] = {:.4}·ΔY", coefficient(&g2y, &p.y))),
    );
    for (name, g) in [("G1", &g1), ("G2", &g2)] {
        let r = g.restrict_to(&rebit).expect("2×2 generator");
        let err = r
            .action()
            .iter()
            .zip(a.action())
            .map(|(x, y)| x.distance(y))
            .fold(0.0, f64::max);
        let mut c = Check::at_most(&format!("{name} restricts to the rebit dynamics"), err, EXACT);
        if name == "G2" && !c.passed {
            c = c.with_detail(format!("G2[X] = {g2x:.4}·ΔX, expected -1·ΔX"));
        }
        out.check(c);
        out.check(Check::holds(
            &format!("{name} is a certified generator"),
            g.is_certified(),
        ));
    }
    let gap = g1y.distance(&g2y);
    out.check(Check::at_least("G1 and G2 differ on Y", gap, 1e-3));

    let times = o.times.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for &t in &times {
        let e1 = evolve(&g1, t)
            .and_then(|phi| phi.apply(&p.y))
            .map(|m| m.distance(&p.y.scale((-2.0 * delta * t).exp())));
        let e2 = evolve(&g2, t)
            .and_then(|phi| phi.apply(&p.y))
            .map(|m| m.distance(&p.y.scale((-delta * t).exp())));
        let (e1, e2) = (e1.unwrap_or(f64::INFINITY), e2.unwrap_or(f64::INFINITY));
        worst = worst.max(e1).max(e2);
        rows.push(json!({ "t": t, "g1_error": e1, "g2_error": e2 }));
    }
    out.put(
        "g1_g2",
        json!({
            "g1": GeneratorJson::from(&g1),
            "g2": GeneratorJson::from(&g2),
            "g1_y_coefficient": coefficient(&g1y, &p.y),
            "g2_y_coefficient": coefficient(&g2y, &p.y),
            "g2_x_coefficient": g2x,
            "distance_on_y": gap,
            "evolution": rows,
        }),
    );
    out.check(Check::at_most("evolution of Y", worst, 1e-8));
    out
}
