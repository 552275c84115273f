//! One function per scenario command.

use serde::Serialize;
use serde_json::{json, Value};

use ucpext::catalog::G2Prefactor;
use ucpext::dynamics::{
    ccp_violation, default_horizon, evolve, hilbert_identity_residual, is_conditionally_completely_positive,
    laplace_resolvent, resolvent, scaled_resolvent, spectral_bound, validate_subsystem_semigroup, SampleKind,
    ValidationOptions,
};
use ucpext::extension::{
    extend_discrete, extend_generator, extend_group, extend_ucp_map, extend_via_resolvent_family, rigidity_probe,
};
use ucpext::io::{GeneratorJson, MatrixJson, SuperOpJson};
use ucpext::{catalog, CMatrix, Error, ExtensionOptions, ExtensionProblem, Generator, StartStrategy, C64};

use crate::demo;
use crate::report::{sci, Check, Outcome, Provenance, Report, Status};
use crate::scenario::{Command, Dynamics, InputError, Options, Scenario};

/// Panel count of the Laplace quadrature check.
const LAPLACE_PANELS: usize = 400;
/// Quadrature agreement required of the Laplace check.
const LAPLACE_TOL: f64 = 1e-6;

/// Why a command stopped early.
pub enum Failure {
    Input(InputError),
    Math(Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Shape(m) | Error::InvalidInput(m) => Failure::Input(InputError {
                kind: "precondition",
                message: m,
            }),
            other => Failure::Math(other),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Shape(_) => "shape",
        Error::InvalidInput(_) => "invalid-input",
        Error::Singular { .. } => "singular",
        Error::NotUcpSemigroup(_) => "not-ucp-semigroup",
        Error::Infeasible(_) => "infeasible",
        Error::NotAGroup(_) => "not-a-group",
        Error::NotUnique { .. } => "not-unique",
        Error::OmegaCapReached { .. } => "omega-cap-reached",
    }
}

/// Flags that are not scenario options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub g2_prefactor: G2Prefactor,
}

impl Default for Flags {
    fn default() -> Self {
        Self {
            g2_prefactor: G2Prefactor::Derived,
        }
    }
}

/// Options as used, with the shared defaults filled in. The seed stays unset
/// when absent: a given seed switches the solver to a random start.
fn effective(command: Command, o: &Options) -> Options {
    let mut e = o.clone();
    let default_tol = if command == Command::Identities { 1e-9 } else { o.tol() };
    e.tol = Some(o.tol.unwrap_or(default_tol));
    e.max_iter = Some(o.max_iter());
    e
}

pub fn provenance(options: Options) -> Provenance {
    Provenance {
        version: env!("CARGO_PKG_VERSION").into(),
        seed: options.seed(),
        options,
    }
}

pub fn invalid_input(command: Option<&str>, err: &InputError, options: Options) -> Report {
    Report {
        command: command.map(str::to_owned),
        status: Status::InvalidInput,
        results: json!({ "error": err }),
        provenance: provenance(options),
    }
}

/// Runs a parsed scenario with `overrides` (command-line flags) applied.
pub fn run(scenario: &Scenario, overrides: &Options, flags: Flags) -> Report {
    let merged = scenario.options.merged(overrides);
    let cmd = scenario.command;
    if let Err(e) = merged.validate() {
        return invalid_input(Some(cmd.as_str()), &e, merged);
    }
    let opts = effective(cmd, &merged);
    let scenario = Scenario {
        options: opts.clone(),
        ..scenario.clone()
    };
    let outcome = match cmd {
        Command::CheckCp => check_cp(&scenario),
        Command::CheckCcp => check_ccp(&scenario),
        Command::Validate => validate(&scenario),
        Command::Evolve => evolve_cmd(&scenario),
        Command::Resolvent => resolvent_cmd(&scenario),
        Command::Identities => identities(&scenario),
        Command::ExtendMap => extend_map(&scenario),
        Command::ExtendGenerator => extend_generator_cmd(&scenario),
        Command::ExtendResolventFamily => extend_family(&scenario),
        Command::ExtendGroup => extend_group_cmd(&scenario),
        Command::ExtendDiscrete => extend_discrete_cmd(&scenario),
        Command::RigidityProbe => rigidity(&scenario),
        Command::DemoRebit => Ok(demo::run(&opts, flags.g2_prefactor)),
    };
    match outcome {
        Ok(o) => Report {
            command: Some(cmd.as_str().into()),
            status: o.status(),
            results: o.into_value(),
            provenance: provenance(opts),
        },
        Err(Failure::Input(e)) => invalid_input(Some(cmd.as_str()), &e, opts),
        Err(Failure::Math(e)) => Report {
            command: Some(cmd.as_str().into()),
            status: Status::Failed,
            results: json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }),
            provenance: provenance(opts),
        },
    }
}

type Res = Result<Outcome, Failure>;

pub(crate) fn extension_options(o: &Options) -> ExtensionOptions {
    ExtensionOptions {
        tol: o.tol(),
        max_iter: o.max_iter(),
        seed: o.seed(),
        start: if o.seed.is_some() {
            StartStrategy::Random
        } else {
            StartStrategy::Deterministic
        },
        ..ExtensionOptions::default()
    }
}

fn list(o: &Option<Vec<f64>>, default: &[f64]) -> Vec<f64> {
    o.clone().unwrap_or_else(|| default.to_vec())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn images_json(images: &[CMatrix]) -> Vec<MatrixJson> {
    images.iter().map(MatrixJson::from).collect()
}

#[derive(Serialize)]
struct CpSample {
    t: f64,
    min_choi_eigenvalue: f64,
    unitality_defect: f64,
    ucp: bool,
}

fn check_cp(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let mut out = Outcome::new();
    match s.dynamics()? {
        Dynamics::Channel(phi) => {
            let cp = phi.is_completely_positive(tol);
            out.put("min_choi_eigenvalue", cp.min_choi_eigenvalue);
            out.put("completely_positive", cp.is_cp);
            out.put("hermiticity_preserving", phi.is_hermiticity_preserving(tol));
            out.put("unitality_defect", phi.unitality_defect());
            if let Some(w) = &cp.witness {
                out.put(
                    "witness",
                    json!({ "level": w.level, "matrix": MatrixJson::from(&w.matrix) }),
                );
            }
            out.check(
                Check::holds("completely positive", cp.is_cp)
                    .with_detail(format!("min Choi eigenvalue {}", sci(cp.min_choi_eigenvalue))),
            );
        }
        Dynamics::Full(g) => {
            let times = list(&s.options.times, &[0.1, 1.0, 10.0]);
            let mut samples = Vec::new();
            for &t in &times {
                let phi = evolve(&g, t)?;
                let cp = phi.is_completely_positive(tol);
                let ucp = phi.is_ucp(tol);
                out.check(Check::holds(&format!("e^(tG) UCP at t = {t}"), ucp));
                samples.push(CpSample {
                    t,
                    min_choi_eigenvalue: cp.min_choi_eigenvalue,
                    unitality_defect: phi.unitality_defect(),
                    ucp,
                });
            }
            out.put("semigroup", samples);
        }
        _ => {
            return Err(InputError::schema(
                "check-cp needs a map on M_d (channel) or a generator; maps given on a subsystem go to extend-map",
            )
            .into())
        }
    }
    Ok(out)
}

fn check_ccp(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let g = s.dynamics()?.full()?;
    let mut out = Outcome::new();
    let certs = g.certificates();
    let violation = ccp_violation(g.op());
    let kernel = g.apply(&CMatrix::identity(g.d()))?.frobenius_norm();
    out.put("certificates", certs);
    out.put("ccp_violation", violation);
    out.put("unital_kernel_residual", kernel);
    out.put("spectral_bound", spectral_bound(&g));
    out.check(Check::holds("hermiticity preserving", certs.hermiticity_preserving));
    let mut c = Check::at_most("ccp violation", violation, tol);
    c.passed = is_conditionally_completely_positive(g.op(), tol);
    out.check(c);
    out.check(Check::at_most("G(I)", kernel, tol));
    Ok(out)
}

fn validate(s: &Scenario) -> Res {
    let system = s.system()?;
    let a = s.dynamics()?.subsystem(&system)?;
    let defaults = ValidationOptions::default();
    let vopts = ValidationOptions {
        lambdas: s.options.lambdas.clone().unwrap_or(defaults.lambdas),
        times: s.options.times.clone().unwrap_or(defaults.times),
        extension: extension_options(&s.options),
    };
    let report = validate_subsystem_semigroup(&a, &vopts);
    let mut out = Outcome::new();
    out.check(Check::at_most("A(I)", report.unital_kernel_residual, s.options.tol()));
    for sample in &report.samples {
        let what = match sample.kind {
            SampleKind::Lambda => "λR(λ, A) at λ",
            SampleKind::Time => "Φ(t) at t",
        };
        let mut c = Check::holds(
            &format!("{what} = {} has a UCP extension", sample.value),
            sample.feasible,
        );
        if let Some(note) = &sample.note {
            c = c.with_detail(note.clone());
        }
        out.check(c);
    }
    out.put("valid", report.valid);
    out.put("validation", report);
    Ok(out)
}

fn evolve_cmd(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let times = list(&s.options.times, &[0.5, 1.0, 2.0]);
    let mut out = Outcome::new();
    match s.dynamics()? {
        Dynamics::Full(g) => {
            let mut rows = Vec::new();
            for &t in &times {
                let phi = evolve(&g, t)?;
                let ucp = phi.is_ucp(tol);
                if g.is_certified() {
                    out.check(Check::holds(&format!("e^(tG) UCP at t = {t}"), ucp));
                }
                rows.push(json!({ "t": t, "map": SuperOpJson::from(&phi), "ucp": ucp }));
            }
            out.put("certified", g.is_certified());
            out.put("evolution", rows);
        }
        Dynamics::Subsystem(a) => {
            let mut rows = Vec::new();
            for &t in &times {
                rows.push(json!({ "t": t, "images": images_json(&a.evolve_images(t)?) }));
            }
            out.put("evolution", rows);
        }
        _ => return Err(InputError::schema("evolve needs a generator").into()),
    }
    Ok(out)
}

fn resolvent_cmd(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let lambdas = list(&s.options.lambdas, &[0.5, 1.0, 2.0]);
    let mut out = Outcome::new();
    match s.dynamics()? {
        Dynamics::Full(g) => {
            let mut rows = Vec::new();
            for &l in &lambdas {
                let scaled = scaled_resolvent(&g, l)?;
                let mut row = json!({ "lambda": l, "scaled_resolvent": SuperOpJson::from(&scaled) });
                if g.is_certified() {
                    let ucp = scaled.is_ucp(tol);
                    out.check(Check::holds(&format!("λR(λ, G) UCP at λ = {l}"), ucp));
                    let q = laplace_resolvent(&g, l, default_horizon(l), LAPLACE_PANELS)?;
                    let err = q.integral.distance(&resolvent(&g, C64::new(l, 0.0))?);
                    out.check(Check::at_most(
                        &format!("Laplace quadrature at λ = {l}"),
                        err,
                        LAPLACE_TOL,
                    ));
                    row["ucp"] = json!(ucp);
                    row["laplace_error"] = json!(err);
                    row["laplace_truncation_bound"] = json!(q.truncation_bound);
                }
                rows.push(row);
            }
            out.put("certified", g.is_certified());
            out.put("resolvents", rows);
        }
        Dynamics::Subsystem(a) => {
            let mut rows = Vec::new();
            for &l in &lambdas {
                rows.push(json!({ "lambda": l, "images": images_json(&a.scaled_resolvent_images(l)?) }));
            }
            out.put("resolvents", rows);
        }
        _ => return Err(InputError::schema("resolvent needs a generator").into()),
    }
    Ok(out)
}

fn identities(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let g = s.dynamics()?.full()?;
    let grid = list(&s.options.grid, &linspace(0.5, 4.0, 5));
    let times = list(&s.options.times, &[0.5, 1.0, 2.0]);
    let mut hilbert = Vec::new();
    let mut worst_h = 0.0f64;
    for &l in &grid {
        let mut row = Vec::new();
        for &m in &grid {
            if l == m {
                row.push(None);
            } else {
                let r = hilbert_identity_residual(&g, C64::new(l, 0.0), C64::new(m, 0.0))?;
                worst_h = worst_h.max(r);
                row.push(Some(r));
            }
        }
        hilbert.push(row);
    }
    let mut worst_s = 0.0f64;
    for &a in &times {
        for &b in &times {
            let lhs = evolve(&g, a)?.compose(&evolve(&g, b)?)?;
            worst_s = worst_s.max(lhs.distance(&evolve(&g, a + b)?));
        }
    }
    let mut out = Outcome::new();
    out.put("grid", &grid);
    out.put("hilbert_residuals", hilbert);
    out.put("max_hilbert_residual", worst_h);
    out.put("times", &times);
    out.put("max_semigroup_residual", worst_s);
    out.check(Check::at_most("Hilbert identity", worst_h, tol));
    out.check(Check::at_most("semigroup law", worst_s, tol));
    Ok(out)
}

fn extension_checks(out: &mut Outcome, report: &ucpext::ExtensionReport, tol: f64) {
    out.check(
        Check::holds("solver converged", report.converged).with_detail(format!("{} iterations", report.iterations)),
    );
    out.check(Check::at_most("restriction error", report.restriction_error, tol));
    out.check(Check::at_most("cone residual", report.cone_residual, tol));
}

fn extend_map(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let system = s.system()?;
    let images = s.dynamics()?.map_images(&system)?;
    let prob = ExtensionProblem::map(system, images, extension_options(&s.options))?;
    let (psi, report) = extend_ucp_map(&prob)?;
    let mut out = Outcome::new();
    extension_checks(&mut out, &report, tol);
    out.put("map", SuperOpJson::from(&psi));
    out.put("report", report);
    Ok(out)
}

fn generator_results(out: &mut Outcome, g: &Generator) {
    out.put("generator", GeneratorJson::from(g));
    out.put("certificates", g.certificates());
}

/// Distance to the exact rotation generator when the scenario names it.
fn rotation_reference(s: &Scenario, out: &mut Outcome, g: &Generator) {
    if s.dynamics.as_ref().and_then(Value::as_str) == Some("rebit_rotation") {
        let omega = s.options.omega_param.unwrap_or(1.0);
        let err = g.op().distance(catalog::rotation_generator(omega).op());
        out.put("distance_to_rotation_generator", err);
        out.check(Check::at_most("matches i(ω/2)[Y, ·]", err, 1e-6));
    }
}

fn extend_generator_cmd(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let system = s.system()?;
    let a = s.dynamics()?.subsystem(&system)?;
    let prob = ExtensionProblem::generator(a, extension_options(&s.options))?;
    let (g, report) = extend_generator(&prob)?;
    let mut out = Outcome::new();
    extension_checks(&mut out, &report, tol);
    let violation = ccp_violation(g.op());
    let mut c = Check::at_most("ccp violation", violation, tol);
    c.passed = is_conditionally_completely_positive(g.op(), tol);
    out.check(c);
    generator_results(&mut out, &g);
    out.put("ccp_violation", violation);
    out.put("report", report);
    rotation_reference(s, &mut out, &g);
    Ok(out)
}

fn extend_family(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let system = s.system()?;
    let a = s.dynamics()?.subsystem(&system)?;
    let omega = s.options.omega.unwrap_or(4.0);
    let grid = s
        .options
        .grid
        .clone()
        .unwrap_or_else(|| (1..=8).map(|k| omega * k as f64 / 8.0).collect());
    let prob = ExtensionProblem::generator(a, extension_options(&s.options))?;
    let (g, family, report) = extend_via_resolvent_family(&prob, omega, &grid)?;
    let d = &family.diagnostics;
    let mut out = Outcome::new();
    out.check(Check::at_most("restriction error", d.restriction_error, tol));
    out.check(Check::at_most("UCP defect of F(λ)", d.ucp_defect, tol));
    out.check(Check::at_most("λ-spread of G_λ", d.generator_spread, 10.0 * tol));
    let mut c = Check::at_most("ccp violation", d.ccp_violation, tol);
    c.passed = is_conditionally_completely_positive(g.op(), tol);
    out.check(c);
    generator_results(&mut out, &g);
    out.put("omega", family.omega);
    out.put("grid", &family.grid);
    out.put("diagnostics", d);
    out.put("report", report);
    rotation_reference(s, &mut out, &g);
    Ok(out)
}

fn extend_group_cmd(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let system = s.system()?;
    let a = s.dynamics()?.subsystem(&system)?;
    let starts = s.options.starts.unwrap_or(8);
    let prob = ExtensionProblem::generator(a, extension_options(&s.options))?;
    let ext = extend_group(&prob, starts)?;
    let c = &ext.certificate;
    let mut out = Outcome::new();
    out.check(Check::at_most("inverse residual", c.inverse_residual, tol));
    out.check(Check::at_most("uniqueness spread", c.uniqueness_spread, 10.0 * tol));
    out.check(Check::at_most(
        "multiplicativity residual",
        c.multiplicativity_residual,
        tol,
    ));
    generator_results(&mut out, &ext.generator);
    out.put("certificate", c);
    out.put("report", &ext.report);
    rotation_reference(s, &mut out, &ext.generator);
    Ok(out)
}

fn extend_discrete_cmd(s: &Scenario) -> Res {
    let tol = s.options.tol();
    let system = s.system()?;
    let images = s.dynamics()?.map_images(&system)?;
    let steps = s.options.steps.unwrap_or(10);
    let prob = ExtensionProblem::map(system, images, extension_options(&s.options))?;
    let (powers, report) = extend_discrete(&prob, steps)?;
    let mut out = Outcome::new();
    extension_checks(&mut out, &report, tol);
    out.put("powers", powers.iter().map(SuperOpJson::from).collect::<Vec<_>>());
    out.put("report", report);
    Ok(out)
}

fn rigidity(s: &Scenario) -> Res {
    let system = s.system()?;
    let starts = s.options.starts.unwrap_or(8);
    let r = rigidity_probe(&system, starts, s.options.seed(), s.options.tol())?;
    let mut out = Outcome::new();
    out.check(Check::holds("every run converged", r.converged_runs == r.runs));
    out.put("summary", r.summary());
    if let Some((a, b)) = &r.witness {
        out.put("witness", [SuperOpJson::from(a), SuperOpJson::from(b)]);
    }
    Ok(out)
}
