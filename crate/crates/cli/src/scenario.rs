//! Scenario files and their resolution into library objects.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use ucpext::catalog::{self, G2Prefactor};
use ucpext::io::{GeneratorJson, JumpJson, MatrixJson, SuperOpJson};
use ucpext::{CMatrix, Generator, HermMatrix, MatricialSystem, SubsystemGenerator, SuperOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckCp,
    CheckCcp,
    Validate,
    Evolve,
    Resolvent,
    Identities,
    ExtendMap,
    ExtendGenerator,
    ExtendResolventFamily,
    ExtendGroup,
    ExtendDiscrete,
    RigidityProbe,
    DemoRebit,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::CheckCp => "check-cp",
            Command::CheckCcp => "check-ccp",
            Command::Validate => "validate",
            Command::Evolve => "evolve",
            Command::Resolvent => "resolvent",
            Command::Identities => "identities",
            Command::ExtendMap => "extend-map",
            Command::ExtendGenerator => "extend-generator",
            Command::ExtendResolventFamily => "extend-resolvent-family",
            Command::ExtendGroup => "extend-group",
            Command::ExtendDiscrete => "extend-discrete",
            Command::RigidityProbe => "rigidity-probe",
            Command::DemoRebit => "demo-rebit",
        }
    }
}

/// Numeric knobs. Unset fields fall back to per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Resolvent-family parameter ω.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Angular frequency of the catalog rotations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_param: Option<f64>,
    /// Rate Δ of the catalog dissipative dynamics.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Angle of the catalog rotation map.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    /// Number of powers for extend-discrete.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl Options {
    /// Fields set in `over` win.
    pub fn merged(&self, over: &Options) -> Options {
        macro_rules! pick {
            ($($f:ident),*) => { Options { $($f: over.$f.clone().or_else(|| self.$f.clone())),* } };
        }
        pick!(
            tol,
            max_iter,
            seed,
            omega,
            omega_param,
            delta,
            theta,
            grid,
            times,
            lambdas,
            starts,
            steps
        )
    }

    pub fn validate(&self) -> Result<(), InputError> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(InputError::schema(format!("options.{name} must be positive, got {x}")))
            }
            _ => Ok(()),
        };
        positive("tol", self.tol)?;
        positive("omega", self.omega)?;
        positive("delta", self.delta)?;
        for (name, v) in [("omega_param", self.omega_param), ("theta", self.theta)] {
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(InputError::schema(format!("options.{name} must be finite")));
                }
            }
        }
        if self.max_iter == Some(0) {
            return Err(InputError::schema("options.max_iter must be positive"));
        }
        if self.starts == Some(0) {
            return Err(InputError::schema("options.starts must be positive"));
        }
        for (name, list) in [("grid", &self.grid), ("lambdas", &self.lambdas)] {
            if let Some(xs) = list {
                if xs.is_empty() || xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                    return Err(InputError::schema(format!(
                        "options.{name} must be a nonempty list of positive numbers"
                    )));
                }
            }
        }
        if let Some(ts) = &self.times {
            if ts.is_empty() || ts.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                return Err(InputError::schema(
                    "options.times must be a nonempty list of nonnegative numbers",
                ));
            }
        }
        Ok(())
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(ucpext::tol::FEASIBILITY)
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or(200_000)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// A scenario as read from disk. `system` and `dynamics` stay as JSON until
/// the command says what it needs from them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<Value>,
    pub command: Command,
    #[serde(default)]
    pub options: Options,
}

/// Malformed input: bad JSON, a schema violation, or an unknown name.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputError {
    pub kind: &'static str,
    pub message: String,
}

impl InputError {
    pub fn schema(message: impl Into<String>) -> Self {
        Self {
            kind: "schema",
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            kind: "parse",
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: "io",
            message: message.into(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let value: Value = serde_json::from_str(text).map_err(|e| InputError::parse(e.to_string()))?;
        let scenario: Scenario = serde_json::from_value(value).map_err(|e| InputError::schema(e.to_string()))?;
        scenario.options.validate()?;
        Ok(scenario)
    }

    pub fn system(&self) -> Result<MatricialSystem, InputError> {
        match &self.system {
            None => Err(InputError::schema(format!(
                "command {} needs a system",
                self.command.as_str()
            ))),
            Some(v) => resolve_system(v),
        }
    }

    pub fn dynamics(&self) -> Result<Dynamics, InputError> {
        let v = self
            .dynamics
            .as_ref()
            .ok_or_else(|| InputError::schema(format!("command {} needs dynamics", self.command.as_str())))?;
        let system = match &self.system {
            Some(s) => Some(resolve_system(s)?),
            None => None,
        };
        resolve_dynamics(v, system.as_ref(), &self.options)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineSystem {
    basis: Vec<MatrixJson>,
}

/// Catalog names: unit, diagonal, rebit, M2, M<d>, real_symmetric_<d>.
pub fn resolve_system(v: &Value) -> Result<MatricialSystem, InputError> {
    if let Some(name) = v.as_str() {
        return match name {
            "unit" => Ok(catalog::unit_system()),
            "diagonal" => Ok(catalog::diagonal_system()),
            "rebit" => Ok(catalog::rebit_system()),
            "M2" => Ok(catalog::qubit_system()),
            _ => {
                let parse_dim = |s: &str| s.parse::<usize>().ok().filter(|d| (1..=16).contains(d));
                if let Some(d) = name.strip_prefix('M').and_then(parse_dim) {
                    Ok(MatricialSystem::full(d))
                } else if let Some(d) = name.strip_prefix("real_symmetric_").and_then(parse_dim) {
                    Ok(catalog::real_symmetric_system(d))
                } else {
                    Err(InputError::schema(format!("unknown system {name:?}")))
                }
            }
        };
    }
    let inline: InlineSystem =
        serde_json::from_value(v.clone()).map_err(|e| InputError::schema(format!("system: {e}")))?;
    let basis = inline
        .basis
        .iter()
        .map(|m| {
            let m = CMatrix::try_from(m).map_err(|e| InputError::schema(format!("system basis: {e}")))?;
            HermMatrix::new(m, ucpext::tol::FEASIBILITY).map_err(|e| InputError::schema(format!("system basis: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    MatricialSystem::new(basis).map_err(|e| InputError::schema(format!("system: {e}")))
}

/// Resolved dynamics. Which form a command accepts is up to the command.
#[derive(Clone, Debug)]
pub enum Dynamics {
    /// Generator on the whole of M_d.
    Full(Generator),
    /// Generator known only on a subsystem.
    Subsystem(SubsystemGenerator),
    /// Images of the system basis under a map.
    Map(Vec<CMatrix>),
    /// Map on the whole of M_d.
    Channel(SuperOp),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum InlineDynamics {
    Gksl {
        #[serde(rename = "H")]
        h: MatrixJson,
        #[serde(default)]
        jumps: Vec<JumpJson>,
    },
    Choi {
        #[serde(rename = "super")]
        op: SuperOpJson,
    },
    Subsystem {
        action: Vec<MatrixJson>,
    },
    Map {
        images: Vec<MatrixJson>,
    },
    Channel {
        #[serde(rename = "super")]
        op: SuperOpJson,
    },
}

fn schema_err(what: &str) -> impl Fn(ucpext::Error) -> InputError + '_ {
    move |e| InputError::schema(format!("{what}: {e}"))
}

fn matrices(list: &[MatrixJson], what: &str) -> Result<Vec<CMatrix>, InputError> {
    list.iter()
        .map(|m| CMatrix::try_from(m).map_err(schema_err(what)))
        .collect()
}

fn need_system<'a>(system: Option<&'a MatricialSystem>, what: &str) -> Result<&'a MatricialSystem, InputError> {
    system.ok_or_else(|| InputError::schema(format!("{what} needs a system")))
}

/// Catalog names: rebit_rotation, rebit_dissipative (subsystem generators);
/// rotation, g1, g2, g2_printed, dephasing_y (generators); rotation_map.
pub fn resolve_dynamics(v: &Value, system: Option<&MatricialSystem>, opts: &Options) -> Result<Dynamics, InputError> {
    let omega = opts.omega_param.unwrap_or(1.0);
    let delta = opts.delta.unwrap_or(1.0);
    if let Some(name) = v.as_str() {
        let dynamics = match name {
            "rebit_rotation" => Dynamics::Subsystem(catalog::rebit_rotation(omega)),
            "rebit_dissipative" => Dynamics::Subsystem(catalog::rebit_dissipative(delta).map_err(schema_err(name))?),
            "rotation" => Dynamics::Full(catalog::rotation_generator(omega)),
            "g1" => Dynamics::Full(catalog::g1(delta)),
            "g2" => Dynamics::Full(catalog::g2(delta)),
            "g2_printed" => Dynamics::Full(catalog::g2_with(delta, G2Prefactor::Printed)),
            "dephasing_y" => Dynamics::Full(catalog::dephasing_y(delta)),
            "rotation_map" => Dynamics::Channel(catalog::rotation_map(opts.theta.unwrap_or(PI / 5.0))),
            _ => return Err(InputError::schema(format!("unknown dynamics {name:?}"))),
        };
        if let (Dynamics::Subsystem(a), Some(s)) = (&dynamics, system) {
            if !same_system(a.system(), s) {
                return Err(InputError::schema(format!(
                    "dynamics {name:?} lives on the rebit, not on the given system"
                )));
            }
        }
        return Ok(dynamics);
    }
    let inline: InlineDynamics =
        serde_json::from_value(v.clone()).map_err(|e| InputError::schema(format!("dynamics: {e}")))?;
    Ok(match inline {
        InlineDynamics::Gksl { h, jumps } => Dynamics::Full(
            GeneratorJson::Gksl { h, jumps }
                .build()
                .map_err(schema_err("dynamics"))?,
        ),
        InlineDynamics::Choi { op } => {
            Dynamics::Full(GeneratorJson::Choi { op }.build().map_err(schema_err("dynamics"))?)
        }
        InlineDynamics::Channel { op } => Dynamics::Channel(SuperOp::try_from(&op).map_err(schema_err("dynamics"))?),
        InlineDynamics::Subsystem { action } => {
            let system = need_system(system, "subsystem dynamics")?;
            let action = matrices(&action, "dynamics.action")?;
            Dynamics::Subsystem(SubsystemGenerator::new(system.clone(), action).map_err(schema_err("dynamics"))?)
        }
        InlineDynamics::Map { images } => Dynamics::Map(matrices(&images, "dynamics.images")?),
    })
}

/// Same subspace of the same M_d, whatever the bases.
pub fn same_system(a: &MatricialSystem, b: &MatricialSystem) -> bool {
    a.ambient_dim() == b.ambient_dim() && a.dim() == b.dim() && b.basis().iter().all(|v| a.contains(v, 1e-10))
}

impl Dynamics {
    pub fn full(self) -> Result<Generator, InputError> {
        match self {
            Dynamics::Full(g) => Ok(g),
            _ => Err(InputError::schema(
                "this command needs a generator on M_d (gksl, choi or a catalog generator)",
            )),
        }
    }

    pub fn subsystem(self, system: &MatricialSystem) -> Result<SubsystemGenerator, InputError> {
        match self {
            Dynamics::Subsystem(a) => Ok(a),
            Dynamics::Full(g) => g
                .restrict_to(system)
                .map_err(schema_err("restricting the generator to the system")),
            _ => Err(InputError::schema(
                "this command needs a generator (subsystem, gksl, choi or a catalog name)",
            )),
        }
    }

    /// Basis images on `system`.
    pub fn map_images(self, system: &MatricialSystem) -> Result<Vec<CMatrix>, InputError> {
        match self {
            Dynamics::Map(images) => Ok(images),
            Dynamics::Channel(phi) => system
                .basis()
                .iter()
                .map(|v| phi.apply(v).map_err(schema_err("applying the map")))
                .collect(),
            _ => Err(InputError::schema(
                "this command needs a map (map, channel or rotation_map)",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_scenario() {
        let s = Scenario::parse(
            r#"{"system":"rebit","dynamics":"rebit_rotation","command":"extend-group","options":{"omega_param":1.0}}"#,
        )
        .unwrap();
        assert_eq!(s.command, Command::ExtendGroup);
        assert_eq!(s.system().unwrap().dim(), 3);
        assert!(matches!(s.dynamics().unwrap(), Dynamics::Subsystem(_)));
    }

    #[test]
    fn rejects_unknown_command_and_fields() {
        assert_eq!(
            Scenario::parse(r#"{"command":"frobnicate"}"#).unwrap_err().kind,
            "schema"
        );
        assert_eq!(
            Scenario::parse(r#"{"command":"evolve","extra":1}"#).unwrap_err().kind,
            "schema"
        );
        assert_eq!(
            Scenario::parse(r#"{"command":"evolve","options":{"tol":-1}}"#)
                .unwrap_err()
                .kind,
            "schema"
        );
        assert_eq!(Scenario::parse("{not json").unwrap_err().kind, "parse");
    }

    #[test]
    fn named_systems() {
        for (name, dim) in [
            ("unit", 1),
            ("diagonal", 2),
            ("rebit", 3),
            ("M2", 4),
            ("M3", 9),
            ("real_symmetric_3", 6),
        ] {
            assert_eq!(resolve_system(&Value::from(name)).unwrap().dim(), dim);
        }
        assert!(resolve_system(&Value::from("M0")).is_err());
        assert!(resolve_system(&Value::from("rebits")).is_err());
    }

    #[test]
    fn rebit_dynamics_refuse_other_systems() {
        let m2 = catalog::qubit_system();
        assert!(resolve_dynamics(&Value::from("rebit_rotation"), Some(&m2), &Options::default()).is_err());
    }

    #[test]
    fn merge_prefers_override() {
        let base = Options {
            tol: Some(1e-6),
            seed: Some(3),
            ..Options::default()
        };
        let over = Options {
            seed: Some(5),
            ..Options::default()
        };
        let m = base.merged(&over);
        assert_eq!((m.tol, m.seed), (Some(1e-6), Some(5)));
    }
}
