use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ucpext::catalog::G2Prefactor;
use ucpext_cli::{render_text, run_batch, run_path, run_text, Flags, InputError, Options, Report, Status};

#[derive(Parser)]
#[command(
    name = "ucpext",
    version,
    about = "Extend UCP maps and semigroups from operator systems to matrix algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario file, or several with --batch.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Run the scenarios concurrently and emit one report per scenario.
        #[arg(long)]
        batch: bool,
        #[command(flatten)]
        common: Common,
    },
    /// The rebit walkthrough: catalog, cone, rotation and dissipative extensions.
    DemoRebit {
        /// Rate Δ of the dissipative dynamics.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Print a JSON schema shipped with the tool.
    Schema { which: SchemaKind },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Resolvent-family ω; in demo-rebit, the rotation frequency.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    report: ReportFormat,
    /// Prefactor of G2 in demo-rebit.
    #[arg(long, value_enum, default_value_t = Prefactor::Derived)]
    g2_prefactor: Prefactor,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prefactor {
    /// 3/4.
    Derived,
    /// 4/3.
    Printed,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaKind {
    Scenario,
    Report,
}

impl Common {
    fn overrides(&self) -> Options {
        Options {
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            omega: self.omega,
            starts: self.starts,
            ..Options::default()
        }
    }

    fn flags(&self) -> Flags {
        Flags {
            g2_prefactor: match self.g2_prefactor {
                Prefactor::Derived => G2Prefactor::Derived,
                Prefactor::Printed => G2Prefactor::Printed,
            },
        }
    }
}

fn emit(reports: &[Report], format: ReportFormat, batch: bool) -> ExitCode {
    match format {
        ReportFormat::Json if batch => {
            println!("{}", serde_json::to_string_pretty(reports).expect("reports serialize"))
        }
        ReportFormat::Json => println!("{}", reports[0].to_json()),
        ReportFormat::Text => {
            let texts: Vec<String> = reports.iter().map(render_text).collect();
            print!("{}", texts.join("\n"));
        }
    }
    let worst = reports.iter().map(|r| r.status).max().unwrap_or(Status::Ok);
    ExitCode::from(worst.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Run {
            scenarios,
            batch,
            common,
        } => {
            let overrides = common.overrides();
            let flags = common.flags();
            if scenarios.len() > 1 && !batch {
                let err = InputError::schema("several scenarios need --batch");
                let report = ucpext_cli::commands::invalid_input(None, &err, overrides);
                return emit(&[report], common.report, false);
            }
            let reports = if batch {
                let paths: Vec<&std::path::Path> = scenarios.iter().map(PathBuf::as_path).collect();
                run_batch(&paths, &overrides, flags)
            } else {
                vec![run_path(&scenarios[0], &overrides, flags)]
            };
            emit(&reports, common.report, batch)
        }
        Cmd::DemoRebit { delta, common } => {
            let mut overrides = common.overrides();
            // Here --omega is the rotation frequency.
            overrides.omega_param = overrides.omega.take();
            overrides.delta = delta;
            let report = run_text(r#"{"command":"demo-rebit"}"#, &overrides, common.flags());
            emit(&[report], common.report, false)
        }
        Cmd::Schema { which } => {
            let text = match which {
                SchemaKind::Scenario => ucpext_cli::SCENARIO_SCHEMA,
                SchemaKind::Report => ucpext_cli::REPORT_SCHEMA,
            };
            print!("{text}");
            ExitCode::SUCCESS
        }
    }
}
