//! Scenario runner for the `ucpext` command-line tool.

pub mod commands;
pub mod demo;
pub mod report;
pub mod scenario;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;

use serde_json::{json, Value};

pub use commands::{run, Flags};
pub use report::{render_text, Report, Status};
pub use scenario::{Command, InputError, Options, Scenario};

pub const SCENARIO_SCHEMA: &str = include_str!("../schemas/scenario.schema.json");
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

/// Parses and runs scenario text. Malformed input yields an invalid-input
/// report that still echoes the command when one could be read.
pub fn run_text(text: &str, overrides: &Options, flags: Flags) -> Report {
    match Scenario::parse(text) {
        Ok(s) => run(&s, overrides, flags),
        Err(e) => {
            let command = serde_json::from_str::<Value>(text)
                .ok()
                .and_then(|v| v.get("command").and_then(Value::as_str).map(str::to_owned));
            commands::invalid_input(command.as_deref(), &e, overrides.clone())
        }
    }
}

pub fn run_path(path: &Path, overrides: &Options, flags: Flags) -> Report {
    match std::fs::read_to_string(path) {
        Ok(text) => run_text(&text, overrides, flags),
        Err(e) => commands::invalid_input(
            None,
            &InputError::io(format!("{}: {e}", path.display())),
            overrides.clone(),
        ),
    }
}

/// Runs scenarios concurrently, one thread each; a panic in one scenario
/// becomes a failed report for that scenario only. Reports come back in
/// input order.
pub fn run_batch(paths: &[&Path], overrides: &Options, flags: Flags) -> Vec<Report> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .iter()
            .map(|&path| {
                scope.spawn(move || {
                    panic::catch_unwind(AssertUnwindSafe(|| run_path(path, overrides, flags))).unwrap_or_else(|_| Report {
                        command: None,
                        status: Status::Failed,
                        results: json!({ "error": { "kind": "internal", "message": format!("{} panicked", path.display()) } }),
                        provenance: commands::provenance(overrides.clone()),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("panics are caught"))
            .collect()
    })
}
