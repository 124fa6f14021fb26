//! Output plumbing: atomic file writes and the JSON report envelope.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::config::Resolved;
use crate::CliError;

/// Writes `content` to `path`, or to standard output when no path is given.
///
/// File writes go through a temporary file in the target directory followed
/// by a rename, so a failing run never leaves a partial file behind.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|err| CliError::Config(format!("cannot write to stdout: {err}")))
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(parent) if !parent.as_os_str().is_empty() => parent,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|err| {
                CliError::Config(format!(
                    "cannot create a temporary file in {}: {err}",
                    dir.display()
                ))
            })?;
            tmp.write_all(content.as_bytes())
                .map_err(|err| CliError::Config(format!("cannot write output: {err}")))?;
            tmp.persist(path).map_err(|err| {
                CliError::Config(format!("cannot move output to {}: {err}", path.display()))
            })?;
            Ok(())
        }
    }
}

/// Wraps a command result in the `{command, config, result}` envelope.
pub fn wrap(cfg: &Resolved, result: Value) -> String {
    let report = json!({
        "command": cfg.command,
        "config": cfg.config_value(),
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}
