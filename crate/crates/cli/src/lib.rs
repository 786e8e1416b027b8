//! Command line pipelines for qfree: spec parsing, theory and Monte Carlo
//! runs, CSV/JSON artifacts.

pub mod run;
pub mod spec;

pub use run::{parse_grid, parse_point, run, CliError, Command, RunConfig, RunOutcome};
pub use spec::{parse_spec, SpecError};

/// Reads a `--spec` argument: inline JSON, a path to a JSON file, or a
/// bare type name such as `ginibre`.
pub fn load_spec(arg: &str) -> Result<qfree::ensembles::EnsembleSpec, CliError> {
    let trimmed = arg.trim();
    let text = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else if std::path::Path::new(trimmed).exists() {
        std::fs::read_to_string(trimmed).map_err(|e| CliError::Io(format!("{trimmed}: {e}")))?
    } else {
        serde_json::json!({ "type": trimmed }).to_string()
    };
    parse_spec(&text).map_err(|e| CliError::Usage(format!("spec {e}")))
}
