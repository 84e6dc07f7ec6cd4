//! Library side of the `collapse-sim` binary: configuration schema, command
//! implementations, and the CSV/SVG/report emitters. The binary itself only
//! parses arguments and maps errors to exit codes.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod diagram;
pub mod report;
pub mod svg;

/// Marker for failures caused by the run configuration (syntax, schema, or
/// values). The binary exits with code 2 when one of these is anywhere in
/// the error chain, and 1 for everything else.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(ConfigError(msg.into()))
}

/// Wraps a core-domain failure as a config error: when a validated
/// constructor rejects values, the values came from the config.
pub fn domain_config_error(e: collapse_core::Error) -> anyhow::Error {
    config_error(e.to_string())
}
