//! Exit codes and machine-readable diagnostics.

use std::path::{Path, PathBuf};

use hybrid_sizing::Error;
use serde::Serialize;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_DAYLIGHT: i32 = 3;
pub const EXIT_YEAR_RANGE: i32 = 4;

/// One JSON object per failure, written to standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub code: i32,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
}

impl CliError {
    pub fn invalid_config(path: Option<&Path>, message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            error: "config",
            message: message.into(),
            path: path.map(Path::to_path_buf),
            row: None,
        }
    }

    pub fn config(path: &Path, text: &str, e: &toml::de::Error) -> Self {
        let row = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        Self {
            row,
            ..Self::invalid_config(Some(path), e.message())
        }
    }

    pub fn emit(&self) {
        eprintln!(
            "{}",
            serde_json::to_string(self).expect("diagnostic serializes")
        );
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (code, error, path, row) = match e {
            Error::Parse { path, row, .. } => (EXIT_INPUT, "parse", Some(path), row),
            Error::Io { path, .. } => (EXIT_FAILURE, "io", Some(path), None),
            Error::NoDaylight => (EXIT_NO_DAYLIGHT, "no_daylight", None, None),
            Error::YearOutOfRange { .. } => (EXIT_YEAR_RANGE, "year_out_of_range", None, None),
            Error::HorizonMismatch { .. }
            | Error::CalendarMismatch { .. }
            | Error::InvalidCalendar(_)
            | Error::InvalidSeries(_)
            | Error::MissingTemplateCell { .. }
            | Error::MissingClassSeries(_)
            | Error::MissingFactor(_) => (EXIT_INPUT, "input", None, None),
            _ => (EXIT_FAILURE, "run", None, None),
        };
        Self {
            code,
            error,
            message,
            path,
            row,
        }
    }
}
