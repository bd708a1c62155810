use std::path::PathBuf;

use thiserror::Error;

use crate::profiles::{ClassId, DayType, Season};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("horizon mismatch: expected {expected} hours, found {found}")]
    HorizonMismatch { expected: usize, found: usize },

    #[error("class {class} template is missing the {season}/{day_type} cell")]
    MissingTemplateCell {
        class: ClassId,
        season: Season,
        day_type: DayType,
    },

    #[error("calendar covers {days} days but the horizon needs {expected}")]
    CalendarMismatch { days: usize, expected: usize },

    #[error("invalid calendar: {0}")]
    InvalidCalendar(String),

    #[error("cannot apportion {total} non-domestic meters: company counts sum to zero")]
    CannotApportion { total: f64 },

    #[error("class {0} has meters but no correction factor")]
    MissingFactor(ClassId),

    #[error("class {0} has meters but no demand series")]
    MissingClassSeries(ClassId),

    #[error("regression is degenerate: {0}")]
    DegenerateRegression(String),

    #[error("capacity factor is zero in every hour; the PV bound is undefined")]
    NoDaylight,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("start level {start} outside [0, {capacity}]")]
    StartOutOfRange { start: f64, capacity: f64 },

    #[error("year {year} outside projection range {first}..={last}")]
    YearOutOfRange { year: i32, first: i32, last: i32 },

    #[error("annual demand must be positive, got {0}")]
    NonPositiveDemand(f64),

    #[error("design space is empty")]
    EmptyDesignSpace,

    #[error("{}: {message}", location(path, *row))]
    Parse {
        path: PathBuf,
        row: Option<usize>,
        message: String,
    },

    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

fn location(path: &std::path::Path, row: Option<usize>) -> String {
    match row {
        Some(row) => format!("{} row {}", path.display(), row),
        None => path.display().to_string(),
    }
}

impl Error {
    pub(crate) fn parse(
        path: &std::path::Path,
        row: Option<usize>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            row,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}
