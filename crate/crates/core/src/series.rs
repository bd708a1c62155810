//! Fixed-length hourly series tagged with a physical unit.
//!
//! Every time-indexed quantity in the engine (demand, capacity factor,
//! generation, wholesale price, grid import, curtailment) travels as an
//! [`HourlySeries`]. The time step is one hour throughout.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hours in the modeled year (February 29 excluded).
pub const HOURS_PER_YEAR: usize = 8760;

/// Length of one simulation step in hours.
pub const DT_HOURS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "MW")]
    Mw,
    #[serde(rename = "MWh")]
    Mwh,
    #[serde(rename = "EUR/MWh")]
    EurPerMwh,
    #[serde(rename = "dimensionless")]
    Dimensionless,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Mw => "MW",
            Unit::Mwh => "MWh",
            Unit::EurPerMwh => "EUR/MWh",
            Unit::Dimensionless => "dimensionless",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HourlySeries {
    values: Vec<f64>,
    unit: Unit,
}

impl HourlySeries {
    /// Builds a series, rejecting empty input and non-finite values.
    pub fn new(values: Vec<f64>, unit: Unit) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("series is empty".into()));
        }
        if let Some((hour, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "hour {hour} holds non-finite value {v}"
            )));
        }
        Ok(Self { values, unit })
    }

    /// Power series in MW; values must be non-negative.
    pub fn power(values: Vec<f64>) -> Result<Self> {
        let s = Self::new(values, Unit::Mw)?;
        s.require_non_negative("power")?;
        Ok(s)
    }

    /// Hourly capacity factors; every value must lie in [0, 1].
    pub fn capacity_factor(values: Vec<f64>) -> Result<Self> {
        let s = Self::new(values, Unit::Dimensionless)?;
        if let Some((hour, v)) = s
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidSeries(format!(
                "capacity factor {v} at hour {hour} outside [0, 1]"
            )));
        }
        Ok(s)
    }

    /// Wholesale price series in EUR/MWh; values must be non-negative.
    pub fn price(values: Vec<f64>) -> Result<Self> {
        let s = Self::new(values, Unit::EurPerMwh)?;
        s.require_non_negative("price")?;
        Ok(s)
    }

    /// Per-hour energy in MWh; values must be non-negative.
    pub fn energy(values: Vec<f64>) -> Result<Self> {
        let s = Self::new(values, Unit::Mwh)?;
        s.require_non_negative("energy")?;
        Ok(s)
    }

    pub(crate) fn from_trusted(values: Vec<f64>, unit: Unit) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { values, unit }
    }

    fn require_non_negative(&self, what: &str) -> Result<()> {
        if let Some((hour, v)) = self.values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::InvalidSeries(format!(
                "{what} value {v} at hour {hour} is negative"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Pointwise scaling; the unit is preserved.
    pub fn scaled(&self, k: f64) -> Self {
        Self::from_trusted(self.values.iter().map(|v| v * k).collect(), self.unit)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn require_horizon(&self, expected: usize) -> Result<()> {
        if self.horizon() != expected {
            return Err(Error::HorizonMismatch {
                expected,
                found: self.horizon(),
            });
        }
        Ok(())
    }
}

pub(crate) fn same_horizon(a: &HourlySeries, b: &HourlySeries) -> Result<()> {
    b.require_horizon(a.horizon())
}
