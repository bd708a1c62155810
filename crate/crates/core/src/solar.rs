//! PV generation from capacity factors and the analytical PV search bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{same_horizon, HourlySeries, Unit};

/// Installed PV capacity in MW.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PvCapacity(f64);

impl PvCapacity {
    pub fn new(mw: f64) -> Result<Self> {
        if !(mw.is_finite() && mw >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "PV capacity must be finite and non-negative, got {mw}"
            )));
        }
        Ok(Self(mw))
    }

    pub fn mw(self) -> f64 {
        self.0
    }
}

/// `G(t) = F(t) · C_PV`.
pub fn generation_profile(capacity_factor: &HourlySeries, c_pv: PvCapacity) -> HourlySeries {
    HourlySeries::from_trusted(
        capacity_factor
            .values()
            .iter()
            .map(|f| f * c_pv.0)
            .collect(),
        Unit::Mw,
    )
}

/// Largest `D(t)/F(t)` over daylight hours: the smallest PV capacity that
/// covers demand in every hour with sunshine.
pub fn max_pv_capacity(
    demand: &HourlySeries,
    capacity_factor: &HourlySeries,
) -> Result<PvCapacity> {
    max_pv_capacity_with_floor(demand, capacity_factor, 0.0)
}

/// As [`max_pv_capacity`], treating hours with `F(t) <= f_epsilon` as dark.
/// `f_epsilon = 0` is the unmodified bound.
pub fn max_pv_capacity_with_floor(
    demand: &HourlySeries,
    capacity_factor: &HourlySeries,
    f_epsilon: f64,
) -> Result<PvCapacity> {
    same_horizon(demand, capacity_factor)?;
    if !(f_epsilon.is_finite() && f_epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "f_epsilon must be non-negative, got {f_epsilon}"
        )));
    }
    let bound = demand
        .values()
        .iter()
        .zip(capacity_factor.values())
        .filter(|(_, f)| **f > f_epsilon)
        .map(|(d, f)| d / f)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        })
        .ok_or(Error::NoDaylight)?;
    PvCapacity::new(bound)
}
