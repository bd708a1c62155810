//! Annualized costs, LCOE, and cost projection across years.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{same_horizon, HourlySeries, HOURS_PER_YEAR};

/// Installed and O&M costs, lifetimes, and discount rate. Money is EUR,
/// capacities MW (PV) and MWh (storage).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostAssumptions {
    /// EUR/MW
    pub pv_installed: f64,
    /// EUR/MW/year
    pub pv_om: f64,
    /// EUR/MWh
    pub storage_installed: f64,
    /// EUR/MWh/year
    pub storage_om: f64,
    /// years
    pub pv_life: u32,
    /// years
    pub storage_life: u32,
    pub discount_rate: f64,
}

impl CostAssumptions {
    /// 2019 costs: PV 892 EUR/kW installed and 8.76 EUR/kW/yr O&M, storage
    /// 388 EUR/kWh installed and 9.7 EUR/kWh/yr O&M, 30- and 15-year
    /// lifetimes, 3 % discount rate.
    pub fn reference_2019() -> Self {
        Self {
            pv_installed: 892_000.0,
            pv_om: 8_760.0,
            storage_installed: 388_000.0,
            storage_om: 9_700.0,
            pv_life: 30,
            storage_life: 15,
            discount_rate: 0.03,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pv_installed", self.pv_installed),
            ("pv_om", self.pv_om),
            ("storage_installed", self.storage_installed),
            ("storage_om", self.storage_om),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a non-negative cost, got {v}"
                )));
            }
        }
        if self.pv_life < 1 || self.storage_life < 1 {
            return Err(Error::InvalidParameter(
                "lifetimes must be at least 1 year".into(),
            ));
        }
        if !(self.discount_rate > 0.0 && self.discount_rate < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "discount_rate must lie in (0, 1), got {}",
                self.discount_rate
            )));
        }
        Ok(())
    }
}

/// Denominator of the capital recovery factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrfForm {
    /// `r(1+r)^n / ((1+r)^n − 1)`
    #[default]
    Standard,
    /// `r(1+r)^n / ((1+r)^n + 1)`, kept for reproducing audit runs.
    PaperLiteral,
}

pub fn capital_recovery_factor(rate: f64, years: u32) -> Result<f64> {
    capital_recovery_factor_with(rate, years, CrfForm::Standard)
}

pub fn capital_recovery_factor_with(rate: f64, years: u32, form: CrfForm) -> Result<f64> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "discount rate must be positive, got {rate}"
        )));
    }
    if years < 1 {
        return Err(Error::InvalidParameter(
            "lifetime must be at least 1 year".into(),
        ));
    }
    let growth = (1.0 + rate).powi(years as i32);
    Ok(match form {
        CrfForm::Standard => rate * growth / (growth - 1.0),
        CrfForm::PaperLiteral => rate * growth / (growth + 1.0),
    })
}

/// `capacity · (installed · CRF + om)`, EUR/year.
pub fn annualized_component_cost(
    capacity: f64,
    installed: f64,
    om: f64,
    rate: f64,
    years: u32,
    form: CrfForm,
) -> Result<f64> {
    if !(capacity.is_finite() && capacity >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "capacity must be non-negative, got {capacity}"
        )));
    }
    let crf = capital_recovery_factor_with(rate, years, form)?;
    Ok(capacity * (installed * crf + om))
}

/// `Σ import(t) · price(t)`, EUR.
pub fn import_cost(grid_import: &HourlySeries, price: &HourlySeries) -> Result<f64> {
    same_horizon(grid_import, price)?;
    Ok(grid_import
        .values()
        .iter()
        .zip(price.values())
        .map(|(e, p)| e * p)
        .sum())
}

/// `(P_PV + P_S + P_E) / D`, EUR/MWh.
pub fn lcoe(
    pv_annualized: f64,
    storage_annualized: f64,
    import_cost: f64,
    annual_demand: f64,
) -> Result<f64> {
    if annual_demand.is_nan() || annual_demand <= 0.0 {
        return Err(Error::NonPositiveDemand(annual_demand));
    }
    Ok((pv_annualized + storage_annualized + import_cost) / annual_demand)
}

/// Fraction of a year covered by `horizon` hours. Annualized capital costs
/// are scaled by it so shorter horizons are priced consistently with their
/// simulated import.
pub fn period_fraction(horizon: usize) -> f64 {
    horizon as f64 / HOURS_PER_YEAR as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnualCostBreakdown {
    pub pv_annualized: f64,
    pub storage_annualized: f64,
    pub import_cost: f64,
    pub lcoe: f64,
}

/// Prices one (PV, storage capacity) combination.
///
/// `import_cost` and `demand` refer to the simulated horizon;
/// `period_fraction` scales the annualized capital costs to that horizon.
pub fn cost_breakdown(
    c_pv: f64,
    c_s: f64,
    import_cost: f64,
    demand: f64,
    costs: &CostAssumptions,
    form: CrfForm,
    period_fraction: f64,
) -> Result<AnnualCostBreakdown> {
    let pv = period_fraction
        * annualized_component_cost(
            c_pv,
            costs.pv_installed,
            costs.pv_om,
            costs.discount_rate,
            costs.pv_life,
            form,
        )?;
    let storage = period_fraction
        * annualized_component_cost(
            c_s,
            costs.storage_installed,
            costs.storage_om,
            costs.discount_rate,
            costs.storage_life,
            form,
        )?;
    let lcoe = if demand == 0.0 && pv + storage + import_cost == 0.0 {
        // nothing consumed, nothing spent
        0.0
    } else {
        lcoe(pv, storage, import_cost, demand)?
    };
    Ok(AnnualCostBreakdown {
        pv_annualized: pv,
        storage_annualized: storage,
        import_cost,
        lcoe,
    })
}

/// Cost multipliers relative to 2019.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostMultipliers {
    pub pv_installed: f64,
    pub pv_om: f64,
    /// Shared by storage installed and O&M cost.
    pub storage: f64,
}

impl CostMultipliers {
    pub const UNITY: CostMultipliers = CostMultipliers {
        pv_installed: 1.0,
        pv_om: 1.0,
        storage: 1.0,
    };

    fn as_array(self) -> [f64; 3] {
        [self.pv_installed, self.pv_om, self.storage]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Self {
            pv_installed: a[0],
            pv_om: a[1],
            storage: a[2],
        }
    }
}

/// How multipliers evolve between anchor years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Constant reduction in percentage points per year.
    #[default]
    Linear,
    /// Constant relative reduction per year.
    Geometric,
}

pub const BASE_YEAR: i32 = 2019;

#[derive(Debug, Clone, PartialEq)]
pub struct CostProjection {
    anchors: BTreeMap<i32, CostMultipliers>,
    interpolation: Interpolation,
}

impl CostProjection {
    pub fn new(
        anchors: BTreeMap<i32, CostMultipliers>,
        interpolation: Interpolation,
    ) -> Result<Self> {
        match anchors.get(&BASE_YEAR) {
            Some(m) if *m == CostMultipliers::UNITY => {}
            Some(m) => {
                return Err(Error::InvalidParameter(format!(
                    "{BASE_YEAR} multipliers must all be 1, got {m:?}"
                )))
            }
            None => {
                return Err(Error::InvalidParameter(format!(
                    "projection must include the {BASE_YEAR} anchor"
                )))
            }
        }
        if let Some(first) = anchors.keys().next() {
            if *first < BASE_YEAR {
                return Err(Error::InvalidParameter(format!(
                    "anchor year {first} precedes {BASE_YEAR}"
                )));
            }
        }
        for (year, m) in &anchors {
            if m.as_array().iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
                return Err(Error::InvalidParameter(format!(
                    "multipliers for {year} must lie in (0, 1], got {m:?}"
                )));
            }
        }
        Ok(Self {
            anchors,
            interpolation,
        })
    }

    /// Anchors for 2030, 2050, and 2100: PV installed 56/46/21 %, PV O&M
    /// 73/65/48 %, storage 42/32/5 % of 2019 cost.
    pub fn published(interpolation: Interpolation) -> Self {
        let m = |pv_installed, pv_om, storage| CostMultipliers {
            pv_installed,
            pv_om,
            storage,
        };
        let anchors = [
            (BASE_YEAR, CostMultipliers::UNITY),
            (2030, m(0.56, 0.73, 0.42)),
            (2050, m(0.46, 0.65, 0.32)),
            (2100, m(0.21, 0.48, 0.05)),
        ]
        .into();
        Self {
            anchors,
            interpolation,
        }
    }

    /// All multipliers 1 in every year up to `last_year`.
    pub fn constant(last_year: i32) -> Self {
        let anchors = [
            (BASE_YEAR, CostMultipliers::UNITY),
            (last_year.max(BASE_YEAR), CostMultipliers::UNITY),
        ]
        .into();
        Self {
            anchors,
            interpolation: Interpolation::Linear,
        }
    }

    pub fn anchors(&self) -> &BTreeMap<i32, CostMultipliers> {
        &self.anchors
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn last_year(&self) -> i32 {
        *self.anchors.keys().next_back().unwrap_or(&BASE_YEAR)
    }

    pub fn check_year(&self, year: i32) -> Result<()> {
        if year < BASE_YEAR || year > self.last_year() {
            return Err(Error::YearOutOfRange {
                year,
                first: BASE_YEAR,
                last: self.last_year(),
            });
        }
        Ok(())
    }

    pub fn multipliers(&self, year: i32) -> Result<CostMultipliers> {
        self.check_year(year)?;
        if let Some(m) = self.anchors.get(&year) {
            return Ok(*m);
        }
        let (&y0, m0) = self
            .anchors
            .range(..year)
            .next_back()
            .expect("base anchor below");
        let (&y1, m1) = self
            .anchors
            .range(year..)
            .next()
            .expect("last anchor above");
        let frac = f64::from(year - y0) / f64::from(y1 - y0);
        let (a, b) = (m0.as_array(), m1.as_array());
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = match self.interpolation {
                Interpolation::Linear => a[k] + (b[k] - a[k]) * frac,
                Interpolation::Geometric => a[k] * (b[k] / a[k]).powf(frac),
            };
        }
        Ok(CostMultipliers::from_array(out))
    }
}

pub fn project_costs(
    base: &CostAssumptions,
    projection: &CostProjection,
    year: i32,
) -> Result<CostAssumptions> {
    let m = projection.multipliers(year)?;
    Ok(CostAssumptions {
        pv_installed: base.pv_installed * m.pv_installed,
        pv_om: base.pv_om * m.pv_om,
        storage_installed: base.storage_installed * m.storage,
        storage_om: base.storage_om * m.storage,
        ..*base
    })
}
