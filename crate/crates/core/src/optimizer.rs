//! Design-space enumeration, LCOE-optimal selection, and the year sweep.
//!
//! The PV range runs from 0 to the analytical bound and, for each PV size,
//! the storage range runs from 0 to the analytical size for that generation
//! profile. Both endpoints are always evaluated. Dispatch does not depend on
//! costs, so one design space is priced once per year.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispatch::summarize;
use crate::economics::{
    cost_breakdown, period_fraction, project_costs, AnnualCostBreakdown, CostAssumptions,
    CostProjection, CrfForm,
};
use crate::error::{Error, Result};
use crate::series::{same_horizon, HourlySeries};
use crate::solar::{generation_profile, max_pv_capacity_with_floor, PvCapacity};
use crate::storage::{capacity_from_size, StorageParams, StorageSize, StorageSizing};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// MW
    pub pv_increment: f64,
    /// MWh
    pub storage_increment: f64,
    pub year_start: i32,
    pub year_end: i32,
    /// Replaces the analytical PV bound when set, MW.
    pub max_pv_override: Option<f64>,
    /// Capacity factors at or below this are treated as dark for the PV bound.
    pub f_epsilon: f64,
    pub fixed_point_iters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            pv_increment: 10.0,
            storage_increment: 10.0,
            year_start: 2019,
            year_end: 2100,
            max_pv_override: None,
            f_epsilon: 0.0,
            fixed_point_iters: 1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pv_increment", self.pv_increment),
            ("storage_increment", self.storage_increment),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.year_start > self.year_end {
            return Err(Error::InvalidParameter(format!(
                "year_start {} is after year_end {}",
                self.year_start, self.year_end
            )));
        }
        if let Some(m) = self.max_pv_override {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "max_pv_override must be non-negative, got {m}"
                )));
            }
        }
        if !(self.f_epsilon.is_finite() && self.f_epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "f_epsilon must be non-negative, got {}",
                self.f_epsilon
            )));
        }
        if self.fixed_point_iters == 0 {
            return Err(Error::InvalidParameter(
                "fixed_point_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Upper limit on the points along one search axis.
pub const MAX_AXIS_POINTS: usize = 1_000_000;

/// `0, inc, 2·inc, …` below `max`, then `max` itself.
pub fn grid_values(max: f64, increment: f64) -> Result<Vec<f64>> {
    let steps = max / increment;
    if !(max.is_finite() && max >= 0.0 && increment > 0.0) || steps >= MAX_AXIS_POINTS as f64 {
        return Err(Error::InvalidParameter(format!(
            "search range 0..={max} with increment {increment} exceeds {MAX_AXIS_POINTS} points; \
             raise the increment, set f_epsilon, or set max_pv_override"
        )));
    }
    let eps = 1e-9 * max.max(1.0);
    let mut out = Vec::with_capacity(steps as usize + 2);
    let mut k = 0u64;
    loop {
        let v = k as f64 * increment;
        if v >= max - eps {
            break;
        }
        out.push(v);
        k += 1;
    }
    out.push(max);
    Ok(out)
}

/// One simulated (PV, storage) combination, before pricing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacePoint {
    /// MW
    pub c_pv: f64,
    /// Usable storage size, MWh.
    pub storage_size: f64,
    /// Nominal storage capacity `size / DoD`, MWh.
    pub c_s: f64,
    /// MWh over the horizon.
    pub annual_import: f64,
    /// EUR over the horizon.
    pub import_cost: f64,
    pub start_level: f64,
}

/// Storage analysis for one PV size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PvRow {
    pub c_pv: f64,
    /// Analytical storage size for this generation profile, MWh.
    pub e_max: f64,
    pub critical_points: usize,
    /// Unconstrained level at the end of the horizon, MWh.
    pub end_level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignSpace {
    /// Ordered by `c_pv`, then by `c_s`.
    pub points: Vec<SpacePoint>,
    pub rows: Vec<PvRow>,
    /// Demand energy over the horizon, MWh.
    pub demand_energy: f64,
    pub horizon: usize,
    pub max_pv: f64,
}

/// Runs the nested PV/storage search. `price` supplies the import cost of
/// each point; costs of PV and storage are applied later.
pub fn enumerate_design_space(
    demand: &HourlySeries,
    capacity_factor: &HourlySeries,
    price: &HourlySeries,
    params: &StorageParams,
    cfg: &SearchConfig,
) -> Result<DesignSpace> {
    cfg.validate()?;
    params.validate()?;
    same_horizon(demand, capacity_factor)?;
    same_horizon(demand, price)?;
    // the bound is computed even with an override so a dark input is still rejected
    let bound = max_pv_capacity_with_floor(demand, capacity_factor, cfg.f_epsilon)?.mw();
    let max_pv = cfg.max_pv_override.unwrap_or(bound);

    let rows: Vec<(PvRow, Vec<SpacePoint>)> = grid_values(max_pv, cfg.pv_increment)?
        .into_par_iter()
        .map(|c_pv| pv_row(demand, capacity_factor, price, params, cfg, c_pv))
        .collect::<Result<_>>()?;

    let mut space = DesignSpace {
        points: Vec::new(),
        rows: Vec::with_capacity(rows.len()),
        demand_energy: demand.sum(),
        horizon: demand.horizon(),
        max_pv,
    };
    for (row, points) in rows {
        space.rows.push(row);
        space.points.extend(points);
    }
    Ok(space)
}

fn pv_row(
    demand: &HourlySeries,
    capacity_factor: &HourlySeries,
    price: &HourlySeries,
    params: &StorageParams,
    cfg: &SearchConfig,
    c_pv: f64,
) -> Result<(PvRow, Vec<SpacePoint>)> {
    let generation = generation_profile(capacity_factor, PvCapacity::new(c_pv)?);
    let sizing = StorageSizing::analyze(demand, &generation, params)?;
    let e_max = sizing.size.mwh();
    let row = PvRow {
        c_pv,
        e_max,
        critical_points: sizing.critical_points.len(),
        end_level: sizing.profile.end_level(),
    };
    let points = grid_values(e_max, cfg.storage_increment)?
        .into_par_iter()
        .map(|e| {
            let size = StorageSize::new(e)?;
            let summary = summarize(
                demand,
                &generation,
                size,
                params,
                cfg.fixed_point_iters,
                Some(price),
            )?;
            Ok(SpacePoint {
                c_pv,
                storage_size: e,
                c_s: capacity_from_size(size, params)?,
                annual_import: summary.annual_import,
                import_cost: summary.import_cost,
                start_level: summary.start_level,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((row, points))
}

/// A priced design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignPoint {
    /// MW
    pub c_pv: f64,
    /// Nominal storage capacity, MWh.
    pub c_s: f64,
    /// MWh over the horizon.
    pub annual_import: f64,
    /// EUR/MWh
    pub lcoe: f64,
    pub breakdown: AnnualCostBreakdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalResult {
    pub year: i32,
    pub point: DesignPoint,
    /// Fraction of demand energy met by import.
    pub grid_share: f64,
}

/// LCOE of every point under one set of costs, in the space's order.
///
/// Capital costs are prorated to the space's horizon so that they are
/// comparable with its simulated import cost.
pub fn price_design_space(
    space: &DesignSpace,
    costs: &CostAssumptions,
    form: CrfForm,
) -> Result<Vec<DesignPoint>> {
    costs.validate()?;
    let phi = period_fraction(space.horizon);
    space
        .points
        .iter()
        .map(|p| {
            let breakdown = cost_breakdown(
                p.c_pv,
                p.c_s,
                p.import_cost,
                space.demand_energy,
                costs,
                form,
                phi,
            )?;
            Ok(DesignPoint {
                c_pv: p.c_pv,
                c_s: p.c_s,
                annual_import: p.annual_import,
                lcoe: breakdown.lcoe,
                breakdown,
            })
        })
        .collect()
}

/// Lowest-LCOE point; ties go to less storage, then less PV.
pub fn select_optimal(
    space: &DesignSpace,
    costs: &CostAssumptions,
    form: CrfForm,
    year: i32,
) -> Result<OptimalResult> {
    let priced = price_design_space(space, costs, form)?;
    let point = best_point(&priced)?;
    Ok(OptimalResult {
        year,
        point,
        grid_share: grid_share(point.annual_import, space.demand_energy),
    })
}

pub fn best_point(points: &[DesignPoint]) -> Result<DesignPoint> {
    points
        .iter()
        .copied()
        .min_by(|a, b| {
            a.lcoe
                .total_cmp(&b.lcoe)
                .then(a.c_s.total_cmp(&b.c_s))
                .then(a.c_pv.total_cmp(&b.c_pv))
        })
        .ok_or(Error::EmptyDesignSpace)
}

fn grid_share(import: f64, demand: f64) -> f64 {
    if demand > 0.0 {
        (import / demand).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Optimum for every year of `cfg`'s range, in year order.
pub fn multi_year_sweep(
    space: &DesignSpace,
    base_costs: &CostAssumptions,
    projection: &CostProjection,
    cfg: &SearchConfig,
    form: CrfForm,
) -> Result<Vec<OptimalResult>> {
    cfg.validate()?;
    projection.check_year(cfg.year_start)?;
    projection.check_year(cfg.year_end)?;
    (cfg.year_start..=cfg.year_end)
        .into_par_iter()
        .map(|year| {
            let costs = project_costs(base_costs, projection, year)?;
            select_optimal(space, &costs, form, year)
        })
        .collect()
}
