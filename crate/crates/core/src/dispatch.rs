//! Constrained storage operation under the conventional strategy.
//!
//! Each hour, solar serves demand first. Surplus charges the store until it
//! is full and the rest is curtailed. A deficit is drawn from the store
//! until it is empty and the rest is imported from the grid. The grid never
//! charges the store.
//!
//! Level bookkeeping matches [`unconstrained_profile`](crate::storage::unconstrained_profile):
//! a surplus `x` raises the level by `x·η_c`, and a deficit `x` lowers it by
//! `x/η_d`, so a stored level `S` can deliver at most `S·η_d`.

use crate::error::{Error, Result};
use crate::series::{same_horizon, HourlySeries, Unit, DT_HOURS};
use crate::storage::{StorageParams, StorageSize};

/// Convergence threshold for the sustainable-start fixed point, in MWh.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchResult {
    /// Levels `S(0) … S(T)` in MWh, each within `[0, E]`.
    pub storage_levels: Vec<f64>,
    /// MWh imported in each hour.
    pub grid_import: HourlySeries,
    /// MWh of surplus generation discarded in each hour.
    pub curtailment: HourlySeries,
    pub start_level: f64,
    pub end_level: f64,
}

/// Runs the strategy over the horizon starting at `start` MWh.
pub fn simulate(
    demand: &HourlySeries,
    generation: &HourlySeries,
    size: StorageSize,
    params: &StorageParams,
    start: f64,
) -> Result<DispatchResult> {
    let mut levels = Vec::with_capacity(demand.horizon() + 1);
    let mut import = Vec::with_capacity(demand.horizon());
    let mut curtailment = Vec::with_capacity(demand.horizon());
    let end_level = run(
        demand,
        generation,
        size,
        params,
        start,
        |level, imp, curt| {
            levels.push(level);
            import.push(imp);
            curtailment.push(curt);
        },
    )?;
    levels.push(end_level);
    Ok(DispatchResult {
        storage_levels: levels,
        grid_import: HourlySeries::from_trusted(import, Unit::Mwh),
        curtailment: HourlySeries::from_trusted(curtailment, Unit::Mwh),
        start_level: start,
        end_level,
    })
}

/// Core recurrence. `record` receives the level at the start of each hour
/// and that hour's import and curtailment; the end level is returned.
fn run(
    demand: &HourlySeries,
    generation: &HourlySeries,
    size: StorageSize,
    params: &StorageParams,
    start: f64,
    mut record: impl FnMut(f64, f64, f64),
) -> Result<f64> {
    same_horizon(demand, generation)?;
    params.validate()?;
    let cap = size.mwh();
    if !(start >= 0.0 && start <= cap) {
        return Err(Error::StartOutOfRange {
            start,
            capacity: cap,
        });
    }

    let mut level = start;
    for (&d, &g) in demand.values().iter().zip(generation.values()) {
        let net = g - d;
        if net > 0.0 {
            let rise = net * params.eta_c * DT_HOURS;
            let room = cap - level;
            if rise <= room {
                record(level, 0.0, 0.0);
                level = (level + rise).min(cap);
            } else {
                record(level, 0.0, (net * DT_HOURS - room / params.eta_c).max(0.0));
                level = cap;
            }
        } else if net < 0.0 {
            let drop = -net * DT_HOURS / params.eta_d;
            if drop <= level {
                record(level, 0.0, 0.0);
                level -= drop;
            } else {
                record(
                    level,
                    (-net * DT_HOURS - level * params.eta_d).max(0.0),
                    0.0,
                );
                level = 0.0;
            }
        } else {
            record(level, 0.0, 0.0);
        }
    }
    Ok(level)
}

fn end_level(
    demand: &HourlySeries,
    generation: &HourlySeries,
    size: StorageSize,
    params: &StorageParams,
    start: f64,
) -> Result<f64> {
    run(demand, generation, size, params, start, |_, _, _| {})
}

/// Start level whose simulated year ends where it began.
///
/// The first pass starts empty and its end level is handed to the next
/// start. `fixed_point_iters = 1` stops after that single hand-off; larger
/// values keep iterating until the start and end agree within
/// [`FIXED_POINT_TOLERANCE`].
pub fn sustainable_start(
    demand: &HourlySeries,
    generation: &HourlySeries,
    size: StorageSize,
    params: &StorageParams,
    fixed_point_iters: usize,
) -> Result<f64> {
    if fixed_point_iters == 0 {
        return Err(Error::InvalidParameter(
            "fixed_point_iters must be at least 1".into(),
        ));
    }
    let mut start = 0.0;
    for _ in 0..fixed_point_iters {
        let end = end_level(demand, generation, size, params, start)?;
        let converged = (end - start).abs() < FIXED_POINT_TOLERANCE;
        start = end;
        if converged {
            break;
        }
    }
    Ok(start)
}

/// Total grid import over the horizon, MWh.
pub fn annual_import(result: &DispatchResult) -> f64 {
    result.grid_import.sum()
}

/// Totals of one dispatch run, without per-hour traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispatchSummary {
    pub start_level: f64,
    pub end_level: f64,
    pub annual_import: f64,
    pub annual_curtailment: f64,
    /// `Σ import(t) · price(t)` when a price series was supplied.
    pub import_cost: f64,
}

/// Sustainable start followed by the reported pass, keeping only totals.
pub fn summarize(
    demand: &HourlySeries,
    generation: &HourlySeries,
    size: StorageSize,
    params: &StorageParams,
    fixed_point_iters: usize,
    price: Option<&HourlySeries>,
) -> Result<DispatchSummary> {
    if let Some(p) = price {
        same_horizon(demand, p)?;
    }
    let start = sustainable_start(demand, generation, size, params, fixed_point_iters)?;
    let prices = price.map(HourlySeries::values);
    let (mut hour, mut imports, mut curtailed, mut cost) = (0usize, 0.0, 0.0, 0.0);
    let end_level = run(demand, generation, size, params, start, |_, imp, curt| {
        imports += imp;
        curtailed += curt;
        if let Some(p) = prices {
            cost += imp * p[hour];
        }
        hour += 1;
    })?;
    Ok(DispatchSummary {
        start_level: start,
        end_level,
        annual_import: imports,
        annual_curtailment: curtailed,
        import_cost: cost,
    })
}
