//! Subcommand bodies. Each returns a JSON summary for standard output.

use std::fs;
use std::path::{Path, PathBuf};

use hybrid_sizing::economics::{project_costs, CostAssumptions, CostProjection};
use hybrid_sizing::io;
use hybrid_sizing::optimizer::{
    enumerate_design_space, multi_year_sweep, price_design_space, DesignSpace,
};
use hybrid_sizing::profiles::DemandModel;
use hybrid_sizing::storage::{StorageSize, StorageSizing};
use hybrid_sizing::{generation_profile, simulate as run_dispatch, sustainable_start};
use hybrid_sizing::{HourlySeries, PvCapacity, Unit};
use serde_json::{json, Value};

use crate::config::{DemandUnit, RunConfig};
use crate::report::CliError;

type CmdResult = Result<Value, CliError>;

fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
    p.as_deref().ok_or_else(|| {
        CliError::invalid_config(None, format!("'{key}' is required for this command"))
    })
}

fn prepare_out_dir(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        CliError::from(hybrid_sizing::Error::Io {
            path: cfg.out_dir.clone(),
            message: e.to_string(),
        })
    })
}

fn synthesize(cfg: &RunConfig) -> Result<HourlySeries, CliError> {
    let s = &cfg.synthesis;
    let model = DemandModel {
        templates: io::read_templates(required(&s.template, "template")?)?,
        calendar: io::read_calendar(required(&s.calendar, "calendar")?)?,
        census: s.census(),
        factors: s.factors()?,
    };
    Ok(model.synthesize(cfg.horizon)?)
}

fn load_demand(cfg: &RunConfig) -> Result<HourlySeries, CliError> {
    match &cfg.inputs.demand {
        Some(path) => {
            let d = io::read_series(path, Unit::Mw, cfg.horizon)?;
            Ok(match cfg.inputs.demand_unit {
                DemandUnit::Mw => d,
                DemandUnit::Kw => d.scaled(1e-3),
            })
        }
        None if cfg.synthesis.template.is_some() => synthesize(cfg),
        None => Err(CliError::invalid_config(
            None,
            "either 'demand' or 'template' and 'calendar' must be set",
        )),
    }
}

struct Scenario {
    demand: HourlySeries,
    capacity_factor: HourlySeries,
    price: HourlySeries,
}

fn load_scenario(cfg: &RunConfig) -> Result<Scenario, CliError> {
    let capacity_factor = io::read_series(
        required(&cfg.inputs.capacity_factor, "capacity_factor")?,
        Unit::Dimensionless,
        cfg.horizon,
    )?;
    let price = io::read_series(
        required(&cfg.inputs.price, "price")?,
        Unit::EurPerMwh,
        cfg.horizon,
    )?;
    Ok(Scenario {
        demand: load_demand(cfg)?,
        capacity_factor,
        price,
    })
}

fn load_costs(cfg: &RunConfig) -> Result<CostAssumptions, CliError> {
    match &cfg.inputs.costs {
        Some(p) => Ok(io::read_costs(p)?),
        None => Ok(CostAssumptions::reference_2019()),
    }
}

fn load_projection(cfg: &RunConfig) -> Result<CostProjection, CliError> {
    let interp = cfg.economics.interpolation;
    match &cfg.inputs.projection {
        Some(p) => Ok(io::read_projection(p, interp)?),
        None => Ok(CostProjection::published(interp)),
    }
}

fn enumerate(cfg: &RunConfig, sc: &Scenario) -> Result<DesignSpace, CliError> {
    Ok(enumerate_design_space(
        &sc.demand,
        &sc.capacity_factor,
        &sc.price,
        &cfg.storage.params()?,
        &cfg.search.config(),
    )?)
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

pub fn synth_demand(cfg: &RunConfig) -> CmdResult {
    let demand = synthesize(cfg)?;
    prepare_out_dir(cfg)?;
    let out = cfg.out_dir.join("demand.csv");
    io::write_file(&out, |w| io::write_series(w, &demand))?;
    Ok(json!({
        "command": "synth-demand",
        "output": path_str(&out),
        "hours": demand.horizon(),
        "annual_demand_mwh": demand.sum(),
    }))
}

/// Writes the full table priced with the costs of `year_start`.
pub fn design_space(cfg: &RunConfig) -> CmdResult {
    let sc = load_scenario(cfg)?;
    let projection = load_projection(cfg)?;
    let costs = project_costs(&load_costs(cfg)?, &projection, cfg.search.year_start)?;
    let space = enumerate(cfg, &sc)?;
    let priced = price_design_space(&space, &costs, cfg.economics.crf_form())?;

    prepare_out_dir(cfg)?;
    let out = cfg.out_dir.join("design_space.csv");
    io::write_file(&out, |w| io::write_design_space(w, &priced))?;
    let mut summary = json!({
        "command": "design-space",
        "output": path_str(&out),
        "points": priced.len(),
        "max_pv_mw": space.max_pv,
        "priced_year": cfg.search.year_start,
    });
    if cfg.output.trace_enabled {
        let params = cfg.storage.params()?;
        let rows = space
            .rows
            .iter()
            .map(|row| {
                let g = generation_profile(&sc.capacity_factor, PvCapacity::new(row.c_pv)?);
                let sizing = StorageSizing::analyze(&sc.demand, &g, &params)?;
                Ok((*row, sizing.critical_points))
            })
            .collect::<hybrid_sizing::Result<Vec<_>>>()?;
        let diag = cfg.out_dir.join("storage_diagnostics.csv");
        io::write_file(&diag, |w| io::write_storage_diagnostics(w, &rows))?;
        summary["diagnostics"] = json!(path_str(&diag));
    }
    Ok(summary)
}

pub fn sweep(cfg: &RunConfig) -> CmdResult {
    let projection = load_projection(cfg)?;
    projection.check_year(cfg.search.year_start)?;
    projection.check_year(cfg.search.year_end)?;
    let costs = load_costs(cfg)?;
    let sc = load_scenario(cfg)?;
    let space = enumerate(cfg, &sc)?;
    let results = multi_year_sweep(
        &space,
        &costs,
        &projection,
        &cfg.search.config(),
        cfg.economics.crf_form(),
    )?;

    prepare_out_dir(cfg)?;
    let out = cfg.out_dir.join("sweep.csv");
    io::write_file(&out, |w| io::write_sweep(w, &results))?;
    Ok(json!({
        "command": "sweep",
        "output": path_str(&out),
        "years": results.len(),
        "design_points": space.points.len(),
    }))
}

/// Hour-by-hour trace for the `[simulate]` design point.
pub fn simulate(cfg: &RunConfig) -> CmdResult {
    let capacity_factor = io::read_series(
        required(&cfg.inputs.capacity_factor, "capacity_factor")?,
        Unit::Dimensionless,
        cfg.horizon,
    )?;
    let demand = load_demand(cfg)?;
    let params = cfg.storage.params()?;
    let generation = generation_profile(&capacity_factor, PvCapacity::new(cfg.simulate.c_pv)?);
    if !(cfg.simulate.c_s.is_finite() && cfg.simulate.c_s >= 0.0) {
        return Err(CliError::invalid_config(None, "'c_s' must be non-negative"));
    }
    let size = StorageSize::new(cfg.simulate.c_s * params.dod)?;
    let start = sustainable_start(
        &demand,
        &generation,
        size,
        &params,
        cfg.search.fixed_point_iters,
    )?;
    let result = run_dispatch(&demand, &generation, size, &params, start)?;

    prepare_out_dir(cfg)?;
    let out = cfg.out_dir.join("trace.csv");
    io::write_file(&out, |w| io::write_trace(w, &demand, &generation, &result))?;
    Ok(json!({
        "command": "simulate",
        "output": path_str(&out),
        "c_pv_mw": cfg.simulate.c_pv,
        "c_s_mwh": cfg.simulate.c_s,
        "start_level_mwh": result.start_level,
        "end_level_mwh": result.end_level,
        "annual_import_mwh": result.grid_import.sum(),
        "annual_curtailment_mwh": result.curtailment.sum(),
    }))
}
