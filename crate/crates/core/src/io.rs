//! Readers and writers for the delimited-text and key-value file formats.
//!
//! Row numbers in diagnostics are 1-based file line numbers.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::dispatch::DispatchResult;
use crate::economics::{CostAssumptions, CostMultipliers, CostProjection, Interpolation};
use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::optimizer::{DesignPoint, OptimalResult, PvRow};
use crate::profiles::{
    ClassId, ClassTemplate, DayType, Season, SeasonCalendar, HALF_HOURS_PER_DAY,
};
use crate::series::{HourlySeries, Unit};
use crate::storage::CriticalPointSet;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

/// Records with their line numbers; blank lines are skipped by the reader.
fn records(path: &Path, text: &str) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in csv_reader(text).records() {
        let rec = rec.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize);
            Error::parse(path, row, e.to_string())
        })?;
        let line = rec.position().map_or(out.len() + 1, |p| p.line() as usize);
        out.push((line, rec));
    }
    Ok(out)
}

fn expect_header(
    path: &Path,
    rows: &mut Vec<(usize, csv::StringRecord)>,
    first: &str,
) -> Result<()> {
    match rows.first() {
        Some((_, rec)) if rec.get(0) == Some(first) => {
            rows.remove(0);
            Ok(())
        }
        Some((line, _)) => Err(Error::parse(
            path,
            Some(*line),
            format!("expected a header row starting with '{first}'"),
        )),
        None => Err(Error::parse(path, None, "file is empty")),
    }
}

fn field<'a>(
    path: &Path,
    line: usize,
    rec: &'a csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<&'a str> {
    rec.get(idx)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::parse(path, Some(line), format!("missing column '{name}'")))
}

fn number(path: &Path, line: usize, text: &str, name: &str) -> Result<f64> {
    let v: f64 = text.parse().map_err(|_| {
        Error::parse(
            path,
            Some(line),
            format!("'{text}' in column '{name}' is not a number"),
        )
    })?;
    if !v.is_finite() {
        return Err(Error::parse(
            path,
            Some(line),
            format!("'{name}' is not finite"),
        ));
    }
    Ok(v)
}

fn integer<T: std::str::FromStr>(path: &Path, line: usize, text: &str, name: &str) -> Result<T> {
    text.parse().map_err(|_| {
        Error::parse(
            path,
            Some(line),
            format!("'{text}' in column '{name}' is not an integer"),
        )
    })
}

fn check_width(path: &Path, line: usize, rec: &csv::StringRecord, width: usize) -> Result<()> {
    if rec.len() != width {
        return Err(Error::parse(
            path,
            Some(line),
            format!("expected {width} columns, found {}", rec.len()),
        ));
    }
    Ok(())
}

/// Parses a two-column `hour_index,value` series with exactly `horizon`
/// rows. A header row is optional. Values are checked against `unit`:
/// capacity factors must lie in [0, 1], everything else must be
/// non-negative.
pub fn parse_series(path: &Path, text: &str, unit: Unit, horizon: usize) -> Result<HourlySeries> {
    let mut rows = records(path, text)?;
    if let Some((_, rec)) = rows.first() {
        if rec.get(0).is_some_and(|s| s.parse::<f64>().is_err()) {
            rows.remove(0);
        }
    }
    let mut values = Vec::with_capacity(rows.len());
    for (expected, (line, rec)) in rows.iter().enumerate() {
        check_width(path, *line, rec, 2)?;
        let hour: usize = integer(
            path,
            *line,
            field(path, *line, rec, 0, "hour_index")?,
            "hour_index",
        )?;
        if hour != expected {
            return Err(Error::parse(
                path,
                Some(*line),
                format!("hour_index {hour} out of sequence, expected {expected}"),
            ));
        }
        let v = number(path, *line, field(path, *line, rec, 1, "value")?, "value")?;
        let ok = match unit {
            Unit::Dimensionless => (0.0..=1.0).contains(&v),
            Unit::Mw | Unit::Mwh | Unit::EurPerMwh => v >= 0.0,
        };
        if !ok {
            let range = if unit == Unit::Dimensionless {
                "[0, 1]"
            } else {
                "[0, inf)"
            };
            return Err(Error::parse(
                path,
                Some(*line),
                format!("value {v} outside {range}"),
            ));
        }
        values.push(v);
    }
    if values.len() != horizon {
        return Err(Error::parse(
            path,
            None,
            format!("expected {horizon} rows, found {}", values.len()),
        ));
    }
    Ok(HourlySeries::from_trusted(values, unit))
}

pub fn read_series(path: &Path, unit: Unit, horizon: usize) -> Result<HourlySeries> {
    parse_series(path, &read_text(path)?, unit, horizon)
}

/// Parses class templates: header row, then
/// `class_id,season,day_type,v1..v48` with kW per half hour. Every class
/// present must have all fifteen cells.
pub fn parse_templates(path: &Path, text: &str) -> Result<BTreeMap<ClassId, ClassTemplate>> {
    let mut rows = records(path, text)?;
    expect_header(path, &mut rows, "class_id")?;
    let mut templates: BTreeMap<ClassId, ClassTemplate> = BTreeMap::new();
    for (line, rec) in &rows {
        let line = *line;
        check_width(path, line, rec, 3 + HALF_HOURS_PER_DAY)?;
        let id: u8 = integer(
            path,
            line,
            field(path, line, rec, 0, "class_id")?,
            "class_id",
        )?;
        let class = ClassId::new(id).map_err(|e| Error::parse(path, Some(line), e.to_string()))?;
        let season: Season = field(path, line, rec, 1, "season")?
            .parse()
            .map_err(|e: Error| Error::parse(path, Some(line), e.to_string()))?;
        let day_type: DayType = field(path, line, rec, 2, "day_type")?
            .parse()
            .map_err(|e: Error| Error::parse(path, Some(line), e.to_string()))?;
        let mut cell = Vec::with_capacity(HALF_HOURS_PER_DAY);
        for k in 0..HALF_HOURS_PER_DAY {
            let name = format!("v{}", k + 1);
            cell.push(number(
                path,
                line,
                field(path, line, rec, 3 + k, &name)?,
                &name,
            )?);
        }
        let template = templates
            .entry(class)
            .or_insert_with(|| ClassTemplate::new(class));
        if template.cell(season, day_type).is_some() {
            return Err(Error::parse(
                path,
                Some(line),
                format!("duplicate cell {season}/{day_type} for class {class}"),
            ));
        }
        template
            .insert(season, day_type, cell)
            .map_err(|e| Error::parse(path, Some(line), e.to_string()))?;
    }
    for t in templates.values() {
        t.check_complete()
            .map_err(|e| Error::parse(path, None, e.to_string()))?;
    }
    Ok(templates)
}

pub fn read_templates(path: &Path) -> Result<BTreeMap<ClassId, ClassTemplate>> {
    parse_templates(path, &read_text(path)?)
}

/// Parses `day_index,season,day_type` rows after a header.
pub fn parse_calendar(path: &Path, text: &str) -> Result<SeasonCalendar> {
    let mut rows = records(path, text)?;
    expect_header(path, &mut rows, "day_index")?;
    let mut days = Vec::with_capacity(rows.len());
    for (expected, (line, rec)) in rows.iter().enumerate() {
        let line = *line;
        check_width(path, line, rec, 3)?;
        let idx: usize = integer(
            path,
            line,
            field(path, line, rec, 0, "day_index")?,
            "day_index",
        )?;
        if idx != expected {
            return Err(Error::parse(
                path,
                Some(line),
                format!("day_index {idx} out of sequence, expected {expected}"),
            ));
        }
        let season: Season = field(path, line, rec, 1, "season")?
            .parse()
            .map_err(|e: Error| Error::parse(path, Some(line), e.to_string()))?;
        let day_type: DayType = field(path, line, rec, 2, "day_type")?
            .parse()
            .map_err(|e: Error| Error::parse(path, Some(line), e.to_string()))?;
        days.push((season, day_type));
    }
    SeasonCalendar::new(days).map_err(|e| Error::parse(path, None, e.to_string()))
}

pub fn read_calendar(path: &Path) -> Result<SeasonCalendar> {
    parse_calendar(path, &read_text(path)?)
}

fn toml_error(path: &Path, text: &str, e: &toml::de::Error) -> Error {
    let row = e
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    Error::parse(path, row, e.message().to_string())
}

/// Parses the seven cost fields from `key = value` lines.
pub fn parse_costs(path: &Path, text: &str) -> Result<CostAssumptions> {
    let costs: CostAssumptions = toml::from_str(text).map_err(|e| toml_error(path, text, &e))?;
    costs
        .validate()
        .map_err(|e| Error::parse(path, None, e.to_string()))?;
    Ok(costs)
}

pub fn read_costs(path: &Path) -> Result<CostAssumptions> {
    parse_costs(path, &read_text(path)?)
}

pub fn costs_to_string(costs: &CostAssumptions) -> String {
    toml::to_string(costs).expect("cost fields serialize")
}

/// Parses `year,pv_installed_mult,pv_om_mult,storage_mult` rows after a
/// header.
pub fn parse_projection(
    path: &Path,
    text: &str,
    interpolation: Interpolation,
) -> Result<CostProjection> {
    let mut rows = records(path, text)?;
    expect_header(path, &mut rows, "year")?;
    let mut anchors = BTreeMap::new();
    for (line, rec) in &rows {
        let line = *line;
        check_width(path, line, rec, 4)?;
        let year: i32 = integer(path, line, field(path, line, rec, 0, "year")?, "year")?;
        let m = CostMultipliers {
            pv_installed: number(
                path,
                line,
                field(path, line, rec, 1, "pv_installed_mult")?,
                "pv_installed_mult",
            )?,
            pv_om: number(
                path,
                line,
                field(path, line, rec, 2, "pv_om_mult")?,
                "pv_om_mult",
            )?,
            storage: number(
                path,
                line,
                field(path, line, rec, 3, "storage_mult")?,
                "storage_mult",
            )?,
        };
        if anchors.insert(year, m).is_some() {
            return Err(Error::parse(
                path,
                Some(line),
                format!("duplicate year {year}"),
            ));
        }
    }
    CostProjection::new(anchors, interpolation).map_err(|e| Error::parse(path, None, e.to_string()))
}

pub fn read_projection(path: &Path, interpolation: Interpolation) -> Result<CostProjection> {
    parse_projection(path, &read_text(path)?, interpolation)
}

/// Writes through a buffered file, mapping failures to [`Error::Io`].
pub fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_series(w: &mut dyn Write, series: &HourlySeries) -> io::Result<()> {
    writeln!(w, "hour_index,value")?;
    for (h, v) in series.values().iter().enumerate() {
        writeln!(w, "{h},{}", sig6(*v))?;
    }
    Ok(())
}

pub fn write_design_space(w: &mut dyn Write, points: &[DesignPoint]) -> io::Result<()> {
    writeln!(w, "c_pv_mw,c_s_mwh,annual_import_mwh,lcoe_eur_per_mwh")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            sig6(p.c_pv),
            sig6(p.c_s),
            sig6(p.annual_import),
            sig6(p.lcoe)
        )?;
    }
    Ok(())
}

pub fn write_sweep(w: &mut dyn Write, results: &[OptimalResult]) -> io::Result<()> {
    writeln!(
        w,
        "year,c_pv_mw,c_s_mwh,annual_import_mwh,grid_share,lcoe_eur_per_mwh"
    )?;
    for r in results {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.year,
            sig6(r.point.c_pv),
            sig6(r.point.c_s),
            sig6(r.point.annual_import),
            sig6(r.grid_share),
            sig6(r.point.lcoe)
        )?;
    }
    Ok(())
}

/// Per-hour dispatch trace; `storage_level` is the level at the start of
/// the hour.
pub fn write_trace(
    w: &mut dyn Write,
    demand: &HourlySeries,
    generation: &HourlySeries,
    result: &DispatchResult,
) -> io::Result<()> {
    writeln!(w, "hour,demand,generation,storage_level,import,curtailment")?;
    for h in 0..demand.horizon() {
        writeln!(
            w,
            "{h},{},{},{},{},{}",
            sig6(demand.values()[h]),
            sig6(generation.values()[h]),
            sig6(result.storage_levels[h]),
            sig6(result.grid_import.values()[h]),
            sig6(result.curtailment.values()[h])
        )?;
    }
    Ok(())
}

/// Storage analysis per PV size: one row per critical point, tagged with
/// the size it leads to.
pub fn write_storage_diagnostics(
    w: &mut dyn Write,
    rows: &[(PvRow, CriticalPointSet)],
) -> io::Result<()> {
    writeln!(w, "c_pv_mw,e_max_mwh,end_level_mwh,hour,level_mwh")?;
    for (row, cps) in rows {
        for (t, level) in cps.times.iter().zip(&cps.levels) {
            writeln!(
                w,
                "{},{},{},{t},{}",
                sig6(row.c_pv),
                sig6(row.e_max),
                sig6(row.end_level),
                sig6(*level)
            )?;
        }
    }
    Ok(())
}
