//! Run configuration: a TOML file with nested sections, plus one command-line
//! flag per key.

use std::path::{Path, PathBuf};

use hybrid_sizing::economics::Interpolation;
use hybrid_sizing::optimizer::SearchConfig;
use hybrid_sizing::profiles::{ClassId, CorrectionFactors, MeterCensus};
use hybrid_sizing::storage::StorageParams;
use hybrid_sizing::CrfForm;
use serde::{Deserialize, Serialize};

use crate::report::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Hours per simulated period.
    pub horizon: usize,
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets the runtime choose.
    pub threads: usize,
    pub inputs: Inputs,
    pub synthesis: Synthesis,
    pub storage: Storage,
    pub search: Search,
    pub economics: Economics,
    pub output: Output,
    pub simulate: Simulate,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            horizon: 8760,
            out_dir: PathBuf::from("out"),
            threads: 0,
            inputs: Inputs::default(),
            synthesis: Synthesis::default(),
            storage: Storage::default(),
            search: Search::default(),
            economics: Economics::default(),
            output: Output::default(),
            simulate: Simulate::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemandUnit {
    #[default]
    Mw,
    Kw,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// Hourly demand series; synthesized from `[synthesis]` when absent.
    pub demand: Option<PathBuf>,
    pub demand_unit: DemandUnit,
    pub capacity_factor: Option<PathBuf>,
    /// EUR/MWh
    pub price: Option<PathBuf>,
    /// Defaults to the 2019 reference costs.
    pub costs: Option<PathBuf>,
    /// Defaults to the built-in 2030/2050/2100 anchors.
    pub projection: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Synthesis {
    pub template: Option<PathBuf>,
    pub calendar: Option<PathBuf>,
    pub domestic_meters: [u64; 2],
    pub nondomestic_meters: u64,
    pub company_counts: [u64; 6],
    /// Classes 1 through 8.
    pub correction_factors: [f64; 8],
}

impl Default for Synthesis {
    fn default() -> Self {
        let published = CorrectionFactors::published();
        let mut factors = [0.0; 8];
        for (class, f) in published.iter() {
            factors[usize::from(class.get()) - 1] = f;
        }
        Self {
            template: None,
            calendar: None,
            domestic_meters: [0, 0],
            nondomestic_meters: 0,
            company_counts: [0; 6],
            correction_factors: factors,
        }
    }
}

impl Synthesis {
    pub fn census(&self) -> MeterCensus {
        MeterCensus {
            domestic_meters: self.domestic_meters,
            nondomestic_total: self.nondomestic_meters,
            company_counts: self.company_counts,
        }
    }

    pub fn factors(&self) -> hybrid_sizing::Result<CorrectionFactors> {
        CorrectionFactors::new(
            self.correction_factors
                .iter()
                .enumerate()
                .map(|(k, f)| (ClassId::new(k as u8 + 1).expect("eight classes"), *f))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Storage {
    pub eta_c: f64,
    pub eta_d: f64,
    pub dod: f64,
}

impl Default for Storage {
    fn default() -> Self {
        let p = StorageParams::default();
        Self {
            eta_c: p.eta_c,
            eta_d: p.eta_d,
            dod: p.dod,
        }
    }
}

impl Storage {
    pub fn params(&self) -> hybrid_sizing::Result<StorageParams> {
        StorageParams::new(self.eta_c, self.eta_d, self.dod)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Search {
    pub pv_increment: f64,
    pub storage_increment: f64,
    pub year_start: i32,
    pub year_end: i32,
    pub max_pv_override: Option<f64>,
    pub f_epsilon: f64,
    pub fixed_point_iters: usize,
}

impl Default for Search {
    fn default() -> Self {
        let s = SearchConfig::default();
        Self {
            pv_increment: s.pv_increment,
            storage_increment: s.storage_increment,
            year_start: s.year_start,
            year_end: s.year_end,
            max_pv_override: s.max_pv_override,
            f_epsilon: s.f_epsilon,
            fixed_point_iters: s.fixed_point_iters,
        }
    }
}

impl Search {
    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            pv_increment: self.pv_increment,
            storage_increment: self.storage_increment,
            year_start: self.year_start,
            year_end: self.year_end,
            max_pv_override: self.max_pv_override,
            f_epsilon: self.f_epsilon,
            fixed_point_iters: self.fixed_point_iters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Economics {
    pub crf_paper_literal: bool,
    pub interpolation: Interpolation,
}

impl Economics {
    pub fn crf_form(&self) -> CrfForm {
        if self.crf_paper_literal {
            CrfForm::PaperLiteral
        } else {
            CrfForm::Standard
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    /// Also write per-PV-size storage diagnostics.
    pub trace_enabled: bool,
}

/// Design point for `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Simulate {
    /// MW
    pub c_pv: f64,
    /// Nominal storage capacity, MWh.
    pub c_s: f64,
}

/// Every configuration key as `(section, key)`; top-level keys have an empty
/// section. Each key doubles as a command-line flag.
pub const KEYS: &[(&str, &str)] = &[
    ("", "horizon"),
    ("", "out_dir"),
    ("", "threads"),
    ("inputs", "demand"),
    ("inputs", "demand_unit"),
    ("inputs", "capacity_factor"),
    ("inputs", "price"),
    ("inputs", "costs"),
    ("inputs", "projection"),
    ("synthesis", "template"),
    ("synthesis", "calendar"),
    ("synthesis", "domestic_meters"),
    ("synthesis", "nondomestic_meters"),
    ("synthesis", "company_counts"),
    ("synthesis", "correction_factors"),
    ("storage", "eta_c"),
    ("storage", "eta_d"),
    ("storage", "dod"),
    ("search", "pv_increment"),
    ("search", "storage_increment"),
    ("search", "year_start"),
    ("search", "year_end"),
    ("search", "max_pv_override"),
    ("search", "f_epsilon"),
    ("search", "fixed_point_iters"),
    ("economics", "crf_paper_literal"),
    ("economics", "interpolation"),
    ("output", "trace_enabled"),
    ("simulate", "c_pv"),
    ("simulate", "c_s"),
];

const PATH_KEYS: &[&str] = &[
    "out_dir",
    "demand",
    "capacity_factor",
    "price",
    "costs",
    "projection",
    "template",
    "calendar",
];

fn is_path_key(key: &str) -> bool {
    PATH_KEYS.contains(&key)
}

fn absolute(base: &Path, p: &str) -> String {
    let p = Path::new(p);
    let joined = if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    };
    normalize(&joined).to_string_lossy().into_owned()
}

/// Removes `.` and resolvable `..` components without touching the file
/// system.
fn normalize(p: &Path) -> PathBuf {
    use std::path::Component;
    let mut out = PathBuf::new();
    for c in p.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other),
        }
    }
    out
}

fn section_mut<'a>(
    table: &'a mut toml::Table,
    section: &str,
) -> Result<&'a mut toml::Table, String> {
    if section.is_empty() {
        return Ok(table);
    }
    table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        .as_table_mut()
        .ok_or_else(|| format!("'{section}' must be a table"))
}

fn resolve_paths(table: &mut toml::Table, base: &Path) -> Result<(), String> {
    for (section, key) in KEYS {
        if !is_path_key(key) {
            continue;
        }
        let sec = section_mut(table, section)?;
        if let Some(v) = sec.get_mut(*key) {
            let s = v
                .as_str()
                .ok_or_else(|| format!("'{key}' must be a path string"))?;
            *v = toml::Value::String(absolute(base, s));
        }
    }
    Ok(())
}

/// Parses a flag value as a TOML value; bare words become strings.
fn flag_value(key: &str, raw: &str, cwd: &Path) -> toml::Value {
    if is_path_key(key) {
        return toml::Value::String(absolute(cwd, raw));
    }
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Loads the config file (if any), resolves its relative paths against the
/// file's directory, applies flag overrides (relative paths against `cwd`),
/// and validates the result.
pub fn load(
    config_path: Option<&Path>,
    overrides: &[(&str, String)],
    cwd: &Path,
) -> Result<RunConfig, CliError> {
    let mut table = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::from(hybrid_sizing::Error::Io {
                    path: path.to_path_buf(),
                    message: e.to_string(),
                })
            })?;
            let mut table: toml::Table = text
                .parse()
                .map_err(|e: toml::de::Error| CliError::config(path, &text, &e))?;
            let dir = path
                .parent()
                .map(|d| {
                    if d.as_os_str().is_empty() {
                        cwd.to_path_buf()
                    } else {
                        cwd.join(d)
                    }
                })
                .unwrap_or_else(|| cwd.to_path_buf());
            resolve_paths(&mut table, &dir).map_err(|m| CliError::invalid_config(Some(path), m))?;
            table
        }
        None => {
            let mut t = toml::Table::new();
            t.insert("out_dir".into(), toml::Value::String(absolute(cwd, "out")));
            t
        }
    };
    for (key, raw) in overrides {
        let section = KEYS
            .iter()
            .find(|(_, k)| k == key)
            .map(|(s, _)| *s)
            .ok_or_else(|| CliError::invalid_config(None, format!("unknown key '{key}'")))?;
        section_mut(&mut table, section)
            .map_err(|m| CliError::invalid_config(config_path, m))?
            .insert(key.to_string(), flag_value(key, raw, cwd));
    }
    let mut cfg: RunConfig = RunConfig::deserialize(toml::Value::Table(table))
        .map_err(|e| CliError::invalid_config(config_path, e.message().to_string()))?;
    if cfg.out_dir.is_relative() {
        cfg.out_dir = cwd.join(&cfg.out_dir);
    }
    Ok(cfg)
}

pub fn to_toml(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("config serializes")
}
