//! Sizing of grid-connected solar PV and battery storage by levelized cost.
//!
//! The pipeline builds an hourly demand series from per-class load
//! templates, derives PV generation from capacity factors, bounds the PV and
//! storage search ranges analytically, simulates dispatch for every
//! combination in those ranges, and selects the lowest-LCOE design for each
//! year of a cost projection.

pub mod dispatch;
pub mod economics;
pub mod error;
pub mod fmt;
pub mod io;
pub mod optimizer;
pub mod profiles;
pub mod series;
pub mod solar;
pub mod storage;

pub use dispatch::{simulate, summarize, sustainable_start, DispatchResult, DispatchSummary};
pub use economics::{
    capital_recovery_factor, project_costs, CostAssumptions, CostProjection, CrfForm, Interpolation,
};
pub use error::{Error, Result};
pub use optimizer::{
    enumerate_design_space, multi_year_sweep, select_optimal, DesignPoint, DesignSpace,
    OptimalResult, SearchConfig,
};
pub use series::{HourlySeries, Unit};
pub use solar::{generation_profile, max_pv_capacity, PvCapacity};
pub use storage::{StorageParams, StorageSize, StorageSizing};
