//! Analytical storage sizing.
//!
//! The unconstrained storage profile accumulates the efficiency-weighted
//! surplus/deficit from a zero start with no capacity limits. Its local
//! extrema (critical points) are paired into a difference matrix
//!
//! `M[i][j] = S(t_j) − S(t_i) + (S(T) − S(0) if i > j else 0)`
//!
//! where the wrap term on the lower-left half carries earlier critical levels
//! into the following period. The useful storage size then depends on the
//! overall trend `w = S(T) − S(0)`:
//!
//! * `w > 0`: `|min M|`, the deepest drawdown,
//! * `w < 0`: `max M`, the largest rise,
//! * `w = 0`: `max |M|`.
//!
//! Pairs of critical points attain the same extrema as pairs of arbitrary
//! hours, so the O(n²) matrix over `n ≪ T` critical points agrees exactly
//! with the O(T²) enumeration in [`storage_size_oracle`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{same_horizon, HourlySeries, DT_HOURS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageParams {
    /// Charge efficiency in (0, 1].
    pub eta_c: f64,
    /// Discharge efficiency in (0, 1].
    pub eta_d: f64,
    /// Usable fraction of nominal capacity, in (0, 1].
    pub dod: f64,
}

impl Default for StorageParams {
    fn default() -> Self {
        Self {
            eta_c: 0.8,
            eta_d: 0.8,
            dod: 0.8,
        }
    }
}

impl StorageParams {
    pub fn new(eta_c: f64, eta_d: f64, dod: f64) -> Result<Self> {
        let p = Self { eta_c, eta_d, dod };
        p.validate()?;
        Ok(p)
    }

    /// Ideal storage: lossless, fully usable.
    pub fn ideal() -> Self {
        Self {
            eta_c: 1.0,
            eta_d: 1.0,
            dod: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta_c", self.eta_c),
            ("eta_d", self.eta_d),
            ("dod", self.dod),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Storage level change over one step for a net flow `G − D` in MW.
    #[inline]
    pub fn level_delta(&self, net_mw: f64) -> f64 {
        if net_mw > 0.0 {
            net_mw * self.eta_c * DT_HOURS
        } else if net_mw < 0.0 {
            net_mw * (1.0 / self.eta_d) * DT_HOURS
        } else {
            0.0
        }
    }
}

/// Storage system size `E` in MWh (usable energy).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct StorageSize(f64);

impl StorageSize {
    pub const ZERO: StorageSize = StorageSize(0.0);

    pub fn new(mwh: f64) -> Result<Self> {
        if !(mwh.is_finite() && mwh >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "storage size must be finite and non-negative, got {mwh}"
            )));
        }
        Ok(Self(mwh))
    }

    pub fn mwh(self) -> f64 {
        self.0
    }
}

/// Storage levels `S(0) … S(T)` with no capacity limits; `S(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnconstrainedProfile {
    levels: Vec<f64>,
}

impl UnconstrainedProfile {
    /// Wraps precomputed levels. The first level must be zero.
    pub fn from_levels(levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidParameter(
                "a storage profile needs at least one step".into(),
            ));
        }
        if levels[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "profile must start at 0, starts at {}",
                levels[0]
            )));
        }
        if levels.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "profile holds non-finite levels".into(),
            ));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn start_level(&self) -> f64 {
        self.levels[0]
    }

    pub fn end_level(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }

    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }
}

pub fn unconstrained_profile(
    demand: &HourlySeries,
    generation: &HourlySeries,
    params: &StorageParams,
) -> Result<UnconstrainedProfile> {
    same_horizon(demand, generation)?;
    params.validate()?;
    let mut levels = Vec::with_capacity(demand.horizon() + 1);
    let mut s = 0.0;
    levels.push(s);
    for (d, g) in demand.values().iter().zip(generation.values()) {
        s += params.level_delta(g - d);
        levels.push(s);
    }
    UnconstrainedProfile::from_levels(levels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPointSet {
    pub times: Vec<usize>,
    pub levels: Vec<f64>,
}

impl CriticalPointSet {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Endpoints plus every interior index that is no lower than both
/// neighbours or no higher than both. A flat run contributes only its first
/// and last index.
pub fn find_critical_points(profile: &UnconstrainedProfile) -> CriticalPointSet {
    let s = profile.levels();
    let last = s.len() - 1;
    let mut times = vec![0];
    for k in 1..last {
        let (a, b, c) = (s[k - 1], s[k], s[k + 1]);
        if a == b && b == c {
            continue;
        }
        if (b >= a && b >= c) || (b <= a && b <= c) {
            times.push(k);
        }
    }
    times.push(last);
    let levels = times.iter().map(|&t| s[t]).collect();
    CriticalPointSet { times, levels }
}

/// Row-major n×n matrix of pairwise critical-level differences.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DifferenceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn difference_matrix(cps: &CriticalPointSet, s0: f64, s_end: f64) -> Result<DifferenceMatrix> {
    let n = cps.levels.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "difference matrix needs at least 2 critical points, got {n}"
        )));
    }
    let wrap = s_end - s0;
    let c = &cps.levels;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = c[j] - c[i];
            data.push(if i > j { d + wrap } else { d });
        }
    }
    Ok(DifferenceMatrix { n, data })
}

fn size_from_extremes(min: f64, max: f64, wrap: f64) -> StorageSize {
    let e = if wrap > 0.0 {
        min.abs()
    } else if wrap < 0.0 {
        max
    } else {
        min.abs().max(max.abs())
    };
    StorageSize(e.max(0.0))
}

pub fn storage_size(m: &DifferenceMatrix, s0: f64, s_end: f64) -> StorageSize {
    size_from_extremes(m.min(), m.max(), s_end - s0)
}

/// Same result as building the difference matrix over `cps` and applying
/// [`storage_size`], in O(n) time and without allocating the matrix.
pub fn storage_size_streaming(cps: &CriticalPointSet, s0: f64, s_end: f64) -> StorageSize {
    let wrap = s_end - s0;
    let c = &cps.levels;
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    // running extremes of c[0..=j] and of c[0..i]
    let (mut run_min, mut run_max) = (c[0], c[0]);
    for (k, &level) in c.iter().enumerate() {
        if k > 0 {
            hi = hi.max((run_max - level) + wrap);
            lo = lo.min((run_min - level) + wrap);
        }
        run_min = run_min.min(level);
        run_max = run_max.max(level);
        hi = hi.max(level - run_min);
        lo = lo.min(level - run_max);
    }
    size_from_extremes(lo, hi, wrap)
}

/// Brute-force size over every pair of hours, not just critical points.
/// O(T²); intended for verification.
pub fn storage_size_oracle(profile: &UnconstrainedProfile) -> StorageSize {
    let s = profile.levels();
    let wrap = profile.end_level() - profile.start_level();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..s.len() {
        for j in 0..s.len() {
            let d = s[j] - s[i];
            let d = if i > j { d + wrap } else { d };
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    let e = if wrap > 0.0 {
        lo.abs()
    } else if wrap < 0.0 {
        hi
    } else {
        lo.abs().max(hi.abs())
    };
    StorageSize(e.max(0.0))
}

/// Nominal capacity needed to provide `size` of usable energy: `E / DoD`.
pub fn capacity_from_size(size: StorageSize, params: &StorageParams) -> Result<f64> {
    if params.dod.is_nan() || params.dod <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "depth of discharge must be positive, got {}",
            params.dod
        )));
    }
    Ok(size.0 / params.dod)
}

/// Profile, critical points, and resulting size for one generation series.
#[derive(Debug, Clone)]
pub struct StorageSizing {
    pub profile: UnconstrainedProfile,
    pub critical_points: CriticalPointSet,
    pub size: StorageSize,
}

impl StorageSizing {
    pub fn analyze(
        demand: &HourlySeries,
        generation: &HourlySeries,
        params: &StorageParams,
    ) -> Result<Self> {
        let profile = unconstrained_profile(demand, generation, params)?;
        let critical_points = find_critical_points(&profile);
        let size =
            storage_size_streaming(&critical_points, profile.start_level(), profile.end_level());
        Ok(Self {
            profile,
            critical_points,
            size,
        })
    }
}
