//! District demand synthesis from settlement-class load templates.
//!
//! Each of the eight settlement classes has a per-meter load shape given as
//! 48 half-hourly kW values for every (season, day type) cell. A season
//! calendar lays those cells out over the modeled year, meter counts weight
//! each class, and a per-class correction factor rescales the result:
//!
//! `D(t) = Σ_i D_i(t) · m_i · f_i`
//!
//! Non-domestic classes 3–8 only have a lumped meter total, which is split
//! in proportion to the number of companies in each size band.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::series::{HourlySeries, Unit, DT_HOURS};

pub const HALF_HOURS_PER_DAY: usize = 48;
pub const HOURS_PER_DAY: usize = 24;

/// Settlement profile class, 1–8. Classes 1 and 2 are domestic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ClassId(u8);

impl ClassId {
    pub const DOMESTIC: [ClassId; 2] = [ClassId(1), ClassId(2)];
    pub const NON_DOMESTIC: [ClassId; 6] = [
        ClassId(3),
        ClassId(4),
        ClassId(5),
        ClassId(6),
        ClassId(7),
        ClassId(8),
    ];

    pub fn new(id: u8) -> Result<Self> {
        if (1..=8).contains(&id) {
            Ok(ClassId(id))
        } else {
            Err(Error::InvalidParameter(format!(
                "profile class {id} outside 1..=8"
            )))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = ClassId> {
        (1..=8).map(ClassId)
    }
}

impl TryFrom<u8> for ClassId {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        ClassId::new(v)
    }
}

impl From<ClassId> for u8 {
    fn from(c: ClassId) -> u8 {
        c.0
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Season {
    Winter,
    Spring,
    Summer,
    HighSummer,
    Autumn,
}

impl Season {
    pub const ALL: [Season; 5] = [
        Season::Winter,
        Season::Spring,
        Season::Summer,
        Season::HighSummer,
        Season::Autumn,
    ];
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::HighSummer => "high-summer",
            Season::Autumn => "autumn",
        })
    }
}

impl FromStr for Season {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['_', ' '], "-")
            .as_str()
        {
            "winter" => Ok(Season::Winter),
            "spring" => Ok(Season::Spring),
            "summer" => Ok(Season::Summer),
            "high-summer" | "highsummer" => Ok(Season::HighSummer),
            "autumn" => Ok(Season::Autumn),
            other => Err(Error::InvalidParameter(format!("unknown season '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DayType {
    Weekday,
    Saturday,
    Sunday,
}

impl DayType {
    pub const ALL: [DayType; 3] = [DayType::Weekday, DayType::Saturday, DayType::Sunday];

    /// Day type for position `i` of a week that starts on Monday.
    fn of_week_position(i: usize) -> DayType {
        match i % 7 {
            5 => DayType::Saturday,
            6 => DayType::Sunday,
            _ => DayType::Weekday,
        }
    }
}

impl fmt::Display for DayType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DayType::Weekday => "weekday",
            DayType::Saturday => "saturday",
            DayType::Sunday => "sunday",
        })
    }
}

impl FromStr for DayType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weekday" | "wd" => Ok(DayType::Weekday),
            "saturday" | "sat" => Ok(DayType::Saturday),
            "sunday" | "sun" => Ok(DayType::Sunday),
            other => Err(Error::InvalidParameter(format!(
                "unknown day type '{other}'"
            ))),
        }
    }
}

/// Per-meter load shape of one settlement class, in kW per half hour.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassTemplate {
    pub class: ClassId,
    cells: BTreeMap<(Season, DayType), Vec<f64>>,
}

impl ClassTemplate {
    pub fn new(class: ClassId) -> Self {
        Self {
            class,
            cells: BTreeMap::new(),
        }
    }

    /// A template whose every cell is the constant `kw`.
    pub fn constant(class: ClassId, kw: f64) -> Result<Self> {
        let mut t = Self::new(class);
        for season in Season::ALL {
            for day in DayType::ALL {
                t.insert(season, day, vec![kw; HALF_HOURS_PER_DAY])?;
            }
        }
        Ok(t)
    }

    pub fn insert(
        &mut self,
        season: Season,
        day_type: DayType,
        half_hours_kw: Vec<f64>,
    ) -> Result<()> {
        if half_hours_kw.len() != HALF_HOURS_PER_DAY {
            return Err(Error::InvalidParameter(format!(
                "class {} {season}/{day_type} cell has {} values, expected {HALF_HOURS_PER_DAY}",
                self.class,
                half_hours_kw.len()
            )));
        }
        if let Some(v) = half_hours_kw.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "class {} {season}/{day_type} cell holds invalid value {v}",
                self.class
            )));
        }
        self.cells.insert((season, day_type), half_hours_kw);
        Ok(())
    }

    pub fn cell(&self, season: Season, day_type: DayType) -> Option<&[f64]> {
        self.cells.get(&(season, day_type)).map(Vec::as_slice)
    }

    /// Fails on the first absent (season, day type) cell.
    pub fn check_complete(&self) -> Result<()> {
        for season in Season::ALL {
            for day_type in DayType::ALL {
                if !self.cells.contains_key(&(season, day_type)) {
                    return Err(Error::MissingTemplateCell {
                        class: self.class,
                        season,
                        day_type,
                    });
                }
            }
        }
        Ok(())
    }
}

/// (season, day type) assignment for each day of the modeled year.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonCalendar {
    days: Vec<(Season, DayType)>,
}

impl SeasonCalendar {
    /// Accepts any day list whose day types follow a Monday-to-Sunday cycle
    /// from some starting weekday.
    pub fn new(days: Vec<(Season, DayType)>) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::InvalidCalendar("calendar has no days".into()));
        }
        let consistent = (0..7).any(|offset| {
            days.iter()
                .enumerate()
                .all(|(d, (_, ty))| *ty == DayType::of_week_position(d + offset))
        });
        if !consistent {
            return Err(Error::InvalidCalendar(
                "day types do not follow a weekly weekday/saturday/sunday pattern".into(),
            ));
        }
        Ok(Self { days })
    }

    /// Builds a 365-day calendar for `year`. February 29 is dropped from
    /// leap years; day types keep cycling from January 1's weekday so the
    /// weekly pattern stays unbroken.
    pub fn for_year(year: i32, season_of: impl Fn(NaiveDate) -> Season) -> Result<Self> {
        let jan1 = NaiveDate::from_ymd_opt(year, 1, 1)
            .ok_or_else(|| Error::InvalidParameter(format!("year {year} out of range")))?;
        let offset = jan1.weekday().num_days_from_monday() as usize;
        let days = jan1
            .iter_days()
            .take_while(|d| d.year() == year)
            .filter(|d| !(d.month() == 2 && d.day() == 29))
            .enumerate()
            .map(|(i, date)| (season_of(date), DayType::of_week_position(i + offset)))
            .collect();
        Self::new(days)
    }

    pub fn days(&self) -> &[(Season, DayType)] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn first_weekday(&self) -> Weekday {
        let offset = (0..7)
            .find(|o| {
                self.days
                    .iter()
                    .enumerate()
                    .all(|(d, (_, ty))| *ty == DayType::of_week_position(d + o))
            })
            .unwrap_or(0);
        Weekday::try_from(offset as u8).unwrap_or(Weekday::Mon)
    }
}

/// Expands a class template over the calendar into an hourly per-meter
/// series in MW. Each hour is the mean of its two half-hour powers.
pub fn expand_class_profile(
    template: &ClassTemplate,
    calendar: &SeasonCalendar,
    horizon: usize,
) -> Result<HourlySeries> {
    if !horizon.is_multiple_of(HOURS_PER_DAY) || calendar.len() != horizon / HOURS_PER_DAY {
        return Err(Error::CalendarMismatch {
            days: calendar.len(),
            expected: horizon.div_ceil(HOURS_PER_DAY),
        });
    }
    template.check_complete()?;

    let mut values = Vec::with_capacity(horizon);
    for &(season, day_type) in calendar.days() {
        let cell = template
            .cell(season, day_type)
            .expect("completeness checked above");
        values.extend(
            cell.chunks_exact(2)
                .map(|pair| (pair[0] + pair[1]) / 2.0 / 1000.0),
        );
    }
    HourlySeries::power(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeterCensus {
    /// Class 1 and class 2 meter counts.
    pub domestic_meters: [u64; 2],
    /// Lumped non-domestic meter total.
    pub nondomestic_total: u64,
    /// Companies per size band, mapped onto classes 3 through 8.
    pub company_counts: [u64; 6],
}

/// Splits the non-domestic meter total across classes 3–8 in proportion to
/// company counts. Fractional weights are kept.
pub fn allocate_nondomestic_meters(census: &MeterCensus) -> Result<BTreeMap<ClassId, f64>> {
    let total = census.nondomestic_total as f64;
    let companies: u64 = census.company_counts.iter().sum();
    if companies == 0 {
        if census.nondomestic_total > 0 {
            return Err(Error::CannotApportion { total });
        }
        return Ok(ClassId::NON_DOMESTIC.iter().map(|&c| (c, 0.0)).collect());
    }
    let companies = companies as f64;
    Ok(ClassId::NON_DOMESTIC
        .iter()
        .zip(census.company_counts)
        .map(|(&class, n)| (class, total * n as f64 / companies))
        .collect())
}

/// Meter weight per class: domestic counts as given, non-domestic allocated.
pub fn meter_weights(census: &MeterCensus) -> Result<BTreeMap<ClassId, f64>> {
    let mut weights = allocate_nondomestic_meters(census)?;
    for (class, m) in ClassId::DOMESTIC.iter().zip(census.domestic_meters) {
        weights.insert(*class, m as f64);
    }
    Ok(weights)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionFactors(BTreeMap<ClassId, f64>);

impl CorrectionFactors {
    pub fn new(factors: BTreeMap<ClassId, f64>) -> Result<Self> {
        if let Some((class, f)) = factors.iter().find(|(_, f)| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "correction factor for class {class} must be positive, got {f}"
            )));
        }
        Ok(Self(factors))
    }

    /// Regression results for UK districts: 0.84 (class 1), 0.72 (class 2),
    /// and a single 2.65 shared by classes 3–8.
    pub fn published() -> Self {
        let mut map = BTreeMap::new();
        map.insert(ClassId(1), 0.84);
        map.insert(ClassId(2), 0.72);
        for c in ClassId::NON_DOMESTIC {
            map.insert(c, 2.65);
        }
        Self(map)
    }

    pub fn get(&self, class: ClassId) -> Option<f64> {
        self.0.get(&class).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassId, f64)> + '_ {
        self.0.iter().map(|(c, f)| (*c, *f))
    }
}

/// `D(t) = Σ_i D_i(t) · m_i · f_i`. Classes with zero meters are skipped.
pub fn compose_demand(
    class_series: &BTreeMap<ClassId, HourlySeries>,
    meters: &BTreeMap<ClassId, f64>,
    factors: &CorrectionFactors,
) -> Result<HourlySeries> {
    let horizon = class_series
        .values()
        .next()
        .map(HourlySeries::horizon)
        .ok_or_else(|| Error::InvalidParameter("no class series supplied".into()))?;
    for s in class_series.values() {
        s.require_horizon(horizon)?;
    }

    let mut total = vec![0.0; horizon];
    for (&class, &m) in meters {
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "meter weight for class {class} must be non-negative, got {m}"
            )));
        }
        if m == 0.0 {
            continue;
        }
        let series = class_series
            .get(&class)
            .ok_or(Error::MissingClassSeries(class))?;
        let f = factors.get(class).ok_or(Error::MissingFactor(class))?;
        for (acc, d) in total.iter_mut().zip(series.values()) {
            *acc += d * m * f;
        }
    }
    HourlySeries::power(total)
}

/// Energy of a power series over the horizon, `Σ D(t)·Δt`, in MWh.
pub fn annual_energy(series: &HourlySeries) -> f64 {
    series.values().iter().map(|p| p * DT_HOURS).sum()
}

/// Zero-intercept least-squares fit of actual against calculated annual
/// demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    pub factor: f64,
    /// Uncentered coefficient of determination, `1 − SS_res / Σy²`.
    pub r_square: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

pub fn fit_correction_factor(calculated: &[f64], actual: &[f64]) -> Result<RegressionFit> {
    if calculated.len() != actual.len() {
        return Err(Error::DegenerateRegression(format!(
            "{} calculated values vs {} actual values",
            calculated.len(),
            actual.len()
        )));
    }
    let n = calculated.len();
    if n < 2 {
        return Err(Error::DegenerateRegression(
            "at least two observations are needed".into(),
        ));
    }
    if calculated.iter().chain(actual).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateRegression("non-finite observation".into()));
    }
    let sxx: f64 = calculated.iter().map(|x| x * x).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression(
            "calculated annual demands are all zero".into(),
        ));
    }
    let sxy: f64 = calculated.iter().zip(actual).map(|(x, y)| x * y).sum();
    let syy: f64 = actual.iter().map(|y| y * y).sum();
    let factor = sxy / sxx;

    let ss_res: f64 = calculated
        .iter()
        .zip(actual)
        .map(|(x, y)| (y - factor * x).powi(2))
        .sum();
    let r_square = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };

    let dof = (n - 1) as f64;
    let std_error = (ss_res / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::DegenerateRegression(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(RegressionFit {
        factor,
        r_square,
        std_error,
        ci95: (factor - t * std_error, factor + t * std_error),
    })
}

/// Templates, calendar, census, and factors for one district.
#[derive(Debug, Clone)]
pub struct DemandModel {
    pub templates: BTreeMap<ClassId, ClassTemplate>,
    pub calendar: SeasonCalendar,
    pub census: MeterCensus,
    pub factors: CorrectionFactors,
}

impl DemandModel {
    pub fn synthesize(&self, horizon: usize) -> Result<HourlySeries> {
        let meters = meter_weights(&self.census)?;
        let mut class_series = BTreeMap::new();
        for (&class, &m) in &meters {
            if m == 0.0 {
                continue;
            }
            let template = self
                .templates
                .get(&class)
                .ok_or(Error::MissingClassSeries(class))?;
            class_series.insert(
                class,
                expand_class_profile(template, &self.calendar, horizon)?,
            );
        }
        if class_series.is_empty() {
            return HourlySeries::new(vec![0.0; horizon], Unit::Mw);
        }
        compose_demand(&class_series, &meters, &self.factors)
    }
}
