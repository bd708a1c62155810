//! Acceptance criteria. Each criterion prints one PASS/FAIL line to stdout;
//! the test fails if any criterion fails. Criterion 9 runs only when
//! `HSIZE_REAL_DATA_CONFIG` names a config for a full-scale district.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use hybrid_sizing::dispatch::{simulate, summarize, sustainable_start};
use hybrid_sizing::economics::{
    capital_recovery_factor, project_costs, CostAssumptions, CostProjection, Interpolation,
};
use hybrid_sizing::io;
use hybrid_sizing::optimizer::{
    enumerate_design_space, multi_year_sweep, price_design_space, SearchConfig,
};
use hybrid_sizing::storage::{
    difference_matrix, find_critical_points, storage_size, storage_size_streaming,
    unconstrained_profile, StorageParams, StorageSize, StorageSizing,
};
use hybrid_sizing::{generation_profile, CrfForm, HourlySeries, PvCapacity, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn power(v: Vec<f64>) -> HourlySeries {
    HourlySeries::power(v).unwrap()
}

/// Random demand and generation. Generation alternates between uniform
/// noise and a daily solar shape; some hours are forced to exact balance.
fn random_pair(rng: &mut ChaCha8Rng, hours: usize) -> (HourlySeries, HourlySeries) {
    let d: Vec<f64> = (0..hours).map(|_| rng.gen_range(0.0..50.0)).collect();
    let solar = rng.gen_bool(0.5);
    let amp = rng.gen_range(20.0..200.0);
    let mut g: Vec<f64> = (0..hours)
        .map(|h| {
            if solar {
                let x = ((h % 24) as f64 - 6.0) / 12.0 * std::f64::consts::PI;
                amp * x.sin().max(0.0) * rng.gen_range(0.3..1.0)
            } else {
                rng.gen_range(0.0..80.0)
            }
        })
        .collect();
    for h in 0..hours {
        if rng.gen_ratio(1, 12) {
            g[h] = d[h];
        }
    }
    (power(d), power(g))
}

fn random_params(rng: &mut ChaCha8Rng) -> StorageParams {
    let eta = if rng.gen_bool(0.5) { 1.0 } else { 0.8 };
    StorageParams::new(eta, eta, 1.0).unwrap()
}

/// Size from every pair of hours of the unconstrained profile.
fn all_pairs_size(levels: &[f64]) -> f64 {
    let wrap = levels[levels.len() - 1] - levels[0];
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for i in 0..levels.len() {
        for j in 0..levels.len() {
            let d = if i > j {
                (levels[j] - levels[i]) + wrap
            } else {
                levels[j] - levels[i]
            };
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    let e = if wrap > 0.0 {
        -lo
    } else if wrap < 0.0 {
        hi
    } else {
        (-lo).max(hi)
    };
    e.max(0.0)
}

fn c1_oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let n = 500;
    for k in 0..n {
        let hours = rng.gen_range(24..=336);
        let (d, g) = random_pair(&mut rng, hours);
        let p = random_params(&mut rng);
        let profile = unconstrained_profile(&d, &g, &p).unwrap();
        let cps = find_critical_points(&profile);
        let (s0, st) = (profile.start_level(), profile.end_level());
        let via_matrix = storage_size(&difference_matrix(&cps, s0, st).unwrap(), s0, st).mwh();
        let streaming = storage_size_streaming(&cps, s0, st).mwh();
        let oracle = all_pairs_size(profile.levels());
        let diff = (via_matrix - oracle).abs().max((streaming - oracle).abs());
        worst = worst.max(diff);
        check(diff <= 1e-9, || {
            format!("fixture {k}: {via_matrix} / {streaming} vs oracle {oracle}")
        })?;
    }
    let secs = started.elapsed().as_secs_f64();
    check(secs < 10.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "{n} fixtures, max deviation {worst:e} MWh, {secs:.2} s"
    ))
}

fn c2_energy_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let n = 500;
    for k in 0..n {
        let hours = rng.gen_range(24..=336);
        let (d, g) = random_pair(&mut rng, hours);
        let eta_c = rng.gen_range(0.6..=1.0);
        let eta_d = rng.gen_range(0.6..=1.0);
        let p = StorageParams::new(eta_c, eta_d, rng.gen_range(0.5..=1.0)).unwrap();
        let e_max = StorageSizing::analyze(&d, &g, &p).unwrap().size.mwh();
        let e = e_max * rng.gen_range(0.0..1.5);
        let size = StorageSize::new(e).unwrap();
        let start = if rng.gen_bool(0.5) {
            sustainable_start(&d, &g, size, &p, 1).unwrap()
        } else {
            rng.gen_range(0.0..=1.0) * e
        };
        let r = simulate(&d, &g, size, &p, start).unwrap();
        let (imp, curt, lv) = (
            r.grid_import.values(),
            r.curtailment.values(),
            &r.storage_levels,
        );
        check(lv.iter().all(|s| *s >= 0.0 && *s <= e), || {
            format!("run {k}: level outside [0, {e}]")
        })?;
        for h in 0..hours {
            let delta = lv[h + 1] - lv[h];
            let stored = if delta >= 0.0 {
                delta / p.eta_c
            } else {
                delta * p.eta_d
            };
            let residual = (g.values()[h] - d.values()[h] + imp[h] - curt[h] - stored).abs();
            worst = worst.max(residual);
            check(residual < 1e-9, || {
                format!("run {k} hour {h}: residual {residual:e}")
            })?;
            check(imp[h] >= 0.0 && curt[h] >= 0.0, || {
                format!("run {k} hour {h}: negative flow")
            })?;
        }
    }
    Ok(format!("{n} runs, max residual {worst:e} MWh, bounds held"))
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/synthetic-week")
}

struct Scenario {
    demand: HourlySeries,
    cf: HourlySeries,
    price: HourlySeries,
    costs: CostAssumptions,
    projection: CostProjection,
    params: StorageParams,
    search: SearchConfig,
}

fn scenario() -> Scenario {
    let dir = scenario_dir();
    let hours = 168;
    Scenario {
        demand: io::read_series(&dir.join("demand.csv"), Unit::Mw, hours).unwrap(),
        cf: io::read_series(&dir.join("capacity_factor.csv"), Unit::Dimensionless, hours).unwrap(),
        price: io::read_series(&dir.join("price.csv"), Unit::EurPerMwh, hours).unwrap(),
        costs: io::read_costs(&dir.join("costs.toml")).unwrap(),
        projection: io::read_projection(&dir.join("projection.csv"), Interpolation::Linear)
            .unwrap(),
        params: StorageParams::new(0.8, 0.8, 0.8).unwrap(),
        search: SearchConfig::default(),
    }
}

/// Zero import at the analytical size, both bounds reached, and positive
/// import one increment below.
fn exact_size_holds(
    d: &HourlySeries,
    g: &HourlySeries,
    p: &StorageParams,
    inc: f64,
) -> Result<f64, String> {
    let iters = 1_000_000;
    let e = StorageSizing::analyze(d, g, p).unwrap().size.mwh();
    let size = StorageSize::new(e).unwrap();
    let start = sustainable_start(d, g, size, p, iters).unwrap();
    let r = simulate(d, g, size, p, start).unwrap();
    let import = r.grid_import.sum();
    check(import < 1e-9, || format!("import {import:e} at E = {e}"))?;
    let lo = r
        .storage_levels
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = r
        .storage_levels
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    check(lo <= 1e-9 && hi >= e - 1e-9, || {
        format!("levels span [{lo}, {hi}], E = {e}")
    })?;
    if e > 0.0 {
        let below = StorageSize::new((e - inc).max(0.0)).unwrap();
        let s = summarize(d, g, below, p, iters, None).unwrap();
        check(s.annual_import > 0.0, || {
            format!("no import at E - {inc} (E = {e})")
        })?;
    }
    Ok(e)
}

fn c3_optimal_size() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut fixtures = 0;
    while fixtures < 100 {
        let hours = rng.gen_range(24..=336);
        let (d, mut g) = random_pair(&mut rng, hours);
        let p = random_params(&mut rng);
        if g.sum() == 0.0 {
            continue;
        }
        // scale generation until the period ends with a net surplus
        while unconstrained_profile(&d, &g, &p).unwrap().end_level() <= 0.02 * d.sum() {
            g = g.scaled(1.25);
        }
        let e = StorageSizing::analyze(&d, &g, &p).unwrap().size.mwh();
        exact_size_holds(&d, &g, &p, (e / 2.0).min(1.0))
            .map_err(|m| format!("random fixture {fixtures}: {m}"))?;
        fixtures += 1;
    }
    let sc = scenario();
    let mut feasible = 0;
    for k in 0..=30 {
        let c_pv = 10.0 * k as f64;
        let g = generation_profile(&sc.cf, PvCapacity::new(c_pv).unwrap());
        if unconstrained_profile(&sc.demand, &g, &sc.params)
            .unwrap()
            .end_level()
            <= 0.0
        {
            continue;
        }
        exact_size_holds(&sc.demand, &g, &sc.params, sc.search.storage_increment)
            .map_err(|m| format!("scenario at {c_pv} MW: {m}"))?;
        feasible += 1;
    }
    check(feasible > 0, || "scenario has no feasible PV size".into())?;
    Ok(format!(
        "{fixtures} random fixtures and {feasible} scenario PV sizes"
    ))
}

fn c4_fixed_point() -> Outcome {
    let toy_d = power(vec![1.0; 4]);
    let toy_f = HourlySeries::capacity_factor(vec![0.0, 0.5, 1.0, 0.0]).unwrap();
    let mut toys = 0;
    for eta in [1.0, 0.8] {
        let p = StorageParams::new(eta, eta, 1.0).unwrap();
        for c_pv in [0.0, 1.0, 2.0, 3.0, 4.0] {
            let g = generation_profile(&toy_f, PvCapacity::new(c_pv).unwrap());
            for e in [0.0, 0.5, 1.0, 2.0] {
                let size = StorageSize::new(e).unwrap();
                let start = sustainable_start(&toy_d, &g, size, &p, 1).unwrap();
                let r = simulate(&toy_d, &g, size, &p, start).unwrap();
                check((r.end_level - start).abs() < 1e-9, || {
                    format!(
                        "toy c_pv={c_pv} E={e} eta={eta}: start {start}, end {}",
                        r.end_level
                    )
                })?;
                toys += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 100;
    for k in 0..n {
        let hours = rng.gen_range(24..=336);
        let (d, g) = random_pair(&mut rng, hours);
        let p = random_params(&mut rng);
        let e_max = StorageSizing::analyze(&d, &g, &p).unwrap().size.mwh();
        let size = StorageSize::new(e_max * rng.gen_range(0.0..1.2)).unwrap();
        let start = sustainable_start(&d, &g, size, &p, 1_000_000).unwrap();
        let r = simulate(&d, &g, size, &p, start).unwrap();
        check((r.end_level - start).abs() < 1e-9, || {
            format!("random fixture {k}: start {start}, end {}", r.end_level)
        })?;
    }
    Ok(format!(
        "{toys} toy fixtures at one hand-off, {n} random fixtures iterated"
    ))
}

fn c5_design_space_shape() -> Outcome {
    let sc = scenario();
    let space =
        enumerate_design_space(&sc.demand, &sc.cf, &sc.price, &sc.params, &sc.search).unwrap();
    let pts = &space.points;
    for w in pts.windows(2) {
        if w[0].c_pv == w[1].c_pv {
            check(w[1].annual_import <= w[0].annual_import, || {
                format!(
                    "import rises with storage at {} MW: {} -> {}",
                    w[0].c_pv, w[0].annual_import, w[1].annual_import
                )
            })?;
        }
    }
    // each point against the next PV size at the same storage size
    for (k, row) in space.rows.iter().enumerate().skip(1) {
        let prev = space.rows[k - 1].c_pv;
        let g = generation_profile(&sc.cf, PvCapacity::new(row.c_pv).unwrap());
        for p in pts.iter().filter(|p| p.c_pv == prev) {
            let s = summarize(
                &sc.demand,
                &g,
                StorageSize::new(p.storage_size).unwrap(),
                &sc.params,
                sc.search.fixed_point_iters,
                None,
            )
            .unwrap();
            check(s.annual_import <= p.annual_import, || {
                format!(
                    "import rises with PV at {} MWh: {} -> {}",
                    p.c_s, p.annual_import, s.annual_import
                )
            })?;
        }
    }
    let no_storage: Vec<f64> = pts
        .iter()
        .filter(|p| p.c_s == 0.0)
        .map(|p| p.annual_import)
        .collect();
    let floor = no_storage.iter().cloned().fold(f64::INFINITY, f64::min);
    check(floor > 0.0, || "no-storage import reaches zero".into())?;
    let tail = &no_storage[no_storage.len() - 3..];
    Ok(format!(
        "{} points, both axes non-increasing, no-storage import floor {floor:.1} MWh (last rows {tail:.1?})",
        pts.len()
    ))
}

fn c6_economics() -> Outcome {
    let annuity = |r: f64, n: i32| 1.0 / (1..=n).map(|k| (1.0 + r).powi(-k)).sum::<f64>();
    let (c30, c15) = (
        capital_recovery_factor(0.03, 30).unwrap(),
        capital_recovery_factor(0.03, 15).unwrap(),
    );
    check((c30 - 0.051019).abs() <= 1e-5, || {
        format!("CRF(0.03, 30) = {c30}")
    })?;
    check((c15 - 0.083767).abs() <= 1e-5, || {
        format!("CRF(0.03, 15) = {c15}")
    })?;
    check(
        (c30 - annuity(0.03, 30)).abs() <= 1e-12 && (c15 - annuity(0.03, 15)).abs() <= 1e-12,
        || "CRF disagrees with annuity sum".into(),
    )?;

    let sc = scenario();
    let space =
        enumerate_design_space(&sc.demand, &sc.cf, &sc.price, &sc.params, &sc.search).unwrap();
    let priced = price_design_space(&space, &sc.costs, CrfForm::Standard).unwrap();
    let grid_only = priced
        .iter()
        .find(|p| p.c_pv == 0.0 && p.c_s == 0.0)
        .unwrap();
    let weighted: f64 = sc
        .demand
        .values()
        .iter()
        .zip(sc.price.values())
        .map(|(d, p)| d * p)
        .sum::<f64>()
        / sc.demand.sum();
    check((grid_only.lcoe - weighted).abs() <= 1e-9, || {
        format!(
            "grid-only LCOE {} vs weighted price {weighted}",
            grid_only.lcoe
        )
    })?;

    let base = CostAssumptions::reference_2019();
    for interp in [Interpolation::Linear, Interpolation::Geometric] {
        let proj = CostProjection::published(interp);
        for (year, pv, om, st) in [
            (2030, 0.56, 0.73, 0.42),
            (2050, 0.46, 0.65, 0.32),
            (2100, 0.21, 0.48, 0.05),
        ] {
            let c = project_costs(&base, &proj, year).unwrap();
            let expected = (
                base.pv_installed * pv,
                base.pv_om * om,
                base.storage_installed * st,
                base.storage_om * st,
            );
            check(
                (c.pv_installed, c.pv_om, c.storage_installed, c.storage_om) == expected,
                || format!("{year} projected costs {c:?}"),
            )?;
        }
    }
    Ok(format!(
        "CRF30 {c30:.6}, CRF15 {c15:.6}, grid-only LCOE {:.6} EUR/MWh, anchors exact",
        grid_only.lcoe
    ))
}

fn c7_sweep_trend() -> Outcome {
    let started = Instant::now();
    let sc = scenario();
    let space =
        enumerate_design_space(&sc.demand, &sc.cf, &sc.price, &sc.params, &sc.search).unwrap();
    let out = multi_year_sweep(
        &space,
        &sc.costs,
        &sc.projection,
        &sc.search,
        CrfForm::Standard,
    )
    .unwrap();
    let secs = started.elapsed().as_secs_f64();
    check(out.len() == 82, || format!("{} rows", out.len()))?;
    for w in out.windows(2) {
        check(w[1].point.c_pv >= w[0].point.c_pv, || {
            format!("c_pv falls in {}", w[1].year)
        })?;
        check(w[1].grid_share <= w[0].grid_share, || {
            format!("grid share rises in {}", w[1].year)
        })?;
    }
    let entry = out
        .iter()
        .position(|r| r.point.c_s > 0.0)
        .ok_or("storage never enters")?;
    check(
        entry > 0 && out[entry..].iter().all(|r| r.point.c_s > 0.0),
        || "storage does not have a single 0 -> positive crossover".into(),
    )?;
    check(secs < 60.0, || format!("sweep took {secs:.2} s"))?;
    let (first, last) = (&out[0], &out[out.len() - 1]);
    Ok(format!(
        "2019 {} MW/{} MWh grid {:.3}; storage enters {}; 2100 {} MW/{} MWh grid {:.3}; {secs:.2} s",
        first.point.c_pv, first.point.c_s, first.grid_share, out[entry].year,
        last.point.c_pv, last.point.c_s, last.grid_share
    ))
}

fn c8_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = scenario_dir().join("config.toml");
    let mut outputs: Vec<(String, String)> = Vec::new();
    for (k, threads) in ["1", "4", "1", "0"].iter().enumerate() {
        let dir = tmp.path().join(format!("run{k}"));
        for cmd in ["design-space", "sweep"] {
            let status = Command::new(env!("CARGO_BIN_EXE_hsize"))
                .args([
                    cmd,
                    "--config",
                    config.to_str().unwrap(),
                    "--threads",
                    threads,
                    "--out",
                    dir.to_str().unwrap(),
                ])
                .output()
                .map_err(|e| e.to_string())?;
            check(status.status.success(), || {
                String::from_utf8_lossy(&status.stderr).into_owned()
            })?;
        }
        let read = |f: &str| std::fs::read_to_string(dir.join(f)).unwrap();
        outputs.push((read("design_space.csv"), read("sweep.csv")));
    }
    check(outputs.windows(2).all(|w| w[0] == w[1]), || {
        "outputs differ between runs".into()
    })?;
    Ok(format!(
        "{} runs at 1/4/1/auto threads byte-identical",
        outputs.len()
    ))
}

fn c9_real_data() -> Option<Outcome> {
    let config = std::env::var_os("HSIZE_REAL_DATA_CONFIG")?;
    let tmp = tempfile::tempdir().ok()?;
    let run = Command::new(env!("CARGO_BIN_EXE_hsize"))
        .args([
            "sweep",
            "--year_start",
            "2019",
            "--year_end",
            "2019",
            "--out",
        ])
        .arg(tmp.path())
        .arg("--config")
        .arg(&config)
        .output()
        .ok()?;
    if !run.status.success() {
        return Some(Err(String::from_utf8_lossy(&run.stderr).into_owned()));
    }
    let text = std::fs::read_to_string(tmp.path().join("sweep.csv")).ok()?;
    let row: Vec<f64> = text
        .lines()
        .nth(1)?
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    let (c_s, share) = (row[2], row[4]);
    Some(
        check(c_s == 0.0 && (share - 0.78).abs() <= 0.05, || {
            format!("c_s {c_s}, grid share {share}")
        })
        .map(|_| format!("c_s 0, grid share {share:.3}")),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("C1", "oracle equivalence", c1_oracle_equivalence),
        ("C2", "energy conservation", c2_energy_conservation),
        ("C3", "optimal storage size", c3_optimal_size),
        ("C4", "sustainable fixed point", c4_fixed_point),
        ("C5", "design-space monotonicity", c5_design_space_shape),
        ("C6", "economics anchors", c6_economics),
        ("C7", "sweep trend", c7_sweep_trend),
        ("C8", "determinism", c8_determinism),
    ];
    let mut stdout = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => writeln!(stdout, "PASS {id} {name}: {detail}").unwrap(),
            Err(detail) => {
                writeln!(stdout, "FAIL {id} {name}: {detail}").unwrap();
                failed.push(id);
            }
        }
    }
    match c9_real_data() {
        None => writeln!(
            stdout,
            "SKIP C9 real-data grid share: HSIZE_REAL_DATA_CONFIG not set"
        )
        .unwrap(),
        Some(Ok(detail)) => writeln!(stdout, "PASS C9 real-data grid share: {detail}").unwrap(),
        Some(Err(detail)) => {
            writeln!(stdout, "FAIL C9 real-data grid share: {detail}").unwrap();
            failed.push("C9");
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
