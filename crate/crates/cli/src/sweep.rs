//! Cartesian sweeps over reservoir parameters.
//!
//! Each grid point is an independent run in its own subdirectory; points
//! execute on a rayon pool of `CATSIM_WORKERS` threads and the summary is
//! written once all have finished, in grid order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use log::{error, info, warn};
use rayon::prelude::*;
use serde_json::json;

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::run::{self, num, unix_seconds};
use crate::scenario::Scenario;

pub const SUMMARY_HEADER: &str = "point,ns,nth,r,status,final_tau,final_purity,peak_negativity,c_l1_tau,c_l1_cont,error";
pub const WORKERS_ENV: &str = "CATSIM_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub ns: Option<f64>,
    pub nth: Option<f64>,
    pub r: Option<f64>,
}

/// Deduplicate an axis in first-seen order; returns the number dropped.
fn dedup_axis(values: &[f64]) -> (Vec<f64>, usize) {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if !out.iter().any(|u| u.to_bits() == v.to_bits()) {
            out.push(v);
        }
    }
    let dropped = values.len() - out.len();
    (out, dropped)
}

/// The grid described by `config.sweep`, with duplicates removed. An axis
/// given as an empty list, or no axes at all, yields no points.
pub fn grid(config: &Config) -> Result<(Vec<GridPoint>, usize)> {
    let s = &config.sweep;
    if s.ns.is_some() && s.r.is_some() {
        return Err(CliError::config("sweep over only one of sweep.ns, sweep.r"));
    }
    if s.ns.is_none() && s.nth.is_none() && s.r.is_none() {
        return Ok((vec![], 0));
    }
    let axis = |v: &Option<Vec<f64>>| -> (Vec<Option<f64>>, usize) {
        match v {
            None => (vec![None], 0),
            Some(list) => {
                let (d, n) = dedup_axis(list);
                (d.into_iter().map(Some).collect(), n)
            }
        }
    };
    let (ns, d1) = axis(&s.ns);
    let (nth, d2) = axis(&s.nth);
    let (r, d3) = axis(&s.r);
    let mut points = Vec::new();
    for &a in &ns {
        for &b in &nth {
            for &c in &r {
                points.push(GridPoint { ns: a, nth: b, r: c });
            }
        }
    }
    if points.len() > 10_000 {
        return Err(CliError::config(format!("sweep grid has {} points (limit 10000)", points.len())));
    }
    Ok((points, d1 + d2 + d3))
}

fn point_config(base: &Config, p: GridPoint, c_l1_at: Option<f64>) -> Config {
    let mut c = base.clone();
    if let Some(ns) = p.ns {
        c.reservoir.ns = Some(ns);
        c.reservoir.r = None;
    }
    if let Some(r) = p.r {
        c.reservoir.r = Some(r);
        c.reservoir.ns = None;
    }
    if let Some(nth) = p.nth {
        c.reservoir.nth = Some(nth);
    }
    if let Some(t) = c_l1_at {
        c.plan.checkpoint_taus.get_or_insert_with(Vec::new).push(t);
        if c.plan.checkpoints.is_none() && base.plan.checkpoint_taus.is_none() {
            // Keep the default uniform checkpoints alongside the extra time.
            c.plan.checkpoints = Some(20);
        }
        if let Some(taus) = c.plan.checkpoint_taus.as_mut() {
            taus.sort_by(f64::total_cmp);
        }
    }
    c
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
}

pub fn workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub points: usize,
    pub failed: usize,
    pub duplicates: usize,
}

/// Run every grid point of `config` under `dir`.
pub fn sweep(config: &Config, dir: &Path, overwrite: bool) -> Result<SweepReport> {
    let (points, duplicates) = grid(config)?;
    if duplicates > 0 {
        warn!("dropped {duplicates} duplicate sweep value(s)");
    }
    if points.is_empty() {
        warn!("sweep grid is empty; writing header-only summary");
    }
    let c_l1_at = config.sweep.c_l1_at;
    // Resolve the base before touching the filesystem so its errors surface
    // as one config failure rather than a failure at every point.
    let base = Scenario::from_config(config)?;
    let tau_end = base.dynamics.as_ref().map(|d| d.plan.tau_end).ok_or_else(|| {
        CliError::config("sweep needs a [model] section; eta curves are swept with eta.r")
    })?;
    if let Some(t) = c_l1_at {
        if !(0.0..=tau_end).contains(&t) {
            return Err(CliError::config(format!("sweep.c_l1_at = {t} outside [0, {tau_end}]")));
        }
    }

    run::prepare_dir(dir, overwrite, &["summary.csv", run::MANIFEST, "point-*"])?;
    let started = Instant::now();
    let started_unix = unix_seconds();
    let workers = workers()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::config(format!("worker pool: {e}")))?;
    info!("sweep: {} point(s) on {workers} worker(s)", points.len());

    let results: Vec<Result<run::RunOutcome>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, &p)| {
                let pdir = dir.join(format!("point-{i:04}"));
                fs::create_dir_all(&pdir)?;
                let scenario = Scenario::from_config(&point_config(config, p, c_l1_at))?;
                let out = run::run_in(&scenario, &pdir);
                if let Err(e) = &out {
                    error!("point {i}: {e}");
                }
                out
            })
            .collect()
    });

    let mut summary = String::from(SUMMARY_HEADER);
    summary.push('\n');
    let mut failed = 0;
    for (i, (p, res)) in points.iter().zip(&results).enumerate() {
        let prefix = format!("{i},{},{},{}", opt(p.ns), opt(p.nth), opt(p.r));
        match res {
            Ok(out) => {
                let last = out.records.last().expect("runs emit tau_end");
                let peak = out.records.iter().map(|r| r.negativity).fold(f64::NEG_INFINITY, f64::max);
                let at = c_l1_at.unwrap_or(tau_end);
                let rec = out
                    .records
                    .iter()
                    .min_by(|a, b| (a.tau - at).abs().total_cmp(&(b.tau - at).abs()))
                    .expect("non-empty");
                writeln!(
                    summary,
                    "{prefix},ok,{},{},{},{},{},",
                    num(last.tau),
                    num(last.purity),
                    num(peak),
                    num(rec.tau),
                    num(rec.c_l1_cont)
                )
                .expect("string write");
            }
            Err(e) => {
                failed += 1;
                writeln!(summary, "{prefix},failed,,,,,,{}", quote(&e.to_string())).expect("string write");
            }
        }
    }
    fs::write(dir.join("summary.csv"), summary)?;

    let mut body = serde_json::Map::new();
    body.insert("software".into(), json!({"name": "catsim", "version": env!("CARGO_PKG_VERSION")}));
    body.insert("kind".into(), json!("sweep"));
    body.insert("name".into(), json!(base.name));
    body.insert("scenario".into(), serde_json::to_value(config)?);
    body.insert("workers".into(), json!(workers));
    body.insert("points".into(), json!(points.len()));
    body.insert("failed".into(), json!(failed));
    body.insert("duplicates_dropped".into(), json!(duplicates));
    body.insert("started_unix".into(), json!(started_unix));
    body.insert("finished_unix".into(), json!(unix_seconds()));
    body.insert("timings".into(), json!({"total_seconds": started.elapsed().as_secs_f64()}));
    body.insert("status".into(), json!(if failed == 0 { "ok" } else { "partial" }));
    run::write_manifest(dir, body)?;

    Ok(SweepReport {
        points: points.len(),
        failed,
        duplicates,
    })
}
