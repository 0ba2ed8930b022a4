//! Single scenario runs: evolve, reduce checkpoints, write artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use catsim_core::checkpoint::write_binary;
use catsim_core::decoherence::{write_eta_rows, ETA_CSV_HEADER};
use catsim_core::signatures::{quadrature_distribution, scalar_record, wigner};
use catsim_core::{evolve_with, EvolveStats, Liouvillian, TrajectoryRecord};
use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::scenario::{Dynamics, Scenario};

pub const TRAJECTORY_HEADER: &str = "tau,purity,negativity,c_l1_cont,c_l1_fock,odd_parity,mean_n,trace_err";
pub const QUADRATURE_HEADER: &str = "tau,theta,x,p_density";
pub const WIGNER_HEADER: &str = "tau,re_alpha,im_alpha,w";
pub const NUMBER_HEADER: &str = "tau,n,p";
pub const MANIFEST: &str = "manifest.json";

/// Artifact names a run may produce; `--overwrite` only clears these.
pub const ARTIFACTS: &[&str] = &[
    "trajectory.csv",
    "quadrature.csv",
    "wigner.csv",
    "number_distribution.csv",
    "eta.csv",
    "final_state.bin",
    MANIFEST,
];

/// Truncated tail mass above which the final state is flagged.
const TAIL_WARN: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub records: Vec<TrajectoryRecord>,
}

/// Make `dir` ready for artifacts. An existing non-empty directory is an
/// error unless `overwrite` is set and it holds only artifacts from an
/// earlier run.
pub fn prepare_dir(dir: &Path, overwrite: bool, known: &[&str]) -> Result<()> {
    if dir.exists() {
        let entries: Vec<_> = fs::read_dir(dir)?.collect::<std::io::Result<_>>()?;
        if !entries.is_empty() {
            if !overwrite {
                return Err(CliError::config(format!(
                    "output directory {} is not empty (pass --overwrite to replace a previous run)",
                    dir.display()
                )));
            }
            let foreign: Vec<_> = entries
                .iter()
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .filter(|n| !known.iter().any(|k| k == n || (k.ends_with('*') && n.starts_with(&k[..k.len() - 1]))))
                .collect();
            if !foreign.is_empty() {
                return Err(CliError::config(format!(
                    "refusing to overwrite {}: it contains files not produced by catsim ({})",
                    dir.display(),
                    foreign.join(", ")
                )));
            }
            for e in entries {
                let path = e.path();
                if path.is_dir() {
                    fs::remove_dir_all(path)?;
                } else {
                    fs::remove_file(path)?;
                }
            }
        }
    }
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Floating-point cell with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(dir: &Path, name: &str, header: &str) -> Result<BufWriter<File>> {
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    writeln!(w, "{header}")?;
    Ok(w)
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Every file under `dir` except the top-level manifest, sorted by path.
pub fn inventory(dir: &Path) -> Result<Vec<FileEntry>> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<FileEntry>) -> Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
                continue;
            }
            let rel = path.strip_prefix(root).expect("walk stays under root");
            if rel == Path::new(MANIFEST) {
                continue;
            }
            let bytes = fs::read(&path)?;
            out.push(FileEntry {
                path: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
                bytes: bytes.len() as u64,
                sha256: hex::encode(Sha256::digest(&bytes)),
            });
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out)?;
    out.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}

pub fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Write `manifest.json` for `dir` with the inventory taken now.
pub fn write_manifest(dir: &Path, mut body: serde_json::Map<String, Value>) -> Result<()> {
    body.insert("files".into(), serde_json::to_value(inventory(dir)?)?);
    let mut w = BufWriter::new(File::create(dir.join(MANIFEST))?);
    serde_json::to_writer_pretty(&mut w, &Value::Object(body))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn derived(d: &Dynamics, l: &Liouvillian) -> Value {
    let bath = d.schedule.base;
    json!({
        "alpha0_re": d.alpha0.re,
        "alpha0_im": d.alpha0.im,
        "alpha0_abs": d.alpha0.norm(),
        "alpha0_arg": d.alpha0.arg(),
        "lambda": d.params.lambda,
        "g2": d.params.g2,
        "chi_prime": d.params.chi_prime,
        "chi": d.params.chi(),
        "cutoff": d.cutoff,
        "dtau": d.plan.resolved_dtau(l),
        "norm_estimate": l.norm_estimate(),
        "signature_theta": d.requests.options.theta,
        "bath_n": bath.total_n(),
        "bath_n_th": bath.n_th,
        "bath_n_s": bath.n_s,
        "bath_m_re": bath.m.re,
        "bath_m_im": bath.m.im,
        "bath_r": bath.r,
        "initial": d.initial,
        "schedule": d.schedule.mode,
        "plan": d.plan,
        "requests": d.requests,
    })
}

fn stats_json(stats: &EvolveStats) -> Value {
    json!({
        "steps": stats.steps,
        "rejected": stats.rejected,
        "dtau": stats.dtau,
        "trace_corrections": stats.corrections.iter().map(|c| json!({"tau": c.tau, "drift": c.drift})).collect::<Vec<_>>(),
    })
}

struct Progress {
    body: serde_json::Map<String, Value>,
    records: Vec<TrajectoryRecord>,
    warnings: Vec<String>,
    timings: serde_json::Map<String, Value>,
}

/// Run `scenario` into `dir`, which must already be prepared. On failure a
/// manifest with `status = "failed"` is still written.
pub fn run_in(scenario: &Scenario, dir: &Path) -> Result<RunOutcome> {
    let started = Instant::now();
    let mut body = serde_json::Map::new();
    body.insert("software".into(), json!({"name": "catsim", "version": env!("CARGO_PKG_VERSION")}));
    body.insert("name".into(), json!(scenario.name));
    body.insert("scenario".into(), serde_json::to_value(&scenario.config)?);
    body.insert("started_unix".into(), json!(unix_seconds()));
    let mut p = Progress {
        body,
        records: Vec::new(),
        warnings: Vec::new(),
        timings: serde_json::Map::new(),
    };
    let result = execute(scenario, dir, &mut p);
    p.timings.insert("total_seconds".into(), json!(started.elapsed().as_secs_f64()));
    let Progress {
        mut body,
        records,
        warnings,
        timings,
    } = p;
    body.insert("finished_unix".into(), json!(unix_seconds()));
    body.insert("timings".into(), Value::Object(timings));
    body.insert("checkpoints".into(), serde_json::to_value(&records)?);
    body.insert("warnings".into(), json!(warnings));
    match &result {
        Ok(()) => {
            body.insert("status".into(), json!("ok"));
        }
        Err(e) => {
            body.insert("status".into(), json!("failed"));
            body.insert("error".into(), json!(e.to_string()));
            body.insert("exit_code".into(), json!(e.exit_code()));
        }
    }
    write_manifest(dir, body)?;
    result.map(|()| RunOutcome {
        dir: dir.to_path_buf(),
        records,
    })
}

fn execute(scenario: &Scenario, dir: &Path, p: &mut Progress) -> Result<()> {
    if !scenario.eta.is_empty() {
        let t = Instant::now();
        let mut w = csv(dir, "eta.csv", ETA_CSV_HEADER)?;
        for s in &scenario.eta {
            write_eta_rows(s, &mut w)?;
        }
        w.flush()?;
        p.timings.insert("eta_seconds".into(), json!(t.elapsed().as_secs_f64()));
    }
    let Some(d) = &scenario.dynamics else {
        return Ok(());
    };

    let t = Instant::now();
    let l = Liouvillian::build(d.params, d.schedule, d.cutoff).map_err(|e| CliError::config(format!("model: {e}")))?;
    let rho0 = d.initial.build(d.cutoff).map_err(|e| CliError::config(format!("initial state: {e}")))?;
    p.body.insert("derived".into(), derived(d, &l));
    info!(
        "{}: α₀ = {:.6}, N_c = {}, dτ = {:e}",
        scenario.name,
        d.alpha0,
        d.cutoff,
        d.plan.resolved_dtau(&l)
    );
    p.timings.insert("build_seconds".into(), json!(t.elapsed().as_secs_f64()));

    let tau_end = d.plan.tau_end;
    let req = &d.requests;
    let mut traj = csv(dir, "trajectory.csv", TRAJECTORY_HEADER)?;
    let mut quad = if req.quadrature_at.is_empty() { None } else { Some(csv(dir, "quadrature.csv", QUADRATURE_HEADER)?) };
    let mut wig = if req.wigner_at.is_empty() { None } else { Some(csv(dir, "wigner.csv", WIGNER_HEADER)?) };
    let mut numd = if req.number_distribution_at.is_empty() {
        None
    } else {
        Some(csv(dir, "number_distribution.csv", NUMBER_HEADER)?)
    };

    let t = Instant::now();
    let mut final_state = None;
    let records = &mut p.records;
    let evolved = evolve_with(&l, &rho0, &d.plan, |cp| {
        let rec = scalar_record(cp.tau, &cp.rho, cp.trace_err, &req.options)?;
        let io = |e: std::io::Error| catsim_core::Error::from(e);
        writeln!(
            traj,
            "{},{},{},{},{},{},{},{}",
            num(rec.tau),
            num(rec.purity),
            num(rec.negativity),
            num(rec.c_l1_cont),
            num(rec.c_l1_fock),
            num(rec.odd_parity),
            num(rec.mean_n),
            num(rec.trace_err)
        )
        .map_err(io)?;
        records.push(rec);
        if let Some(w) = quad.as_mut().filter(|_| req.quadrature(cp.tau, tau_end)) {
            for &theta in &req.quadrature_angles {
                let q = quadrature_distribution(&cp.rho, theta, req.options.position_grid)?;
                for (x, pd) in q.points().iter().zip(&q.density) {
                    writeln!(w, "{},{},{},{}", num(cp.tau), num(theta), num(*x), num(*pd)).map_err(io)?;
                }
            }
        }
        if let Some(w) = wig.as_mut().filter(|_| req.wigner(cp.tau, tau_end)) {
            let grid = wigner(&cp.rho, req.options.wigner_grid);
            let n = grid.axis.len();
            for i in 0..n {
                for j in 0..n {
                    let (re, im) = (grid.axis.point(i), grid.axis.point(j));
                    writeln!(w, "{},{},{},{}", num(cp.tau), num(re), num(im), num(grid.at(i, j))).map_err(io)?;
                }
            }
        }
        if let Some(w) = numd.as_mut().filter(|_| req.number_distribution(cp.tau, tau_end)) {
            for (n, pn) in cp.rho.number_distribution().probabilities.iter().enumerate() {
                writeln!(w, "{},{},{}", num(cp.tau), n, num(*pn)).map_err(io)?;
            }
        }
        if cp.tau == tau_end {
            final_state = Some(cp.rho.clone());
        }
        Ok(())
    });
    // Flush whatever was written, even if the run aborted part-way.
    for w in [Some(&mut traj), quad.as_mut(), wig.as_mut(), numd.as_mut()].into_iter().flatten() {
        w.flush()?;
    }
    p.timings.insert("evolve_seconds".into(), json!(t.elapsed().as_secs_f64()));
    let stats = evolved?;
    p.body.insert("stats".into(), stats_json(&stats));

    let rho = final_state.expect("integrator always emits tau_end");
    let tail = rho.tail_mass();
    p.body.insert("final_tail_mass".into(), json!(tail));
    if tail > TAIL_WARN {
        let msg = format!("final-state tail mass {tail:e} above {TAIL_WARN:e}; consider a larger plan.cutoff");
        warn!("{msg}");
        p.warnings.push(msg);
    }
    if d.save_final_state {
        let mut w = BufWriter::new(File::create(dir.join("final_state.bin"))?);
        write_binary(&rho, tau_end, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Prepare `dir` and run.
pub fn run(scenario: &Scenario, dir: &Path, overwrite: bool) -> Result<RunOutcome> {
    prepare_dir(dir, overwrite, ARTIFACTS)?;
    run_in(scenario, dir)
}
