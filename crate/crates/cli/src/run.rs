//! Running one experiment and writing its artifacts.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use hflow::duality::{check_dual, dual, DualCheck, EmbeddedSample};
use hflow::flow::FlowTrace;
use hflow::harnack::{report, u_records, HarnackKind, HarnackReport, HarnackSpec};
use hflow::moser::{moser_check, random_pairs, MoserField, MoserOptions, MoserReport};
use serde::{Deserialize, Serialize};

use crate::config::Experiment;
use crate::plot::{line_chart, Series};
use crate::CliError;

/// Run-wide knobs that do not live in the configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Overrides `experiment.seed`.
    pub seed: Option<u64>,
    pub tol_scale: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: None, tol_scale: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorOutcome {
    pub name: String,
    pub pass: bool,
    /// The number compared against the tolerance.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harnack: Option<HarnackReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moser: Option<MoserReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality: Option<Vec<DualCheck>>,
}

impl MonitorOutcome {
    fn plain(name: &str, pass: bool, value: f64, tolerance: f64, detail: String) -> Self {
        MonitorOutcome { name: name.into(), pass, value, tolerance, detail, harnack: None, moser: None, duality: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub claim: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub trace_id: String,
    pub termination: String,
    pub records: usize,
    pub monitors: Vec<MonitorOutcome>,
    pub pass: bool,
}

impl RunReport {
    /// `monitor,pass,value,tolerance,detail` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("monitor,pass,value,tolerance,detail\n");
        for m in &self.monitors {
            out.push_str(&format!("{},{},{:e},{:e},\"{}\"\n", m.name, m.pass, m.value, m.tolerance, m.detail.replace('"', "'")));
        }
        out
    }
}

fn harnack_monitor(exp: &Experiment, trace: &FlowTrace, kind: HarnackKind, scale: f64) -> hflow::Result<MonitorOutcome> {
    let m = &exp.config.monitors;
    let tol = m.tol * scale;
    let rep = report(&HarnackSpec::for_trace(kind, trace), trace)?;
    let mut pass = rep.passes(tol);
    let mut detail = match &rep.monotonicity {
        Some(mono) => format!("worst decrease rate of inf u {:e}, worst increase rate of sup u {:e}", mono.worst_inf_drop, mono.worst_sup_rise),
        None => format!("min lhs {:e} over {} samples, margin {:e}", rep.min_lhs, rep.samples, rep.margin),
    };
    if !rep.excluded.is_empty() {
        pass = false;
        detail.push_str(&format!("; hypothesis failure on {} records from t = {}", rep.excluded.len(), rep.excluded[0].t));
    }
    let mut value = rep.monotonicity.as_ref().map_or(rep.margin, |mono| -mono.worst_inf_drop);
    if let (Some(eq), HarnackKind::Standard) = (m.equality_tol, kind) {
        let eq = eq * scale;
        pass &= rep.equality_gap < eq;
        detail.push_str(&format!("; equality gap {:e} (tolerance {eq:e})", rep.equality_gap));
        value = rep.equality_gap;
    }
    let mut out = MonitorOutcome::plain(&kind.to_string(), pass, value, tol, detail);
    out.harnack = Some(rep);
    Ok(out)
}

fn moser_monitor(exp: &Experiment, trace: &FlowTrace, seed: u64, scale: f64) -> hflow::Result<MonitorOutcome> {
    let m = &exp.config.monitors;
    let field = MoserField::new(trace)?;
    let pairs = random_pairs(&field, m.moser_pairs, seed);
    let opts = MoserOptions { seed, tol: MoserOptions::default().tol * scale, ..MoserOptions::default() };
    let rep = moser_check(&field, exp.speed.p, &pairs, &opts)?;
    let ptol = m.polarization_tol * scale;
    let pass = rep.passes() && rep.polarization < ptol && !pairs.is_empty();
    let detail = format!("{} failures in {} pairs, polarization residual {:e}", rep.failures, rep.verdicts.len(), rep.polarization);
    let mut out = MonitorOutcome::plain("moser", pass, rep.failures as f64, 0.0, detail);
    out.moser = Some(rep);
    Ok(out)
}

fn duality_monitor(exp: &Experiment, trace: &FlowTrace, scale: f64) -> hflow::Result<MonitorOutcome> {
    let m = &exp.config.monitors;
    let mut checks = Vec::new();
    for rec in [trace.records.first(), trace.records.last()].into_iter().flatten() {
        let primal = EmbeddedSample::from_shape(&rec.state)?;
        checks.push(check_dual(&primal, &dual(&primal)?)?);
    }
    let (atol, ftol) = (m.duality_tol * scale, m.duality_fd_tol * scale);
    let pass = !checks.is_empty() && checks.iter().all(|c| c.passes(atol, ftol));
    let worst = checks.iter().map(|c| c.reciprocal.max(c.orthogonality).max(c.normalization)).fold(0.0, f64::max);
    let fd = checks.iter().map(|c| c.finite_difference).fold(0.0, f64::max);
    let detail = format!("reciprocal/orthogonality {worst:e} (tolerance {atol:e}), finite-difference {fd:e} (tolerance {ftol:e})");
    let mut out = MonitorOutcome::plain("duality", pass, worst, atol, detail);
    out.duality = Some(checks);
    Ok(out)
}

fn guarded(name: &str, r: hflow::Result<MonitorOutcome>) -> MonitorOutcome {
    r.unwrap_or_else(|e| MonitorOutcome::plain(name, false, f64::NAN, f64::NAN, format!("error: {e}")))
}

/// Evaluates every configured monitor on a trace.
pub fn evaluate(exp: &Experiment, trace: &FlowTrace, opts: &RunOptions) -> RunReport {
    let cfg = &exp.config;
    let seed = opts.seed.unwrap_or(cfg.experiment.seed);
    let scale = opts.tol_scale;
    let mut monitors: Vec<MonitorOutcome> =
        exp.monitors.iter().map(|&k| guarded(&k.to_string(), harnack_monitor(exp, trace, k, scale))).collect();
    if cfg.monitors.moser_pairs > 0 {
        monitors.push(guarded("moser", moser_monitor(exp, trace, seed, scale)));
    }
    if cfg.monitors.duality {
        monitors.push(guarded("duality", duality_monitor(exp, trace, scale)));
    }
    if cfg.monitors.xcf_metric {
        let tol = cfg.monitors.xcf_tol * scale;
        monitors.push(guarded(
            "xcf_metric",
            hflow::xcf::xcf_metric_check(trace)
                .map(|r| MonitorOutcome::plain("xcf_metric", r < tol, r, tol, format!("relative residual of dg/dt = 2c: {r:e}"))),
        ));
    }
    let pass = monitors.iter().all(|m| m.pass);
    RunReport {
        name: cfg.experiment.name.clone(),
        claim: cfg.experiment.claim.clone(),
        seed,
        tol_scale: scale,
        trace_id: trace.meta.id.clone(),
        termination: trace.meta.termination.label().to_string(),
        records: trace.len(),
        monitors,
        pass,
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// Writes `trace.jsonl`, `report.json`, `monitors.csv`, per-monitor CSV
/// tables and, if enabled, the SVG plots.
pub fn write_artifacts(dir: &Path, exp: &Experiment, trace: &FlowTrace, rep: &RunReport) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    let trace_path = dir.join("trace.jsonl");
    let file = fs::File::create(&trace_path).map_err(|e| CliError::Io(trace_path.display().to_string(), e))?;
    trace.write_jsonl(BufWriter::new(file))?;
    write(&dir.join("report.json"), &(serde_json::to_string_pretty(rep).map_err(hflow::Error::from)? + "\n"))?;
    write(&dir.join("monitors.csv"), &rep.to_csv())?;
    for m in &rep.monitors {
        if let Some(h) = &m.harnack {
            write(&dir.join(format!("harnack_{}.csv", m.name)), &h.summary_csv())?;
        }
        if let Some(mo) = &m.moser {
            write(&dir.join("moser.csv"), &mo.to_csv(&trace.meta.grid))?;
        }
    }
    if exp.config.output.plots {
        write_plots(dir, trace, rep)?;
    }
    Ok(())
}

fn write_plots(dir: &Path, trace: &FlowTrace, rep: &RunReport) -> Result<(), CliError> {
    let lhs: Vec<Series> = rep
        .monitors
        .iter()
        .filter_map(|m| m.harnack.as_ref().map(|h| Series::new(&m.name, h.records.iter().map(|r| (r.t, r.min_lhs)).collect())))
        .collect();
    write(&dir.join("min_lhs.svg"), &line_chart("Harnack quantity, minimum over the grid", "t", "min lhs", &lhs))?;

    let u = match u_records(trace) {
        Ok(recs) => {
            let interior = trace.meta.grid.interior();
            let ext = |pick: fn(f64, f64) -> f64, init: f64| -> Vec<(f64, f64)> {
                recs.iter().map(|r| (r.t, interior.iter().map(|&j| r.values[j]).fold(init, pick))).collect()
            };
            vec![Series::new("inf u", ext(f64::min, f64::INFINITY)), Series::new("sup u", ext(f64::max, f64::NEG_INFINITY))]
        }
        Err(e) => {
            log::debug!("no u plot: {e}");
            Vec::new()
        }
    };
    write(&dir.join("u.svg"), &line_chart("u = (df/dt - b(grad f, grad f))/f", "t", "u", &u))?;

    let kappa = vec![
        Series::new("min kappa", trace.records.iter().map(|r| (r.t, r.min_kappa())).collect()),
        Series::new("max kappa", trace.records.iter().map(|r| (r.t, r.max_kappa())).collect()),
    ];
    write(&dir.join("kappa.svg"), &line_chart("principal curvature range", "t", "kappa", &kappa))?;
    Ok(())
}

