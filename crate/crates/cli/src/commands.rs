//! Subcommand bodies. Each returns the text to print and the exit code, so
//! that `main` only handles argument parsing.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use hflow::duality::{check_dual, dual, DualCheck, EmbeddedSample};
use hflow::flow::{FlowTrace, Shape};
use hflow::moser::{moser_check, random_pairs, MoserField, MoserOptions};
use hflow::soliton::CATALOG;
use hflow::symfun::{inverse_fn, CurvatureFunctionSpec, Kappa, ScalarFn, SymFn};
use serde::Serialize;

use crate::config::{Experiment, Loaded};
use crate::run::{evaluate, write_artifacts, RunOptions, RunReport};
use crate::sweep::{sweep, SweepTable};
use crate::{CliError, EXIT_FAIL, EXIT_PASS};

fn exit(pass: bool) -> u8 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(path.display().to_string(), e)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value).map_err(hflow::Error::from)? + "\n")
}

/// Human-readable verdict lines for a run.
pub fn verdict_lines(rep: &RunReport) -> String {
    let mut out = format!("{} [{}]: {} records, {}\n", rep.name, rep.trace_id, rep.records, rep.termination);
    for m in &rep.monitors {
        out.push_str(&format!("  {:<12} {}  {}\n", m.name, if m.pass { "PASS" } else { "FAIL" }, m.detail));
    }
    out.push_str(if rep.pass { "all monitors passed\n" } else { "some monitors failed\n" });
    out
}

/// Output directory: `--out` if given, else `output.dir`.
pub fn out_dir(loaded: &Loaded, out: Option<&Path>) -> PathBuf {
    out.map_or_else(|| PathBuf::from(&loaded.config.output.dir), Path::to_path_buf)
}

pub fn run(config: &Path, out: Option<&Path>, opts: &RunOptions) -> Result<(String, u8), CliError> {
    let loaded = Loaded::read(config)?;
    let exp = Experiment::from_loaded(&loaded)?;
    let trace = exp.trace()?;
    let rep = evaluate(&exp, &trace, opts);
    let dir = out_dir(&loaded, out);
    write_artifacts(&dir, &exp, &trace, &rep)?;
    log::info!("wrote artifacts to {}", dir.display());
    Ok((verdict_lines(&rep), exit(rep.pass)))
}

pub fn run_sweep(config: &Path, out: Option<&Path>, opts: &RunOptions) -> Result<(SweepTable, u8), CliError> {
    let loaded = Loaded::read(config)?;
    let table = sweep(&loaded, opts)?;
    let dir = out_dir(&loaded, out);
    write_file(&dir.join("sweep.csv"), &table.to_csv())?;
    write_file(&dir.join("sweep.json"), &to_json(&table)?)?;
    Ok((table.clone(), exit(table.passes())))
}

#[derive(Serialize)]
struct CatalogEntry {
    name: &'static str,
    ambient: String,
    description: &'static str,
}

pub fn catalog(json: bool) -> Result<String, CliError> {
    let entries: Vec<CatalogEntry> =
        CATALOG.iter().map(|(name, kind, description)| CatalogEntry { name, ambient: kind.to_string(), description }).collect();
    if json {
        return to_json(&entries);
    }
    Ok(entries.iter().map(|e| format!("{:<20} {:<11} {}\n", e.name, e.ambient, e.description)).collect())
}

/// Operations of the `symfun` subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymOp {
    Eval,
    Grad,
    Hessian,
    /// Value of the inverse function `F(κ⁻¹)⁻¹`.
    Inverse,
    /// Value and gradient of the speed `sign · F^p`.
    Speed,
}

pub fn symfun(op: SymOp, base: &str, kappa: &[f64], p: f64) -> Result<String, CliError> {
    let f: SymFn = base.parse()?;
    let k = Kappa::new(kappa.to_vec())?;
    let value = match op {
        SymOp::Eval => serde_json::json!({ "function": f.to_string(), "value": f.eval(&k)? }),
        SymOp::Grad => serde_json::json!({ "function": f.to_string(), "grad": f.grad(&k)? }),
        SymOp::Hessian => {
            let h = f.hessian(&k)?;
            let rows: Vec<Vec<f64>> = h.row_iter().map(|r| r.iter().copied().collect()).collect();
            serde_json::json!({ "function": f.to_string(), "hessian": rows })
        }
        SymOp::Inverse => serde_json::json!({ "function": f.inverse().to_string(), "value": inverse_fn(&f, &k)? }),
        SymOp::Speed => {
            let spec = CurvatureFunctionSpec { base: f, p, phi: ScalarFn::default(), psi: ScalarFn::default() };
            spec.validate(k.len())?;
            let (value, grad) = spec.eval_with_grad(&k, 1.0, 1.0)?;
            serde_json::json!({ "function": spec.label(), "value": value, "grad": grad })
        }
    };
    to_json(&value)
}

fn read_sample(input: &Path, record: Option<usize>) -> Result<EmbeddedSample, CliError> {
    let file = fs::File::open(input).map_err(io_err(input))?;
    if input.extension().is_some_and(|e| e == "jsonl") {
        let trace = FlowTrace::read_jsonl(BufReader::new(file))?;
        let last = trace.records.len().saturating_sub(1);
        let i = record.unwrap_or(last);
        let rec = trace.records.get(i).ok_or_else(|| {
            CliError::Core(hflow::Error::Usage(format!("record {i} out of range, the trace has {} records", trace.records.len())))
        })?;
        return Ok(EmbeddedSample::from_shape(&rec.state)?);
    }
    let value: serde_json::Value = serde_json::from_reader(BufReader::new(file)).map_err(hflow::Error::from)?;
    if value.get("representation").is_some() {
        let shape: Shape = serde_json::from_value(value).map_err(hflow::Error::from)?;
        Ok(EmbeddedSample::from_shape(&shape)?)
    } else {
        Ok(serde_json::from_value(value).map_err(hflow::Error::from)?)
    }
}

#[derive(Serialize)]
struct DualOutput<'a> {
    dual: &'a EmbeddedSample,
    check: &'a DualCheck,
}

/// Transforms a profile state, embedded sample or trace record to its dual
/// and checks the result.
pub fn dual_cmd(input: &Path, record: Option<usize>, out: &Path, tol: f64, fd_tol: f64) -> Result<(String, u8), CliError> {
    let primal = read_sample(input, record)?;
    let d = dual(&primal)?;
    let check = check_dual(&primal, &d)?;
    write_file(out, &to_json(&DualOutput { dual: &d, check: &check })?)?;
    let pass = check.passes(tol, fd_tol);
    let text = format!(
        "dual in {}: reciprocal {:e}, finite-difference {:e}, orthogonality {:e}, normalization {:e}, future {}\n{}\n",
        d.ambient.kind,
        check.reciprocal,
        check.finite_difference,
        check.orthogonality,
        check.normalization,
        check.future,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok((text, exit(pass)))
}

/// Moser pair checks on a stored trace.
pub fn moser_cmd(trace_path: &Path, pairs: usize, seed: u64, out: &Path, tol_scale: f64) -> Result<(String, u8), CliError> {
    let file = fs::File::open(trace_path).map_err(io_err(trace_path))?;
    let trace = FlowTrace::read_jsonl(BufReader::new(file))?;
    let field = MoserField::new(&trace)?;
    let sample = random_pairs(&field, pairs, seed);
    let opts = MoserOptions { seed, tol: MoserOptions::default().tol * tol_scale, ..MoserOptions::default() };
    let rep = moser_check(&field, trace.meta.speed.p, &sample, &opts)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let json = out.join("moser.json");
    let f = fs::File::create(&json).map_err(io_err(&json))?;
    serde_json::to_writer_pretty(BufWriter::new(f), &rep).map_err(hflow::Error::from)?;
    write_file(&out.join("moser.csv"), &rep.to_csv(&trace.meta.grid))?;
    let text = format!(
        "{}: {} failures in {} pairs, polarization residual {:e}\n{}\n",
        rep.trace_id,
        rep.failures,
        rep.verdicts.len(),
        rep.polarization,
        if rep.passes() { "PASS" } else { "FAIL" }
    );
    Ok((text, exit(rep.passes())))
}
