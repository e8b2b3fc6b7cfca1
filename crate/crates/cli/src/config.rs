//! Experiment configuration files.
//!
//! A configuration is a TOML document with the sections below. Unknown keys
//! are rejected. Numbers may be written as integers or floats.
//!
//! ```text
//! [experiment]            name, claim, seed (u64, default 0)
//! [ambient]               kind = euclidean | minkowski | sphere | hyperbolic | de_sitter, n
//! [speed]                 base = H | det^(1/n) | s<k> | q<k> | p<k> | inv(<base>), p,
//!                         phi, psi = { kind = "const", value = .. } | { kind = "exp", scale, rate }
//!                                  | { kind = "power", scale, exponent } | { kind = "table", x, y }
//! [initial]               catalog = <name>             exact solution (see `hflow catalog`)
//!                         family = round | ellipsoid | legendre | hyperboloid_bump | umbilic | bump
//!                         values = [..]                explicit samples on `grid`
//!                         grid = { kind = "circle", nodes } | { kind = "sphere_axisym", nodes, dim }
//!                              | { kind = "hyperbolic_radial", nodes, rho_max, dim }
//!                         nodes, value, axes, amplitude
//! [time]                  t0, t_end, stride, ratio, clock_origin,
//!                         dt = { kind = "adaptive", safety } | { kind = "fixed", dt } | { kind = "chebyshev", dt }
//! [monitors]              harnack = [standard | bonus | pseudo | p_minus_one | xcf], tol,
//!                         equality_tol, moser_pairs, polarization_tol, duality, duality_tol,
//!                         duality_fd_tol, xcf_metric, xcf_tol
//! [output]                dir, plots
//! [sweep]                 p = [..], nodes = [..], dt = [..]
//! ```

use std::path::Path;

use hflow::ambient::{AmbientKind, AmbientSpec};
use hflow::flow::{DtPolicy, FlowSpec, FlowTrace, Sampling, Shape, Termination, TraceMeta};
use hflow::harnack::{HarnackKind, HarnackSpec};
use hflow::shape::{Grid, ProfileState, SupportState};
use hflow::soliton::{ExactParams, CATALOG};
use hflow::symfun::{CurvatureFunctionSpec, ScalarFn, SymFn};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub ambient: AmbientSection,
    pub speed: SpeedSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub monitors: MonitorSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    /// The statement the experiment exercises.
    #[serde(default)]
    pub claim: String,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSection {
    pub kind: String,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedSection {
    pub base: String,
    pub p: f64,
    #[serde(default)]
    pub phi: ScalarFn,
    #[serde(default)]
    pub psi: ScalarFn,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub catalog: Option<String>,
    pub family: Option<String>,
    pub values: Option<Vec<f64>>,
    pub grid: Option<Grid>,
    pub nodes: Option<usize>,
    pub value: Option<f64>,
    pub axes: Option<Vec<f64>>,
    pub amplitude: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub t0: f64,
    pub t_end: f64,
    pub stride: Option<f64>,
    pub ratio: Option<f64>,
    pub clock_origin: Option<f64>,
    pub dt: DtPolicy,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection { t0: 0.01, t_end: 1.0, stride: None, ratio: None, clock_origin: None, dt: DtPolicy::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonitorSection {
    pub harnack: Vec<String>,
    pub tol: f64,
    pub equality_tol: Option<f64>,
    pub moser_pairs: usize,
    pub polarization_tol: f64,
    pub duality: bool,
    pub duality_tol: f64,
    pub duality_fd_tol: f64,
    pub xcf_metric: bool,
    pub xcf_tol: f64,
}

impl Default for MonitorSection {
    fn default() -> Self {
        MonitorSection {
            harnack: vec!["standard".into()],
            tol: 1e-3,
            equality_tol: None,
            moser_pairs: 0,
            polarization_tol: 1e-10,
            duality: false,
            duality_tol: 1e-8,
            duality_fd_tol: 1e-3,
            xcf_metric: false,
            xcf_tol: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into(), plots: true }
    }
}

/// Parameter ranges of a sweep. An absent key keeps the base value; an
/// empty list yields an empty sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub p: Option<Vec<f64>>,
    pub nodes: Option<Vec<usize>>,
    pub dt: Option<Vec<f64>>,
}

/// Line of `key` inside `[section]`, 1-based.
pub fn locate(src: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, line) in src.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

/// A parsed configuration together with its source text, for diagnostics.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub path: String,
    pub src: String,
    pub config: ExperimentConfig,
}

impl Loaded {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(&path.display().to_string(), &src)
    }

    pub fn parse(path: &str, src: &str) -> Result<Self, CliError> {
        let config = toml::from_str::<ExperimentConfig>(src).map_err(|e| {
            let line = e.span().map(|s| src[..s.start].matches('\n').count() + 1);
            CliError::Config { path: path.to_string(), line, key: String::new(), message: e.message().to_string() }
        })?;
        Ok(Loaded { path: path.to_string(), src: src.to_string(), config })
    }

    pub fn error(&self, section: &str, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            path: self.path.clone(),
            line: locate(&self.src, section, key),
            key: format!("{section}.{key}"),
            message: message.into(),
        }
    }
}

/// Where the trace comes from.
#[derive(Clone, Debug)]
pub enum Source {
    Exact { name: String, params: ExactParams },
    Pde { spec: FlowSpec, initial: Shape, t_end: f64, sampling: Sampling },
}

/// A validated experiment.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub ambient: AmbientSpec,
    pub speed: CurvatureFunctionSpec,
    pub monitors: Vec<HarnackKind>,
    pub source: Source,
}

impl Experiment {
    pub fn from_loaded(loaded: &Loaded) -> Result<Self, CliError> {
        let cfg = &loaded.config;
        let err = |section: &str, key: &str, msg: String| loaded.error(section, key, msg);
        let kind: AmbientKind = cfg.ambient.kind.parse().map_err(|e| err("ambient", "kind", format!("{e}")))?;
        let ambient = AmbientSpec::new(kind, cfg.ambient.n).map_err(|e| err("ambient", "n", format!("{e}")))?;
        let base: SymFn = cfg.speed.base.parse().map_err(|e| err("speed", "base", format!("{e}")))?;
        let speed = CurvatureFunctionSpec { base, p: cfg.speed.p, phi: cfg.speed.phi.clone(), psi: cfg.speed.psi.clone() };
        if cfg.speed.p == 0.0 || !cfg.speed.p.is_finite() {
            return Err(err("speed", "p", "p must be finite and nonzero".into()));
        }
        speed.validate(ambient.n).map_err(|e| err("speed", "base", format!("{e}")))?;

        let mut monitors = Vec::new();
        for name in &cfg.monitors.harnack {
            monitors.push(name.parse::<HarnackKind>().map_err(|e| err("monitors", "harnack", format!("{e}")))?);
        }
        let m = &cfg.monitors;
        for (key, v) in [("tol", m.tol), ("polarization_tol", m.polarization_tol), ("duality_tol", m.duality_tol), ("duality_fd_tol", m.duality_fd_tol), ("xcf_tol", m.xcf_tol)] {
            if !(v >= 0.0) {
                return Err(err("monitors", key, format!("tolerance must be nonnegative, got {v}")));
            }
        }

        let t = &cfg.time;
        if !(t.t_end > t.t0) || !t.t0.is_finite() || !t.t_end.is_finite() {
            return Err(err("time", "t_end", format!("need t0 < t_end, got [{}, {}]", t.t0, t.t_end)));
        }
        let source = resolve_source(loaded, ambient, &speed)?;

        let grid = match &source {
            Source::Exact { params, .. } => match ambient.kind {
                AmbientKind::Euclidean if ambient.n == 1 => Grid::Circle { nodes: params.nodes.max(8) },
                AmbientKind::Minkowski => Grid::HyperbolicRadial { nodes: params.nodes, rho_max: 2.0, dim: ambient.n },
                _ => Grid::SphereAxisym { nodes: params.nodes, dim: ambient.n },
            },
            Source::Pde { initial, .. } => initial.grid().clone(),
        };
        let clock_origin = match &source {
            Source::Exact { .. } => 0.0,
            Source::Pde { spec, .. } => spec.clock_origin(),
        };
        let stub = FlowTrace {
            meta: TraceMeta {
                id: String::new(),
                source: String::new(),
                ambient,
                speed: speed.clone(),
                grid,
                clock_origin,
                sampling: Sampling::Uniform { stride: 1.0 },
                termination: Termination::Completed,
            },
            records: Vec::new(),
        };
        for kind in &monitors {
            HarnackSpec::for_trace(*kind, &stub).validate(&stub).map_err(|e| {
                let key = if kind == &HarnackKind::Xcf { "harnack" } else { "p" };
                let section = if key == "p" { "speed" } else { "monitors" };
                err(section, key, format!("{kind} monitor: {e}"))
            })?;
        }
        if m.xcf_metric {
            hflow::xcf::check_xcf_trace(&stub).map_err(|e| err("monitors", "xcf_metric", format!("{e}")))?;
        }
        if m.duality && kind.is_flat() {
            return Err(err("monitors", "duality", "duals are defined in curved space forms".into()));
        }
        if m.moser_pairs > 0 && !(speed.p > -1.0) {
            return Err(err("monitors", "moser_pairs", format!("the Moser comparison needs p > -1, got {}", speed.p)));
        }
        Ok(Experiment { config: cfg.clone(), ambient, speed, monitors, source })
    }

    pub fn trace(&self) -> hflow::Result<FlowTrace> {
        match &self.source {
            Source::Exact { name, params } => hflow::soliton::exact_trace(name, params),
            Source::Pde { spec, initial, t_end, sampling } => hflow::flow::integrate(spec, initial.clone(), *t_end, sampling.clone()),
        }
    }
}

fn resolve_source(loaded: &Loaded, ambient: AmbientSpec, speed: &CurvatureFunctionSpec) -> Result<Source, CliError> {
    let cfg = &loaded.config;
    let init = &cfg.initial;
    let t = &cfg.time;
    let err = |key: &str, msg: String| loaded.error("initial", key, msg);
    let given = [init.catalog.is_some(), init.family.is_some(), init.values.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(err("catalog", "give exactly one of `catalog`, `family` or `values`".into()));
    }
    if let Some(name) = &init.catalog {
        let (_, kind, _) = CATALOG
            .iter()
            .find(|(n, _, _)| n == name)
            .ok_or_else(|| err("catalog", format!("unknown catalog entry `{name}`")))?;
        if *kind != ambient.kind {
            return Err(err("catalog", format!("`{name}` lives in {kind}, not {}", ambient.kind)));
        }
        let mut params = ExactParams::new(name, ambient.n, speed.clone()).map_err(|e| err("catalog", format!("{e}")))?;
        if init.value.is_some() {
            params.value = init.value;
        }
        if let Some(nodes) = init.nodes {
            params.nodes = nodes;
        }
        params.t_start = t.t0;
        params.t_end = t.t_end;
        if let Some(r) = t.ratio {
            params.ratio = r;
        }
        if !(params.t_start > 0.0 && params.ratio > 1.0) {
            return Err(loaded.error("time", "ratio", "exact traces need t0 > 0 and ratio > 1"));
        }
        return Ok(Source::Exact { name: name.clone(), params });
    }

    let n = ambient.n;
    let nodes = init.nodes.unwrap_or(64);
    let grid = match &init.grid {
        Some(g) => {
            let mut g = g.clone();
            if let Some(k) = init.nodes {
                set_nodes(&mut g, k);
            }
            g
        }
        None => match ambient.kind {
            AmbientKind::Euclidean if n == 1 => Grid::Circle { nodes },
            AmbientKind::Minkowski => Grid::HyperbolicRadial { nodes, rho_max: 2.0, dim: n },
            _ => Grid::SphereAxisym { nodes, dim: n },
        },
    };
    grid.validate().map_err(|e| err("grid", format!("{e}")))?;
    let value = init.value.unwrap_or(1.0);
    let amp = init.amplitude.unwrap_or(0.0);
    let initial = if let Some(values) = &init.values {
        if ambient.kind.is_flat() {
            Shape::Support(SupportState::new(ambient, grid, values.clone(), t.t0).map_err(|e| err("values", format!("{e}")))?)
        } else {
            Shape::Profile(ProfileState::new(ambient, grid, values.clone(), t.t0).map_err(|e| err("values", format!("{e}")))?)
        }
    } else {
        let family = init.family.as_deref().unwrap_or_default();
        let shape = match (family, ambient.kind) {
            ("round", AmbientKind::Euclidean | AmbientKind::Minkowski) => {
                SupportState::round(ambient, grid, value, t.t0).map(Shape::Support)
            }
            ("ellipsoid", AmbientKind::Euclidean) => {
                let axes = init.axes.clone().unwrap_or_else(|| vec![1.0; n + 1]);
                if axes.len() != n + 1 || axes.iter().any(|a| !(*a > 0.0)) {
                    return Err(err("axes", format!("need {} positive semi-axes", n + 1)));
                }
                SupportState::from_normal_fn(ambient, grid, t.t0, |z| {
                    z.iter().zip(&axes).map(|(zi, a)| a * a * zi * zi).sum::<f64>().sqrt()
                })
                .map(Shape::Support)
            }
            ("legendre", AmbientKind::Euclidean) => SupportState::from_normal_fn(ambient, grid, t.t0, |z| {
                let c = z[z.len() - 1];
                let mode = if n == 1 { 2.0 * c * c - 1.0 } else { 0.5 * (3.0 * c * c - 1.0) };
                value * (1.0 + amp * mode)
            })
            .map(Shape::Support),
            ("hyperboloid_bump", AmbientKind::Minkowski) => {
                SupportState::from_normal_fn(ambient, grid, t.t0, |z| value * (1.0 + amp / (z[0] * z[0]))).map(Shape::Support)
            }
            ("umbilic" | "bump", AmbientKind::Sphere | AmbientKind::Hyperbolic | AmbientKind::DeSitter) => {
                let Grid::SphereAxisym { nodes, .. } = grid else {
                    return Err(err("grid", "profiles need an axisymmetric grid".into()));
                };
                ProfileState::from_fn(ambient, nodes, t.t0, |th| value + amp * (2.0 * th).cos()).map(Shape::Profile)
            }
            (other, kind) => return Err(err("family", format!("no family `{other}` in {kind}"))),
        };
        shape.map_err(|e| err("family", format!("{e}")))?
    };

    let mut spec = FlowSpec::new(ambient, speed.clone());
    spec.t0 = t.t0;
    spec.clock_origin = t.clock_origin;
    spec.dt = t.dt.clone();
    spec.validate().map_err(|e| loaded.error("time", "dt", format!("{e}")))?;
    let stride = t.stride.unwrap_or((t.t_end - t.t0) / 40.0);
    if !(stride > 0.0) {
        return Err(loaded.error("time", "stride", "stride must be positive"));
    }
    Ok(Source::Pde { spec, initial, t_end: t.t_end, sampling: Sampling::Uniform { stride } })
}

pub fn set_nodes(grid: &mut Grid, k: usize) {
    match grid {
        Grid::Circle { nodes } | Grid::SphereAxisym { nodes, .. } | Grid::HyperbolicRadial { nodes, .. } => *nodes = k,
        Grid::SphereLatLong { n_theta, .. } => *n_theta = k,
    }
}
