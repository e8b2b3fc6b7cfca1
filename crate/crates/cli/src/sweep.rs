//! Cartesian parameter sweeps over `(p, nodes, dt)`.

use hflow::flow::DtPolicy;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{set_nodes, Experiment, Loaded, SweepSection};
use crate::run::{evaluate, RunOptions};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub p: f64,
    pub nodes: Option<usize>,
    pub dt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub cell: Cell,
    pub monitor: String,
    pub pass: bool,
    pub value: f64,
    /// `max(0, −value)`, the size of a negative excursion.
    pub excursion: f64,
    /// `log2` of the excursion ratio to the cell with twice the time step.
    pub order: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<Row>,
}

impl SweepTable {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,nodes,dt,monitor,pass,value,excursion,order,error\n");
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{:e},{:e},{},\"{}\"\n",
                r.cell.p,
                opt(r.cell.nodes.map(|n| n.to_string())),
                opt(r.cell.dt.map(|d| d.to_string())),
                r.monitor,
                r.pass,
                r.value,
                r.excursion,
                opt(r.order.map(|o| format!("{o:.3}"))),
                opt(r.error.clone()).replace('"', "'")
            ));
        }
        out
    }
}

/// The cells of the sweep, in row-major order `p`, `nodes`, `dt`.
pub fn cells(base: &Loaded, ranges: &SweepSection) -> Vec<Cell> {
    let cfg = &base.config;
    let ps = ranges.p.clone().unwrap_or_else(|| vec![cfg.speed.p]);
    let nodes: Vec<Option<usize>> = ranges.nodes.as_ref().map_or(vec![None], |v| v.iter().copied().map(Some).collect());
    let dts: Vec<Option<f64>> = ranges.dt.as_ref().map_or(vec![None], |v| v.iter().copied().map(Some).collect());
    let mut out = Vec::new();
    for &p in &ps {
        for &n in &nodes {
            for &dt in &dts {
                out.push(Cell { p, nodes: n, dt });
            }
        }
    }
    out
}

fn cell_config(base: &Loaded, cell: &Cell) -> Loaded {
    let mut loaded = base.clone();
    let cfg = &mut loaded.config;
    cfg.speed.p = cell.p;
    if let Some(n) = cell.nodes {
        cfg.initial.nodes = Some(n);
        if let Some(g) = cfg.initial.grid.as_mut() {
            set_nodes(g, n);
        }
    }
    // The stride keeps its ratio to the step, so that finite-difference rates
    // refine together with the integrator.
    if let Some(dt) = cell.dt {
        let (old, policy) = match cfg.time.dt {
            DtPolicy::Chebyshev { dt: old } => (Some(old), DtPolicy::Chebyshev { dt }),
            DtPolicy::Fixed { dt: old } => (Some(old), DtPolicy::Fixed { dt }),
            _ => (None, DtPolicy::Fixed { dt }),
        };
        let steps = match (old, cfg.time.stride) {
            (Some(old), Some(stride)) => (stride / old).round().max(1.0),
            _ => 1.0,
        };
        cfg.time.dt = policy;
        cfg.time.stride = Some(steps * dt);
    }
    loaded
}

fn run_cell(base: &Loaded, cell: Cell, opts: &RunOptions) -> Vec<Row> {
    let failed = |e: String| {
        vec![Row { cell, monitor: String::new(), pass: false, value: f64::NAN, excursion: f64::NAN, order: None, error: Some(e) }]
    };
    let exp = match Experiment::from_loaded(&cell_config(base, &cell)) {
        Ok(e) => e,
        Err(e) => return failed(e.to_string()),
    };
    let trace = match exp.trace() {
        Ok(t) => t,
        Err(e) => return failed(e.to_string()),
    };
    evaluate(&exp, &trace, opts)
        .monitors
        .into_iter()
        .map(|m| Row {
            cell,
            pass: m.pass,
            value: m.value,
            excursion: (-m.value).max(0.0),
            order: None,
            error: m.detail.strip_prefix("error: ").map(str::to_string),
            monitor: m.name,
        })
        .collect()
}

/// Runs every cell on the current rayon pool. Failing cells are recorded and
/// do not stop the sweep.
pub fn sweep(base: &Loaded, opts: &RunOptions) -> Result<SweepTable, CliError> {
    let ranges = base.config.sweep.clone().ok_or_else(|| base.error("sweep", "p", "the template has no [sweep] section"))?;
    for (key, bad) in [
        ("p", ranges.p.iter().flatten().any(|v| !v.is_finite())),
        ("dt", ranges.dt.iter().flatten().any(|v| !(v.is_finite() && *v > 0.0))),
    ] {
        if bad {
            return Err(base.error("sweep", key, "ranges must be finite (and dt positive)"));
        }
    }
    let rows: Vec<Row> = cells(base, &ranges).into_par_iter().flat_map_iter(|c| run_cell(base, c, opts)).collect();
    let mut table = SweepTable { rows };
    let snapshot = table.rows.clone();
    for r in table.rows.iter_mut() {
        let Some(dt) = r.cell.dt else { continue };
        let coarse = snapshot.iter().find(|o| {
            o.monitor == r.monitor && o.cell.p == r.cell.p && o.cell.nodes == r.cell.nodes && o.cell.dt == Some(2.0 * dt)
        });
        if let Some(c) = coarse {
            if c.excursion > 0.0 && r.excursion > 0.0 {
                r.order = Some((c.excursion / r.excursion).log2());
            }
        }
    }
    Ok(table)
}
