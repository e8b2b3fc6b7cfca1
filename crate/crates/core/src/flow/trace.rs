use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::ambient::AmbientSpec;
use crate::error::{usage, Error, Result};
use crate::shape::{
    curvature_from_profile, curvature_from_support, CurvatureField, Grid, Principal, ProfileState,
    SupportState,
};
use crate::symfun::{CurvatureFunctionSpec, Kappa};

/// A discrete hypersurface of either representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "representation", rename_all = "snake_case")]
pub enum Shape {
    Support(SupportState),
    Profile(ProfileState),
}

impl Shape {
    pub fn ambient(&self) -> AmbientSpec {
        match self {
            Shape::Support(s) => s.ambient,
            Shape::Profile(p) => p.ambient,
        }
    }

    pub fn grid(&self) -> &Grid {
        match self {
            Shape::Support(s) => &s.grid,
            Shape::Profile(p) => &p.grid,
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            Shape::Support(s) => s.t,
            Shape::Profile(p) => p.t,
        }
    }

    /// Support values or graph values.
    pub fn values(&self) -> &[f64] {
        match self {
            Shape::Support(s) => &s.s,
            Shape::Profile(p) => &p.rho,
        }
    }

    pub fn with_values(&self, values: Vec<f64>, t: f64) -> Shape {
        match self {
            Shape::Support(s) => Shape::Support(s.with_values(values, t)),
            Shape::Profile(p) => Shape::Profile(p.with_values(values, t)),
        }
    }

    pub fn principal(&self) -> Result<Principal> {
        match self {
            Shape::Support(s) => s.principal(),
            Shape::Profile(p) => p.principal(),
        }
    }

    pub fn curvature(&self) -> Result<CurvatureField> {
        match self {
            Shape::Support(s) => curvature_from_support(s),
            Shape::Profile(p) => curvature_from_profile(p),
        }
    }
}

/// How sample times are laid out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampling {
    /// Every `stride` time units from the start.
    Uniform { stride: f64 },
    /// Times `origin + (start − origin) · ratio^k`.
    Geometric { ratio: f64 },
}

impl Sampling {
    pub(crate) fn time(&self, k: usize, start: f64, origin: f64) -> f64 {
        match *self {
            Sampling::Uniform { stride } => start + k as f64 * stride,
            Sampling::Geometric { ratio } => origin + (start - origin) * ratio.powi(k as i32),
        }
    }

    pub(crate) fn validate(&self, start: f64, origin: f64) -> Result<()> {
        match *self {
            Sampling::Uniform { stride } if !(stride > 0.0) => Err(usage("sampling stride must be positive")),
            Sampling::Geometric { ratio } if !(ratio > 1.0) || start <= origin => {
                Err(usage("geometric sampling needs ratio > 1 and a start after the clock origin"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowUp { t: f64, max_kappa: f64 },
    ConvexityLost { t: f64, detail: String },
    StepLimit { t: f64 },
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::BlowUp { .. } => "blow-up",
            Termination::ConvexityLost { .. } => "convexity-lost",
            Termination::StepLimit { .. } => "step-limit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub id: String,
    /// `pde` or `exact:<catalog name>`.
    pub source: String,
    pub ambient: AmbientSpec,
    pub speed: CurvatureFunctionSpec,
    pub grid: Grid,
    /// Time at which the flow is taken to start; Harnack quantities use `t − clock_origin`.
    pub clock_origin: f64,
    pub sampling: Sampling,
    pub termination: Termination,
}

/// Exact time derivatives, available on traces generated from closed forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    /// Derivative of the stored support or graph values.
    pub values: Vec<f64>,
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub state: Shape,
    pub kappa: Vec<Kappa>,
    pub f: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Rates>,
}

impl TraceRecord {
    pub fn max_kappa(&self) -> f64 {
        self.kappa.iter().map(Kappa::max).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_kappa(&self) -> f64 {
        self.kappa.iter().map(Kappa::min).fold(f64::INFINITY, f64::min)
    }
}

/// Time-ordered samples of a flow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub meta: TraceMeta,
    pub records: Vec<TraceRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header(TraceMeta),
    Record(TraceRecord),
}

impl FlowTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// Harnack clock `t − clock_origin` of record `i`.
    pub fn clock(&self, i: usize) -> f64 {
        self.records[i].t - self.meta.clock_origin
    }

    /// Writes the header line followed by one JSON object per record.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer(&mut out, &Line::Header(self.meta.clone()))?;
        out.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut out, &Line::Record(r.clone()))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut meta = None;
        let mut records = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Line>(&line)
                .map_err(|e| usage(format!("trace line {}: {e}", i + 1)))?
            {
                Line::Header(m) if meta.is_none() => meta = Some(m),
                Line::Header(_) => return Err(usage(format!("trace line {}: second header", i + 1))),
                Line::Record(r) => records.push(r),
            }
        }
        let meta = meta.ok_or_else(|| usage("trace has no header line"))?;
        Ok(FlowTrace { meta, records })
    }

    /// Time derivative of a per-node series at record `i`, using the
    /// Lagrange interpolant through up to five records centred at `i`.
    /// Returns `None` at the ends of the trace.
    pub fn time_derivative(&self, i: usize, series: &[Vec<f64>]) -> Option<Vec<f64>> {
        let times = self.times();
        let weights = centred_weights(&times, i)?;
        let nodes = series[i].len();
        Some(
            (0..nodes)
                .map(|j| weights.iter().map(|(k, w)| w * series[*k][j]).sum())
                .collect(),
        )
    }

    /// `∂_t f` at record `i`, exact when the record carries rates.
    pub fn speed_rate(&self, i: usize) -> Option<Vec<f64>> {
        if let Some(r) = &self.records[i].rates {
            return Some(r.f.clone());
        }
        let series: Vec<Vec<f64>> = self.records.iter().map(|r| r.f.clone()).collect();
        self.time_derivative(i, &series)
    }

    /// Time derivative of the stored support or graph values at record `i`.
    pub fn value_rate(&self, i: usize) -> Option<Vec<f64>> {
        if let Some(r) = &self.records[i].rates {
            return Some(r.values.clone());
        }
        let series: Vec<Vec<f64>> = self.records.iter().map(|r| r.state.values().to_vec()).collect();
        self.time_derivative(i, &series)
    }

    /// The Harnack quantity `u = ∂_t ln|f|` per node at record `i`; in the
    /// Gauss-map parameterization it equals the standard quantity
    /// `(ḟ − b(∇f, ∇f))/f`.
    pub fn u_field(&self, i: usize) -> Result<Vec<f64>> {
        if i >= self.records.len() {
            return Err(usage(format!("record {i} out of range")));
        }
        let sign = self.records[i].f[0].signum();
        for r in &self.records {
            if r.f.iter().any(|v| v.signum() != sign || *v == 0.0) {
                return Err(Error::Invariant(format!("speed changes sign at t = {}", r.t)));
            }
        }
        let rate = self
            .speed_rate(i)
            .ok_or_else(|| usage(format!("record {i} has no time neighbours on both sides")))?;
        Ok(rate.iter().zip(&self.records[i].f).map(|(d, f)| d / f).collect())
    }
}

/// Derivative weights at `times[i]` from the centred stencil of up to five points.
pub(crate) fn centred_weights(times: &[f64], i: usize) -> Option<Vec<(usize, f64)>> {
    let n = times.len();
    let half = [2usize, 1]
        .into_iter()
        .find(|&h| i >= h && i + h < n)?;
    let idx: Vec<usize> = (i - half..=i + half).collect();
    let x0 = times[i];
    let pts: Vec<f64> = idx.iter().map(|&k| times[k]).collect();
    let weights = idx
        .iter()
        .enumerate()
        .map(|(a, &k)| (k, lagrange_derivative_weight(&pts, a, x0)))
        .collect();
    Some(weights)
}

/// `L_a'(x)` for the Lagrange basis polynomial of node `a`.
fn lagrange_derivative_weight(pts: &[f64], a: usize, x: f64) -> f64 {
    let mut total = 0.0;
    for m in 0..pts.len() {
        if m == a {
            continue;
        }
        let mut term = 1.0 / (pts[a] - pts[m]);
        for (l, &p) in pts.iter().enumerate() {
            if l != a && l != m {
                term *= (x - p) / (pts[a] - p);
            }
        }
        total += term;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_exact_for_quartics() {
        let times = [0.1, 0.13, 0.2, 0.24, 0.33, 0.4];
        let p = |t: f64| 3.0 * t.powi(4) - t * t + 2.0;
        let dp = |t: f64| 12.0 * t.powi(3) - 2.0 * t;
        for i in 1..5 {
            let w = centred_weights(&times, i).unwrap();
            let d: f64 = w.iter().map(|(k, c)| c * p(times[*k])).sum();
            if w.len() == 5 {
                assert!((d - dp(times[i])).abs() < 1e-10);
            }
        }
        assert!(centred_weights(&times, 0).is_none());
    }
}
