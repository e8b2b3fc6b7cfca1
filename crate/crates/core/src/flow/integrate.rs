use serde::{Deserialize, Serialize};

use super::trace::{FlowTrace, Sampling, Shape, Termination, TraceMeta, TraceRecord};
use crate::ambient::{AmbientKind, AmbientSpec};
use crate::error::{usage, Error, Result};
use crate::shape::{speed_from_principal, warp};
use crate::symfun::CurvatureFunctionSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DtPolicy {
    /// A fixed step, still capped by the stability bound.
    Fixed { dt: f64 },
    /// `dt = safety · h² / stiffness`.
    Adaptive { safety: f64 },
    /// Second-order Runge–Kutta–Chebyshev steps of size `dt`, with the stage
    /// count chosen from the spectral radius `6 · stiffness / h²`.
    Chebyshev { dt: f64 },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Adaptive { safety: 0.2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Contracting,
    Expanding,
}

/// A flow `ẋ = −σ f ν` together with its numerical controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub ambient: AmbientSpec,
    pub speed: CurvatureFunctionSpec,
    /// Initial time of the data.
    pub t0: f64,
    /// Start of the Harnack clock; defaults to `t0`.
    #[serde(default)]
    pub clock_origin: Option<f64>,
    #[serde(default)]
    pub dt: DtPolicy,
    pub curvature_cap: f64,
    pub max_steps: usize,
}

impl FlowSpec {
    pub fn new(ambient: AmbientSpec, speed: CurvatureFunctionSpec) -> Self {
        FlowSpec {
            ambient,
            speed,
            t0: 0.01,
            clock_origin: None,
            dt: DtPolicy::default(),
            curvature_cap: 1e6,
            max_steps: 20_000_000,
        }
    }

    /// Sign of the speed decides whether the hypersurface moves inward.
    pub fn direction(&self) -> Direction {
        if self.speed.p > 0.0 {
            Direction::Contracting
        } else {
            Direction::Expanding
        }
    }

    pub fn clock_origin(&self) -> f64 {
        self.clock_origin.unwrap_or(self.t0)
    }

    pub fn validate(&self) -> Result<()> {
        self.speed.validate(self.ambient.n)?;
        if !self.ambient.kind.is_flat() && !(self.speed.phi.is_one() && self.speed.psi.is_const()) {
            return Err(usage("curved ambients need phi = 1 and a constant psi"));
        }
        let dt_ok = match self.dt {
            DtPolicy::Fixed { dt } | DtPolicy::Chebyshev { dt } => dt > 0.0 && dt.is_finite(),
            DtPolicy::Adaptive { safety } => safety > 0.0 && safety.is_finite(),
        };
        if !dt_ok {
            return Err(usage("the time step policy needs a positive finite parameter"));
        }
        if !self.t0.is_finite() {
            return Err(usage("t0 must be finite"));
        }
        if self.clock_origin() > self.t0 {
            return Err(usage("the Harnack clock cannot start after the data time"));
        }
        Ok(())
    }
}

/// Time derivative of the stored values: `ṡ = −σ f` for support functions,
/// `u̇ = −ε f w / φ` for warped-product graphs.
pub fn velocity(state: &Shape, speed: &CurvatureFunctionSpec) -> Result<Vec<f64>> {
    match state {
        Shape::Support(s) => {
            let pr = s.principal()?;
            let f = speed_from_principal(&pr, speed, &s.s)?;
            let sigma = s.ambient.sigma();
            Ok(f.into_iter().map(|v| -sigma * v).collect())
        }
        Shape::Profile(p) => {
            let pr = p.principal()?;
            let nodes = p.nodes()?;
            let f = speed_from_principal(&pr, speed, &p.rho)?;
            Ok(nodes
                .iter()
                .zip(f)
                .map(|(node, fv)| {
                    let (_, _, eps) = warp(p.ambient.kind, node.u);
                    -eps * fv * node.w / node.warp
                })
                .collect())
        }
    }
}

/// Largest coefficient of the second derivative in the linearized evolution.
pub fn stiffness(state: &Shape, speed: &CurvatureFunctionSpec) -> Result<f64> {
    let pr = state.principal()?;
    let weights: Vec<f64> = match state {
        Shape::Support(_) => vec![1.0; pr.kappa.len()],
        Shape::Profile(p) => p.nodes()?.iter().map(|n| 1.0 / (n.w * n.w)).collect(),
    };
    let mut worst = 0.0_f64;
    for (j, k) in pr.kappa.iter().enumerate() {
        let (_, grad) = speed.eval_with_grad(k, state.values()[j], pr.nu_axial[j])?;
        let weight: f64 = match state {
            Shape::Support(_) => grad.iter().zip(k.as_slice()).map(|(g, x)| g.abs() * x * x).sum(),
            Shape::Profile(_) => grad.iter().map(|g| g.abs()).sum::<f64>() * weights[j],
        };
        worst = worst.max(weight);
    }
    Ok(worst)
}

fn axpy(base: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    base.iter().zip(k).map(|(b, v)| b + h * v).collect()
}

/// One classical RK4 step of size `dt`.
pub fn step(state: &Shape, spec: &FlowSpec, dt: f64) -> Result<Shape> {
    let t = state.t();
    let y = state.values();
    let k1 = velocity(state, &spec.speed)?;
    let s2 = state.with_values(axpy(y, &k1, 0.5 * dt), t + 0.5 * dt);
    let k2 = velocity(&s2, &spec.speed)?;
    let s3 = state.with_values(axpy(y, &k2, 0.5 * dt), t + 0.5 * dt);
    let k3 = velocity(&s3, &spec.speed)?;
    let s4 = state.with_values(axpy(y, &k3, dt), t + dt);
    let k4 = velocity(&s4, &spec.speed)?;
    let next: Vec<f64> = (0..y.len())
        .map(|j| y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect();
    let out = state.with_values(next, t + dt);
    out.principal()?;
    Ok(out)
}

pub(crate) fn make_record(state: &Shape, speed: &CurvatureFunctionSpec) -> Result<TraceRecord> {
    let pr = state.principal()?;
    let f = speed_from_principal(&pr, speed, state.values())?;
    Ok(TraceRecord { t: state.t(), state: state.clone(), kappa: pr.kappa, f, rates: None })
}

pub(crate) fn trace_id(source: &str, ambient: &AmbientSpec, speed: &CurvatureFunctionSpec, len: usize) -> String {
    format!("{source}/{}-n{}/{}/{len}", ambient.kind, ambient.n, speed.label())
}

const MAX_STAGES: usize = 400;

fn spectral_radius(state: &Shape, spec: &FlowSpec) -> Result<f64> {
    let h = state.grid().spacing();
    Ok(6.0 * stiffness(state, &spec.speed)? / (h * h))
}

fn stable_dt(state: &Shape, spec: &FlowSpec) -> Result<f64> {
    let h = state.grid().spacing();
    let k = stiffness(state, &spec.speed)?;
    let bound = if k > 0.0 { 0.2 * h * h / k } else { f64::INFINITY };
    Ok(match spec.dt {
        DtPolicy::Adaptive { safety } => bound * safety / 0.2,
        DtPolicy::Fixed { dt } => dt.min(bound),
        DtPolicy::Chebyshev { dt } => {
            let rho = spectral_radius(state, spec)?;
            let s = (MAX_STAGES - 1) as f64;
            dt.min(0.9 * (s * s - 1.0) / (1.54 * rho))
        }
    })
}

fn chebyshev_stages(dt: f64, rho: f64) -> usize {
    (1 + (1.0 + 1.54 * dt * rho).sqrt() as usize).clamp(2, MAX_STAGES)
}

/// One damped second-order Runge–Kutta–Chebyshev step with `stages` stages.
pub fn chebyshev_step(state: &Shape, spec: &FlowSpec, dt: f64, stages: usize) -> Result<Shape> {
    let s = stages.max(2);
    let w0 = 1.0 + 2.0 / (13.0 * (s * s) as f64);
    // Chebyshev values T_j(w0), T_j'(w0), T_j''(w0) for j = 0..=s.
    let mut t = vec![1.0, w0];
    let mut dt1 = vec![0.0, 1.0];
    let mut dt2 = vec![0.0, 0.0];
    for j in 2..=s {
        t.push(2.0 * w0 * t[j - 1] - t[j - 2]);
        dt1.push(2.0 * t[j - 1] + 2.0 * w0 * dt1[j - 1] - dt1[j - 2]);
        dt2.push(4.0 * dt1[j - 1] + 2.0 * w0 * dt2[j - 1] - dt2[j - 2]);
    }
    let w1 = dt1[s] / dt2[s];
    let b: Vec<f64> = (0..=s).map(|j| { let j = j.max(2); dt2[j] / (dt1[j] * dt1[j]) }).collect();
    let a: Vec<f64> = (0..=s).map(|j| 1.0 - b[j] * t[j]).collect();
    let t0 = state.t();
    let y0 = state.values().to_vec();
    let f0 = velocity(state, &spec.speed)?;
    let mut prev2 = y0.clone();
    let mut prev = axpy(&y0, &f0, b[1] * w1 * dt);
    for j in 2..=s {
        let mu = 2.0 * b[j] * w0 / b[j - 1];
        let nu = -b[j] / b[j - 2];
        let mu_t = 2.0 * b[j] * w1 / b[j - 1];
        let gamma_t = -a[j - 1] * mu_t;
        let fj = velocity(&state.with_values(prev.clone(), t0), &spec.speed)?;
        let next: Vec<f64> = (0..y0.len())
            .map(|i| {
                (1.0 - mu - nu) * y0[i] + mu * prev[i] + nu * prev2[i] + mu_t * dt * fj[i] + gamma_t * dt * f0[i]
            })
            .collect();
        prev2 = std::mem::replace(&mut prev, next);
    }
    let out = state.with_values(prev, t0 + dt);
    out.principal()?;
    Ok(out)
}

fn advance(state: &Shape, spec: &FlowSpec, h: f64) -> Result<Shape> {
    match spec.dt {
        DtPolicy::Chebyshev { .. } => {
            let rho = spectral_radius(state, spec)?;
            chebyshev_step(state, spec, h, chebyshev_stages(h, rho))
        }
        _ => step(state, spec, h),
    }
}

/// Integrates from the initial state to `t_end`, recording at the sample
/// times. Stops early on curvature blow-up (`max κ > curvature_cap`) or
/// loss of convexity, keeping the last valid state.
pub fn integrate(spec: &FlowSpec, initial: Shape, t_end: f64, sampling: Sampling) -> Result<FlowTrace> {
    spec.validate()?;
    if initial.ambient() != spec.ambient {
        return Err(usage("initial state and flow live in different ambients"));
    }
    if matches!(spec.ambient.kind, AmbientKind::Euclidean | AmbientKind::Minkowski)
        != matches!(initial, Shape::Support(_))
    {
        return Err(usage("flat ambients use support states, curved ones use profiles"));
    }
    let start = initial.t();
    if t_end <= start {
        return Err(usage(format!("t_end = {t_end} must exceed the start time {start}")));
    }
    let origin = spec.clock_origin.unwrap_or(start);
    sampling.validate(start, origin)?;
    let mut records = vec![make_record(&initial, &spec.speed)?];
    let mut state = initial;
    let mut sample_index = 1;
    let mut steps = 0usize;
    let termination = loop {
        let t = state.t();
        if t >= t_end - 1e-12 * t_end.abs().max(1.0) {
            break Termination::Completed;
        }
        if steps >= spec.max_steps {
            break Termination::StepLimit { t };
        }
        let target = sampling.time(sample_index, start, origin).min(t_end);
        let mut dt = match stable_dt(&state, spec) {
            Ok(dt) => dt,
            Err(e) => break Termination::ConvexityLost { t, detail: e.to_string() },
        };
        let mut shrinks = 0;
        let next = loop {
            let h = dt.min(target - t);
            let attempt = advance(&state, spec, h).and_then(|s| {
                let allowed = stable_dt(&s, spec)?;
                if h > 2.0 * allowed && shrinks < 20 {
                    Err(Error::Invariant("step exceeds the stability bound".into()))
                } else {
                    Ok(s)
                }
            });
            match attempt {
                Ok(s) => break Ok((s, h)),
                Err(e) if shrinks < 20 => {
                    log::trace!("shrinking step at t = {t}: {e}");
                    shrinks += 1;
                    dt = 0.5 * h;
                }
                Err(e) => break Err(e),
            }
        };
        steps += 1;
        let (mut next, h) = match next {
            Ok(v) => v,
            Err(e) => break Termination::ConvexityLost { t, detail: e.to_string() },
        };
        let landed = (t + h - target).abs() <= 1e-12 * target.abs().max(1.0);
        if landed {
            next = next.with_values(next.values().to_vec(), target);
        }
        state = next;
        let record = make_record(&state, &spec.speed)?;
        let max_kappa = record.max_kappa();
        if landed {
            records.push(record);
            sample_index += 1;
        }
        if max_kappa > spec.curvature_cap {
            if !landed {
                records.push(make_record(&state, &spec.speed)?);
            }
            break Termination::BlowUp { t: state.t(), max_kappa };
        }
    };
    log::debug!("flow terminated after {steps} steps: {}", termination.label());
    let grid = records[0].state.grid().clone();
    Ok(FlowTrace {
        meta: TraceMeta {
            id: trace_id("pde", &spec.ambient, &spec.speed, grid.len()),
            source: "pde".into(),
            ambient: spec.ambient,
            speed: spec.speed.clone(),
            grid,
            clock_origin: origin,
            sampling,
            termination,
        },
        records,
    })
}
