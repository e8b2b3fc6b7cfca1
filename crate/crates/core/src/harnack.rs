//! Harnack-type quantities evaluated along flow traces.

use serde::{Deserialize, Serialize};

use crate::ambient::AmbientKind;
use crate::error::{domain, usage, Error, Result};
use crate::flow::{FlowTrace, Shape};
use crate::shape::{warp, Grid};
use crate::symfun::SymFn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarnackKind {
    Standard,
    Bonus,
    Pseudo,
    PMinusOne,
    Xcf,
}

impl std::fmt::Display for HarnackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HarnackKind::Standard => "standard",
            HarnackKind::Bonus => "bonus",
            HarnackKind::Pseudo => "pseudo",
            HarnackKind::PMinusOne => "p_minus_one",
            HarnackKind::Xcf => "xcf",
        })
    }
}

impl std::str::FromStr for HarnackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "standard" => HarnackKind::Standard,
            "bonus" => HarnackKind::Bonus,
            "pseudo" => HarnackKind::Pseudo,
            "p_minus_one" => HarnackKind::PMinusOne,
            "xcf" => HarnackKind::Xcf,
            _ => return Err(Error::UnknownName(s.to_string())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackSpec {
    pub kind: HarnackKind,
    pub p: f64,
    /// Coefficient of the bonus term; zero for every other kind.
    pub beta: f64,
}

impl HarnackSpec {
    /// The monitor matching a trace: `p` is taken from the speed and `β`
    /// from the ambient.
    pub fn for_trace(kind: HarnackKind, trace: &FlowTrace) -> Self {
        let beta = match kind {
            HarnackKind::Bonus => bonus_beta(trace),
            _ => 0.0,
        };
        HarnackSpec { kind, p: trace.meta.speed.p, beta }
    }

    /// Checks the kind against the hypotheses of the matching theorem.
    pub fn validate(&self, trace: &FlowTrace) -> Result<()> {
        let kind = trace.meta.ambient.kind;
        let speed = &trace.meta.speed;
        match self.kind {
            HarnackKind::Standard => {
                if self.p == 0.0 || self.p == -1.0 {
                    return Err(usage("the standard Harnack quantity needs p != 0, -1"));
                }
                if kind == AmbientKind::Hyperbolic {
                    return Err(usage("no standard Harnack inequality is available in hyperbolic space"));
                }
            }
            HarnackKind::Bonus => {
                if kind != AmbientKind::Sphere {
                    return Err(usage("the bonus term is monitored on the round sphere"));
                }
                if speed.base != SymFn::Mean || speed.p != 1.0 || !speed.is_isotropic() {
                    return Err(usage("the bonus term needs mean curvature flow"));
                }
            }
            HarnackKind::Pseudo => {
                if !matches!(kind, AmbientKind::Sphere | AmbientKind::Hyperbolic) {
                    return Err(usage("the pseudo-Harnack inequality lives in the sphere or hyperbolic space"));
                }
                if !(-1.0..0.0).contains(&speed.p) {
                    return Err(usage("the pseudo-Harnack inequality needs -1 <= p < 0"));
                }
            }
            HarnackKind::PMinusOne => {
                if !kind.is_flat() || speed.p != -1.0 || !speed.phi.is_one() {
                    return Err(usage("the p = -1 monotonicity needs a flat ambient, p = -1 and phi = 1"));
                }
            }
            HarnackKind::Xcf => crate::xcf::check_xcf_trace(trace)?,
        }
        Ok(())
    }
}

/// `R̄/(n+1) = n K_N` for the space form of the trace.
pub fn bonus_beta(trace: &FlowTrace) -> f64 {
    let amb = trace.meta.ambient;
    amb.n as f64 * amb.k_n()
}

/// One record of a Harnack field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhsRecord {
    pub index: usize,
    pub t: f64,
    /// `t − clock_origin`.
    pub clock: f64,
    pub values: Vec<f64>,
}

/// Per-node time derivative of a field together with the first-order data
/// needed to move it to the standard parameterization.
pub(crate) struct Kinematics {
    pub f: Vec<f64>,
    /// `∂_t f` in the parameterization of the trace.
    pub f_t: Vec<f64>,
    /// Derivative along the grid coordinate.
    pub f_x: Vec<f64>,
    /// `h(∂_x, ∂_x)`.
    pub h_xx: Vec<f64>,
    /// Coordinate velocity of the trace parameterization relative to the
    /// normal flow, so a path `x(t)` has standard velocity `ẋ + drift`.
    pub drift: Vec<f64>,
}

fn is_one_dimensional(grid: &Grid) -> bool {
    !matches!(grid, Grid::SphereLatLong { .. })
}

/// Kinematic data of the speed at record `i` on one-dimensional grids;
/// `None` at the ends of a trace without exact rates.
pub(crate) fn kinematics(trace: &FlowTrace, i: usize) -> Result<Option<Kinematics>> {
    let grid = &trace.meta.grid;
    if !is_one_dimensional(grid) {
        return Err(Error::Unsupported("spatial Harnack data on the lat-long grid".into()));
    }
    let Some(f_t) = trace.speed_rate(i) else { return Ok(None) };
    let f = trace.records[i].f.clone();
    let (f_x, _) = grid.derivatives_1d(&f);
    let (h_xx, drift) = match &trace.records[i].state {
        Shape::Support(s) => {
            let forms = s.radii_forms();
            let h: Vec<f64> = forms.iter().map(|m| m[(0, 0)]).collect();
            let drift = f_x.iter().zip(&h).map(|(d, hh)| -d / hh).collect();
            (h, drift)
        }
        Shape::Profile(p) => {
            let nodes = p.nodes()?;
            let Some(u_t) = trace.value_rate(i) else { return Ok(None) };
            let h = nodes.iter().map(|nd| nd.kappa_mer * nd.w * nd.w).collect();
            let drift = nodes
                .iter()
                .zip(&u_t)
                .map(|(nd, ut)| {
                    let (_, _, eps) = warp(p.ambient.kind, nd.u);
                    eps * ut * nd.du / (nd.w * nd.w)
                })
                .collect();
            (h, drift)
        }
    };
    Ok(Some(Kinematics { f, f_t, f_x, h_xx, drift }))
}

impl Kinematics {
    /// `∂_t f` along the normal flow.
    pub fn normal_rate(&self) -> Vec<f64> {
        (0..self.f.len()).map(|j| self.f_t[j] - self.drift[j] * self.f_x[j]).collect()
    }

    /// `∂_t f − b(∇f, ∇f)` along the normal flow.
    pub fn standard_rate(&self) -> Vec<f64> {
        self.normal_rate()
            .iter()
            .enumerate()
            .map(|(j, r)| r - self.f_x[j] * self.f_x[j] / self.h_xx[j])
            .collect()
    }
}

/// `∂_t f − b(∇f, ∇f)` at record `i`. Support traces are parameterized by
/// the Gauss map, where this is the plain time derivative of `f`.
pub(crate) fn standard_rate(trace: &FlowTrace, i: usize) -> Result<Option<Vec<f64>>> {
    match trace.records[i].state {
        Shape::Support(_) => Ok(trace.speed_rate(i)),
        Shape::Profile(_) => Ok(kinematics(trace, i)?.map(|k| k.standard_rate())),
    }
}

fn clock(trace: &FlowTrace, i: usize) -> Result<f64> {
    let tau = trace.clock(i);
    if tau <= 0.0 {
        return Err(domain(format!("Harnack clock t = {tau} is not positive")));
    }
    Ok(tau)
}

fn field(
    trace: &FlowTrace,
    mut rate: impl FnMut(usize) -> Result<Option<Vec<f64>>>,
    combine: impl Fn(f64, f64, f64) -> f64,
) -> Result<Vec<LhsRecord>> {
    let mut out = Vec::new();
    for i in 0..trace.len() {
        let Some(r) = rate(i)? else { continue };
        let tau = clock(trace, i)?;
        let values = r.iter().enumerate().map(|(j, &rj)| combine(rj, tau, trace.records[i].f[j])).collect();
        out.push(LhsRecord { index: i, t: trace.records[i].t, clock: tau, values });
    }
    Ok(out)
}

/// `∂_t f − b(∇f, ∇f) + p f / ((p+1) t)` per node on every record with time
/// neighbours on both sides.
pub fn standard_lhs(trace: &FlowTrace, p: f64) -> Result<Vec<LhsRecord>> {
    if p == 0.0 || p == -1.0 {
        return Err(usage("the standard Harnack quantity needs p != 0, -1"));
    }
    let c = p / (p + 1.0);
    field(trace, |i| standard_rate(trace, i), |r, tau, f| r + c / tau * f)
}

/// `∂_t H − b(∇H, ∇H) − β H + H / (2t)` with `β = n K_N`.
pub fn bonus_lhs(trace: &FlowTrace) -> Result<Vec<LhsRecord>> {
    HarnackSpec::for_trace(HarnackKind::Bonus, trace).validate(trace)?;
    bonus_lhs_with(trace, bonus_beta(trace))
}

/// The bonus monitor with an explicit coefficient.
pub fn bonus_lhs_with(trace: &FlowTrace, beta: f64) -> Result<Vec<LhsRecord>> {
    field(trace, |i| standard_rate(trace, i), |r, tau, f| r - beta * f + f / (2.0 * tau))
}

/// `∂_t F^p + p F^p / ((p−1) t)` along the normal flow, where `F^p = |f|`.
pub fn pseudo_lhs(trace: &FlowTrace) -> Result<Vec<LhsRecord>> {
    HarnackSpec::for_trace(HarnackKind::Pseudo, trace).validate(trace)?;
    let p = trace.meta.speed.p;
    let c = p / (p - 1.0);
    let rate = |i: usize| Ok(kinematics(trace, i)?.map(|k| k.normal_rate()));
    field(trace, rate, |r, tau, f| f.signum() * r + c / tau * f.abs())
}

/// Spatial extremes of the standard quantity `(∂_t f − b(∇f, ∇f))/f` over time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub times: Vec<f64>,
    pub inf: Vec<f64>,
    pub sup: Vec<f64>,
    /// Largest decrease rate of `inf u` between consecutive samples (0 if none).
    pub worst_inf_drop: f64,
    /// Largest increase rate of `sup u` between consecutive samples (0 if none).
    pub worst_sup_rise: f64,
}

impl Monotonicity {
    pub fn inf_nondecreasing(&self, tol: f64) -> bool {
        self.worst_inf_drop <= tol
    }

    pub fn sup_nonincreasing(&self, tol: f64) -> bool {
        self.worst_sup_rise <= tol
    }
}

/// Time series of `inf u` and `sup u` over the interior nodes.
pub fn p_minus_one_monotonicity(trace: &FlowTrace) -> Result<Monotonicity> {
    HarnackSpec::for_trace(HarnackKind::PMinusOne, trace).validate(trace)?;
    let u = u_records(trace)?;
    let interior = trace.meta.grid.interior();
    let mut out = Monotonicity { times: vec![], inf: vec![], sup: vec![], worst_inf_drop: 0.0, worst_sup_rise: 0.0 };
    for rec in &u {
        let vals = interior.iter().map(|&j| rec.values[j]);
        out.times.push(rec.t);
        out.inf.push(vals.clone().fold(f64::INFINITY, f64::min));
        out.sup.push(vals.fold(f64::NEG_INFINITY, f64::max));
    }
    for k in 1..out.times.len() {
        let dt = out.times[k] - out.times[k - 1];
        out.worst_inf_drop = out.worst_inf_drop.max((out.inf[k - 1] - out.inf[k]) / dt);
        out.worst_sup_rise = out.worst_sup_rise.max((out.sup[k] - out.sup[k - 1]) / dt);
    }
    Ok(out)
}

/// The standard quantity `u = (∂_t f − b(∇f, ∇f))/f` per node.
pub fn u_records(trace: &FlowTrace) -> Result<Vec<LhsRecord>> {
    let mut out = Vec::new();
    for i in 0..trace.len() {
        let Some(r) = standard_rate(trace, i)? else { continue };
        let f = &trace.records[i].f;
        if f.iter().any(|v| v.signum() != f[0].signum() || *v == 0.0) {
            return Err(Error::Invariant(format!("speed changes sign at t = {}", trace.records[i].t)));
        }
        let values = r.iter().zip(f).map(|(a, b)| a / b).collect();
        out.push(LhsRecord { index: i, t: trace.records[i].t, clock: trace.clock(i), values });
    }
    Ok(out)
}

/// Hypotheses of the theorems, evaluated on one record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub convex: bool,
    /// `0 < κ_i ≤ 1` in de Sitter space.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_le_one: Option<bool>,
    /// `κ_i > 1` in hyperbolic space.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horoconvex: Option<bool>,
}

impl HypothesisFlags {
    pub fn passes(&self) -> bool {
        self.convex && self.kappa_le_one != Some(false) && self.horoconvex != Some(false)
    }
}

const FLAG_TOL: f64 = 1e-9;

pub fn hypothesis_flags(trace: &FlowTrace, i: usize) -> HypothesisFlags {
    let rec = &trace.records[i];
    let interior = trace.meta.grid.interior();
    let (lo, hi) = interior.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &j| {
        (lo.min(rec.kappa[j].min()), hi.max(rec.kappa[j].max()))
    });
    let kind = trace.meta.ambient.kind;
    HypothesisFlags {
        convex: lo > 0.0,
        kappa_le_one: (kind == AmbientKind::DeSitter).then_some(hi <= 1.0 + FLAG_TOL),
        horoconvex: (kind == AmbientKind::Hyperbolic).then_some(lo > 1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub index: usize,
    pub t: f64,
    pub min_lhs: f64,
    pub argmin_node: usize,
    pub max_abs_lhs: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    NoAdmissibleSamples,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub index: usize,
    pub t: f64,
    pub flags: HypothesisFlags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackReport {
    pub spec: HarnackSpec,
    pub trace_id: String,
    pub termination: String,
    pub status: ReportStatus,
    /// `+1` if the inequality reads `lhs ≥ 0`, `−1` if it is reversed.
    pub orientation: f64,
    pub min_lhs: f64,
    pub max_lhs: f64,
    /// `(record, node, t)` of the smallest value of `orientation · lhs`.
    pub argmin: Option<(usize, usize, f64)>,
    /// `min orientation · lhs`; negative values are violations.
    pub margin: f64,
    /// `max |lhs|`, the distance from equality.
    pub equality_gap: f64,
    pub samples: usize,
    pub records: Vec<RecordSummary>,
    pub excluded: Vec<Exclusion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotonicity: Option<Monotonicity>,
}

impl HarnackReport {
    /// True when every admissible sample satisfies the inequality up to `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        if self.status != ReportStatus::Ok {
            return false;
        }
        match &self.monotonicity {
            Some(m) => m.inf_nondecreasing(tol),
            None => self.margin >= -tol,
        }
    }

    /// `t,min_lhs,argmin_node` per record.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("t,min_lhs,argmin_node\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.t, r.min_lhs, r.argmin_node));
        }
        out
    }
}

/// Evaluates the chosen monitor on the admissible records of a trace.
pub fn report(spec: &HarnackSpec, trace: &FlowTrace) -> Result<HarnackReport> {
    spec.validate(trace)?;
    let lhs = match spec.kind {
        HarnackKind::Standard => standard_lhs(trace, spec.p)?,
        HarnackKind::Bonus => bonus_lhs_with(trace, spec.beta)?,
        HarnackKind::Pseudo => pseudo_lhs(trace)?,
        HarnackKind::PMinusOne => u_records(trace)?,
        HarnackKind::Xcf => crate::xcf::xcf_harnack(trace)?,
    };
    let orientation = if spec.kind == HarnackKind::Standard && spec.p < -1.0 { -1.0 } else { 1.0 };
    let interior = trace.meta.grid.interior();
    let mut out = HarnackReport {
        spec: *spec,
        trace_id: trace.meta.id.clone(),
        termination: trace.meta.termination.label().to_string(),
        status: ReportStatus::NoAdmissibleSamples,
        orientation,
        min_lhs: f64::INFINITY,
        max_lhs: f64::NEG_INFINITY,
        argmin: None,
        margin: f64::INFINITY,
        equality_gap: 0.0,
        samples: 0,
        records: Vec::new(),
        excluded: Vec::new(),
        monotonicity: None,
    };
    for rec in &lhs {
        let flags = hypothesis_flags(trace, rec.index);
        if !flags.passes() {
            out.excluded.push(Exclusion { index: rec.index, t: rec.t, flags });
            continue;
        }
        let mut summary =
            RecordSummary { index: rec.index, t: rec.t, min_lhs: f64::INFINITY, argmin_node: 0, max_abs_lhs: 0.0 };
        for &j in &interior {
            let v = rec.values[j];
            if v < summary.min_lhs {
                summary.min_lhs = v;
                summary.argmin_node = j;
            }
            summary.max_abs_lhs = summary.max_abs_lhs.max(v.abs());
            out.max_lhs = out.max_lhs.max(v);
            if orientation * v < out.margin {
                out.margin = orientation * v;
                out.argmin = Some((rec.index, j, rec.t));
            }
            out.samples += 1;
        }
        out.min_lhs = out.min_lhs.min(summary.min_lhs);
        out.equality_gap = out.equality_gap.max(summary.max_abs_lhs);
        out.records.push(summary);
    }
    if out.samples > 0 {
        out.status = ReportStatus::Ok;
    }
    if spec.kind == HarnackKind::PMinusOne {
        out.monotonicity = Some(p_minus_one_monotonicity(trace)?);
    }
    if !out.excluded.is_empty() {
        log::info!("{} records fail the hypotheses of the {} monitor", out.excluded.len(), spec.kind);
    }
    Ok(out)
}
