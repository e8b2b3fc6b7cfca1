//! Homothetic solitons and the catalog of exact umbilic solutions.

use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientKind, AmbientSpec};
use crate::error::{domain, usage, Error, Result};
use crate::flow::ode::{rk4_adaptive, rk4_fixed};
use crate::flow::{make_record, trace_id, FlowTrace, Rates, Sampling, Shape, Termination, TraceMeta};
use crate::shape::{speed_field, CurvatureField, Grid, ProfileState, SupportState};
use crate::symfun::{CurvatureFunctionSpec, Kappa};

/// A homothetic soliton `x = λ(t) x₀` with `f(W₀) = C₀ ⟨x₀, ν₀⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonSpec {
    pub ambient: AmbientSpec,
    pub speed: CurvatureFunctionSpec,
    pub c0: f64,
}

impl SolitonSpec {
    /// `λ(t) = (1 − (p+1) C₀ t)^{1/(p+1)}`, or `None` past the blow-up time.
    pub fn lambda(&self, t: f64) -> Option<f64> {
        soliton_lambda(self.speed.p, self.c0, t)
    }

    /// `u(t) = p C₀ λ^{−(p+1)}`.
    pub fn u(&self, t: f64) -> Option<f64> {
        let p = self.speed.p;
        self.lambda(t).map(|l| p * self.c0 * l.powf(-(p + 1.0)))
    }
}

fn soliton_lambda(p: f64, c0: f64, t: f64) -> Option<f64> {
    let base = 1.0 - (p + 1.0) * c0 * t;
    (base > 0.0).then(|| base.powf(1.0 / (p + 1.0)))
}

/// Least-squares fit of `f = C₀ ⟨x, ν⟩` over the nodes of a flat field.
/// Returns `C₀` and `max |f − C₀⟨x,ν⟩| / |f|`.
pub fn soliton_residual(curv: &CurvatureField, speed: &CurvatureFunctionSpec) -> Result<(f64, f64)> {
    if !curv.ambient.kind.is_flat() {
        return Err(usage("homothetic solitons are fitted in flat ambients"));
    }
    let values: Vec<f64> = curv.nodes.iter().map(|n| n.value).collect();
    let f = speed_field(curv, speed, &values)?;
    let q: Vec<f64> = curv.nodes.iter().map(|n| curv.ambient.inner(&n.x, &n.nu)).collect();
    let scale = q.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(j) = q.iter().position(|v| v.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return Err(domain(format!("<x, nu> vanishes at node {j}")));
    }
    let c0 = f.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() / q.iter().map(|b| b * b).sum::<f64>();
    let residual = f.iter().zip(&q).map(|(a, b)| (a - c0 * b).abs() / a.abs()).fold(0.0, f64::max);
    Ok((c0, residual))
}

/// Solution of `u̇ = ((p+1)/p) u²`, `u(0) = p C₀` in closed form and by RK4.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonOde {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    pub u_rk4: Vec<f64>,
    /// Set when the requested times reach the blow-up time `1/((p+1)C₀)`.
    pub truncated: bool,
}

pub fn soliton_ode(p: f64, c0: f64, times: &[f64], dt: f64) -> Result<SolitonOde> {
    if p == 0.0 || p == -1.0 {
        return Err(usage("the soliton ODE needs p != 0, -1"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(usage("soliton ODE times must be non-negative and increasing"));
    }
    let mut out = SolitonOde { t: vec![], u: vec![], lambda: vec![], u_rk4: vec![], truncated: false };
    for &t in times {
        let Some(l) = soliton_lambda(p, c0, t) else {
            out.truncated = true;
            break;
        };
        out.t.push(t);
        out.lambda.push(l);
        out.u.push(p * c0 * l.powf(-(p + 1.0)));
    }
    out.u_rk4 = rk4_fixed(|_, u| (p + 1.0) / p * u * u, 0.0, p * c0, &out.t, dt);
    Ok(out)
}

/// Names of the exact solutions and the ambient each lives in.
pub const CATALOG: [(&str, AmbientKind, &str); 5] = [
    ("euclid_round", AmbientKind::Euclidean, "round spheres, support s(t)"),
    ("mink_hyperboloid", AmbientKind::Minkowski, "hyperboloids s(t) H^n"),
    ("sphere_geodesic", AmbientKind::Sphere, "geodesic spheres of radius rho(t)"),
    ("hyperbolic_geodesic", AmbientKind::Hyperbolic, "geodesic spheres of radius rho(t)"),
    ("desitter_umbilic", AmbientKind::DeSitter, "umbilic slices at time coordinate r(t)"),
];

fn catalog_kind(name: &str) -> Result<AmbientKind> {
    CATALOG
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, k, _)| *k)
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactParams {
    pub n: usize,
    pub speed: CurvatureFunctionSpec,
    /// Support value, geodesic radius or slice coordinate at `t = 0`. For the
    /// hyperboloid, `None` selects the solution emanating from the light cone.
    pub value: Option<f64>,
    pub t_start: f64,
    pub t_end: f64,
    /// Ratio of consecutive sample times.
    pub ratio: f64,
    pub nodes: usize,
    pub tol: f64,
}

impl ExactParams {
    pub fn new(name: &str, n: usize, speed: CurvatureFunctionSpec) -> Result<Self> {
        let value = match name {
            "euclid_round" => Some(1.0),
            "mink_hyperboloid" => None,
            "sphere_geodesic" => Some(1.2),
            "hyperbolic_geodesic" => Some(1.0),
            "desitter_umbilic" => Some(0.5),
            other => return Err(Error::UnknownName(other.to_string())),
        };
        Ok(ExactParams { n, speed, value, t_start: 0.01, t_end: 1.0, ratio: 1.05, nodes: 16, tol: 1e-10 })
    }
}

/// Umbilic reduction of a flow to one scalar `y(t)`.
struct Umbilic {
    kind: AmbientKind,
    n: usize,
    speed: CurvatureFunctionSpec,
}

impl Umbilic {
    fn kappa(&self, y: f64) -> (f64, f64) {
        match self.kind {
            AmbientKind::Euclidean | AmbientKind::Minkowski => (1.0 / y, -1.0 / (y * y)),
            AmbientKind::Sphere => (1.0 / y.tan(), -1.0 / y.sin().powi(2)),
            AmbientKind::Hyperbolic => (1.0 / y.tanh(), -1.0 / y.sinh().powi(2)),
            AmbientKind::DeSitter => (y.tanh(), 1.0 / y.cosh().powi(2)),
        }
    }

    /// `ẏ = drive · f`.
    fn drive(&self) -> f64 {
        match self.kind {
            AmbientKind::Minkowski | AmbientKind::DeSitter => 1.0,
            _ => -1.0,
        }
    }

    fn in_chart(&self, y: f64) -> bool {
        match self.kind {
            AmbientKind::Sphere => y > 0.0 && y < std::f64::consts::PI,
            AmbientKind::DeSitter => y.is_finite(),
            _ => y > 0.0,
        }
    }

    fn support(&self, y: f64) -> f64 {
        if self.kind.is_flat() {
            y
        } else {
            1.0
        }
    }

    fn speed(&self, y: f64) -> Result<f64> {
        let (k, _) = self.kappa(y);
        self.speed.eval(&Kappa::umbilic(k, self.n)?, self.support(y), 1.0)
    }

    fn rate(&self, y: f64) -> f64 {
        if !self.in_chart(y) || !(self.kappa(y).0 > 0.0) {
            return f64::NAN;
        }
        self.speed(y).map_or(f64::NAN, |f| self.drive() * f)
    }

    /// `(ẏ, ḟ)` at `y`.
    fn rates(&self, y: f64) -> Result<(f64, f64)> {
        let f = self.speed(y)?;
        let ydot = self.drive() * f;
        let (k, dk) = self.kappa(y);
        let mut dfdy = f * self.speed.p * dk / k;
        if self.kind.is_flat() && !self.speed.phi.is_one() {
            let h = 1e-5 * y.abs().max(1.0);
            let phi = &self.speed.phi;
            dfdy += f * (phi.eval(y + h) - phi.eval(y - h)) / (2.0 * h * phi.eval(y));
        }
        Ok((ydot, dfdy * ydot))
    }

    fn shape(&self, y: f64, t: f64, nodes: usize) -> Result<Shape> {
        let ambient = AmbientSpec::new(self.kind, self.n)?;
        Ok(match self.kind {
            AmbientKind::Euclidean => {
                let grid = if self.n == 1 {
                    Grid::Circle { nodes: nodes.max(8) }
                } else {
                    Grid::SphereAxisym { nodes, dim: self.n }
                };
                Shape::Support(SupportState::round(ambient, grid, y, t)?)
            }
            AmbientKind::Minkowski => {
                let grid = Grid::HyperbolicRadial { nodes, rho_max: 2.0, dim: self.n };
                Shape::Support(SupportState::round(ambient, grid, y, t)?)
            }
            _ => Shape::Profile(ProfileState::umbilic(ambient, nodes, y, t)?),
        })
    }
}

/// An exact solution from the catalog, integrated with adaptive RK4 and
/// sampled geometrically from `t_start`, with the Harnack clock starting at
/// `t = 0`. Every record carries exact time derivatives.
pub fn exact_trace(name: &str, params: &ExactParams) -> Result<FlowTrace> {
    let kind = catalog_kind(name)?;
    let ambient = AmbientSpec::new(kind, params.n)?;
    params.speed.validate(params.n)?;
    if !params.speed.psi.is_const() || (!kind.is_flat() && !params.speed.phi.is_one()) {
        return Err(usage("exact umbilic solutions need a constant psi (and phi = 1 in curved ambients)"));
    }
    if !(params.t_start > 0.0 && params.t_end > params.t_start && params.ratio > 1.0) {
        return Err(usage("exact traces need 0 < t_start < t_end and ratio > 1"));
    }
    let sys = Umbilic { kind, n: params.n, speed: params.speed.clone() };
    let start = match params.value {
        Some(v) => {
            if !sys.in_chart(v) {
                return Err(domain(format!("initial value {v} outside the chart of {name}")));
            }
            rk4_adaptive(|_, y| sys.rate(y), 0.0, v, &[params.t_start], params.tol)?[0]
        }
        None if kind == AmbientKind::Minkowski => {
            let f1 = sys.speed(1.0)?;
            let p = params.speed.p;
            let base = (1.0 + p) * f1 * params.t_start;
            if base <= 0.0 {
                return Err(domain("the hyperboloid from the light cone needs (1+p) f(1,...,1) > 0"));
            }
            base.powf(1.0 / (1.0 + p))
        }
        None => return Err(usage(format!("{name} needs an initial value"))),
    };
    let sampling = Sampling::Geometric { ratio: params.ratio };
    let mut records = Vec::new();
    let (mut t, mut y) = (params.t_start, start);
    let mut k = 0;
    let mut prev_kap = f64::NAN;
    let termination = loop {
        if !sys.in_chart(y) {
            break Termination::ConvexityLost { t, detail: format!("value {y} left the chart") };
        }
        let (kap, _) = sys.kappa(y);
        if !(kap > 0.0) {
            break Termination::ConvexityLost { t, detail: format!("curvature {kap}") };
        }
        let state = sys.shape(y, t, params.nodes)?;
        let mut record = make_record(&state, &params.speed)?;
        let (ydot, fdot) = sys.rates(y)?;
        let len = record.f.len();
        record.rates = Some(Rates { values: vec![ydot; len], f: vec![fdot; len] });
        records.push(record);
        if kap > 1e6 {
            break Termination::BlowUp { t, max_kappa: kap };
        }
        k += 1;
        if t >= params.t_end * (1.0 - 1e-12) {
            break Termination::Completed;
        }
        let next = sampling.time(k, params.t_start, 0.0).min(params.t_end);
        match rk4_adaptive(|_, v| sys.rate(v), t, y, &[next], params.tol) {
            Ok(v) if v[0].is_finite() => {
                y = v[0];
                t = next;
            }
            _ if kap < prev_kap => {
                break Termination::ConvexityLost { t, detail: format!("curvature {kap} decreasing to zero") }
            }
            _ => break Termination::BlowUp { t, max_kappa: kap },
        }
        prev_kap = kap;
    };
    let grid = records
        .first()
        .map(|r| r.state.grid().clone())
        .ok_or_else(|| domain(format!("{name} is not valid at t_start")))?;
    Ok(FlowTrace {
        meta: TraceMeta {
            id: trace_id(&format!("exact:{name}"), &ambient, &params.speed, grid.len()),
            source: format!("exact:{name}"),
            ambient,
            speed: params.speed.clone(),
            grid,
            clock_origin: 0.0,
            sampling,
            termination,
        },
        records,
    })
}
