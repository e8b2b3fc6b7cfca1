//! Integrated (Moser-type) Harnack inequalities obtained from the
//! differential ones by integrating along space-time paths.
//!
//! Paths run in the coordinate of a one-dimensional grid: the polar angle of
//! axisymmetric grids, the angle of the circle or the radius of radial
//! grids. On rotationally symmetric traces they stay in one meridian plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::flow::FlowTrace;
use crate::harnack::{kinematics, Kinematics};
use crate::shape::Grid;

/// Node fields of one record, in the normal-flow description.
struct Slice {
    t: f64,
    f: Vec<f64>,
    f_t: Vec<f64>,
    f_x: Vec<f64>,
    h_xx: Vec<f64>,
    drift: Vec<f64>,
}

/// Interpolated first-order data at one space-time point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointData {
    pub f: f64,
    /// `∂_t f` along the normal flow.
    pub normal_rate: f64,
    /// `∂_x f`, so `h(grad_h f, X) = f_x X`.
    pub f_x: f64,
    pub h_xx: f64,
    /// Coordinate velocity of the trace parameterization relative to the normal flow.
    pub drift: f64,
    /// Rate of `f` at a fixed grid coordinate.
    pub f_t: f64,
}

/// Space-time interpolation of the speed and the second fundamental form
/// along a trace.
pub struct MoserField {
    grid: Grid,
    slices: Vec<Slice>,
    clock_origin: f64,
    /// `+1` when `f > 0` everywhere, `−1` when `f < 0` everywhere.
    pub sign: f64,
    pub trace_id: String,
}

impl MoserField {
    pub fn new(trace: &FlowTrace) -> Result<Self> {
        let grid = trace.meta.grid.clone();
        let mut slices = Vec::new();
        for i in 0..trace.len() {
            let Some(Kinematics { f, f_t, f_x, h_xx, drift }) = kinematics(trace, i)? else { continue };
            if let Some(j) = h_xx.iter().position(|h| !(*h > 0.0)) {
                return Err(Error::Domain(format!("record {i}: h is not positive definite at node {j}")));
            }
            slices.push(Slice { t: trace.records[i].t, f, f_t, f_x, h_xx, drift });
        }
        if slices.len() < 2 {
            return Err(usage("integrated Harnack checks need two records with time derivatives"));
        }
        let positive = slices.iter().all(|s| s.f.iter().all(|v| *v > 0.0));
        let negative = slices.iter().all(|s| s.f.iter().all(|v| *v < 0.0));
        let sign = match (positive, negative) {
            (true, _) => 1.0,
            (_, true) => -1.0,
            _ => return Err(Error::Invariant("the speed changes sign along the trace".into())),
        };
        Ok(MoserField { grid, slices, clock_origin: trace.meta.clock_origin, sign, trace_id: trace.meta.id.clone() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Record times at which the field is known.
    pub fn times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.t).collect()
    }

    pub fn clock(&self, t: f64) -> f64 {
        t - self.clock_origin
    }

    /// Speed at node `j` of the record at time `t`, if `t` is a record time.
    pub fn node_value(&self, j: usize, t: f64) -> Option<f64> {
        self.slices.iter().find(|s| s.t == t).map(|s| s.f[j])
    }

    /// Admissible coordinate range of control points, if bounded.
    fn bounds(&self) -> Option<(f64, f64)> {
        match self.grid {
            Grid::HyperbolicRadial { .. } => {
                let rmax = self.grid.interior().last().map_or(0.0, |&j| self.grid.coord(j));
                Some((-rmax, rmax))
            }
            _ => None,
        }
    }

    /// Neighbouring nodes, weights and the orientation of odd fields at `x`.
    fn locate(&self, x: f64) -> (usize, usize, f64, f64) {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let (y, odd, cell_centred) = match self.grid {
            Grid::Circle { .. } => (x.rem_euclid(std::f64::consts::TAU), 1.0, false),
            Grid::HyperbolicRadial { .. } => (x.abs(), if x < 0.0 { -1.0 } else { 1.0 }, true),
            _ => {
                let y = x.rem_euclid(std::f64::consts::TAU);
                if y > std::f64::consts::PI {
                    (std::f64::consts::TAU - y, -1.0, true)
                } else {
                    (y, 1.0, true)
                }
            }
        };
        let q = if cell_centred { y / h - 0.5 } else { y / h };
        let j0 = q.floor();
        let w = q - j0;
        let j0 = j0 as isize;
        // Indices −1 and n denote the mirror ghosts of nodes 0 and n − 1;
        // the radial grid has no mirror at its outer end and is clamped.
        let encode = |j: isize| -> usize {
            match self.grid {
                Grid::Circle { .. } => j.rem_euclid(n as isize) as usize,
                _ if j < 0 => usize::MAX,
                _ if j >= n as isize => match self.grid {
                    Grid::HyperbolicRadial { .. } => n - 1,
                    _ => usize::MAX - 1,
                },
                _ => j as usize,
            }
        };
        (encode(j0), encode(j0 + 1), w, odd)
    }

    fn node(&self, v: &[f64], j: usize, odd_field: bool) -> f64 {
        let mirror = if odd_field { -1.0 } else { 1.0 };
        match j {
            usize::MAX => mirror * v[0],
            m if m == usize::MAX - 1 => mirror * v[v.len() - 1],
            _ => v[j],
        }
    }

    fn space(&self, v: &[f64], loc: (usize, usize, f64, f64), odd_field: bool) -> f64 {
        let (a, b, w, orient) = loc;
        let val = (1.0 - w) * self.node(v, a, odd_field) + w * self.node(v, b, odd_field);
        if odd_field {
            orient * val
        } else {
            val
        }
    }

    /// Data at coordinate `x` and time `t`: `f` and its rate from the cubic
    /// Hermite interpolant in time, the other fields linear.
    pub fn at(&self, x: f64, t: f64) -> PointData {
        let k = self.slices.partition_point(|s| s.t < t).clamp(1, self.slices.len() - 1) - 1;
        let (s0, s1) = (&self.slices[k], &self.slices[k + 1]);
        let loc = self.locate(x);
        let dt = s1.t - s0.t;
        let a = ((t - s0.t) / dt).clamp(0.0, 1.0);
        let lin = |v0: &[f64], v1: &[f64], odd: bool| (1.0 - a) * self.space(v0, loc, odd) + a * self.space(v1, loc, odd);
        let (f0, f1) = (self.space(&s0.f, loc, false), self.space(&s1.f, loc, false));
        let (d0, d1) = (self.space(&s0.f_t, loc, false), self.space(&s1.f_t, loc, false));
        let (a2, a3) = (a * a, a * a * a);
        let f = (2.0 * a3 - 3.0 * a2 + 1.0) * f0 + (a3 - 2.0 * a2 + a) * dt * d0 + (-2.0 * a3 + 3.0 * a2) * f1 + (a3 - a2) * dt * d1;
        let f_t = (6.0 * a2 - 6.0 * a) * (f0 - f1) / dt + (3.0 * a2 - 4.0 * a + 1.0) * d0 + (3.0 * a2 - 2.0 * a) * d1;
        let f_x = lin(&s0.f_x, &s1.f_x, true);
        let drift = lin(&s0.drift, &s1.drift, true);
        PointData { f, normal_rate: f_t - drift * f_x, f_x, h_xx: lin(&s0.h_xx, &s1.h_xx, false), drift, f_t }
    }
}

/// A space-time path `x(t)`, linear between consecutive control points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePath {
    pub times: Vec<f64>,
    pub coords: Vec<f64>,
}

impl SpaceTimePath {
    /// The straight path with `segments` equal time steps.
    pub fn straight(x1: f64, t1: f64, x2: f64, t2: f64, segments: usize) -> Result<Self> {
        if !(t2 > t1) {
            return Err(usage(format!("paths need t2 > t1, got t1 = {t1}, t2 = {t2}")));
        }
        let m = segments.max(1);
        let times = (0..=m).map(|k| t1 + (t2 - t1) * k as f64 / m as f64).collect();
        let coords = (0..=m).map(|k| x1 + (x2 - x1) * k as f64 / m as f64).collect();
        Ok(SpaceTimePath { times, coords })
    }

    pub fn segments(&self) -> usize {
        self.times.len() - 1
    }

    /// Coordinate velocity on each segment.
    pub fn velocities(&self) -> Vec<f64> {
        (0..self.segments())
            .map(|k| (self.coords[k + 1] - self.coords[k]) / (self.times[k + 1] - self.times[k]))
            .collect()
    }

    /// The same path with every segment split in two.
    pub fn refined(&self) -> Self {
        let mut times = vec![self.times[0]];
        let mut coords = vec![self.coords[0]];
        for k in 0..self.segments() {
            times.push(0.5 * (self.times[k] + self.times[k + 1]));
            coords.push(0.5 * (self.coords[k] + self.coords[k + 1]));
            times.push(self.times[k + 1]);
            coords.push(self.coords[k + 1]);
        }
        SpaceTimePath { times, coords }
    }
}

const GAUSS: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// Quadrature nodes of a segment: `(t, x, ẋ, weight)`.
fn segment_points(path: &SpaceTimePath, k: usize, sub: usize) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
    let (ta, tb) = (path.times[k], path.times[k + 1]);
    let (xa, xb) = (path.coords[k], path.coords[k + 1]);
    let v = (xb - xa) / (tb - ta);
    let h = (tb - ta) / sub as f64;
    (0..sub).flat_map(move |m| {
        let mid = ta + (m as f64 + 0.5) * h;
        GAUSS.iter().map(move |(z, w)| {
            let t = mid + 0.5 * h * z;
            (t, xa + v * (t - ta), v, 0.5 * h * w)
        })
    })
}

fn segment_action(field: &MoserField, path: &SpaceTimePath, k: usize, sub: usize) -> f64 {
    segment_points(path, k, sub)
        .map(|(t, x, v, w)| {
            let d = field.at(x, t);
            let big_x = v + d.drift;
            w * d.h_xx * big_x * big_x / d.f.abs()
        })
        .sum()
}

/// `∫ h(X, X) / |f| dt` along the path, where `X = ẋ + drift` is the
/// velocity relative to the normal flow.
pub fn path_action(field: &MoserField, path: &SpaceTimePath) -> f64 {
    path_action_with(field, path, 4)
}

/// [`path_action`] with `sub` Gauss–Legendre panels per segment.
pub fn path_action_with(field: &MoserField, path: &SpaceTimePath, sub: usize) -> f64 {
    (0..path.segments()).map(|k| segment_action(field, path, k, sub.max(1))).sum()
}

/// `ln f(end) − ln f(start) − ∫ (∂_t f + h(grad_h f, X)) / f dt` along the path.
pub fn exponential_identity_residual(field: &MoserField, path: &SpaceTimePath, sub: usize) -> f64 {
    let integral: f64 = (0..path.segments())
        .flat_map(|k| segment_points(path, k, sub.max(1)).collect::<Vec<_>>())
        .map(|(t, x, v, w)| {
            let d = field.at(x, t);
            w * (d.normal_rate + d.f_x * (v + d.drift)) / d.f
        })
        .sum();
    let last = path.segments();
    let f1 = field.at(path.coords[0], path.times[0]).f;
    let f2 = field.at(path.coords[last], path.times[last]).f;
    (f2 / f1).ln() - integral
}

/// Optimizer budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserOptions {
    pub segments: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Gauss–Legendre panels per segment.
    pub panels: usize,
    /// Allowed excess of `ln f(x₁,t₁) − ln(rhs)`.
    pub tol: f64,
}

impl Default for MoserOptions {
    fn default() -> Self {
        MoserOptions { segments: 8, iterations: 200, restarts: 8, seed: 0, panels: 1, tol: 4e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaResult {
    /// `inf ∫ h(γ̇,γ̇)/f dt` for `f > 0`, `sup` of the same for `f < 0`.
    pub delta: f64,
    pub path: SpaceTimePath,
    pub converged: bool,
    pub evaluations: usize,
}

/// Brent's parabolic minimization on `[lo, hi]`.
fn brent(mut lo: f64, mut hi: f64, mut g: impl FnMut(f64) -> f64, evals: &mut usize) -> (f64, f64) {
    const C: f64 = 0.381_966_011_250_105_1;
    let mut x = lo + C * (hi - lo);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    *evals += 1;
    let (mut d, mut e) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let tol = 1e-9 * x.abs() + 1e-12;
        if (x - mid).abs() <= 2.0 * tol - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol {
            let r = (x - w) * (fx - fv);
            let q = (x - v) * (fx - fw);
            let mut pp = (x - v) * q - (x - w) * r;
            let mut qq = 2.0 * (q - r);
            if qq > 0.0 {
                pp = -pp;
            }
            qq = qq.abs();
            if pp.abs() < (0.5 * qq * e).abs() && pp > qq * (lo - x) && pp < qq * (hi - x) {
                e = d;
                d = pp / qq;
                let u = x + d;
                if u - lo < 2.0 * tol || hi - u < 2.0 * tol {
                    d = if mid >= x { tol } else { -tol };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { lo - x } else { hi - x };
            d = C * e;
        }
        let u = if d.abs() >= tol { x + d } else { x + tol.copysign(d) };
        let fu = g(u);
        *evals += 1;
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}

/// Coordinate descent on the control points of `start`.
fn descend(field: &MoserField, mut path: SpaceTimePath, opts: &MoserOptions, evals: &mut usize) -> (SpaceTimePath, f64, bool) {
    let m = path.segments();
    let sub = opts.panels.max(1);
    let bounds = field.bounds();
    let mut seg: Vec<f64> = (0..m).map(|k| segment_action(field, &path, k, sub)).collect();
    let mut total: f64 = seg.iter().sum();
    let mut width = 4.0 * field.grid.spacing().max((path.coords[m] - path.coords[0]).abs() / m as f64);
    let mut converged = false;
    for _ in 0..opts.iterations {
        let before = total;
        let mut moved = 0.0_f64;
        for k in 1..m {
            let c = path.coords[k];
            let (mut lo, mut hi) = (c - width, c + width);
            if let Some((a, b)) = bounds {
                lo = lo.max(a);
                hi = hi.min(b);
            }
            let local = |x: f64, p: &mut SpaceTimePath| {
                p.coords[k] = x;
                segment_action(field, p, k - 1, sub) + segment_action(field, p, k, sub)
            };
            let current = seg[k - 1] + seg[k];
            let mut trial = path.clone();
            let (x, val) = brent(lo, hi, |x| local(x, &mut trial), evals);
            if val < current {
                path.coords[k] = x;
                seg[k - 1] = segment_action(field, &path, k - 1, sub);
                seg[k] = segment_action(field, &path, k, sub);
                moved = moved.max((x - c).abs());
            } else {
                path.coords[k] = c;
            }
        }
        total = seg.iter().sum();
        width = (0.5 * width).max(4.0 * moved).max(1e-9);
        if before - total <= 1e-11 * (1.0 + total) && moved <= 1e-7 * (1.0 + width) {
            converged = true;
            break;
        }
    }
    (path, total, converged)
}

/// Δ between `(x1, t1)` and `(x2, t2)`.
pub fn delta(field: &MoserField, x1: f64, t1: f64, x2: f64, t2: f64, opts: &MoserOptions) -> Result<DeltaResult> {
    let times = field.times();
    let (first, last) = (times[0], times[times.len() - 1]);
    if t1 < first || t2 > last {
        return Err(usage(format!("times must lie in [{first}, {last}]")));
    }
    let mut x2 = x2;
    if matches!(field.grid, Grid::Circle { .. }) {
        let tau = std::f64::consts::TAU;
        x2 = x1 + (x2 - x1 + 0.5 * tau).rem_euclid(tau) - 0.5 * tau;
    }
    let straight = SpaceTimePath::straight(x1, t1, x2, t2, opts.segments)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ x1.to_bits().rotate_left(7) ^ t1.to_bits() ^ x2.to_bits().rotate_left(13) ^ t2.to_bits().rotate_left(29));
    let amplitude = 0.5 * (x2 - x1).abs() + 4.0 * field.grid.spacing();
    let mut evals = 0;
    let mut best: Option<(SpaceTimePath, f64, bool)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut start = straight.clone();
        if r > 0 {
            for c in start.coords.iter_mut().skip(1).take(opts.segments.saturating_sub(1)) {
                *c += amplitude * rng.random_range(-1.0..1.0);
            }
            if let Some((a, b)) = field.bounds() {
                start.coords.iter_mut().for_each(|c| *c = c.clamp(a, b));
            }
        }
        let found = descend(field, start, opts, &mut evals);
        if best.as_ref().map_or(true, |b| found.1 < b.1) {
            best = Some(found);
        }
    }
    let (path, action, converged) = best.expect("at least one restart");
    Ok(DeltaResult { delta: field.sign * action, path, converged, evaluations: evals })
}

/// Δ with a warm start: optimize on `path`, then on its refinement.
pub fn delta_refined(field: &MoserField, path: &SpaceTimePath, opts: &MoserOptions) -> DeltaResult {
    let mut evals = 0;
    let (path, action, converged) = descend(field, path.refined(), opts, &mut evals);
    DeltaResult { delta: field.sign * action, path, converged, evaluations: evals }
}

/// `h(grad f, X) + ¼ h(X, X) + h(grad f, grad f)` at `X = −2 grad_h f`,
/// relative to `max(1, h(grad f, grad f))`; the largest value over all
/// records and nodes.
pub fn polarization_residual(field: &MoserField) -> f64 {
    let mut worst = 0.0_f64;
    for s in &field.slices {
        for j in 0..s.f.len() {
            let (fx, h) = (s.f_x[j], s.h_xx[j]);
            let grad = fx / h;
            let x = -2.0 * grad;
            let g2 = h * grad * grad;
            let r = h * grad * x + 0.25 * h * x * x + g2;
            worst = worst.max(r.abs() / g2.max(1.0));
        }
    }
    worst
}

/// A pair of space-time points given by grid nodes and record times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePair {
    pub x1: usize,
    pub t1: f64,
    pub x2: usize,
    pub t2: f64,
}

/// `count` random pairs with `t1 < t2` at record times with a positive clock.
pub fn random_pairs(field: &MoserField, count: usize, seed: u64) -> Vec<SamplePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times: Vec<f64> = field.times().into_iter().filter(|t| field.clock(*t) > 0.0).collect();
    let nodes = field.grid.interior();
    if times.len() < 2 || nodes.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let a = rng.random_range(0..times.len() - 1);
            let b = rng.random_range(a + 1..times.len());
            SamplePair {
                x1: nodes[rng.random_range(0..nodes.len())],
                t1: times[a],
                x2: nodes[rng.random_range(0..nodes.len())],
                t2: times[b],
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserVerdict {
    pub pair: SamplePair,
    pub delta: f64,
    /// `f(x₁, t₁)`.
    pub lhs: f64,
    /// `(t₂/t₁)^{p/(p+1)} e^{Δ/4} f(x₂, t₂)`.
    pub rhs: f64,
    /// `ln(rhs / lhs)` for `f > 0`, `ln(lhs / rhs)` for `f < 0`.
    pub margin: f64,
    pub pass: bool,
    pub converged: bool,
    /// Smallest `(∂_t f + h(grad f, X) + ¼h(X,X) + p f/((p+1)t)) t / |f|`
    /// at the quadrature points of the optimal path.
    pub all_vectors_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserReport {
    pub trace_id: String,
    pub p: f64,
    pub tol: f64,
    pub verdicts: Vec<MoserVerdict>,
    pub failures: usize,
    pub polarization: f64,
}

impl MoserReport {
    pub fn passes(&self) -> bool {
        self.failures == 0
    }

    /// `x1,t1,x2,t2,delta,lhs,rhs,pass` rows with grid coordinates.
    pub fn to_csv(&self, grid: &Grid) -> String {
        let mut out = String::from("x1,t1,x2,t2,delta,lhs,rhs,pass\n");
        for v in &self.verdicts {
            out.push_str(&format!(
                "{},{},{},{},{:e},{:e},{:e},{}\n",
                grid.coord(v.pair.x1),
                v.pair.t1,
                grid.coord(v.pair.x2),
                v.pair.t2,
                v.delta,
                v.lhs,
                v.rhs,
                v.pass
            ));
        }
        out
    }
}

fn verdict(field: &MoserField, p: f64, pair: &SamplePair, opts: &MoserOptions) -> Result<MoserVerdict> {
    let grid = &field.grid;
    let (x1, x2) = (grid.coord(pair.x1), grid.coord(pair.x2));
    let lhs = field.node_value(pair.x1, pair.t1).ok_or_else(|| usage(format!("t1 = {} is not a record time", pair.t1)))?;
    let f2 = field.node_value(pair.x2, pair.t2).ok_or_else(|| usage(format!("t2 = {} is not a record time", pair.t2)))?;
    let (tau1, tau2) = (field.clock(pair.t1), field.clock(pair.t2));
    if tau1 <= 0.0 {
        return Err(usage("the first time must come after the clock origin"));
    }
    let d = delta(field, x1, pair.t1, x2, pair.t2, opts)?;
    let c = p / (p + 1.0);
    let log_rhs = c * (tau2 / tau1).ln() + 0.25 * d.delta + f2.abs().ln();
    let margin = field.sign * (log_rhs - lhs.abs().ln());
    let rhs = field.sign * log_rhs.exp();
    let mut all_vectors_min = f64::INFINITY;
    for k in 0..d.path.segments() {
        for (t, x, v, _) in segment_points(&d.path, k, 1) {
            let q = field.at(x, t);
            let big_x = v + q.drift;
            let tau = field.clock(t);
            let val = q.normal_rate + q.f_x * big_x + 0.25 * q.h_xx * big_x * big_x + c / tau * q.f;
            all_vectors_min = all_vectors_min.min(val * tau / q.f.abs());
        }
    }
    Ok(MoserVerdict { pair: *pair, delta: d.delta, lhs, rhs, margin, pass: margin >= -opts.tol, converged: d.converged, all_vectors_min })
}

/// Checks `f(x₁,t₁) ≤ (t₂/t₁)^{p/(p+1)} e^{Δ/4} f(x₂,t₂)` at every pair,
/// with times measured from the clock origin.
pub fn moser_check(field: &MoserField, p: f64, pairs: &[SamplePair], opts: &MoserOptions) -> Result<MoserReport> {
    if !(p > -1.0) || p == 0.0 {
        return Err(usage(format!("the integrated inequality is checked for p > -1, p != 0; got p = {p}")));
    }
    let verdicts = pairs.par_iter().map(|pair| verdict(field, p, pair, opts)).collect::<Result<Vec<_>>>()?;
    let failures = verdicts.iter().filter(|v| !v.pass).count();
    Ok(MoserReport { trace_id: field.trace_id.clone(), p, tol: opts.tol, verdicts, failures, polarization: polarization_residual(field) })
}
