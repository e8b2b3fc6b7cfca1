//! Polar duality on the sphere and the Gauss-map duality between hyperbolic
//! space and de Sitter space.
//!
//! In the extrinsic models a hypersurface is a pair `(x, ν)` with
//! `⟨x, ν⟩ = 0`. The dual hypersurface is `(x̃, ν̃) = (ν, x)`; with the
//! orientations of [`crate::ambient`] it has principal curvatures `1/κ_i`.

use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientKind, AmbientSpec};
use crate::error::{domain, usage, Error, Result};
use crate::flow::{FlowTrace, Shape};
use crate::harnack::{pseudo_lhs, standard_lhs, LhsRecord};
use crate::shape::{curvature_from_profile, Grid, ProfileState};
use crate::soliton::{exact_trace, ExactParams};
use crate::symfun::{CurvatureFunctionSpec, Kappa};

/// A rotationally symmetric hypersurface of a curved space form sampled
/// along its meridian, in model coordinates `(e_0, ω_1, …, ω_{n+1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedSample {
    pub ambient: AmbientSpec,
    pub grid: Grid,
    pub t: f64,
    pub x: Vec<Vec<f64>>,
    /// Unit normal, which is also the position of the dual.
    pub nu: Vec<Vec<f64>>,
    /// Unit meridian tangent.
    pub tangent: Vec<Vec<f64>>,
    pub kappa: Vec<Kappa>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_of: Option<String>,
}

impl EmbeddedSample {
    pub fn from_profile(state: &ProfileState) -> Result<Self> {
        let field = curvature_from_profile(state)?;
        let mut x = Vec::with_capacity(field.len());
        let mut nu = Vec::with_capacity(field.len());
        let mut kappa = Vec::with_capacity(field.len());
        for node in field.nodes {
            x.push(node.x);
            nu.push(node.nu);
            kappa.push(node.kappa);
        }
        let tangent = meridian_tangents(state.ambient.kind, &x, &nu);
        Ok(EmbeddedSample { ambient: state.ambient, grid: state.grid.clone(), t: state.t, x, nu, tangent, kappa, dual_of: None })
    }

    pub fn from_shape(shape: &Shape) -> Result<Self> {
        match shape {
            Shape::Profile(p) => Self::from_profile(p),
            Shape::Support(_) => Err(usage("duals are defined for hypersurfaces of curved space forms")),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.ambient.inner(a, b)
    }
}

/// Unit vector orthogonal to `x` and `ν` in the meridian plane
/// `span(e_0, ω_1, ω_{n+1})`, oriented along increasing polar angle.
fn meridian_tangents(kind: AmbientKind, x: &[Vec<f64>], nu: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let lorentz = !matches!(kind, AmbientKind::Sphere | AmbientKind::Euclidean);
    (0..x.len())
        .map(|j| {
            let last = x[j].len() - 1;
            let a = [x[j][0], x[j][1], x[j][last]];
            let b = [nu[j][0], nu[j][1], nu[j][last]];
            let mut c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            if lorentz {
                c[0] = -c[0];
            }
            let norm2 = if lorentz { -c[0] * c[0] } else { c[0] * c[0] } + c[1] * c[1] + c[2] * c[2];
            let scale = norm2.abs().sqrt();
            let next = &x[(j + 1).min(x.len() - 1)];
            let prev = &x[j.saturating_sub(1)];
            let dir = (next[1] - prev[1]) * c[1] + (next[last] - prev[last]) * c[2];
            let sign = if dir < 0.0 { -1.0 } else { 1.0 };
            let mut t = vec![0.0; x[j].len()];
            t[0] = sign * c[0] / scale;
            t[1] = sign * c[1] / scale;
            t[last] = sign * c[2] / scale;
            t
        })
        .collect()
}

fn swap(sample: &EmbeddedSample, kind: AmbientKind) -> Result<EmbeddedSample> {
    let kappa = sample
        .kappa
        .iter()
        .enumerate()
        .map(|(j, k)| {
            if !k.in_gamma_plus() {
                return Err(Error::DegenerateShape {
                    node: j,
                    eigenvalue: k.min(),
                    detail: "the dual needs a strictly convex hypersurface".into(),
                });
            }
            k.reciprocal()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EmbeddedSample {
        ambient: AmbientSpec::new(kind, sample.ambient.n)?,
        grid: sample.grid.clone(),
        t: sample.t,
        x: sample.nu.clone(),
        nu: sample.x.clone(),
        tangent: sample.tangent.clone(),
        kappa,
        dual_of: None,
    })
}

/// Polar hypersurface of a strictly convex hypersurface of the sphere.
pub fn polar_sphere(sample: &EmbeddedSample) -> Result<EmbeddedSample> {
    if sample.ambient.kind != AmbientKind::Sphere {
        return Err(usage("the polar map acts on hypersurfaces of the sphere"));
    }
    swap(sample, AmbientKind::Sphere)
}

/// Gauss-map image in de Sitter space of a strictly convex hypersurface of
/// hyperbolic space.
pub fn gauss_hyperbolic(sample: &EmbeddedSample) -> Result<EmbeddedSample> {
    if sample.ambient.kind != AmbientKind::Hyperbolic {
        return Err(usage("the Gauss map into de Sitter space acts on hyperbolic hypersurfaces"));
    }
    swap(sample, AmbientKind::DeSitter)
}

/// Inverse of [`gauss_hyperbolic`]: the Gauss-map image in hyperbolic space
/// of a spacelike strictly convex hypersurface of de Sitter space.
pub fn gauss_de_sitter(sample: &EmbeddedSample) -> Result<EmbeddedSample> {
    if sample.ambient.kind != AmbientKind::DeSitter {
        return Err(usage("the inverse Gauss map acts on de Sitter hypersurfaces"));
    }
    if sample.nu.iter().any(|v| v[0] <= 0.0) {
        return Err(domain("the normal of the de Sitter hypersurface is not future directed"));
    }
    swap(sample, AmbientKind::Hyperbolic)
}

/// The dual in whichever model applies to the sample's ambient.
pub fn dual(sample: &EmbeddedSample) -> Result<EmbeddedSample> {
    match sample.ambient.kind {
        AmbientKind::Sphere => polar_sphere(sample),
        AmbientKind::Hyperbolic => gauss_hyperbolic(sample),
        AmbientKind::DeSitter => gauss_de_sitter(sample),
        kind => Err(Error::Unsupported(format!("no dual hypersurfaces in {kind}"))),
    }
}

/// Ambient of the dual hypersurface.
pub fn dual_kind(kind: AmbientKind) -> Result<AmbientKind> {
    match kind {
        AmbientKind::Sphere => Ok(AmbientKind::Sphere),
        AmbientKind::Hyperbolic => Ok(AmbientKind::DeSitter),
        AmbientKind::DeSitter => Ok(AmbientKind::Hyperbolic),
        kind => Err(Error::Unsupported(format!("no dual hypersurfaces in {kind}"))),
    }
}

/// Principal curvatures of a sample computed directly from its points:
/// `⟨∂ν, ∂x⟩ / ⟨∂x, ∂x⟩` along the meridian with centred differences, and
/// `ν¹ / x¹` in the rotation directions. Returns `(node, κ)` for the nodes
/// that have both meridian neighbours.
pub fn fd_curvatures(sample: &EmbeddedSample) -> Result<Vec<(usize, Kappa)>> {
    let n = sample.ambient.n;
    let len = sample.len();
    if len < 3 {
        return Err(usage("finite-difference curvature needs three nodes"));
    }
    let diff = |v: &[Vec<f64>], j: usize| -> Vec<f64> { (0..v[j].len()).map(|c| v[j + 1][c] - v[j - 1][c]).collect() };
    (1..len - 1)
        .map(|j| {
            let dx = diff(&sample.x, j);
            let dnu = diff(&sample.nu, j);
            let mer = sample.inner(&dnu, &dx) / sample.inner(&dx, &dx);
            let mut k = vec![sample.nu[j][1] / sample.x[j][1]; n];
            k[0] = mer;
            Ok((j, Kappa::new(k)?))
        })
        .collect()
}

/// Deviations of a primal/dual pair from the duality relations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCheck {
    /// `max |κ_i κ̃_i − 1|`.
    pub reciprocal: f64,
    /// `max |κ̃_fd κ − 1|` with finite-difference curvatures of the dual.
    pub finite_difference: f64,
    /// `max |⟨x, x̃⟩|`.
    pub orthogonality: f64,
    /// `max |⟨x̃, x̃⟩ − ⟨ν, ν⟩|`.
    pub normalization: f64,
    /// Whether `x̃⁰ > 0` at every node.
    pub future: bool,
}

impl DualCheck {
    pub fn passes(&self, analytic_tol: f64, fd_tol: f64) -> bool {
        self.reciprocal <= analytic_tol && self.orthogonality <= analytic_tol && self.normalization <= analytic_tol && self.finite_difference <= fd_tol
    }
}

pub fn check_dual(primal: &EmbeddedSample, dual: &EmbeddedSample) -> Result<DualCheck> {
    if primal.len() != dual.len() {
        return Err(usage("primal and dual samples have different lengths"));
    }
    let mut out = DualCheck { reciprocal: 0.0, finite_difference: 0.0, orthogonality: 0.0, normalization: 0.0, future: true };
    for j in 0..primal.len() {
        for (a, b) in primal.kappa[j].as_slice().iter().zip(dual.kappa[j].as_slice()) {
            out.reciprocal = out.reciprocal.max((a * b - 1.0).abs());
        }
        out.orthogonality = out.orthogonality.max(primal.inner(&primal.x[j], &dual.x[j]).abs());
        let norm = dual.inner(&dual.x[j], &dual.x[j]) - primal.inner(&primal.nu[j], &primal.nu[j]);
        out.normalization = out.normalization.max(norm.abs());
        out.future &= dual.x[j][0] > 0.0;
    }
    for (j, k) in fd_curvatures(dual)? {
        for (a, b) in primal.kappa[j].as_slice().iter().zip(k.as_slice()) {
            out.finite_difference = out.finite_difference.max((a * b - 1.0).abs());
        }
    }
    Ok(out)
}

/// `sup_{x ∈ M} ⟨x, y⟩`, with `M` swept by rotating the sampled meridian
/// through `azimuths` equally spaced angles.
pub fn polar_sup(sample: &EmbeddedSample, y: &[f64], azimuths: usize) -> f64 {
    let n = sample.ambient.n;
    let mut best = f64::NEG_INFINITY;
    for x in &sample.x {
        for a in 0..azimuths.max(1) {
            let alpha = std::f64::consts::TAU * a as f64 / azimuths.max(1) as f64;
            let mut xr = x.clone();
            if n >= 2 {
                xr[1] = x[1] * alpha.cos();
                xr[2] = x[1] * alpha.sin();
            } else {
                xr[1] = x[1] * alpha.cos().signum();
            }
            best = best.max(sample.inner(&xr, y));
        }
    }
    best
}

/// Speed of the dual flow: `f̃(W̃) = −f(W̃⁻¹)`, that is the inverse base
/// function with exponent `−p`.
pub fn dual_speed(spec: &CurvatureFunctionSpec) -> Result<CurvatureFunctionSpec> {
    if !spec.is_isotropic() {
        return Err(Error::Unsupported("dual speeds are defined for phi = psi = 1".into()));
    }
    Ok(CurvatureFunctionSpec::isotropic(spec.base.inverse(), -spec.p))
}

/// Catalog name and parameters of the exact solution dual to `name`.
pub fn dual_exact(name: &str, params: &ExactParams) -> Result<(&'static str, ExactParams)> {
    let value = params.value.ok_or_else(|| usage(format!("{name} needs an initial value")))?;
    let (dual_name, dual_value) = match name {
        "sphere_geodesic" => ("sphere_geodesic", std::f64::consts::FRAC_PI_2 - value),
        "hyperbolic_geodesic" => ("desitter_umbilic", value),
        "desitter_umbilic" => ("hyperbolic_geodesic", value),
        other => return Err(Error::Unsupported(format!("{other} has no dual in the catalog"))),
    };
    let mut out = params.clone();
    out.speed = dual_speed(&params.speed)?;
    out.value = Some(dual_value);
    Ok((dual_name, out))
}

/// Graph value of the umbilic hypersurface through the dual point `x̃`
/// (about `−e_0` for polars of geodesic spheres).
fn umbilic_value(kind: AmbientKind, x: &[f64]) -> f64 {
    match kind {
        AmbientKind::Sphere => (-x[0]).clamp(-1.0, 1.0).acos(),
        AmbientKind::DeSitter => x[0].asinh(),
        _ => x[0].max(1.0).acosh(),
    }
}

/// Largest difference of graph values between the duals of the primal
/// records and the records of the dual trace at the same times.
pub fn dual_flow_residual(primal: &FlowTrace, dual_trace: &FlowTrace) -> Result<f64> {
    let kind = dual_kind(primal.meta.ambient.kind)?;
    if dual_trace.meta.ambient.kind != kind {
        return Err(usage(format!("the dual of a {} trace lives in {kind}", primal.meta.ambient.kind)));
    }
    let mut worst = 0.0_f64;
    let mut matched = 0;
    for rec in &primal.records {
        let Some(other) = dual_trace.records.iter().find(|r| (r.t - rec.t).abs() <= 1e-12 * rec.t.abs().max(1.0)) else {
            continue;
        };
        let polar = dual(&EmbeddedSample::from_shape(&rec.state)?)?;
        let values = other.state.values();
        if values.len() != polar.len() {
            return Err(usage("primal and dual traces use different grids"));
        }
        for (x, v) in polar.x.iter().zip(values) {
            worst = worst.max((umbilic_value(kind, x) - v).abs());
        }
        matched += 1;
    }
    if matched == 0 {
        return Err(usage("the primal and dual traces share no sample time"));
    }
    Ok(worst)
}

/// Evolves an exact solution and, independently, its dual under the dual
/// speed; returns the largest distance between the two dual traces.
pub fn dual_flow_commutes(name: &str, params: &ExactParams) -> Result<f64> {
    let primal = exact_trace(name, params)?;
    let (dual_name, dual_params) = dual_exact(name, params)?;
    let dual_trace = exact_trace(dual_name, &dual_params)?;
    dual_flow_residual(&primal, &dual_trace)
}

/// The pseudo-Harnack quantity of a hyperbolic solution next to the standard
/// Harnack quantity of its de Sitter dual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedReport {
    pub primal_id: String,
    pub dual_id: String,
    pub pseudo: Vec<LhsRecord>,
    pub dual_standard: Vec<LhsRecord>,
    /// `max |pseudo − dual standard|` over matched records and nodes.
    pub max_gap: f64,
    pub pseudo_min: f64,
    pub dual_min: f64,
}

pub fn paired_pseudo(name: &str, params: &ExactParams) -> Result<PairedReport> {
    let primal = exact_trace(name, params)?;
    let (dual_name, dual_params) = dual_exact(name, params)?;
    let dual_trace = exact_trace(dual_name, &dual_params)?;
    let pseudo = pseudo_lhs(&primal)?;
    let dual_standard = standard_lhs(&dual_trace, dual_params.speed.p)?;
    let mut max_gap = 0.0_f64;
    for a in &pseudo {
        if let Some(b) = dual_standard.iter().find(|b| (b.t - a.t).abs() <= 1e-12 * a.t.abs().max(1.0)) {
            for (x, y) in a.values.iter().zip(&b.values) {
                max_gap = max_gap.max((x - y).abs());
            }
        }
    }
    let min_of = |v: &[LhsRecord]| v.iter().flat_map(|r| r.values.iter().copied()).fold(f64::INFINITY, f64::min);
    Ok(PairedReport {
        primal_id: primal.meta.id.clone(),
        dual_id: dual_trace.meta.id.clone(),
        pseudo_min: min_of(&pseudo),
        dual_min: min_of(&dual_standard),
        pseudo,
        dual_standard,
        max_gap,
    })
}
