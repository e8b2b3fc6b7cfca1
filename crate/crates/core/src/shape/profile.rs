use serde::{Deserialize, Serialize};

use super::field::{CurvatureField, NodeGeometry, Principal};
use super::grid::Grid;
use super::support::check_positive;
use crate::ambient::{AmbientKind, AmbientSpec};
use crate::error::{usage, Error, Result};
use crate::symfun::Kappa;

use nalgebra::DMatrix;

/// Rotationally symmetric hypersurface in a curved space form, written as a
/// graph `r = u(θ)` over the geodesic polar angle about a base point.
///
/// The ambient metric is the warped product `ε dr² + φ(r)² ĝ` with
/// `(φ, ε) = (sin, +1)` on the sphere, `(sinh, +1)` in hyperbolic space and
/// `(cosh, −1)` in de Sitter space, where `r` is the time coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub ambient: AmbientSpec,
    pub grid: Grid,
    #[serde(rename = "samples")]
    pub rho: Vec<f64>,
    pub t: f64,
}

/// Warped-product data of the profile at one node.
#[derive(Clone, Copy, Debug)]
pub struct ProfileNode {
    pub theta: f64,
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub warp: f64,
    pub w: f64,
    pub kappa_mer: f64,
    pub kappa_az: f64,
}

/// `(φ(r), φ'(r), ε)` of the warped product.
pub fn warp(kind: AmbientKind, r: f64) -> (f64, f64, f64) {
    match kind {
        AmbientKind::Sphere => (r.sin(), r.cos(), 1.0),
        AmbientKind::Hyperbolic => (r.sinh(), r.cosh(), 1.0),
        AmbientKind::DeSitter => (r.cosh(), r.sinh(), -1.0),
        _ => unreachable!("flat ambients use support functions"),
    }
}

impl ProfileState {
    pub fn new(ambient: AmbientSpec, grid: Grid, rho: Vec<f64>, t: f64) -> Result<Self> {
        grid.validate()?;
        if ambient.kind.is_flat() {
            return Err(usage("profiles describe hypersurfaces in curved ambients"));
        }
        match grid {
            Grid::SphereAxisym { dim, .. } if dim == ambient.n => {}
            _ => return Err(usage(format!("profiles need an axisymmetric grid of dimension {}", ambient.n))),
        }
        if rho.len() != grid.len() {
            return Err(usage(format!("{} samples for a grid of {} nodes", rho.len(), grid.len())));
        }
        Ok(ProfileState { ambient, grid, rho, t })
    }

    pub fn from_fn(ambient: AmbientSpec, nodes: usize, t: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = Grid::SphereAxisym { nodes, dim: ambient.n };
        let rho = grid.coords().into_iter().map(f).collect();
        Self::new(ambient, grid, rho, t)
    }

    /// Geodesic sphere or de Sitter slice at constant graph value.
    pub fn umbilic(ambient: AmbientSpec, nodes: usize, value: f64, t: f64) -> Result<Self> {
        Self::from_fn(ambient, nodes, t, |_| value)
    }

    pub fn with_values(&self, rho: Vec<f64>, t: f64) -> Self {
        ProfileState { ambient: self.ambient, grid: self.grid.clone(), rho, t }
    }

    /// Warped-product data and principal curvatures per node; fails when
    /// the graph leaves the chart, stops being spacelike or loses convexity.
    pub fn nodes(&self) -> Result<Vec<ProfileNode>> {
        let kind = self.ambient.kind;
        let (d1, d2) = self.grid.derivatives_1d(&self.rho);
        let mut out = Vec::with_capacity(self.rho.len());
        for (j, &u) in self.rho.iter().enumerate() {
            let chart_ok = match kind {
                AmbientKind::Sphere => u > 0.0 && u < std::f64::consts::PI,
                AmbientKind::Hyperbolic => u > 0.0,
                _ => u.is_finite(),
            };
            if !chart_ok {
                return Err(Error::DegenerateShape {
                    node: j,
                    eigenvalue: u,
                    detail: "profile left the chart".into(),
                });
            }
            let theta = self.grid.coord(j);
            let (du, d2u) = (d1[j], d2[j]);
            let (phi, dphi, eps) = warp(kind, u);
            let w2 = phi * phi + eps * du * du;
            if w2 <= 0.0 {
                return Err(Error::DegenerateShape {
                    node: j,
                    eigenvalue: w2,
                    detail: "profile is not spacelike".into(),
                });
            }
            let w = w2.sqrt();
            let a = phi / w;
            let b = -eps * du / (phi * w);
            let dw = (phi * dphi * du + eps * du * d2u) / w;
            let da = (dphi * du * w - phi * dw) / w2;
            let db = -eps * (d2u * phi * w - du * (dphi * du * w + phi * dw)) / (phi * w).powi(2);
            let kappa_mer = (eps * (da - eps * phi * dphi * b) * du
                + phi * phi * (db + dphi / phi * (a + b * du)))
                / w2;
            let kappa_az = dphi / w - eps * du / (theta.tan() * phi * w);
            out.push(ProfileNode { theta, u, du, d2u, warp: phi, w, kappa_mer, kappa_az });
        }
        let kappas: Vec<Vec<f64>> = out.iter().map(|p| vec![p.kappa_mer, p.kappa_az]).collect();
        check_positive(&kappas, "principal curvature is not positive")?;
        Ok(out)
    }

    fn kappa_of(&self, node: &ProfileNode) -> Result<Kappa> {
        let mut k = vec![node.kappa_az; self.ambient.n];
        k[0] = node.kappa_mer;
        Kappa::new(k)
    }

    pub fn principal(&self) -> Result<Principal> {
        let nodes = self.nodes()?;
        let kappa = nodes.iter().map(|p| self.kappa_of(p)).collect::<Result<Vec<_>>>()?;
        let nu_axial = nodes.iter().map(|p| self.embed(p).1[self.ambient.n + 1]).collect();
        Ok(Principal { kappa, nu_axial })
    }

    /// Position and unit normal in model coordinates `(e_0, ω_1, …, ω_{n+1})`,
    /// with the profile drawn in the plane spanned by `e_0`, `ω_1` and `ω_{n+1}`.
    pub fn embed(&self, node: &ProfileNode) -> (Vec<f64>, Vec<f64>) {
        let n = self.ambient.n;
        let (u, th) = (node.u, node.theta);
        let (phi, _, eps) = warp(self.ambient.kind, u);
        let (c0, c1, r0, r1) = match self.ambient.kind {
            AmbientKind::Sphere => (u.cos(), u.sin(), -u.sin(), u.cos()),
            AmbientKind::Hyperbolic => (u.cosh(), u.sinh(), u.sinh(), u.cosh()),
            _ => (u.sinh(), u.cosh(), u.cosh(), u.sinh()),
        };
        let a = phi / node.w;
        let b = -eps * node.du / (phi * node.w);
        let mut x = vec![0.0; n + 2];
        let mut nu = vec![0.0; n + 2];
        x[0] = c0;
        x[1] = c1 * th.sin();
        x[n + 1] = c1 * th.cos();
        nu[0] = a * r0;
        nu[1] = a * r1 * th.sin() + b * phi * th.cos();
        nu[n + 1] = a * r1 * th.cos() - b * phi * th.sin();
        (x, nu)
    }
}

/// Full local geometry of a profile, in an orthonormal principal frame of
/// the induced metric.
pub fn curvature_from_profile(state: &ProfileState) -> Result<CurvatureField> {
    let nodes = state.nodes()?;
    let n = state.ambient.n;
    let geometry = nodes
        .iter()
        .map(|p| {
            let kappa = state.kappa_of(p)?;
            let (x, nu) = state.embed(p);
            let h = DMatrix::from_fn(n, n, |i, j| if i == j { kappa[i] } else { 0.0 });
            Ok(NodeGeometry {
                kappa,
                g: DMatrix::identity(n, n),
                w: h.clone(),
                h,
                nu_axial: nu[n + 1],
                nu,
                x,
                value: p.u,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureField { ambient: state.ambient, nodes: geometry })
}
