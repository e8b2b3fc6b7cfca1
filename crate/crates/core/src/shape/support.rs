use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::field::{CurvatureField, NodeGeometry, Principal};
use super::grid::Grid;
use crate::ambient::{AmbientKind, AmbientSpec};
use crate::error::{usage, Error, Result};
use crate::symfun::Kappa;

/// Support function of a convex hypersurface in a flat ambient, sampled on
/// the Gauss-map domain (`S^n` in Euclidean space, `H^n` in Minkowski space).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportState {
    pub ambient: AmbientSpec,
    pub grid: Grid,
    #[serde(rename = "samples")]
    pub s: Vec<f64>,
    pub t: f64,
}

impl SupportState {
    pub fn new(ambient: AmbientSpec, grid: Grid, s: Vec<f64>, t: f64) -> Result<Self> {
        grid.validate()?;
        let ok = match (ambient.kind, &grid) {
            (AmbientKind::Euclidean, Grid::Circle { .. }) => ambient.n == 1,
            (AmbientKind::Euclidean, Grid::SphereAxisym { dim, .. }) => *dim == ambient.n,
            (AmbientKind::Euclidean, Grid::SphereLatLong { .. }) => ambient.n == 2,
            (AmbientKind::Minkowski, Grid::HyperbolicRadial { dim, .. }) => *dim == ambient.n,
            _ => false,
        };
        if !ok {
            return Err(usage(format!("grid {grid:?} does not parameterize hypersurfaces in {ambient}")));
        }
        if s.len() != grid.len() {
            return Err(usage(format!("{} samples for a grid of {} nodes", s.len(), grid.len())));
        }
        Ok(SupportState { ambient, grid, s, t })
    }

    /// Samples `s(z)` as a function of the unit normal `z` in model coordinates.
    pub fn from_normal_fn(
        ambient: AmbientSpec,
        grid: Grid,
        t: f64,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let s = (0..grid.len()).map(|j| f(&normal_at(&grid, ambient.n, j))).collect();
        Self::new(ambient, grid, s, t)
    }

    /// The round sphere (Euclidean) or hyperboloid `λ H^n` (Minkowski) of the given scale.
    pub fn round(ambient: AmbientSpec, grid: Grid, scale: f64, t: f64) -> Result<Self> {
        let len = grid.len();
        Self::new(ambient, grid, vec![scale; len], t)
    }

    pub fn with_values(&self, s: Vec<f64>, t: f64) -> Self {
        SupportState { ambient: self.ambient, grid: self.grid.clone(), s, t }
    }

    /// Unit normal of node `j` in model coordinates.
    pub fn normal(&self, j: usize) -> Vec<f64> {
        normal_at(&self.grid, self.ambient.n, j)
    }

    /// Symmetric radii-of-curvature form per node, in a frame orthonormal
    /// for the metric of the Gauss-map domain.
    pub fn radii_forms(&self) -> Vec<DMatrix<f64>> {
        let n = self.ambient.n;
        let s = &self.s;
        match self.grid {
            Grid::Circle { .. } => {
                let (_, d2) = self.grid.derivatives_1d(s);
                (0..s.len()).map(|j| DMatrix::from_element(1, 1, s[j] + d2[j])).collect()
            }
            Grid::SphereAxisym { .. } => {
                let (d1, d2) = self.grid.derivatives_1d(s);
                (0..s.len())
                    .map(|j| {
                        let th = self.grid.coord(j);
                        let r_az = d1[j] / th.tan() + s[j];
                        DMatrix::from_fn(n, n, |a, b| match (a, b) {
                            (0, 0) => d2[j] + s[j],
                            (a, b) if a == b => r_az,
                            _ => 0.0,
                        })
                    })
                    .collect()
            }
            Grid::SphereLatLong { .. } => {
                let [st, sp, stt, stp, spp] = self.grid.derivatives_latlong(s);
                (0..s.len())
                    .map(|j| {
                        let th = self.grid.coord(j);
                        let (si, co) = (th.sin(), th.cos());
                        let off = (stp[j] - co / si * sp[j]) / si;
                        DMatrix::from_row_slice(
                            2,
                            2,
                            &[stt[j] + s[j], off, off, spp[j] / (si * si) + co / si * st[j] + s[j]],
                        )
                    })
                    .collect()
            }
            Grid::HyperbolicRadial { .. } => {
                let (d1, d2) = self.grid.derivatives_1d(s);
                (0..s.len())
                    .map(|j| {
                        let rho = self.grid.coord(j);
                        let r_az = s[j] - d1[j] / rho.tanh();
                        DMatrix::from_fn(n, n, |a, b| match (a, b) {
                            (0, 0) => s[j] - d2[j],
                            (a, b) if a == b => r_az,
                            _ => 0.0,
                        })
                    })
                    .collect()
            }
        }
    }

    /// Principal radii per node; fails on loss of strict convexity.
    pub fn radii(&self) -> Result<Vec<Vec<f64>>> {
        let forms = self.radii_forms();
        let radii: Vec<Vec<f64>> = forms.iter().map(sym_eigenvalues).collect();
        check_positive(&radii, "radii-of-curvature form is not positive definite")?;
        Ok(radii)
    }

    /// Principal curvatures and normal data per node.
    pub fn principal(&self) -> Result<Principal> {
        let radii = self.radii()?;
        let kappa = radii
            .into_iter()
            .map(|r| Kappa::new(r.into_iter().map(|x| 1.0 / x).collect()))
            .collect::<Result<Vec<_>>>()?;
        let nu_axial = (0..self.s.len()).map(|j| axial(self.ambient.kind, &self.normal(j))).collect();
        Ok(Principal { kappa, nu_axial })
    }

    /// Gradient of `s` on the Gauss-map domain per node, in model coordinates.
    fn gradient(&self) -> Vec<Vec<f64>> {
        let n = self.ambient.n;
        let len = self.s.len();
        match self.grid {
            Grid::SphereLatLong { .. } => {
                let [st, sp, ..] = self.grid.derivatives_latlong(&self.s);
                (0..len)
                    .map(|j| {
                        let (th, ph) = (self.grid.coord(j), self.grid.longitude(j));
                        let e_t = [th.cos() * ph.cos(), th.cos() * ph.sin(), -th.sin()];
                        let e_p = [-ph.sin(), ph.cos(), 0.0];
                        let a = st[j];
                        let b = sp[j] / th.sin();
                        (0..3).map(|i| a * e_t[i] + b * e_p[i]).collect()
                    })
                    .collect()
            }
            _ => {
                let (d1, _) = self.grid.derivatives_1d(&self.s);
                (0..len)
                    .map(|j| {
                        let tangent = tangent_at(&self.grid, n, j);
                        tangent.iter().map(|v| d1[j] * v).collect()
                    })
                    .collect()
            }
        }
    }
}

pub(crate) fn check_positive(values: &[Vec<f64>], detail: &str) -> Result<()> {
    let mut worst: Option<(usize, f64)> = None;
    for (j, r) in values.iter().enumerate() {
        for &v in r {
            if !v.is_finite() {
                return Err(Error::DegenerateShape { node: j, eigenvalue: v, detail: detail.into() });
            }
            if worst.is_none_or(|(_, w)| v < w) {
                worst = Some((j, v));
            }
        }
    }
    match worst {
        Some((node, eigenvalue)) if eigenvalue <= 0.0 => {
            Err(Error::DegenerateShape { node, eigenvalue, detail: detail.into() })
        }
        _ => Ok(()),
    }
}

pub(crate) fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    match m.nrows() {
        1 => vec![m[(0, 0)]],
        2 if m[(0, 1)] == 0.0 => vec![m[(0, 0)], m[(1, 1)]],
        2 => {
            let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let mean = 0.5 * (a + c);
            let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            vec![mean - rad, mean + rad]
        }
        _ if (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0)) => {
            m.diagonal().iter().copied().collect()
        }
        _ => m.clone().symmetric_eigen().eigenvalues.iter().copied().collect(),
    }
}

/// Axial component of a unit normal: time coordinate in Lorentzian models,
/// last coordinate otherwise.
pub(crate) fn axial(kind: AmbientKind, nu: &[f64]) -> f64 {
    match kind {
        AmbientKind::Minkowski => nu[0],
        _ => nu[nu.len() - 1],
    }
}

pub(crate) fn normal_at(grid: &Grid, n: usize, j: usize) -> Vec<f64> {
    let c = grid.coord(j);
    match *grid {
        Grid::Circle { .. } => vec![c.cos(), c.sin()],
        Grid::SphereAxisym { .. } => {
            let mut z = vec![0.0; n + 1];
            z[0] = c.sin();
            z[n] = c.cos();
            z
        }
        Grid::SphereLatLong { .. } => {
            let p = grid.longitude(j);
            vec![c.sin() * p.cos(), c.sin() * p.sin(), c.cos()]
        }
        Grid::HyperbolicRadial { .. } => {
            let mut z = vec![0.0; n + 1];
            z[0] = c.cosh();
            z[1] = c.sinh();
            z
        }
    }
}

/// Unit tangent in the direction of the primary coordinate.
fn tangent_at(grid: &Grid, n: usize, j: usize) -> Vec<f64> {
    let c = grid.coord(j);
    match *grid {
        Grid::Circle { .. } => vec![-c.sin(), c.cos()],
        Grid::SphereAxisym { .. } => {
            let mut e = vec![0.0; n + 1];
            e[0] = c.cos();
            e[n] = -c.sin();
            e
        }
        Grid::HyperbolicRadial { .. } => {
            let mut e = vec![0.0; n + 1];
            e[0] = c.sinh();
            e[1] = c.cosh();
            e
        }
        Grid::SphereLatLong { .. } => unreachable!("lat-long gradient handled separately"),
    }
}

/// Full local geometry of a support state.
///
/// Euclidean: `x = s z + ∇s`, radii form `∇²s + s g`. Minkowski:
/// `x = s z − ∇s`, radii form `s g − ∇²s`. In both cases `σ⟨x, z⟩ = s`.
pub fn curvature_from_support(state: &SupportState) -> Result<CurvatureField> {
    let forms = state.radii_forms();
    let radii: Vec<Vec<f64>> = forms.iter().map(sym_eigenvalues).collect();
    check_positive(&radii, "radii-of-curvature form is not positive definite")?;
    let sign = if state.ambient.kind == AmbientKind::Minkowski { -1.0 } else { 1.0 };
    let grads = state.gradient();
    let nodes = forms
        .into_iter()
        .zip(radii)
        .zip(grads)
        .enumerate()
        .map(|(j, ((r, radii), grad))| {
            let z = state.normal(j);
            let x: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| state.s[j] * zi + sign * gi).collect();
            let g = &r * &r;
            let w = r.clone().try_inverse().expect("positive definite radii form");
            let kappa = Kappa::new(radii.iter().map(|v| 1.0 / v).collect())?;
            Ok(NodeGeometry {
                kappa,
                g,
                h: r,
                w,
                nu_axial: axial(state.ambient.kind, &z),
                nu: z,
                x,
                value: state.s[j],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureField { ambient: state.ambient, nodes })
}

impl SupportState {
    /// One CSV row per node: index, coordinates, support value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,coord,longitude,s\n");
        for (j, v) in self.s.iter().enumerate() {
            out.push_str(&format!("{j},{},{},{v}\n", self.grid.coord(j), self.grid.longitude(j)));
        }
        out
    }
}
