//! Cross curvature flow of metrics induced on convex hypersurfaces of
//! Minkowski 4-space.
//!
//! Curvature tensors in this module use the sign convention in which the
//! Gauss equation reads `R_ijkl = −(h_ik h_jl − h_il h_jk)`, so the Einstein
//! tensor of a strictly convex hypersurface is positive definite.

use nalgebra::DMatrix;

use crate::ambient::AmbientKind;
use crate::error::{domain, usage, Error, Result};
use crate::flow::{FlowTrace, Shape};
use crate::harnack::LhsRecord;
use crate::shape::{Grid, SupportState};
use crate::symfun::{Kappa, SymFn};

fn require_three(kappa: &Kappa) -> Result<()> {
    if kappa.len() != 3 {
        return Err(usage(format!("the cross curvature tensor needs n = 3, got n = {}", kappa.len())));
    }
    Ok(())
}

/// `E = diag(κ₂κ₃, κ₁κ₃, κ₁κ₂)` in a principal frame.
pub fn einstein_tensor(kappa: &Kappa) -> Result<DMatrix<f64>> {
    require_three(kappa)?;
    let k = kappa.as_slice();
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![k[1] * k[2], k[0] * k[2], k[0] * k[1]])))
}

/// `E_ij = (H/2 g_ij − h_ij) H + h_i^k h_kj − |A|²/2 g_ij` from the
/// fundamental forms in an arbitrary frame.
pub fn einstein_from_forms(g: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let g_inv = g.clone().try_inverse().ok_or_else(|| domain("singular metric"))?;
    let w = &g_inv * h;
    let mean = w.trace();
    let norm2 = (&w * &w).trace();
    Ok((g * (0.5 * mean) - h) * mean + h * &w - g * (0.5 * norm2))
}

/// `c = (det E) E⁻¹` in a principal frame, checked against `K h`.
pub fn cross_tensor(kappa: &Kappa) -> Result<DMatrix<f64>> {
    let e = einstein_tensor(kappa)?;
    let det = e.determinant();
    let inv = e.clone().try_inverse().filter(|_| det > 0.0).ok_or_else(|| {
        Error::Domain(format!("Einstein tensor is not positive definite at {:?}", kappa.as_slice()))
    })?;
    let c = inv * det;
    let k: f64 = kappa.as_slice().iter().product();
    let kh = DMatrix::from_fn(3, 3, |i, j| if i == j { k * kappa[i] } else { 0.0 });
    let defect = (&c - &kh).abs().max();
    if defect > 1e-12 * kh.abs().max() {
        return Err(Error::Invariant(format!("(det E) E^-1 differs from K h by {defect:e}")));
    }
    Ok(c)
}

/// Cross curvature data at one node, in a principal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct XcfSample {
    pub kappa: Kappa,
    pub gauss: f64,
    pub einstein: DMatrix<f64>,
    pub cross: DMatrix<f64>,
}

impl XcfSample {
    pub fn new(kappa: &Kappa) -> Result<Self> {
        Ok(XcfSample {
            kappa: kappa.clone(),
            gauss: kappa.as_slice().iter().product(),
            einstein: einstein_tensor(kappa)?,
            cross: cross_tensor(kappa)?,
        })
    }

    /// `|det E − K²| / K²`.
    pub fn det_defect(&self) -> f64 {
        (self.einstein.determinant() - self.gauss * self.gauss).abs() / (self.gauss * self.gauss)
    }
}

/// Accepts traces of Gauss curvature flow of 3-dimensional hypersurfaces
/// in Minkowski space.
pub fn check_xcf_trace(trace: &FlowTrace) -> Result<()> {
    let amb = trace.meta.ambient;
    let sp = &trace.meta.speed;
    if amb.kind != AmbientKind::Minkowski || amb.n != 3 {
        return Err(usage("the cross curvature flow is realized in Minkowski 4-space"));
    }
    let gauss = matches!(sp.base, SymFn::GaussRoot | SymFn::ElemSym(3)) && sp.p == 3.0;
    if !gauss || !sp.is_isotropic() {
        return Err(usage("the cross curvature flow needs f = K"));
    }
    if !matches!(trace.meta.grid, Grid::HyperbolicRadial { .. }) {
        return Err(usage("the cross curvature check runs on radial traces"));
    }
    Ok(())
}

/// Largest `‖ġ − 2c‖ / ‖g‖` over the interior nodes and the records with a
/// time derivative, where `ġ` is the metric derivative along the normal flow.
///
/// The derivative is taken in the Gauss-map parameterization and corrected
/// by the Lie derivative along the drift `−grad_h f`.
pub fn xcf_metric_check(trace: &FlowTrace) -> Result<f64> {
    check_xcf_trace(trace)?;
    let mut worst: Option<f64> = None;
    for i in 0..trace.len() {
        let Some(sdot) = trace.value_rate(i) else { continue };
        let Shape::Support(state) = &trace.records[i].state else {
            return Err(usage("cross curvature check expects support states"));
        };
        let r = radial_radii(state);
        let rdot = radial_radii(&state.with_values(sdot, state.t));
        let grid = &state.grid;
        let f = &trace.records[i].f;
        let (f_rho, _) = grid.derivatives_1d(f);
        let v: Vec<f64> = (0..f.len()).map(|j| -f_rho[j] / r[j].0).collect();
        let (v_rho, _) = grid.derivatives_1d_odd(&v);
        let g1: Vec<f64> = r.iter().map(|x| x.0 * x.0).collect();
        let g2: Vec<f64> = r.iter().map(|x| x.1 * x.1).collect();
        let (g1_rho, _) = grid.derivatives_1d(&g1);
        let (g2_rho, _) = grid.derivatives_1d(&g2);
        for j in grid.interior() {
            let rho = grid.coord(j);
            let lie1 = v[j] * g1_rho[j] + 2.0 * g1[j] * v_rho[j];
            let lie2 = v[j] * (g2_rho[j] + 2.0 * g2[j] / rho.tanh());
            let gdot1 = 2.0 * r[j].0 * rdot[j].0 - lie1;
            let gdot2 = 2.0 * r[j].1 * rdot[j].1 - lie2;
            let kappa = &trace.records[i].kappa[j];
            let k: f64 = kappa.as_slice().iter().product();
            let (c1, c2) = (k * r[j].0, k * r[j].1);
            let res = ((gdot1 - 2.0 * c1).powi(2) + 2.0 * (gdot2 - 2.0 * c2).powi(2)).sqrt();
            let norm = (g1[j] * g1[j] + 2.0 * g2[j] * g2[j]).sqrt();
            worst = Some(worst.unwrap_or(0.0).max(res / norm));
        }
    }
    worst.ok_or_else(|| usage("no record of the trace has a time derivative"))
}

/// Meridian and azimuthal principal radii of a radial support state.
fn radial_radii(state: &SupportState) -> Vec<(f64, f64)> {
    state.radii_forms().iter().map(|m| (m[(0, 0)], m[(1, 1)])).collect()
}

/// `∂_t √det E + 3/(4t) √det E` per node in the Gauss-map parameterization.
pub fn xcf_harnack(trace: &FlowTrace) -> Result<Vec<LhsRecord>> {
    check_xcf_trace(trace)?;
    let roots = trace
        .records
        .iter()
        .map(|r| {
            r.kappa
                .iter()
                .map(|k| Ok(einstein_tensor(k)?.determinant().sqrt()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..trace.len() {
        let rate = match &trace.records[i].rates {
            Some(rates) => {
                Some(rates.f.iter().zip(&trace.records[i].f).zip(&roots[i]).map(|((d, f), q)| d * q / f).collect())
            }
            None => trace.time_derivative(i, &roots),
        };
        let Some(rate) = rate else { continue };
        let tau = trace.clock(i);
        if tau <= 0.0 {
            return Err(domain(format!("Harnack clock t = {tau} is not positive")));
        }
        let values = rate.iter().zip(&roots[i]).map(|(d, q): (&f64, &f64)| d + 0.75 / tau * q).collect();
        out.push(LhsRecord { index: i, t: trace.records[i].t, clock: tau, values });
    }
    Ok(out)
}
