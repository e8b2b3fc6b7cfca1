use serde::{Deserialize, Serialize};

use super::trace::{centred_weights, FlowTrace};
use crate::ambient::AmbientKind;
use crate::error::{usage, Result};
use crate::shape::Grid;

/// Largest relative residuals of the basic evolution identities, measured
/// with finite differences in space and time along a Euclidean trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResiduals {
    /// Change of the unit normal attached to a fixed parameter point.
    pub normal: f64,
    /// `ġ + 2 (g A)_sym`.
    pub metric: f64,
    /// `ḣ + h A`, the flat form of `ḣ = −f B + Λ`.
    pub second_form: f64,
    /// `Ẇ − A W`.
    pub weingarten: f64,
    pub records_checked: usize,
}

/// Meridian and azimuthal components of the geometry at one record.
struct Components {
    x: Vec<Vec<f64>>,
    nu: Vec<Vec<f64>>,
    g: Vec<[f64; 2]>,
    h: Vec<[f64; 2]>,
}

fn spatial_derivative(grid: &Grid, values: &[Vec<f64>], comp: usize, parity: f64) -> Vec<f64> {
    // Meridian components flip sign across the axis, axial ones do not.
    let col: Vec<f64> = values.iter().map(|v| v[comp]).collect();
    let n = col.len();
    let h = grid.spacing();
    let at = |i: isize| -> f64 {
        match grid {
            Grid::Circle { .. } => col[i.rem_euclid(n as isize) as usize],
            _ if i < 0 => parity * col[(-i - 1) as usize],
            _ if i >= n as isize => parity * col[2 * n - 1 - i as usize],
            _ => col[i as usize],
        }
    };
    (0..n as isize).map(|i| (at(i + 1) - at(i - 1)) / (2.0 * h)).collect()
}

fn tangent_vectors(grid: &Grid, values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = values[0].len();
    let cols: Vec<Vec<f64>> = (0..dim)
        .map(|c| {
            let parity = if matches!(grid, Grid::SphereAxisym { .. }) && c == 0 { -1.0 } else { 1.0 };
            spatial_derivative(grid, values, c, parity)
        })
        .collect();
    (0..values.len()).map(|j| (0..dim).map(|c| cols[c][j]).collect()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn components(trace: &FlowTrace, i: usize) -> Result<Components> {
    let field = trace.records[i].state.curvature()?;
    let x: Vec<Vec<f64>> = field.nodes.iter().map(|n| n.x.clone()).collect();
    let nu: Vec<Vec<f64>> = field.nodes.iter().map(|n| n.nu.clone()).collect();
    let grid = trace.records[i].state.grid();
    let xt = tangent_vectors(grid, &x);
    let zt = tangent_vectors(grid, &nu);
    let axisym = matches!(grid, Grid::SphereAxisym { .. });
    let g = (0..x.len())
        .map(|j| [dot(&xt[j], &xt[j]), if axisym { x[j][0] * x[j][0] } else { 0.0 }])
        .collect();
    let h = (0..x.len())
        .map(|j| [dot(&zt[j], &xt[j]), if axisym { x[j][0] * nu[j][0] } else { 0.0 }])
        .collect();
    Ok(Components { x, nu, g, h })
}

/// Checks `ν̇ = 0`, `ġ = −2 A♭_sym`, `ḣ = −f B` and `Ẇ = A ∘ W` on every
/// record with a full time stencil, where `A(X) = −D_X ẋ`.
pub fn verify_flat_evolution(trace: &FlowTrace) -> Result<EvolutionResiduals> {
    if trace.meta.ambient.kind != AmbientKind::Euclidean {
        return Err(usage("flat evolution identities are checked in Euclidean space"));
    }
    if !matches!(trace.meta.grid, Grid::Circle { .. } | Grid::SphereAxisym { .. }) {
        return Err(usage("flat evolution check supports curve and axisymmetric grids"));
    }
    if trace.len() < 3 {
        return Err(usage("flat evolution check needs at least three records"));
    }
    let comps = (0..trace.len()).map(|i| components(trace, i)).collect::<Result<Vec<_>>>()?;
    let times = trace.times();
    let grid = &trace.meta.grid;
    let axisym = matches!(grid, Grid::SphereAxisym { .. });
    let mut out = EvolutionResiduals { normal: 0.0, metric: 0.0, second_form: 0.0, weingarten: 0.0, records_checked: 0 };
    for i in 0..trace.len() {
        let Some(weights) = centred_weights(&times, i) else { continue };
        out.records_checked += 1;
        let c = &comps[i];
        let nodes = c.x.len();
        let dim = c.x[0].len();
        let deriv = |get: &dyn Fn(&Components, usize) -> f64, j: usize| -> f64 {
            weights.iter().map(|(k, w)| w * get(&comps[*k], j)).sum()
        };
        let xdot: Vec<Vec<f64>> = (0..nodes)
            .map(|j| (0..dim).map(|d| deriv(&|cc, jj| cc.x[jj][d], j)).collect())
            .collect();
        let xdot_t = tangent_vectors(grid, &xdot);
        let xt = tangent_vectors(grid, &c.x);
        let (mut scale_g, mut scale_h, mut scale_w) = (0.0_f64, 0.0_f64, 0.0_f64);
        let (mut res_g, mut res_h, mut res_w, mut res_n) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
        for j in 0..nodes {
            let nudot: f64 = (0..dim).map(|d| deriv(&|cc, jj| cc.nu[jj][d], j).abs()).fold(0.0, f64::max);
            res_n = res_n.max(nudot);
            let a_mer = -dot(&xdot_t[j], &xt[j]) / c.g[j][0];
            let mut a = vec![a_mer];
            if axisym {
                a.push(-xdot[j][0] / c.x[j][0]);
            }
            for (comp, &ac) in a.iter().enumerate() {
                let gdot = deriv(&|cc, jj| cc.g[jj][comp], j);
                let hdot = deriv(&|cc, jj| cc.h[jj][comp], j);
                let w_of = |cc: &Components, jj: usize| cc.h[jj][comp] / cc.g[jj][comp];
                let wdot = deriv(&w_of, j);
                let (g, h) = (c.g[j][comp], c.h[j][comp]);
                res_g = res_g.max((gdot + 2.0 * g * ac).abs());
                res_h = res_h.max((hdot + h * ac).abs());
                res_w = res_w.max((wdot - ac * h / g).abs());
                scale_g = scale_g.max(gdot.abs()).max((g * ac).abs());
                scale_h = scale_h.max(hdot.abs()).max((h * ac).abs());
                scale_w = scale_w.max(wdot.abs()).max((ac * h / g).abs());
            }
        }
        out.normal = out.normal.max(res_n);
        out.metric = out.metric.max(res_g / scale_g.max(f64::MIN_POSITIVE));
        out.second_form = out.second_form.max(res_h / scale_h.max(f64::MIN_POSITIVE));
        out.weingarten = out.weingarten.max(res_w / scale_w.max(f64::MIN_POSITIVE));
    }
    if out.records_checked == 0 {
        return Err(usage("no record has time neighbours on both sides"));
    }
    Ok(out)
}
