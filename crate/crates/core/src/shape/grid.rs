use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// Sampling of the parameter domain.
///
/// Polar and radial grids are cell-centred, so no node sits on a pole or on
/// the rotation axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    /// Uniform periodic angles on `S^1`.
    Circle { nodes: usize },
    /// Rotationally symmetric functions on `S^dim`, sampled in the polar angle.
    SphereAxisym { nodes: usize, dim: usize },
    /// Latitude-longitude grid on `S^2`.
    SphereLatLong { n_theta: usize, n_phi: usize },
    /// Rotationally symmetric functions on `H^dim`, sampled in the geodesic
    /// distance from the base point on `[0, rho_max]`.
    HyperbolicRadial { nodes: usize, rho_max: f64, dim: usize },
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Grid::Circle { nodes } if nodes < 8 => Err(usage("circle grid needs at least 8 nodes")),
            Grid::SphereAxisym { nodes, dim } if nodes < 4 || dim == 0 => {
                Err(usage("axisymmetric grid needs at least 4 nodes and dim >= 1"))
            }
            Grid::SphereLatLong { n_theta, n_phi } if n_theta < 4 || n_phi < 8 || n_phi % 2 == 1 => {
                Err(usage("lat-long grid needs n_theta >= 4 and an even n_phi >= 8"))
            }
            Grid::HyperbolicRadial { nodes, rho_max, dim } if nodes < 4 || rho_max <= 0.0 || dim == 0 => {
                Err(usage("radial grid needs at least 4 nodes and rho_max > 0"))
            }
            _ => Ok(()),
        }
    }

    /// Dimension of the hypersurface parameterized by the grid.
    pub fn dim(&self) -> usize {
        match *self {
            Grid::Circle { .. } => 1,
            Grid::SphereAxisym { dim, .. } | Grid::HyperbolicRadial { dim, .. } => dim,
            Grid::SphereLatLong { .. } => 2,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Grid::Circle { nodes } | Grid::SphereAxisym { nodes, .. } => nodes,
            Grid::HyperbolicRadial { nodes, .. } => nodes,
            Grid::SphereLatLong { n_theta, n_phi } => n_theta * n_phi,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest coordinate spacing, used for the time-step bound.
    pub fn spacing(&self) -> f64 {
        match *self {
            Grid::Circle { nodes } => 2.0 * PI / nodes as f64,
            Grid::SphereAxisym { nodes, .. } => PI / nodes as f64,
            Grid::SphereLatLong { n_theta, n_phi } => {
                let dt = PI / n_theta as f64;
                let dp = 2.0 * PI / n_phi as f64;
                dt.min(dp * (0.5 * dt).sin())
            }
            Grid::HyperbolicRadial { nodes, rho_max, .. } => rho_max / nodes as f64,
        }
    }

    /// The primary coordinate (angle, polar angle or radius) of node `j`.
    pub fn coord(&self, j: usize) -> f64 {
        match *self {
            Grid::Circle { nodes } => 2.0 * PI * j as f64 / nodes as f64,
            Grid::SphereAxisym { nodes, .. } => (j as f64 + 0.5) * PI / nodes as f64,
            Grid::SphereLatLong { n_theta, n_phi } => {
                (((j / n_phi) as f64) + 0.5) * PI / n_theta as f64
            }
            Grid::HyperbolicRadial { nodes, rho_max, .. } => {
                (j as f64 + 0.5) * rho_max / nodes as f64
            }
        }
    }

    /// Longitude of node `j` on the lat-long grid, zero elsewhere.
    pub fn longitude(&self, j: usize) -> f64 {
        match *self {
            Grid::SphereLatLong { n_phi, .. } => 2.0 * PI * (j % n_phi) as f64 / n_phi as f64,
            _ => 0.0,
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.coord(j)).collect()
    }

    /// A grid with doubled resolution in every direction.
    pub fn refined(&self) -> Grid {
        match *self {
            Grid::Circle { nodes } => Grid::Circle { nodes: 2 * nodes },
            Grid::SphereAxisym { nodes, dim } => Grid::SphereAxisym { nodes: 2 * nodes, dim },
            Grid::SphereLatLong { n_theta, n_phi } => {
                Grid::SphereLatLong { n_theta: 2 * n_theta, n_phi: 2 * n_phi }
            }
            Grid::HyperbolicRadial { nodes, rho_max, dim } => {
                Grid::HyperbolicRadial { nodes: 2 * nodes, rho_max, dim }
            }
        }
    }

    /// Nodes on which analysis is meaningful: the whole grid, except the
    /// outer fifth of a truncated radial domain.
    pub fn interior(&self) -> Vec<usize> {
        match *self {
            Grid::HyperbolicRadial { nodes, rho_max, .. } => {
                (0..nodes).filter(|&j| self.coord(j) <= 0.8 * rho_max).collect()
            }
            _ => (0..self.len()).collect(),
        }
    }

    /// First and second centred differences of a one-dimensional field,
    /// using the grid's boundary conditions for the ghost values.
    pub(crate) fn derivatives_1d(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.derivatives_1d_parity(v, 1.0)
    }

    /// As `derivatives_1d` for a field that changes sign under reflection
    /// through a pole or the origin.
    pub(crate) fn derivatives_1d_odd(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.derivatives_1d_parity(v, -1.0)
    }

    fn derivatives_1d_parity(&self, v: &[f64], parity: f64) -> (Vec<f64>, Vec<f64>) {
        let n = v.len();
        let h = self.spacing();
        let at = |i: isize| -> f64 {
            match *self {
                Grid::Circle { .. } => v[i.rem_euclid(n as isize) as usize],
                Grid::SphereAxisym { .. } => {
                    if i < 0 {
                        parity * v[(-i - 1) as usize]
                    } else if i >= n as isize {
                        parity * v[2 * n - 1 - i as usize]
                    } else {
                        v[i as usize]
                    }
                }
                Grid::HyperbolicRadial { .. } => {
                    if i < 0 {
                        parity * v[(-i - 1) as usize]
                    } else if i >= n as isize {
                        2.0 * v[n - 1] - v[n - 2]
                    } else {
                        v[i as usize]
                    }
                }
                Grid::SphereLatLong { .. } => unreachable!("two-dimensional grid"),
            }
        };
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for j in 0..n {
            let i = j as isize;
            let (m, c, p) = (at(i - 1), v[j], at(i + 1));
            d1[j] = (p - m) / (2.0 * h);
            d2[j] = (p - 2.0 * c + m) / (h * h);
        }
        (d1, d2)
    }

    /// `(s_θ, s_φ, s_θθ, s_θφ, s_φφ)` on the lat-long grid, continuing across
    /// the poles by `s(−θ, φ) = s(θ, φ + π)`.
    pub(crate) fn derivatives_latlong(&self, v: &[f64]) -> [Vec<f64>; 5] {
        let Grid::SphereLatLong { n_theta, n_phi } = *self else {
            unreachable!("lat-long derivatives on another grid")
        };
        let ht = PI / n_theta as f64;
        let hp = 2.0 * PI / n_phi as f64;
        let at = |i: isize, k: isize| -> f64 {
            let (mut i, mut k) = (i, k);
            if i < 0 {
                i = -i - 1;
                k += n_phi as isize / 2;
            } else if i >= n_theta as isize {
                i = 2 * n_theta as isize - 1 - i;
                k += n_phi as isize / 2;
            }
            v[i as usize * n_phi + k.rem_euclid(n_phi as isize) as usize]
        };
        let len = v.len();
        let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        for i in 0..n_theta as isize {
            for k in 0..n_phi as isize {
                let j = i as usize * n_phi + k as usize;
                let c = v[j];
                out[0][j] = (at(i + 1, k) - at(i - 1, k)) / (2.0 * ht);
                out[1][j] = (at(i, k + 1) - at(i, k - 1)) / (2.0 * hp);
                out[2][j] = (at(i + 1, k) - 2.0 * c + at(i - 1, k)) / (ht * ht);
                out[3][j] = (at(i + 1, k + 1) - at(i + 1, k - 1) - at(i - 1, k + 1)
                    + at(i - 1, k - 1))
                    / (4.0 * ht * hp);
                out[4][j] = (at(i, k + 1) - 2.0 * c + at(i, k - 1)) / (hp * hp);
            }
        }
        out
    }
}
