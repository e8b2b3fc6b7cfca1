use nalgebra::DMatrix;

use crate::ambient::AmbientSpec;
use crate::error::{Error, Result};
use crate::symfun::{CurvatureFunctionSpec, Kappa};

/// Principal curvatures and normal data per node, without the full frame
/// information; this is what the time stepper needs.
#[derive(Clone, Debug)]
pub struct Principal {
    pub kappa: Vec<Kappa>,
    /// Axial component of the unit normal, the argument of `ψ`.
    pub nu_axial: Vec<f64>,
}

/// Local geometry at one node.
///
/// `g`, `h` and `W = g⁻¹h` are expressed in a frame that is orthonormal for
/// the metric of the parameter domain (support states) or for the induced
/// metric (profiles).
#[derive(Clone, Debug)]
pub struct NodeGeometry {
    pub kappa: Kappa,
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub w: DMatrix<f64>,
    /// Unit normal in ambient model coordinates.
    pub nu: Vec<f64>,
    /// Position in ambient model coordinates.
    pub x: Vec<f64>,
    /// Support value (flat ambients) or graph value (profiles).
    pub value: f64,
    pub nu_axial: f64,
}

#[derive(Clone, Debug)]
pub struct CurvatureField {
    pub ambient: AmbientSpec,
    pub nodes: Vec<NodeGeometry>,
}

impl CurvatureField {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn kappas(&self) -> Vec<Kappa> {
        self.nodes.iter().map(|n| n.kappa.clone()).collect()
    }

    pub fn principal(&self) -> Principal {
        Principal {
            kappa: self.kappas(),
            nu_axial: self.nodes.iter().map(|n| n.nu_axial).collect(),
        }
    }

    /// Largest `|g W − h|` over the nodes.
    pub fn weingarten_defect(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| (&n.g * &n.w - &n.h).abs().max())
            .fold(0.0, f64::max)
    }
}

/// Speed `f` per node. `s_values` feeds `φ`; profiles pass their graph values
/// and require `φ ≡ 1`.
pub fn speed_field(
    curv: &CurvatureField,
    spec: &CurvatureFunctionSpec,
    s_values: &[f64],
) -> Result<Vec<f64>> {
    speed_from_principal(&curv.principal(), spec, s_values)
}

pub(crate) fn speed_from_principal(
    pr: &Principal,
    spec: &CurvatureFunctionSpec,
    s_values: &[f64],
) -> Result<Vec<f64>> {
    pr.kappa
        .iter()
        .zip(&pr.nu_axial)
        .zip(s_values)
        .enumerate()
        .map(|(j, ((k, &nu), &s))| {
            spec.eval(k, s, nu).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("node {j}: {msg}")),
                other => other,
            })
        })
        .collect()
}
