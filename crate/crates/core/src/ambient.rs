//! Space-form ambients and their extrinsic models.
//!
//! Curved spaces live in `R^{n+2}` (sphere) or `R^{n+1,1}` (hyperbolic space
//! and de Sitter space, coordinate 0 timelike). Normals are oriented so that
//! geodesic spheres about the base point and slices of de Sitter space have
//! positive principal curvatures.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientKind {
    Euclidean,
    Minkowski,
    Sphere,
    Hyperbolic,
    DeSitter,
}

impl AmbientKind {
    pub const ALL: [AmbientKind; 5] = [
        AmbientKind::Euclidean,
        AmbientKind::Minkowski,
        AmbientKind::Sphere,
        AmbientKind::Hyperbolic,
        AmbientKind::DeSitter,
    ];

    /// `+1` for Riemannian, `−1` for Lorentzian ambients.
    pub fn sigma(self) -> f64 {
        match self {
            AmbientKind::Minkowski | AmbientKind::DeSitter => -1.0,
            _ => 1.0,
        }
    }

    /// Sectional curvature.
    pub fn k_n(self) -> f64 {
        match self {
            AmbientKind::Euclidean | AmbientKind::Minkowski => 0.0,
            AmbientKind::Sphere | AmbientKind::DeSitter => 1.0,
            AmbientKind::Hyperbolic => -1.0,
        }
    }

    pub fn is_flat(self) -> bool {
        self.k_n() == 0.0
    }

    fn name(self) -> &'static str {
        match self {
            AmbientKind::Euclidean => "euclidean",
            AmbientKind::Minkowski => "minkowski",
            AmbientKind::Sphere => "sphere",
            AmbientKind::Hyperbolic => "hyperbolic",
            AmbientKind::DeSitter => "de_sitter",
        }
    }
}

impl fmt::Display for AmbientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AmbientKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        let key = if key == "desitter" { "de_sitter".to_string() } else { key };
        AmbientKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// An ambient space form of dimension `n + 1` hosting hypersurfaces of dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientSpec {
    pub kind: AmbientKind,
    pub n: usize,
}

impl AmbientSpec {
    pub fn new(kind: AmbientKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("hypersurface dimension must be at least 1"));
        }
        if n == 1 {
            log::debug!("{kind} ambient with n = 1: curve case, smoke tests only");
        }
        Ok(AmbientSpec { kind, n })
    }

    pub fn sigma(&self) -> f64 {
        self.kind.sigma()
    }

    pub fn k_n(&self) -> f64 {
        self.kind.k_n()
    }

    /// Whether theorem-level statements apply (`n ≥ 2`).
    pub fn theorem_dimension(&self) -> bool {
        self.n >= 2
    }

    /// Scalar curvature `n(n+1) K_N` of the ambient.
    pub fn scalar_curvature(&self) -> f64 {
        (self.n * (self.n + 1)) as f64 * self.k_n()
    }

    /// Bilinear form of the mixed curvature term in the evolution of `h`,
    /// `K_N f g` in a space form.
    pub fn lambda_form(&self, f: f64, g: &DMatrix<f64>) -> DMatrix<f64> {
        g * (self.k_n() * f)
    }

    /// Principal curvature and intrinsic radius of the umbilic model
    /// hypersurface with parameter `param`: geodesic radius on the sphere
    /// and in hyperbolic space, height `x⁰ = c` of a de Sitter slice, scale
    /// `λ` of the hyperboloid `λ H^n` in Minkowski space, and the radius of
    /// a round sphere in Euclidean space.
    pub fn umbilic_slice(&self, param: f64) -> Result<(f64, f64)> {
        match self.kind {
            AmbientKind::Sphere => {
                if !(param > 0.0 && param < std::f64::consts::PI) {
                    return Err(domain(format!("geodesic radius {param} outside (0, π)")));
                }
                Ok((1.0 / param.tan(), param.sin()))
            }
            AmbientKind::Hyperbolic => {
                if param <= 0.0 {
                    return Err(domain(format!("geodesic radius {param} must be positive")));
                }
                Ok((1.0 / param.tanh(), param.sinh()))
            }
            AmbientKind::DeSitter => {
                let r = (1.0 + param * param).sqrt();
                Ok((param / r, r))
            }
            AmbientKind::Minkowski | AmbientKind::Euclidean => {
                if param <= 0.0 {
                    return Err(domain(format!("scale {param} must be positive")));
                }
                Ok((1.0 / param, param))
            }
        }
    }

    /// Inner product of the ambient vector space model.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        model_inner(self.kind, a, b)
    }
}

/// Inner product of the linear model space: Euclidean for `Euclidean` and
/// `Sphere`, Minkowski with coordinate 0 timelike otherwise.
pub fn model_inner(kind: AmbientKind, a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    match kind {
        AmbientKind::Euclidean | AmbientKind::Sphere => dot,
        _ => dot - 2.0 * a[0] * b[0],
    }
}

impl fmt::Display for AmbientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n = {})", self.kind, self.n)
    }
}
