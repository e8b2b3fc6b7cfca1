//! Operator functions `W ↦ F(W)` of a Weingarten map and their derivatives.

use nalgebra::DMatrix;
use rand::Rng;

use super::functions::{Kappa, SymFn};
use super::speed::CurvatureFunctionSpec;
use crate::error::{domain, Result};

/// A metric `g` together with a `g`-self-adjoint Weingarten map `W`.
#[derive(Clone, Debug)]
pub struct WeingartenSample {
    g: DMatrix<f64>,
    w: DMatrix<f64>,
    kappa: Kappa,
    vecs: DMatrix<f64>,
    vecs_inv: DMatrix<f64>,
}

impl WeingartenSample {
    pub fn new(g: DMatrix<f64>, w: DMatrix<f64>) -> Result<Self> {
        let n = g.nrows();
        if n == 0 || !g.is_square() || w.shape() != (n, n) {
            return Err(domain("g and W must be square matrices of equal size"));
        }
        let scale = g.abs().max().max(1.0);
        if (&g - g.transpose()).abs().max() > 1e-10 * scale {
            return Err(domain("metric is not symmetric"));
        }
        let h = &g * &w;
        let hscale = h.abs().max().max(1e-300);
        if (&h - h.transpose()).abs().max() > 1e-9 * hscale {
            return Err(domain("W is not self-adjoint with respect to g"));
        }
        let h = (&h + h.transpose()) * 0.5;
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| domain("metric is not positive definite"))?;
        let l = chol.l();
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| domain("singular metric factor"))?;
        let c = &l_inv * &h * l_inv.transpose();
        let c = (&c + c.transpose()) * 0.5;
        let eig = c.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        if values.iter().any(|&k| k <= 0.0) {
            return Err(domain(format!("Weingarten map has non-positive eigenvalues {values:?}")));
        }
        let q = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let vecs = l_inv.transpose() * &q;
        let vecs_inv = q.transpose() * l.transpose();
        Ok(WeingartenSample { g, w, kappa: Kappa::new(values)?, vecs, vecs_inv })
    }

    /// Builds the sample from the metric and the second fundamental form.
    pub fn from_forms(g: DMatrix<f64>, h: &DMatrix<f64>) -> Result<Self> {
        let g_inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| domain("singular metric"))?;
        let w = g_inv * h;
        Self::new(g, w)
    }

    /// A random admissible sample: `g` and `h` symmetric positive definite.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let g = random_spd(n, rng);
            let h = random_spd(n, rng);
            if let Ok(s) = Self::from_forms(g, &h) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// Second fundamental form `h = g W`.
    pub fn h(&self) -> DMatrix<f64> {
        &self.g * &self.w
    }

    /// Principal curvatures in ascending order.
    pub fn kappa(&self) -> &Kappa {
        &self.kappa
    }

    /// Expresses an endomorphism in the eigenbasis of `W`.
    pub fn to_eigenbasis(&self, eta: &DMatrix<f64>) -> DMatrix<f64> {
        &self.vecs_inv * eta * &self.vecs
    }

    pub fn w_inverse(&self) -> DMatrix<f64> {
        let n = self.dim();
        let d = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 / self.kappa[i] } else { 0.0 });
        &self.vecs * d * &self.vecs_inv
    }

    /// The `g`-adjoint `g^{-1} ηᵀ g`.
    pub fn adjoint(&self, eta: &DMatrix<f64>) -> DMatrix<f64> {
        let g_inv = self.g.clone().try_inverse().expect("validated metric");
        g_inv * eta.transpose() * &self.g
    }

    /// A variation `Ẇ = A W` with `A` self-adjoint with respect to `h`.
    pub fn structured_variation<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        let n = self.dim();
        let mut s = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-1.0..1.0);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        let h_inv = self.h().try_inverse().expect("positive definite h");
        h_inv * s * &self.w
    }
}

fn random_spd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let mut m = &b * b.transpose();
    for i in 0..n {
        m[(i, i)] += rng.random_range(0.05..1.0);
    }
    m
}

/// Value, gradient and Hessian of a symmetric function at one curvature vector.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: DMatrix<f64>,
}

impl Spectral {
    /// The raw symmetric function Φ.
    pub fn raw(f: &SymFn, kappa: &Kappa) -> Result<Self> {
        Ok(Spectral { value: f.eval(kappa)?, grad: f.grad(kappa)?, hess: f.hessian(kappa)? })
    }

    /// The 1-homogeneous normalization `F = Φ^{1/deg}`.
    pub fn normalized(f: &SymFn, kappa: &Kappa) -> Result<Self> {
        let raw = Self::raw(f, kappa)?;
        let d = f.degree();
        if d == 1.0 {
            return Ok(raw);
        }
        if raw.value <= 0.0 {
            return Err(domain(format!("{f} is not positive at {:?}", kappa.as_slice())));
        }
        Ok(raw.compose(1.0 / d))
    }

    /// The speed `sgn(p) F^p` with unit anisotropy factors.
    pub fn speed(spec: &CurvatureFunctionSpec, kappa: &Kappa) -> Result<Self> {
        let base = Self::normalized(&spec.base, kappa)?;
        if base.value <= 0.0 {
            return Err(domain(format!("{} is not positive at {:?}", spec.base, kappa.as_slice())));
        }
        let mut out = base.compose(spec.p);
        if spec.p < 0.0 {
            out.value = -out.value;
            out.grad.iter_mut().for_each(|g| *g = -*g);
            out.hess = -out.hess;
        }
        Ok(out)
    }

    /// `Φ^q` for positive Φ.
    fn compose(&self, q: f64) -> Self {
        let v = self.value;
        let c1 = q * v.powf(q - 1.0);
        let c2 = q * (q - 1.0) * v.powf(q - 2.0);
        let n = self.grad.len();
        Spectral {
            value: v.powf(q),
            grad: self.grad.iter().map(|g| c1 * g).collect(),
            hess: DMatrix::from_fn(n, n, |i, j| {
                c1 * self.hess[(i, j)] + c2 * self.grad[i] * self.grad[j]
            }),
        }
    }

    /// `dF(W)(η)`.
    pub fn d1(&self, sample: &WeingartenSample, eta: &DMatrix<f64>) -> f64 {
        let e = sample.to_eigenbasis(eta);
        (0..self.grad.len()).map(|i| self.grad[i] * e[(i, i)]).sum()
    }

    /// `d²F(W)(η, η)`.
    pub fn d2(&self, sample: &WeingartenSample, eta: &DMatrix<f64>) -> f64 {
        let e = sample.to_eigenbasis(eta);
        let k = sample.kappa().as_slice();
        let n = k.len();
        let scale = k.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                total += self.hess[(i, j)] * e[(i, i)] * e[(j, j)];
                if i != j {
                    let dd = if (k[i] - k[j]).abs() < 1e-9 * scale {
                        self.hess[(i, i)] - self.hess[(i, j)]
                    } else {
                        (self.grad[i] - self.grad[j]) / (k[i] - k[j])
                    };
                    total += dd * e[(i, j)] * e[(j, i)];
                }
            }
        }
        total
    }
}

/// `dΦ(W)(η)` of the raw symmetric function.
pub fn d1(f: &SymFn, sample: &WeingartenSample, eta: &DMatrix<f64>) -> Result<f64> {
    Ok(Spectral::raw(f, sample.kappa())?.d1(sample, eta))
}

/// `d²Φ(W)(η, η)` of the raw symmetric function; coincident curvatures use
/// the limit of the divided difference.
pub fn d2(f: &SymFn, sample: &WeingartenSample, eta: &DMatrix<f64>) -> Result<f64> {
    Ok(Spectral::raw(f, sample.kappa())?.d2(sample, eta))
}

/// Residual of the inverse-concavity inequality
/// `dF(ad_g(η) W⁻¹ η) − F⁻¹ dF(η)²` for the normalized `F`.
pub fn inv_concavity_check(
    f: &SymFn,
    sample: &WeingartenSample,
    eta: &DMatrix<f64>,
) -> Result<f64> {
    let s = Spectral::normalized(f, sample.kappa())?;
    if s.value <= 0.0 {
        return Err(domain(format!("{f} is not positive on the sample")));
    }
    let quad = sample.adjoint(eta) * sample.w_inverse() * eta;
    let d = s.d1(sample, eta);
    Ok(s.d1(sample, &quad) - d * d / s.value)
}

/// Residuals of the two second-derivative bounds for `f = sgn(p) F^p`:
/// `(convex branch, inverse-concave branch)`, both non-negative when the
/// corresponding structural hypothesis on `F` holds.
pub fn d2f_bound_check(
    spec: &CurvatureFunctionSpec,
    sample: &WeingartenSample,
    w_dot: &DMatrix<f64>,
) -> Result<(f64, f64)> {
    let s = Spectral::speed(spec, sample.kappa())?;
    let p = spec.p;
    let df = s.d1(sample, w_dot);
    let d2f = s.d2(sample, w_dot);
    let quad = w_dot * sample.w_inverse() * w_dot;
    let convex = d2f - (p - 1.0) / p * df * df / s.value;
    let inv = d2f + 2.0 * s.d1(sample, &quad) - (p + 1.0) / p * df * df / s.value;
    Ok((convex, inv))
}
