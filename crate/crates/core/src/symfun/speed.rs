//! Speeds `f = sgn(p) φ(s) ψ(ν) F^p` and the admissibility test for `φ`.

use serde::{Deserialize, Serialize};

use super::functions::{Kappa, SymFn};
use crate::error::{domain, usage, Result};

/// A positive scalar factor, closed form or tabulated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    Const { value: f64 },
    /// `scale · exp(rate · x)`
    Exp { scale: f64, rate: f64 },
    /// `scale · x^exponent`
    Power { scale: f64, exponent: f64 },
    /// Natural cubic spline through the samples, clamped outside their range.
    Table { x: Vec<f64>, y: Vec<f64> },
}

impl Default for ScalarFn {
    fn default() -> Self {
        ScalarFn::Const { value: 1.0 }
    }
}

impl ScalarFn {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        ScalarFn::Const { value }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, ScalarFn::Const { .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ScalarFn::Const { value } if *value == 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if let ScalarFn::Table { x, y } = self {
            if x.len() != y.len() || x.len() < 2 {
                return Err(usage("table needs matching x and y with at least two samples"));
            }
            if x.windows(2).any(|w| w[1] <= w[0]) {
                return Err(usage("table abscissae must be strictly increasing"));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarFn::Const { value } => *value,
            ScalarFn::Exp { scale, rate } => scale * (rate * x).exp(),
            ScalarFn::Power { scale, exponent } => scale * x.powf(*exponent),
            ScalarFn::Table { x: xs, y: ys } => spline_eval(xs, ys, x),
        }
    }
}

fn spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm for the interior moments, natural end conditions.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let a = h0 / 6.0;
        let b = (h0 + h1) / 3.0;
        let c = h1 / 6.0;
        let d = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        let denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - a * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}

fn spline_eval(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len();
    let at = at.clamp(x[0], x[n - 1]);
    let m = spline_second_derivatives(x, y);
    let i = match x.partition_point(|&v| v <= at) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    };
    let h = x[i + 1] - x[i];
    let a = (x[i + 1] - at) / h;
    let b = (at - x[i]) / h;
    a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
}

/// The speed `f(s, ν, W) = sgn(p) · φ(s) · ψ(ν) · F(W)^p` with `F = Φ^{1/deg}`.
///
/// `ψ` is evaluated on the axial component of the unit normal (the last
/// Euclidean coordinate, or the time coordinate in Minkowski space).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureFunctionSpec {
    pub base: SymFn,
    pub p: f64,
    #[serde(default)]
    pub phi: ScalarFn,
    #[serde(default)]
    pub psi: ScalarFn,
}

impl CurvatureFunctionSpec {
    pub fn isotropic(base: SymFn, p: f64) -> Self {
        CurvatureFunctionSpec { base, p, phi: ScalarFn::one(), psi: ScalarFn::one() }
    }

    pub fn sign(&self) -> f64 {
        self.p.signum()
    }

    pub fn is_isotropic(&self) -> bool {
        self.phi.is_one() && self.psi.is_one()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.p == 0.0 || !self.p.is_finite() {
            return Err(usage(format!("exponent p = {} must be finite and non-zero", self.p)));
        }
        self.base.validate(n)?;
        self.phi.validate()?;
        self.psi.validate()
    }

    /// `F^p` of the normalized base function (unsigned, no anisotropy).
    pub fn power(&self, kappa: &Kappa) -> Result<f64> {
        let raw = self.base.eval(kappa)?;
        if raw <= 0.0 {
            return Err(domain(format!("{} is not positive at {:?}", self.base, kappa.as_slice())));
        }
        let d = self.base.degree();
        let f = if d == 1.0 { raw } else { raw.powf(1.0 / d) };
        Ok(f.powf(self.p))
    }

    fn factors(&self, s: f64, nu_axial: f64) -> Result<f64> {
        let phi = self.phi.eval(s);
        let psi = self.psi.eval(nu_axial);
        if phi <= 0.0 || psi <= 0.0 {
            return Err(domain(format!("anisotropy factors must be positive, got φ={phi}, ψ={psi}")));
        }
        Ok(phi * psi)
    }

    /// The speed value.
    pub fn eval(&self, kappa: &Kappa, s: f64, nu_axial: f64) -> Result<f64> {
        Ok(self.sign() * self.factors(s, nu_axial)? * self.power(kappa)?)
    }

    /// The speed and its partial derivatives `∂f/∂κ_i`.
    pub fn eval_with_grad(&self, kappa: &Kappa, s: f64, nu_axial: f64) -> Result<(f64, Vec<f64>)> {
        let c = self.factors(s, nu_axial)?;
        let big_f = self.power(kappa)?.powf(1.0 / self.p);
        let d = self.base.degree();
        let raw = big_f.powf(d);
        let coef = c * self.p.abs() * big_f.powf(self.p - 1.0) * big_f / (d * raw);
        let grad = self.base.grad(kappa)?.into_iter().map(|g| coef * g).collect();
        Ok((c * self.sign() * big_f.powf(self.p), grad))
    }

    /// Canonical label such as `H^1` or `det^(1/n)^-0.5`.
    pub fn label(&self) -> String {
        let mut out = format!("{}^{}", self.base, self.p);
        if !self.phi.is_one() {
            out.push_str(" *phi");
        }
        if !self.psi.is_one() {
            out.push_str(" *psi");
        }
        out
    }
}

/// Tests the structural conditions on `φ` over `s_range`:
/// `σφ' ≤ 0` and `sgn(p(p+1)) ((1−p)/p φ'² + φ''φ) ≥ 0` at sampled points,
/// with centred finite-difference derivatives.
pub fn phi_admissible(phi: &ScalarFn, p: f64, sigma: f64, s_range: (f64, f64)) -> Result<bool> {
    if p == 0.0 || p == -1.0 {
        return Err(usage("phi admissibility needs p different from 0 and -1"));
    }
    let (a, b) = s_range;
    if !(b > a) {
        return Err(usage(format!("empty range [{a}, {b}]")));
    }
    let samples = 200;
    let step = 1e-4 * (b - a).max(1e-3);
    let tol = 1e-7;
    let sgn = (p * (p + 1.0)).signum();
    for i in 0..=samples {
        let s = a + (b - a) * i as f64 / samples as f64;
        let (m, c, pl) = (phi.eval(s - step), phi.eval(s), phi.eval(s + step));
        if m <= 0.0 || c <= 0.0 || pl <= 0.0 {
            return Err(domain(format!("phi is not positive near s = {s}")));
        }
        let d1 = (pl - m) / (2.0 * step);
        let d2 = (pl - 2.0 * c + m) / (step * step);
        let scale = c * c + d1 * d1 + 1.0;
        if sigma * d1 > tol * (c + 1.0) {
            return Ok(false);
        }
        if sgn * ((1.0 - p) / p * d1 * d1 + d2 * c) < -tol * scale {
            return Ok(false);
        }
    }
    Ok(true)
}
