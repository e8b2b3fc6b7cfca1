//! Symmetric functions of the principal curvatures and their partial derivatives.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Principal curvatures `(κ_1, …, κ_n)` at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Kappa(Vec<f64>);

impl Kappa {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("a curvature vector needs at least one entry"));
        }
        if values.iter().any(|k| !k.is_finite()) {
            return Err(domain(format!("non-finite principal curvature in {values:?}")));
        }
        Ok(Kappa(values))
    }

    /// `n` copies of the same curvature.
    pub fn umbilic(kappa: f64, n: usize) -> Result<Self> {
        Self::new(vec![kappa; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Entries in ascending order, matching the eigenvalue map convention.
    pub fn sorted(&self) -> Kappa {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        Kappa(v)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, k| m.max(k.abs()))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Membership in the positive cone Γ_+.
    pub fn in_gamma_plus(&self) -> bool {
        self.0.iter().all(|&k| k > 0.0)
    }

    /// Membership in Γ_k = {s_1 > 0, …, s_k > 0}.
    pub fn in_gamma_k(&self, k: usize) -> bool {
        let e = elementary_all(&self.0);
        (1..=k.min(self.len())).all(|j| e[j] > 0.0)
    }

    pub fn reciprocal(&self) -> Result<Kappa> {
        if self.0.iter().any(|&k| k == 0.0) {
            return Err(domain("reciprocal of a vanishing principal curvature"));
        }
        Ok(Kappa(self.0.iter().map(|k| 1.0 / k).collect()))
    }

    pub fn scaled(&self, lambda: f64) -> Kappa {
        Kappa(self.0.iter().map(|k| lambda * k).collect())
    }
}

impl std::ops::Index<usize> for Kappa {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// All elementary symmetric polynomials `e_0 … e_n`, built from the
/// product of the factors `(1 + t κ_i)`.
pub fn elementary_all(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (m, &k) in values.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            e[j] += k * e[j - 1];
        }
    }
    e
}

/// `e_k` of the entries with the listed indices removed (`e_k = 0` for `k < 0`).
fn elementary_without(values: &[f64], skip: &[usize], k: isize) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let rest: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, &v)| v)
        .collect();
    let e = elementary_all(&rest);
    e.get(k as usize).copied().unwrap_or(0.0)
}

/// The symmetric functions used as curvature functions.
///
/// Canonical text names: `p<k>` power sums, `s<k>` elementary symmetric
/// polynomials, `q<k>` quotients `s_k/s_{k-1}`, `det^(1/n)` the geometric
/// mean and `H` the mean curvature. `inv(<name>)` denotes the inverse
/// function `κ ↦ 1/Φ(κ^{-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SymFn {
    PowerSum(usize),
    ElemSym(usize),
    Quotient(usize),
    GaussRoot,
    Mean,
    Inverse(Box<SymFn>),
}

impl SymFn {
    /// Homogeneity degree of the raw function.
    pub fn degree(&self) -> f64 {
        match self {
            SymFn::PowerSum(k) | SymFn::ElemSym(k) => *k as f64,
            SymFn::Quotient(_) | SymFn::GaussRoot | SymFn::Mean => 1.0,
            SymFn::Inverse(inner) => inner.degree(),
        }
    }

    /// Checks that the function is defined for `n` principal curvatures.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            SymFn::PowerSum(k) if k == 0 => Err(domain("power sum p0 is constant")),
            SymFn::ElemSym(k) if k == 0 || k > n => {
                Err(domain(format!("s{k} needs 1 <= k <= n = {n}")))
            }
            SymFn::Quotient(k) if k < 2 || k > n => {
                Err(domain(format!("q{k} needs 2 <= k <= n = {n}")))
            }
            SymFn::Inverse(ref inner) => inner.validate(n),
            _ => Ok(()),
        }
    }

    /// The inverse symmetric function, simplified where it is known in closed form.
    pub fn inverse(&self) -> SymFn {
        match self {
            SymFn::GaussRoot => SymFn::GaussRoot,
            SymFn::Inverse(inner) => (**inner).clone(),
            other => SymFn::Inverse(Box::new(other.clone())),
        }
    }

    fn check(&self, kappa: &Kappa) -> Result<()> {
        self.validate(kappa.len())?;
        match self {
            SymFn::GaussRoot | SymFn::Inverse(_) if !kappa.in_gamma_plus() => Err(domain(
                format!("{self} requires positive curvatures, got {:?}", kappa.as_slice()),
            )),
            SymFn::Quotient(k) => {
                let below = elementary_all(kappa.as_slice())[k - 1];
                if below > 0.0 {
                    Ok(())
                } else {
                    Err(domain(format!("q{k}: s{} = {below:e} is not positive", k - 1)))
                }
            }
            _ => Ok(()),
        }
    }

    /// Φ(κ).
    pub fn eval(&self, kappa: &Kappa) -> Result<f64> {
        self.check(kappa)?;
        Ok(self.eval_unchecked(kappa.as_slice()))
    }

    fn eval_unchecked(&self, k: &[f64]) -> f64 {
        let n = k.len();
        match self {
            SymFn::PowerSum(m) => k.iter().map(|x| x.powi(*m as i32)).sum(),
            SymFn::ElemSym(m) => elementary_all(k)[*m],
            SymFn::Quotient(m) => {
                let e = elementary_all(k);
                e[*m] / e[m - 1]
            }
            SymFn::GaussRoot => (k.iter().map(|x| x.ln()).sum::<f64>() / n as f64).exp(),
            SymFn::Mean => k.iter().sum(),
            SymFn::Inverse(inner) => {
                let r: Vec<f64> = k.iter().map(|x| 1.0 / x).collect();
                1.0 / inner.eval_unchecked(&r)
            }
        }
    }

    /// Gradient `(∂Φ/∂κ_i)`.
    pub fn grad(&self, kappa: &Kappa) -> Result<Vec<f64>> {
        self.check(kappa)?;
        Ok(self.grad_unchecked(kappa.as_slice()))
    }

    fn grad_unchecked(&self, k: &[f64]) -> Vec<f64> {
        let n = k.len();
        match self {
            SymFn::PowerSum(m) => k.iter().map(|x| *m as f64 * x.powi(*m as i32 - 1)).collect(),
            SymFn::ElemSym(m) => (0..n)
                .map(|i| elementary_without(k, &[i], *m as isize - 1))
                .collect(),
            SymFn::Quotient(m) => {
                let e = elementary_all(k);
                let (a, b) = (e[*m], e[m - 1]);
                (0..n)
                    .map(|i| {
                        let ai = elementary_without(k, &[i], *m as isize - 1);
                        let bi = elementary_without(k, &[i], *m as isize - 2);
                        (ai * b - a * bi) / (b * b)
                    })
                    .collect()
            }
            SymFn::GaussRoot => {
                let g = self.eval_unchecked(k);
                k.iter().map(|x| g / (n as f64 * x)).collect()
            }
            SymFn::Mean => vec![1.0; n],
            SymFn::Inverse(inner) => {
                // Φ̃ = 1/G with G(κ) = Φ(1/κ), G_i = −Φ_i(1/κ)/κ_i².
                let r: Vec<f64> = k.iter().map(|x| 1.0 / x).collect();
                let g = inner.eval_unchecked(&r);
                let dg = inner.grad_unchecked(&r);
                (0..n).map(|i| dg[i] * r[i] * r[i] / (g * g)).collect()
            }
        }
    }

    /// Hessian `(∂²Φ/∂κ_i∂κ_j)`.
    pub fn hessian(&self, kappa: &Kappa) -> Result<DMatrix<f64>> {
        self.check(kappa)?;
        Ok(self.hessian_unchecked(kappa.as_slice()))
    }

    fn hessian_unchecked(&self, k: &[f64]) -> DMatrix<f64> {
        let n = k.len();
        match self {
            SymFn::PowerSum(m) => {
                let m = *m as f64;
                DMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        m * (m - 1.0) * k[i].powf(m - 2.0)
                    } else {
                        0.0
                    }
                })
            }
            SymFn::ElemSym(m) => DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    0.0
                } else {
                    elementary_without(k, &[i, j], *m as isize - 2)
                }
            }),
            SymFn::Quotient(m) => {
                let m = *m as isize;
                let e = elementary_all(k);
                let (a, b) = (e[m as usize], e[m as usize - 1]);
                let ai: Vec<f64> = (0..n).map(|i| elementary_without(k, &[i], m - 1)).collect();
                let bi: Vec<f64> = (0..n).map(|i| elementary_without(k, &[i], m - 2)).collect();
                DMatrix::from_fn(n, n, |i, j| {
                    let (aij, bij) = if i == j {
                        (0.0, 0.0)
                    } else {
                        (
                            elementary_without(k, &[i, j], m - 2),
                            elementary_without(k, &[i, j], m - 3),
                        )
                    };
                    aij / b - (ai[i] * bi[j] + ai[j] * bi[i]) / (b * b) - a * bij / (b * b)
                        + 2.0 * a * bi[i] * bi[j] / (b * b * b)
                })
            }
            SymFn::GaussRoot => {
                let g = self.eval_unchecked(k);
                let nf = n as f64;
                DMatrix::from_fn(n, n, |i, j| {
                    let off = g / (nf * nf * k[i] * k[j]);
                    if i == j {
                        off - g / (nf * k[i] * k[i])
                    } else {
                        off
                    }
                })
            }
            SymFn::Mean => DMatrix::zeros(n, n),
            SymFn::Inverse(inner) => {
                let r: Vec<f64> = k.iter().map(|x| 1.0 / x).collect();
                let phi = inner.eval_unchecked(&r);
                let dphi = inner.grad_unchecked(&r);
                let hphi = inner.hessian_unchecked(&r);
                // G(κ) = Φ(1/κ); Φ̃ = 1/G.
                let gi: Vec<f64> = (0..n).map(|i| -dphi[i] * r[i] * r[i]).collect();
                DMatrix::from_fn(n, n, |i, j| {
                    let mut gij = hphi[(i, j)] * r[i] * r[i] * r[j] * r[j];
                    if i == j {
                        gij += 2.0 * dphi[i] * r[i] * r[i] * r[i];
                    }
                    -gij / (phi * phi) + 2.0 * gi[i] * gi[j] / (phi * phi * phi)
                })
            }
        }
    }
}

/// Inverse symmetric function `Φ̃(κ) = 1/Φ(κ^{-1})`.
pub fn inverse_fn(f: &SymFn, kappa: &Kappa) -> Result<f64> {
    if !kappa.in_gamma_plus() {
        return Err(domain(format!(
            "inverse function needs positive curvatures, got {:?}",
            kappa.as_slice()
        )));
    }
    let value = f.eval(&kappa.reciprocal()?)?;
    if value == 0.0 {
        return Err(domain("Φ(κ^{-1}) vanishes"));
    }
    Ok(1.0 / value)
}

impl fmt::Display for SymFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymFn::PowerSum(k) => write!(f, "p{k}"),
            SymFn::ElemSym(k) => write!(f, "s{k}"),
            SymFn::Quotient(k) => write!(f, "q{k}"),
            SymFn::GaussRoot => f.write_str("det^(1/n)"),
            SymFn::Mean => f.write_str("H"),
            SymFn::Inverse(inner) => write!(f, "inv({inner})"),
        }
    }
}

impl FromStr for SymFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("inv(").and_then(|r| r.strip_suffix(')')) {
            return Ok(inner.parse::<SymFn>()?.inverse());
        }
        match s {
            "H" | "mean" => return Ok(SymFn::Mean),
            "det^(1/n)" | "K^(1/n)" | "gauss_root" => return Ok(SymFn::GaussRoot),
            _ => {}
        }
        let (head, tail) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let k: usize = tail.parse().map_err(|_| Error::UnknownName(s.to_string()))?;
        match head {
            "p" => Ok(SymFn::PowerSum(k)),
            "s" => Ok(SymFn::ElemSym(k)),
            "q" => Ok(SymFn::Quotient(k)),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

impl From<SymFn> for String {
    fn from(f: SymFn) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for SymFn {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
