//! Exact Hermite polynomials and eigenfunction checks for `L^h`.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::SmoothFunction;
use crate::error::{Error, Result};

/// Largest Hermite degree produced.
pub const HERMITE_MAX: usize = 60;

/// Exponent `s` in `p(x) e^{−s x²}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaussTag {
    Zero,
    Half,
    One,
}

impl GaussTag {
    fn value(self) -> BigRational {
        match self {
            GaussTag::Zero => BigRational::zero(),
            GaussTag::Half => BigRational::new(1.into(), 2.into()),
            GaussTag::One => BigRational::one(),
        }
    }

    fn as_f64(self) -> f64 {
        match self {
            GaussTag::Zero => 0.0,
            GaussTag::Half => 0.5,
            GaussTag::One => 1.0,
        }
    }
}

/// `p(x)·exp(−s x²)` with exact coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGauss {
    pub coeffs: Vec<BigRational>,
    pub tag: GaussTag,
}

fn trim(mut c: Vec<BigRational>) -> Vec<BigRational> {
    while c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
    c
}

fn add(p: &[BigRational], q: &[BigRational]) -> Vec<BigRational> {
    let n = p.len().max(q.len());
    let z = BigRational::zero();
    trim((0..n).map(|i| p.get(i).unwrap_or(&z) + q.get(i).unwrap_or(&z)).collect())
}

fn scale(p: &[BigRational], k: &BigRational) -> Vec<BigRational> {
    trim(p.iter().map(|v| v * k).collect())
}

fn shift(p: &[BigRational]) -> Vec<BigRational> {
    if p.is_empty() {
        return Vec::new();
    }
    std::iter::once(BigRational::zero()).chain(p.iter().cloned()).collect()
}

fn poly_derivative(p: &[BigRational]) -> Vec<BigRational> {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| v * BigRational::from_integer(BigInt::from(k)))
            .collect(),
    )
}

impl PolyGauss {
    pub fn polynomial(coeffs: Vec<BigRational>) -> Self {
        Self { coeffs: trim(coeffs), tag: GaussTag::Zero }
    }

    pub fn from_integers(coeffs: &[i64], tag: GaussTag) -> Self {
        Self { coeffs: trim(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect()), tag }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `(p e^{−sx²})′ = (p′ − 2s x p) e^{−sx²}`.
    pub fn derivative(&self) -> Self {
        let two_s = self.tag.value() * BigRational::from_integer(2.into());
        let coeffs = add(&poly_derivative(&self.coeffs), &scale(&shift(&self.coeffs), &-two_s));
        Self { coeffs, tag: self.tag }
    }

    /// Sum of two functions with the same exponent.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.tag != other.tag {
            return Err(Error::InvalidArgument("exponent tags differ".into()));
        }
        Ok(Self { coeffs: add(&self.coeffs, &other.coeffs), tag: self.tag })
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self { coeffs: scale(&self.coeffs, k), tag: self.tag }
    }

    /// Multiplication by `x`.
    pub fn times_x(&self) -> Self {
        Self { coeffs: shift(&self.coeffs), tag: self.tag }
    }

    /// Polynomial coefficients as `f64`.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `(p, p′, p″)` at `x` in floating point (polynomial part only).
    pub fn poly_jet(&self, x: f64) -> (f64, f64, f64) {
        let c = self.coeffs_f64();
        let (mut p, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for &k in c.iter().rev() {
            d2 = d2 * x + 2.0 * d1;
            d1 = d1 * x + p;
            p = p * x + k;
        }
        (p, d1, d2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.poly_jet(x).0 * (-self.tag.as_f64() * x * x).exp()
    }

    /// Largest absolute coefficient, as `f64`.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

/// `H_0, ..., H_{n_max}` from `H_{n+1} = 2x H_n − 2n H_{n−1}`.
pub fn hermite_polys(n_max: usize) -> Result<Vec<PolyGauss>> {
    if n_max > HERMITE_MAX {
        return Err(Error::InvalidArgument(format!("degree {n_max} exceeds {HERMITE_MAX}")));
    }
    let two = BigRational::from_integer(2.into());
    let mut out = vec![PolyGauss::from_integers(&[1], GaussTag::Zero)];
    if n_max >= 1 {
        out.push(PolyGauss::from_integers(&[0, 2], GaussTag::Zero));
    }
    for n in 1..n_max {
        let next = out[n]
            .times_x()
            .scale(&two)
            .add(&out[n - 1].scale(&-(&two * BigRational::from_integer(BigInt::from(n)))))?;
        out.push(next);
    }
    Ok(out)
}

/// `½H″ − xH′ + nH = 0` as an exact polynomial identity.
pub fn hermite_identity_holds(h: &PolyGauss, n: usize) -> bool {
    let d1 = h.derivative();
    let d2 = d1.derivative();
    let half = BigRational::new(1.into(), 2.into());
    let lhs = d2
        .scale(&half)
        .add(&d1.times_x().scale(&-BigRational::one()))
        .and_then(|s| s.add(&h.scale(&BigRational::from_integer(BigInt::from(n)))));
    lhs.map(|p| p.is_zero()).unwrap_or(false)
}

/// Residual of `L^h g_n = −n g_n` for `g_n = h H_n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenResidual {
    pub n: usize,
    /// `sup |L^h g_n + n g_n|` over the grid.
    pub residual: f64,
    pub sup_g: f64,
    pub pass: bool,
}

/// Evaluates `r_n = L^h g_n + n g_n` on the grid for `n ≤ n_max`, with
/// `L^h = ½∂² − (x + h′/h)∂ + [(h′/h)² + x h′/h − h″/(2h)]`. Passes when
/// `sup |r_n| ≤ 1e−8 (1 + sup |g_n|)`.
pub fn verify_lh_eigen(h: &SmoothFunction, n_max: usize, grid: &[f64]) -> Result<Vec<EigenResidual>> {
    let polys = hermite_polys(n_max)?;
    let mut jets = Vec::with_capacity(grid.len());
    for &x in grid {
        let j = h.eval(x);
        if j.0 == 0.0 {
            return Err(Error::ZeroH { x });
        }
        jets.push(j);
    }
    Ok(polys
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let (mut residual, mut sup_g) = (0.0_f64, 0.0_f64);
            for (&x, &(v, d1, d2)) in grid.iter().zip(&jets) {
                let (q, q1, q2) = p.poly_jet(x);
                let g = v * q;
                let g1 = d1 * q + v * q1;
                let g2 = d2 * q + 2.0 * d1 * q1 + v * q2;
                let ratio = d1 / v;
                let pot = ratio * ratio + x * ratio - d2 / (2.0 * v);
                let r = 0.5 * g2 - (x + ratio) * g1 + pot * g + n as f64 * g;
                residual = residual.max(r.abs());
                sup_g = sup_g.max(g.abs());
            }
            EigenResidual { n, residual, sup_g, pass: residual <= 1e-8 * (1.0 + sup_g) }
        })
        .collect())
}

/// `#{(k_1..k_d) ≥ 0 : Σ k_i = n} = C(n+d−1, d−1)`.
pub fn ou_multiplicity(n: u64, d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut r: u64 = 1;
    for k in 1..d {
        // r = C(n+k−1, k−1) → C(n+k, k); the product is divisible by k
        let top = n.checked_add(k).ok_or(Error::Overflow { index: k as usize })?;
        let g = num::integer::gcd(r, k);
        let (r1, k1) = (r / g, k / g);
        r = r1.checked_mul(top / k1).ok_or(Error::Overflow { index: k as usize })?;
    }
    Ok(r)
}
