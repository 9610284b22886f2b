//! h-transforms of q-pairs and their inverses.
//!
//! All transforms here are the similarity `Ω̃ = H⁻¹ Ω H` with
//! `H = diag(h)`, written back as a q-pair: `q̃_ij = q_ij h_j / h_i`,
//! `q̃_i = Σ_j q̃_ij` and `c̃_i = (Ωh)(i) / h_i`.

use serde::{Deserialize, Serialize};

use crate::chain::{bd_measures, BirthDeathSpec, MeasurePair, QPairSpec, RateSeq};
use crate::error::{Error, Result};

/// Default harmonicity tolerance for transform preconditions.
pub const HARMONIC_TOL: f64 = 1e-8;

fn check_positive(h: &[f64], n: usize) -> Result<()> {
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.len() });
    }
    match h.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        Some(i) => Err(Error::NonpositiveH(i)),
        None => Ok(()),
    }
}

fn transformed_rows(qp: &QPairSpec, h: &[f64]) -> Vec<Vec<(usize, f64)>> {
    (0..qp.n_states())
        .map(|i| qp.row(i).iter().map(|&(j, q)| (j, q * h[j] / h[i])).collect())
        .collect()
}

/// Exact similarity transform for any positive `h`; the potential left over
/// is `c̃_i = (Ωh)(i)/h_i`.
pub fn similarity_transform(qp: &QPairSpec, h: &[f64]) -> Result<QPairSpec> {
    check_positive(h, qp.n_states())?;
    let rows = transformed_rows(qp, h);
    let killing = (0..qp.n_states()).map(|i| qp.apply_at(h, i) / h[i]).collect();
    QPairSpec::conservative(rows, killing)
}

/// Global transform for harmonic `h`: the result is conservative with no potential.
pub fn h_transform(qp: &QPairSpec, h: &[f64], tol: f64) -> Result<QPairSpec> {
    check_positive(h, qp.n_states())?;
    let (index, residual) = (0..qp.n_states())
        .map(|i| (i, qp.apply_at(h, i).abs()))
        .fold((0, 0.0), |m, x| if x.1 > m.1 { x } else { m });
    if residual > tol {
        return Err(Error::NotHarmonic { index, residual });
    }
    QPairSpec::conservative(transformed_rows(qp, h), vec![0.0; qp.n_states()])
}

/// Transform for `h` harmonic on `harmonic_set` only. Outside the set the
/// potential `c̃_i = c_i + Σ_j q_ij (h_j/h_i − 1)` is kept (for a conservative
/// pair), so the result is exactly similar to `qp`.
pub fn h_transform_local(
    qp: &QPairSpec,
    h: &[f64],
    harmonic_set: &[usize],
    tol: f64,
) -> Result<QPairSpec> {
    let n = qp.n_states();
    check_positive(h, n)?;
    let mut in_set = vec![false; n];
    for &i in harmonic_set {
        if i >= n {
            return Err(Error::InvalidArgument(format!("state {i} out of range")));
        }
        let r = qp.apply_at(h, i);
        if r.abs() > tol {
            return Err(Error::NotLocallyHarmonic { index: i, residual: r });
        }
        in_set[i] = true;
    }
    let killing = (0..n)
        .map(|i| if in_set[i] { 0.0 } else { qp.apply_at(h, i) / h[i] })
        .collect();
    QPairSpec::conservative(transformed_rows(qp, h), killing)
}

/// Inverse transform of a conservative, potential-free pair:
/// `q_ij = h_i q̃_ij / h_j`, `c_i = Σ_j q̃_ij (h_i/h_j − 1)`.
pub fn inverse_transform(qt: &QPairSpec, h: &[f64]) -> Result<QPairSpec> {
    let n = qt.n_states();
    check_positive(h, n)?;
    if !qt.is_conservative() || qt.killing().iter().any(|&c| c != 0.0) {
        return Err(Error::PreconditionViolated(
            "inverse transform needs a conservative pair without potential".into(),
        ));
    }
    let rows = (0..n)
        .map(|i| qt.row(i).iter().map(|&(j, q)| (j, h[i] * q / h[j])).collect())
        .collect();
    let killing = (0..n)
        .map(|i| qt.row(i).iter().map(|&(j, q)| q * (h[i] / h[j] - 1.0)).sum())
        .collect();
    QPairSpec::conservative(rows, killing)
}

/// `μ = h⁻² μ̃`.
pub fn pull_back_measure(mu_tilde: &[f64], h: &[f64]) -> Vec<f64> {
    mu_tilde.iter().zip(h).map(|(m, h)| m / (h * h)).collect()
}

/// `μ̃ = h² μ`.
pub fn push_forward_measure(mu: &[f64], h: &[f64]) -> Vec<f64> {
    mu.iter().zip(h).map(|(m, h)| m * h * h).collect()
}

/// The `μ`-adjoint: `q̄_ij = μ_j q_ji / μ_i`, with the diagonal of the
/// generator kept fixed.
pub fn measure_dual(qp: &QPairSpec, mu: &[f64]) -> Result<QPairSpec> {
    let n = qp.n_states();
    if mu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mu.len() });
    }
    if let Some(i) = mu.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument(format!("measure must be positive (index {i})")));
    }
    let mut rows = vec![Vec::new(); n];
    for j in 0..n {
        for &(i, q) in qp.row(j) {
            rows[i].push((j, mu[j] * q / mu[i]));
        }
    }
    let sums: Vec<f64> = rows.iter().map(|r| r.iter().map(|e: &(usize, f64)| e.1).sum()).collect();
    let killing = (0..n).map(|i| qp.diagonal(i) + sums[i]).collect();
    QPairSpec::conservative(rows, killing)
}

/// Birth–death rates after the transform, on the states `h` covers.
#[derive(Debug, Clone)]
pub struct BdTransform {
    /// `b̃_i = b_i h_{i+1}/h_i`, `ã_i = a_i h_{i−1}/h_i`, no potential.
    pub spec: BirthDeathSpec,
    /// `μ̃_i = h_i² μ_i`, `ν̂̃_i = ν̂_i/(h_i h_{i+1})`.
    pub measures: MeasurePair,
    /// `ã ≤ a` and `b̃ ≥ b` everywhere (expected for killing with nondecreasing `h`).
    pub rates_ordered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdRates {
    pub birth: Vec<f64>,
    pub death: Vec<f64>,
}

pub fn bd_h_transform(spec: &BirthDeathSpec, h: &[f64], n: usize) -> Result<BdTransform> {
    if h.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: h.len() });
    }
    check_positive(h, n + 1)?;
    let mut birth = Vec::with_capacity(n);
    let mut death = Vec::with_capacity(n);
    let mut ordered = true;
    for i in 0..n {
        let b = spec.b(i)?;
        let bt = b * h[i + 1] / h[i];
        ordered &= bt >= b;
        birth.push(bt);
    }
    for i in 1..=n {
        let a = spec.a(i)?;
        let at = a * h[i - 1] / h[i];
        ordered &= at <= a;
        death.push(at);
    }
    let base = bd_measures(spec, n)?;
    let mu: Vec<f64> = push_forward_measure(&base.mu, h);
    let nu_hat = base.nu_hat.iter().take(n).enumerate().map(|(i, v)| v / (h[i] * h[i + 1])).collect();
    let mut out = BirthDeathSpec::new(
        RateSeq::Values(birth),
        RateSeq::Values(death),
        RateSeq::Values(vec![]),
        n,
    );
    out.policy = spec.policy;
    Ok(BdTransform { spec: out, measures: MeasurePair { mu, nu_hat }, rates_ordered: ordered })
}
