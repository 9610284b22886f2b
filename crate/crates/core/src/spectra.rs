//! Symmetrization, symmetric eigensolvers and spectrum comparison.

use serde::{Deserialize, Serialize};

use crate::chain::{check_reversible, QPairSpec};
use crate::error::{Error, Result};

/// A real symmetric matrix, dense or tridiagonal.
#[derive(Debug, Clone, PartialEq)]
pub enum SymMatrix {
    /// Row-major `n × n`.
    Dense { n: usize, data: Vec<f64> },
    /// Diagonal `d` and off-diagonal `e` (`e.len() = d.len() − 1`).
    Tridiagonal { d: Vec<f64>, e: Vec<f64> },
}

impl SymMatrix {
    pub fn dim(&self) -> usize {
        match self {
            SymMatrix::Dense { n, .. } => *n,
            SymMatrix::Tridiagonal { d, .. } => d.len(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(SymMatrix::Dense { n, data })
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            SymMatrix::Dense { data, .. } => data.clone(),
            SymMatrix::Tridiagonal { d, e } => {
                let n = d.len();
                let mut m = vec![0.0; n * n];
                for i in 0..n {
                    m[i * n + i] = d[i];
                }
                for (i, &v) in e.iter().enumerate() {
                    m[i * n + i + 1] = v;
                    m[(i + 1) * n + i] = v;
                }
                m
            }
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        match self {
            SymMatrix::Dense { data, .. } => data.iter().map(|v| v * v).sum::<f64>().sqrt(),
            SymMatrix::Tridiagonal { d, e } => {
                (d.iter().map(|v| v * v).sum::<f64>() + 2.0 * e.iter().map(|v| v * v).sum::<f64>()).sqrt()
            }
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn radius_bound(&self) -> f64 {
        let n = self.dim();
        let dense = self.to_dense();
        (0..n)
            .map(|i| dense[i * n..(i + 1) * n].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// `D A D⁻¹` with `D = diag(√μ)`, built as `S_ij = √(q_ij q_ji)` off the
/// diagonal once detailed balance has been checked. Birth–death input gives
/// the tridiagonal form.
pub fn symmetrize(qp: &QPairSpec, mu: &[f64]) -> Result<SymMatrix> {
    check_reversible(qp, mu)?;
    let n = qp.n_states();
    if qp.is_tridiagonal() {
        let d = (0..n).map(|i| qp.diagonal(i)).collect();
        let e = (0..n.saturating_sub(1))
            .map(|i| (qp.rate(i, i + 1) * qp.rate(i + 1, i)).sqrt())
            .collect();
        return Ok(SymMatrix::Tridiagonal { d, e });
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = qp.diagonal(i);
        for &(j, q) in qp.row(i) {
            data[i * n + j] = (q * qp.rate(j, i)).sqrt();
        }
    }
    Ok(SymMatrix::Dense { n, data })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigMethod {
    Jacobi,
    TridiagonalQl,
}

#[derive(Debug, Clone)]
pub struct EigResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` (as `vectors[k]`) belongs to `values[k]`, when requested.
    pub vectors: Option<Vec<Vec<f64>>>,
    pub method: EigMethod,
    /// Off-diagonal Frobenius norm after each Jacobi sweep (empty for QL).
    pub off_norms: Vec<f64>,
}

pub const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITER: usize = 60;

fn off_norm(n: usize, a: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn check_symmetric(n: usize, a: &[f64]) -> Result<()> {
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (a[i * n + j] - a[j * n + i]).abs() > 1e-10 * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(())
}

/// Cyclic Jacobi rotations until the off-diagonal norm drops below `1e−13 ‖S‖`.
pub fn jacobi(n: usize, mut a: Vec<f64>, want_vectors: bool) -> Result<EigResult> {
    check_symmetric(n, &a)?;
    let total = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = 1e-13 * total;
    let mut v = if want_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };
    let mut norms = vec![off_norm(n, &a)];
    let mut sweeps = 0;
    while *norms.last().unwrap() > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: *norms.last().unwrap() });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        sweeps += 1;
        norms.push(off_norm(n, &a));
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let vectors = v.map(|v| (0..n).map(|k| (0..n).map(|i| v[i * n + k]).collect()).collect());
    let mut out = sort_pairs(diag, vectors);
    out.method = EigMethod::Jacobi;
    out.off_norms = norms;
    Ok(out)
}

fn sort_pairs(values: Vec<f64>, vectors: Option<Vec<Vec<f64>>>) -> EigResult {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    EigResult {
        values: idx.iter().map(|&i| values[i]).collect(),
        vectors: vectors.map(|v| idx.iter().map(|&i| v[i].clone()).collect()),
        method: EigMethod::TridiagonalQl,
        off_norms: Vec::new(),
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
pub fn tridiagonal_ql(d: &[f64], e: &[f64], want_vectors: bool) -> Result<EigResult> {
    let n = d.len();
    if n == 0 {
        return Ok(sort_pairs(Vec::new(), want_vectors.then(Vec::new)));
    }
    if e.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, found: e.len() });
    }
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    let mut z = want_vectors.then(|| {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        id
    });
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                let off = e.iter().map(|v| v * v).sum::<f64>().sqrt();
                return Err(Error::NoConvergence { sweeps: iter, off_norm: off });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let vectors = z.map(|z| (0..n).map(|k| (0..n).map(|i| z[i * n + k]).collect()).collect());
    Ok(sort_pairs(d, vectors))
}

/// Dispatches on shape: tridiagonal input goes to QL, dense input to Jacobi.
pub fn eig_sym(s: &SymMatrix, want_vectors: bool) -> Result<EigResult> {
    match s {
        SymMatrix::Dense { n, data } => jacobi(*n, data.clone(), want_vectors),
        SymMatrix::Tridiagonal { d, e } => tridiagonal_ql(d, e, want_vectors),
    }
}

/// `Σ_i μ_i f_i (Ωf)_i`.
pub fn quadratic_form(qp: &QPairSpec, mu: &[f64], f: &[f64]) -> Result<f64> {
    let n = qp.n_states();
    for len in [mu.len(), f.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    Ok((0..n).map(|i| mu[i] * f[i] * qp.apply_at(f, i)).sum())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub measure_used: Vec<f64>,
    pub max_pair_gap: f64,
    pub method: EigMethod,
    /// The second spectrum, when two were compared.
    pub compared_with: Option<Vec<f64>>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Spectrum of the `μ`-symmetrization of `qp`.
pub fn spectrum(qp: &QPairSpec, mu: &[f64]) -> Result<SpectrumReport> {
    let s = symmetrize(qp, mu)?;
    let eig = eig_sym(&s, false)?;
    Ok(SpectrumReport {
        eigenvalues: eig.values,
        measure_used: mu.to_vec(),
        max_pair_gap: 0.0,
        method: eig.method,
        compared_with: None,
        tolerance: 0.0,
        pass: true,
    })
}

/// Largest gap between two ascending spectra paired by position.
pub fn max_pair_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Compares the spectra of two reversible pairs. `tol = None` uses
/// `1e−9 · max(1, spectral radius)`.
pub fn isospectral_check(
    qp_a: &QPairSpec,
    mu_a: &[f64],
    qp_b: &QPairSpec,
    mu_b: &[f64],
    tol: Option<f64>,
) -> Result<SpectrumReport> {
    if qp_a.n_states() != qp_b.n_states() {
        return Err(Error::DimensionMismatch { expected: qp_a.n_states(), found: qp_b.n_states() });
    }
    let a = spectrum(qp_a, mu_a)?;
    let b = spectrum(qp_b, mu_b)?;
    let radius = a
        .eigenvalues
        .iter()
        .chain(&b.eigenvalues)
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let tolerance = tol.unwrap_or(1e-9 * radius.max(1.0));
    let gap = max_pair_gap(&a.eigenvalues, &b.eigenvalues);
    Ok(SpectrumReport {
        max_pair_gap: gap,
        compared_with: Some(b.eigenvalues),
        tolerance,
        pass: gap <= tolerance,
        ..a
    })
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x` (Sturm count).
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}
