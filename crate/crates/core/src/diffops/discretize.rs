//! Finite-volume discretization of `L = (d/dμ)(d/dν̂) + c` with
//! `dμ = e^C/a dx`, `dν̂ = e^{−C} dx`, `C = ∫ b/a`.

use serde::{Deserialize, Serialize};

use super::{forward_transform, Boundary, Operator1D, SmoothFunction};
use crate::chain::QPairSpec;
use crate::duality::{push_forward_measure, similarity_transform};
use crate::error::{Error, Result};
use crate::spectra::{isospectral_check, max_pair_gap, spectrum};

/// A discretized operator as a reversible q-pair with its measure.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub qp: QPairSpec,
    /// Cell masses `(e^C/a)(x_i) · |cell_i|`, normalized so the largest
    /// exponential factor is one.
    pub mu: Vec<f64>,
    /// Grid points carrying unknowns (Dirichlet ends are dropped).
    pub nodes: Vec<f64>,
    pub warnings: Vec<String>,
}

fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi))
}

pub fn discretize(op: &Operator1D) -> Result<Discretization> {
    let x = &op.grid;
    let m = x.len() - 1;
    let ratio = |t: f64| (op.b)(t) / (op.a)(t);
    // C at nodes and at midpoints
    let mut c_node = vec![0.0; m + 1];
    let mut c_mid = vec![0.0; m];
    for i in 0..m {
        let mid = 0.5 * (x[i] + x[i + 1]);
        c_mid[i] = c_node[i] + simpson(&ratio, x[i], mid);
        c_node[i + 1] = c_mid[i] + simpson(&ratio, mid, x[i + 1]);
    }
    let c_max = c_node.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut warnings = Vec::new();
    let mut worst_peclet = 0.0_f64;
    for i in 0..=m {
        let dx = if i < m { x[i + 1] - x[i] } else { x[i] - x[i - 1] };
        worst_peclet = worst_peclet.max((op.b)(x[i]).abs() * dx / (op.a)(x[i]));
    }
    if worst_peclet > 2.0 {
        warnings.push(format!("GridTooCoarse: local Péclet number {worst_peclet:.3} exceeds 2"));
    }

    let first = usize::from(op.bc[0] == Boundary::Dirichlet);
    let last = if op.bc[1] == Boundary::Dirichlet { m - 1 } else { m };
    if last < first {
        return Err(Error::InvalidArgument("grid too small for the boundary conditions".into()));
    }
    let count = last - first + 1;
    let mut rows = Vec::with_capacity(count);
    let mut total = Vec::with_capacity(count);
    let mut killing = Vec::with_capacity(count);
    let mut mu = Vec::with_capacity(count);
    for i in first..=last {
        let left = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
        let right = if i < m { x[i + 1] - x[i] } else { 0.0 };
        let volume = 0.5 * (left + right);
        let a = (op.a)(x[i]);
        let mut row = Vec::with_capacity(2);
        let mut q = 0.0;
        if i > 0 {
            let r = a * (c_mid[i - 1] - c_node[i]).exp() / (left * volume);
            q += r;
            if i > first {
                row.push((i - 1 - first, r));
            }
        }
        if i < m {
            let r = a * (c_mid[i] - c_node[i]).exp() / (right * volume);
            q += r;
            if i < last {
                row.push((i + 1 - first, r));
            }
        }
        rows.push(row);
        total.push(q);
        killing.push((op.c)(x[i]));
        mu.push((c_node[i] - c_max).exp() / a * volume);
    }
    let qp = QPairSpec::from_rows(rows, total, killing)?;
    Ok(Discretization { qp, mu, nodes: x[first..=last].to_vec(), warnings })
}

/// Ascending spectrum of the discretized operator.
pub fn discrete_spectrum(op: &Operator1D) -> Result<Vec<f64>> {
    let d = discretize(op)?;
    Ok(spectrum(&d.qp, &d.mu)?.eigenvalues)
}

/// The two discrete isospectrality checks for a harmonic `h`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteIsospectrality {
    /// Gap between the spectrum of the discretized operator and that of its
    /// exact similarity transform by the sampled `h` (all eigenvalues).
    pub similarity_gap: f64,
    /// Gap between the `k` top eigenvalues (those nearest zero from above in
    /// `−L`) of the discretized operator and of the discretized transform.
    pub transformed_gap: f64,
    pub k: usize,
    pub original: Vec<f64>,
    pub transformed: Vec<f64>,
}

fn top(values: &[f64], k: usize) -> Vec<f64> {
    values.iter().rev().take(k).copied().collect()
}

pub fn discrete_isospectrality(op: &Operator1D, h: &SmoothFunction, k: usize, tol: f64) -> Result<DiscreteIsospectrality> {
    let d = discretize(op)?;
    let hv: Vec<f64> = d.nodes.iter().map(|&x| h.eval(x).0).collect();
    let sim = similarity_transform(&d.qp, &hv)?;
    let mu_t = push_forward_measure(&d.mu, &hv);
    let exact = isospectral_check(&d.qp, &d.mu, &sim, &mu_t, None)?;
    let dt = discretize(&forward_transform(op, h, tol)?)?;
    let transformed_all = spectrum(&dt.qp, &dt.mu)?.eigenvalues;
    let original = top(&exact.eigenvalues, k);
    let transformed = top(&transformed_all, k);
    Ok(DiscreteIsospectrality {
        similarity_gap: exact.max_pair_gap,
        transformed_gap: max_pair_gap(&original, &transformed),
        k,
        original,
        transformed,
    })
}
