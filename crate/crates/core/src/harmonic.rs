//! Harmonic functions of jump generators.
//!
//! * [`minimal_harmonic`]: the monotone iteration for the minimal
//!   nonnegative solution with `h_θ = 1`, plus a dense-solve backend.
//! * [`bd_harmonic_explicit`] / [`bd_harmonic_scaled`]: the closed-form
//!   birth–death recursion through the coefficients `F̃_n^{(i)}`.
//! * [`maximal_solution`]: the decreasing iteration started from `1`.

use serde::{Deserialize, Serialize};

use crate::chain::{BirthDeathSpec, QPairSpec};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, Lu};

/// A candidate harmonic function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicVector {
    pub values: Vec<f64>,
    /// Reference state with `h = 1`.
    pub base_index: usize,
    /// `max |Ωh(i)|` over `harmonic_set`.
    pub residual: f64,
    /// States where `Ωh = 0` is asserted.
    pub harmonic_set: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl HarmonicVector {
    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&h| h > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IterationTrace {
    /// Recorded iterates (only when requested).
    pub iterates: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    pub final_delta: f64,
    /// Whether every step moved in the expected direction.
    pub monotone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Iterates above this are taken as divergence to `+∞`.
    pub ceiling: f64,
    pub record_iterates: bool,
}

impl Default for IterOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 100_000, ceiling: 1e150, record_iterates: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicMethod {
    Iterate,
    Explicit,
    Solve,
}

/// `Ωh(i)` for `i ∈ set`.
pub fn harmonic_residual(qp: &QPairSpec, h: &[f64], set: &[usize]) -> Vec<f64> {
    set.iter().map(|&i| qp.apply_at(h, i)).collect()
}

fn exit_rates(qp: &QPairSpec, theta: usize) -> Result<Vec<f64>> {
    (0..qp.n_states())
        .map(|x| {
            let d = qp.total(x) - qp.killing()[x];
            if x != theta && d <= 0.0 {
                Err(Error::PreconditionViolated(format!("c_{x} must be below q_{x}")))
            } else {
                Ok(d)
            }
        })
        .collect()
}

fn complement(n: usize, theta: usize) -> Vec<usize> {
    (0..n).filter(|&i| i != theta).collect()
}

fn unreachable_warning(qp: &QPairSpec, theta: usize) -> Vec<String> {
    let reach = qp.can_reach(theta);
    let lost: Vec<usize> = (0..qp.n_states()).filter(|&i| !reach[i]).collect();
    if lost.is_empty() {
        vec![]
    } else {
        vec![format!("states {lost:?} cannot reach the reference state; h vanishes there")]
    }
}

/// Minimal nonnegative solution of
/// `h(x) = Σ_{y≠θ} q(x,y)/(q(x)−c(x)) h(y) + q(x,θ)/(q(x)−c(x))`, `x ≠ θ`,
/// by the increasing iteration started from `h^(1)(x) = q(x,θ)/(q(x)−c(x))`.
pub fn minimal_harmonic(
    qp: &QPairSpec,
    theta: usize,
    opts: &IterOptions,
) -> Result<(HarmonicVector, IterationTrace)> {
    let n = qp.n_states();
    if theta >= n {
        return Err(Error::InvalidArgument(format!("reference state {theta} out of range")));
    }
    let exit = exit_rates(qp, theta)?;
    let warnings = unreachable_warning(qp, theta);

    let mut h = vec![0.0; n];
    h[theta] = 1.0;
    for x in 0..n {
        if x != theta {
            h[x] = qp.rate(x, theta) / exit[x];
        }
    }
    let mut trace = IterationTrace { monotone: true, ..Default::default() };
    if opts.record_iterates {
        trace.iterates.push(h.clone());
    }
    let mut next = h.clone();
    loop {
        let mut delta = 0.0_f64;
        let mut top = 0.0_f64;
        for x in 0..n {
            if x == theta {
                continue;
            }
            // θ carries the value 1, so the boundary term comes out of the same sum.
            let s: f64 = qp.row(x).iter().map(|&(y, q)| q * h[y]).sum();
            let v = s / exit[x];
            if v < h[x] - 4.0 * f64::EPSILON * h[x].abs() {
                trace.monotone = false;
            }
            delta = delta.max((v - h[x]).abs());
            top = top.max(v);
            next[x] = v;
        }
        std::mem::swap(&mut h, &mut next);
        trace.iterations += 1;
        trace.final_delta = delta;
        if opts.record_iterates {
            trace.iterates.push(h.clone());
        }
        if !(top <= opts.ceiling) {
            return Err(Error::Divergence { iteration: trace.iterations, value: top });
        }
        if delta < opts.tol {
            trace.converged = true;
            break;
        }
        if trace.iterations >= opts.max_iter {
            return Err(Error::NonConvergence { iterations: trace.iterations, delta });
        }
    }
    let set = complement(n, theta);
    let residual = max_abs(&harmonic_residual(qp, &h, &set));
    Ok((
        HarmonicVector { values: h, base_index: theta, residual, harmonic_set: set, warnings },
        trace,
    ))
}

/// Same equation solved directly (`Ωh = 0` off `θ`, `h_θ = 1`). Intended for
/// `n ≤ 2000`. Near-singular systems, whose solution need not be the minimal
/// one, are flagged.
pub fn minimal_harmonic_solve(qp: &QPairSpec, theta: usize) -> Result<HarmonicVector> {
    let n = qp.n_states();
    if theta >= n {
        return Err(Error::InvalidArgument(format!("reference state {theta} out of range")));
    }
    if n > 2000 {
        return Err(Error::InvalidArgument("direct solve is limited to 2000 states".into()));
    }
    let mut warnings = unreachable_warning(qp, theta);
    let set = complement(n, theta);
    let m = set.len();
    let mut index = vec![usize::MAX; n];
    for (k, &x) in set.iter().enumerate() {
        index[x] = k;
    }
    let mut a = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for (k, &x) in set.iter().enumerate() {
        a[k * m + k] = qp.diagonal(x);
        for &(y, q) in qp.row(x) {
            if y == theta {
                rhs[k] -= q;
            } else {
                a[k * m + index[y]] += q;
            }
        }
    }
    let mut h = vec![1.0; n];
    if m > 0 {
        let lu = Lu::factor(m, a).ok_or_else(|| {
            Error::PreconditionViolated("harmonic system is singular; no unique solution".into())
        })?;
        if lu.pivot_ratio < 1e-12 {
            warnings.push(format!(
                "harmonic system is nearly singular (pivot ratio {:e}); solution may not be unique",
                lu.pivot_ratio
            ));
        }
        let sol = lu.solve(&rhs);
        for (k, &x) in set.iter().enumerate() {
            h[x] = sol[k];
        }
    }
    let residual = max_abs(&harmonic_residual(qp, &h, &set));
    Ok(HarmonicVector { values: h, base_index: theta, residual, harmonic_set: set, warnings })
}

/// Outcome of the comparison check against the minimal solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    /// `f` satisfies the inequality form of the minimal-solution equation.
    pub supersolution: bool,
    /// `f ≥ h*` componentwise.
    pub dominates: bool,
}

/// For a supersolution `f`, `f ≥ h*` must hold.
pub fn comparison_check(
    qp: &QPairSpec,
    theta: usize,
    f: &[f64],
    h_star: &[f64],
    tol: f64,
) -> Result<Comparison> {
    let n = qp.n_states();
    if f.len() != n || h_star.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.len().min(h_star.len()) });
    }
    let exit = exit_rates(qp, theta)?;
    let supersolution = (0..n).filter(|&x| x != theta).all(|x| {
        let rhs: f64 = qp
            .row(x)
            .iter()
            .map(|&(y, q)| q * if y == theta { 1.0 } else { f[y] })
            .sum::<f64>()
            / exit[x];
        f[x] >= rhs - tol
    });
    let dominates = (0..n).filter(|&x| x != theta).all(|x| f[x] >= h_star[x] - tol);
    Ok(Comparison { supersolution, dominates })
}

/// `h` on `{0..=n}` in logarithmic form, safe for chains where `h` grows
/// beyond floating-point range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledHarmonic {
    /// `ln h_i`.
    pub log_values: Vec<f64>,
    /// `h_{i+1}/h_i` for `i < n`.
    pub ratios: Vec<f64>,
    /// `max_{i<n} |Ωh(i)|/h_i`.
    pub relative_residual: f64,
    pub warnings: Vec<String>,
}

impl ScaledHarmonic {
    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    /// Plain values, if they fit in `f64`.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.log_values
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let v = l.exp();
                if v.is_finite() && v > 0.0 {
                    Ok(v)
                } else {
                    Err(Error::Overflow { index: i })
                }
            })
            .collect()
    }
}

const RESCALE_ABOVE: f64 = 1e150;

/// Birth–death harmonic function on `{0..=n}` with `h_0 = 1`:
///
/// ```text
/// q̃_m^(k) = −c_m (k ≤ m−2),  a_m − c_m (k = m−1)
/// F̃_i^(i) = 1,   F̃_m^(i) = (1/b_m) Σ_{k=i}^{m−1} q̃_m^(k) F̃_k^(i)
/// h_m = 1 − Σ_{k<m} Σ_{j≤k} F̃_k^(j) c_j/b_j
/// ```
///
/// Rows `F̃_m^(·)` are streamed with running partial sums, so time is
/// `O(n²)` and memory `O(n)`. All state is rescaled by a common factor
/// whenever `h` leaves the comfortable floating-point range.
pub fn bd_harmonic_scaled(spec: &BirthDeathSpec, n: usize) -> Result<ScaledHarmonic> {
    let mut warnings = Vec::new();
    let mut b = Vec::with_capacity(n + 1);
    let mut a = Vec::with_capacity(n + 1);
    let mut c = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i < n {
            b.push(spec.b(i)?);
        } else {
            b.push(spec.b(i).unwrap_or(f64::NAN));
        }
        a.push(spec.a(i)?);
        c.push(spec.c(i)?);
    }
    if c.iter().any(|&ci| ci > 0.0) && c.iter().any(|&ci| ci < 0.0) {
        warnings.push("potential has mixed sign; positivity of h is not guaranteed".into());
    } else if c.iter().any(|&ci| ci > 0.0) {
        warnings.push("positive potential; positivity of h is not guaranteed".into());
    }
    // e_j = −c_j / b_j
    let e: Vec<f64> = (0..n).map(|j| -c[j] / b[j]).collect();

    let mut log_values = Vec::with_capacity(n + 1);
    let mut ratios = Vec::with_capacity(n);
    let mut log_scale = 0.0_f64;
    let mut scale = 1.0_f64; // stored values are true values divided by `scale`
    let mut f_row: Vec<f64> = Vec::with_capacity(n); // F̃_m^(j), j ≤ m
    let mut psum: Vec<f64> = Vec::with_capacity(n); // Σ_{k=j}^{m−2} F̃_k^(j)
    let mut h = 1.0_f64;
    log_values.push(0.0);
    for m in 0..n {
        if m > 0 {
            let coef_prev = a[m] - c[m];
            for j in 0..m {
                let fj = (-c[m] * psum[j] + coef_prev * f_row[j]) / b[m];
                psum[j] += f_row[j];
                f_row[j] = fj;
            }
        }
        f_row.push(1.0 / scale);
        psum.push(0.0);
        let d: f64 = f_row.iter().zip(&e[..=m]).map(|(f, e)| f * e).sum();
        let next = h + d;
        if !(next.is_finite() && next > 0.0) {
            if next.is_finite() {
                return Err(Error::PreconditionViolated(format!("h_{} = {next} is not positive", m + 1)));
            }
            return Err(Error::Overflow { index: m + 1 });
        }
        ratios.push(next / h);
        h = next;
        log_values.push(h.ln() + log_scale);
        if h > RESCALE_ABOVE {
            let s = 1.0 / h;
            for v in f_row.iter_mut().chain(psum.iter_mut()) {
                *v *= s;
            }
            scale *= h;
            log_scale += h.ln();
            h = 1.0;
        }
    }
    let mut relative_residual = 0.0_f64;
    for m in 0..n {
        let back = if m == 0 { 0.0 } else { a[m] * (1.0 / ratios[m - 1] - 1.0) };
        let r = b[m] * (ratios[m] - 1.0) + back + c[m];
        relative_residual = relative_residual.max(r.abs());
    }
    Ok(ScaledHarmonic { log_values, ratios, relative_residual, warnings })
}

/// [`bd_harmonic_scaled`] returned as plain values (errors on overflow).
pub fn bd_harmonic_explicit(spec: &BirthDeathSpec, n: usize) -> Result<HarmonicVector> {
    let scaled = bd_harmonic_scaled(spec, n)?;
    let values = scaled.values()?;
    let mut residual = 0.0_f64;
    for m in 0..n {
        let left = if m == 0 { 0.0 } else { spec.a(m)? * (values[m - 1] - values[m]) };
        let r = spec.b(m)? * (values[m + 1] - values[m]) + left + spec.c(m)? * values[m];
        residual = residual.max(r.abs());
    }
    Ok(HarmonicVector {
        values,
        base_index: 0,
        residual,
        harmonic_set: (0..n).collect(),
        warnings: scaled.warnings,
    })
}

/// Limit of `z^(0) = 1`, `z^(n+1)(x) = Σ_y q(x,y)/(q(x)−c(x)) z^(n)(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalSolution {
    pub values: Vec<f64>,
    pub trace: IterationTrace,
    /// `max z̄ ≤ √tol`.
    pub vanishes: bool,
}

pub fn maximal_solution(qp: &QPairSpec, opts: &IterOptions) -> Result<MaximalSolution> {
    let n = qp.n_states();
    if let Some(i) = qp.killing().iter().position(|&c| c > 0.0) {
        return Err(Error::PreconditionViolated(format!("c_{i} > 0; need sup c ≤ 0")));
    }
    let exit: Vec<f64> = (0..n).map(|x| qp.total(x) - qp.killing()[x]).collect();
    if let Some(i) = exit.iter().position(|&d| d <= 0.0) {
        return Err(Error::PreconditionViolated(format!("state {i} has no exit rate")));
    }
    let mut z = vec![1.0; n];
    let mut next = z.clone();
    let mut trace = IterationTrace { monotone: true, ..Default::default() };
    if opts.record_iterates {
        trace.iterates.push(z.clone());
    }
    loop {
        let mut delta = 0.0_f64;
        for x in 0..n {
            let v = qp.row(x).iter().map(|&(y, q)| q * z[y]).sum::<f64>() / exit[x];
            if v > z[x] + 4.0 * f64::EPSILON * z[x] || v < 0.0 {
                trace.monotone = false;
            }
            delta = delta.max((z[x] - v).abs());
            next[x] = v;
        }
        std::mem::swap(&mut z, &mut next);
        trace.iterations += 1;
        trace.final_delta = delta;
        if opts.record_iterates {
            trace.iterates.push(z.clone());
        }
        if delta < opts.tol {
            trace.converged = true;
            break;
        }
        if trace.iterations >= opts.max_iter {
            return Err(Error::NonConvergence { iterations: trace.iterations, delta });
        }
    }
    let vanishes = max_abs(&z) <= opts.tol.sqrt();
    Ok(MaximalSolution { values: z, trace, vanishes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{bd_to_qpair, RateSeq};

    fn two_state_killed() -> QPairSpec {
        // q_01 = 1, q_10 = 2, c = (0, −1)
        QPairSpec::conservative(vec![vec![(1, 1.0)], vec![(0, 2.0)]], vec![0.0, -1.0]).unwrap()
    }

    #[test]
    fn two_state_minimal_solution() {
        let (h, trace) = minimal_harmonic(&two_state_killed(), 0, &IterOptions::default()).unwrap();
        // single equation: h_1 = q_10 / (q_1 − c_1) = 2/3
        assert!((h.values[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(h.values[0], 1.0);
        assert!(trace.converged && trace.monotone);
        let r = harmonic_residual(&two_state_killed(), &h.values, &[1]);
        assert!(r[0].abs() < 1e-15);
    }

    #[test]
    fn constants_are_fixed_points() {
        let qp = QPairSpec::conservative(
            vec![vec![(1, 1.0), (2, 0.5)], vec![(0, 2.0)], vec![(1, 3.0)]],
            vec![0.0; 3],
        )
        .unwrap();
        for theta in 0..3 {
            let (h, _) = minimal_harmonic(&qp, theta, &IterOptions::default()).unwrap();
            assert!(h.values.iter().all(|&v| (v - 1.0).abs() < 1e-11), "{:?}", h.values);
        }
    }

    #[test]
    fn residual_of_constant_under_killing() {
        let r = harmonic_residual(&two_state_killed(), &[1.0, 1.0], &[1]);
        assert_eq!(r, vec![-1.0]);
    }

    #[test]
    fn divergence_is_reported() {
        // positive potential makes the kernel row sums exceed 1
        let qp = QPairSpec::conservative(vec![vec![(1, 1.0)], vec![(0, 1.0), (2, 1.0)], vec![(1, 1.0)]], vec![0.0, 0.0, 0.9])
            .unwrap();
        let r = minimal_harmonic(&qp, 0, &IterOptions::default());
        assert!(matches!(r, Err(Error::Divergence { .. })), "{r:?}");
    }

    #[test]
    fn non_convergence_is_reported() {
        let qp = two_state_killed();
        let opts = IterOptions { max_iter: 1, tol: 0.0, ..Default::default() };
        assert!(matches!(minimal_harmonic(&qp, 1, &opts), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn potential_at_rate_violates_precondition() {
        let qp = QPairSpec::conservative(vec![vec![(1, 1.0)], vec![(0, 2.0)]], vec![0.0, 2.0]).unwrap();
        assert!(matches!(
            minimal_harmonic(&qp, 0, &IterOptions::default()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn unreachable_states_warn() {
        let qp = QPairSpec::conservative(
            vec![vec![(1, 1.0)], vec![(0, 1.0)], vec![(3, 1.0)], vec![(2, 1.0)]],
            vec![0.0, -1.0, -1.0, 0.0],
        )
        .unwrap();
        let (h, _) = minimal_harmonic(&qp, 0, &IterOptions::default()).unwrap();
        assert_eq!(h.warnings.len(), 1);
        assert_eq!((h.values[2], h.values[3]), (0.0, 0.0));
        assert!(!h.is_positive());
    }

    #[test]
    fn explicit_recursion_without_killing_is_one() {
        let spec = BirthDeathSpec::new(
            RateSeq::Poly(vec![1.0, 1.0]),
            RateSeq::Poly(vec![0.0, 2.0]),
            RateSeq::constant(0.0),
            20,
        );
        let h = bd_harmonic_explicit(&spec, 20).unwrap();
        assert!(h.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn explicit_recursion_matches_forward_solve() {
        // b ≡ a ≡ 1, c ≡ −1: forward substitution of
        // b_n(h_{n+1}−h_n) + a_n(h_{n−1}−h_n) + c_n h_n = 0 gives 1, 2, 5, 13
        let spec = BirthDeathSpec::new(
            RateSeq::constant(1.0),
            RateSeq::constant(1.0),
            RateSeq::constant(-1.0),
            3,
        );
        let h = bd_harmonic_explicit(&spec, 3).unwrap();
        for (v, e) in h.values.iter().zip([1.0, 2.0, 5.0, 13.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        assert!(h.residual < 1e-13);
    }

    #[test]
    fn killing_makes_h_strictly_increasing() {
        let spec = BirthDeathSpec::new(
            RateSeq::Values(vec![1.0, 2.0, 0.5, 3.0, 1.0, 1.0]),
            RateSeq::Values(vec![2.0, 1.0, 4.0, 1.0, 2.0]),
            RateSeq::Values(vec![0.0, -0.3, 0.0, 0.0, -1.0, 0.0]),
            5,
        );
        let h = bd_harmonic_explicit(&spec, 5).unwrap();
        // nondecreasing, strictly after the first killed state
        assert!(h.values.windows(2).all(|w| w[1] >= w[0]));
        assert!(h.values.windows(2).skip(1).all(|w| w[1] > w[0]));
    }

    #[test]
    fn scaled_recursion_survives_overflow() {
        let spec = BirthDeathSpec::new(
            RateSeq::constant(1.0),
            RateSeq::constant(1.0),
            RateSeq::constant(-1.0),
            2000,
        );
        let s = bd_harmonic_scaled(&spec, 2000).unwrap();
        assert!(s.log_values[2000] > 1900.0);
        assert!(s.relative_residual < 1e-12, "{}", s.relative_residual);
        let golden = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((s.ratios[1999] - golden).abs() < 1e-12);
        assert!(matches!(s.values(), Err(Error::Overflow { .. })));
    }

    #[test]
    fn explicit_agrees_with_minimal_iteration_in_the_interior() {
        let spec = BirthDeathSpec::new(
            RateSeq::Values(vec![1.0, 2.0, 0.5, 3.0, 1.0]),
            RateSeq::Values(vec![2.0, 1.0, 4.0, 1.0, 2.0]),
            RateSeq::Values(vec![-0.2, -0.3, 0.0, -0.1, -1.0, -0.5]),
            5,
        );
        let h = bd_harmonic_explicit(&spec, 5).unwrap();
        // With θ = 5 the minimal equation holds on {0..4}: same function up to scale.
        let qp = bd_to_qpair(&spec, 5).unwrap();
        let (m, _) = minimal_harmonic(&qp, 5, &IterOptions::default()).unwrap();
        let scale = h.values[5];
        for i in 0..=5 {
            assert!((m.values[i] * scale - h.values[i]).abs() < 1e-8 * h.values[i]);
        }
    }

    #[test]
    fn maximal_solution_without_killing_is_one() {
        let qp = QPairSpec::conservative(vec![vec![(1, 1.0)], vec![(0, 2.0)]], vec![0.0, 0.0]).unwrap();
        let z = maximal_solution(&qp, &IterOptions::default()).unwrap();
        assert_eq!(z.values, vec![1.0, 1.0]);
        assert_eq!(z.trace.iterations, 1);
        assert!(!z.vanishes);
    }

    #[test]
    fn maximal_solution_matches_kernel_power_iteration() {
        let qp = QPairSpec::conservative(vec![vec![(1, 1.0)], vec![(0, 1.0)]], vec![-1.0, -1.0]).unwrap();
        let opts = IterOptions { record_iterates: true, ..Default::default() };
        let z = maximal_solution(&qp, &opts).unwrap();
        // kernel [[0, ½], [½, 0]]: z^(k) = 2^{−k}
        for (k, it) in z.trace.iterates.iter().enumerate().take(10) {
            assert_eq!(it[0], 0.5f64.powi(k as i32));
        }
        assert!(z.vanishes);
        assert!(z.trace.monotone);
    }

    #[test]
    fn maximal_solution_rejects_positive_potential() {
        let qp = QPairSpec::conservative(vec![vec![(1, 1.0)], vec![(0, 1.0)]], vec![0.5, 0.0]).unwrap();
        assert!(matches!(
            maximal_solution(&qp, &IterOptions::default()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn comparison_with_supersolution() {
        let qp = two_state_killed();
        let (h, _) = minimal_harmonic(&qp, 0, &IterOptions::default()).unwrap();
        let c = comparison_check(&qp, 0, &[1.0, 0.9], &h.values, 1e-14).unwrap();
        assert!(c.supersolution && c.dominates);
        let c = comparison_check(&qp, 0, &[1.0, 0.5], &h.values, 1e-14).unwrap();
        assert!(!c.supersolution && !c.dominates);
    }

    #[test]
    fn solve_backend_matches_iteration() {
        let qp = QPairSpec::conservative(
            vec![vec![(1, 1.0), (2, 0.5)], vec![(0, 2.0), (2, 1.0)], vec![(1, 3.0), (0, 0.2)]],
            vec![0.0, -0.4, -0.1],
        )
        .unwrap();
        let (h, _) = minimal_harmonic(&qp, 0, &IterOptions::default()).unwrap();
        let s = minimal_harmonic_solve(&qp, 0).unwrap();
        for i in 0..3 {
            assert!((h.values[i] - s.values[i]).abs() < 1e-11);
        }
        assert!(s.warnings.is_empty());
    }
}
