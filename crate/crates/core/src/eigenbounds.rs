//! Principal eigenvalue of birth–death chains with killing, and its
//! two-sided bound `1/(4δ̃) ≤ λ₀ ≤ 1/δ̃` through the Hardy constant `δ̃`.

use serde::{Deserialize, Serialize, Serializer};

use crate::chain::{BirthDeathSpec, MeasurePair};
use crate::error::{Error, Result};
use crate::harmonic::{bd_harmonic_scaled, ScaledHarmonic};
use crate::spectra::tridiagonal_ql;

const BISECTION_RTOL: f64 = 1e-15;
const BISECTION_MAX_STEPS: usize = 300;

struct Rates {
    b: Vec<f64>,
    a: Vec<f64>,
    c: Vec<f64>,
}

fn collect_rates(spec: &BirthDeathSpec, n: usize) -> Result<Rates> {
    spec.require_killing(n)?;
    let mut r = Rates { b: Vec::with_capacity(n + 1), a: Vec::with_capacity(n + 1), c: Vec::with_capacity(n + 1) };
    for i in 0..=n {
        r.b.push(spec.b(i)?);
        r.a.push(spec.a(i)?);
        r.c.push(spec.c(i)?);
    }
    Ok(r)
}

/// True when `λ` lies strictly below the smallest eigenvalue of the
/// Dirichlet-truncated negative generator. The pivots of the `LDLᵀ`
/// factorization of `−A − λ` are tracked as `b_k + g_k`, which keeps the
/// recursion free of cancellation when rates are large.
fn below_spectrum(r: &Rates, lambda: f64) -> bool {
    let mut g = -r.c[0] - lambda;
    if r.b[0] + g <= 0.0 {
        return false;
    }
    for k in 1..r.b.len() {
        g = r.a[k] * g / (r.b[k - 1] + g) - r.c[k] - lambda;
        if r.b[k] + g <= 0.0 {
            return false;
        }
    }
    true
}

/// Smallest eigenvalue of the negative generator on `{0..=n}` with
/// `f_{n+1} = 0`, found by bisection on the pivot signs.
pub fn lambda0_variational(spec: &BirthDeathSpec, n: usize) -> Result<f64> {
    let r = collect_rates(spec, n)?;
    let mut lo = 0.0;
    let mut hi = r.b[0] - r.c[0];
    for _ in 0..BISECTION_MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        if below_spectrum(&r, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_RTOL * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Same quantity by a full tridiagonal QL solve (used as a cross-check).
pub fn lambda0_ql(spec: &BirthDeathSpec, n: usize) -> Result<f64> {
    let r = collect_rates(spec, n)?;
    let d: Vec<f64> = (0..=n).map(|k| r.a[k] + r.b[k] - r.c[k]).collect();
    let e: Vec<f64> = (0..n).map(|k| -(r.b[k] * r.a[k + 1]).sqrt()).collect();
    Ok(tridiagonal_ql(&d, &e, false)?.values[0])
}

/// Classical Hardy constant `sup_n Σ_{j≤n} μ_j Σ_{n≤k<K} ν̂_k` over the
/// states where both sums are defined.
pub fn hardy_constant(mu: &[f64], nu_hat: &[f64]) -> (f64, usize) {
    let len = mu.len().min(nu_hat.len());
    let mut tails = vec![0.0; nu_hat.len() + 1];
    for k in (0..nu_hat.len()).rev() {
        tails[k] = tails[k + 1] + nu_hat[k];
    }
    let mut head = 0.0;
    let mut best = (0.0, 0);
    for n in 0..len {
        head += mu[n];
        let v = head * tails[n];
        if v > best.0 {
            best = (v, n);
        }
    }
    best
}

/// `sup_{n≤N} Σ_{j≤n} μ_j h_j² Σ_{k=n}^{N} 1/(h_k h_{k+1} μ_k b_k)` evaluated
/// directly with unscaled `h` on `{0..=N+1}`.
pub fn delta_tilde_h_form(measures: &MeasurePair, spec: &BirthDeathSpec, h: &[f64]) -> Result<(f64, usize)> {
    if h.len() < 2 {
        return Err(Error::InvalidArgument("h needs at least two values".into()));
    }
    let n = h.len() - 2;
    if measures.mu.len() < n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: measures.mu.len() });
    }
    let weights: Vec<f64> = (0..=n).map(|j| measures.mu[j] * h[j] * h[j]).collect();
    let mut dual = Vec::with_capacity(n + 1);
    for k in 0..=n {
        dual.push(1.0 / (h[k] * h[k + 1] * measures.mu[k] * spec.b(k)?));
    }
    Ok(hardy_constant(&weights, &dual))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailStatus {
    /// The tail remainder estimate is below the requested tolerance.
    Converged,
    /// Partial suprema kept at least doubling across two doublings of the level.
    Divergent,
}

/// Result of [`delta_tilde`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaTilde {
    #[serde(serialize_with = "ser_extended")]
    pub value: f64,
    pub n_sup: usize,
    pub status: TailStatus,
    /// Largest ratio of consecutive tail terms over the last window.
    pub tail_ratio: f64,
    /// Share of the inner sum at `n_sup` contributed by the estimated tail.
    pub tail_relative: f64,
    /// `(level, sup_{n≤level} of the truncated products)`.
    pub partial_suprema: Vec<(usize, f64)>,
    /// Products `Σ_{j≤n} μ̃_j · Σ_{k≥n} ν̂̃_k` for `n ≤ N`, tail included.
    pub profile: Vec<f64>,
}

impl DeltaTilde {
    pub fn is_finite(&self) -> bool {
        self.status == TailStatus::Converged
    }
}

fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Transformed rates `b̃_n = b_n r_n`, `ã_n = a_n / r_{n−1}` for `n ≤ len`.
fn transformed_rates(spec: &BirthDeathSpec, ratios: &[f64], len: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut bt = Vec::with_capacity(len + 1);
    let mut at = Vec::with_capacity(len + 1);
    for n in 0..=len {
        bt.push(spec.b(n)? * ratios[n]);
        at.push(if n == 0 { 0.0 } else { spec.a(n)? / ratios[n - 1] });
    }
    Ok((bt, at))
}

/// `A_n = Σ_{j≤n} μ̃_j/μ̃_n` and `B_n = μ̃_n Σ_{n≤k≤L} ν̂̃_k + tail`, so that
/// `A_n B_n` is the Hardy product at `n`. Ratios of `μ̃` come from the rates,
/// so nothing overflows.
fn products(bt: &[f64], at: &[f64], level: usize, tail_factor: f64) -> Vec<f64> {
    let mut b = vec![0.0; level + 1];
    b[level] = tail_factor / bt[level];
    for n in (0..level).rev() {
        b[n] = 1.0 / bt[n] + b[n + 1] * at[n + 1] / bt[n];
    }
    let mut a = 1.0;
    let mut out = Vec::with_capacity(level + 1);
    for n in 0..=level {
        if n > 0 {
            a = 1.0 + a * at[n] / bt[n - 1];
        }
        out.push(a * b[n]);
    }
    out
}

fn argmax(v: &[f64]) -> (f64, usize) {
    v.iter()
        .enumerate()
        .fold((f64::NEG_INFINITY, 0), |m, (i, &x)| if x > m.0 { (x, i) } else { m })
}

/// `δ̃ = sup_n Σ_{j≤n} μ_j h_j² Σ_{k≥n} 1/(h_k h_{k+1} μ_k b_k)` for
/// `n ≤ n_max`.
///
/// `h` must cover `{0..=n_max+2}`. The tail beyond `n_max` is bounded by a
/// geometric series with the largest term ratio `ã_{k+1}/b̃_{k+1}` seen over
/// the last window. The value is accepted when that ratio is below one and
/// the tail share at the maximizer is at most `tail_tol`. Otherwise `+∞` is
/// reported when the truncated supremum at levels `n_max/4`, `n_max/2`,
/// `n_max` at least doubles twice; this is a heuristic diagnosis.
pub fn delta_tilde(spec: &BirthDeathSpec, h: &ScaledHarmonic, n_max: usize, tail_tol: f64) -> Result<DeltaTilde> {
    spec.require_killing(n_max + 1)?;
    if n_max < 4 {
        return Err(Error::InvalidArgument("n_max must be at least 4".into()));
    }
    if h.ratios.len() < n_max + 2 {
        return Err(Error::DimensionMismatch { expected: n_max + 3, found: h.len() });
    }
    let (bt, at) = transformed_rates(spec, &h.ratios, n_max + 1)?;
    let window = (n_max / 20).max(1);
    let tail_ratio = (n_max - window..=n_max)
        .map(|k| at[k + 1] / bt[k + 1])
        .fold(0.0, f64::max);

    let levels = [n_max / 4, n_max / 2, n_max];
    let partial_suprema: Vec<(usize, f64)> =
        levels.iter().map(|&l| (l, argmax(&products(&bt, &at, l, 1.0)).0)).collect();

    if tail_ratio < 1.0 {
        let with_tail = products(&bt, &at, n_max, 1.0 / (1.0 - tail_ratio));
        let (value, n_sup) = argmax(&with_tail);
        let bare = products(&bt, &at, n_max, 1.0);
        let tail_relative = (with_tail[n_sup] - bare[n_sup]) / with_tail[n_sup];
        if tail_relative <= tail_tol {
            return Ok(DeltaTilde {
                value,
                n_sup,
                status: TailStatus::Converged,
                tail_ratio,
                tail_relative,
                partial_suprema,
                profile: with_tail,
            });
        }
    }
    let s: Vec<f64> = partial_suprema.iter().map(|p| p.1).collect();
    if s[1] >= 2.0 * s[0] && s[2] >= 2.0 * s[1] {
        let profile = products(&bt, &at, n_max, 1.0);
        let n_sup = argmax(&profile).1;
        return Ok(DeltaTilde {
            value: f64::INFINITY,
            n_sup,
            status: TailStatus::Divergent,
            tail_ratio,
            tail_relative: 1.0,
            partial_suprema,
            profile,
        });
    }
    Err(Error::TailNotResolved { half: s[1], full: s[2] })
}

/// Output of [`bounds_report`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    #[serde(serialize_with = "ser_extended")]
    pub delta_tilde: f64,
    /// `1/(4δ̃)`.
    pub lower: f64,
    /// `1/δ̃`.
    pub upper: f64,
    /// λ₀ at the largest truncation level.
    pub lambda0_numeric: f64,
    /// λ₀ at each truncation level, in order.
    pub lambda0_levels: Vec<f64>,
    pub n_sup: usize,
    pub truncation_levels: Vec<usize>,
    pub tail_status: TailStatus,
    pub tail_relative: f64,
    /// `1e−8` plus the change of λ₀ between the last two levels.
    pub slack: f64,
    pub containment: bool,
    pub verdict: String,
    /// `max |Ωh|/h` over the recursion; large values mean `h` is not trustworthy.
    pub h_relative_residual: f64,
    pub warnings: Vec<String>,
    /// Running supremum of the Hardy products up to each `n`.
    #[serde(skip)]
    pub running_sup: Vec<f64>,
    /// The Hardy products themselves, tail included.
    #[serde(skip)]
    pub profile: Vec<f64>,
}

/// Runs the harmonic recursion, `δ̃` and λ₀ at `n_max/2` and `n_max`, and
/// checks `λ₀ ∈ [1/(4δ̃) − ε, 1/δ̃ + ε]`.
pub fn bounds_report(spec: &BirthDeathSpec, n_max: usize, tail_tol: f64) -> Result<BoundsReport> {
    spec.require_killing(n_max + 2)?;
    let h = bd_harmonic_scaled(spec, n_max + 2)?;
    let dt = delta_tilde(spec, &h, n_max, tail_tol)?;
    let levels = vec![n_max / 2, n_max];
    let lambdas = levels.iter().map(|&l| lambda0_variational(spec, l)).collect::<Result<Vec<_>>>()?;
    let lambda0 = lambdas[1];
    let slack = 1e-8 + (lambdas[0] - lambdas[1]).abs();
    let (lower, upper) = if dt.value.is_finite() { (0.25 / dt.value, 1.0 / dt.value) } else { (0.0, 0.0) };
    let containment = lambda0 >= lower - slack && lambda0 <= upper + slack;
    let verdict = if dt.is_finite() { "λ₀ > 0" } else { "λ₀ = 0" }.to_string();
    let mut running = Vec::with_capacity(dt.profile.len());
    let mut m = f64::NEG_INFINITY;
    for &v in &dt.profile {
        m = m.max(v);
        running.push(m);
    }
    Ok(BoundsReport {
        delta_tilde: dt.value,
        lower,
        upper,
        lambda0_numeric: lambda0,
        lambda0_levels: lambdas,
        n_sup: dt.n_sup,
        truncation_levels: levels,
        tail_status: dt.status,
        tail_relative: dt.tail_relative,
        slack,
        containment,
        verdict,
        h_relative_residual: h.relative_residual,
        warnings: h.warnings,
        running_sup: running,
        profile: dt.profile,
    })
}
