//! Finite q-pairs, birth–death specifications and their measures.
//!
//! The generator of a q-pair acts as
//! `(Ωf)(i) = Σ_{j≠i} q_ij f_j + (c_i − q_i) f_i`,
//! which is `Σ_j q_ij (f_j − f_i) + c_i f_i` whenever the pair is
//! conservative. A non-conservative total rate behaves as extra killing.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CONSERVATIVE_RTOL: f64 = 1e-12;

/// A validated finite jump generator with potential.
///
/// Rates are kept in sparse row form, sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct QPairSpec {
    rows: Vec<Vec<(usize, f64)>>,
    total: Vec<f64>,
    killing: Vec<f64>,
    conservative: bool,
}

impl QPairSpec {
    /// Validates a dense rate matrix (diagonal ignored) with totals and potential.
    pub fn new(rates: &[Vec<f64>], total: Vec<f64>, killing: Vec<f64>) -> Result<Self> {
        validate_qpair(rates, total, killing)
    }

    /// Builds a q-pair from sparse rows; zero rates and diagonal entries are dropped.
    pub fn from_rows(
        rows: Vec<Vec<(usize, f64)>>,
        total: Vec<f64>,
        killing: Vec<f64>,
    ) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("a q-pair needs at least one state".into()));
        }
        for len in [total.len(), killing.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        let mut clean = Vec::with_capacity(n);
        for (i, row) in rows.into_iter().enumerate() {
            let mut r: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (j, q) in row {
                if j >= n {
                    return Err(Error::DimensionMismatch { expected: n, found: j + 1 });
                }
                if !q.is_finite() {
                    return Err(Error::NonFinite(i));
                }
                if q < 0.0 {
                    return Err(Error::NegativeRate(i, j));
                }
                if j != i && q > 0.0 {
                    r.push((j, q));
                }
            }
            r.sort_by_key(|&(j, _)| j);
            r.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            clean.push(r);
        }
        let mut conservative = true;
        for i in 0..n {
            if !total[i].is_finite() || !killing[i].is_finite() {
                return Err(Error::NonFinite(i));
            }
            let s: f64 = clean[i].iter().map(|&(_, q)| q).sum();
            let slack = CONSERVATIVE_RTOL * s.max(total[i]).max(f64::MIN_POSITIVE);
            if total[i] < s - slack {
                return Err(Error::NotTotallyStable(i));
            }
            if killing[i] > total[i] {
                return Err(Error::PotentialExceedsRate(i));
            }
            if (total[i] - s).abs() > slack {
                conservative = false;
            }
        }
        Ok(Self { rows: clean, total, killing, conservative })
    }

    /// Conservative q-pair: the total rates are the row sums.
    pub fn conservative(rows: Vec<Vec<(usize, f64)>>, killing: Vec<f64>) -> Result<Self> {
        let total = rows
            .iter()
            .map(|r| r.iter().filter(|e| e.1 > 0.0).map(|e| e.1).sum())
            .collect();
        Self::from_rows(rows, total, killing)
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => 0.0,
        }
    }

    pub fn total(&self, i: usize) -> f64 {
        self.total[i]
    }

    pub fn totals(&self) -> &[f64] {
        &self.total
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    pub fn is_conservative(&self) -> bool {
        self.conservative
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|e| e.1).sum()
    }

    /// Diagonal entry `c_i − q_i` of the generator matrix.
    pub fn diagonal(&self, i: usize) -> f64 {
        self.killing[i] - self.total[i]
    }

    /// `(Ωf)(i)`.
    pub fn apply_at(&self, f: &[f64], i: usize) -> f64 {
        let jumps: f64 = self.rows[i].iter().map(|&(j, q)| q * f[j]).sum();
        jumps + self.diagonal(i) * f[i]
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n_states()).map(|i| self.apply_at(f, i)).collect()
    }

    /// True when every jump is to a nearest neighbour.
    pub fn is_tridiagonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().all(|&(j, _)| j + 1 == i || j == i + 1))
    }

    /// Dense row-major generator matrix.
    pub fn generator_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n_states();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for &(j, q) in &self.rows[i] {
                m[i][j] = q;
            }
            m[i][i] = self.diagonal(i);
        }
        m
    }

    /// Dense rate matrix with a zero diagonal, as accepted by [`QPairSpec::new`].
    pub fn dense_rates(&self) -> Vec<Vec<f64>> {
        let n = self.n_states();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for &(j, q) in &self.rows[i] {
                m[i][j] = q;
            }
        }
        m
    }

    /// States from which `target` can be reached along positive rates.
    pub fn can_reach(&self, target: usize) -> Vec<bool> {
        let n = self.n_states();
        let mut incoming = vec![Vec::new(); n];
        for i in 0..n {
            for &(j, _) in &self.rows[i] {
                incoming[j].push(i);
            }
        }
        let mut seen = vec![false; n];
        seen[target] = true;
        let mut queue = VecDeque::from([target]);
        while let Some(j) = queue.pop_front() {
            for &i in &incoming[j] {
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back(i);
                }
            }
        }
        seen
    }

    /// A symmetrizing measure built along a spanning forest (`μ = 1` at each
    /// component root). Fails with `NotReversible` when detailed balance cannot hold.
    pub fn reversible_measure(&self) -> Result<Vec<f64>> {
        let n = self.n_states();
        let mut mu = vec![0.0; n];
        for root in 0..n {
            if mu[root] > 0.0 {
                continue;
            }
            mu[root] = 1.0;
            let mut queue = VecDeque::from([root]);
            while let Some(i) = queue.pop_front() {
                for &(j, q) in &self.rows[i] {
                    if mu[j] == 0.0 {
                        let back = self.rate(j, i);
                        if back == 0.0 {
                            return Err(Error::NotReversible { i, j, violation: f64::INFINITY });
                        }
                        mu[j] = mu[i] * q / back;
                        if !(mu[j].is_finite() && mu[j] > 0.0) {
                            return Err(Error::Overflow { index: j });
                        }
                        queue.push_back(j);
                    }
                }
            }
        }
        check_reversible(self, &mu)?;
        Ok(mu)
    }
}

/// Validates dense input (`rates[i][j] = q_ij`, diagonal ignored).
pub fn validate_qpair(rates: &[Vec<f64>], total: Vec<f64>, killing: Vec<f64>) -> Result<QPairSpec> {
    let n = rates.len();
    let mut rows = Vec::with_capacity(n);
    for (i, r) in rates.iter().enumerate() {
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        let mut row = Vec::new();
        for (j, &q) in r.iter().enumerate() {
            if i == j {
                continue;
            }
            if q < 0.0 {
                return Err(Error::NegativeRate(i, j));
            }
            row.push((j, q));
        }
        rows.push(row);
    }
    QPairSpec::from_rows(rows, total, killing)
}

/// Worst relative violation of `μ_i q_ij = μ_j q_ji`; errors above `1e−10`.
pub fn check_reversible(qp: &QPairSpec, mu: &[f64]) -> Result<()> {
    let n = qp.n_states();
    if mu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mu.len() });
    }
    if let Some(i) = mu.iter().position(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidArgument(format!("measure must be positive (index {i})")));
    }
    let mut worst = (0, 0, 0.0_f64);
    for i in 0..n {
        for &(j, q) in qp.row(i) {
            let lhs = mu[i] * q;
            let rhs = mu[j] * qp.rate(j, i);
            let v = (lhs - rhs).abs() / lhs.max(rhs);
            if v > worst.2 {
                worst = (i, j, v);
            }
        }
    }
    if worst.2 > 1e-10 {
        return Err(Error::NotReversible { i: worst.0, j: worst.1, violation: worst.2 });
    }
    Ok(())
}

/// A lazily evaluated rate sequence.
#[derive(Clone)]
pub enum RateSeq {
    /// Explicit values; index 0 is the first element.
    Values(Vec<f64>),
    /// `Σ_k coeffs[k] i^k`.
    Poly(Vec<f64>),
    /// `scale · ratio^i`.
    Geometric { scale: f64, ratio: f64 },
    Func(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl RateSeq {
    pub fn constant(v: f64) -> Self {
        RateSeq::Poly(vec![v])
    }

    pub fn at(&self, i: usize) -> Option<f64> {
        match self {
            RateSeq::Values(v) => v.get(i).copied(),
            RateSeq::Poly(c) => {
                let x = i as f64;
                Some(c.iter().rev().fold(0.0, |acc, &k| acc * x + k))
            }
            RateSeq::Geometric { scale, ratio } => Some(scale * ratio.powi(i as i32)),
            RateSeq::Func(f) => Some(f(i)),
        }
    }
}

impl fmt::Debug for RateSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateSeq::Values(v) => f.debug_tuple("Values").field(v).finish(),
            RateSeq::Poly(c) => f.debug_tuple("Poly").field(c).finish(),
            RateSeq::Geometric { scale, ratio } => f
                .debug_struct("Geometric")
                .field("scale", scale)
                .field("ratio", ratio)
                .finish(),
            RateSeq::Func(_) => f.write_str("Func(..)"),
        }
    }
}

/// How the chain is closed off at the truncation level `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// The birth rate at `N` is dropped; the truncated chain is conservative.
    #[default]
    Reflecting,
    /// Births from `N` leave the state space (`q_N = a_N + b_N`).
    Absorbing,
}

/// Birth–death rates on `{0, 1, ...}`.
///
/// `birth` is indexed from 0 (`b_0, b_1, ...`), `killing` from 0, while
/// `death` starts at state 1: for explicit values `death[0]` is `a_1`.
/// Formula sequences are evaluated at the state index itself.
#[derive(Debug, Clone)]
pub struct BirthDeathSpec {
    pub birth: RateSeq,
    pub death: RateSeq,
    pub killing: RateSeq,
    pub truncation: usize,
    pub policy: Truncation,
}

impl BirthDeathSpec {
    pub fn new(birth: RateSeq, death: RateSeq, killing: RateSeq, truncation: usize) -> Self {
        Self { birth, death, killing, truncation, policy: Truncation::Reflecting }
    }

    /// `b_i`.
    pub fn b(&self, i: usize) -> Result<f64> {
        let v = self.birth.at(i).ok_or(Error::MissingRate(i))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!("birth rate b_{i} = {v} must be positive")));
        }
        Ok(v)
    }

    /// `a_i` for `i ≥ 1`; `a_0 = 0`.
    pub fn a(&self, i: usize) -> Result<f64> {
        if i == 0 {
            return Ok(0.0);
        }
        let v = match &self.death {
            RateSeq::Values(v) => v.get(i - 1).copied(),
            other => other.at(i),
        }
        .ok_or(Error::MissingRate(i))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!("death rate a_{i} = {v} must be positive")));
        }
        Ok(v)
    }

    /// `c_i`; an empty value list means no potential.
    pub fn c(&self, i: usize) -> Result<f64> {
        let v = match &self.killing {
            RateSeq::Values(v) if v.is_empty() => Some(0.0),
            other => other.at(i),
        }
        .ok_or(Error::MissingRate(i))?;
        if !v.is_finite() {
            return Err(Error::NonFinite(i));
        }
        Ok(v)
    }

    /// Errors unless `c_i ≤ 0` on `0..=n`.
    pub fn require_killing(&self, n: usize) -> Result<()> {
        for i in 0..=n {
            if self.c(i)? > 0.0 {
                return Err(Error::PreconditionViolated(format!(
                    "c_{i} = {} > 0; killing rates must be nonnegative",
                    self.c(i)?
                )));
            }
        }
        Ok(())
    }
}

/// Tridiagonal q-pair on `{0, ..., n}`.
pub fn bd_to_qpair(spec: &BirthDeathSpec, n: usize) -> Result<QPairSpec> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation level must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(n + 1);
    let mut total = Vec::with_capacity(n + 1);
    let mut killing = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = Vec::with_capacity(2);
        let mut q = 0.0;
        if i > 0 {
            let a = spec.a(i)?;
            row.push((i - 1, a));
            q += a;
        }
        if i < n {
            let b = spec.b(i)?;
            row.push((i + 1, b));
            q += b;
        } else if spec.policy == Truncation::Absorbing {
            q += spec.b(i)?;
        }
        rows.push(row);
        total.push(q);
        killing.push(spec.c(i)?);
    }
    QPairSpec::from_rows(rows, total, killing)
}

/// Speed measure `μ` and its dual `ν̂_i = 1/(μ_i b_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurePair {
    pub mu: Vec<f64>,
    /// Present for every state whose birth rate is defined.
    pub nu_hat: Vec<f64>,
}

impl MeasurePair {
    /// `max μ / min μ`.
    pub fn condition_ratio(&self) -> f64 {
        let max = self.mu.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.mu.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// `μ_0 = 1`, `μ_i = μ_{i−1} b_{i−1}/a_i`, and `ν̂_i = 1/(μ_i b_i)`.
pub fn bd_measures(spec: &BirthDeathSpec, n: usize) -> Result<MeasurePair> {
    let mut mu = Vec::with_capacity(n + 1);
    mu.push(1.0);
    for i in 1..=n {
        let m = mu[i - 1] * spec.b(i - 1)? / spec.a(i)?;
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Overflow { index: i });
        }
        mu.push(m);
    }
    let mut nu_hat = Vec::with_capacity(n + 1);
    for (i, &m) in mu.iter().enumerate() {
        match spec.b(i) {
            Ok(b) => {
                let v = 1.0 / (m * b);
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Overflow { index: i });
                }
                nu_hat.push(v);
            }
            Err(Error::MissingRate(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(MeasurePair { mu, nu_hat })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(c1: f64, q01: f64) -> Result<QPairSpec> {
        QPairSpec::new(&[vec![0.0, q01], vec![2.0, 0.0]], vec![1.0, 2.0], vec![0.0, c1])
    }

    fn bd_example() -> BirthDeathSpec {
        BirthDeathSpec::new(
            RateSeq::Values(vec![2.0, 3.0]),
            RateSeq::Values(vec![1.0, 4.0]),
            RateSeq::Values(vec![]),
            2,
        )
    }

    #[test]
    fn validate_accepts_conservative_pair() {
        let qp = two_state(0.0, 1.0).unwrap();
        assert!(qp.is_conservative());
        assert_eq!(qp.rate(0, 1), 1.0);
        assert_eq!(qp.rate(1, 0), 2.0);
    }

    #[test]
    fn validate_rejects_potential_above_rate() {
        assert_eq!(two_state(3.0, 1.0), Err(Error::PotentialExceedsRate(1)));
    }

    #[test]
    fn validate_rejects_negative_rate() {
        assert_eq!(two_state(0.0, -1.0), Err(Error::NegativeRate(0, 1)));
    }

    #[test]
    fn validate_rejects_unstable_total() {
        let r = QPairSpec::new(&[vec![0.0, 2.0], vec![2.0, 0.0]], vec![1.0, 2.0], vec![0.0, 0.0]);
        assert_eq!(r, Err(Error::NotTotallyStable(0)));
    }

    #[test]
    fn non_conservative_flag() {
        let qp =
            QPairSpec::new(&[vec![0.0, 1.0], vec![2.0, 0.0]], vec![1.5, 2.0], vec![0.0, 0.0]).unwrap();
        assert!(!qp.is_conservative());
        assert_eq!(qp.diagonal(0), -1.5);
    }

    #[test]
    fn bd_placement() {
        let qp = bd_to_qpair(&bd_example(), 2).unwrap();
        assert_eq!(qp.rate(0, 1), 2.0);
        assert_eq!(qp.rate(1, 2), 3.0);
        assert_eq!(qp.rate(1, 0), 1.0);
        assert_eq!(qp.rate(2, 1), 4.0);
        assert!(qp.is_conservative());
        assert!(qp.is_tridiagonal());
    }

    #[test]
    fn bd_unit_rates_two_states() {
        let spec = BirthDeathSpec::new(
            RateSeq::constant(1.0),
            RateSeq::constant(1.0),
            RateSeq::constant(0.0),
            1,
        );
        let qp = bd_to_qpair(&spec, 1).unwrap();
        assert_eq!(qp.n_states(), 2);
        assert_eq!(qp.rate(0, 1), 1.0);
        assert_eq!(qp.rate(1, 0), 1.0);
    }

    #[test]
    fn bd_zero_truncation_rejected() {
        assert!(matches!(bd_to_qpair(&bd_example(), 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn absorbing_policy_is_not_conservative() {
        let mut spec = BirthDeathSpec::new(
            RateSeq::constant(1.0),
            RateSeq::constant(1.0),
            RateSeq::constant(0.0),
            3,
        );
        spec.policy = Truncation::Absorbing;
        let qp = bd_to_qpair(&spec, 3).unwrap();
        assert!(!qp.is_conservative());
        assert_eq!(qp.total(3), 2.0);
    }

    #[test]
    fn bd_measures_example() {
        let m = bd_measures(&bd_example(), 2).unwrap();
        assert_eq!(m.mu, vec![1.0, 2.0, 1.5]);
        assert_eq!(m.nu_hat, vec![0.5, 1.0 / 6.0]);
    }

    #[test]
    fn bd_measures_identity_rates() {
        let spec = BirthDeathSpec::new(
            RateSeq::constant(1.0),
            RateSeq::constant(1.0),
            RateSeq::constant(0.0),
            10,
        );
        let m = bd_measures(&spec, 10).unwrap();
        assert!(m.mu.iter().all(|&x| x == 1.0));
        assert_eq!(m.condition_ratio(), 1.0);
    }

    #[test]
    fn bd_measures_overflow_reports_index() {
        let spec = BirthDeathSpec::new(
            RateSeq::Geometric { scale: 1e10, ratio: 1.0 },
            RateSeq::constant(1e-10),
            RateSeq::constant(0.0),
            100,
        );
        assert!(matches!(bd_measures(&spec, 100), Err(Error::Overflow { index }) if index < 100));
    }

    #[test]
    fn reversible_measure_of_birth_death() {
        let qp = bd_to_qpair(&bd_example(), 2).unwrap();
        let mu = qp.reversible_measure().unwrap();
        assert_eq!(mu, vec![1.0, 2.0, 1.5]);
    }

    #[test]
    fn three_cycle_is_not_reversible() {
        let qp = QPairSpec::conservative(
            vec![vec![(1, 1.0), (2, 2.0)], vec![(2, 1.0), (0, 2.0)], vec![(0, 1.0), (1, 2.0)]],
            vec![0.0; 3],
        )
        .unwrap();
        assert!(matches!(qp.reversible_measure(), Err(Error::NotReversible { .. })));
    }

    #[test]
    fn poly_rates_evaluate_in_state_index() {
        let r = RateSeq::Poly(vec![1.0, 2.0, 3.0]);
        assert_eq!(r.at(2), Some(1.0 + 4.0 + 12.0));
    }
}
