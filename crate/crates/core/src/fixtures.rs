//! Seeded random chains for property checks and demos.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{BirthDeathSpec, QPairSpec, RateSeq};
use crate::error::Result;

/// The generator every randomized routine uses.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A connected reversible chain on `n` states with its symmetrizing measure.
///
/// Symmetric conductances `w_ij` live on a random spanning tree plus extra
/// edges with probability `density`; rates are `q_ij = w_ij/μ_i`. Each state
/// is killed with probability `kill_prob` at a rate in `(0, 1]`.
pub fn random_reversible_chain<R: Rng>(rng: &mut R, n: usize, density: f64, kill_prob: f64) -> Result<(QPairSpec, Vec<f64>)> {
    let mu: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
    let mut w = vec![vec![0.0; n]; n];
    for j in 1..n {
        let i = rng.gen_range(0..j);
        let v = rng.gen_range(0.1..3.0);
        w[i][j] = v;
        w[j][i] = v;
    }
    for i in 0..n {
        for j in i + 1..n {
            if w[i][j] == 0.0 && rng.gen_bool(density) {
                let v = rng.gen_range(0.1..3.0);
                w[i][j] = v;
                w[j][i] = v;
            }
        }
    }
    let rows = (0..n)
        .map(|i| (0..n).filter(|&j| w[i][j] > 0.0).map(|j| (j, w[i][j] / mu[i])).collect())
        .collect();
    let killing = (0..n)
        .map(|_| if rng.gen_bool(kill_prob) { -rng.gen_range(0.01..1.0) } else { 0.0 })
        .collect();
    Ok((QPairSpec::conservative(rows, killing)?, mu))
}

/// Birth–death rates on `{0..=n}` with `b, a ∈ [lo, hi]` and `c ∈ [−kill, 0]`.
pub fn random_bd_spec<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64, kill: f64) -> BirthDeathSpec {
    let birth = (0..=n).map(|_| rng.gen_range(lo..=hi)).collect();
    let death = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    let killing = (0..=n).map(|_| if kill > 0.0 { -rng.gen_range(0.0..=kill) } else { 0.0 }).collect();
    BirthDeathSpec::new(RateSeq::Values(birth), RateSeq::Values(death), RateSeq::Values(killing), n)
}

/// Entries uniform in `[lo, hi]`.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::check_reversible;

    #[test]
    fn chains_are_reversible_and_connected() {
        let mut r = rng(7);
        for n in [1, 2, 5, 30] {
            let (qp, mu) = random_reversible_chain(&mut r, n, 0.2, 0.5).unwrap();
            check_reversible(&qp, &mu).unwrap();
            assert!(qp.can_reach(0).iter().all(|&b| b));
            assert!(qp.killing().iter().all(|&c| c <= 0.0));
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_reversible_chain(&mut rng(3), 8, 0.3, 0.5).unwrap();
        let b = random_reversible_chain(&mut rng(3), 8, 0.3, 0.5).unwrap();
        assert_eq!(a, b);
    }
}
