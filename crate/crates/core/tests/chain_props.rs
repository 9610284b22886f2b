use isospec_core::chain::{bd_measures, bd_to_qpair, check_reversible, validate_qpair, BirthDeathSpec, RateSeq};
use isospec_core::duality::measure_dual;
use proptest::prelude::*;

fn bd_strategy() -> impl Strategy<Value = BirthDeathSpec> {
    (1usize..25).prop_flat_map(|n| {
        (
            prop::collection::vec(0.05f64..10.0, n + 1),
            prop::collection::vec(0.05f64..10.0, n),
            prop::collection::vec(-2.0f64..=0.0, n + 1),
        )
            .prop_map(move |(b, a, c)| {
                BirthDeathSpec::new(RateSeq::Values(b), RateSeq::Values(a), RateSeq::Values(c), n)
            })
    })
}

proptest! {
    #[test]
    fn bd_qpair_is_valid_and_conservative(spec in bd_strategy()) {
        let n = spec.truncation;
        let qp = bd_to_qpair(&spec, n).unwrap();
        prop_assert_eq!(qp.n_states(), n + 1);
        prop_assert!(qp.is_conservative());
        prop_assert!(qp.is_tridiagonal());
        for i in 0..=n {
            prop_assert!(qp.diagonal(i) <= 0.0);
        }
    }

    #[test]
    fn product_measure_satisfies_detailed_balance(spec in bd_strategy()) {
        let n = spec.truncation;
        let qp = bd_to_qpair(&spec, n).unwrap();
        let m = bd_measures(&spec, n).unwrap();
        for i in 0..n {
            let lhs = m.mu[i] * qp.rate(i, i + 1);
            let rhs = m.mu[i + 1] * qp.rate(i + 1, i);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs));
        }
        check_reversible(&qp, &m.mu).unwrap();
        for i in 0..=n {
            prop_assert!((m.nu_hat[i] * m.mu[i] * spec.b(i).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reversible_measure_matches_product_formula(spec in bd_strategy()) {
        let n = spec.truncation;
        let qp = bd_to_qpair(&spec, n).unwrap();
        let found = qp.reversible_measure().unwrap();
        let m = bd_measures(&spec, n).unwrap();
        for (f, m) in found.iter().zip(&m.mu) {
            prop_assert!((f - m).abs() <= 1e-11 * m);
        }
    }

    #[test]
    fn dense_validation_round_trips(
        rates in prop::collection::vec(prop::collection::vec(0.0f64..5.0, 6), 6),
        killing in prop::collection::vec(-1.0f64..=0.0, 6),
    ) {
        let total: Vec<f64> = rates.iter().enumerate()
            .map(|(i, r)| r.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q).sum())
            .collect();
        let qp = validate_qpair(&rates, total.clone(), killing.clone()).unwrap();
        let again = validate_qpair(&qp.dense_rates(), total, killing).unwrap();
        prop_assert_eq!(qp, again);
    }

    #[test]
    fn measure_dual_is_an_involution(
        rates in prop::collection::vec(prop::collection::vec(0.0f64..5.0, 5), 5),
        mu in prop::collection::vec(0.1f64..10.0, 5),
    ) {
        let total: Vec<f64> = rates.iter().enumerate()
            .map(|(i, r)| r.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q).sum())
            .collect();
        let qp = validate_qpair(&rates, total, vec![0.0; 5]).unwrap();
        let back = measure_dual(&measure_dual(&qp, &mu).unwrap(), &mu).unwrap();
        for i in 0..5 {
            prop_assert!((back.diagonal(i) - qp.diagonal(i)).abs() < 1e-12 * (1.0 + qp.diagonal(i).abs()));
            for j in 0..5 {
                prop_assert!((back.rate(i, j) - qp.rate(i, j)).abs() < 1e-12 * (1.0 + qp.rate(i, j)));
            }
        }
    }
}

#[test]
fn measure_dual_preserves_generator_adjoint() {
    // (Ω̄)_{ij} μ_i = Ω_{ji} μ_j including the diagonal
    let rates = vec![vec![0.0, 1.0, 2.0], vec![0.5, 0.0, 0.0], vec![3.0, 1.0, 0.0]];
    let qp = validate_qpair(&rates, vec![3.0, 0.5, 4.0], vec![-0.2, 0.0, -1.0]).unwrap();
    let mu = [1.0, 2.0, 0.5];
    let bar = measure_dual(&qp, &mu).unwrap();
    let (a, b) = (qp.generator_matrix(), bar.generator_matrix());
    for i in 0..3 {
        for j in 0..3 {
            assert!((b[i][j] * mu[i] - a[j][i] * mu[j]).abs() < 1e-14);
        }
    }
}
