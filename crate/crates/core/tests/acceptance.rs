//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use isospec_core::chain::{BirthDeathSpec, QPairSpec, RateSeq};
use isospec_core::diffops::{
    coef, coefficient_gap, discrete_isospectrality, discrete_spectrum, forward_transform, gaussian,
    harmonic_oscillator, hermite_identity_holds, hermite_polys, inverse_transform, linear_harmonic_fixture,
    ornstein_uhlenbeck, ou_multiplicity, quadratic_harmonic_fixture, riccati_dual, riccati_recovery, uniform_grid,
    verify_lh_eigen, Boundary, GaussTag, Operator1D, PolyGauss, SmoothFunction,
};
use isospec_core::duality::{h_transform, h_transform_local, inverse_transform as inverse_q, push_forward_measure};
use isospec_core::eigenbounds::{delta_tilde, lambda0_variational, TailStatus};
use isospec_core::fixtures::{random_reversible_chain, random_vector, rng};
use isospec_core::harmonic::{bd_harmonic_scaled, minimal_harmonic, IterOptions};
use isospec_core::spectra::{isospectral_check, quadratic_form};
use num::{BigRational, One};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel_matrix_gap(p: &QPairSpec, q: &QPairSpec) -> f64 {
    let (a, b) = (p.generator_matrix(), q.generator_matrix());
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// `(q, μ, q̃, μ̃, h)`.
type TransformedChain = (QPairSpec, Vec<f64>, QPairSpec, Vec<f64>, Vec<f64>);

/// Random chain, minimal harmonic `h` with reference state `θ`, and the
/// transform that keeps the residual potential at `θ`.
fn chain_with_transform(seed: u64, max_n: usize) -> Option<TransformedChain> {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_n);
    let (qp, mu) = random_reversible_chain(&mut r, n, 0.25, 0.5).ok()?;
    let theta = r.gen_range(0..n);
    let (h, _) = minimal_harmonic(&qp, theta, &IterOptions::default()).ok()?;
    let qt = h_transform_local(&qp, &h.values, &h.harmonic_set, 1e-8).ok()?;
    let mu_t = push_forward_measure(&mu, &h.values);
    Some((qp, mu, qt, mu_t, h.values))
}

fn criterion_1() -> Outcome {
    let (mut worst, mut checked, mut skipped, mut failed) = (0.0_f64, 0, 0, 0);
    for seed in 0..50 {
        let Some((qp, mu, qt, mu_t, _)) = chain_with_transform(1000 + seed, 30) else {
            skipped += 1;
            continue;
        };
        let report = isospectral_check(&qp, &mu, &qt, &mu_t, Some(f64::INFINITY)).unwrap();
        let radius = report.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let ratio = report.max_pair_gap / (1e-9 * (1.0 + radius));
        worst = worst.max(ratio);
        checked += 1;
        if ratio > 1.0 {
            failed += 1;
        }
    }
    check(
        failed == 0 && checked >= 45,
        format!("{checked} chains, {skipped} without finite h, worst gap/(1e-9(1+ρ)) = {worst:.2e}"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0_f64;
    let mut count = 0;
    let mut seed = 5000;
    while count < 1000 {
        seed += 1;
        let Some((qp, mu, qt, mu_t, h)) = chain_with_transform(seed, 15) else { continue };
        let mut r = rng(seed ^ 0x5eed);
        let f = random_vector(&mut r, qp.n_states(), -1.0, 1.0);
        let ft: Vec<f64> = f.iter().zip(&h).map(|(f, h)| f / h).collect();
        let lhs = quadratic_form(&qp, &mu, &f).unwrap();
        let rhs = quadratic_form(&qt, &mu_t, &ft).unwrap();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE));
        count += 1;
    }
    check(worst <= 1e-10, format!("{count} pairs, worst relative discrepancy {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut worst_fi = 0.0_f64;
    let mut worst_if = 0.0_f64;
    for seed in 0..50 {
        let mut r = rng(9000 + seed);
        let n = r.gen_range(2..=20);
        let (qt, _) = random_reversible_chain(&mut r, n, 0.3, 0.0).unwrap();
        let h = random_vector(&mut r, n, 0.1, 10.0);
        // forward ∘ inverse on a potential-free pair
        let q = inverse_q(&qt, &h).unwrap();
        let back = h_transform(&q, &h, 1e-8).unwrap();
        worst_fi = worst_fi.max(rel_matrix_gap(&qt, &back));
        // inverse ∘ forward on the pair with potential
        let again = inverse_q(&back, &h).unwrap();
        worst_if = worst_if.max(rel_matrix_gap(&q, &again));
    }
    let mut worst_diff = 0.0_f64;
    for seed in 0..20 {
        let mut r = rng(9500 + seed);
        let (a0, a1, b0, b1, p1, p2): (f64, f64, f64, f64, f64, f64) = (
            r.gen_range(0.5..2.0),
            r.gen_range(-0.4..0.4),
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
            r.gen_range(-0.5..0.5),
        );
        let opt = Operator1D::without_potential(
            coef(move |x| a0 + a1 * x.sin()),
            coef(move |x| b0 + b1 * x),
            uniform_grid(-2.0, 2.0, 400),
            [Boundary::Neumann; 2],
        )
        .unwrap();
        let h = SmoothFunction::exp_of(move |x| (p1 * x + p2 * x * x, p1 + 2.0 * p2 * x, 2.0 * p2));
        let op = inverse_transform(&opt, &h).unwrap();
        let fwd = forward_transform(&op, &h, 1e-10).unwrap();
        let inv = inverse_transform(&fwd, &h).unwrap();
        worst_diff = worst_diff.max(coefficient_gap(&opt, &fwd)).max(coefficient_gap(&op, &inv));
    }
    check(
        worst_fi <= 1e-12 && worst_if <= 1e-12 && worst_diff <= 1e-12,
        format!(
            "chains: forward∘inverse {worst_fi:.2e}, inverse∘forward {worst_if:.2e}; operators: {worst_diff:.2e}"
        ),
    )
}

fn step_family(seed: u64, k: usize, range: (f64, f64), kill: f64, tail: (f64, f64, f64)) -> BirthDeathSpec {
    let mut r = rng(seed);
    let b = random_vector(&mut r, k, range.0, range.1);
    let a = random_vector(&mut r, k, range.0, range.1);
    let c: Vec<f64> = random_vector(&mut r, k, 0.0, kill).into_iter().map(|v| -v).collect();
    BirthDeathSpec::new(
        RateSeq::Func(Arc::new(move |i| if i < k { b[i] } else { tail.0 })),
        RateSeq::Func(Arc::new(move |i| if i < k { a[i] } else { tail.1 })),
        RateSeq::Func(Arc::new(move |i| if i < k { c[i] } else { tail.2 })),
        0,
    )
}

fn criterion_4() -> Outcome {
    let families: Vec<(&str, BirthDeathSpec)> = vec![
        ("constant", BirthDeathSpec::new(RateSeq::constant(1.0), RateSeq::constant(1.0), RateSeq::constant(-1.0), 0)),
        (
            "linear",
            BirthDeathSpec::new(
                RateSeq::Poly(vec![1.0, 1.0]),
                RateSeq::Poly(vec![0.0, 2.0]),
                RateSeq::Func(Arc::new(|i| -1.0 / (i as f64 + 1.0))),
                0,
            ),
        ),
        (
            "geometric",
            BirthDeathSpec::new(
                RateSeq::Geometric { scale: 2.0, ratio: 1.002 },
                RateSeq::Geometric { scale: 1.0, ratio: 1.002 },
                RateSeq::constant(0.0),
                0,
            ),
        ),
        ("random-a", step_family(41, 40, (0.5, 2.0), 0.5, (1.0, 1.0, -1.0))),
        ("random-b", step_family(42, 40, (0.5, 2.0), 0.3, (0.5, 2.0, -0.5))),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, spec) in &families {
        let l2 = lambda0_variational(spec, 2000).unwrap();
        let l4 = lambda0_variational(spec, 4000).unwrap();
        let agree = (l2 - l4).abs() / l4;
        let h = bd_harmonic_scaled(spec, 2002).unwrap();
        let ok = match delta_tilde(spec, &h, 2000, 1e-10) {
            Ok(d) if d.status == TailStatus::Converged => {
                let (lo, hi) = (0.25 / d.value, 1.0 / d.value);
                let inside = l2 >= lo - 1e-6 && l2 <= hi + 1e-6;
                parts.push(format!("{name}: λ₀={l2:.6} ∈ [{lo:.4}, {hi:.4}] rel.diff {agree:.1e}"));
                inside && agree <= 1e-6
            }
            other => {
                parts.push(format!("{name}: δ̃ not certified ({other:?})"));
                false
            }
        };
        pass &= ok;
    }
    check(pass, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let spec = BirthDeathSpec::new(RateSeq::constant(1.0), RateSeq::constant(1.0), RateSeq::constant(0.0), 0);
    let n = 10_000;
    let h = bd_harmonic_scaled(&spec, n + 2).unwrap();
    let dt = delta_tilde(&spec, &h, n, 1e-10);
    let diverges = matches!(&dt, Ok(d) if d.status == TailStatus::Divergent && d.value.is_infinite());
    let l = lambda0_variational(&spec, n).unwrap();
    let sups = match dt {
        Ok(d) => d.partial_suprema.iter().map(|(lvl, v)| format!("{v:.4e} at {lvl}")).collect::<Vec<_>>().join(", "),
        Err(e) => e.to_string(),
    };
    check(diverges && l <= 1e-3, format!("δ̃ = ∞: {diverges} (partial suprema {sups}), λ₀(10⁴) = {l:.3e}"))
}

fn criterion_6() -> Outcome {
    let polys = hermite_polys(20).unwrap();
    let mut exact = polys.iter().enumerate().all(|(n, p)| hermite_identity_holds(p, n));
    // derivative definition: (−1)^n e^{x²} dⁿ/dxⁿ e^{−x²}
    let mut g = PolyGauss::from_integers(&[1], GaussTag::One);
    for (n, p) in polys.iter().enumerate() {
        let sign = if n % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        exact &= g.scale(&sign).coeffs == p.coeffs;
        g = g.derivative();
    }
    let grid = uniform_grid(-5.0, 5.0, 2000);
    let hs = [
        ("1", SmoothFunction::constant(1.0)),
        ("e^{-x²/2}", gaussian()),
        ("e^ψ, ψ′ = sin x − x", SmoothFunction::exp_of(|x| (-x.cos() - 0.5 * x * x, x.sin() - x, x.cos() - 1.0))),
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for (name, h) in &hs {
        let rows = verify_lh_eigen(h, 10, &grid).unwrap();
        let scaled = rows.iter().map(|r| r.residual / (1.0 + r.sup_g)).fold(0.0, f64::max);
        let abs = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        all &= rows.iter().all(|r| r.pass);
        parts.push(format!("h={name}: max r/(1+sup g) {scaled:.1e} (abs {abs:.1e})"));
    }
    check(exact && all, format!("exact identity n≤20: {exact}; {}", parts.join("; ")))
}

fn criterion_7() -> Outcome {
    let op = harmonic_oscillator(uniform_grid(-3.0, 3.0, 6000), [Boundary::Neumann; 2]).unwrap();
    let sol = riccati_dual(&op, 0.0, 3000).unwrap();
    let drift_err = sol.grid.iter().zip(&sol.b_tilde).map(|(x, b)| (b + x).abs()).fold(0.0, f64::max);
    let generic = Operator1D::new(
        coef(|x| 1.0 + 0.3 * x.sin()),
        coef(|x| 0.5 * x - 0.2),
        coef(|x| -0.5 - 0.1 * x.cos()),
        uniform_grid(-1.0, 1.0, 2000),
        [Boundary::Neumann; 2],
    )
    .unwrap();
    let gsol = riccati_dual(&generic, 0.2, 1000).unwrap();
    let rec = riccati_recovery(&generic, &gsol).unwrap();
    check(
        drift_err <= 1e-8 && rec.c_error <= 1e-6 && rec.b_error <= 1e-6,
        format!("sup|b̃+x| = {drift_err:.2e}; generic round trip c {:.2e}, b {:.2e}", rec.c_error, rec.b_error),
    )
}

fn criterion_8() -> Outcome {
    let ou = ornstein_uhlenbeck(uniform_grid(-6.0, 6.0, 2000), [Boundary::Neumann; 2]).unwrap();
    let ev = discrete_spectrum(&ou).unwrap();
    let top_err = (0..5).map(|k| (ev[ev.len() - 1 - k] + k as f64).abs()).fold(0.0, f64::max);
    let gaps: Vec<(f64, f64)> = [1000, 2000]
        .iter()
        .map(|&m| {
            let op = harmonic_oscillator(uniform_grid(-6.0, 6.0, m), [Boundary::Neumann; 2]).unwrap();
            let r = discrete_isospectrality(&op, &gaussian(), 5, 1e-12).unwrap();
            (r.transformed_gap, r.similarity_gap)
        })
        .collect();
    let ratio = gaps[0].0 / gaps[1].0;
    check(
        top_err <= 1e-3 && (3.5..=4.5).contains(&ratio),
        format!(
            "O-U top five error {top_err:.2e}; oscillator vs O-U gap {:.2e} → {:.2e}, ratio {ratio:.3}; exact similarity gap {:.1e}",
            gaps[0].0, gaps[1].0, gaps[1].1
        ),
    )
}

fn brute_force(n: u64, d: u64) -> u64 {
    if d == 1 {
        return 1;
    }
    (0..=n).map(|k| brute_force(n - k, d - 1)).sum()
}

fn criterion_9() -> Outcome {
    let mut r = rng(33);
    let grid = uniform_grid(0.05, 4.0, 500);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let (g0, g1, v0, v1): (f64, f64, f64, f64) =
            (r.gen_range(0.1..3.0), r.gen_range(-0.1..0.1), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let gamma = coef(move |x| g0 + g1 * (3.0 * x).sin());
        let v = coef(move |x| v0 + v1 * x * x);
        let lin = linear_harmonic_fixture(gamma.clone(), v, grid.clone()).unwrap();
        let quad = quadratic_harmonic_fixture(gamma, grid.clone()).unwrap();
        for &x in &grid {
            worst = worst.max(lin.apply(x, (x, 1.0, 0.0)).abs());
            worst = worst.max(quad.apply(x, (x * x, 2.0 * x, 2.0)).abs());
        }
    }
    let mut counts_ok = true;
    for n in 0..=10 {
        for d in 1..=4 {
            counts_ok &= ou_multiplicity(n, d).unwrap() == brute_force(n, d);
        }
    }
    check(
        worst <= 1e-13 && counts_ok,
        format!("max residual {worst:.1e}; multiplicities n≤10, d≤4 match enumeration: {counts_ok}"),
    )
}

type Criterion = (u32, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Duration::from_secs(10)),
        (2, criterion_2, Duration::from_secs(5)),
        (3, criterion_3, Duration::from_secs(60)),
        (4, criterion_4, Duration::from_secs(30)),
        (5, criterion_5, Duration::from_secs(10)),
        (6, criterion_6, Duration::from_secs(60)),
        (7, criterion_7, Duration::from_secs(60)),
        (8, criterion_8, Duration::from_secs(20)),
        (9, criterion_9, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (id, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= budget;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {id} [PRIMARY] {} ({:.2}s, limit {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            out.detail
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
