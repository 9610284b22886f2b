//! Browser bindings for three interactive views: principal-eigenvalue bounds
//! for constant-rate birth–death chains, spectra of a random reversible chain
//! before and after its h-transform, and the oscillator/Ornstein–Uhlenbeck pair.
//!
//! Every export returns a JSON string; the `*_json` functions are the
//! platform-independent cores and are what the native tests exercise.

use isospec_core::diffops::{discrete_isospectrality, gaussian, harmonic_oscillator, uniform_grid, Boundary};
use isospec_core::duality::{h_transform_local, push_forward_measure, HARMONIC_TOL};
use isospec_core::eigenbounds::bounds_report;
use isospec_core::fixtures::{random_reversible_chain, rng};
use isospec_core::harmonic::{minimal_harmonic, IterOptions};
use isospec_core::spectra::isospectral_check;
use isospec_core::{BirthDeathSpec, RateSeq};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 400;

fn thin(values: &[f64]) -> Vec<(usize, f64)> {
    let step = values.len().div_ceil(MAX_POINTS).max(1);
    values.iter().copied().enumerate().step_by(step).collect()
}

fn to_json(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct BoundsView {
    lower: f64,
    upper: f64,
    lambda0: f64,
    delta_tilde: Option<f64>,
    verdict: String,
    containment: bool,
    profile: Vec<(usize, f64)>,
    running_sup: Vec<(usize, f64)>,
}

/// Bounds for birth rate `b`, death rate `a` and killing rate `kill ≥ 0`.
pub fn bounds_json(b: f64, a: f64, kill: f64, n_max: usize) -> Result<String, String> {
    if !(b > 0.0 && a > 0.0 && kill >= 0.0) {
        return Err("need b > 0, a > 0 and killing ≥ 0".into());
    }
    let spec = BirthDeathSpec::new(RateSeq::constant(b), RateSeq::constant(a), RateSeq::constant(-kill), n_max);
    let r = bounds_report(&spec, n_max.max(8), 1e-10).map_err(|e| e.to_string())?;
    to_json(&BoundsView {
        lower: r.lower,
        upper: r.upper,
        lambda0: r.lambda0_numeric,
        delta_tilde: r.delta_tilde.is_finite().then_some(r.delta_tilde),
        verdict: r.verdict,
        containment: r.containment,
        profile: thin(&r.profile),
        running_sup: thin(&r.running_sup),
    })
}

#[derive(Serialize)]
struct SpectraView {
    states: usize,
    theta: usize,
    h: Vec<f64>,
    original: Vec<f64>,
    transformed: Vec<f64>,
    max_pair_gap: f64,
    pass: bool,
}

/// A seeded random reversible chain on `n` states and its h-transform with
/// `h` the minimal harmonic function for reference state `theta`.
pub fn spectra_json(seed: u32, n: usize, theta: usize) -> Result<String, String> {
    if !(2..=60).contains(&n) || theta >= n {
        return Err("need 2 ≤ n ≤ 60 and theta < n".into());
    }
    let mut r = rng(u64::from(seed));
    let (qp, mu) = random_reversible_chain(&mut r, n, 0.3, 0.5).map_err(|e| e.to_string())?;
    let (h, _) = minimal_harmonic(&qp, theta, &IterOptions::default()).map_err(|e| e.to_string())?;
    let qt = h_transform_local(&qp, &h.values, &h.harmonic_set, HARMONIC_TOL).map_err(|e| e.to_string())?;
    let mu_t = push_forward_measure(&mu, &h.values);
    let rep = isospectral_check(&qp, &mu, &qt, &mu_t, None).map_err(|e| e.to_string())?;
    to_json(&SpectraView {
        states: n,
        theta,
        h: h.values,
        original: rep.eigenvalues,
        transformed: rep.compared_with.unwrap_or_default(),
        max_pair_gap: rep.max_pair_gap,
        pass: rep.pass,
    })
}

#[derive(Serialize)]
struct OscillatorView {
    cells: usize,
    original: Vec<f64>,
    transformed: Vec<f64>,
    similarity_gap: f64,
    transformed_gap: f64,
}

/// Top `k` eigenvalues of the discretized oscillator on `[−half_width, half_width]`
/// and of its transform by the Gaussian, an Ornstein–Uhlenbeck operator.
pub fn oscillator_json(cells: usize, half_width: f64, k: usize) -> Result<String, String> {
    if !(10..=2000).contains(&cells) || !(half_width > 0.5 && half_width <= 12.0) {
        return Err("need 10 ≤ cells ≤ 2000 and 0.5 < half width ≤ 12".into());
    }
    let op = harmonic_oscillator(uniform_grid(-half_width, half_width, cells), [Boundary::Neumann; 2]).map_err(|e| e.to_string())?;
    let iso = discrete_isospectrality(&op, &gaussian(), k.clamp(1, 20), 1e-8).map_err(|e| e.to_string())?;
    to_json(&OscillatorView {
        cells,
        original: iso.original,
        transformed: iso.transformed,
        similarity_gap: iso.similarity_gap,
        transformed_gap: iso.transformed_gap,
    })
}

#[wasm_bindgen]
pub fn bounds(b: f64, a: f64, kill: f64, n_max: usize) -> Result<String, JsError> {
    bounds_json(b, a, kill, n_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn spectra(seed: u32, n: usize, theta: usize) -> Result<String, JsError> {
    spectra_json(seed, n, theta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn oscillator(cells: usize, half_width: f64, k: usize) -> Result<String, JsError> {
    oscillator_json(cells, half_width, k).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn bounds_view_brackets_lambda0() {
        let v = parse(&bounds_json(1.0, 1.0, 1.0, 512).unwrap());
        let (lo, hi, l) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap(), v["lambda0"].as_f64().unwrap());
        assert!(lo <= l && l <= hi);
        assert!(v["profile"].as_array().unwrap().len() <= MAX_POINTS);
    }

    #[test]
    fn bounds_view_without_killing_reports_zero() {
        let v = parse(&bounds_json(1.0, 1.0, 0.0, 512).unwrap());
        assert!(v["delta_tilde"].is_null());
        assert_eq!(v["verdict"], "λ₀ = 0");
    }

    #[test]
    fn bounds_view_rejects_bad_rates() {
        assert!(bounds_json(-1.0, 1.0, 0.0, 64).is_err());
    }

    #[test]
    fn spectra_view_is_isospectral() {
        let v = parse(&spectra_json(7, 12, 3).unwrap());
        assert_eq!(v["pass"], true);
        assert_eq!(v["original"].as_array().unwrap().len(), 12);
        assert!(spectra_json(7, 12, 12).is_err());
    }

    #[test]
    fn oscillator_view_matches_ou_levels() {
        let v = parse(&oscillator_json(300, 6.0, 4).unwrap());
        let t: Vec<f64> = serde_json::from_value(v["transformed"].clone()).unwrap();
        for (i, x) in t.iter().enumerate() {
            assert!((x + i as f64).abs() < 1e-3, "level {i}: {x}");
        }
    }

    #[test]
    fn thinning_keeps_the_first_point() {
        let xs: Vec<f64> = (0..1000).map(f64::from).collect();
        let t = thin(&xs);
        assert_eq!(t[0], (0, 0.0));
        assert!(t.len() <= MAX_POINTS);
    }
}
