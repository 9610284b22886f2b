use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context as _, Result};
use rand::Rng;
use serde_json::json;

use isospec_core::diffops::{
    discrete_isospectrality, discrete_spectrum, discretize, forward_transform, harmonic_residual, inverse_transform as inverse_op,
    riccati_dual, riccati_recovery, verify_lh_eigen, Operator1D, SmoothFunction,
};
use isospec_core::duality::{h_transform, h_transform_local, inverse_transform, measure_dual, push_forward_measure, HARMONIC_TOL};
use isospec_core::eigenbounds::bounds_report;
use isospec_core::fixtures::{random_reversible_chain, rng};
use isospec_core::harmonic::{bd_harmonic_explicit, harmonic_residual as chain_residual, minimal_harmonic, minimal_harmonic_solve, IterOptions};
use isospec_core::io::{parse_chain, parse_h, parse_operator, parse_smooth, Chain, ChainInput};
use isospec_core::spectra::isospectral_check;
use isospec_core::{Error as CoreError, HarmonicVector, QPairSpec};

use crate::output::{num, Report, Table};
use crate::{BoundsArgs, Check, Context, DiffopArgs, Direction, HarmonicArgs, Method, TransformArgs, VerifyArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_chain(path: &Path) -> Result<Chain> {
    parse_chain(&read(path)?).with_context(|| format!("parsing chain {}", path.display()))
}

fn load_operator(path: &Path) -> Result<Operator1D> {
    let input = parse_operator(&read(path)?).with_context(|| format!("parsing operator {}", path.display()))?;
    Ok(input.build()?)
}

fn load_smooth(path: &Path) -> Result<SmoothFunction> {
    let input = parse_smooth(&read(path)?).with_context(|| format!("parsing h {}", path.display()))?;
    Ok(input.build()?)
}

fn load_vector(path: &Path) -> Result<Vec<f64>> {
    let v: Vec<f64> = serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(v)
}

/// `h` with the states where it is asserted harmonic.
struct HChoice {
    values: Vec<f64>,
    harmonic_set: Vec<usize>,
}

fn harmonic_for(chain: &Chain, qp: &QPairSpec, theta: usize) -> Result<HChoice> {
    let h = match chain {
        Chain::Bd(spec) => bd_harmonic_explicit(spec, spec.truncation)?,
        Chain::QPair(_) => minimal_harmonic(qp, theta, &IterOptions::default())?.0,
    };
    Ok(HChoice { values: h.values, harmonic_set: h.harmonic_set })
}

fn choose_h(chain: &Chain, qp: &QPairSpec, path: Option<&Path>, theta: usize) -> Result<HChoice> {
    match path {
        Some(p) => {
            let input = parse_h(&read(p)?).with_context(|| format!("parsing h {}", p.display()))?;
            if input.h.len() != qp.n_states() {
                return Err(CoreError::DimensionMismatch { expected: qp.n_states(), found: input.h.len() }.into());
            }
            let set = input.harmonic_set.unwrap_or_else(|| (0..qp.n_states()).collect());
            Ok(HChoice { values: input.h, harmonic_set: set })
        }
        None => harmonic_for(chain, qp, theta),
    }
}

fn transform_with(qp: &QPairSpec, h: &HChoice, tol: f64) -> Result<QPairSpec> {
    if h.harmonic_set.len() == qp.n_states() {
        Ok(h_transform(qp, &h.values, tol)?)
    } else {
        Ok(h_transform_local(qp, &h.values, &h.harmonic_set, tol)?)
    }
}

fn chain_table(qp: &QPairSpec) -> Table {
    let mut t = Table::new(&["from", "to", "rate"]);
    for i in 0..qp.n_states() {
        for &(j, q) in qp.row(i) {
            t.push(vec![i.to_string(), j.to_string(), num(q)]);
        }
        t.push(vec![i.to_string(), i.to_string(), num(qp.diagonal(i))]);
    }
    t
}

pub fn harmonic(ctx: &Context, args: &HarmonicArgs) -> Result<Report> {
    let chain = load_chain(&args.chain)?;
    let qp = chain.qpair()?;
    let tol = ctx.tol.unwrap_or(HARMONIC_TOL);
    let (h, trace): (HarmonicVector, _) = match args.method {
        Method::Iterate => {
            let (h, trace) = minimal_harmonic(&qp, args.theta, &IterOptions::default())?;
            (h, Some(trace))
        }
        Method::Solve => (minimal_harmonic_solve(&qp, args.theta)?, None),
        Method::Explicit => match &chain {
            Chain::Bd(spec) => (bd_harmonic_explicit(spec, spec.truncation)?, None),
            Chain::QPair(_) => {
                return Err(CoreError::InvalidArgument("the explicit method needs a birth-death chain".into()).into())
            }
        },
    };
    for w in &h.warnings {
        ctx.note(format!("warning: {w}"));
    }
    let pass = h.is_positive() && h.residual <= tol * h.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let all: Vec<usize> = (0..qp.n_states()).collect();
    let residuals = chain_residual(&qp, &h.values, &all);
    let mut table = Table::new(&["state", "h", "omega_h", "in_harmonic_set"]);
    for (i, (v, r)) in h.values.iter().zip(&residuals).enumerate() {
        table.push(vec![i.to_string(), num(*v), num(*r), h.harmonic_set.contains(&i).to_string()]);
    }
    let json = json!({
        "method": format!("{:?}", args.method).to_lowercase(),
        "harmonic": h,
        "positive": h.is_positive(),
        "trace": trace,
        "pass": pass,
    });
    Ok(Report { json, table: Some(table), pass })
}

pub fn transform(ctx: &Context, args: &TransformArgs) -> Result<Report> {
    let chain = load_chain(&args.chain)?;
    let qp = chain.qpair()?;
    let tol = ctx.tol.unwrap_or(HARMONIC_TOL);
    let mu = qp.reversible_measure().ok();
    let (out, mu_out, h_used) = match args.direction {
        Direction::Forward => {
            let h = choose_h(&chain, &qp, args.h.as_deref(), args.theta)?;
            let qt = transform_with(&qp, &h, tol)?;
            let mu_t = mu.as_ref().map(|m| push_forward_measure(m, &h.values));
            (qt, mu_t, Some(h.values))
        }
        Direction::Local => {
            let h = choose_h(&chain, &qp, args.h.as_deref(), args.theta)?;
            let qt = h_transform_local(&qp, &h.values, &h.harmonic_set, tol)?;
            let mu_t = mu.as_ref().map(|m| push_forward_measure(m, &h.values));
            (qt, mu_t, Some(h.values))
        }
        Direction::Inverse => {
            let path = args
                .h
                .as_deref()
                .ok_or_else(|| CoreError::InvalidArgument("the inverse transform needs --h".into()))?;
            let h = choose_h(&chain, &qp, Some(path), args.theta)?;
            let q = inverse_transform(&qp, &h.values)?;
            let mu_back = mu.as_ref().map(|m| m.iter().zip(&h.values).map(|(m, h)| m / (h * h)).collect());
            (q, mu_back, Some(h.values))
        }
        Direction::Measure => {
            let m = match &args.mu {
                Some(p) => load_vector(p)?,
                None => mu.clone().ok_or_else(|| anyhow!("chain is not reversible; pass --mu"))?,
            };
            (measure_dual(&qp, &m)?, Some(m), None)
        }
    };
    let json = json!({
        "direction": format!("{:?}", args.direction).to_lowercase(),
        "chain": ChainInput::from_qpair(&out),
        "mu": mu_out,
        "h": h_used,
    });
    Ok(Report { json, table: Some(chain_table(&out)), pass: true })
}

pub fn verify(ctx: &Context, args: &VerifyArgs) -> Result<Report> {
    if let Some(count) = args.random {
        return verify_random(ctx, count, args.max_states);
    }
    let a_path = args
        .a
        .as_deref()
        .ok_or_else(|| CoreError::InvalidArgument("verify needs a chain file or --random".into()))?;
    let chain = load_chain(a_path)?;
    let qp = chain.qpair()?;
    let mu = qp.reversible_measure()?;
    let (qt, mu_t) = match &args.b {
        Some(b) => {
            let qt = load_chain(b)?.qpair()?;
            let mu_t = qt.reversible_measure()?;
            (qt, mu_t)
        }
        None => {
            let h = choose_h(&chain, &qp, args.h.as_deref(), 0)?;
            let qt = transform_with(&qp, &h, HARMONIC_TOL)?;
            let mu_t = push_forward_measure(&mu, &h.values);
            (qt, mu_t)
        }
    };
    let report = isospectral_check(&qp, &mu, &qt, &mu_t, ctx.tol)?;
    let mut table = Table::new(&["index", "original", "transformed"]);
    let other = report.compared_with.clone().unwrap_or_default();
    for (i, (x, y)) in report.eigenvalues.iter().zip(&other).enumerate() {
        table.push(vec![i.to_string(), num(*x), num(*y)]);
    }
    let pass = report.pass;
    Ok(Report { json: serde_json::to_value(&report)?, table: Some(table), pass })
}

fn verify_random(ctx: &Context, count: usize, max_states: usize) -> Result<Report> {
    if max_states < 2 {
        return Err(CoreError::InvalidArgument("--max-states must be at least 2".into()).into());
    }
    let mut table = Table::new(&["seed", "states", "max_pair_gap", "tolerance", "pass"]);
    let mut results = Vec::new();
    let mut skipped = 0;
    for k in 0..count as u64 {
        let seed = ctx.seed.wrapping_add(k);
        let mut r = rng(seed);
        let n = r.gen_range(2..=max_states);
        let (qp, mu) = random_reversible_chain(&mut r, n, 0.3, 0.5)?;
        let theta = r.gen_range(0..n);
        let Ok((h, _)) = minimal_harmonic(&qp, theta, &IterOptions::default()) else {
            skipped += 1;
            continue;
        };
        let Ok(qt) = h_transform_local(&qp, &h.values, &h.harmonic_set, HARMONIC_TOL) else {
            skipped += 1;
            continue;
        };
        let mu_t = push_forward_measure(&mu, &h.values);
        let rep = isospectral_check(&qp, &mu, &qt, &mu_t, ctx.tol)?;
        table.push(vec![seed.to_string(), n.to_string(), num(rep.max_pair_gap), num(rep.tolerance), rep.pass.to_string()]);
        results.push(json!({
            "seed": seed,
            "states": n,
            "max_pair_gap": rep.max_pair_gap,
            "tolerance": rep.tolerance,
            "pass": rep.pass,
        }));
    }
    if skipped > 0 {
        ctx.note(format!("{skipped} chains skipped: no finite harmonic function"));
    }
    let pass = results.iter().all(|r| r["pass"] == json!(true));
    let json = json!({ "checked": results.len(), "skipped": skipped, "results": results, "pass": pass });
    Ok(Report { json, table: Some(table), pass })
}

pub fn bounds(ctx: &Context, args: &BoundsArgs) -> Result<Report> {
    let Chain::Bd(spec) = load_chain(&args.chain)? else {
        return Err(CoreError::InvalidArgument("bounds needs a birth-death chain".into()).into());
    };
    let report = bounds_report(&spec, args.nmax, args.tail_tol)?;
    for w in &report.warnings {
        ctx.note(format!("warning: {w}"));
    }
    let mut table = Table::new(&["n", "product", "running_sup"]);
    for (n, (p, s)) in report.profile.iter().zip(&report.running_sup).enumerate() {
        table.push(vec![n.to_string(), num(*p), num(*s)]);
    }
    let pass = report.containment;
    Ok(Report { json: serde_json::to_value(&report)?, table: Some(table), pass })
}

fn require_h(args: &DiffopArgs) -> Result<SmoothFunction> {
    match &args.h {
        Some(p) => load_smooth(p),
        None => Err(CoreError::InvalidArgument(format!("--check {:?} needs --h", args.check).to_lowercase()).into()),
    }
}

fn coefficient_table(op: &Operator1D) -> Table {
    let mut t = Table::new(&["x", "a", "b", "c"]);
    for (x, [a, b, c]) in op.grid.iter().zip(op.sample()) {
        t.push(vec![num(*x), num(a), num(b), num(c)]);
    }
    t
}

fn coefficient_json(op: &Operator1D) -> serde_json::Value {
    let s = op.sample();
    json!({
        "x": op.grid,
        "a": s.iter().map(|v| v[0]).collect::<Vec<_>>(),
        "b": s.iter().map(|v| v[1]).collect::<Vec<_>>(),
        "c": s.iter().map(|v| v[2]).collect::<Vec<_>>(),
    })
}

pub fn diffop(ctx: &Context, args: &DiffopArgs) -> Result<Report> {
    let op = load_operator(&args.op)?;
    let tol = ctx.tol.unwrap_or(HARMONIC_TOL);
    match args.check {
        Check::Eigen => {
            let h = match &args.h {
                Some(p) => load_smooth(p)?,
                None => SmoothFunction::constant(1.0),
            };
            let rows = verify_lh_eigen(&h, args.nmax, &op.grid)?;
            let mut table = Table::new(&["n", "residual", "sup_g", "pass"]);
            for r in &rows {
                table.push(vec![r.n.to_string(), num(r.residual), num(r.sup_g), r.pass.to_string()]);
            }
            let pass = rows.iter().all(|r| r.pass);
            Ok(Report { json: json!({ "residuals": rows, "pass": pass }), table: Some(table), pass })
        }
        Check::Transform => {
            let h = require_h(args)?;
            let (x, residual) = harmonic_residual(&op, &h);
            let out = forward_transform(&op, &h, tol)?;
            let json = json!({ "harmonic_residual": residual, "worst_x": x, "transformed": coefficient_json(&out) });
            Ok(Report { json, table: Some(coefficient_table(&out)), pass: true })
        }
        Check::Inverse => {
            let h = require_h(args)?;
            let out = inverse_op(&op, &h)?;
            Ok(Report { json: json!({ "operator": coefficient_json(&out) }), table: Some(coefficient_table(&out)), pass: true })
        }
        Check::Spectrum => {
            let d = discretize(&op)?;
            for w in &d.warnings {
                ctx.note(format!("warning: {w}"));
            }
            match &args.h {
                None => {
                    let ev = discrete_spectrum(&op)?;
                    let top: Vec<f64> = ev.iter().rev().take(args.k).copied().collect();
                    let mut table = Table::new(&["index", "eigenvalue"]);
                    for (i, v) in top.iter().enumerate() {
                        table.push(vec![i.to_string(), num(*v)]);
                    }
                    let json = json!({ "top": top, "count": ev.len(), "warnings": d.warnings });
                    Ok(Report { json, table: Some(table), pass: true })
                }
                Some(p) => {
                    let h = load_smooth(p)?;
                    let iso = discrete_isospectrality(&op, &h, args.k, tol)?;
                    let scale = iso.original.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
                    let sim_tol = 1e-9 * scale;
                    let pass = iso.similarity_gap <= sim_tol;
                    let mut table = Table::new(&["index", "original", "transformed"]);
                    for (i, (x, y)) in iso.original.iter().zip(&iso.transformed).enumerate() {
                        table.push(vec![i.to_string(), num(*x), num(*y)]);
                    }
                    let mut json = serde_json::to_value(&iso)?;
                    json["similarity_tolerance"] = json!(sim_tol);
                    json["pass"] = json!(pass);
                    json["warnings"] = json!(d.warnings);
                    Ok(Report { json, table: Some(table), pass })
                }
            }
        }
        Check::Riccati => {
            let start = op
                .grid
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - args.x0).abs().total_cmp(&(b.1 - args.x0).abs()))
                .map(|(i, _)| i)
                .unwrap_or(0);
            let sol = riccati_dual(&op, args.phi0, start)?;
            let rec = riccati_recovery(&op, &sol)?;
            let scale = op.sample().iter().flat_map(|v| [v[1].abs(), v[2].abs()]).fold(1.0_f64, f64::max);
            let pass = rec.b_error.max(rec.c_error) <= ctx.tol.unwrap_or(1e-6) * scale;
            let mut table = Table::new(&["x", "phi", "psi", "b_tilde"]);
            for i in 0..sol.grid.len() {
                table.push(vec![num(sol.grid[i]), num(sol.phi[i]), num(sol.psi[i]), num(sol.b_tilde[i])]);
            }
            let json = json!({
                "start": sol.grid[start],
                "solution": sol,
                "b_error": rec.b_error,
                "c_error": rec.c_error,
                "pass": pass,
            });
            Ok(Report { json, table: Some(table), pass })
        }
    }
}
