//! One-dimensional operators `L = a ∂² + b ∂ + c` and their h-transforms.

mod discretize;
mod hermite;
mod riccati;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use discretize::{
    discrete_isospectrality, discrete_spectrum, discretize, Discretization, DiscreteIsospectrality,
};
pub use hermite::{
    hermite_identity_holds, hermite_polys, ou_multiplicity, verify_lh_eigen, EigenResidual, GaussTag,
    PolyGauss, HERMITE_MAX,
};
pub use riccati::{riccati_dual, riccati_recovery, RiccatiRecovery, RiccatiSolution, RICCATI_GUARD};

/// A coefficient function of `x`.
pub type Coef = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn coef(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Coef {
    Arc::new(f)
}

pub fn constant(v: f64) -> Coef {
    Arc::new(move |_| v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    #[default]
    Neumann,
}

/// `L = a(x) ∂² + b(x) ∂ + c(x)` on a grid.
#[derive(Clone)]
pub struct Operator1D {
    pub a: Coef,
    pub b: Coef,
    pub c: Coef,
    pub grid: Vec<f64>,
    pub bc: [Boundary; 2],
}

impl fmt::Debug for Operator1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator1D")
            .field("grid_len", &self.grid.len())
            .field("interval", &(self.grid.first(), self.grid.last()))
            .field("bc", &self.bc)
            .finish_non_exhaustive()
    }
}

impl Operator1D {
    /// Checks the grid is strictly increasing and `a > 0` on it.
    pub fn new(a: Coef, b: Coef, c: Coef, grid: Vec<f64>, bc: [Boundary; 2]) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidArgument("grid needs at least two points".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
        }
        if let Some(&x) = grid.iter().find(|&&x| !(a(x) > 0.0)) {
            return Err(Error::PreconditionViolated(format!("a({x}) is not positive")));
        }
        Ok(Self { a, b, c, grid, bc })
    }

    pub fn without_potential(a: Coef, b: Coef, grid: Vec<f64>, bc: [Boundary; 2]) -> Result<Self> {
        Self::new(a, b, constant(0.0), grid, bc)
    }

    /// `(Lf)(x)` from `f, f′, f″` at `x`.
    pub fn apply(&self, x: f64, (f, df, d2f): (f64, f64, f64)) -> f64 {
        (self.a)(x) * d2f + (self.b)(x) * df + (self.c)(x) * f
    }

    /// Coefficients sampled on the grid.
    pub fn sample(&self) -> Vec<[f64; 3]> {
        self.grid.iter().map(|&x| [(self.a)(x), (self.b)(x), (self.c)(x)]).collect()
    }
}

/// Uniform grid with `m` intervals.
pub fn uniform_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let step = (hi - lo) / m as f64;
    (0..=m).map(|i| if i == m { hi } else { lo + step * i as f64 }).collect()
}

type Jet = Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>;

/// `x ↦ (h, h′, h″)`.
#[derive(Clone)]
pub struct SmoothFunction {
    jet: Jet,
    log: Option<Jet>,
}

impl fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SmoothFunction(..)")
    }
}

impl SmoothFunction {
    pub fn new(jet: impl Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static) -> Self {
        Self { jet: Arc::new(jet), log: None }
    }

    /// `h = e^ψ` from `x ↦ (ψ, ψ′, ψ″)`.
    pub fn exp_of(psi: impl Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static) -> Self {
        let psi: Jet = Arc::new(psi);
        let p = psi.clone();
        let jet = move |x: f64| {
            let (v, d1, d2) = p(x);
            let h = v.exp();
            (h, d1 * h, (d2 + d1 * d1) * h)
        };
        Self { jet: Arc::new(jet), log: Some(psi) }
    }

    pub fn constant(v: f64) -> Self {
        Self::new(move |_| (v, 0.0, 0.0))
    }

    /// Derivatives by central differences with step `step` (second order).
    pub fn finite_difference(f: impl Fn(f64) -> f64 + Send + Sync + 'static, step: f64) -> Self {
        Self::new(move |x| {
            let (l, m, r) = (f(x - step), f(x), f(x + step));
            (m, (r - l) / (2.0 * step), (r - 2.0 * m + l) / (step * step))
        })
    }

    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        (self.jet)(x)
    }

    /// `(ψ, ψ′, ψ″)` for `ψ = log h`, when `h` was built with [`SmoothFunction::exp_of`]
    /// or is positive at `x`.
    pub fn log_jet(&self, x: f64) -> Option<(f64, f64, f64)> {
        if let Some(p) = &self.log {
            return Some(p(x));
        }
        let (h, d1, d2) = self.eval(x);
        (h > 0.0).then(|| {
            let g = d1 / h;
            (h.ln(), g, d2 / h - g * g)
        })
    }
}

fn nonzero(h: &SmoothFunction, grid: &[f64]) -> Result<()> {
    match grid.iter().find(|&&x| h.eval(x).0 == 0.0) {
        Some(&x) => Err(Error::ZeroH { x }),
        None => Ok(()),
    }
}

/// Largest `|a h″ + b h′ + c h|` on the grid, scaled by the size of the
/// individual terms (at least one), with its location.
pub fn harmonic_residual(op: &Operator1D, h: &SmoothFunction) -> (f64, f64) {
    op.grid
        .iter()
        .map(|&x| {
            let (v, d1, d2) = h.eval(x);
            let terms = [(op.a)(x) * d2, (op.b)(x) * d1, (op.c)(x) * v];
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
            (x, terms.iter().sum::<f64>().abs() / scale)
        })
        .fold((f64::NAN, 0.0), |m, p| if p.1 > m.1 || m.0.is_nan() { p } else { m })
}

/// `ã = a`, `b̃ = b + 2 a h′/h`, `c̃ = 0`, for `h` harmonic on the grid.
pub fn forward_transform(op: &Operator1D, h: &SmoothFunction, tol: f64) -> Result<Operator1D> {
    nonzero(h, &op.grid)?;
    let (x, residual) = harmonic_residual(op, h);
    if residual > tol {
        return Err(Error::NotHarmonicAt { x, residual });
    }
    let (a, b, hh) = (op.a.clone(), op.b.clone(), h.clone());
    let bt = move |x: f64| {
        let (v, d1, _) = hh.eval(x);
        b(x) + 2.0 * a(x) * d1 / v
    };
    Operator1D::without_potential(op.a.clone(), coef(bt), op.grid.clone(), op.bc)
}

/// Pointwise `b̃_i = b_i + (2/h) Σ_j a_ij ∂_j h` in `d` dimensions.
pub fn forward_transform_nd(a: &[Vec<f64>], b: &[f64], h: f64, grad_h: &[f64]) -> Result<Vec<f64>> {
    let d = b.len();
    if a.len() != d || grad_h.len() != d || a.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: a.len().max(grad_h.len()) });
    }
    if h == 0.0 {
        return Err(Error::ZeroH { x: f64::NAN });
    }
    Ok((0..d)
        .map(|i| b[i] + 2.0 / h * (0..d).map(|j| a[i][j] * grad_h[j]).sum::<f64>())
        .collect())
}

/// `a = ã`, `b = b̃ − 2ã h′/h`, `c = 2ã (h′/h)² − (ã h″ + b̃ h′)/h`.
pub fn inverse_transform(opt: &Operator1D, h: &SmoothFunction) -> Result<Operator1D> {
    nonzero(h, &opt.grid)?;
    let (a1, b1, h1) = (opt.a.clone(), opt.b.clone(), h.clone());
    let b = move |x: f64| {
        let (v, d1, _) = h1.eval(x);
        b1(x) - 2.0 * a1(x) * d1 / v
    };
    let (a2, b2, h2) = (opt.a.clone(), opt.b.clone(), h.clone());
    let c = move |x: f64| {
        let (v, d1, d2) = h2.eval(x);
        let g = d1 / v;
        2.0 * a2(x) * g * g - (a2(x) * d2 + b2(x) * d1) / v
    };
    Operator1D::new(opt.a.clone(), coef(b), coef(c), opt.grid.clone(), opt.bc)
}

/// The same operator through `ψ = log h`:
/// `b = b̃ − 2ãψ′`, `c = ãψ′² − (ãψ″ + b̃ψ′)`.
pub fn inverse_transform_log(opt: &Operator1D, h: &SmoothFunction) -> Result<Operator1D> {
    for &x in &opt.grid {
        if h.log_jet(x).is_none() {
            return Err(Error::PreconditionViolated(format!("h is not positive at {x}")));
        }
    }
    let jet = move |hh: &SmoothFunction, x: f64| hh.log_jet(x).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    let (a1, b1, h1) = (opt.a.clone(), opt.b.clone(), h.clone());
    let b = move |x: f64| b1(x) - 2.0 * a1(x) * jet(&h1, x).1;
    let (a2, b2, h2) = (opt.a.clone(), opt.b.clone(), h.clone());
    let c = move |x: f64| {
        let (_, p1, p2) = jet(&h2, x);
        a2(x) * p1 * p1 - (a2(x) * p2 + b2(x) * p1)
    };
    Operator1D::new(opt.a.clone(), coef(b), coef(c), opt.grid.clone(), opt.bc)
}

/// `L^h = ½∂² − (x + h′/h)∂ + [(h′/h)² + x h′/h − h″/(2h)]`, the transform
/// of the Ornstein–Uhlenbeck operator `½∂² − x∂` by `h`.
pub fn ou_dual(h: &SmoothFunction, grid: Vec<f64>, bc: [Boundary; 2]) -> Result<Operator1D> {
    nonzero(h, &grid)?;
    let h1 = h.clone();
    let b = move |x: f64| {
        let (v, d1, _) = h1.eval(x);
        -(x + d1 / v)
    };
    let h2 = h.clone();
    let c = move |x: f64| {
        let (v, d1, d2) = h2.eval(x);
        let g = d1 / v;
        g * g + x * g - d2 / (2.0 * v)
    };
    Operator1D::new(constant(0.5), coef(b), coef(c), grid, bc)
}

/// `L^b = ½∂² − b∂ + ½[b² − b′ − x² + 1]`.
pub fn l_b_operator(b: Coef, db: Coef, grid: Vec<f64>, bc: [Boundary; 2]) -> Result<Operator1D> {
    let b1 = b.clone();
    let c = move |x: f64| {
        let v = b1(x);
        0.5 * (v * v - db(x) - x * x + 1.0)
    };
    Operator1D::new(constant(0.5), coef(move |x| -b(x)), coef(c), grid, bc)
}

/// `γ(x)(∂² + V(x)∂ − V(x)/x)`, for which `h(x) = x` is harmonic.
pub fn linear_harmonic_fixture(gamma: Coef, v: Coef, grid: Vec<f64>) -> Result<Operator1D> {
    let (g1, v1) = (gamma.clone(), v.clone());
    let (g2, v2) = (gamma.clone(), v);
    Operator1D::new(
        gamma,
        coef(move |x| g1(x) * v1(x)),
        coef(move |x| -g2(x) * v2(x) / x),
        grid,
        [Boundary::Neumann; 2],
    )
}

/// `γ(x)(x∂² + ∂ − 4/x)`, for which `h(x) = x²` is harmonic.
pub fn quadratic_harmonic_fixture(gamma: Coef, grid: Vec<f64>) -> Result<Operator1D> {
    let (g0, g1, g2) = (gamma.clone(), gamma.clone(), gamma);
    Operator1D::new(
        coef(move |x| g0(x) * x),
        g1,
        coef(move |x| -4.0 * g2(x) / x),
        grid,
        [Boundary::Neumann; 2],
    )
}

/// The harmonic oscillator `½(∂² + 1 − x²)`.
pub fn harmonic_oscillator(grid: Vec<f64>, bc: [Boundary; 2]) -> Result<Operator1D> {
    Operator1D::new(constant(0.5), constant(0.0), coef(|x| 0.5 * (1.0 - x * x)), grid, bc)
}

/// The Ornstein–Uhlenbeck operator `½∂² − x∂`.
pub fn ornstein_uhlenbeck(grid: Vec<f64>, bc: [Boundary; 2]) -> Result<Operator1D> {
    Operator1D::without_potential(constant(0.5), coef(|x| -x), grid, bc)
}

/// `e^{−x²/2}`.
pub fn gaussian() -> SmoothFunction {
    SmoothFunction::exp_of(|x| (-0.5 * x * x, -x, -1.0))
}

/// Largest relative pointwise difference between two operators' coefficients.
pub fn coefficient_gap(p: &Operator1D, q: &Operator1D) -> f64 {
    p.grid
        .iter()
        .flat_map(|&x| {
            [(p.a.clone(), q.a.clone()), (p.b.clone(), q.b.clone()), (p.c.clone(), q.c.clone())]
                .map(|(f, g)| {
                    let (u, v) = (f(x), g(x));
                    (u - v).abs() / u.abs().max(v.abs()).max(1.0)
                })
        })
        .fold(0.0, f64::max)
}
