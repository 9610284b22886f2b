//! Dual drift from the Riccati equation `ā φ′ + ā φ² + b̄ φ + c̄ = 0`.

use serde::{Deserialize, Serialize};

use super::Operator1D;
use crate::error::{Error, Result};

/// `|φ|` above this is treated as a blow-up.
pub const RICCATI_GUARD: f64 = 1e8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiccatiSolution {
    pub grid: Vec<f64>,
    /// `φ = ψ′ = h′/h`.
    pub phi: Vec<f64>,
    /// `ψ = log h` with `ψ(x₀) = 0`.
    pub psi: Vec<f64>,
    /// `b̃ = 2āφ + b̄`.
    pub b_tilde: Vec<f64>,
}

fn rk4_step(f: &dyn Fn(f64, f64) -> f64, x: f64, y: f64, dx: f64) -> f64 {
    let k1 = f(x, y);
    let k2 = f(x + 0.5 * dx, y + 0.5 * dx * k1);
    let k3 = f(x + 0.5 * dx, y + 0.5 * dx * k2);
    let k4 = f(x + dx, y + dx * k3);
    y + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates `φ′ = −(āφ² + b̄φ + c̄)/ā` with classical RK4 from
/// `φ(grid[start]) = phi0` in both directions, one step per grid interval.
pub fn riccati_dual(opbar: &Operator1D, phi0: f64, start: usize) -> Result<RiccatiSolution> {
    let grid = &opbar.grid;
    let m = grid.len();
    if start >= m {
        return Err(Error::InvalidArgument(format!("start index {start} outside grid")));
    }
    let (a, b, c) = (opbar.a.clone(), opbar.b.clone(), opbar.c.clone());
    let rhs = move |x: f64, y: f64| -(a(x) * y * y + b(x) * y + c(x)) / a(x);
    let mut phi = vec![0.0; m];
    phi[start] = phi0;
    for i in start..m - 1 {
        phi[i + 1] = rk4_step(&rhs, grid[i], phi[i], grid[i + 1] - grid[i]);
        if !(phi[i + 1].abs() <= RICCATI_GUARD) {
            return Err(Error::BlowUp { x: grid[i + 1] });
        }
    }
    for i in (1..=start).rev() {
        phi[i - 1] = rk4_step(&rhs, grid[i], phi[i], grid[i - 1] - grid[i]);
        if !(phi[i - 1].abs() <= RICCATI_GUARD) {
            return Err(Error::BlowUp { x: grid[i - 1] });
        }
    }
    let mut psi = vec![0.0; m];
    for i in start + 1..m {
        psi[i] = psi[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (phi[i] + phi[i - 1]);
    }
    for i in (0..start).rev() {
        psi[i] = psi[i + 1] - 0.5 * (grid[i + 1] - grid[i]) * (phi[i] + phi[i + 1]);
    }
    let b_tilde = grid.iter().zip(&phi).map(|(&x, &p)| 2.0 * (opbar.a)(x) * p + (opbar.b)(x)).collect();
    Ok(RiccatiSolution { grid: grid.clone(), phi, psi, b_tilde })
}

/// Coefficients of the operator rebuilt from `(ā, b̃)` and `h = e^ψ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiccatiRecovery {
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// `sup |b − b̄|`.
    pub b_error: f64,
    /// `sup |c − c̄|`.
    pub c_error: f64,
}

/// Fourth-order differences on a uniform grid (one-sided at the ends).
fn derivative4(y: &[f64], dx: f64) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let s = if i < 2 {
                [-25.0, 48.0, -36.0, 16.0, -3.0]
                    .iter()
                    .enumerate()
                    .map(|(k, w)| w * y[i + k])
                    .sum::<f64>()
                    / 12.0
            } else if i + 2 >= n {
                -[-25.0, 48.0, -36.0, 16.0, -3.0]
                    .iter()
                    .enumerate()
                    .map(|(k, w)| w * y[i - k])
                    .sum::<f64>()
                    / 12.0
            } else {
                (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / 12.0
            };
            s / dx
        })
        .collect()
}

/// Applies the inverse transform to `(ā, b̃)` with `ψ′ = φ` on the grid,
/// `ψ″` taken by finite differences of `φ`, and compares with `(b̄, c̄)`.
/// Requires a uniform grid with at least five points.
pub fn riccati_recovery(opbar: &Operator1D, sol: &RiccatiSolution) -> Result<RiccatiRecovery> {
    let g = &sol.grid;
    if g.len() < 5 {
        return Err(Error::InvalidArgument("recovery needs at least five grid points".into()));
    }
    let dx = (g[g.len() - 1] - g[0]) / (g.len() - 1) as f64;
    if g.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-9 * dx) {
        return Err(Error::InvalidArgument("recovery needs a uniform grid".into()));
    }
    let dphi = derivative4(&sol.phi, dx);
    let (mut b, mut c) = (Vec::with_capacity(g.len()), Vec::with_capacity(g.len()));
    let (mut b_error, mut c_error) = (0.0_f64, 0.0_f64);
    for (i, &x) in g.iter().enumerate() {
        let a = (opbar.a)(x);
        let p = sol.phi[i];
        let bi = sol.b_tilde[i] - 2.0 * a * p;
        let ci = a * p * p - (a * dphi[i] + sol.b_tilde[i] * p);
        b_error = b_error.max((bi - (opbar.b)(x)).abs());
        c_error = c_error.max((ci - (opbar.c)(x)).abs());
        b.push(bi);
        c.push(ci);
    }
    Ok(RiccatiRecovery { b, c, b_error, c_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffops::{coef, constant, harmonic_oscillator, uniform_grid, Boundary};

    #[test]
    fn oscillator_gives_ou_drift() {
        let op = harmonic_oscillator(uniform_grid(-3.0, 3.0, 6000), [Boundary::Neumann; 2]).unwrap();
        let sol = riccati_dual(&op, 0.0, 3000).unwrap();
        let err = sol.grid.iter().zip(&sol.b_tilde).map(|(x, b)| (b + x).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        let psi_err = sol.grid.iter().zip(&sol.psi).map(|(x, p)| (p + 0.5 * x * x).abs()).fold(0.0, f64::max);
        assert!(psi_err < 1e-5);
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let op = Operator1D::without_potential(constant(1.0), constant(0.0), uniform_grid(0.0, 1.0, 10), [Boundary::Neumann; 2])
            .unwrap();
        let sol = riccati_dual(&op, 0.0, 5).unwrap();
        assert!(sol.phi.iter().chain(&sol.b_tilde).all(|&v| v == 0.0));
    }

    #[test]
    fn blow_up_detected() {
        // φ′ = −φ² from φ(0) = −1 reaches −∞ at x = 1
        let op = Operator1D::without_potential(constant(1.0), constant(0.0), uniform_grid(0.0, 2.0, 2000), [Boundary::Neumann; 2])
            .unwrap();
        assert!(matches!(riccati_dual(&op, -1.0, 0), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn generic_round_trip() {
        let op = Operator1D::new(
            coef(|x| 1.0 + 0.3 * x.sin()),
            coef(|x| 0.5 * x - 0.2),
            coef(|x| -0.5 - 0.1 * x.cos()),
            uniform_grid(-1.0, 1.0, 2000),
            [Boundary::Neumann; 2],
        )
        .unwrap();
        let sol = riccati_dual(&op, 0.2, 1000).unwrap();
        let rec = riccati_recovery(&op, &sol).unwrap();
        assert!(rec.c_error < 1e-6, "{}", rec.c_error);
        assert!(rec.b_error < 1e-12);
    }
}
