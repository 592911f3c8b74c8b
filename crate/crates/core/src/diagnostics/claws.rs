//! Conservation laws in potential form and their divergence residuals.
//!
//! With `u = v_x` the equation reads
//! `v_tx + v_x v_xx + β v_xxxx + v_xxxxxx − σ v_yy = 0`. Each law supplies a
//! density `T` and fluxes `(Φˣ, Φʸ)` with `D_t T + D_x Φˣ + D_y Φʸ = 0` on
//! solutions. The residual evaluates `T`, `Φ` exactly on a line soliton and
//! differentiates them with fourth-order central differences.

use super::integrals::FTriple;
use crate::error::{KkpError, Result};
use crate::model::LineSoliton;

/// Partial derivatives of `v = V(x + μy − νt)` at one point.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    derivs: [f64; 8],
    mu: f64,
    nu: f64,
}

impl Jet {
    pub fn new(soliton: &LineSoliton, x: f64, y: f64, t: f64) -> Self {
        let w = soliton.wave();
        Self { derivs: soliton.potential_derivatives(soliton.phase(x, y, t)), mu: w.mu, nu: w.nu }
    }

    /// `∂x^a ∂y^b ∂t^c v = μ^b (−ν)^c V^{(a+b+c)}`.
    pub fn d(&self, a: u32, b: u32, c: u32) -> f64 {
        self.mu.powi(b as i32) * (-self.nu).powi(c as i32) * self.derivs[(a + b + c) as usize]
    }
}

pub const LAW_COUNT: usize = 5;

/// Whether law `id` carries an arbitrary `f(t)`.
pub fn law_uses_f(id: usize) -> bool {
    id != 1
}

/// `[T, Φˣ, Φʸ]` of law `id` at `(x, y, t)`.
pub fn law_densities(id: usize, f: &FTriple, soliton: &LineSoliton, x: f64, y: f64, t: f64) -> Result<[f64; 3]> {
    let j = Jet::new(soliton, x, y, t);
    let beta = soliton.params().beta;
    let s = soliton.params().sigma.value();
    let [f0, f1, f2, f3] = f.at(t);

    let v = j.d(0, 0, 0);
    let vx = j.d(1, 0, 0);
    let vxx = j.d(2, 0, 0);
    let vxxx = j.d(3, 0, 0);
    let v4x = j.d(4, 0, 0);
    let v5x = j.d(5, 0, 0);
    let vy = j.d(0, 1, 0);
    let vt = j.d(0, 0, 1);
    let vtx = j.d(1, 0, 1);
    let vtxx = j.d(2, 0, 1);
    let vxy = j.d(1, 1, 0);
    let vxxy = j.d(2, 1, 0);

    // recurring groups
    let flux4 = beta * vxxx + v5x + 0.5 * vx * vx + vt;
    let lag = beta * vx * vxxx - 0.5 * beta * vxx * vxx + vx * vx * vx / 3.0 + v5x * vx - vxx * v4x + 0.5 * vxxx * vxxx;

    Ok(match id {
        1 => [
            0.5 * (vxxx * vxxx - beta * vxx * vxx + vx * vx * vx / 3.0 - s * vy * vy),
            (beta * vxx + v4x) * vtx - 0.5 * vt * vt - (beta * vxxx + v5x + 0.5 * vx * vx) * vt - vtxx * vxxx,
            s * vt * vy,
        ],
        2 => [
            0.5 * vx * vx * f0 + v * f1,
            (0.5 * s * vy * vy + lag) * f0 - (x * flux4 - (beta * vxx + v4x)) * f1 - y * y * flux4 * f2 / (2.0 * s),
            -s * f0 * vx * vy + s * x * f1 * vy + (0.5 * y * y * vy - y * v) * f2,
        ],
        3 => [
            0.5 * (vx * vy * f0 + y * vx * vx * f1 / (2.0 * s) + y * v * f2 / s),
            (0.5 * vt * vy + (beta * vxxx + 0.5 * vx * vx + v5x) * vy - (beta * vxx + v4x) * vxy + vxxx * vxxy) * f0
                + y * (0.25 * vy * vy + lag / (2.0 * s)) * f1
                - (x * y * flux4 - y * (beta * vxx + v4x)) * f2 / (2.0 * s)
                - y * y * y * flux4 * f3 / (12.0 * s * s),
            -0.5 * ((vx * vt + s * vy * vy - beta * vxx * vxx + vx * vx * vx / 3.0 + vxxx * vxxx) * f0
                + y * f1 * vx * vy
                - x * (y * vy - v) * f2
                - (y * y * y * vy / 3.0 - y * y * v) * f3 / (2.0 * s)),
        ],
        4 => [0.0, flux4 * f0, -s * vy * f0],
        5 => [0.0, y * flux4 * f0, s * (v - y * vy) * f0],
        other => return Err(KkpError::InvalidArgument(format!("conservation law id must be 1..5, got {other}"))),
    })
}

fn central_difference(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h)
}

/// `D_t T + D_x Φˣ + D_y Φʸ` at `point` with step `h`.
pub fn claw_divergence_residual(
    id: usize,
    f: &FTriple,
    soliton: &LineSoliton,
    point: (f64, f64, f64),
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(KkpError::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let (x, y, t) = point;
    law_densities(id, f, soliton, x, y, t)?;
    let eval = |dx: f64, dy: f64, dt: f64, k: usize| {
        law_densities(id, f, soliton, x + dx, y + dy, t + dt).map(|v| v[k]).unwrap_or(f64::NAN)
    };
    let dt_t = central_difference(|s| eval(0.0, 0.0, s, 0), h);
    let dx_phi = central_difference(|s| eval(s, 0.0, 0.0, 1), h);
    let dy_phi = central_difference(|s| eval(0.0, s, 0.0, 2), h);
    Ok(dt_t + dx_phi + dy_phi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub law: usize,
    pub f: &'static str,
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `log2` ratios of successive residuals.
    pub orders: Vec<f64>,
    /// Order from the finest pair still clear of the roundoff floor.
    pub observed_order: Option<f64>,
    pub min_residual: f64,
}

impl ConvergenceTable {
    pub fn passed(&self, min_order: f64, max_residual: f64) -> bool {
        self.observed_order.is_some_and(|p| p >= min_order) && self.min_residual <= max_residual
    }
}

/// Residuals at `h0, h0/2, …` (`levels` values) plus observed orders. A
/// pair counts toward the observed order only while both residuals sit
/// well above the roundoff floor `ε·max|T, Φ|/h`.
pub fn convergence_table(
    id: usize,
    f: &FTriple,
    soliton: &LineSoliton,
    point: (f64, f64, f64),
    h0: f64,
    levels: usize,
) -> Result<ConvergenceTable> {
    let (x, y, t) = point;
    let scale = law_densities(id, f, soliton, x, y, t)?.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    let steps: Vec<f64> = (0..levels).map(|k| h0 / 2f64.powi(k as i32)).collect();
    let residuals = steps
        .iter()
        .map(|h| claw_divergence_residual(id, f, soliton, point, *h).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    let orders: Vec<f64> = residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let floor = |h: f64| 1e3 * f64::EPSILON * scale / h;
    let observed_order = (0..orders.len())
        .rev()
        .find(|&k| residuals[k] > floor(steps[k]) && residuals[k + 1] > floor(steps[k + 1]))
        .map(|k| orders[k]);
    let min_residual = residuals.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConvergenceTable { law: id, f: f.name, steps, residuals, orders, observed_order, min_residual })
}
