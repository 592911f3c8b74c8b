//! Topological charges: loop integrals of the fluxes of the two laws with
//! vanishing density.
//!
//! With `A = βu_xx + u_xxxx + ½u² + ∂x⁻¹u_t` the charges are
//!
//! ```text
//! Q₁ = ∮ A dy + σ ∂x⁻¹u_y dx
//! Q₂ = ∮ yA dy + σ (y ∂x⁻¹u_y − ∂x⁻¹u) dx
//! ```
//!
//! taken counter-clockwise around an interior rectangle.

use super::integrals::{dx_inv, dx_inv_hat};
use crate::error::{KkpError, Result};
use crate::model::LineSoliton;
use crate::spectral::{Solver, SpectralState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rectangle {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(KkpError::InvalidArgument(format!("degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]")));
        }
        Ok(Self { x0, x1, y0, y1 })
    }
}

fn check_id(id: usize) -> Result<()> {
    if id == 1 || id == 2 {
        Ok(())
    } else {
        Err(KkpError::InvalidArgument(format!("charge id must be 1 or 2, got {id}")))
    }
}

fn trapezoid(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let inner: f64 = (1..panels).map(|k| g(a + k as f64 * h)).sum();
    h * (0.5 * (g(a) + g(b)) + inner)
}

/// Loop integral of `P dx + Q dy` around `rect`, counter-clockwise.
fn loop_integral(p: impl Fn(f64, f64) -> f64, q: impl Fn(f64, f64) -> f64, rect: &Rectangle, panels: usize) -> f64 {
    let Rectangle { x0, x1, y0, y1 } = *rect;
    let bottom = trapezoid(|x| p(x, y0), x0, x1, panels);
    let top = trapezoid(|x| p(x, y1), x0, x1, panels);
    let right = trapezoid(|y| q(x1, y), y0, y1, panels);
    let left = trapezoid(|y| q(x0, y), y0, y1, panels);
    bottom + right - top - left
}

/// Charge `id` of a line soliton, evaluated from closed forms at time `t`
/// with `panels` trapezoid panels per edge.
pub fn topological_charge(id: usize, soliton: &LineSoliton, t: f64, rect: &Rectangle, panels: usize) -> Result<f64> {
    check_id(id)?;
    if panels == 0 {
        return Err(KkpError::InvalidArgument("need at least one panel".into()));
    }
    let w = *soliton.wave();
    let beta = soliton.params().beta;
    let s = soliton.params().sigma.value();
    let a = |x: f64, y: f64| {
        let d = soliton.derivatives(soliton.phase(x, y, t));
        beta * d[2] + d[4] + 0.5 * d[0] * d[0] - w.nu * d[0]
    };
    let b = |x: f64, y: f64| s * w.mu * soliton.profile(soliton.phase(x, y, t));
    Ok(match id {
        1 => loop_integral(b, a, rect, panels),
        _ => loop_integral(
            |x, y| s * (y * w.mu * soliton.profile(soliton.phase(x, y, t)) - soliton.potential(soliton.phase(x, y, t))),
            |x, y| y * a(x, y),
            rect,
            panels,
        ),
    })
}

/// Grid-aligned rectangle: index bounds `ix0 < ix1`, `iy0 < iy1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRectangle {
    pub ix0: usize,
    pub ix1: usize,
    pub iy0: usize,
    pub iy1: usize,
}

/// Charge `id` of a spectral state, with `∂x⁻¹u_t` taken from the equation
/// and all antiderivatives in the zero-mean convention. The trapezoid rule
/// runs over grid samples on the rectangle's edges.
type Integrand<'a> = dyn Fn(usize, usize) -> f64 + 'a;

pub fn topological_charge_state(
    id: usize,
    solver: &Solver,
    state: &SpectralState,
    rect: &IndexRectangle,
) -> Result<f64> {
    check_id(id)?;
    let fourier = solver.fourier();
    let grid = *fourier.grid();
    let IndexRectangle { ix0, ix1, iy0, iy1 } = *rect;
    if !(ix0 < ix1 && ix1 < grid.nx && iy0 < iy1 && iy1 < grid.ny) {
        return Err(KkpError::InvalidArgument(format!("rectangle {rect:?} is not interior to the grid")));
    }
    let params = solver.config().params;
    let uhat = &state.uhat;
    let u = fourier.inverse(uhat);
    let uxx = fourier.derivative(uhat, 2, 0);
    let u4 = fourier.derivative(uhat, 4, 0);
    let ut = solver.time_derivative(state);
    let vt = dx_inv(fourier, &fourier.forward(&ut))?;
    let vy = dx_inv(fourier, &fourier.derivative_hat(uhat, 0, 1))?;
    let v = fourier.inverse(&dx_inv_hat(fourier, uhat)?);
    let s = params.sigma.value();
    let at = |ix: usize, iy: usize| grid.index(ix, iy);
    let a = |i: usize| params.beta * uxx[i] + u4[i] + 0.5 * u[i] * u[i] + vt[i];
    let (p, q): (Box<Integrand>, Box<Integrand>) = match id {
        1 => (Box::new(|ix, iy| s * vy[at(ix, iy)]), Box::new(|ix, iy| a(at(ix, iy)))),
        _ => (
            Box::new(|ix, iy| s * (grid.y(iy) * vy[at(ix, iy)] - v[at(ix, iy)])),
            Box::new(|ix, iy| grid.y(iy) * a(at(ix, iy))),
        ),
    };
    let edge = |g: &dyn Fn(usize) -> f64, lo: usize, hi: usize, h: f64| {
        h * (0.5 * (g(lo) + g(hi)) + (lo + 1..hi).map(g).sum::<f64>())
    };
    let (dx, dy) = (grid.dx(), grid.dy());
    let bottom = edge(&|ix| p(ix, iy0), ix0, ix1, dx);
    let top = edge(&|ix| p(ix, iy1), ix0, ix1, dx);
    let right = edge(&|iy| q(ix1, iy), iy0, iy1, dy);
    let left = edge(&|iy| q(ix0, iy), iy0, iy1, dy);
    Ok(bottom + right - top - left)
}
