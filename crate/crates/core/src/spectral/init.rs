//! Initial data on the periodic box.

use super::grid::Grid2D;
use crate::error::{KkpError, Result};
use crate::model::LineSoliton;

/// How a line soliton with nonzero background `p` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Background {
    /// Only `p = 0` is accepted.
    #[default]
    ZeroOnly,
    /// The constant offset is kept; it is periodic on any box.
    Free,
}

/// Wraps `xi` into `[−l/2, l/2)`.
pub fn wrap(xi: f64, l: f64) -> f64 {
    let w = xi - l * (xi / l).round();
    if w >= 0.5 * l {
        w - l
    } else {
        w
    }
}

/// Checks that a crest tilted by `mu` closes up across the box: `μ·ly/lx ∈ ℤ`.
pub fn check_commensurate(grid: &Grid2D, mu: f64) -> Result<()> {
    if mu == 0.0 || grid.ny == 1 {
        return Ok(());
    }
    let ratio = mu * grid.ly / grid.lx;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio.abs().max(1.0) {
        return Err(KkpError::NotPeriodic(ratio));
    }
    Ok(())
}

/// Samples `U(x + μy − x0)` with the phase wrapped to the box, so a crest
/// that leaves through one side re-enters through the other.
pub fn init_line_soliton(grid: &Grid2D, soliton: &LineSoliton, x0: f64, background: Background) -> Result<Vec<f64>> {
    let w = soliton.wave();
    check_commensurate(grid, w.mu)?;
    if background == Background::ZeroOnly && w.p.abs() > 1e-12 * w.q.max(1.0) {
        return Err(KkpError::NonzeroBackground(w.p));
    }
    let mut field = vec![0.0; grid.len()];
    for iy in 0..grid.ny {
        let y = grid.y(iy);
        for ix in 0..grid.nx {
            let xi = wrap(grid.x(ix) + w.mu * y - x0, grid.lx);
            field[grid.index(ix, iy)] = soliton.profile(xi);
        }
    }
    Ok(field)
}

/// `∂x[A exp(−(x + μy)²/a² − y²/b²)]`, a tilted packet decaying in both
/// directions whose x-integral vanishes on every line.
pub fn tilted_packet(grid: &Grid2D, amplitude: f64, a: f64, b: f64, mu: f64) -> Vec<f64> {
    let mut field = vec![0.0; grid.len()];
    for iy in 0..grid.ny {
        let y = grid.y(iy);
        for ix in 0..grid.nx {
            let s = grid.x(ix) + mu * y;
            let g = amplitude * (-(s * s) / (a * a) - y * y / (b * b)).exp();
            field[grid.index(ix, iy)] = -2.0 * s / (a * a) * g;
        }
    }
    field
}
