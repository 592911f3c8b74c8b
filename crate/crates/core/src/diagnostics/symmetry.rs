//! Symmetry images of a line soliton and their equation residuals.
//!
//! Generators act on the potential `v` (with `u = v_x`):
//!
//! - `X1`: `ṽ(x, y, t) = v(x, y, t − ε)`.
//! - `X2`: `ṽ = v(x − εf, y, t) + εx f' − ε²ff'/2 + εy²f''/(2σ)`.
//! - `X3`: `ṽ = v(x*, y − εf, t) + Δ` with
//!   `x* = x − εyf'/(2σ) + ε²ff'/(4σ)` and `Δ` the exact potential shift
//!   of the flow, whose derivatives enter the residual.
//!
//! The residual is `ṽ_tx + ṽ_x ṽ_xx + βṽ_xxxx + ṽ_xxxxxx − σṽ_yy`, i.e. the
//! equation for `ũ = ṽ_x` with `∂x⁻¹ũ_yy` taken as `ṽ_yy`.

use super::integrals::FTriple;
use crate::error::{KkpError, Result};
use crate::model::LineSoliton;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    X1,
    X2,
    X3,
}

impl std::str::FromStr for Generator {
    type Err = KkpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X1" | "x1" => Ok(Generator::X1),
            "X2" | "x2" => Ok(Generator::X2),
            "X3" | "x3" => Ok(Generator::X3),
            other => Err(KkpError::InvalidArgument(format!("unknown generator {other:?}"))),
        }
    }
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Generator::X1 => "X1",
            Generator::X2 => "X2",
            Generator::X3 => "X3",
        })
    }
}

/// Phase of the image and the derivatives of its additive part `W`.
///
/// In every case `ξ_x = 1` and `ξ`, `W_x` are affine in `x, y`, so only
/// these quantities enter the residual.
#[derive(Debug, Clone, Copy)]
struct Image {
    xi: f64,
    xi_y: f64,
    xi_t: f64,
    w_x: f64,
    w_tx: f64,
    w_yy: f64,
}

fn image(generator: Generator, f: &FTriple, eps: f64, soliton: &LineSoliton, x: f64, y: f64, t: f64) -> Image {
    let w = soliton.wave();
    let (mu, nu) = (w.mu, w.nu);
    let s = soliton.params().sigma.value();
    let [f0, f1, f2, f3] = f.at(t);
    match generator {
        Generator::X1 => {
            Image { xi: soliton.phase(x, y, t - eps), xi_y: mu, xi_t: -nu, w_x: 0.0, w_tx: 0.0, w_yy: 0.0 }
        }
        Generator::X2 => Image {
            xi: soliton.phase(x - eps * f0, y, t),
            xi_y: mu,
            xi_t: -eps * f1 - nu,
            w_x: eps * f1,
            w_tx: eps * f2,
            w_yy: eps * f2 / s,
        },
        Generator::X3 => {
            let e2 = eps * eps;
            let xs = x - eps * y * f1 / (2.0 * s) + e2 * f0 * f1 / (4.0 * s);
            let ys = y - eps * f0;
            Image {
                xi: soliton.phase(xs, ys, t),
                xi_y: mu - eps * f1 / (2.0 * s),
                xi_t: -eps * y * f2 / (2.0 * s) + e2 * (f1 * f1 + f0 * f2) / (4.0 * s) - mu * eps * f1 - nu,
                w_x: eps * y * f2 / (2.0 * s) - e2 * f0 * f2 / (4.0 * s),
                w_tx: eps * y * f3 / (2.0 * s) - e2 * (f0 * f3 + f1 * f2) / (4.0 * s),
                w_yy: (eps * y * f3 / 2.0 - e2 * (f0 * f3 + f1 * f2) / 4.0) / (s * s),
            }
        }
    }
}

/// Equation residual of the transformed potential at `(x, y, t)`.
pub fn transformed_residual(
    generator: Generator,
    f: &FTriple,
    eps: f64,
    soliton: &LineSoliton,
    x: f64,
    y: f64,
    t: f64,
) -> f64 {
    let im = image(generator, f, eps, soliton, x, y, t);
    let v = soliton.potential_derivatives(im.xi);
    let beta = soliton.params().beta;
    let s = soliton.params().sigma.value();
    let v_tx = v[2] * im.xi_t + im.w_tx;
    let v_x = v[1] + im.w_x;
    let v_xx = v[2];
    let v_yy = v[2] * im.xi_y * im.xi_y + im.w_yy;
    v_tx + v_x * v_xx + beta * v[4] + v[6] - s * v_yy
}

/// Transformed field `ũ = ṽ_x` at `(x, y, t)`.
pub fn transformed_field(
    generator: Generator,
    f: &FTriple,
    eps: f64,
    soliton: &LineSoliton,
    x: f64,
    y: f64,
    t: f64,
) -> f64 {
    let im = image(generator, f, eps, soliton, x, y, t);
    soliton.profile(im.xi) + im.w_x
}

/// Velocity of a point carried by the `X3` flow: `(dX/dt, dY/dt)` for a
/// fixed preimage `(x, y)`.
pub fn x3_frame_velocity(f: &FTriple, eps: f64, sigma: f64, y: f64, t: f64) -> (f64, f64) {
    let [f0, f1, f2, _] = f.at(t);
    let e2 = eps * eps;
    let vx = e2 * f1 * f1 / (2.0 * sigma) + eps * (y + eps * f0) * f2 / (2.0 * sigma)
        - e2 * (f1 * f1 + f0 * f2) / (4.0 * sigma);
    (vx, eps * f1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub generator: Generator,
    pub f: &'static str,
    pub eps: f64,
    pub points: usize,
    pub max_residual: f64,
    /// Residual of the untransformed soliton at the same points.
    pub base_residual: f64,
}

pub fn symmetry_action_check(
    generator: Generator,
    f: &FTriple,
    eps: f64,
    soliton: &LineSoliton,
    points: &[(f64, f64, f64)],
) -> SymmetryReport {
    let worst = |g: Generator, e: f64| {
        points.iter().map(|&(x, y, t)| transformed_residual(g, f, e, soliton, x, y, t).abs()).fold(0.0, f64::max)
    };
    SymmetryReport {
        generator,
        f: f.name,
        eps,
        points: points.len(),
        max_residual: worst(generator, eps),
        base_residual: worst(generator, 0.0),
    }
}
