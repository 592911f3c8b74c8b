//! Verification laboratory for the scaled Kawahara–Kadomtsev–Petviashvili equation
//!
//! ```text
//! u_t + u u_x + β u_xxx + u_xxxxx = σ ∂x⁻¹ u_yy,    β ≠ 0, σ = ±1
//! ```
//!
//! The crate is split along the verification pipeline:
//!
//! - [`model`]: closed-form sech⁴ line solitons, their derivatives, the
//!   potential `v` with `u = v_x`, and the kinematic relations between
//!   background, speed and direction.
//! - [`ansatz`]: exact rational calculus on polynomials in `T = tanh(mξ)` that
//!   rebuilds the tanh-method system and certifies the soliton family.
//! - [`spectral`]: Fourier pseudospectral evolution on a periodic box with
//!   integrating-factor RK4 stepping.
//! - [`diagnostics`]: conserved integrals, conservation-law divergence
//!   residuals, topological charges, symmetry actions and the stability
//!   integral.

pub mod ansatz;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod spectral;

pub use error::{KkpError, Result};
pub use model::{LineSoliton, LineWave, ModelParams, Sigma};
