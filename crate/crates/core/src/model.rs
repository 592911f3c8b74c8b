//! Model parameters and closed-form line solitons.
//!
//! A line soliton is `u = U(ξ)` with `ξ = x + μy − νt`. For `β < 0` the sech
//! family is
//!
//! ```text
//! U(ξ) = p − q sech⁴(rξ/2),   r = sqrt(|β|/13),   q = 105 r⁴,   p = κ + 36 r⁴,
//! κ = σμ² + ν.
//! ```
//!
//! Derivatives are evaluated exactly as polynomials in `T = tanh(rξ/2)` and
//! `S = sech²(rξ/2)`, so ODE and conservation-law residuals built on them sit
//! at roundoff level.

use crate::error::{KkpError, Result};
use std::f64::consts::FRAC_PI_2;

/// Highest ξ-derivative of the profile available in closed form.
pub const MAX_PROFILE_ORDER: usize = 6;

/// Selector between K-KP I (`σ = +1`) and K-KP II (`σ = −1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sigma {
    Plus,
    Minus,
}

impl Sigma {
    pub fn from_int(value: i64) -> Result<Self> {
        match value {
            1 => Ok(Sigma::Plus),
            -1 => Ok(Sigma::Minus),
            other => Err(KkpError::InvalidSigma(other)),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sigma::Plus => 1.0,
            Sigma::Minus => -1.0,
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Sigma::Plus => 1,
            Sigma::Minus => -1,
        }
    }
}

/// Coefficients of the scaled equation (α = γ = 1 after scaling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub beta: f64,
    pub sigma: Sigma,
}

impl ModelParams {
    pub fn new(beta: f64, sigma: Sigma) -> Result<Self> {
        if beta == 0.0 || !beta.is_finite() {
            return Err(KkpError::ZeroBeta);
        }
        Ok(Self { beta, sigma })
    }

    /// `r⁴ = (β/13)²`, kept as its own expression so every derived quantity
    /// rounds identically.
    pub fn r4(&self) -> f64 {
        let b = self.beta / 13.0;
        b * b
    }

    /// `(6β/13)² = 36 r⁴`, the background offset and the dispersion ratio
    /// appearing in the kinematic condition.
    pub fn dispersion_ratio_sq(&self) -> f64 {
        36.0 * self.r4()
    }

    pub fn require_soliton(&self) -> Result<()> {
        if self.beta < 0.0 {
            Ok(())
        } else {
            Err(KkpError::NoSoliton(self.beta))
        }
    }
}

/// Direction and speed parameters of one line wave plus everything derived
/// from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineWave {
    pub mu: f64,
    pub nu: f64,
    pub kappa: f64,
    pub r: f64,
    pub q: f64,
    pub p: f64,
    pub c: f64,
    pub theta: f64,
}

impl LineWave {
    pub fn new(params: &ModelParams, mu: f64, nu: f64) -> Self {
        let r4 = params.r4();
        let transverse = params.sigma.value() * mu * mu;
        // p is formed as ν + (σμ² + 36r⁴) so the zero-background ν cancels exactly
        let p = nu + (transverse + params.dispersion_ratio_sq());
        let (c, theta) = speed_and_direction(mu, nu);
        Self { mu, nu, kappa: transverse + nu, r: (params.beta.abs() / 13.0).sqrt(), q: 105.0 * r4, p, c, theta }
    }

    /// Wave with vanishing background for the given slope.
    pub fn zero_background(params: &ModelParams, mu: f64) -> Result<Self> {
        let nu = zero_background_nu(params, mu)?;
        Ok(Self::new(params, mu, nu))
    }

    /// Inverse of [`speed_and_direction`]: `μ = tan θ`, `ν = c / cos θ`.
    pub fn from_speed_direction(params: &ModelParams, c: f64, theta: f64) -> Result<Self> {
        check_angle(theta)?;
        Ok(Self::new(params, theta.tan(), c / theta.cos()))
    }
}

/// `(c, θ)` with `c = ν/√(1+μ²)` and `θ = arctan μ`.
pub fn speed_and_direction(mu: f64, nu: f64) -> (f64, f64) {
    (nu / (1.0 + mu * mu).sqrt(), mu.atan())
}

/// `ν = −σμ² − (6β/13)²`, the speed parameter giving `p = 0`.
pub fn zero_background_nu(params: &ModelParams, mu: f64) -> Result<f64> {
    params.require_soliton()?;
    Ok(-(params.sigma.value() * mu * mu + params.dispersion_ratio_sq()))
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() && theta.abs() < FRAC_PI_2 {
        Ok(())
    } else {
        Err(KkpError::AngleDomain(theta))
    }
}

/// Zero-background speed at direction `θ` for a given `(6β/13)²`:
/// `c(θ) = −(6β/13)²|cos θ| − σ sin²θ/|cos θ|`.
pub fn kinematic_speed(ratio_sq: f64, sigma: Sigma, theta: f64) -> Result<f64> {
    check_angle(theta)?;
    let cos = theta.cos().abs();
    let sin = theta.sin();
    Ok(-ratio_sq * cos - sigma.value() * sin * sin / cos)
}

pub fn c_of_theta(params: &ModelParams, theta: f64) -> Result<f64> {
    params.require_soliton()?;
    kinematic_speed(params.dispersion_ratio_sq(), params.sigma, theta)
}

/// Background `p = σ tan²θ + c/|cos θ| + (6β/13)²` in kinematic variables.
pub fn background_from_kinematics(params: &ModelParams, c: f64, theta: f64) -> Result<f64> {
    check_angle(theta)?;
    let tan = theta.tan();
    Ok(params.sigma.value() * tan * tan + c / theta.cos().abs() + params.dispersion_ratio_sq())
}

/// Interior maximum of `c(θ)` for σ = +1, present only when `(6β/13)² > 2`.
/// Returns `(|θ|, c_max)` with `c_max = −2√((6β/13)² − 1)`.
pub fn max_speed_sigma_plus(ratio_sq: f64) -> Option<(f64, f64)> {
    (ratio_sq > 2.0).then(|| ((ratio_sq - 2.0).sqrt().atan(), -2.0 * (ratio_sq - 1.0).sqrt()))
}

/// Direction of the stationary wave for σ = −1: `|θ| = arctan(6|β|/13)`.
pub fn stationary_angle(ratio_sq: f64) -> f64 {
    ratio_sq.sqrt().atan()
}

/// Sum of `coef · T^j · S^m` terms.
#[derive(Debug, Clone, Default, PartialEq)]
struct TanhSechPoly {
    terms: Vec<(f64, u32, u32)>,
}

impl TanhSechPoly {
    /// `D = (1 − T²) d/dT` acting on `T^j S^m`, using `DT = S`, `DS = −2TS`.
    fn derive(&self) -> Self {
        let mut out: Vec<(f64, u32, u32)> = Vec::new();
        let mut push = |coef: f64, j: u32, m: u32| {
            if coef == 0.0 {
                return;
            }
            match out.iter_mut().find(|t| t.1 == j && t.2 == m) {
                Some(t) => t.0 += coef,
                None => out.push((coef, j, m)),
            }
        };
        for &(coef, j, m) in &self.terms {
            if j > 0 {
                push(coef * j as f64, j - 1, m + 1);
            }
            push(-2.0 * m as f64 * coef, j + 1, m);
        }
        out.retain(|t| t.0 != 0.0);
        Self { terms: out }
    }

    fn eval(&self, tanh: f64, sech2: f64) -> f64 {
        self.terms.iter().map(|&(coef, j, m)| coef * tanh.powi(j as i32) * sech2.powi(m as i32)).sum()
    }
}

/// Validated sech⁴ line soliton with cached derivative tables.
#[derive(Debug, Clone)]
pub struct LineSoliton {
    params: ModelParams,
    wave: LineWave,
    // D^k(S²) for k = 0..=MAX_PROFILE_ORDER
    shape: Vec<TanhSechPoly>,
}

impl LineSoliton {
    pub fn new(params: ModelParams, wave: LineWave) -> Result<Self> {
        params.require_soliton()?;
        let mut shape = vec![TanhSechPoly { terms: vec![(1.0, 0, 2)] }];
        for k in 1..=MAX_PROFILE_ORDER {
            let next = shape[k - 1].derive();
            shape.push(next);
        }
        Ok(Self { params, wave, shape })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn wave(&self) -> &LineWave {
        &self.wave
    }

    /// `ξ = x + μy − νt`.
    pub fn phase(&self, x: f64, y: f64, t: f64) -> f64 {
        x + self.wave.mu * y - self.wave.nu * t
    }

    fn half_arg(&self, xi: f64) -> (f64, f64) {
        let z = 0.5 * self.wave.r * xi;
        let cosh = z.cosh();
        (z.tanh(), 1.0 / (cosh * cosh))
    }

    pub fn profile(&self, xi: f64) -> f64 {
        let (_, s) = self.half_arg(xi);
        self.wave.p - self.wave.q * s * s
    }

    /// Exact `U^(order)(ξ)` for `order ≤ 6`.
    pub fn derivative(&self, order: usize, xi: f64) -> Result<f64> {
        if order > MAX_PROFILE_ORDER {
            return Err(KkpError::UnsupportedOrder(order, MAX_PROFILE_ORDER));
        }
        Ok(self.derivative_unchecked(order, xi))
    }

    fn derivative_unchecked(&self, order: usize, xi: f64) -> f64 {
        if order == 0 {
            return self.profile(xi);
        }
        let (t, s) = self.half_arg(xi);
        let scale = (0.5 * self.wave.r).powi(order as i32);
        -self.wave.q * scale * self.shape[order].eval(t, s)
    }

    /// All derivatives `U, U', …, U^(6)` at one point.
    pub fn derivatives(&self, xi: f64) -> [f64; MAX_PROFILE_ORDER + 1] {
        let (t, s) = self.half_arg(xi);
        let half_r = 0.5 * self.wave.r;
        let mut out = [0.0; MAX_PROFILE_ORDER + 1];
        out[0] = self.wave.p - self.wave.q * s * s;
        let mut scale = 1.0;
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            scale *= half_r;
            *slot = -self.wave.q * scale * self.shape[k].eval(t, s);
        }
        out
    }

    /// Potential `V(ξ) = pξ − (2q/r)(T − T³/3)`, normalized by `V(0) = 0`.
    pub fn potential(&self, xi: f64) -> f64 {
        let (t, _) = self.half_arg(xi);
        self.wave.p * xi - 2.0 * self.wave.q / self.wave.r * (t - t * t * t / 3.0)
    }

    /// `V^(n)(ξ)` for `n ≤ 7`: the potential itself for `n = 0`, `U^(n−1)` otherwise.
    pub fn potential_derivatives(&self, xi: f64) -> [f64; MAX_PROFILE_ORDER + 2] {
        let u = self.derivatives(xi);
        let mut out = [0.0; MAX_PROFILE_ORDER + 2];
        out[0] = self.potential(xi);
        out[1..].copy_from_slice(&u);
        out
    }

    /// Left side of `UU' − κU' + βU''' + U⁽⁵⁾ = 0`.
    pub fn ode_residual(&self, xi: f64) -> f64 {
        let d = self.derivatives(xi);
        d[0] * d[1] - self.wave.kappa * d[1] + self.params.beta * d[3] + d[5]
    }

    /// `∫ (U − p) dξ = −q ∫ sech⁴(rξ/2) dξ = −8q/(3r)`.
    pub fn excess_mass(&self) -> f64 {
        -8.0 * self.wave.q / (3.0 * self.wave.r)
    }
}
