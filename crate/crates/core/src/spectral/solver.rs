//! Integrating-factor RK4 for `û_t = L(k)û + N(û)`.

use super::fft::Fourier;
use super::grid::Grid2D;
use crate::error::{KkpError, Result};
use crate::model::ModelParams;
use num_complex::Complex64;

/// Imaginary part of the linear symbol: `û_t = i·linear_symbol·û`.
pub fn linear_symbol(params: &ModelParams, kx: f64, ky: f64) -> f64 {
    if kx == 0.0 {
        return 0.0;
    }
    let kx3 = kx * kx * kx;
    params.beta * kx3 - kx3 * kx * kx + params.sigma.value() * ky * ky / kx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Kkp2d,
    Kawahara1d,
}

impl std::str::FromStr for Mode {
    type Err = KkpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kkp2d" => Ok(Mode::Kkp2d),
            "kawahara1d" => Ok(Mode::Kawahara1d),
            other => Err(KkpError::InvalidArgument(format!("mode must be kkp2d or kawahara1d, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Kkp2d => "kkp2d",
            Mode::Kawahara1d => "kawahara1d",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub params: ModelParams,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub snapshot_every: usize,
    pub mode: Mode,
    /// Switch for the advection term; off gives pure linear propagation.
    pub nonlinear: bool,
}

impl SolverConfig {
    pub fn new(params: ModelParams, dt: f64, t_end: f64) -> Self {
        Self { params, dt, t_end, dealias: true, snapshot_every: 100, mode: Mode::Kkp2d, nonlinear: true }
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(KkpError::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(KkpError::InvalidArgument(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.snapshot_every == 0 {
            return Err(KkpError::InvalidArgument("snapshot_every must be positive".into()));
        }
        match (self.mode, grid.ny) {
            (Mode::Kawahara1d, 1) => Ok(()),
            (Mode::Kawahara1d, ny) => Err(KkpError::InvalidArgument(format!("kawahara1d requires ny = 1, got {ny}"))),
            (Mode::Kkp2d, 1) => Err(KkpError::InvalidArgument("kkp2d requires an even ny >= 2".into())),
            (Mode::Kkp2d, _) => Ok(()),
        }
    }

    /// Number of steps to reach `t_end`; the last one is shortened if `dt`
    /// does not divide `t_end`.
    pub fn step_count(&self) -> usize {
        if self.t_end == 0.0 {
            return 0;
        }
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}

/// Fourier coefficients of `u` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub grid: Grid2D,
    pub uhat: Vec<Complex64>,
    pub t: f64,
    pub step: usize,
}

impl SpectralState {
    /// Transforms `field`, zeroes Nyquist slots and the `kx = 0, ky ≠ 0`
    /// modes, and returns the RMS amplitude removed by the latter.
    pub fn from_field(fourier: &Fourier, field: &[f64], t: f64) -> Result<(Self, f64)> {
        let grid = *fourier.grid();
        if field.len() != grid.len() {
            return Err(KkpError::InvalidArgument(format!(
                "field has {} samples, grid expects {}",
                field.len(),
                grid.len()
            )));
        }
        if field.iter().any(|v| !v.is_finite()) {
            return Err(KkpError::InvalidArgument("initial field has non-finite samples".into()));
        }
        let mut uhat = fourier.forward(field);
        let removed = fourier.constrained_rms(&uhat);
        project(&grid, &mut uhat);
        Ok((Self { grid, uhat, t, step: 0 }, removed))
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, uhat: vec![Complex64::default(); grid.len()], t: 0.0, step: 0 }
    }

    pub fn field(&self, fourier: &Fourier) -> Vec<f64> {
        fourier.inverse(&self.uhat)
    }

    pub fn max_abs(&self) -> f64 {
        self.uhat.iter().fold(0.0, |m: f64, c| {
            let a = c.norm();
            if a.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(a)
            }
        })
    }

    pub fn is_finite(&self) -> bool {
        self.uhat.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `Σ|û|²`, proportional to `∫u²`.
    pub fn spectral_energy(&self) -> f64 {
        self.uhat.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Zeroes Nyquist slots and the `kx = 0, ky ≠ 0` modes.
pub fn project(grid: &Grid2D, uhat: &mut [Complex64]) {
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if grid.is_constrained(ix, iy) || Grid2D::is_nyquist(ix, grid.nx) || Grid2D::is_nyquist(iy, grid.ny) {
                uhat[grid.index(ix, iy)] = Complex64::default();
            }
        }
    }
}

pub struct Solver {
    config: SolverConfig,
    fourier: Fourier,
    /// `L/i` per mode.
    symbol: Vec<f64>,
    /// Modes kept in the nonlinear term.
    keep: Vec<bool>,
    /// `(exp(L dt/2), exp(L dt))` for the configured `dt`.
    propagators: (Vec<Complex64>, Vec<Complex64>),
}

impl Solver {
    pub fn new(config: SolverConfig, grid: Grid2D) -> Result<Self> {
        config.validate(&grid)?;
        let fourier = Fourier::new(grid);
        let mut symbol = vec![0.0; grid.len()];
        let mut keep = vec![false; grid.len()];
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let idx = grid.index(ix, iy);
                let ky = if config.mode == Mode::Kawahara1d { 0.0 } else { fourier.ky()[iy] };
                symbol[idx] = linear_symbol(&config.params, fourier.kx()[ix], ky);
                let spectral_ok = !grid.is_constrained(ix, iy)
                    && !Grid2D::is_nyquist(ix, grid.nx)
                    && !Grid2D::is_nyquist(iy, grid.ny);
                let dealias_ok = !config.dealias
                    || (Grid2D::within_two_thirds(ix, grid.nx) && Grid2D::within_two_thirds(iy, grid.ny));
                keep[idx] = spectral_ok && dealias_ok;
            }
        }
        let mut solver = Self { config, fourier, symbol, keep, propagators: (Vec::new(), Vec::new()) };
        solver.propagators = solver.propagators_for(config.dt);
        Ok(solver)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn fourier(&self) -> &Fourier {
        &self.fourier
    }

    pub fn grid(&self) -> &Grid2D {
        self.fourier.grid()
    }

    fn propagators_for(&self, dt: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let half = self.symbol.iter().map(|s| Complex64::from_polar(1.0, s * 0.5 * dt)).collect();
        let full = self.symbol.iter().map(|s| Complex64::from_polar(1.0, s * dt)).collect();
        (half, full)
    }

    /// Fourier coefficients of `−½(u²)_x`, masked.
    pub fn nonlinear_rhs(&self, uhat: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); uhat.len()];
        if !self.config.nonlinear {
            return out;
        }
        let u = self.fourier.inverse(uhat);
        let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
        let sq_hat = self.fourier.forward(&sq);
        let nx = self.grid().nx;
        for (idx, o) in out.iter_mut().enumerate() {
            if self.keep[idx] {
                let kx = self.fourier.kx()[idx % nx];
                *o = Complex64::new(0.0, -0.5 * kx) * sq_hat[idx];
            }
        }
        out
    }

    /// Advances `state` by `dt`.
    pub fn step(&self, state: &mut SpectralState, dt: f64) -> Result<()> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(KkpError::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        let owned;
        let (e, e2) = if dt == self.config.dt {
            (&self.propagators.0, &self.propagators.1)
        } else {
            owned = self.propagators_for(dt);
            (&owned.0, &owned.1)
        };
        let u = &state.uhat;
        let n = u.len();
        let scaled = |v: Vec<Complex64>| -> Vec<Complex64> { v.into_iter().map(|c| c * dt).collect() };

        let a = scaled(self.nonlinear_rhs(u));
        let stage: Vec<Complex64> = (0..n).map(|i| e[i] * (u[i] + 0.5 * a[i])).collect();
        let b = scaled(self.nonlinear_rhs(&stage));
        let stage: Vec<Complex64> = (0..n).map(|i| e[i] * u[i] + 0.5 * b[i]).collect();
        let c = scaled(self.nonlinear_rhs(&stage));
        let stage: Vec<Complex64> = (0..n).map(|i| e2[i] * u[i] + e[i] * c[i]).collect();
        let d = scaled(self.nonlinear_rhs(&stage));

        let next: Vec<Complex64> =
            (0..n).map(|i| e2[i] * u[i] + (e2[i] * a[i] + 2.0 * e[i] * (b[i] + c[i]) + d[i]) / 6.0).collect();
        state.uhat = next;
        state.step += 1;
        state.t += dt;
        if !state.is_finite() {
            return Err(KkpError::Divergence { step: state.step, max_abs: state.max_abs() });
        }
        Ok(())
    }

    /// `u_t` implied by the equation at this state, in physical space.
    pub fn time_derivative(&self, state: &SpectralState) -> Vec<f64> {
        let nl = self.nonlinear_rhs(&state.uhat);
        let rhs: Vec<Complex64> =
            state.uhat.iter().zip(&nl).zip(&self.symbol).map(|((u, n), s)| Complex64::new(0.0, *s) * u + n).collect();
        self.fourier.inverse(&rhs)
    }
}

/// Max-norm of `−ν u_x + u u_x + β u_xxx + u_xxxxx − σ ∂x⁻¹u_yy`, which
/// vanishes when `u` is a profile travelling with phase velocity `ν` along
/// `ξ = x + μy − νt`.
pub fn travelling_wave_residual(fourier: &Fourier, state: &SpectralState, params: &ModelParams, nu: f64) -> f64 {
    let uhat = &state.uhat;
    let u = fourier.inverse(uhat);
    let ux = fourier.derivative(uhat, 1, 0);
    let uxxx = fourier.derivative(uhat, 3, 0);
    let u5 = fourier.derivative(uhat, 5, 0);
    let grid = fourier.grid();
    let mut nonlocal = fourier.derivative_hat(uhat, 0, 2);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let idx = grid.index(ix, iy);
            let kx = fourier.kx()[ix];
            nonlocal[idx] = if kx == 0.0 { Complex64::default() } else { nonlocal[idx] / Complex64::new(0.0, kx) };
        }
    }
    let nonlocal = fourier.inverse(&nonlocal);
    let sigma = params.sigma.value();
    (0..u.len())
        .map(|i| (-nu * ux[i] + u[i] * ux[i] + params.beta * uxxx[i] + u5[i] - sigma * nonlocal[i]).abs())
        .fold(0.0, f64::max)
}
