//! Conserved integrals of a spectral state.

use crate::error::{KkpError, Result};
use crate::model::ModelParams;
use crate::spectral::{Fourier, Grid2D, SpectralState};
use num_complex::Complex64;

/// Allowed relative size of the `kx = 0, ky ≠ 0` content before [`dx_inv`]
/// refuses its input.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-8;

/// `f(t)` with its first three derivatives.
#[derive(Debug, Clone, Copy)]
pub struct FTriple {
    pub name: &'static str,
    pub eval: fn(f64) -> [f64; 4],
}

impl PartialEq for FTriple {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl FTriple {
    pub const ONE: FTriple = FTriple { name: "1", eval: |_| [1.0, 0.0, 0.0, 0.0] };
    pub const T: FTriple = FTriple { name: "t", eval: |t| [t, 1.0, 0.0, 0.0] };
    pub const T2: FTriple = FTriple { name: "t2", eval: |t| [t * t, 2.0 * t, 2.0, 0.0] };

    pub const BUILTIN: [FTriple; 3] = [Self::ONE, Self::T, Self::T2];

    pub fn at(&self, t: f64) -> [f64; 4] {
        (self.eval)(t)
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::BUILTIN
            .into_iter()
            .find(|f| f.name == name)
            .ok_or_else(|| KkpError::InvalidArgument(format!("unknown f {name:?}; expected 1, t or t2")))
    }
}

/// Spectral coefficients of `∂x⁻¹` applied to `û`: division by `i·kx`,
/// with every `kx = 0` slot set to zero.
pub fn dx_inv_hat(fourier: &Fourier, uhat: &[Complex64]) -> Result<Vec<Complex64>> {
    let total = fourier.rms(uhat);
    let constrained = fourier.constrained_rms(uhat);
    if total > 0.0 && constrained > CONSTRAINT_TOLERANCE * total {
        return Err(KkpError::ConstraintViolation(constrained / total));
    }
    let grid = fourier.grid();
    let mut out = vec![Complex64::default(); uhat.len()];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let kx = fourier.kx()[ix];
            if ix != 0 && !Grid2D::is_nyquist(ix, grid.nx) {
                let idx = grid.index(ix, iy);
                out[idx] = uhat[idx] / Complex64::new(0.0, kx);
            }
        }
    }
    Ok(out)
}

/// Zero-mean antiderivative in `x` of the field with coefficients `uhat`.
pub fn dx_inv(fourier: &Fourier, uhat: &[Complex64]) -> Result<Vec<f64>> {
    Ok(fourier.inverse(&dx_inv_hat(fourier, uhat)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub mass_y: f64,
    pub px: f64,
    pub py: f64,
    pub energy: f64,
    /// `Mˣ/M`; `None` when the mass vanishes.
    pub chi_m: Option<f64>,
    pub pxy: f64,
    pub mass_x: f64,
    /// Named extra integrals, in insertion order.
    pub aux: Vec<(String, f64)>,
    pub scales: DriftScales,
}

/// Integrals of the absolute values of each density term, the natural
/// scale for drift of the corresponding conserved quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DriftScales {
    pub mass: f64,
    pub mass_y: f64,
    pub px: f64,
    pub py: f64,
    pub energy: f64,
}

impl DiagnosticsRecord {
    pub fn aux(&self, name: &str) -> Option<f64> {
        self.aux.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// `χ_{Pˣ} = P^{x,y}/Pˣ`.
    pub fn chi_px(&self) -> Option<f64> {
        (self.px != 0.0).then(|| self.pxy / self.px)
    }
}

/// Fields shared by every integral.
pub(crate) struct Fields {
    pub u: Vec<f64>,
    pub ux: Vec<f64>,
    pub uxx: Vec<f64>,
    /// `∂x⁻¹u_y`
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub cell: f64,
}

impl Fields {
    pub fn new(fourier: &Fourier, state: &SpectralState) -> Result<Self> {
        let grid = *fourier.grid();
        let uhat = &state.uhat;
        let uy_hat = fourier.derivative_hat(uhat, 0, 1);
        let w = dx_inv(fourier, &uy_hat)?;
        let mut x = Vec::with_capacity(grid.len());
        let mut y = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                x.push(grid.x(ix));
                y.push(grid.y(iy));
            }
        }
        Ok(Self {
            u: fourier.inverse(uhat),
            ux: fourier.derivative(uhat, 1, 0),
            uxx: fourier.derivative(uhat, 2, 0),
            w,
            x,
            y,
            cell: grid.dx() * if grid.ny == 1 { 1.0 } else { grid.dy() },
        })
    }

    /// `∫ g` over the box.
    pub fn integrate(&self, g: impl Fn(usize) -> f64) -> f64 {
        (0..self.u.len()).map(g).sum::<f64>() * self.cell
    }
}

/// `(Pˣ[f], Pʸ[f])` in their integrated-by-parts form.
pub(crate) fn momenta_from_fields(fields: &Fields, params: &ModelParams, f: &FTriple, t: f64) -> (f64, f64) {
    let [f0, f1, f2, _] = f.at(t);
    let sigma = params.sigma.value();
    let Fields { u, w, x, y, .. } = fields;
    let pxf = fields.integrate(|i| 0.5 * f0 * u[i] * u[i] - f1 * x[i] * u[i]);
    let pyf =
        fields.integrate(|i| 0.5 * (f0 * u[i] * w[i] + y[i] / sigma * (0.5 * f1 * u[i] * u[i] - f2 * x[i] * u[i])));
    (pxf, pyf)
}

/// All conserved integrals of `state`; `momenta` adds `PxF_<name>` and
/// `PyF_<name>` entries to `aux`.
pub fn conserved_integrals_with(
    fourier: &Fourier,
    state: &SpectralState,
    params: &ModelParams,
    momenta: &[FTriple],
) -> Result<DiagnosticsRecord> {
    let fl = Fields::new(fourier, state)?;
    let beta = params.beta;
    let sigma = params.sigma.value();
    let Fields { u, ux, uxx, w, x, y, .. } = &fl;
    let mass = fl.integrate(|i| u[i]);
    let mass_x = fl.integrate(|i| x[i] * u[i]);
    let abs_mass = fl.integrate(|i| u[i].abs());
    let mut aux = Vec::new();
    for f in momenta {
        let (pxf, pyf) = momenta_from_fields(&fl, params, f, state.t);
        aux.push((format!("PxF_{}", f.name), pxf));
        aux.push((format!("PyF_{}", f.name), pyf));
    }
    Ok(DiagnosticsRecord {
        t: state.t,
        mass,
        mass_y: fl.integrate(|i| y[i] * u[i]),
        px: fl.integrate(|i| 0.5 * u[i] * u[i]),
        py: fl.integrate(|i| 0.5 * u[i] * w[i]),
        energy: fl.integrate(|i| {
            0.5 * (uxx[i] * uxx[i] - beta * ux[i] * ux[i] - sigma * w[i] * w[i] + u[i] * u[i] * u[i] / 3.0)
        }),
        chi_m: (mass.abs() > 1e-12 * abs_mass).then(|| mass_x / mass),
        pxy: fl.integrate(|i| 0.5 * y[i] * u[i] * u[i]),
        mass_x,
        aux,
        scales: DriftScales {
            mass: abs_mass,
            mass_y: fl.integrate(|i| (y[i] * u[i]).abs()),
            px: fl.integrate(|i| 0.5 * u[i] * u[i]),
            py: fl.integrate(|i| 0.5 * (u[i] * w[i]).abs()),
            energy: fl.integrate(|i| {
                0.5 * (uxx[i] * uxx[i] + beta.abs() * ux[i] * ux[i] + w[i] * w[i] + (u[i] * u[i] * u[i]).abs() / 3.0)
            }),
        },
    })
}

pub fn conserved_integrals(state: &SpectralState, params: &ModelParams) -> Result<DiagnosticsRecord> {
    conserved_integrals_with(&Fourier::new(state.grid), state, params, &[])
}

/// `(Pˣ[f], Pʸ[f])` with `f` evaluated at `state.t`.
pub fn generalized_momenta(
    fourier: &Fourier,
    state: &SpectralState,
    params: &ModelParams,
    f: &FTriple,
) -> Result<(f64, f64)> {
    let fields = Fields::new(fourier, state)?;
    Ok(momenta_from_fields(&fields, params, f, state.t))
}

/// `max|Q(t) − Q(0)|` over the scale `max_t Σ|parts|`, where `parts` are the
/// constituent integrals of `Q` at each sample.
pub fn relative_drift(values: &[f64], scales: &[f64]) -> f64 {
    let Some(first) = values.first() else { return 0.0 };
    let change = values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max);
    let scale = scales.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        change
    } else {
        change / scale
    }
}
