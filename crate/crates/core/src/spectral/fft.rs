//! Two-dimensional transforms and spectral derivatives on a [`Grid2D`].

use super::grid::Grid2D;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Cached FFT plans plus wavenumber tables for one grid.
///
/// Forward transforms are unnormalized; inverse transforms divide by
/// `nx·ny`, so `û(0,0)/(nx·ny)` is the mean of `u`.
#[derive(Clone)]
pub struct Fourier {
    grid: Grid2D,
    fx: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("grid", &self.grid).finish()
    }
}

impl Fourier {
    pub fn new(grid: Grid2D) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            fx: planner.plan_fft_forward(grid.nx),
            ix: planner.plan_fft_inverse(grid.nx),
            fy: planner.plan_fft_forward(grid.ny),
            iy: planner.plan_fft_inverse(grid.ny),
            kx: (0..grid.nx).map(|i| grid.kx(i)).collect(),
            ky: (0..grid.ny).map(|i| grid.ky(i)).collect(),
            grid,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn kx(&self) -> &[f64] {
        &self.kx
    }

    pub fn ky(&self) -> &[f64] {
        &self.ky
    }

    fn transform(&self, data: &mut [Complex64], along_x: &dyn Fft<f64>, along_y: &dyn Fft<f64>) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        along_x.process(data);
        if ny > 1 {
            let mut column = vec![Complex64::default(); ny];
            for ix in 0..nx {
                for iy in 0..ny {
                    column[iy] = data[iy * nx + ix];
                }
                along_y.process(&mut column);
                for iy in 0..ny {
                    data[iy * nx + ix] = column[iy];
                }
            }
        }
    }

    pub fn forward_complex(&self, data: &mut [Complex64]) {
        self.transform(data, self.fx.as_ref(), self.fy.as_ref());
    }

    pub fn inverse_complex(&self, data: &mut [Complex64]) {
        self.transform(data, self.ix.as_ref(), self.iy.as_ref());
        let scale = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    pub fn forward(&self, field: &[f64]) -> Vec<Complex64> {
        assert_eq!(field.len(), self.grid.len(), "field size does not match grid");
        let mut data: Vec<Complex64> = field.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_complex(&mut data);
        data
    }

    /// Real part of the inverse transform.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut data = spectrum.to_vec();
        self.inverse_complex(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Largest imaginary part left by the inverse transform.
    pub fn imag_residue(&self, spectrum: &[Complex64]) -> f64 {
        let mut data = spectrum.to_vec();
        self.inverse_complex(&mut data);
        data.iter().fold(0.0, |m, c| m.max(c.im.abs()))
    }

    /// `(i kx)^a (i ky)^b û`, with Nyquist slots zeroed for odd total order.
    pub fn derivative_hat(&self, spectrum: &[Complex64], a: u32, b: u32) -> Vec<Complex64> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = spectrum.to_vec();
        for iy in 0..ny {
            for ix in 0..nx {
                let idx = iy * nx + ix;
                let odd_x = a % 2 == 1 && Grid2D::is_nyquist(ix, nx);
                let odd_y = b % 2 == 1 && Grid2D::is_nyquist(iy, ny);
                if odd_x || odd_y {
                    out[idx] = Complex64::default();
                    continue;
                }
                let factor = Complex64::new(0.0, self.kx[ix]).powu(a) * Complex64::new(0.0, self.ky[iy]).powu(b);
                out[idx] *= factor;
            }
        }
        out
    }

    /// Physical-space `∂x^a ∂y^b u`.
    pub fn derivative(&self, spectrum: &[Complex64], a: u32, b: u32) -> Vec<f64> {
        self.inverse(&self.derivative_hat(spectrum, a, b))
    }

    /// Root-mean-square amplitude carried by the `kx = 0, ky ≠ 0` slots.
    pub fn constrained_rms(&self, spectrum: &[Complex64]) -> f64 {
        let n = self.grid.len() as f64;
        let nx = self.grid.nx;
        let sum: f64 = (1..self.grid.ny).map(|iy| spectrum[iy * nx].norm_sqr()).sum();
        sum.sqrt() / n
    }

    /// Root-mean-square amplitude of the whole field.
    pub fn rms(&self, spectrum: &[Complex64]) -> f64 {
        let n = self.grid.len() as f64;
        spectrum.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() / n
    }

    /// Mean over the box times its area.
    pub fn integral(&self, field: &[f64]) -> f64 {
        field.iter().sum::<f64>() * self.grid.dx() * if self.grid.ny == 1 { 1.0 } else { self.grid.dy() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(g: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; g.len()];
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                out[g.index(ix, iy)] = f(g.x(ix), g.y(iy));
            }
        }
        out
    }

    #[test]
    fn round_trip_and_mean() {
        let g = Grid2D::new(16, 8, 3.0, 5.0).unwrap();
        let fr = Fourier::new(g);
        let u = sample(&g, |x, y| 0.3 + (2.0 * PI * x / 3.0).sin() * (2.0 * PI * y / 5.0).cos());
        let uh = fr.forward(&u);
        assert!((uh[0].re / g.len() as f64 - 0.3).abs() < 1e-14);
        let back = fr.inverse(&uh);
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(fr.imag_residue(&uh) < 1e-14);
    }

    #[test]
    fn spectral_derivatives() {
        let g = Grid2D::new(32, 16, 2.0 * PI, 4.0 * PI).unwrap();
        let fr = Fourier::new(g);
        let u = sample(&g, |x, y| (3.0 * x).sin() * (0.5 * y).cos());
        let uh = fr.forward(&u);
        let ux = fr.derivative(&uh, 1, 0);
        let uxyy = fr.derivative(&uh, 1, 2);
        let expected_x = sample(&g, |x, y| 3.0 * (3.0 * x).cos() * (0.5 * y).cos());
        let expected_xyy = sample(&g, |x, y| -0.75 * (3.0 * x).cos() * (0.5 * y).cos());
        for i in 0..g.len() {
            assert!((ux[i] - expected_x[i]).abs() < 1e-12);
            assert!((uxyy[i] - expected_xyy[i]).abs() < 1e-12);
        }
        assert!((fr.integral(&u)).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_grid() {
        let g = Grid2D::new(16, 1, 2.0 * PI, 1.0).unwrap();
        let fr = Fourier::new(g);
        let u: Vec<f64> = g.xs().iter().map(|x| (2.0 * x).cos()).collect();
        let d2 = fr.derivative(&fr.forward(&u), 2, 0);
        for (x, d) in g.xs().iter().zip(&d2) {
            assert!((d + 4.0 * (2.0 * x).cos()).abs() < 1e-12);
        }
    }
}
