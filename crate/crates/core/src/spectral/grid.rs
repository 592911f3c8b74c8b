//! Periodic box and its wavenumbers.

use crate::error::{KkpError, Result};
use std::f64::consts::PI;

/// `nx × ny` points on `[−lx/2, lx/2) × [−ly/2, ly/2)`, stored row-major with
/// `x` fastest: index `iy·nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid2D {
    /// `ny = 1` is accepted for the one-dimensional reduction; every other
    /// mode count must be even.
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 2 || !nx.is_multiple_of(2) {
            return Err(KkpError::InvalidArgument(format!("nx must be a positive even integer, got {nx}")));
        }
        if ny == 0 || (ny != 1 && !ny.is_multiple_of(2)) {
            return Err(KkpError::InvalidArgument(format!("ny must be a positive even integer (or 1), got {ny}")));
        }
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return Err(KkpError::InvalidArgument(format!("box lengths must be positive, got lx={lx}, ly={ly}")));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn x(&self, ix: usize) -> f64 {
        -0.5 * self.lx + ix as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        if self.ny == 1 {
            0.0
        } else {
            -0.5 * self.ly + iy as f64 * self.dy()
        }
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Signed mode number of FFT slot `i` for `n` points.
    pub fn mode(i: usize, n: usize) -> i64 {
        if i < n.div_ceil(2) {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn kx(&self, ix: usize) -> f64 {
        2.0 * PI * Self::mode(ix, self.nx) as f64 / self.lx
    }

    pub fn ky(&self, iy: usize) -> f64 {
        2.0 * PI * Self::mode(iy, self.ny) as f64 / self.ly
    }

    /// Slot `n/2` for even `n`; never present when `n = 1`.
    pub fn is_nyquist(i: usize, n: usize) -> bool {
        n.is_multiple_of(2) && i == n / 2
    }

    /// 2/3 rule: keep `3|j| < n`.
    pub fn within_two_thirds(i: usize, n: usize) -> bool {
        3 * Self::mode(i, n).unsigned_abs() < n as u64
    }

    /// Modes removed by the ∂x⁻¹ constraint: `kx = 0`, `ky ≠ 0`.
    pub fn is_constrained(&self, ix: usize, iy: usize) -> bool {
        ix == 0 && iy != 0
    }

    /// Sample points along x, convenient for 1D work.
    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|i| self.y(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Grid2D::new(8, 4, 1.0, 1.0).is_ok());
        assert!(Grid2D::new(8, 1, 1.0, 1.0).is_ok());
        assert!(Grid2D::new(7, 4, 1.0, 1.0).is_err());
        assert!(Grid2D::new(8, 3, 1.0, 1.0).is_err());
        assert!(Grid2D::new(8, 4, 0.0, 1.0).is_err());
        assert!(Grid2D::new(8, 4, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn modes_and_masks() {
        let modes: Vec<i64> = (0..8).map(|i| Grid2D::mode(i, 8)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!(Grid2D::is_nyquist(4, 8));
        let kept: Vec<bool> = (0..8).map(|i| Grid2D::within_two_thirds(i, 8)).collect();
        assert_eq!(kept, vec![true, true, true, false, false, false, true, true]);
        assert_eq!(Grid2D::mode(0, 1), 0);
        assert!(!Grid2D::is_nyquist(0, 1));
        let g = Grid2D::new(4, 2, 2.0 * PI, 4.0).unwrap();
        assert_eq!(g.kx(1), 1.0);
        assert_eq!(g.x(0), -PI);
        assert_eq!(g.y(1), 0.0);
    }
}
