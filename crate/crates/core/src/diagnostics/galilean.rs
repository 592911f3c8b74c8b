//! Centre-of-mass and momentum-centre velocities.

use super::integrals::DiagnosticsRecord;
use crate::error::{KkpError, Result};
use crate::model::Sigma;

/// Least-squares line `y ≈ a + b·t`; returns `(a, b, max |residual|)`.
pub fn linear_fit(t: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if t.len() != y.len() || t.len() < 3 {
        return Err(KkpError::Degenerate(format!("need at least 3 samples, got {}", t.len().min(y.len()))));
    }
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|ti| (ti - tm) * (ti - tm)).sum();
    if stt == 0.0 {
        return Err(KkpError::Degenerate("all samples share one time".into()));
    }
    let sty: f64 = t.iter().zip(y).map(|(ti, yi)| (ti - tm) * (yi - ym)).sum();
    let b = sty / stt;
    let a = ym - b * tm;
    let worst = t.iter().zip(y).map(|(ti, yi)| (yi - a - b * ti).abs()).fold(0.0, f64::max);
    Ok((a, b, worst))
}

fn relative(value: f64, target: f64) -> f64 {
    if target == 0.0 {
        (value - target).abs()
    } else {
        ((value - target) / target).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalileanReport {
    /// Fitted `dχ_M/dt`.
    pub chi_m_slope: f64,
    /// Time-averaged `Pˣ/M`.
    pub chi_m_target: f64,
    pub chi_m_deviation: f64,
    /// Largest residual of the affine fit of `χ_M`, relative to its range.
    pub chi_m_nonlinearity: f64,
    /// Fitted `dχ_{Pˣ}/dt`.
    pub chi_px_slope: f64,
    /// Time-averaged `−2σPʸ/Pˣ`.
    pub chi_px_target: f64,
    /// Relative deviation, or absolute when the target is zero.
    pub chi_px_deviation: f64,
}

pub fn galilean_relations(series: &[DiagnosticsRecord], sigma: Sigma) -> Result<GalileanReport> {
    if series.len() < 3 {
        return Err(KkpError::Degenerate(format!("need at least 3 samples, got {}", series.len())));
    }
    let t: Vec<f64> = series.iter().map(|r| r.t).collect();
    let chi_m: Vec<f64> = series
        .iter()
        .map(|r| r.chi_m.ok_or_else(|| KkpError::Degenerate(format!("mass vanishes at t = {}", r.t))))
        .collect::<Result<_>>()?;
    let chi_px: Vec<f64> = series
        .iter()
        .map(|r| r.chi_px().ok_or_else(|| KkpError::Degenerate(format!("Px vanishes at t = {}", r.t))))
        .collect::<Result<_>>()?;
    let n = series.len() as f64;
    let chi_m_target = series.iter().map(|r| r.px / r.mass).sum::<f64>() / n;
    let chi_px_target = series.iter().map(|r| -2.0 * sigma.value() * r.py / r.px).sum::<f64>() / n;

    let (_, chi_m_slope, worst) = linear_fit(&t, &chi_m)?;
    let range =
        chi_m.iter().copied().fold(f64::NEG_INFINITY, f64::max) - chi_m.iter().copied().fold(f64::INFINITY, f64::min);
    let (_, chi_px_slope, _) = linear_fit(&t, &chi_px)?;
    Ok(GalileanReport {
        chi_m_slope,
        chi_m_target,
        chi_m_deviation: relative(chi_m_slope, chi_m_target),
        chi_m_nonlinearity: if range > 0.0 { worst / range } else { worst },
        chi_px_slope,
        chi_px_target,
        chi_px_deviation: relative(chi_px_slope, chi_px_target),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64, mass: f64, mass_x: f64, px: f64, py: f64, pxy: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            mass,
            mass_y: 0.0,
            px,
            py,
            energy: 0.0,
            chi_m: Some(mass_x / mass),
            pxy,
            mass_x,
            aux: Vec::new(),
            scales: Default::default(),
        }
    }

    #[test]
    fn fit_recovers_line() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = t.iter().map(|t| 2.0 - 0.5 * t).collect();
        let (a, b, worst) = linear_fit(&t, &y).unwrap();
        assert!((a - 2.0).abs() < 1e-15 && (b + 0.5).abs() < 1e-15 && worst < 1e-15);
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn consistent_series_has_no_deviation() {
        // M = 2, Px = −1 → χ_M moves at −1/2
        let series: Vec<_> = (0..5)
            .map(|k| {
                let t = k as f64;
                record(t, 2.0, 2.0 * (0.3 - 0.5 * t), -1.0, 0.25, -0.5 * t)
            })
            .collect();
        let rep = galilean_relations(&series, Sigma::Plus).unwrap();
        assert!(rep.chi_m_deviation < 1e-14);
        assert!(rep.chi_m_nonlinearity < 1e-14);
        assert!((rep.chi_px_target - 0.5).abs() < 1e-15);
        assert!((rep.chi_px_slope - 0.5).abs() < 1e-14);
        assert!(rep.chi_px_deviation < 1e-13);
    }

    #[test]
    fn time_reversal_negates_slopes() {
        let series: Vec<_> = (0..5).map(|k| record(k as f64, 1.0, 0.7 * k as f64, 2.0, 0.0, 3.0 + k as f64)).collect();
        let reversed: Vec<_> = series.iter().map(|r| DiagnosticsRecord { t: -r.t, ..r.clone() }).collect();
        let a = galilean_relations(&series, Sigma::Plus).unwrap();
        let b = galilean_relations(&reversed, Sigma::Plus).unwrap();
        assert!((a.chi_m_slope + b.chi_m_slope).abs() < 1e-14);
        assert!((a.chi_px_slope + b.chi_px_slope).abs() < 1e-14);
    }

    #[test]
    fn vanishing_mass_is_degenerate() {
        let mut series: Vec<_> = (0..3).map(|k| record(k as f64, 1.0, 0.0, 1.0, 0.0, 0.0)).collect();
        series[1].chi_m = None;
        assert!(galilean_relations(&series, Sigma::Minus).is_err());
    }
}
