//! Exact polynomials in `T = tanh(mξ)`.
//!
//! Differentiation uses `dT/dξ = m(1 − T²)`. A `k`-th derivative therefore
//! carries a factor `m^k`; only products whose derivative counts add up to an
//! even number are representable with rational coefficients in `m²`, and the
//! API refuses anything else.

use crate::error::{KkpError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

/// Polynomial in `T` with rational coefficients, lowest power first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TanhPoly {
    coeffs: Vec<Rational>,
}

impl TanhPoly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `T`
    pub fn t() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `1 − T² = sech²(mξ)`
    pub fn sech2() -> Self {
        Self::new(vec![Rational::one(), Rational::zero(), -Rational::one()])
    }

    /// `a₀ + a₁ sech² + a₂ sech⁴` written out in `T`.
    pub fn from_sech_series(coeffs: &[Rational]) -> Self {
        let s = Self::sech2();
        let mut power = Self::constant(Rational::one());
        let mut acc = Self::zero();
        for c in coeffs {
            acc = &acc + &power.scale(c);
            power = &power * &s;
        }
        acc
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> Rational {
        self.coeffs.get(power).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }

    /// `d/dT`
    pub fn d_dt(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c * int(j as i64)).collect())
    }

    /// `(1 − T²) d/dT`, i.e. `d/dξ` with the factor `m` stripped.
    pub fn reduced_derivative(&self) -> Self {
        &self.d_dt() * &Self::sech2()
    }

    fn reduced_derivative_n(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |acc, _| acc.reduced_derivative())
    }
}

fn m_power(m2: &Rational, order: usize) -> Result<Rational> {
    if order % 2 == 1 {
        return Err(KkpError::OddMPower(order));
    }
    let mut acc = Rational::one();
    for _ in 0..order / 2 {
        acc *= m2;
    }
    Ok(acc)
}

/// `d^order/dξ^order` of `poly`, for even `order` only.
pub fn tanh_derivative(poly: &TanhPoly, m2: &Rational, order: usize) -> Result<TanhPoly> {
    let factor = m_power(m2, order)?;
    Ok(poly.reduced_derivative_n(order).scale(&factor))
}

/// `(d^i a/dξ^i)(d^j b/dξ^j)` for `i + j` even; the two odd powers of `m` pair
/// into a power of `m²`.
pub fn derivative_product(a: &TanhPoly, i: usize, b: &TanhPoly, j: usize, m2: &Rational) -> Result<TanhPoly> {
    let factor = m_power(m2, i + j)?;
    Ok((&a.reduced_derivative_n(i) * &b.reduced_derivative_n(j)).scale(&factor))
}

impl Add for &TanhPoly {
    type Output = TanhPoly;
    fn add(self, rhs: &TanhPoly) -> TanhPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        TanhPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &TanhPoly {
    type Output = TanhPoly;
    fn sub(self, rhs: &TanhPoly) -> TanhPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        TanhPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &TanhPoly {
    type Output = TanhPoly;
    fn neg(self) -> TanhPoly {
        TanhPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &TanhPoly {
    type Output = TanhPoly;
    fn mul(self, rhs: &TanhPoly) -> TanhPoly {
        if self.is_zero() || rhs.is_zero() {
            return TanhPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TanhPoly::new(out)
    }
}

impl fmt::Display for TanhPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*T")?,
                _ => write!(f, "{mag}*T^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn second_derivative_of_t_squared() {
        let m2 = rat(3, 7);
        let t2 = TanhPoly::t().pow(2);
        let got = tanh_derivative(&t2, &m2, 2).unwrap();
        // 2m²(1 − T²)(1 − 3T²)
        let expected = (&TanhPoly::sech2() * &TanhPoly::new(vec![int(1), int(0), int(-3)])).scale(&(int(2) * &m2));
        assert_eq!(got, expected);
    }

    #[test]
    fn second_derivative_matches_numeric_chain_rule() {
        // T² = tanh²(mξ) with m = 0.8, checked against a finite difference at 5 points
        let m = 0.8f64;
        let m2 = rat(16, 25);
        let d2 = tanh_derivative(&TanhPoly::t().pow(2), &m2, 2).unwrap();
        let f = |xi: f64| (m * xi).tanh().powi(2);
        for xi in [-1.3, -0.4, 0.0, 0.6, 2.1] {
            let h = 1e-3;
            let fd = (-f(xi - 2.0 * h) + 16.0 * f(xi - h) - 30.0 * f(xi) + 16.0 * f(xi + h) - f(xi + 2.0 * h))
                / (12.0 * h * h);
            let exact = d2.eval_f64((m * xi).tanh());
            assert!((fd - exact).abs() < 1e-8, "xi={xi}: {fd} vs {exact}");
        }
    }

    #[test]
    fn trivial_derivatives() {
        let p = TanhPoly::new(vec![int(2), int(-1), rat(1, 3)]);
        assert_eq!(tanh_derivative(&p, &rat(5, 2), 0).unwrap(), p);
        let c = TanhPoly::constant(int(7));
        assert!(tanh_derivative(&c, &rat(5, 2), 2).unwrap().is_zero());
    }

    #[test]
    fn odd_orders_are_refused() {
        let p = TanhPoly::t();
        assert_eq!(tanh_derivative(&p, &int(1), 3).unwrap_err(), KkpError::OddMPower(3));
        assert!(derivative_product(&p, 1, &p, 2, &int(1)).is_err());
        assert!(derivative_product(&p, 1, &p, 3, &int(1)).is_ok());
    }

    #[test]
    fn sech_series_expansion() {
        let p = TanhPoly::from_sech_series(&[int(1), int(2), int(3)]);
        // 1 + 2(1 − T²) + 3(1 − T²)² = 6 − 8T² + 3T⁴
        assert_eq!(p, TanhPoly::new(vec![int(6), int(0), int(-8), int(0), int(3)]));
        assert_eq!(p.degree(), Some(4));
        assert_eq!(TanhPoly::zero().degree(), None);
        assert_eq!(p.to_string(), "3*T^4 - 8*T^2 + 6");
    }

    proptest! {
        #[test]
        fn product_rule_holds(a in proptest::collection::vec(-9i64..9, 0..5), b in proptest::collection::vec(-9i64..9, 0..5)) {
            let pa = TanhPoly::new(a.into_iter().map(int).collect());
            let pb = TanhPoly::new(b.into_iter().map(int).collect());
            let lhs = (&pa * &pb).reduced_derivative();
            let rhs = &(&pa.reduced_derivative() * &pb) + &(&pa * &pb.reduced_derivative());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
