use std::ops::{Add, Mul, Sub};

use super::{Domain, Poly, RationalFn, C64, ZERO};
use crate::error::{Error, Result};

/// Laurent polynomial `sum_k coeffs[k] z^(lo + k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    lo: i32,
    coeffs: Vec<C64>,
}

impl LaurentPoly {
    /// Strips exactly-zero coefficients from both ends.
    pub fn new(lo: i32, coeffs: Vec<C64>) -> Self {
        let first = coeffs.iter().position(|c| *c != ZERO);
        match first {
            None => LaurentPoly::zero(),
            Some(first) => {
                let last = coeffs.iter().rposition(|c| *c != ZERO).unwrap();
                LaurentPoly {
                    lo: lo + first as i32,
                    coeffs: coeffs[first..=last].to_vec(),
                }
            }
        }
    }

    pub fn from_real(lo: i32, coeffs: &[f64]) -> Self {
        LaurentPoly::new(lo, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn from_poly(p: &Poly) -> Self {
        LaurentPoly::new(0, p.coeffs().to_vec())
    }

    pub fn zero() -> Self {
        LaurentPoly { lo: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        LaurentPoly::new(0, vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest power present (meaningless for the zero polynomial).
    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`.
    pub fn coeff(&self, n: i32) -> C64 {
        let k = n - self.lo;
        if k < 0 {
            ZERO
        } else {
            self.coeffs.get(k as usize).copied().unwrap_or(ZERO)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `z^(-lo) * self` as an ordinary polynomial.
    pub fn shifted_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if self.is_zero() {
            return Ok(ZERO);
        }
        if self.lo < 0 && z == ZERO {
            return Err(Error::PoleAtEvaluationPoint(z));
        }
        Ok(self.shifted_poly().eval(z) * z.powi(self.lo))
    }

    pub fn adjoint(&self, d: Domain) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        match d {
            Domain::Disc => LaurentPoly::new(-self.hi(), self.coeffs.iter().rev().map(|c| c.conj()).collect()),
            Domain::Line => LaurentPoly::new(self.lo, self.coeffs.iter().map(|c| c.conj()).collect()),
        }
    }

    pub fn scale(&self, c: C64) -> LaurentPoly {
        LaurentPoly::new(self.lo, self.coeffs.iter().map(|&x| x * c).collect())
    }

    pub fn to_rational(&self) -> Result<RationalFn> {
        RationalFn::from_laurent(self)
    }

    fn combine(&self, rhs: &LaurentPoly, sign: f64) -> LaurentPoly {
        if self.is_zero() {
            return rhs.scale(C64::new(sign, 0.0));
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        LaurentPoly::new(lo, (lo..=hi).map(|n| self.coeff(n) + rhs.coeff(n) * sign).collect())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let p = &self.shifted_poly() * &rhs.shifted_poly();
        LaurentPoly::new(self.lo + rhs.lo, p.into_coeffs())
    }
}
