use std::ops::{Add, Mul, Neg, Sub};

use super::{match_pairs, Domain, LaurentPoly, Poly, C64, EPS_CANCEL, EPS_EVAL, EPS_TRIM, ONE, ZERO};
use crate::error::{Error, Result};

/// Scalar rational function `gain * z^shift * prod(z - zeros) / prod(z - poles)`.
///
/// Zeros and poles are finite and nonzero; roots at the origin live in
/// `shift`. After construction no zero lies within `EPS_CANCEL` (relative)
/// of a pole. [`num`](Self::num) and [`den`](Self::den) give the coefficient
/// view with a monic denominator.
#[derive(Clone, Debug)]
pub struct RationalFn {
    gain: C64,
    shift: i32,
    zeros: Vec<C64>,
    poles: Vec<C64>,
}

impl RationalFn {
    pub fn zero() -> Self {
        RationalFn {
            gain: ZERO,
            shift: 0,
            zeros: Vec::new(),
            poles: Vec::new(),
        }
    }

    pub fn constant(c: C64) -> Self {
        RationalFn::from_parts(c, 0, Vec::new(), Vec::new())
    }

    pub fn one() -> Self {
        RationalFn::constant(ONE)
    }

    /// `z^k`.
    pub fn monomial(k: i32) -> Self {
        RationalFn::from_parts(ONE, k, Vec::new(), Vec::new())
    }

    /// Builds and normalizes: origin roots are folded into the shift and
    /// zero/pole pairs closer than `EPS_CANCEL` are cancelled.
    pub fn from_parts(gain: C64, mut shift: i32, zeros: Vec<C64>, poles: Vec<C64>) -> Self {
        if gain == ZERO || !gain.re.is_finite() || !gain.im.is_finite() {
            return RationalFn::zero();
        }
        let mut nz = Vec::with_capacity(zeros.len());
        for r in zeros {
            if r == ZERO {
                shift += 1;
            } else {
                nz.push(r);
            }
        }
        let mut np = Vec::with_capacity(poles.len());
        for p in poles {
            if p == ZERO {
                shift -= 1;
            } else {
                np.push(p);
            }
        }
        let pairs = match_pairs(&nz, &np, EPS_CANCEL);
        if !pairs.is_empty() {
            let mut drop_z = vec![false; nz.len()];
            let mut drop_p = vec![false; np.len()];
            for (i, j) in pairs {
                drop_z[i] = true;
                drop_p[j] = true;
            }
            nz = keep(&nz, &drop_z);
            np = keep(&np, &drop_p);
        }
        // near-origin roots against the power of z
        while shift < 0 {
            match nz.iter().position(|r| r.norm() <= EPS_CANCEL) {
                Some(i) => {
                    nz.remove(i);
                    shift += 1;
                }
                None => break,
            }
        }
        while shift > 0 {
            match np.iter().position(|p| p.norm() <= EPS_CANCEL) {
                Some(i) => {
                    np.remove(i);
                    shift -= 1;
                }
                None => break,
            }
        }
        RationalFn {
            gain,
            shift,
            zeros: nz,
            poles: np,
        }
    }

    pub fn from_poly(p: &Poly) -> Result<Self> {
        if p.is_zero() {
            return Ok(RationalFn::zero());
        }
        let k = p.low_order();
        let q = p.unshift(k);
        let zeros = q.roots()?;
        Ok(RationalFn::from_parts(q.leading(), k as i32, zeros, Vec::new()))
    }

    pub fn from_laurent(l: &LaurentPoly) -> Result<Self> {
        if l.is_zero() {
            return Ok(RationalFn::zero());
        }
        let r = RationalFn::from_poly(&l.shifted_poly())?;
        Ok(r.mul_monomial(l.lo()))
    }

    pub fn from_num_den(num: &Poly, den: &Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let n = RationalFn::from_poly(num)?;
        let d = RationalFn::from_poly(den)?;
        n.div(&d)
    }

    pub fn gain(&self) -> C64 {
        self.gain
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        self.gain == ZERO
    }

    pub fn is_polynomial(&self) -> bool {
        self.is_zero() || (self.poles.is_empty() && self.shift >= 0)
    }

    /// Numerator polynomial (carries the gain).
    pub fn num(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        Poly::from_roots(&self.zeros, self.gain).shift(self.shift.max(0) as usize)
    }

    /// Monic denominator polynomial.
    pub fn den(&self) -> Poly {
        Poly::from_roots(&self.poles, ONE).shift((-self.shift).max(0) as usize)
    }

    /// All poles including those at the origin, with multiplicity.
    pub fn all_poles(&self) -> Vec<C64> {
        let mut v = vec![ZERO; (-self.shift).max(0) as usize];
        v.extend_from_slice(&self.poles);
        v
    }

    /// All finite zeros including those at the origin.
    pub fn all_zeros(&self) -> Vec<C64> {
        let mut v = vec![ZERO; self.shift.max(0) as usize];
        v.extend_from_slice(&self.zeros);
        v
    }

    pub fn to_poly(&self) -> Option<Poly> {
        self.is_polynomial().then(|| self.num())
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if self.is_zero() {
            return Ok(ZERO);
        }
        let mut num = self.gain;
        for r in &self.zeros {
            num *= z - r;
        }
        let mut den = ONE;
        for p in &self.poles {
            den *= z - p;
        }
        if self.shift >= 0 {
            num *= z.powi(self.shift);
        } else {
            den *= z.powi(-self.shift);
        }
        if den.norm() <= EPS_EVAL {
            return Err(Error::PoleAtEvaluationPoint(z));
        }
        Ok(num / den)
    }

    /// The adjoint `conj(f(1/conj z))` (disc) or `conj(f(conj z))` (line).
    pub fn adjoint(&self, d: Domain) -> RationalFn {
        if self.is_zero() {
            return RationalFn::zero();
        }
        match d {
            Domain::Disc => {
                let mut gain = self.gain.conj();
                for r in &self.zeros {
                    gain *= -r.conj();
                }
                for p in &self.poles {
                    gain /= -p.conj();
                }
                let shift = -self.shift - self.zeros.len() as i32 + self.poles.len() as i32;
                RationalFn::from_parts(
                    gain,
                    shift,
                    self.zeros.iter().map(|&r| d.reflect(r)).collect(),
                    self.poles.iter().map(|&p| d.reflect(p)).collect(),
                )
            }
            Domain::Line => RationalFn::from_parts(
                self.gain.conj(),
                self.shift,
                self.zeros.iter().map(|r| r.conj()).collect(),
                self.poles.iter().map(|p| p.conj()).collect(),
            ),
        }
    }

    pub fn scale(&self, c: C64) -> RationalFn {
        RationalFn::from_parts(self.gain * c, self.shift, self.zeros.clone(), self.poles.clone())
    }

    pub fn mul_monomial(&self, k: i32) -> RationalFn {
        RationalFn::from_parts(self.gain, self.shift + k, self.zeros.clone(), self.poles.clone())
    }

    pub fn inv(&self) -> Result<RationalFn> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(RationalFn::from_parts(
            ONE / self.gain,
            -self.shift,
            self.poles.clone(),
            self.zeros.clone(),
        ))
    }

    pub fn div(&self, rhs: &RationalFn) -> Result<RationalFn> {
        Ok(self * &rhs.inv()?)
    }

    fn sum(&self, rhs: &RationalFn) -> RationalFn {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // least common denominator, shared poles matched by proximity
        let pairs = match_pairs(&rhs.poles, &self.poles, EPS_CANCEL);
        let mut rhs_matched = vec![false; rhs.poles.len()];
        let mut self_matched = vec![false; self.poles.len()];
        for &(i, j) in &pairs {
            rhs_matched[i] = true;
            self_matched[j] = true;
        }
        let extra_for_self: Vec<C64> = keep(&rhs.poles, &rhs_matched);
        let extra_for_rhs: Vec<C64> = keep(&self.poles, &self_matched);
        let mut common = self.poles.clone();
        common.extend_from_slice(&extra_for_self);

        let s = self.shift.min(rhs.shift);
        let mut za = self.zeros.clone();
        za.extend_from_slice(&extra_for_self);
        let mut zb = rhs.zeros.clone();
        zb.extend_from_slice(&extra_for_rhs);
        let na = Poly::from_roots(&za, self.gain).shift((self.shift - s) as usize);
        let nb = Poly::from_roots(&zb, rhs.gain).shift((rhs.shift - s) as usize);
        let tol = EPS_TRIM * na.max_abs().max(nb.max_abs());

        let mut coeffs = (&na + &nb).into_coeffs();
        while coeffs.last().is_some_and(|c| c.norm() <= tol) {
            coeffs.pop();
        }
        let low = coeffs.iter().take_while(|c| c.norm() <= tol).count();
        if low == coeffs.len() {
            return RationalFn::zero();
        }
        let q = Poly::new(coeffs[low..].to_vec());
        // q has a dominant leading coefficient after trimming, so root finding succeeds
        let zeros = q.roots().unwrap_or_default();
        // the expanded coefficients carry errors relative to their largest
        // entry; refine against the product forms, which are accurate
        // relative to the local size of each term
        let direct = |z: C64| {
            let term = |g: C64, k: i32, roots: &[C64]| roots.iter().fold(g * z.powi(k), |acc, r| acc * (z - r));
            (term(self.gain, self.shift - s, &za) + term(rhs.gain, rhs.shift - s, &zb)) / z.powi(low as i32)
        };
        let dq = q.derivative();
        let zeros: Vec<C64> = zeros.into_iter().map(|r| polish_root(r, &direct, &dq)).collect();
        RationalFn::from_parts(q.leading(), s + low as i32, zeros, common)
    }

    /// Coefficientwise comparison of the normalized num/den pairs.
    pub fn approx_eq(&self, other: &RationalFn, tol: f64) -> bool {
        let close = |a: &Poly, b: &Poly| {
            let n = a.coeffs().len().max(b.coeffs().len());
            let scale = a.max_abs().max(b.max_abs()).max(1.0);
            (0..n).all(|k| (a.coeff(k) - b.coeff(k)).norm() <= tol * scale)
        };
        close(&self.num(), &other.num()) && close(&self.den(), &other.den())
    }
}

/// Newton steps on `f` from `r`, kept only while `|f|` decreases.
fn polish_root(r: C64, f: &impl Fn(C64) -> C64, df: &Poly) -> C64 {
    let mut z = r;
    let mut best = f(z).norm();
    for _ in 0..4 {
        if best == 0.0 {
            break;
        }
        let d = df.eval(z);
        if d == ZERO {
            break;
        }
        let next = z - f(z) / d;
        if (next - z).norm() > 1e-4 * (1.0 + z.norm()) {
            break;
        }
        let v = f(next).norm();
        if !(v < best) {
            break;
        }
        best = v;
        z = next;
    }
    z
}

fn keep(v: &[C64], dropped: &[bool]) -> Vec<C64> {
    v.iter()
        .zip(dropped)
        .filter(|(_, d)| !**d)
        .map(|(x, _)| *x)
        .collect()
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        if self.is_zero() || rhs.is_zero() {
            return RationalFn::zero();
        }
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&rhs.zeros);
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&rhs.poles);
        RationalFn::from_parts(self.gain * rhs.gain, self.shift + rhs.shift, zeros, poles)
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        self.sum(rhs)
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self.sum(&-rhs)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            gain: -self.gain,
            ..self.clone()
        }
    }
}

impl From<&Poly> for RationalFn {
    /// Panics only if root finding rejects a nonzero polynomial, which
    /// cannot happen for untrimmed input with a nonzero leading coefficient.
    fn from(p: &Poly) -> Self {
        RationalFn::from_poly(p).expect("nonzero polynomial has a nonzero leading coefficient")
    }
}
