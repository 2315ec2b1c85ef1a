use nalgebra::DMatrix;

use super::{match_pairs, Domain, LaurentPoly, Poly, RationalFn, C64, EPS_CANCEL, EPS_TRIM, ONE, ZERO};
use crate::error::{Error, Result};

/// Constant complex matrix.
pub type CMatrix = DMatrix<C64>;

pub(crate) fn matrix_norm_fro(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Matrix Laurent polynomial `sum_n C_n z^n` with `n = lo..=lo+len-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLaurentPoly {
    m: usize,
    lo: i32,
    coeffs: Vec<CMatrix>,
}

impl MatrixLaurentPoly {
    /// Strips all-zero coefficient matrices from both ends.
    pub fn new(m: usize, lo: i32, coeffs: Vec<CMatrix>) -> Result<Self> {
        for c in &coeffs {
            if c.nrows() != m || c.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: if c.nrows() != m { c.nrows() } else { c.ncols() },
                });
            }
        }
        let nonzero = |c: &CMatrix| c.iter().any(|z| *z != ZERO);
        let first = coeffs.iter().position(nonzero);
        Ok(match first {
            None => MatrixLaurentPoly { m, lo: 0, coeffs: Vec::new() },
            Some(first) => {
                let last = coeffs.iter().rposition(nonzero).unwrap();
                MatrixLaurentPoly {
                    m,
                    lo: lo + first as i32,
                    coeffs: coeffs[first..=last].to_vec(),
                }
            }
        })
    }

    pub fn identity(m: usize) -> Self {
        MatrixLaurentPoly {
            m,
            lo: 0,
            coeffs: vec![CMatrix::identity(m, m)],
        }
    }

    /// Entry-wise construction from Laurent polynomials, row-major.
    pub fn from_entries(m: usize, entries: &[LaurentPoly]) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                found: entries.len(),
            });
        }
        let nonzero: Vec<&LaurentPoly> = entries.iter().filter(|e| !e.is_zero()).collect();
        if nonzero.is_empty() {
            return MatrixLaurentPoly::new(m, 0, Vec::new());
        }
        let lo = nonzero.iter().map(|e| e.lo()).min().unwrap();
        let hi = nonzero.iter().map(|e| e.hi()).max().unwrap();
        let coeffs = (lo..=hi)
            .map(|n| CMatrix::from_fn(m, m, |i, j| entries[i * m + j].coeff(n)))
            .collect();
        MatrixLaurentPoly::new(m, lo, coeffs)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    /// Coefficient matrix of `z^n` (zero when absent).
    pub fn coeff(&self, n: i32) -> CMatrix {
        let k = n - self.lo;
        if k < 0 || k as usize >= self.coeffs.len() {
            CMatrix::zeros(self.m, self.m)
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> LaurentPoly {
        LaurentPoly::new(self.lo, self.coeffs.iter().map(|c| c[(i, j)]).collect())
    }

    /// Largest Frobenius norm among the coefficient matrices.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(matrix_norm_fro).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> Result<CMatrix> {
        if self.is_zero() {
            return Ok(CMatrix::zeros(self.m, self.m));
        }
        if self.lo < 0 && z == ZERO {
            return Err(Error::PoleAtEvaluationPoint(z));
        }
        let mut acc = CMatrix::zeros(self.m, self.m);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        Ok(acc * z.powi(self.lo))
    }

    /// Disc: `C_n -> C_{-n}^*`; line: `C_n -> C_n^*`.
    pub fn adjoint(&self, d: Domain) -> MatrixLaurentPoly {
        if self.is_zero() {
            return self.clone();
        }
        match d {
            Domain::Disc => MatrixLaurentPoly {
                m: self.m,
                lo: -self.hi(),
                coeffs: self.coeffs.iter().rev().map(|c| c.adjoint()).collect(),
            },
            Domain::Line => MatrixLaurentPoly {
                m: self.m,
                lo: self.lo,
                coeffs: self.coeffs.iter().map(|c| c.adjoint()).collect(),
            },
        }
    }

    pub fn mul(&self, rhs: &MatrixLaurentPoly) -> Result<MatrixLaurentPoly> {
        if rhs.m != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: rhs.m,
            });
        }
        if self.is_zero() || rhs.is_zero() {
            return MatrixLaurentPoly::new(self.m, 0, Vec::new());
        }
        let mut out = vec![CMatrix::zeros(self.m, self.m); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        MatrixLaurentPoly::new(self.m, self.lo + rhs.lo, out)
    }

    pub fn sub(&self, rhs: &MatrixLaurentPoly) -> Result<MatrixLaurentPoly> {
        if rhs.m != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: rhs.m,
            });
        }
        if self.is_zero() && rhs.is_zero() {
            return Ok(self.clone());
        }
        let lo = if self.is_zero() { rhs.lo } else if rhs.is_zero() { self.lo } else { self.lo.min(rhs.lo) };
        let hi = if self.is_zero() { rhs.hi() } else if rhs.is_zero() { self.hi() } else { self.hi().max(rhs.hi()) };
        MatrixLaurentPoly::new(self.m, lo, (lo..=hi).map(|n| self.coeff(n) - rhs.coeff(n)).collect())
    }

    /// Right multiplication by a constant matrix.
    pub fn mul_constant(&self, u: &CMatrix) -> MatrixLaurentPoly {
        MatrixLaurentPoly {
            m: self.m,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c * u).collect(),
        }
    }

    /// Largest deviation from self-adjointness relative to the largest
    /// coefficient norm.
    pub fn self_adjoint_deviation(&self, d: Domain) -> f64 {
        let scale = self.max_coeff_norm().max(f64::MIN_POSITIVE);
        let adj = self.adjoint(d);
        let lo = if self.is_zero() { 0 } else { self.lo.min(adj.lo) };
        let hi = if self.is_zero() { -1 } else { self.hi().max(adj.hi()) };
        (lo..=hi)
            .map(|n| matrix_norm_fro(&(self.coeff(n) - adj.coeff(n))))
            .fold(0.0, f64::max)
            / scale
    }

    pub fn to_rational(&self) -> Result<RationalMatrix> {
        let mut entries = Vec::with_capacity(self.m * self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                entries.push(self.entry(i, j).to_rational()?);
            }
        }
        Ok(RationalMatrix { m: self.m, entries })
    }

    /// Determinant polynomial of a matrix with no negative powers, by
    /// evaluation on the unit circle and interpolation.
    pub fn det_poly(&self) -> Result<Poly> {
        if self.lo < 0 && !self.is_zero() {
            return Err(Error::PoleAtEvaluationPoint(ZERO));
        }
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        let degree = self.hi().max(0) as usize * self.m;
        let values = circle_points(degree + 1)
            .iter()
            .map(|&z| self.eval(z).map(|a| a.determinant()))
            .collect::<Result<Vec<_>>>()?;
        Ok(interpolate_on_circle(&values))
    }
}

fn circle_points(k: usize) -> Vec<C64> {
    (0..k)
        .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64))
        .collect()
}

/// Coefficients of the polynomial of degree `< values.len()` taking
/// `values[j]` at the `j`-th root of unity.
pub(crate) fn interpolate_on_circle(values: &[C64]) -> Poly {
    let k = values.len();
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let coeffs: Vec<C64> = (0..k)
        .map(|n| {
            let acc: C64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * ((n * j) % k) as f64 / k as f64))
                .sum();
            acc / k as f64
        })
        .collect();
    Poly::new(coeffs).trim_abs(EPS_TRIM * scale)
}

/// Square matrix of rational functions, row-major.
#[derive(Clone, Debug)]
pub struct RationalMatrix {
    m: usize,
    entries: Vec<RationalFn>,
}

impl RationalMatrix {
    pub fn from_entries(m: usize, entries: Vec<RationalFn>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                found: entries.len(),
            });
        }
        Ok(RationalMatrix { m, entries })
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> RationalFn) -> Self {
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                entries.push(f(i, j));
            }
        }
        RationalMatrix { m, entries }
    }

    pub fn identity(m: usize) -> Self {
        RationalMatrix::from_fn(m, |i, j| if i == j { RationalFn::one() } else { RationalFn::zero() })
    }

    pub fn zeros(m: usize) -> Self {
        RationalMatrix::from_fn(m, |_, _| RationalFn::zero())
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalFn {
        &self.entries[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: RationalFn) {
        self.entries[i * self.m + j] = f;
    }

    pub fn entries(&self) -> &[RationalFn] {
        &self.entries
    }

    fn check_dim(&self, rhs: &RationalMatrix) -> Result<()> {
        if self.m != rhs.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: rhs.m,
            });
        }
        Ok(())
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix> {
        self.check_dim(rhs)?;
        let m = self.m;
        Ok(RationalMatrix::from_fn(m, |i, j| {
            (0..m).fold(RationalFn::zero(), |acc, k| &acc + &(self.get(i, k) * rhs.get(k, j)))
        }))
    }

    pub fn add(&self, rhs: &RationalMatrix) -> Result<RationalMatrix> {
        self.check_dim(rhs)?;
        Ok(RationalMatrix::from_fn(self.m, |i, j| self.get(i, j) + rhs.get(i, j)))
    }

    pub fn sub(&self, rhs: &RationalMatrix) -> Result<RationalMatrix> {
        self.check_dim(rhs)?;
        Ok(RationalMatrix::from_fn(self.m, |i, j| self.get(i, j) - rhs.get(i, j)))
    }

    pub fn scale(&self, c: C64) -> RationalMatrix {
        RationalMatrix::from_fn(self.m, |i, j| self.get(i, j).scale(c))
    }

    /// Right multiplication by a constant matrix.
    pub fn mul_constant(&self, u: &CMatrix) -> Result<RationalMatrix> {
        if u.nrows() != self.m || u.ncols() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: u.nrows(),
            });
        }
        let m = self.m;
        Ok(RationalMatrix::from_fn(m, |i, j| {
            (0..m).fold(RationalFn::zero(), |acc, k| {
                if u[(k, j)] == ZERO {
                    acc
                } else {
                    &acc + &self.get(i, k).scale(u[(k, j)])
                }
            })
        }))
    }

    /// Multiplies column `j` by the scalar function `f`.
    pub fn scale_column(&self, j: usize, f: &RationalFn) -> RationalMatrix {
        let mut out = self.clone();
        for i in 0..self.m {
            out.entries[i * self.m + j] = self.get(i, j) * f;
        }
        out
    }

    pub fn adjoint(&self, d: Domain) -> RationalMatrix {
        RationalMatrix::from_fn(self.m, |i, j| self.get(j, i).adjoint(d))
    }

    pub fn eval(&self, z: C64) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.m, self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                out[(i, j)] = self.get(i, j).eval(z)?;
            }
        }
        Ok(out)
    }

    pub fn approx_eq(&self, other: &RationalMatrix, tol: f64) -> bool {
        self.m == other.m && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Determinant as a normalized rational function.
    ///
    /// Each column is multiplied by the least common multiple of its
    /// denominators, the determinant of the resulting polynomial matrix is
    /// recovered by evaluation at roots of unity and interpolation, and the
    /// column denominators are divided back out.
    pub fn det(&self) -> Result<RationalFn> {
        let m = self.m;
        if m == 1 {
            return Ok(self.entries[0].clone());
        }
        let mut total_shift = 0i32;
        let mut all_poles = Vec::new();
        let mut degree = 0usize;
        // cleared[i][j] = (gain, exponent of z, zeros) of the polynomial entry
        let mut cleared: Vec<Option<(C64, usize, Vec<C64>)>> = vec![None; m * m];
        for j in 0..m {
            let col: Vec<&RationalFn> = (0..m).map(|i| self.get(i, j)).filter(|f| !f.is_zero()).collect();
            if col.is_empty() {
                return Ok(RationalFn::zero());
            }
            let min_shift = col.iter().map(|f| f.shift()).min().unwrap();
            let lcm = lcm_roots(col.iter().map(|f| f.poles()));
            let mut col_degree = 0;
            for i in 0..m {
                let f = self.get(i, j);
                if f.is_zero() {
                    continue;
                }
                let pairs = match_pairs(f.poles(), &lcm, EPS_CANCEL);
                let mut used = vec![false; lcm.len()];
                for (_, b) in pairs {
                    used[b] = true;
                }
                let mut zeros = f.zeros().to_vec();
                zeros.extend(lcm.iter().zip(&used).filter(|(_, u)| !**u).map(|(r, _)| *r));
                let power = (f.shift() - min_shift) as usize;
                col_degree = col_degree.max(power + zeros.len());
                cleared[i * m + j] = Some((f.gain(), power, zeros));
            }
            degree += col_degree;
            total_shift += min_shift;
            all_poles.extend(lcm);
        }
        let values: Vec<C64> = circle_points(degree + 1)
            .iter()
            .map(|&z| {
                let a = CMatrix::from_fn(m, m, |i, j| match &cleared[i * m + j] {
                    None => ZERO,
                    Some((g, k, zeros)) => zeros.iter().fold(g * z.powi(*k as i32), |acc, r| acc * (z - r)),
                });
                a.determinant()
            })
            .collect();
        let p = interpolate_on_circle(&values);
        if p.is_zero() {
            return Ok(RationalFn::zero());
        }
        let num = RationalFn::from_poly(&p)?;
        let den = RationalFn::from_parts(ONE, 0, Vec::new(), all_poles);
        Ok((&num * &den).mul_monomial(total_shift))
    }

    /// Inverse by cofactors.
    pub fn inverse(&self) -> Result<RationalMatrix> {
        let m = self.m;
        let det = self.det()?;
        let inv_det = det.inv()?;
        if m == 1 {
            return RationalMatrix::from_entries(1, vec![inv_det]);
        }
        let mut out = RationalMatrix::zeros(m);
        for i in 0..m {
            for j in 0..m {
                let minor = RationalMatrix::from_fn(m - 1, |r, c| {
                    let rr = if r < j { r } else { r + 1 };
                    let cc = if c < i { c } else { c + 1 };
                    self.get(rr, cc).clone()
                });
                let cof = minor.det()?;
                let sign = if (i + j) % 2 == 0 { ONE } else { -ONE };
                out.set(i, j, &cof.scale(sign) * &inv_det);
            }
        }
        Ok(out)
    }
}

/// Union of root multisets where roots within `EPS_CANCEL` are identified.
pub(crate) fn lcm_roots<'a>(lists: impl Iterator<Item = &'a [C64]>) -> Vec<C64> {
    let mut acc: Vec<C64> = Vec::new();
    for list in lists {
        let pairs = match_pairs(list, &acc, EPS_CANCEL);
        let mut matched = vec![false; list.len()];
        for (a, _) in pairs {
            matched[a] = true;
        }
        acc.extend(list.iter().zip(&matched).filter(|(_, m)| !**m).map(|(r, _)| *r));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(lo: i32, c: &[f64]) -> LaurentPoly {
        LaurentPoly::from_real(lo, c)
    }

    fn rat(l: LaurentPoly) -> RationalFn {
        l.to_rational().unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let a = RationalMatrix::from_fn(2, |i, j| rat(lp(i as i32 - 1, &[1.0, j as f64 + 2.0])));
        assert!(RationalMatrix::identity(2).mul(&a).unwrap().approx_eq(&a, 1e-14));
    }

    #[test]
    fn triangular_product() {
        // [[1,0],[z,1]] * [[1,1/z],[0,1]] = [[1,1/z],[z,2]]
        let l = RationalMatrix::from_entries(2, vec![rat(lp(0, &[1.0])), RationalFn::zero(), rat(lp(1, &[1.0])), rat(lp(0, &[1.0]))]).unwrap();
        let u = RationalMatrix::from_entries(2, vec![rat(lp(0, &[1.0])), rat(lp(-1, &[1.0])), RationalFn::zero(), rat(lp(0, &[1.0]))]).unwrap();
        let want = RationalMatrix::from_entries(2, vec![rat(lp(0, &[1.0])), rat(lp(-1, &[1.0])), rat(lp(1, &[1.0])), rat(lp(0, &[2.0]))]).unwrap();
        assert!(l.mul(&u).unwrap().approx_eq(&want, 1e-14));
    }

    #[test]
    fn triangular_inverse() {
        let a = RationalMatrix::from_entries(2, vec![rat(lp(0, &[1.0])), RationalFn::zero(), rat(lp(1, &[1.0])), rat(lp(0, &[1.0]))]).unwrap();
        let inv = a.inverse().unwrap();
        let want = RationalMatrix::from_entries(2, vec![rat(lp(0, &[1.0])), RationalFn::zero(), rat(lp(1, &[-1.0])), rat(lp(0, &[1.0]))]).unwrap();
        assert!(inv.approx_eq(&want, 1e-12));
        assert!(a.mul(&inv).unwrap().approx_eq(&RationalMatrix::identity(2), 1e-12));
    }

    #[test]
    fn determinants() {
        assert!(RationalMatrix::identity(3).det().unwrap().approx_eq(&RationalFn::one(), 1e-14));
        let a = RationalMatrix::from_entries(2, vec![rat(lp(0, &[1.0])), rat(lp(-1, &[1.0])), rat(lp(1, &[1.0])), rat(lp(0, &[2.0]))]).unwrap();
        assert!(a.det().unwrap().approx_eq(&RationalFn::one(), 1e-12));
        let u = RationalFn::from_num_den(&Poly::from_real(&[-0.5, 1.0]), &Poly::from_real(&[1.0, -0.5])).unwrap();
        let d = RationalMatrix::from_entries(2, vec![u.clone(), RationalFn::zero(), RationalFn::zero(), RationalFn::one()]).unwrap();
        assert!(d.det().unwrap().approx_eq(&u, 1e-12));
    }

    #[test]
    fn determinant_with_shared_denominators() {
        let p = RationalFn::from_num_den(&Poly::from_real(&[1.0, 2.0]), &Poly::from_real(&[0.25, 1.0])).unwrap();
        let q = RationalFn::from_num_den(&Poly::from_real(&[3.0]), &Poly::from_real(&[0.25, 1.0])).unwrap();
        let a = RationalMatrix::from_entries(2, vec![p.clone(), q.clone(), q.clone(), p.clone()]).unwrap();
        let want = &(&p * &p) - &(&q * &q);
        let got = a.det().unwrap();
        let z = C64::new(0.7, -0.2);
        assert!((got.eval(z).unwrap() - want.eval(z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn matrix_poly_det() {
        let a = MatrixLaurentPoly::from_entries(2, &[lp(0, &[2.0, 1.0]), lp(0, &[0.0]), lp(0, &[0.0, 3.0]), lp(0, &[1.0])]).unwrap();
        let p = a.det_poly().unwrap();
        assert!((p.coeff(0) - C64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((p.coeff(1) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(p.degree(), Some(1));
    }
}
