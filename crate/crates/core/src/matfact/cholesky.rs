use crate::error::{Error, Result};
use crate::polycore::{CMatrix, Domain, LaurentPoly, MatrixLaurentPoly, RationalFn, RationalMatrix, EPS_TRIM, ZERO};
use crate::scalarfact::{rational_sqrt, EPS_HERM, SCREEN_GRID};
use crate::verify::positivity_screen;

/// Lower-triangular `S0` with `S0 * adjoint(S0) = S`.
///
/// This is Gaussian elimination with scalar spectral factors on the
/// diagonal: `b_nn = sqrt(a_nn - sum_{j<n} b_nj adj(b_nj))` and
/// `b_kn = (a_kn - sum_{j<n} b_kj adj(b_nj)) / adj(b_nn)` for `k > n`.
/// The eliminated entries are Schur complements, so they are evaluated
/// through minors of `S` instead of by rational subtraction: with `D_n`
/// the leading principal minor of order `n`, `F_n` its spectral factor and
/// `D_n^(k)` the minor on rows `1..n-1, k` and columns `1..n`,
///
/// `b_nn = F_n / F_{n-1}` and `b_kn = D_n^(k) / (F_{n-1} adj(F_n))`.
///
/// Every entry then costs one root finding on a Laurent polynomial and no
/// cancellation-prone sums.
pub fn rational_cholesky(s: &MatrixLaurentPoly, d: Domain) -> Result<RationalMatrix> {
    let deviation = s.self_adjoint_deviation(d);
    if deviation > EPS_HERM {
        return Err(Error::NotSelfAdjoint(deviation));
    }
    if d == Domain::Line && !s.is_zero() && s.lo() < 0 {
        return Err(Error::NotSelfAdjoint(f64::INFINITY));
    }
    let screen = positivity_screen(s, d, SCREEN_GRID)?;
    if !screen.pass {
        return Err(Error::NegativeOnBoundary {
            min: screen.min_eigenvalue.unwrap_or(f64::NAN),
            scale: screen.scale,
        });
    }

    let m = s.dim();
    let mut b = RationalMatrix::zeros(m);
    let mut prev = RationalFn::one();
    for n in 0..m {
        let lead: Vec<usize> = (0..=n).collect();
        let dn = minor(s, &lead, &lead)?;
        // exact symmetry keeps the reflected root pairs together
        let dn = (&dn + &dn.adjoint(d)).scale(0.5.into());
        if dn.is_zero() {
            return Err(Error::SingularPrincipalMinor(n + 1));
        }
        let fnn = rational_sqrt(&dn.to_rational()?, d).map_err(|e| match e {
            Error::SingularPrincipalMinor(_) => Error::SingularPrincipalMinor(n + 1),
            other => other,
        })?;
        let below = &prev * &fnn.adjoint(d);
        let mut rows: Vec<usize> = (0..n).collect();
        rows.push(0);
        for k in n + 1..m {
            rows[n] = k;
            b.set(k, n, minor(s, &rows, &lead)?.to_rational()?.div(&below)?);
        }
        b.set(n, n, fnn.div(&prev)?);
        prev = fnn;
    }
    Ok(b)
}

/// Determinant of the submatrix of `s` on the given rows and columns.
///
/// Coefficients below the rounding level of the expanded determinant,
/// `EPS_TRIM * (sum_n |C_n|)^k`, are dropped.
pub(crate) fn minor(s: &MatrixLaurentPoly, rows: &[usize], cols: &[usize]) -> Result<LaurentPoly> {
    let k = rows.len();
    if s.is_zero() {
        return Ok(LaurentPoly::zero());
    }
    let coeffs: Vec<CMatrix> = s
        .coeffs()
        .iter()
        .map(|c| CMatrix::from_fn(k, k, |i, j| c[(rows[i], cols[j])]))
        .collect();
    let scale: f64 = s.coeffs().iter().map(|c| c.norm()).sum();
    let tol = EPS_TRIM * scale.powi(k as i32);
    let det = MatrixLaurentPoly::new(k, 0, coeffs)?.det_poly()?;
    let det = det.into_coeffs().into_iter().map(|c| if c.norm() <= tol { ZERO } else { c }).collect();
    Ok(LaurentPoly::new(s.lo() * k as i32, det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{Poly, C64};

    fn lp(lo: i32, c: &[f64]) -> LaurentPoly {
        LaurentPoly::from_real(lo, c)
    }

    fn poly(c: &[f64]) -> RationalFn {
        RationalFn::from_poly(&Poly::from_real(c)).unwrap()
    }

    #[test]
    fn identity_factor() {
        let b = rational_cholesky(&MatrixLaurentPoly::identity(2), Domain::Disc).unwrap();
        assert!(b.approx_eq(&RationalMatrix::identity(2), 1e-14));
    }

    #[test]
    fn two_by_two_worked_chain() {
        // [[1, 1/z], [z, 2]] = [[1, 0], [z, 1]] * adjoint
        let s = MatrixLaurentPoly::from_entries(2, &[lp(0, &[1.0]), lp(-1, &[1.0]), lp(1, &[1.0]), lp(0, &[2.0])]).unwrap();
        let b = rational_cholesky(&s, Domain::Disc).unwrap();
        let want = RationalMatrix::from_entries(2, vec![poly(&[1.0]), RationalFn::zero(), poly(&[0.0, 1.0]), poly(&[1.0])]).unwrap();
        assert!(b.approx_eq(&want, 1e-10), "{b:?}");
    }

    #[test]
    fn scalar_reduces_to_fejer_riesz() {
        let s = MatrixLaurentPoly::from_entries(1, &[lp(-1, &[1.0, 2.0, 1.0])]).unwrap();
        let b = rational_cholesky(&s, Domain::Disc).unwrap();
        assert!(b.get(0, 0).approx_eq(&poly(&[1.0, 1.0]), 1e-9));
    }

    #[test]
    fn product_reproduces_input() {
        let s = MatrixLaurentPoly::from_entries(
            2,
            &[lp(-1, &[1.0, 6.0, 1.0]), lp(-1, &[0.5, 1.0, 2.0]), lp(-1, &[2.0, 1.0, 0.5]), lp(-1, &[1.0, 4.0, 1.0])],
        )
        .unwrap();
        let b = rational_cholesky(&s, Domain::Disc).unwrap();
        for z in Domain::Disc.boundary_grid(32) {
            let v = b.eval(z).unwrap();
            let err = (&v * v.adjoint() - s.eval(z).unwrap()).norm();
            assert!(err < 1e-10, "{err}");
        }
    }

    /// The elimination recursion written out with rational subtraction.
    fn recursive_cholesky(s: &MatrixLaurentPoly, d: Domain) -> RationalMatrix {
        let m = s.dim();
        let a = s.to_rational().unwrap();
        let mut b = RationalMatrix::zeros(m);
        for n in 0..m {
            let mut pivot = a.get(n, n).clone();
            for j in 0..n {
                pivot = &pivot - &(b.get(n, j) * &b.get(n, j).adjoint(d));
            }
            let bnn = rational_sqrt(&pivot, d).unwrap();
            let bnn_adj = bnn.adjoint(d);
            for k in n + 1..m {
                let mut acc = a.get(k, n).clone();
                for j in 0..n {
                    acc = &acc - &(b.get(k, j) * &b.get(n, j).adjoint(d));
                }
                b.set(k, n, acc.div(&bnn_adj).unwrap());
            }
            b.set(n, n, bnn);
        }
        b
    }

    #[test]
    fn minors_agree_with_recursion() {
        let s = MatrixLaurentPoly::from_entries(
            3,
            &[
                lp(-1, &[1.0, 7.0, 1.0]),
                lp(-1, &[0.5, 1.0, 2.0]),
                lp(0, &[0.3]),
                lp(-1, &[2.0, 1.0, 0.5]),
                lp(-1, &[1.0, 5.0, 1.0]),
                lp(-1, &[0.0, 1.0]),
                lp(0, &[0.3]),
                lp(0, &[1.0]),
                lp(0, &[4.0]),
            ],
        )
        .unwrap();
        for d in [Domain::Disc] {
            let fast = rational_cholesky(&s, d).unwrap();
            let slow = recursive_cholesky(&s, d);
            for z in [C64::new(0.3, 0.1), C64::new(-2.0, 0.5), C64::new(0.0, 1.0)] {
                let e = (fast.eval(z).unwrap() - slow.eval(z).unwrap()).norm();
                assert!(e < 1e-9, "{e}");
            }
        }
    }

    #[test]
    fn rejects_singular_and_indefinite() {
        let zero_pivot = MatrixLaurentPoly::from_entries(2, &[lp(0, &[0.0]), lp(0, &[0.0]), lp(0, &[0.0]), lp(0, &[1.0])]).unwrap();
        assert!(matches!(
            rational_cholesky(&zero_pivot, Domain::Disc),
            Err(Error::SingularPrincipalMinor(1))
        ));
        let negative = MatrixLaurentPoly::from_entries(1, &[lp(0, &[-1.0])]).unwrap();
        assert!(matches!(rational_cholesky(&negative, Domain::Disc), Err(Error::NegativeOnBoundary { .. })));
    }
}
