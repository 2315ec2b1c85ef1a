use super::SpectralFactor;
use crate::error::{Error, Result};
use crate::polycore::{matrix_norm_fro, CMatrix, Domain, C64};

/// Relative size of the smallest pivot below which the anchor value is
/// treated as singular.
const EPS_ANCHOR: f64 = 1e-12;

/// The unitary `U` making `a * U` lower triangular with a positive diagonal.
///
/// With `a* = Q R` and the phases of the diagonal of `R` moved into `Q`,
/// `a Q = R*`.
pub fn triangularizing_unitary(a: &CMatrix) -> Result<CMatrix> {
    let m = a.nrows();
    let qr = a.adjoint().qr();
    let (mut q, r) = qr.unpack();
    let norm = matrix_norm_fro(a);
    for k in 0..m {
        let rkk = r[(k, k)];
        if !(rkk.norm() > EPS_ANCHOR * norm) {
            return Err(Error::AnchorSingular);
        }
        let phase = rkk / rkk.norm();
        q.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    Ok(q)
}

/// Right-multiplies the factor by the constant unitary that makes its value
/// at the domain anchor lower triangular with a positive diagonal.
pub fn canonicalize(f: &SpectralFactor, d: Domain) -> Result<SpectralFactor> {
    let a = f.plus.eval(d.anchor())?;
    let u = triangularizing_unitary(&a)?;
    let mut out = f.clone();
    out.plus = f.plus.mul_constant(&u);
    out.certificate.unitary_fix = &f.certificate.unitary_fix * &u;
    Ok(out)
}

/// Largest elementwise deviation of `a` from lower-triangular with a
/// positive real diagonal.
pub fn canonical_defect(a: &CMatrix) -> f64 {
    let m = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in i..m {
            let v: C64 = a[(i, j)];
            let dev = if i == j { v.im.abs().max((-v.re).max(0.0)) } else { v.norm() };
            worst = worst.max(dev);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfact::FactorizationCertificate;
    use crate::polycore::{LaurentPoly, MatrixLaurentPoly, ONE};

    fn factor(plus: MatrixLaurentPoly) -> SpectralFactor {
        let m = plus.dim();
        SpectralFactor { plus, certificate: FactorizationCertificate::empty(m) }
    }

    #[test]
    fn identity_is_canonical() {
        let f = factor(MatrixLaurentPoly::identity(2));
        let c = canonicalize(&f, Domain::Disc).unwrap();
        assert!(matrix_norm_fro(&(c.plus.coeff(0) - CMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn phase_is_removed() {
        let w = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let p = LaurentPoly::new(0, vec![w, w]);
        let c = canonicalize(&factor(MatrixLaurentPoly::from_entries(1, &[p]).unwrap()), Domain::Disc).unwrap();
        let e = c.plus.entry(0, 0);
        assert!((e.coeff(0) - ONE).norm() < 1e-15 && (e.coeff(1) - ONE).norm() < 1e-15);
    }

    #[test]
    fn line_anchor_is_i() {
        // z + i has value 2i at the anchor; the canonical form is 1 - iz
        let p = LaurentPoly::new(0, vec![crate::polycore::I, ONE]);
        let c = canonicalize(&factor(MatrixLaurentPoly::from_entries(1, &[p]).unwrap()), Domain::Line).unwrap();
        let e = c.plus.entry(0, 0);
        assert!((e.coeff(0) - ONE).norm() < 1e-15);
        assert!((e.coeff(1) + crate::polycore::I).norm() < 1e-15);
    }

    #[test]
    fn right_unitary_is_forgotten() {
        let plus = MatrixLaurentPoly::new(
            2,
            0,
            vec![
                CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.5), C64::new(0.2, 0.0), C64::new(-0.3, 0.1), C64::new(2.0, 0.0)]),
                CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 1.0), C64::new(0.4, 0.0), C64::new(0.0, 0.0), C64::new(0.5, -0.5)]),
            ],
        )
        .unwrap();
        let v = CMatrix::from_row_slice(2, 2, &[C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.8), C64::new(0.6, 0.0)]);
        let a = canonicalize(&factor(plus.clone()), Domain::Disc).unwrap();
        let b = canonicalize(&factor(plus.mul_constant(&v)), Domain::Disc).unwrap();
        for n in 0..=1 {
            assert!(matrix_norm_fro(&(a.plus.coeff(n) - b.plus.coeff(n))) < 1e-13);
        }
        assert!(canonical_defect(&a.plus.coeff(0)) < 1e-14);
        let again = canonicalize(&a, Domain::Disc).unwrap();
        assert!(matrix_norm_fro(&(again.plus.coeff(1) - a.plus.coeff(1))) < 1e-14);
    }

    #[test]
    fn singular_anchor() {
        let p = LaurentPoly::from_real(1, &[1.0]);
        assert!(matches!(
            canonicalize(&factor(MatrixLaurentPoly::from_entries(1, &[p]).unwrap()), Domain::Disc),
            Err(Error::AnchorSingular)
        ));
    }
}
