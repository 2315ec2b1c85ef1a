//! Reproducible planted instances: a random polynomial factor `G` with its
//! determinant roots moved out of the interior, and `S = G adjoint(G)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matfact::{canonicalize, sweep_det_zeros, Completion, FactorizationCertificate, SpectralFactor};
use crate::polycore::{CMatrix, Domain, LaurentPoly, MatrixLaurentPoly, RationalMatrix, C64};

/// Minimum distance of the planted determinant roots from the boundary.
pub const ROOT_MARGIN: f64 = 0.05;
/// Minimum separation between planted determinant roots.
pub const ROOT_SEPARATION: f64 = 0.02;
const MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug)]
pub struct GenerateOptions {
    pub m: usize,
    pub degree: usize,
    pub seed: u64,
    pub domain: Domain,
    /// Multiply the first column by a factor vanishing on the boundary
    /// (`1 + z` on the disc, `z` on the line).
    pub boundary_zero: bool,
}

#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub spectrum: MatrixLaurentPoly,
    /// The canonical factor of `spectrum`.
    pub reference: MatrixLaurentPoly,
}

pub fn generate(opts: &GenerateOptions) -> Result<PlantedInstance> {
    if opts.m == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let d = opts.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..MAX_ATTEMPTS {
        let g = random_factor(&mut rng, opts.m, opts.degree);
        if let Some(mut g) = push_roots_out(&g, d, opts.degree)? {
            if opts.boundary_zero {
                g = with_boundary_zero(&g, d)?;
            }
            let spectrum = g.mul(&g.adjoint(d))?;
            let planted = SpectralFactor {
                certificate: FactorizationCertificate::empty(opts.m),
                plus: g,
            };
            let reference = canonicalize(&planted, d)?.plus;
            return Ok(PlantedInstance { spectrum, reference });
        }
    }
    Err(Error::IterationLimitExceeded(MAX_ATTEMPTS))
}

fn random_factor(rng: &mut ChaCha8Rng, m: usize, degree: usize) -> MatrixLaurentPoly {
    let coeffs = (0..=degree)
        .map(|_| CMatrix::from_fn(m, m, |_, _| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))))
        .collect();
    MatrixLaurentPoly::new(m, 0, coeffs).expect("coefficients are m x m")
}

/// Moves the determinant roots of `g` out of the interior, or `None` when
/// the sample is too ill-conditioned to serve as a planted instance.
fn push_roots_out(g: &MatrixLaurentPoly, d: Domain, degree: usize) -> Result<Option<MatrixLaurentPoly>> {
    let m = g.dim();
    let det = g.det_poly()?;
    if det.degree() != Some(m * degree) {
        return Ok(None);
    }
    let roots = det.roots()?;
    let separated = roots
        .iter()
        .enumerate()
        .all(|(i, a)| roots[..i].iter().all(|b| (a - b).norm() >= ROOT_SEPARATION));
    let margin = roots.iter().all(|&r| d.depth(r).abs() >= ROOT_MARGIN);
    if !separated || !margin {
        return Ok(None);
    }
    let (swept, _) = match sweep_det_zeros(&g.to_rational()?, d, Completion::Householder, 64, None) {
        Ok(out) => out,
        Err(_) => return Ok(None),
    };
    Ok(polynomial_part(&swept, degree))
}

fn polynomial_part(r: &RationalMatrix, degree: usize) -> Option<MatrixLaurentPoly> {
    let m = r.dim();
    let mut entries = Vec::with_capacity(m * m);
    for f in r.entries() {
        let p = f.to_poly()?;
        if p.degree().is_some_and(|k| k > degree) {
            return None;
        }
        entries.push(LaurentPoly::from_poly(&p));
    }
    MatrixLaurentPoly::from_entries(m, &entries).ok()
}

fn with_boundary_zero(g: &MatrixLaurentPoly, d: Domain) -> Result<MatrixLaurentPoly> {
    let m = g.dim();
    let factor = match d {
        Domain::Disc => LaurentPoly::from_real(0, &[1.0, 1.0]),
        Domain::Line => LaurentPoly::from_real(1, &[1.0]),
    };
    let mut diag = vec![LaurentPoly::zero(); m * m];
    for i in 0..m {
        diag[i * m + i] = if i == 0 { factor.clone() } else { LaurentPoly::constant(C64::new(1.0, 0.0)) };
    }
    g.mul(&MatrixLaurentPoly::from_entries(m, &diag)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(m: usize, degree: usize, seed: u64, domain: Domain) -> GenerateOptions {
        GenerateOptions { m, degree, seed, domain, boundary_zero: false }
    }

    #[test]
    fn deterministic() {
        let a = generate(&opts(2, 2, 9, Domain::Disc)).unwrap();
        let b = generate(&opts(2, 2, 9, Domain::Disc)).unwrap();
        assert_eq!(a.spectrum, b.spectrum);
        assert_eq!(a.reference, b.reference);
    }

    #[test]
    fn constant_instance() {
        let inst = generate(&opts(1, 0, 7, Domain::Disc)).unwrap();
        assert_eq!((inst.spectrum.lo(), inst.spectrum.hi()), (0, 0));
        let s = inst.spectrum.coeff(0)[(0, 0)];
        let r = inst.reference.coeff(0)[(0, 0)];
        assert!(s.re > 0.0 && s.im == 0.0);
        assert!((r.re - s.re.sqrt()).abs() < 1e-14 && r.im.abs() < 1e-15);
    }

    #[test]
    fn reference_roots_lie_outside() {
        for domain in [Domain::Disc, Domain::Line] {
            let inst = generate(&opts(3, 2, 4, domain)).unwrap();
            let roots = inst.reference.det_poly().unwrap().roots().unwrap();
            assert!(roots.iter().all(|&r| domain.depth(r) < -ROOT_MARGIN / 2.0), "{roots:?}");
        }
    }

    #[test]
    fn boundary_zero_is_planted() {
        let inst = generate(&GenerateOptions { boundary_zero: true, ..opts(2, 1, 3, Domain::Disc) }).unwrap();
        let det = inst.reference.det_poly().unwrap();
        assert!(det.eval(C64::new(-1.0, 0.0)).norm() < 1e-12);
    }
}
