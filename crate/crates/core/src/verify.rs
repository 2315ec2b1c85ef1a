//! Independent checks of factorization results. Nothing here trusts the
//! numbers stored in a certificate: residuals and determinant roots are
//! recomputed from the raw coefficients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matfact::{SpectralFactor, SweepStep, EPS_DEGENERATE};
use crate::polycore::{matrix_norm_fro, CMatrix, Domain, MatrixLaurentPoly, C64, I, ONE};
use crate::scalarfact::{EPS_HERM, EPS_PSD};

/// Thresholds a report is judged against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceProfile {
    pub recon: f64,
    pub root: f64,
    pub paraunitary: f64,
    pub quotient: f64,
}

impl ToleranceProfile {
    pub const DEFAULT: ToleranceProfile = ToleranceProfile {
        recon: 1e-8,
        root: 1e-7,
        paraunitary: 1e-10,
        quotient: 1e-7,
    };

    /// For inputs whose determinant vanishes on the boundary.
    pub const BOUNDARY_DEGENERATE: ToleranceProfile = ToleranceProfile {
        recon: 1e-5,
        root: 1e-5,
        paraunitary: 1e-5,
        quotient: 1e-5,
    };
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile::DEFAULT
    }
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub recon_residual: f64,
    /// How far the worst determinant root lies inside the forbidden region
    /// (0 when none does).
    pub max_root_violation: f64,
    pub paraunitary_residual: f64,
    pub unitary_quotient_residual: f64,
    /// Smallest boundary eigenvalue, for positivity screens.
    pub min_eigenvalue: Option<f64>,
    /// Largest boundary eigenvalue magnitude, for positivity screens.
    pub scale: f64,
    pub pass: bool,
    /// Human-readable reasons for failure.
    pub failures: Vec<String>,
}

impl VerificationReport {
    fn judge(mut self, profile: &ToleranceProfile) -> Self {
        let checks = [
            ("reconstruction residual", self.recon_residual, profile.recon),
            ("root violation", self.max_root_violation, profile.root),
            ("paraunitary residual", self.paraunitary_residual, profile.paraunitary),
            ("unitary quotient residual", self.unitary_quotient_residual, profile.quotient),
        ];
        for (name, value, limit) in checks {
            if !(value <= limit) {
                self.failures.push(format!("{name} {value:.3e} exceeds {limit:.1e}"));
            }
        }
        self.pass = self.failures.is_empty();
        self
    }

    fn failed(reason: String) -> Self {
        VerificationReport {
            recon_residual: f64::INFINITY,
            max_root_violation: f64::INFINITY,
            paraunitary_residual: f64::INFINITY,
            unitary_quotient_residual: f64::INFINITY,
            pass: false,
            failures: vec![reason],
            ..Default::default()
        }
    }
}

/// Max over coefficients of `|A_n - B_n|_F`, divided by `1 + max |B_n|_F`.
pub fn coefficient_distance(a: &MatrixLaurentPoly, b: &MatrixLaurentPoly) -> f64 {
    let (lo, hi) = match (a.is_zero(), b.is_zero()) {
        (true, true) => return 0.0,
        (true, false) => (b.lo(), b.hi()),
        (false, true) => (a.lo(), a.hi()),
        (false, false) => (a.lo().min(b.lo()), a.hi().max(b.hi())),
    };
    let diff = (lo..=hi).map(|n| matrix_norm_fro(&(a.coeff(n) - b.coeff(n)))).fold(0.0, f64::max);
    diff / (1.0 + b.max_coeff_norm())
}

/// Max over the boundary grid of `|P(z) P(z)* - S(z)|_F / (1 + |S(z)|_F)`.
fn grid_residual(s: &MatrixLaurentPoly, plus: &MatrixLaurentPoly, points: &[C64]) -> f64 {
    points
        .iter()
        .map(|&z| match (s.eval(z), plus.eval(z)) {
            (Ok(sz), Ok(p)) => matrix_norm_fro(&(&p * p.adjoint() - &sz)) / (1.0 + matrix_norm_fro(&sz)),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Checks `S = P adjoint(P)` coefficientwise and on the boundary grid,
/// that `P` has no negative powers, that `det P` has no interior roots, and
/// that every recorded sweep multiplier is paraunitary.
pub fn verify_factorization(
    s: &MatrixLaurentPoly,
    f: &SpectralFactor,
    d: Domain,
    profile: &ToleranceProfile,
    grid: usize,
) -> VerificationReport {
    let plus = &f.plus;
    if plus.dim() != s.dim() {
        return VerificationReport::failed(format!("dimension mismatch: {} vs {}", plus.dim(), s.dim()));
    }
    let mut report = VerificationReport::default();
    if !plus.is_zero() && plus.lo() < 0 {
        report.failures.push(format!("factor has a negative power z^{}", plus.lo()));
    }

    let coeff = match plus.mul(&plus.adjoint(d)) {
        Ok(product) => coefficient_distance(&product, s),
        Err(_) => f64::INFINITY,
    };
    report.recon_residual = coeff.max(grid_residual(s, plus, &d.boundary_grid(grid)));

    report.max_root_violation = match root_violation(plus, d) {
        Ok(v) => v,
        Err(e) => {
            report.failures.push(format!("determinant roots unavailable: {e}"));
            f64::INFINITY
        }
    };
    report.paraunitary_residual = paraunitary_residual(&f.certificate.sweep_transcript, d);
    report.judge(profile)
}

/// How far the deepest root of `det P` lies inside the region.
fn root_violation(plus: &MatrixLaurentPoly, d: Domain) -> Result<f64> {
    if !plus.is_zero() && plus.lo() < 0 {
        // evaluate the polynomial part; the negative power is reported separately
        return Ok(f64::INFINITY);
    }
    let det = plus.det_poly()?;
    if det.is_zero() {
        return Ok(f64::INFINITY);
    }
    Ok(det.roots()?.into_iter().map(|r| d.depth(r)).fold(0.0, f64::max))
}

/// Worst `|u(z) adj(u)(z) - 1|` over the Blaschke factors and
/// `|U U* - I|_F` over the constant unitaries in a transcript.
pub fn paraunitary_residual(steps: &[SweepStep], d: Domain) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for step in steps {
        let u = &step.factor;
        let mut tested = 0;
        while tested < 64 {
            let z = match d {
                Domain::Disc => C64::from_polar(rng.gen_range(0.2..3.0), rng.gen_range(0.0..std::f64::consts::TAU)),
                Domain::Line => C64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-3.0..3.0)),
            };
            let zr = d.reflect(z);
            let near_singular = [u.a, d.reflect(u.a)].iter().any(|p| (z - p).norm() < 1e-3 || (zr - p).norm() < 1e-3);
            if near_singular || !zr.is_finite() {
                continue;
            }
            let v = u.eval(z) * u.eval(zr).conj();
            worst = worst.max((v - ONE).norm());
            tested += 1;
        }
        if let Some(q) = &step.unitary {
            let m = q.nrows();
            worst = worst.max(matrix_norm_fro(&(q * q.adjoint() - CMatrix::identity(m, m))));
        }
    }
    worst
}

/// Compares two factors of the same spectrum up to a constant right
/// unitary: `Q = F2(anchor)^-1 F1(anchor)` must be unitary and
/// `F1 = F2 Q` coefficientwise.
pub fn compare_up_to_unitary(
    f1: &SpectralFactor,
    f2: &SpectralFactor,
    d: Domain,
    profile: &ToleranceProfile,
) -> VerificationReport {
    let (p1, p2) = (&f1.plus, &f2.plus);
    if p1.dim() != p2.dim() {
        return VerificationReport::failed(format!("dimension mismatch: {} vs {}", p1.dim(), p2.dim()));
    }
    let q = match (p1.eval(d.anchor()), p2.eval(d.anchor())) {
        (Ok(a1), Ok(a2)) => a2.try_inverse().map(|inv| inv * a1),
        _ => None,
    };
    let Some(q) = q else {
        return VerificationReport::failed("second factor is singular at the anchor".into());
    };
    let m = q.nrows();
    let unitary = matrix_norm_fro(&(&q * q.adjoint() - CMatrix::identity(m, m)));
    let coeff = coefficient_distance(&p2.mul_constant(&q), p1);
    VerificationReport {
        unitary_quotient_residual: unitary.max(coeff),
        ..Default::default()
    }
    .judge(profile)
}

/// `Q(z) = F2(z)^-1 F1(z)` at `n` boundary points: returns the largest
/// deviation of `Q` from its value at the first point and the largest
/// deviation from unitarity.
pub fn boundary_quotient(f1: &MatrixLaurentPoly, f2: &MatrixLaurentPoly, d: Domain, n: usize) -> (f64, f64) {
    let mut first: Option<CMatrix> = None;
    let (mut spread, mut unitary) = (0.0f64, 0.0f64);
    for z in d.boundary_grid(n) {
        let q = match (f1.eval(z), f2.eval(z)) {
            (Ok(a1), Ok(a2)) => a2.try_inverse().map(|inv| inv * a1),
            _ => None,
        };
        let Some(q) = q else {
            return (f64::INFINITY, f64::INFINITY);
        };
        let m = q.nrows();
        unitary = unitary.max(matrix_norm_fro(&(&q * q.adjoint() - CMatrix::identity(m, m))));
        match &first {
            None => first = Some(q),
            Some(q0) => spread = spread.max(matrix_norm_fro(&(&q - q0))),
        }
    }
    (spread, unitary)
}

/// Checks a line factorization through the Cayley map `z = i(1+w)/(1-w)`:
/// the product must match at images of circle points, and no root of
/// `det P` may be the image of a point inside the unit disc.
pub fn mobius_cross_check(
    s: &MatrixLaurentPoly,
    f: &SpectralFactor,
    profile: &ToleranceProfile,
    samples: usize,
) -> VerificationReport {
    let plus = &f.plus;
    if plus.dim() != s.dim() {
        return VerificationReport::failed(format!("dimension mismatch: {} vs {}", plus.dim(), s.dim()));
    }
    let points: Vec<C64> = (0..samples)
        .map(|k| {
            let w = C64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / samples as f64);
            I * (ONE + w) / (ONE - w)
        })
        .collect();
    let mut report = VerificationReport {
        recon_residual: grid_residual(s, plus, &points),
        ..Default::default()
    };
    report.max_root_violation = match plus.det_poly().and_then(|p| if p.is_zero() { Ok(None) } else { p.roots().map(Some) }) {
        Ok(Some(roots)) => roots
            .into_iter()
            .map(|z| 1.0 - ((z - I) / (z + I)).norm())
            .fold(0.0, f64::max),
        _ => f64::INFINITY,
    };
    report.judge(profile)
}

/// Smallest eigenvalue of `S(z)` over the boundary grid. Passes when it is
/// at least `-EPS_PSD` times the largest eigenvalue magnitude.
pub fn positivity_screen(s: &MatrixLaurentPoly, d: Domain, grid: usize) -> Result<VerificationReport> {
    let deviation = s.self_adjoint_deviation(d);
    if deviation > EPS_HERM {
        return Err(Error::NotSelfAdjoint(deviation));
    }
    let mut min = f64::INFINITY;
    let mut scale = 0.0f64;
    for z in d.boundary_grid(grid) {
        let a = s.eval(z)?;
        let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        for &ev in h.symmetric_eigenvalues().iter() {
            min = min.min(ev);
            scale = scale.max(ev.abs());
        }
    }
    let pass = min >= -EPS_PSD * scale;
    Ok(VerificationReport {
        min_eigenvalue: Some(min),
        scale,
        pass,
        failures: if pass { Vec::new() } else { vec![format!("minimum eigenvalue {min:.3e} is negative")] },
        ..Default::default()
    })
}

/// Whether some root of `det S` lies within `tol` of the boundary, which
/// calls for the relaxed profile.
pub fn has_boundary_zero(s: &MatrixLaurentPoly, d: Domain, tol: f64) -> bool {
    if s.is_zero() {
        return false;
    }
    let shifted = match d {
        Domain::Disc => MatrixLaurentPoly::new(s.dim(), 0, s.coeffs().to_vec()),
        Domain::Line => Ok(s.clone()),
    };
    let roots = shifted.and_then(|p| p.det_poly()).and_then(|p| if p.is_zero() { Ok(Vec::new()) } else { p.roots() });
    match roots {
        // det S has double boundary roots, which the root finder only
        // resolves to about the square root of the working precision
        Ok(roots) => roots.iter().any(|&r| d.depth(r).abs() <= tol.max(1e-6)),
        Err(_) => false,
    }
}

/// The profile a factor of `s` is accepted under: the default one with the
/// reconstruction threshold set to `tol`, or the relaxed one when `det S`
/// vanishes on the boundary. Only the input is consulted, so a tampered
/// certificate cannot loosen the check.
pub fn acceptance_profile(s: &MatrixLaurentPoly, d: Domain, tol: f64) -> ToleranceProfile {
    if has_boundary_zero(s, d, EPS_DEGENERATE) {
        let relaxed = ToleranceProfile::BOUNDARY_DEGENERATE;
        ToleranceProfile { recon: relaxed.recon.max(tol), ..relaxed }
    } else {
        ToleranceProfile { recon: tol, ..ToleranceProfile::DEFAULT }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfact::FactorizationCertificate;
    use crate::polycore::LaurentPoly;

    fn scalar(lo: i32, c: &[f64]) -> MatrixLaurentPoly {
        MatrixLaurentPoly::from_entries(1, &[LaurentPoly::from_real(lo, c)]).unwrap()
    }

    fn factor(plus: MatrixLaurentPoly) -> SpectralFactor {
        let m = plus.dim();
        SpectralFactor { plus, certificate: FactorizationCertificate::empty(m) }
    }

    fn check(s: &MatrixLaurentPoly, p: MatrixLaurentPoly, d: Domain) -> VerificationReport {
        verify_factorization(s, &factor(p), d, &ToleranceProfile::DEFAULT, 128)
    }

    #[test]
    fn good_scalar_factor_passes() {
        let r = check(&scalar(-1, &[1.0, 2.0, 1.0]), scalar(0, &[1.0, 1.0]), Domain::Disc);
        assert!(r.pass, "{r:?}");
        assert!(r.recon_residual < 1e-15);
    }

    #[test]
    fn negative_power_fails() {
        let r = check(&scalar(-1, &[1.0, 2.0, 1.0]), scalar(-1, &[1.0, 1.0]), Domain::Disc);
        assert!(!r.pass);
    }

    #[test]
    fn wrong_root_side_fails_despite_reconstruction() {
        let r = check(&scalar(-1, &[2.0, 5.0, 2.0]), scalar(0, &[1.0, 2.0]), Domain::Disc);
        assert!(r.recon_residual < 1e-15);
        assert!((r.max_root_violation - 0.5).abs() < 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn quotient_comparison() {
        let a = factor(scalar(0, &[1.0, 1.0]));
        assert!(compare_up_to_unitary(&a, &a, Domain::Disc, &ToleranceProfile::DEFAULT).pass);
        let v = CMatrix::from_element(1, 1, C64::from_polar(1.0, 0.7));
        let av = factor(a.plus.mul_constant(&v));
        assert!(compare_up_to_unitary(&av, &a, Domain::Disc, &ToleranceProfile::DEFAULT).pass);
        let b = factor(scalar(0, &[2.0, 1.0]));
        assert!(!compare_up_to_unitary(&a, &b, Domain::Disc, &ToleranceProfile::DEFAULT).pass);
        let (spread, _) = boundary_quotient(&a.plus, &b.plus, Domain::Disc, 16);
        assert!(spread > 0.1);
    }

    #[test]
    fn mobius_check() {
        let s = scalar(0, &[1.0, 0.0, 1.0]);
        let good = MatrixLaurentPoly::from_entries(1, &[LaurentPoly::new(0, vec![I, ONE])]).unwrap();
        let bad = MatrixLaurentPoly::from_entries(1, &[LaurentPoly::new(0, vec![-I, ONE])]).unwrap();
        assert!(mobius_cross_check(&s, &factor(good), &ToleranceProfile::DEFAULT, 16).pass);
        assert!(!mobius_cross_check(&s, &factor(bad), &ToleranceProfile::DEFAULT, 16).pass);
        let one = scalar(0, &[1.0]);
        assert!(mobius_cross_check(&one, &factor(one.clone()), &ToleranceProfile::DEFAULT, 16).pass);
    }

    #[test]
    fn positivity() {
        let r = positivity_screen(&MatrixLaurentPoly::identity(2), Domain::Disc, 64).unwrap();
        assert!(r.pass && (r.min_eigenvalue.unwrap() - 1.0).abs() < 1e-15);
        let r = positivity_screen(&scalar(-1, &[1.0, 2.0, 1.0]), Domain::Disc, 64).unwrap();
        assert!(r.pass && r.min_eigenvalue.unwrap().abs() < 1e-12);
        assert!(!positivity_screen(&scalar(0, &[-1.0]), Domain::Disc, 64).unwrap().pass);
        assert!(matches!(positivity_screen(&scalar(0, &[0.0, 1.0]), Domain::Disc, 64), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn boundary_zero_detection() {
        assert!(has_boundary_zero(&scalar(-1, &[1.0, 2.0, 1.0]), Domain::Disc, 1e-5));
        assert!(!has_boundary_zero(&scalar(-1, &[2.0, 5.0, 2.0]), Domain::Disc, 1e-5));
        assert!(has_boundary_zero(&scalar(0, &[0.0, 0.0, 1.0]), Domain::Line, 1e-5));
    }
}
