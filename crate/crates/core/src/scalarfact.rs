//! Scalar spectral factorization: the Fejér-Riesz lemma on the circle, its
//! analogue on the line, and the rational square root used on the diagonal
//! of the rational Cholesky factorization.

use crate::error::{Error, Result};
use crate::polycore::{Domain, LaurentPoly, Poly, RationalFn, C64, ONE, ZERO};

/// Roots closer than this to the boundary count as boundary roots.
pub const EPS_BOUNDARY: f64 = 1e-7;
/// Relative tolerance for pairing a root with its reflection.
pub const EPS_PAIR: f64 = 1e-6;
/// Allowed negativity on the boundary, relative to the sup norm.
pub const EPS_PSD: f64 = 1e-9;
/// Allowed deviation from self-adjointness, relative to the largest coefficient.
pub const EPS_HERM: f64 = 1e-9;
/// Boundary grid size used for positivity screening.
pub const SCREEN_GRID: usize = 512;

#[derive(Clone, Debug)]
pub struct ScalarFactorResult {
    /// The factor `p` with `p * adjoint(p) = s`, nonvanishing in the interior.
    pub factor: Poly,
    /// Positive scale such that `factor = gain * phase * prod(z - r)`.
    pub gain: f64,
    /// Roots of the factor lying on the boundary.
    pub boundary_roots: Vec<C64>,
}

/// Spectral factor of a scalar Laurent polynomial nonnegative on the boundary.
///
/// Disc: `s` must be self-adjoint; the factor is a polynomial of degree
/// `hi(s)` whose roots satisfy `|r| >= 1`, with `factor(0) > 0`.
/// Line: `s` must be a polynomial with real coefficients; the factor has
/// roots in the closed lower half plane and a positive leading coefficient.
pub fn fejer_riesz(s: &LaurentPoly, d: Domain) -> Result<ScalarFactorResult> {
    if s.is_zero() {
        return Err(Error::SingularPrincipalMinor(0));
    }
    let deviation = (s - &s.adjoint(d)).max_abs() / s.max_abs();
    if deviation > EPS_HERM {
        return Err(Error::NotSelfAdjoint(deviation));
    }
    if d == Domain::Line && s.lo() < 0 {
        return Err(Error::NotSelfAdjoint(f64::INFINITY));
    }
    screen_nonnegative(|z| s.eval(z).ok(), d)?;
    let (half, boundary_roots) = half_factor(&s.to_rational()?, d)?;
    let factor = half.to_poly().expect("factor of a Laurent polynomial has no poles");
    let gain = half.gain().norm();
    Ok(ScalarFactorResult {
        factor,
        gain,
        boundary_roots,
    })
}

/// Spectral factor of a self-adjoint rational function nonnegative on the
/// boundary: a rational `q` with `q * adjoint(q) = a`, zeros and poles off
/// the open interior, and the same phase normalization as [`fejer_riesz`].
pub fn rational_sqrt(a: &RationalFn, d: Domain) -> Result<RationalFn> {
    if a.is_zero() {
        return Err(Error::SingularPrincipalMinor(0));
    }
    screen_nonnegative(|z| a.eval(z).ok(), d)?;
    half_factor(a, d).map(|(q, _)| q)
}

/// Checks `Re f >= -EPS_PSD * sup|f|` on the screening grid, skipping
/// points where `f` cannot be evaluated (boundary poles).
fn screen_nonnegative(f: impl Fn(C64) -> Option<C64>, d: Domain) -> Result<()> {
    let values: Vec<C64> = d.boundary_grid(SCREEN_GRID).into_iter().filter_map(f).collect();
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min = values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    if min < -EPS_PSD * scale {
        return Err(Error::NegativeOnBoundary { min, scale });
    }
    Ok(())
}

/// Pairs each root with its reflection and keeps the member outside the
/// interior. Boundary pairs contribute one projected root each.
fn select_half(roots: &[C64], d: Domain) -> Result<(Vec<C64>, Vec<C64>)> {
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| d.depth(roots[b]).total_cmp(&d.depth(roots[a])));
    let mut used = vec![false; roots.len()];
    let mut keep = Vec::new();
    let mut boundary = Vec::new();
    for &i in &order {
        if used[i] {
            continue;
        }
        used[i] = true;
        let r = roots[i];
        let target = d.reflect(r);
        let tol = EPS_PAIR * target.norm().max(1.0);
        let partner = (0..roots.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (roots[j] - target).norm()))
            .filter(|&(_, dist)| dist <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, _)) = partner else {
            return Err(Error::UnpairedRoot(r));
        };
        used[j] = true;
        let p = roots[j];
        if d.depth(r).abs() <= EPS_BOUNDARY && d.depth(p).abs() <= EPS_BOUNDARY {
            let on = d.project((r + p) * 0.5);
            keep.push(on);
            boundary.push(on);
        } else if d.depth(r) < d.depth(p) {
            keep.push(r);
        } else {
            keep.push(p);
        }
    }
    Ok((keep, boundary))
}

/// Core of both scalar factorizations, on the factored form of `f`.
fn half_factor(f: &RationalFn, d: Domain) -> Result<(RationalFn, Vec<C64>)> {
    let (zeros, mut boundary) = select_half(f.zeros(), d)?;
    let (poles, _) = select_half(f.poles(), d)?;
    let shift = match d {
        // origin zeros pair with zeros at infinity, which the factor keeps
        Domain::Disc => 0,
        Domain::Line => {
            if f.shift() % 2 != 0 {
                return Err(Error::UnpairedRoot(ZERO));
            }
            if f.shift() > 0 {
                boundary.extend(std::iter::repeat(ZERO).take(f.shift() as usize / 2));
            }
            f.shift() / 2
        }
    };
    let monic = RationalFn::from_parts(ONE, shift, zeros, poles);
    let c = boundary_ratio(f, &monic, d)?;
    let mut q = monic.scale(C64::new(c.sqrt(), 0.0));
    if d == Domain::Disc {
        let at0 = q.eval(ZERO)?;
        if at0 != ZERO {
            q = q.scale((at0 / at0.norm()).conj());
        }
    }
    Ok((q, boundary))
}

/// The positive constant `c` with `f = c * g * adjoint(g)`, averaged over
/// boundary points where `g` is well away from zero.
fn boundary_ratio(f: &RationalFn, g: &RationalFn, d: Domain) -> Result<f64> {
    let pts = match d {
        Domain::Disc => d.boundary_grid(64),
        Domain::Line => (0..64).map(|k| C64::new(-4.0 + 8.0 * (k as f64 + 0.5) / 64.0, 0.0)).collect(),
    };
    let samples: Vec<(f64, C64)> = pts
        .into_iter()
        .filter_map(|z| Some((g.eval(z).ok()?.norm_sqr(), f.eval(z).ok()?)))
        .collect();
    let top = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let (sum, count) = samples
        .iter()
        .filter(|s| s.0 > 1e-6 * top)
        .fold((0.0, 0usize), |(acc, n), (g2, fv)| (acc + fv.re / g2, n + 1));
    let c = sum / count.max(1) as f64;
    if !(c > 0.0) {
        return Err(Error::NegativeOnBoundary { min: c, scale: 1.0 });
    }
    Ok(c)
}
