use super::blaschke::{BlaschkeFactor, BlaschkeKind};
use super::kernel::{kernel_unitary_scaled, Completion};
use crate::error::{Error, Result};
use std::f64::consts::TAU;

use crate::polycore::{
    interpolate_on_circle, lcm_roots, match_pairs, matrix_norm_fro, CMatrix, Domain, Poly, RationalFn, RationalMatrix, C64,
    EPS_CANCEL, EPS_EVAL, EPS_TRIM, ONE, ZERO,
};
use crate::scalarfact::EPS_BOUNDARY;

/// Zeros this close to the boundary that resist clearing are reported as
/// boundary zeros rather than as a rank failure.
const NEAR_BOUNDARY: f64 = 1e-4;

/// Order in which the pole sweep visits columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ColumnOrder {
    #[default]
    Forward,
    Reverse,
}

/// One multiplication `S <- S * U * diag(.., u, ..)` of a sweep.
#[derive(Clone, Debug)]
pub struct SweepStep {
    pub factor: BlaschkeFactor,
    /// Constant unitary applied before the Blaschke factor (zero sweep only).
    pub unitary: Option<CMatrix>,
    /// Relative change of the boundary product `S * adjoint(S)`.
    pub product_residual: f64,
    /// Interior determinant zeros, with multiplicity, before and after (zero sweep only).
    pub zeros_before: Option<usize>,
    pub zeros_after: Option<usize>,
}

/// Boundary samples of `S * adjoint(S)` for a sweep's input.
pub(crate) struct ProductMonitor {
    points: Vec<C64>,
    reference: Vec<CMatrix>,
}

impl ProductMonitor {
    pub(crate) fn new(s: &RationalMatrix, d: Domain, grid: usize) -> Result<Self> {
        let points = d.boundary_grid(grid);
        let reference = points
            .iter()
            .map(|&z| s.eval(z).map(|v| &v * v.adjoint()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductMonitor { points, reference })
    }

    /// Max over the grid of `|S S* - ref|_F / (1 + |ref|_F)`.
    pub(crate) fn residual(&self, s: &RationalMatrix) -> f64 {
        self.residual_of(|z| s.eval(z))
    }

    fn residual_of(&self, eval: impl Fn(C64) -> Result<CMatrix>) -> f64 {
        self.points
            .iter()
            .zip(&self.reference)
            .map(|(&z, r)| match eval(z) {
                Ok(v) => matrix_norm_fro(&(&v * v.adjoint() - r)) / (1.0 + matrix_norm_fro(r)),
                Err(_) => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

/// Removes every interior pole of `s0` by right-multiplying columns with
/// pole-clearing Blaschke factors, one factor per pole and multiplicity.
pub fn sweep_poles(
    s0: &RationalMatrix,
    d: Domain,
    order: ColumnOrder,
    grid: usize,
) -> Result<(RationalMatrix, Vec<SweepStep>)> {
    let m = s0.dim();
    let mut total_poles = 0;
    for f in s0.entries() {
        for p in f.all_poles() {
            if d.depth(p).abs() <= EPS_BOUNDARY {
                return Err(Error::PoleOnBoundary(p));
            }
            total_poles += 1;
        }
    }
    let monitor = ProductMonitor::new(s0, d, grid)?;
    let cols: Vec<usize> = match order {
        ColumnOrder::Forward => (0..m).collect(),
        ColumnOrder::Reverse => (0..m).rev().collect(),
    };
    let mut s = s0.clone();
    let mut steps = Vec::new();
    for j in cols {
        while let Some(a) = interior_pole_in_column(&s, j, d) {
            if steps.len() > 2 * total_poles + m {
                return Err(Error::IterationLimitExceeded(steps.len()));
            }
            let factor = BlaschkeFactor::new(a, d, BlaschkeKind::PoleClear, j);
            s = s.scale_column(j, &factor.as_rational());
            steps.push(SweepStep {
                factor,
                unitary: None,
                product_residual: monitor.residual(&s),
                zeros_before: None,
                zeros_after: None,
            });
        }
    }
    Ok((s, steps))
}

/// Deepest interior pole of the first entry in column `j` that has one.
fn interior_pole_in_column(s: &RationalMatrix, j: usize, d: Domain) -> Option<C64> {
    (0..s.dim()).find_map(|i| {
        s.get(i, j)
            .all_poles()
            .into_iter()
            .filter(|&p| d.depth(p) > EPS_BOUNDARY)
            .max_by(|a, b| d.depth(*a).total_cmp(&d.depth(*b)))
    })
}

/// Removes interior zeros of the determinant of a matrix that is already
/// analytic in the interior.
///
/// Each step picks the deepest interior zero `a`, rotates a null vector of
/// `S(a)` into the first column with a constant unitary, and divides that
/// column by the zero with a zero-clearing Blaschke factor. The determinant
/// is recomputed from scratch every step.
///
/// Internally the matrix is held as `N(z) / q(z)` with a polynomial matrix
/// `N` and a scalar `q` whose roots are all exterior, so the rotation is a
/// constant matrix product and the clearing step is a synthetic division
/// of one column by `z - a`.
pub fn sweep_det_zeros(
    s0: &RationalMatrix,
    d: Domain,
    completion: Completion,
    grid: usize,
    cap: Option<usize>,
) -> Result<(RationalMatrix, Vec<SweepStep>)> {
    let m = s0.dim();
    let monitor = ProductMonitor::new(s0, d, grid)?;
    let mut s = OverDenominator::from_rational(s0, d)?;
    let det0 = s0.det()?;
    if det0.is_zero() {
        return Err(Error::SingularPrincipalMinor(m));
    }
    let det_degree = det0.zeros().len() + det0.shift().max(0) as usize;
    let mut steps: Vec<SweepStep> = Vec::new();
    let mut cap = cap;
    loop {
        let zeros = s.interior_det_zeros(det0.poles(), det_degree)?;
        let count = zeros.len();
        if let Some(last) = steps.last_mut() {
            last.zeros_after = Some(count);
        }
        let limit = *cap.get_or_insert(4 * m * count.max(1));
        if count == 0 {
            break;
        }
        if steps.len() >= limit {
            return Err(Error::IterationLimitExceeded(limit));
        }
        let a = zeros
            .iter()
            .copied()
            .max_by(|x, y| d.depth(*x).total_cmp(&d.depth(*y)))
            .unwrap();
        let a = polish_zero(|z| Some(s.numerator_at(z).determinant()), a);
        let u = kernel_unitary_scaled(&s.numerator_at(a), s.numerator_bound(a), completion).map_err(|e| match e {
            Error::NotSingular { .. } if d.depth(a) < NEAR_BOUNDARY => Error::ZeroOnBoundaryUnresolvable(a),
            other => other,
        })?;
        let factor = BlaschkeFactor::new(a, d, BlaschkeKind::ZeroClear, 0);
        s.mul_constant(&u);
        s.clear_zero(0, a);
        steps.push(SweepStep {
            factor,
            unitary: Some(u),
            product_residual: monitor.residual_of(|z| s.eval(z)),
            zeros_before: Some(count),
            zeros_after: None,
        });
    }
    Ok((s.into_rational(), steps))
}

/// Linear factor for a root `r`, scaled to keep coefficients bounded:
/// `z - r` when `|r| <= 1`, `1 - z/r` otherwise.
fn unit_factor(r: C64) -> Poly {
    if r.norm() <= 1.0 {
        Poly::new(vec![-r, ONE])
    } else {
        Poly::new(vec![ONE, -ONE / r])
    }
}

/// `unit_factor(r) / (z - r)`.
fn unit_factor_scale(r: C64) -> C64 {
    if r.norm() <= 1.0 {
        ONE
    } else {
        -ONE / r
    }
}

/// A rational matrix `N(z) / q(z)` over a single scalar denominator.
struct OverDenominator {
    m: usize,
    d: Domain,
    /// Row-major numerators.
    num: Vec<Poly>,
    /// Roots of `q = prod unit_factor(r)`, all exterior.
    den: Vec<C64>,
}

impl OverDenominator {
    fn from_rational(s: &RationalMatrix, d: Domain) -> Result<Self> {
        let m = s.dim();
        let den = lcm_roots(s.entries().iter().map(|f| f.poles()));
        if let Some(&p) = den.iter().find(|&&p| d.depth(p) > -EPS_BOUNDARY) {
            return Err(Error::PoleOnBoundary(p));
        }
        let mut num = Vec::with_capacity(m * m);
        for (k, f) in s.entries().iter().enumerate() {
            if f.is_zero() {
                num.push(Poly::zero());
                continue;
            }
            if f.shift() < 0 {
                return Err(Error::ResidualDenominator { row: k / m, col: k % m });
            }
            let mut used = vec![false; den.len()];
            for (_, j) in match_pairs(f.poles(), &den, EPS_CANCEL) {
                used[j] = true;
            }
            let mut gain = f.gain();
            let mut p = Poly::one();
            for &z in f.zeros() {
                gain /= unit_factor_scale(z);
                p = &p * &unit_factor(z);
            }
            for &pole in f.poles() {
                gain *= unit_factor_scale(pole);
            }
            for (&r, _) in den.iter().zip(&used).filter(|(_, u)| !**u) {
                p = &p * &unit_factor(r);
            }
            num.push(p.shift(f.shift() as usize).scale(gain));
        }
        Ok(OverDenominator { m, d, num, den })
    }

    fn numerator_at(&self, z: C64) -> CMatrix {
        CMatrix::from_fn(self.m, self.m, |i, j| self.num[i * self.m + j].eval(z))
    }

    /// Frobenius bound on `N` at radius `|z|` from absolute coefficients.
    fn numerator_bound(&self, z: C64) -> f64 {
        let r = z.norm();
        self.num
            .iter()
            .map(|p| p.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn eval(&self, z: C64) -> Result<CMatrix> {
        let q: C64 = self.den.iter().map(|&r| unit_factor(r).eval(z)).product();
        if q.norm() <= EPS_EVAL {
            return Err(Error::PoleAtEvaluationPoint(z));
        }
        Ok(self.numerator_at(z) / q)
    }

    /// Interior zeros of `det(N/q)`, with multiplicity.
    ///
    /// `den` holds the poles of the determinant and `degree` bounds the
    /// degree of its numerator; both are fixed for the whole sweep since a
    /// clearing step swaps `z - a` for a factor of the same degree. The
    /// numerator is recovered by interpolation at twice the needed number
    /// of points, and the surplus coefficients confirm the bound.
    fn interior_det_zeros(&self, den: &[C64], degree: usize) -> Result<Vec<C64>> {
        let n = 2 * (degree + 1);
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            let z = C64::from_polar(1.0, TAU * k as f64 / n as f64);
            let scaled: C64 = den.iter().map(|&p| unit_factor(p).eval(z)).product();
            values.push(self.eval(z)?.determinant() * scaled);
        }
        let full = interpolate_on_circle(&values);
        let head = full.coeffs().iter().take(degree + 1).map(|c| c.norm()).fold(0.0, f64::max);
        let tail = full.coeffs().iter().skip(degree + 1).map(|c| c.norm()).fold(0.0, f64::max);
        if head == 0.0 {
            return Err(Error::SingularPrincipalMinor(self.m));
        }
        if tail > EPS_CANCEL * head {
            return Err(Error::ResidualDenominator { row: 0, col: 0 });
        }
        let det = Poly::new(full.coeffs()[..full.coeffs().len().min(degree + 1)].to_vec()).trim(EPS_TRIM);
        Ok(det.roots()?.into_iter().filter(|&z| self.d.depth(z) > EPS_BOUNDARY).collect())
    }

    fn mul_constant(&mut self, u: &CMatrix) {
        let m = self.m;
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = Poly::zero();
                for k in 0..m {
                    if u[(k, j)] != ZERO {
                        acc = &acc + &self.num[i * m + k].scale(u[(k, j)]);
                    }
                }
                out.push(acc);
            }
        }
        self.num = out;
    }

    /// Multiplies column `j` by the zero-clearing factor at `a`.
    fn clear_zero(&mut self, j: usize, a: C64) {
        let reflected = match self.d {
            Domain::Disc => Poly::new(vec![ONE, -a.conj()]),
            Domain::Line => Poly::new(vec![-a.conj(), ONE]),
        };
        for i in 0..self.m {
            let k = i * self.m + j;
            self.num[k] = &self.num[k].deflate(a) * &reflected;
        }
    }

    /// [`Self::clear_zero`], after checking that column `j` vanishes at `a`
    /// relative to the size of `N` there.
    fn clear_zero_checked(&mut self, j: usize, a: C64) -> Result<()> {
        let norm = self.numerator_bound(a);
        let sigma = (0..self.m)
            .map(|i| self.num[i * self.m + j].eval(a).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if sigma > EPS_CANCEL * norm {
            return Err(Error::NotSingular { sigma, norm });
        }
        self.clear_zero(j, a);
        Ok(())
    }

    /// Divides `q` out of every entry. Entries where some root of `q` does
    /// not divide the numerator (relative remainder above `EPS_CANCEL`)
    /// stay rational.
    fn into_rational(self) -> RationalMatrix {
        let q_gain: C64 = self.den.iter().map(|&r| ONE / unit_factor_scale(r)).product();
        let entries = self
            .num
            .iter()
            .map(|n| match divide_out(n, &self.den) {
                Some(p) => RationalFn::from_poly(&p.trim(EPS_TRIM)),
                None => RationalFn::from_poly(n)
                    .map(|f| &f * &RationalFn::from_parts(q_gain, 0, Vec::new(), self.den.clone())),
            })
            .map(|f| f.unwrap_or_else(|_| RationalFn::zero()))
            .collect();
        RationalMatrix::from_entries(self.m, entries).expect("m * m entries")
    }
}

/// `n / prod unit_factor(r)` when every division is exact up to a
/// relative remainder of `EPS_CANCEL`.
fn divide_out(n: &Poly, roots: &[C64]) -> Option<Poly> {
    let mut p = n.clone();
    for &r in roots {
        if p.is_zero() {
            return Some(p);
        }
        let scale: f64 = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * r.norm() + c.norm());
        if p.eval(r).norm() > EPS_CANCEL * scale {
            return None;
        }
        p = p.deflate(r).scale(ONE / unit_factor_scale(r));
    }
    Some(p)
}

/// Newton iteration on a determinant evaluated directly, which is far more
/// accurate than the roots of the interpolated determinant. The derivative
/// comes from a central difference; it only affects the rate.
fn polish_zero(det: impl Fn(C64) -> Option<C64>, a: C64) -> C64 {
    let Some(mut best) = det(a).map(|v| v.norm()) else {
        return a;
    };
    let mut z = a;
    for _ in 0..8 {
        let h = 1e-6 * (1.0 + z.norm());
        let (Some(g), Some(gp), Some(gm)) = (det(z), det(z + h), det(z - h)) else {
            break;
        };
        let dg = (gp - gm) / (2.0 * h);
        if dg == ZERO {
            break;
        }
        let next = z - g / dg;
        if (next - z).norm() > 1e-3 * (1.0 + z.norm()) {
            break;
        }
        match det(next).map(|v| v.norm()) {
            Some(v) if v < best => {
                best = v;
                z = next;
            }
            _ => break,
        }
    }
    z
}

/// A matrix part way through a transcript replay.
///
/// Zero-clearing steps leave the matrix over a common denominator, and
/// mid-sweep numerators need not divide it. Evaluating in that form avoids
/// the root finding that [`Replayed::into_rational`] needs.
pub struct Replayed(ReplayState);

enum ReplayState {
    Rational(RationalMatrix),
    Common(OverDenominator),
}

impl Replayed {
    pub fn dim(&self) -> usize {
        match &self.0 {
            ReplayState::Rational(r) => r.dim(),
            ReplayState::Common(c) => c.m,
        }
    }

    pub fn eval(&self, z: C64) -> Result<CMatrix> {
        match &self.0 {
            ReplayState::Rational(r) => r.eval(z),
            ReplayState::Common(c) => c.eval(z),
        }
    }

    pub fn into_rational(self) -> RationalMatrix {
        match self.0 {
            ReplayState::Rational(r) => r,
            ReplayState::Common(c) => c.into_rational(),
        }
    }
}

/// Re-applies a transcript to a starting matrix.
///
/// Pole-clearing steps scale a column of the rational matrix. Zero-clearing
/// steps run over a common denominator, as in [`sweep_det_zeros`], where the
/// division by `z - a` is checked: a step whose column does not vanish at
/// `a` is reported as [`Error::NotSingular`].
pub fn replay_transcript(s0: &RationalMatrix, steps: &[SweepStep]) -> Result<Replayed> {
    let mut state = ReplayState::Rational(s0.clone());
    for step in steps {
        let f = &step.factor;
        state = match f.kind {
            BlaschkeKind::PoleClear => {
                let mut s = Replayed(state).into_rational();
                if let Some(u) = &step.unitary {
                    s = s.mul_constant(u)?;
                }
                ReplayState::Rational(s.scale_column(f.column, &f.as_rational()))
            }
            BlaschkeKind::ZeroClear => {
                let mut c = match state {
                    ReplayState::Common(c) => c,
                    ReplayState::Rational(r) => OverDenominator::from_rational(&r, f.domain)?,
                };
                if let Some(u) = &step.unitary {
                    c.mul_constant(u);
                }
                c.clear_zero_checked(f.column, f.a)?;
                ReplayState::Common(c)
            }
        };
    }
    Ok(Replayed(state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{Poly, RationalFn, ONE};

    fn poly(c: &[f64]) -> RationalFn {
        RationalFn::from_poly(&Poly::from_real(c)).unwrap()
    }

    fn single(f: RationalFn) -> RationalMatrix {
        RationalMatrix::from_entries(1, vec![f]).unwrap()
    }

    #[test]
    fn pole_free_input_is_untouched() {
        let s = RationalMatrix::from_entries(2, vec![poly(&[1.0]), RationalFn::zero(), poly(&[0.0, 1.0]), poly(&[1.0])]).unwrap();
        let (out, steps) = sweep_poles(&s, Domain::Disc, ColumnOrder::Forward, 64).unwrap();
        assert!(steps.is_empty());
        assert!(out.approx_eq(&s, 0.0));
    }

    #[test]
    fn pole_at_origin_is_cleared_by_z() {
        // (1 + 2z)/z
        let f = poly(&[1.0, 2.0]).mul_monomial(-1);
        let (out, steps) = sweep_poles(&single(f), Domain::Disc, ColumnOrder::Forward, 64).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].factor.a, C64::new(0.0, 0.0));
        assert!(out.get(0, 0).approx_eq(&poly(&[1.0, 2.0]), 1e-14));
    }

    #[test]
    fn interior_pole_moves_outside() {
        // 1/(z - 1/2) becomes 1/(1 - z/2)
        let f = RationalFn::from_num_den(&Poly::from_real(&[1.0]), &Poly::from_real(&[-0.5, 1.0])).unwrap();
        let (out, steps) = sweep_poles(&single(f), Domain::Disc, ColumnOrder::Forward, 64).unwrap();
        assert_eq!(steps.len(), 1);
        assert!((steps[0].factor.a - C64::new(0.5, 0.0)).norm() < 1e-14);
        let want = RationalFn::from_num_den(&Poly::from_real(&[1.0]), &Poly::from_real(&[1.0, -0.5])).unwrap();
        assert!(out.get(0, 0).approx_eq(&want, 1e-12));
        assert!(steps[0].product_residual < 1e-12);
    }

    #[test]
    fn boundary_pole_is_rejected() {
        let f = RationalFn::from_num_den(&Poly::from_real(&[1.0]), &Poly::from_real(&[1.0, 1.0])).unwrap();
        assert!(matches!(
            sweep_poles(&single(f), Domain::Disc, ColumnOrder::Forward, 64),
            Err(Error::PoleOnBoundary(_))
        ));
    }

    #[test]
    fn scalar_zero_sweep() {
        // 1 + 2z has its zero at -1/2; the cleared factor is 2 + z
        let (out, steps) = sweep_det_zeros(&single(poly(&[1.0, 2.0])), Domain::Disc, Completion::Householder, 64, None).unwrap();
        assert_eq!(steps.len(), 1);
        assert!((steps[0].factor.a + C64::new(0.5, 0.0)).norm() < 1e-14);
        assert_eq!(steps[0].unitary.as_ref().unwrap()[(0, 0)], ONE);
        assert_eq!((steps[0].zeros_before, steps[0].zeros_after), (Some(1), Some(0)));
        assert!(out.get(0, 0).approx_eq(&poly(&[2.0, 1.0]), 1e-12), "{:?}", out.get(0, 0));
    }

    #[test]
    fn unimodular_determinant_needs_no_sweep() {
        let s = RationalMatrix::from_entries(2, vec![poly(&[1.0]), RationalFn::zero(), poly(&[0.0, 1.0]), poly(&[1.0])]).unwrap();
        let (_, steps) = sweep_det_zeros(&s, Domain::Disc, Completion::Householder, 64, None).unwrap();
        assert!(steps.is_empty());
    }

    #[test]
    fn replay_reproduces_sweep() {
        let f = RationalFn::from_num_den(&Poly::from_real(&[1.0, 2.0]), &Poly::from_real(&[0.0, -0.25, 1.0])).unwrap();
        let s0 = single(f);
        let (s1, mut steps) = sweep_poles(&s0, Domain::Disc, ColumnOrder::Forward, 64).unwrap();
        let (s2, more) = sweep_det_zeros(&s1, Domain::Disc, Completion::Householder, 64, None).unwrap();
        steps.extend(more);
        assert!(replay_transcript(&s0, &steps).unwrap().into_rational().approx_eq(&s2, 1e-10));
    }

    #[test]
    fn replay_rejects_a_step_that_clears_nothing() {
        // 1 + 2z vanishes at -1/2, not at 1/4
        let s0 = single(poly(&[1.0, 2.0]));
        let step = |a: f64| SweepStep {
            factor: BlaschkeFactor::new(C64::new(a, 0.0), Domain::Disc, BlaschkeKind::ZeroClear, 0),
            unitary: Some(CMatrix::identity(1, 1)),
            product_residual: 0.0,
            zeros_before: None,
            zeros_after: None,
        };
        assert!(replay_transcript(&s0, &[step(-0.5)]).unwrap().into_rational().get(0, 0).approx_eq(&poly(&[2.0, 1.0]), 1e-12));
        assert!(matches!(replay_transcript(&s0, &[step(0.25)]), Err(Error::NotSingular { .. })));
    }
}
