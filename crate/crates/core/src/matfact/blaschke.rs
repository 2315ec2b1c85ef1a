use serde::{Deserialize, Serialize};

use crate::polycore::{Domain, RationalFn, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BlaschkeKind {
    /// Cancels a pole at `a` in the interior.
    PoleClear,
    /// Cancels a determinant zero at `a` in the interior.
    ZeroClear,
}

/// Elementary paraunitary multiplier applied to one column.
///
/// | domain | pole clearing          | zero clearing          |
/// |--------|------------------------|------------------------|
/// | disc   | `(z - a)/(1 - conj(a) z)` | `(1 - conj(a) z)/(z - a)` |
/// | line   | `(z - a)/(z - conj(a))`   | `(z - conj(a))/(z - a)`   |
///
/// `a` lies in the interior: `|a| < 1`, or `Im a > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlaschkeFactor {
    pub a: C64,
    pub domain: Domain,
    pub kind: BlaschkeKind,
    pub column: usize,
}

impl BlaschkeFactor {
    pub fn new(a: C64, domain: Domain, kind: BlaschkeKind, column: usize) -> Self {
        BlaschkeFactor { a, domain, kind, column }
    }

    /// The multiplier as a rational function.
    pub fn as_rational(&self) -> RationalFn {
        let clear_pole = match self.domain {
            Domain::Disc if self.a == ZERO => RationalFn::monomial(1),
            Domain::Disc => RationalFn::from_parts(-ONE / self.a.conj(), 0, vec![self.a], vec![ONE / self.a.conj()]),
            Domain::Line => RationalFn::from_parts(ONE, 0, vec![self.a], vec![self.a.conj()]),
        };
        match self.kind {
            BlaschkeKind::PoleClear => clear_pole,
            BlaschkeKind::ZeroClear => clear_pole.inv().expect("Blaschke factor is nonzero"),
        }
    }

    /// Direct evaluation from the defining formula.
    pub fn eval(&self, z: C64) -> C64 {
        let a = self.a;
        let (num, den) = match self.domain {
            Domain::Disc => (z - a, ONE - a.conj() * z),
            Domain::Line => (z - a, z - a.conj()),
        };
        match self.kind {
            BlaschkeKind::PoleClear => num / den,
            BlaschkeKind::ZeroClear => den / num,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_and_rational_agree() {
        let pts = [C64::new(0.2, 0.9), C64::new(-1.3, 0.4), C64::new(2.0, -2.0)];
        for d in [Domain::Disc, Domain::Line] {
            for kind in [BlaschkeKind::PoleClear, BlaschkeKind::ZeroClear] {
                for a in [C64::new(0.3, 0.4), d.anchor()] {
                    let b = BlaschkeFactor::new(a, d, kind, 0);
                    let r = b.as_rational();
                    for &z in &pts {
                        assert!((r.eval(z).unwrap() - b.eval(z)).norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn unimodular_on_boundary() {
        let b = BlaschkeFactor::new(C64::new(0.5, -0.2), Domain::Disc, BlaschkeKind::PoleClear, 1);
        for z in Domain::Disc.boundary_grid(16) {
            assert!((b.eval(z).norm() - 1.0).abs() < 1e-14);
        }
    }

}
