use proptest::prelude::*;
use specfact::polycore::{EPS_CANCEL, EPS_TRIM};
use specfact::{CMatrix, Domain, LaurentPoly, MatrixLaurentPoly, Poly, RationalFn, C64};

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn domain() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::Disc), Just(Domain::Line)]
}

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    (-4..=4i32, prop::collection::vec(c64(), 1..=9)).prop_map(|(lo, c)| LaurentPoly::new(lo, c))
}

fn matrix_laurent() -> impl Strategy<Value = MatrixLaurentPoly> {
    (1..=3usize, -3..=3i32, 1..=5usize).prop_flat_map(|(m, lo, n)| {
        prop::collection::vec(c64(), m * m * n).prop_map(move |v| {
            let coeffs = v.chunks(m * m).map(|c| CMatrix::from_row_slice(m, m, c)).collect();
            MatrixLaurentPoly::new(m, lo, coeffs).unwrap()
        })
    })
}

fn boundary_point(d: Domain, t: f64) -> C64 {
    match d {
        Domain::Disc => C64::from_polar(1.0, std::f64::consts::TAU * t),
        Domain::Line => C64::new(10.0 * (2.0 * t - 1.0), 0.0),
    }
}

/// `lead * prod (z - r)`, expanded one root at a time.
fn expand(roots: &[C64], lead: C64) -> Vec<C64> {
    let mut c = vec![lead];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c
}

fn separated(roots: &[C64], sep: f64) -> bool {
    roots.iter().enumerate().all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() >= sep))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn adjoint_is_an_involution(f in laurent(), d in domain()) {
        let back = f.adjoint(d).adjoint(d);
        let lo = f.lo().min(back.lo());
        let hi = f.hi().max(back.hi());
        for n in lo..=hi {
            prop_assert!((back.coeff(n) - f.coeff(n)).norm() <= EPS_TRIM);
        }
    }

    #[test]
    fn matrix_adjoint_is_an_involution(f in matrix_laurent(), d in domain()) {
        let back = f.adjoint(d).adjoint(d);
        prop_assert_eq!(back.dim(), f.dim());
        for n in f.lo()..=f.hi() {
            prop_assert!((back.coeff(n) - f.coeff(n)).iter().all(|x| x.norm() <= EPS_TRIM));
        }
    }

    #[test]
    fn adjoint_is_conjugation_on_the_boundary(
        f in laurent(),
        d in domain(),
        ts in prop::collection::vec(0.0..1.0f64, 100),
    ) {
        let adj = f.adjoint(d);
        for t in ts {
            let z = boundary_point(d, t);
            if d == Domain::Line && z.norm() < 1e-3 && f.lo() < 0 {
                continue;
            }
            let fz = f.eval(z).unwrap();
            let az = adj.eval(z).unwrap();
            prop_assert!((az - fz.conj()).norm() <= 1e-10 * (1.0 + fz.norm()), "z = {z}");
        }
    }

    #[test]
    fn matrix_adjoint_is_hermitian_conjugate_on_the_boundary(
        f in matrix_laurent(),
        d in domain(),
        t in 0.0..1.0f64,
    ) {
        let z = boundary_point(d, t);
        prop_assume!(d == Domain::Disc || z.norm() > 1e-3);
        let fz = f.eval(z).unwrap();
        let az = f.adjoint(d).eval(z).unwrap();
        let scale = 1.0 + fz.norm();
        prop_assert!((az - fz.adjoint()).norm() <= 1e-10 * scale);
    }

    #[test]
    fn roots_rebuild_the_polynomial(
        roots in prop::collection::vec(c64().prop_map(|z| z * 2.0), 1..=12)
            .prop_filter("separated roots", |r| separated(r, 1e-3)),
        lead in c64().prop_filter("nonzero", |z| z.norm() > 0.1),
    ) {
        let p = Poly::new(expand(&roots, lead));
        let found = p.roots().unwrap();
        prop_assert_eq!(found.len(), roots.len());
        let rebuilt = expand(&found, p.leading());
        let scale = p.max_abs();
        let err = rebuilt.iter().zip(p.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-8 * scale, "relative error {}", err / scale);
    }

    #[test]
    fn normalization_separates_zeros_from_poles(
        zeros in prop::collection::vec(c64(), 0..6),
        poles in prop::collection::vec(c64(), 0..6),
        near in prop::collection::vec((0usize..6, 0usize..6, 0.0..2e-7f64, 0.0..1.0f64), 0..4),
        gain in c64().prop_filter("nonzero", |z| z.norm() > 0.1),
    ) {
        // push some zeros to within a few multiples of the cancellation radius of a pole
        let mut zeros = zeros;
        for (i, j, r, t) in near {
            if i < zeros.len() && j < poles.len() {
                zeros[i] = poles[j] + C64::from_polar(r, std::f64::consts::TAU * t);
            }
        }
        let f = RationalFn::from_parts(gain, 0, zeros, poles);
        for z in f.all_zeros() {
            for p in f.all_poles() {
                prop_assert!((z - p).norm() >= EPS_CANCEL, "zero {z} pole {p}");
            }
        }
    }

    #[test]
    fn arithmetic_results_stay_normalized(
        a in laurent(),
        b in laurent(),
        c in laurent(),
    ) {
        let (a, b, c) = (a.to_rational().unwrap(), b.to_rational().unwrap(), c.to_rational().unwrap());
        prop_assume!(!c.is_zero());
        let f = &(&a * &b.inv().unwrap_or_else(|_| RationalFn::one())) + &c.inv().unwrap();
        for z in f.all_zeros() {
            for p in f.all_poles() {
                prop_assert!((z - p).norm() >= EPS_CANCEL);
            }
        }
    }
}
