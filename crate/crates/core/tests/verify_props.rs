use proptest::prelude::*;
use specfact::generate::{generate, GenerateOptions};
use specfact::matfact::{factorize, ColumnOrder, Completion, PipelineOptions};
use specfact::verify::{compare_up_to_unitary, mobius_cross_check, verify_factorization, ToleranceProfile};
use specfact::{CMatrix, Domain, MatrixLaurentPoly, C64};

fn planted() -> impl Strategy<Value = (Domain, usize, usize, u64)> {
    (prop_oneof![Just(Domain::Disc), Just(Domain::Line)], 1..=3usize, 1..=4usize, any::<u64>())
}

fn spectrum(d: Domain, m: usize, n: usize, seed: u64) -> MatrixLaurentPoly {
    generate(&GenerateOptions { m, degree: n, seed, domain: d, boundary_zero: false }).unwrap().spectrum
}

const PROFILE: ToleranceProfile = ToleranceProfile::DEFAULT;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorizations_verify((d, m, n, seed) in planted()) {
        let s = spectrum(d, m, n, seed);
        let f = factorize(&s, d, &PipelineOptions::default()).unwrap();
        let report = verify_factorization(&s, &f, d, &PROFILE, 512);
        prop_assert!(report.pass, "{:?}", report.failures);
    }

    #[test]
    fn pipeline_variants_agree_up_to_unitary((d, m, n, seed) in planted()) {
        let s = spectrum(d, m, n, seed);
        let raw = PipelineOptions { canonical: false, ..PipelineOptions::default() };
        let f1 = factorize(&s, d, &raw).unwrap();
        let f2 = factorize(
            &s,
            d,
            &PipelineOptions { column_order: ColumnOrder::Reverse, completion: Completion::GramSchmidt, ..raw },
        )
        .unwrap();
        let report = compare_up_to_unitary(&f1, &f2, d, &PROFILE);
        prop_assert!(report.pass, "{:?}", report.failures);
    }

    #[test]
    fn line_factors_pass_the_cayley_check((m, n, seed) in (1..=3usize, 1..=4usize, any::<u64>())) {
        let s = spectrum(Domain::Line, m, n, seed);
        let f = factorize(&s, Domain::Line, &PipelineOptions::default()).unwrap();
        let report = mobius_cross_check(&s, &f, &PROFILE, 512);
        prop_assert!(report.pass, "{:?}", report.failures);
    }

    #[test]
    fn a_perturbed_coefficient_is_caught(
        (d, m, n, seed) in planted(),
        pick in (any::<prop::sample::Index>(), any::<prop::sample::Index>(), any::<prop::sample::Index>()),
        phase in 0.0..std::f64::consts::TAU,
    ) {
        let s = spectrum(d, m, n, seed);
        let mut f = factorize(&s, d, &PipelineOptions::default()).unwrap();
        let mut coeffs: Vec<CMatrix> = f.plus.coeffs().to_vec();
        let k = pick.0.index(coeffs.len());
        let (i, j) = (pick.1.index(m), pick.2.index(m));
        coeffs[k][(i, j)] += C64::from_polar(1e-3, phase);
        f.plus = MatrixLaurentPoly::new(m, f.plus.lo(), coeffs).unwrap();
        let report = verify_factorization(&s, &f, d, &PROFILE, 512);
        prop_assert!(!report.pass);
    }
}
