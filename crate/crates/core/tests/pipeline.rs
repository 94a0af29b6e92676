use num_traits::{One, Signed};
use proptest::prelude::*;
use wreathlab::constructions::{build, build_group, cyclic, symmetric, wreath_imprimitive, Elaborated};
use wreathlab::density::{
    density_search_imprimitive, density_search_power_primitive, density_search_power_regular, default_catalog,
    imprimitive_chain, prime_product, Family, PrimitiveSearch,
};
use wreathlab::exactmath::{rat, rat_ratio};
use wreathlab::formulas::{
    imprimitive_spectrum, power_delta, power_delta_cyclic, power_spectrum, DeltaVector,
};
use wreathlab::groupstats::{cycle_count_vector, fix_spectrum, profile};
use wreathlab::{Error, Limits, DEFAULT_ENUMERATION_CAP as CAP};

fn spectrum_of(text: &str) -> DeltaVector {
    let g = build_group(text, &Limits::default()).unwrap();
    DeltaVector::from_spectrum(&fix_spectrum(&g, CAP).unwrap())
}

#[test]
fn nested_expressions_match_nested_formulas() {
    let inner = spectrum_of("wrI(S(2),C(3))");
    let formula = imprimitive_spectrum(&inner, &spectrum_of("S(2)"));
    let oracle = spectrum_of("wrI(wrI(S(2),C(3)),S(2))");
    for k in 0..=12 {
        assert_eq!(formula.get(k), oracle.get(k), "k={k}");
    }

    let b = build_group("prodI(C(2),C(2))", &Limits::default()).unwrap();
    let formula = power_spectrum(&spectrum_of("S(3)"), &cycle_count_vector(&b, CAP).unwrap());
    let oracle = spectrum_of("wrP(S(3),prodI(C(2),C(2)))");
    for k in 0..=81 {
        assert_eq!(formula.get(k), oracle.get(k), "k={k}");
    }
}

#[test]
fn coset_expressions_stream_their_elements() {
    assert!(build("coset(A(4),(1 5))", &Limits::default()).is_err());
    let el = build("coset(A(4),(1 2))", &Limits::default()).unwrap();
    let Elaborated::Coset(c) = el else { panic!("expected a coset") };
    let p = profile(&c, CAP, false).unwrap();
    assert_eq!(p.fix.counts, vec![6, 0, 6, 0, 0]);
    assert_eq!(p.even.total, wreathlab::BigUint::from(0u32));
}

#[test]
fn cap_errors_name_the_subexpression() {
    let limits = Limits::default().with_enumeration_cap(1000);
    let g = build_group("wrI(S(4),S(4))", &limits);
    match g {
        Err(e) => {
            assert!(matches!(e.root(), Error::CapExceeded { .. }));
            assert!(e.to_string().contains("wrI(S(4),S(4))"), "{e}");
        }
        Ok(g) => {
            assert!(fix_spectrum(&g, 1000).is_err());
        }
    }
}

#[test]
fn density_witnesses_reverify_through_formulas() {
    let w = density_search_imprimitive(&rat(1, 4), &rat(3, 5), &rat(1, 30)).unwrap();
    let Family::ImprimitiveAglChain { q, steps } = w.family else { panic!() };
    if let Some(v) = w.value.exact_value() {
        assert_eq!(imprimitive_chain(&rat(1, 4), q, steps as usize).unwrap().last(), Some(v));
    }
    assert!(w.satisfies_contract());

    let w = density_search_power_regular(&rat(1, 3), &rat(2, 3), &rat(1, 25)).unwrap();
    let Family::CyclicPowerChain { primes } = &w.family else { panic!() };
    let n = u64::try_from(prime_product(primes)).unwrap();
    let v = power_delta_cyclic(&rat(1, 3), n).unwrap();
    assert!((v - rat(2, 3)).abs() <= rat(1, 25));
}

#[test]
fn small_witnesses_match_explicit_groups() {
    let s3 = symmetric(3).unwrap();
    let w = density_search_imprimitive(&rat(1, 3), &rat(1, 2), &rat(1, 20)).unwrap();
    let g = wreath_imprimitive(&s3, &s3, &Limits::default()).unwrap();
    assert_eq!(w.value.exact_value(), Some(&fix_spectrum(&g, CAP).unwrap().delta()));

    let c2 = cyclic(2).unwrap();
    match density_search_power_primitive(&c2, &rat(1, 2), &rat(1, 100), &default_catalog(), CAP).unwrap() {
        PrimitiveSearch::Found(w) => {
            let Family::InvertedPowerMap { name, .. } = &w.family else { panic!() };
            let g = build_group(&format!("wrP({name},C(2))"), &Limits::default()).unwrap();
            assert_eq!(w.value.exact_value(), Some(&fix_spectrum(&g, CAP).unwrap().delta()));
        }
        PrimitiveSearch::Infeasible { .. } => panic!("S(4) is within 1/100"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_map_is_monotone_with_fixed_ends(a in 0u32..=64, b in 0u32..=64) {
        let c = cycle_count_vector(&symmetric(4).unwrap(), CAP).unwrap().pgf();
        let (x, y) = (rat_ratio(a.min(b), 64), rat_ratio(a.max(b), 64));
        prop_assert!(power_delta(&x, &c) <= power_delta(&y, &c));
        prop_assert_eq!(power_delta(&rat(0, 1), &c), rat(0, 1));
        prop_assert_eq!(power_delta(&rat(1, 1), &c), rat(1, 1));
    }

    #[test]
    fn imprimitive_chain_steps_are_short(num in 0u32..=20, q in prop::sample::select(vec![3u64, 4, 5, 7, 8, 9])) {
        let start = rat_ratio(num, 20);
        let chain = imprimitive_chain(&start, q, 3).unwrap();
        for w in chain.windows(2) {
            let step = &w[1] - &w[0];
            prop_assert!(!step.is_negative());
            prop_assert!(step <= rat_ratio(1, q));
            prop_assert!(w[1] <= wreathlab::BigRational::one());
        }
    }
}
