use bbk_core::classifier::{
    classify, critical_c, first_necessary_condition, monotone_in_c_check, prerequisite, second_necessary_condition,
    strict_equality_exclusion, Case, Exponent, Params,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn value() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, prop::sample::select(vec![1i64, 2, 4, 5])).prop_map(|(a, d)| rational(a, d))
}

fn exponent() -> impl Strategy<Value = Exponent<BigRational>> {
    prop_oneof![
        Just(Exponent::Finite(rational(1, 1))),
        Just(Exponent::Infinity),
        (4i64..=24).prop_map(|k| Exponent::Finite(rational(k, 4))),
    ]
}

prop_compose! {
    fn tuple()(n in 2usize..=6, b in value(), c in value(), alpha in value(), beta in value(),
               p in exponent(), q in exponent()) -> Params<BigRational> {
        Params { n, b, c, alpha, beta, p, q }
    }
}

fn near_critical() -> impl Strategy<Value = Params<BigRational>> {
    (tuple(), -2i64..=2).prop_map(|(params, shift)| {
        let (critical, _) = critical_c(&params).unwrap();
        params.with_c(critical + rational(shift, 4))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn verdict_is_the_conjunction_of_the_necessary_conditions(params in prop_oneof![tuple(), near_critical()]) {
        let verdict = classify(&params).unwrap();
        let necessary = prerequisite(&params)
            && first_necessary_condition(&params).unwrap()
            && second_necessary_condition(&params).unwrap()
            && strict_equality_exclusion(&params).unwrap();
        prop_assert_eq!(verdict.bounded, necessary);
    }

    #[test]
    fn bounded_is_monotone_in_c(params in prop_oneof![tuple(), near_critical()], drop in 1i64..=40) {
        let lower = params.c.clone() - rational(drop, 8);
        prop_assert!(monotone_in_c_check(&params, lower).unwrap());
    }

    #[test]
    fn boundary_inclusion_matches_the_verdict_at_the_critical_value(params in tuple()) {
        let (critical, included) = critical_c(&params).unwrap();
        let at = classify(&params.with_c(critical.clone())).unwrap();
        let below = classify(&params.with_c(critical.clone() - rational(1, 1000))).unwrap();
        let above = classify(&params.with_c(critical + rational(1, 1000))).unwrap();
        prop_assert!(!above.bounded);
        if below.bounded {
            prop_assert_eq!(at.bounded, included);
        } else {
            prop_assert!(!at.bounded);
        }
    }

    #[test]
    fn float_and_exact_arithmetic_agree_off_the_boundary(params in tuple()) {
        let exact = classify(&params).unwrap();
        let float = classify(&params.as_float()).unwrap();
        prop_assert_eq!(exact.theorem, float.theorem);
        if exact.margin.abs() > 1e-9 {
            prop_assert_eq!(exact.bounded, float.bounded);
        }
    }

    #[test]
    fn cases_tile_the_exponent_square(p in exponent(), q in exponent()) {
        let case = Case::locate(&p, &q);
        let one = rational(1, 1);
        let expected = match (&p, &q) {
            (Exponent::Finite(p), Exponent::Finite(q)) if q < p => Case::QLtP,
            (Exponent::Finite(p), Exponent::Finite(_)) if *p == one => Case::POneQFinite,
            (Exponent::Finite(_), Exponent::Finite(_)) => Case::PLeQ,
            (Exponent::Finite(p), Exponent::Infinity) if *p == one => Case::POneQInf,
            (Exponent::Finite(_), Exponent::Infinity) => Case::PFiniteQInf,
            (Exponent::Infinity, Exponent::Finite(_)) => Case::PInfQFinite,
            (Exponent::Infinity, Exponent::Infinity) => Case::BothInf,
        };
        prop_assert_eq!(case, expected);
    }
}

#[test]
fn theorem_cases_round_trip_their_labels() {
    for case in Case::ALL {
        assert_eq!(Case::from_label(case.label()).unwrap(), case);
    }
}
