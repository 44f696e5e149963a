use num_rational::Rational64;
use proptest::prelude::*;
use symplectic_index::novikov::{
    albers_delta1_pushforward, area, chern, delta1_class, delta1_pair, parse_element_in, tau, ClassSymbol, Exponent,
    Lattice, NovikovElement, PushforwardTable, SphereClass,
};

fn m_class() -> impl Strategy<Value = SphereClass> {
    prop::array::uniform4(-5i64..6).prop_map(|[a, b, c, d]| SphereClass::m(a, b, c, d))
}

fn x_class() -> impl Strategy<Value = SphereClass> {
    (-5i64..6, -5i64..6).prop_map(|(a, b)| SphereClass::x(a, b))
}

fn rational() -> impl Strategy<Value = Rational64> {
    (-6i64..7, 1i64..4).prop_map(|(n, d)| Rational64::new(n, d))
}

fn m_exponent() -> impl Strategy<Value = Exponent> {
    (rational(), m_class(), rational(), m_class()).prop_map(|(q, c, r, d)| {
        Exponent::of_class(q, &c).checked_add(&Exponent::of_h_class(r, &d)).unwrap()
    })
}

/// Elements over the two symbols with a known pushforward, with exponents
/// whose `δ₁` image has integral Chern number.
fn pushable_element() -> impl Strategy<Value = NovikovElement> {
    let term = (-3i64..4, prop::bool::ANY, m_class(), rational(), m_class()).prop_map(|(coef, which, c, r, d)| {
        let digits: &[u8] = if which { &[0, 1, 1, 1] } else { &[1, 1, 1, 0] };
        let e = Exponent::of_class(Rational64::from_integer(1), &c).checked_add(&Exponent::of_h_class(r, &d)).unwrap();
        NovikovElement::term(coef, ClassSymbol::new(digits).unwrap(), e)
    });
    prop::collection::vec(term, 0..5).prop_map(|ts| ts.iter().fold(NovikovElement::zero(), |acc, t| acc.add(t)))
}

fn any_element() -> impl Strategy<Value = NovikovElement> {
    let symbol = prop::sample::select(vec![
        vec![],
        vec![0, 1],
        vec![1, 0],
        vec![0, 1, 1, 1],
        vec![1, 1, 1, 0],
        vec![0, 0, 0, 1],
    ]);
    let term = (-4i64..5, symbol, m_exponent())
        .prop_map(|(coef, s, e)| NovikovElement::term(coef, ClassSymbol::new(&s).unwrap(), e));
    prop::collection::vec(term, 0..6).prop_map(|ts| ts.iter().fold(NovikovElement::zero(), |acc, t| acc.add(t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tau_is_an_involution(e in any_element()) {
        prop_assert_eq!(tau(&tau(&e)), e);
    }

    #[test]
    fn canonical_text_round_trips(e in any_element()) {
        let text = e.to_string();
        let back = parse_element_in(&text, Lattice::M).unwrap();
        prop_assert_eq!(&back, &e);
        if e.terms().any(|(_, _, x)| !x.is_zero()) {
            prop_assert_eq!(text.parse::<NovikovElement>().unwrap(), e);
        }
    }

    #[test]
    fn adding_the_negative_gives_zero(e in any_element()) {
        prop_assert!(e.add(&e.neg()).is_zero());
    }

    #[test]
    fn delta1_is_additive(a in m_class(), b in m_class()) {
        let sum = delta1_class(&a.checked_add(&b).unwrap()).unwrap();
        let parts = delta1_class(&a).unwrap().checked_add(&delta1_class(&b).unwrap()).unwrap();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn delta1_of_a_pair_is_the_difference(beta in x_class(), beta_prime in x_class()) {
        let c = &beta.coefficients;
        let p = &beta_prime.coefficients;
        let m = SphereClass::m(c[0], c[1], p[0], p[1]);
        prop_assert_eq!(delta1_class(&m).unwrap(), delta1_pair(&beta, &beta_prime).unwrap());
    }

    #[test]
    fn chern_and_area_are_homomorphisms(a in m_class(), b in m_class(), num in 5i64..40) {
        let lambda = Rational64::new(num, 4);
        let s = a.checked_add(&b).unwrap();
        prop_assert_eq!(chern(&s), chern(&a) + chern(&b));
        prop_assert_eq!(area(&s, lambda), area(&a, lambda) + area(&b, lambda));
    }

    #[test]
    fn chern_number_factors_through_delta1(a in m_class()) {
        prop_assert_eq!(chern(&a), chern(&delta1_class(&a).unwrap()));
    }

    #[test]
    fn pushforward_is_linear(e in pushable_element(), f in pushable_element()) {
        let table = PushforwardTable::default();
        let lhs = albers_delta1_pushforward(&e.add(&f), &table).unwrap();
        let rhs = albers_delta1_pushforward(&e, &table).unwrap().add(&albers_delta1_pushforward(&f, &table).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
