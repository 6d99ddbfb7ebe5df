use std::collections::BTreeMap;

use netblow::poly::parse::permissive_roles;
use netblow::poly::{parse_polynomial, Monomial, Polynomial, Symbol, Q};
use num_bigint::BigInt;
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn rational() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Q::new(BigInt::from(n), BigInt::from(d)))
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((rational(), 0i32..3, 0i32..3, 0i32..3), 0..6).prop_map(|terms| {
        Polynomial::from_terms(terms.into_iter().map(|(c, a, b, e)| {
            let m = Monomial::from_powers(vec![
                (Symbol::new("x"), a),
                (Symbol::new("y"), b),
                (Symbol::new("z"), e),
            ]);
            (m, c)
        }))
    })
}

fn point() -> impl Strategy<Value = BTreeMap<Symbol, Q>> {
    (rational(), rational(), rational()).prop_map(|(a, b, c)| {
        VARS.iter().map(|v| Symbol::new(v)).zip([a, b, c]).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_seed: proptest::test_runner::RngSeed::Fixed(11), ..ProptestConfig::default() })]

    #[test]
    fn ring_laws(p in polynomial(), q in polynomial(), s in polynomial()) {
        prop_assert_eq!(&(&p + &q) * &s, &(&p * &s) + &(&q * &s));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&(&p + &q) + &s, &p + &(&q + &s));
    }

    #[test]
    fn display_reparses(p in polynomial()) {
        let text = p.to_string();
        let back = parse_polynomial(&text, &permissive_roles(&VARS)).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in polynomial(), q in polynomial(), at in point()) {
        let pq = (&p * &q).eval_q(&at).unwrap();
        prop_assert_eq!(pq, p.eval_q(&at).unwrap() * q.eval_q(&at).unwrap());
        let sum = (&p + &q).eval_q(&at).unwrap();
        prop_assert_eq!(sum, p.eval_q(&at).unwrap() + q.eval_q(&at).unwrap());
    }

    #[test]
    fn product_rule(p in polynomial(), q in polynomial()) {
        let x = Symbol::new("x");
        let lhs = (&p * &q).differentiate(&x);
        let rhs = &(&p.differentiate(&x) * &q) + &(&p * &q.differentiate(&x));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_commutes_with_evaluation(p in polynomial(), s in polynomial(), at in point()) {
        let x = Symbol::new("x");
        let composed = p.substitute_one(&x, &s).unwrap();
        let mut inner = at.clone();
        inner.insert(x.clone(), s.eval_q(&at).unwrap());
        prop_assert_eq!(composed.eval_q(&at).unwrap(), p.eval_q(&inner).unwrap());
    }
}
