mod common;

use std::collections::BTreeMap;

use netblow::blowup::{blowup, common_factor_divide, polar_blowup_2d, verify_conjugacy, BlowupChart};
use netblow::netsys::VectorField;
use netblow::poly::{Monomial, Polynomial, Symbol, Q};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{oracle_conjugacy, polar_oracle};

/// Planar field in `x, y` with parameter `p`, no constant term.
fn planar() -> impl Strategy<Value = VectorField> {
    let term = ((-6i64..=6, 1i64..=3), 0i32..4, 0i32..4, 0i32..2);
    let row = prop::collection::vec(term, 1..6).prop_map(|ts| {
        Polynomial::from_terms(ts.into_iter().filter(|(_, a, b, _)| a + b > 0).map(|((n, d), a, b, c)| {
            (
                Monomial::from_powers(vec![(Symbol::new("x"), a), (Symbol::new("y"), b), (Symbol::new("p"), c)]),
                Q::new(BigInt::from(n), BigInt::from(d)),
            )
        }))
    });
    (row.clone(), row)
        .prop_filter("nonzero field", |(a, b)| !(a.is_zero() && b.is_zero()))
        .prop_map(|(a, b)| VectorField::new(vec!["x".into(), "y".into()], vec![a, b], vec!["p".into()]).unwrap())
}

fn chart() -> impl Strategy<Value = BlowupChart> {
    (prop::bool::ANY, prop::bool::ANY, 1u32..3, 1u32..3, 0u32..2).prop_map(|(on_x, pos, wx, wy, wp)| {
        let (d, sign) = (if on_x { "x" } else { "y" }, if pos { 1 } else { -1 });
        let mut c = BlowupChart::node(d, sign).state(&["x"], wx).state(&["y"], wy);
        if wp > 0 {
            c = c.params(&["p"], wp);
        }
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, rng_seed: proptest::test_runner::RngSeed::Fixed(13), ..ProptestConfig::default() })]

    #[test]
    fn conjugacy_on_random_fields(vf in planar(), ch in chart(), seed in 0u64..1000) {
        let cf = blowup(&vf, &ch);
        prop_assume!(cf.is_ok());
        let cf = cf.unwrap();
        verify_conjugacy(&vf, &cf, &BTreeMap::new(), 20, seed).unwrap();
        oracle_conjugacy(&vf, &cf, 20, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    }

    #[test]
    fn desingularization_is_maximal(vf in planar(), ch in chart()) {
        let cf = blowup(&vf, &ch);
        prop_assume!(cf.is_ok());
        let cf = cf.unwrap();
        let r = Symbol::new("r");
        let least = cf
            .components
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.r_valuation(&r).unwrap())
            .min()
            .unwrap();
        prop_assert_eq!(least, 0);
        prop_assert!(cf.division_exponent >= 0);
    }

    #[test]
    fn polar_chart_rebuilds_field(vf in planar(), seed in 0u64..1000) {
        let weights: BTreeMap<Symbol, u32> = [(Symbol::new("p"), 1)].into();
        // pick the largest k the field allows
        let mut best = None;
        for k in 0..6 {
            match polar_blowup_2d(&vf, &weights, k) {
                Ok(tf) => best = Some(tf),
                Err(_) => break,
            }
        }
        if let Some(tf) = best {
            let worst = polar_oracle(&vf, &tf, 20, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert!(worst <= 1e-12, "relative residual {}", worst);
        }
    }

    #[test]
    fn common_factor_division_round_trips(vf in planar(), n in 1i64..4) {
        let factor = Polynomial::var(&Symbol::new("p")) + Polynomial::constant(Q::from_integer(BigInt::from(n)));
        let scaled = VectorField::new(
            vf.variables.clone(),
            vf.components.iter().map(|c| c * &factor).collect(),
            vf.parameters.clone(),
        )
        .unwrap();
        let (back, _) = common_factor_divide(&scaled, &factor).unwrap();
        prop_assert_eq!(back.components, vf.components);
    }
}
