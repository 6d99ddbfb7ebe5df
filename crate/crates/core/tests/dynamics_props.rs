use std::collections::BTreeMap;

use netblow::dynamics::{find_equilibria, integrate, stability_probe, verify_exact, IntegrateOptions, NumericField, ProbeOptions};
use netblow::netsys::VectorField;
use netblow::poly::parse::permissive_roles;
use netblow::poly::parse_polynomial;
use proptest::prelude::*;

fn field(rows: &[String]) -> VectorField {
    let roles = permissive_roles(&["x", "y"]);
    VectorField::infer(
        vec!["x".into(), "y".into()],
        rows.iter().map(|r| parse_polynomial(r, &roles).unwrap()).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, rng_seed: proptest::test_runner::RngSeed::Fixed(15), ..ProptestConfig::default() })]

    #[test]
    fn probe_verdict_survives_halving_radius(l1 in prop::sample::select(vec![-2.0, -1.0, -0.5, 0.5, 1.0]),
                                             l2 in prop::sample::select(vec![-1.5, -0.7, 0.3, 2.0]),
                                             shear in -2i32..=2, seed in 0u64..100) {
        let vf = field(&[format!("{l1}*x + {shear}*y"), format!("{l2}*y")]);
        let nf = NumericField::from_polynomial(&vf, &BTreeMap::new()).unwrap();
        let opts = ProbeOptions { samples: 12, t_end: 60.0, seed, ..Default::default() };
        let a = stability_probe(&nf, &[0.0, 0.0], &opts).unwrap();
        let b = stability_probe(&nf, &[0.0, 0.0], &ProbeOptions { radius: opts.radius / 2.0, ..opts }).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn newton_roots_are_exact(a in -4i64..=4, b in -4i64..=4, c in 1i64..=4, d in -3i64..=3) {
        // roots x ∈ {a/c, b}, y = d/2
        let vf = field(&[format!("({c}*x - {a})*(x - {b})"), format!("2*y - {d}")]);
        let nf = NumericField::from_polynomial(&vf, &BTreeMap::new()).unwrap();
        let mut s = find_equilibria(&nf, &[(-6.0, 6.0), (-3.0, 3.0)], 15, 1e-12).unwrap();
        verify_exact(&vf, &BTreeMap::new(), &mut s).unwrap();
        prop_assert!(!s.equilibria.is_empty());
        for e in &s.equilibria {
            prop_assert!(e.exact.is_some(), "{:?}", e.x);
        }
    }

    #[test]
    fn linear_decay_matches_exponential(k in 0.1f64..3.0, x0 in -2.0f64..2.0) {
        let vf = field(&[format!("-{k}*x"), "0*y".to_string()]);
        let nf = NumericField::from_polynomial(&vf, &BTreeMap::new()).unwrap();
        let tr = integrate(&nf, &[x0, 1.0], 2.0, &IntegrateOptions::default()).unwrap();
        prop_assert!((tr.last()[0] - x0 * (-2.0 * k).exp()).abs() < 1e-7);
        prop_assert_eq!(tr.last()[1], 1.0);
    }
}
