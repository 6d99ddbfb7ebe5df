mod common;

use netblow::netsys::{emit_system, linearize, parse_system, NetworkSystem};
use netblow::nilpotent::jacobian;
use netblow::poly::{Point, Q, Value};
use num_bigint::BigInt;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Network with polynomial internal dynamics and random couplings; weights
/// are parameters `w<i><j>` bound to the returned values.
fn network() -> impl Strategy<Value = (NetworkSystem, Point)> {
    (2usize..=4, any::<u64>()).prop_map(|(n, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let mut params = Vec::new();
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                params.push(format!("w{i}{j}"));
            }
        }
        let nr: Vec<&str> = names.iter().map(String::as_str).collect();
        let pr: Vec<&str> = params.iter().map(String::as_str).collect();
        let mut ns = NetworkSystem::new("prop", &nr, &pr);
        let mut vals = Point::new();
        for (k, x) in names.iter().enumerate() {
            let (a, b) = (rng.random_range(-5..=5), rng.random_range(-3..=3));
            ns.set_internal(x, &format!("{a}*{x} + {b}/2*{x}^3")).unwrap();
            for (j, y) in names.iter().enumerate().filter(|(j, _)| *j != k) {
                let w = format!("w{}{}", k + 1, j + 1);
                vals.set(w.as_str().into(), q(rng.random_range(-4..=4), rng.random_range(1..=3)));
                if rng.random_bool(0.7) {
                    let c = rng.random_range(-3..=3);
                    ns.add_coupling(x, y, &w, &format!("{y} - {x} + {c}*{y}^2")).unwrap();
                }
            }
        }
        (ns, vals)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, rng_seed: proptest::test_runner::RngSeed::Fixed(14), ..ProptestConfig::default() })]

    #[test]
    fn emit_then_parse_is_identity((ns, _) in network()) {
        let text = emit_system(&ns);
        let back = parse_system(&text).unwrap();
        prop_assert_eq!(back.assemble_polynomial().unwrap().components, ns.assemble_polynomial().unwrap().components);
        prop_assert_eq!(emit_system(&back), text);
    }

    #[test]
    fn decomposition_sums_to_jacobian((ns, vals) in network()) {
        let vf = ns.assemble_polynomial().unwrap();
        let origin: Point = ns.nodes.iter().map(|s| (s.clone(), Value::Exact(q(0, 1)))).collect();
        let dec = linearize(&ns, &origin, &vals).unwrap();
        let mut at = vals.clone();
        at.extend(&origin);
        prop_assert_eq!(dec.jacobian(), jacobian(&vf, &at).unwrap());
        // D is diagonal and carries only internal rates
        for i in 0..ns.nodes.len() {
            for j in 0..ns.nodes.len() {
                if i != j {
                    prop_assert_eq!(dec.d.get(i, j), &q(0, 1));
                }
            }
        }
    }
}
