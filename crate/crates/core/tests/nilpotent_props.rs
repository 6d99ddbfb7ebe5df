use netblow::nilpotent::{char_poly, is_nilpotent, RationalMatrix};
use netblow::poly::Q;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<Q>>> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec((-9i64..=9, 1i64..=4), n), n).prop_map(|rows| {
            rows.into_iter()
                .map(|r| r.into_iter().map(|(a, b)| Q::new(a.into(), b.into())).collect())
                .collect()
        })
    })
}

/// Cofactor expansion along the first row.
fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    if n == 0 {
        return q(1);
    }
    let mut acc = q(0);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Q>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * det(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn horner(coeffs: &[Q], x: &Q) -> Q {
    coeffs.iter().fold(q(0), |acc, c| acc * x + c)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 120, rng_seed: proptest::test_runner::RngSeed::Fixed(12), ..ProptestConfig::default() })]

    #[test]
    fn char_poly_matches_cofactor_determinant(rows in matrix(5)) {
        let m = RationalMatrix::from_rows(rows.clone()).unwrap();
        let cp = char_poly(&m);
        prop_assert_eq!(cp.len(), rows.len() + 1);
        for lam in -3..=3 {
            let l = q(lam);
            let shifted: Vec<Vec<Q>> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().enumerate().map(|(j, v)| if i == j { &l - v } else { -v.clone() }).collect())
                .collect();
            prop_assert_eq!(horner(&cp, &l), det(&shifted));
        }
    }

    #[test]
    fn cayley_hamilton(rows in matrix(4)) {
        let m = RationalMatrix::from_rows(rows).unwrap();
        let cp = char_poly(&m);
        let n = m.dim();
        let mut acc = RationalMatrix::zeros(n);
        for c in &cp {
            acc = acc.mul(&m);
            let mut id = RationalMatrix::identity(n);
            for i in 0..n {
                id.set(i, i, c.clone());
            }
            acc = acc.add(&id);
        }
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn similar_strict_triangular_is_nilpotent(upper in matrix(4), lower in matrix(4)) {
        let n = upper.len().min(lower.len());
        let mut s = RationalMatrix::identity(n);
        let mut u = RationalMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if j > i {
                    u.set(i, j, upper[i][j].clone());
                }
                if j < i {
                    s.set(i, j, lower[i][j].clone());
                }
            }
        }
        // unit lower triangular S has inverse computed by forward substitution
        let mut sinv = RationalMatrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                let mut v = q(0);
                for k in j..i {
                    v -= s.get(i, k) * sinv.get(k, j);
                }
                sinv.set(i, j, v);
            }
        }
        prop_assert_eq!(s.mul(&sinv), RationalMatrix::identity(n));
        let m = s.mul(&u).mul(&sinv);
        prop_assert!(is_nilpotent(&m));
        let mut want = vec![q(0); n + 1];
        want[0] = q(1);
        prop_assert_eq!(char_poly(&m), want);
        let shifted = m.add(&RationalMatrix::identity(n));
        prop_assert!(!is_nilpotent(&shifted));
    }
}
