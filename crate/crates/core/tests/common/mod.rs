#![allow(dead_code)]

use std::collections::BTreeMap;

use netblow::blowup::{ChartField, ChartKind, TrigField};
use netblow::netsys::VectorField;
use netblow::poly::parse::permissive_roles;
use netblow::poly::{parse_polynomial, Polynomial, Symbol, Q};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn poly(text: &str, names: &[&str]) -> Polynomial {
    parse_polynomial(text, &permissive_roles(names)).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// Rational with numerator in `[-num, num]` and denominator in `[1, den]`.
pub fn rand_q(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Q {
    Q::new(BigInt::from(rng.random_range(-num..=num)), BigInt::from(rng.random_range(1..=den)))
}

fn pow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Independent exact check of `DΦ·(r^k X̃) = X∘Φ` for a directional chart.
/// The blow-up map is rebuilt here from the chart weights alone.
pub fn oracle_conjugacy(vf: &VectorField, cf: &ChartField, samples: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let chart = &cf.chart;
    let d = match &chart.kind {
        ChartKind::Node { symbol } | ChartKind::Edge { symbol } | ChartKind::Parameter { symbol } => symbol.clone(),
        ChartKind::Polar { .. } => return Err("polar chart".into()),
    };
    let weight = |s: &Symbol| -> i64 {
        chart
            .state_weights
            .get(s)
            .or_else(|| chart.parameter_weights.get(s))
            .copied()
            .unwrap_or(0) as i64
    };
    let sigma = Q::from_integer(chart.sign.into());
    let ad = weight(&d);
    let k = cf.division_exponent as i64;
    let r_sym = Symbol::new("r");
    for _ in 0..samples {
        let mut r = rand_q(rng, 12, 48).abs();
        if r.is_zero() || r > Q::new(1.into(), 4.into()) {
            r = Q::new(1.into(), 5.into());
        }
        let mut chart_pt: BTreeMap<Symbol, Q> = BTreeMap::new();
        chart_pt.insert(r_sym.clone(), r.clone());
        for v in cf.variables.iter().skip(1) {
            chart_pt.insert(v.clone(), rand_q(rng, 9, 5));
        }
        for p in &cf.parameters {
            chart_pt.insert(p.clone(), rand_q(rng, 9, 5));
        }
        // Φ: original coordinates and the lifted parameters
        let mut orig: BTreeMap<Symbol, Q> = BTreeMap::new();
        for p in &vf.parameters {
            if let Some(v) = chart_pt.get(p) {
                orig.insert(p.clone(), v.clone());
            }
        }
        orig.insert(d.clone(), &sigma * pow(&r, ad));
        for (o, cv) in cf.origin.iter().zip(cf.variables.iter().skip(1)) {
            orig.insert(o.clone(), pow(&r, weight(o)) * &chart_pt[cv]);
        }
        let rk = pow(&r, k);
        let tilde: Vec<Q> = cf
            .components
            .iter()
            .map(|c| c.eval_q(&chart_pt).map(|v| v * &rk))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let rdot = &tilde[0];
        let mut lhs: BTreeMap<Symbol, Q> = BTreeMap::new();
        lhs.insert(d.clone(), &sigma * Q::from_integer(ad.into()) * pow(&r, ad - 1) * rdot);
        for (i, (o, cv)) in cf.origin.iter().zip(cf.variables.iter().skip(1)).enumerate() {
            let a = weight(o);
            let v = if a == 0 {
                tilde[i + 1].clone()
            } else {
                Q::from_integer(a.into()) * pow(&r, a - 1) * rdot * &chart_pt[cv] + pow(&r, a) * &tilde[i + 1]
            };
            lhs.insert(o.clone(), v);
        }
        for s in vf.variables.iter() {
            let rhs = vf.component(s).unwrap().eval_q(&orig).map_err(|e| e.to_string())?;
            if lhs.get(s) != Some(&rhs) {
                return Err(format!("{s}: {:?} vs {rhs} at r = {r}", lhs.get(s)));
            }
        }
        for (s, v) in &lhs {
            if vf.index_of(s).is_none() && !v.is_zero() {
                return Err(format!("lifted parameter {s} moves: {v}"));
            }
        }
    }
    Ok(())
}

/// Largest relative gap between `r^{-k}·X(r cosθ, r sinθ)` and the rebuilt
/// polar field.
pub fn polar_oracle(vf: &VectorField, tf: &TrigField, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let r: f64 = rng.random_range(0.01..0.25);
        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let mut bar = BTreeMap::new();
        let mut orig = BTreeMap::new();
        for p in &vf.parameters {
            let v: f64 = rng.random_range(-3.0..3.0);
            let b = tf.parameter_weights.get(p).copied().unwrap_or(0);
            orig.insert(p.clone(), v * r.powi(b as i32));
            bar.insert(if b > 0 { p.barred() } else { p.clone() }, v);
        }
        orig.insert(vf.variables[0].clone(), r * th.cos());
        orig.insert(vf.variables[1].clone(), r * th.sin());
        let (f1, f2) = tf.eval_f64(r, th, &bar).unwrap();
        // ẋ = r^{k+1}(C f1 − S f2), ẏ = r^{k+1}(S f1 + C f2)
        let rk1 = r.powi(tf.division_exponent + 1);
        let got = [rk1 * (th.cos() * f1 - th.sin() * f2), rk1 * (th.sin() * f1 + th.cos() * f2)];
        for (i, g) in got.iter().enumerate() {
            let w = vf.components[i].eval_f64(|s| orig.get(s).copied()).unwrap();
            let scale = w.abs().max(rk1).max(f64::MIN_POSITIVE);
            worst = worst.max((g - w).abs() / scale);
        }
    }
    worst
}
