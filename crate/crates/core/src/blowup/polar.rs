use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::netsys::VectorField;
use crate::poly::value::{Point, Value, Q};
use crate::poly::{trig_normalize, Monomial, Polynomial, Symbol, TrigSeries};

/// Planar polar chart `r' = r·f1(θ)`, `θ' = f2(θ)` in the `(C, S)` ring.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigField {
    pub x: Symbol,
    pub y: Symbol,
    pub radial: Symbol,
    pub cos: Symbol,
    pub sin: Symbol,
    pub f1: Polynomial,
    pub f2: Polynomial,
    pub division_exponent: i32,
    pub parameter_weights: BTreeMap<Symbol, u32>,
    /// Remaining parameters (rescaled ones carry the `_bar` suffix).
    pub parameters: Vec<Symbol>,
}

impl Serialize for TrigField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (f1, f2) = self.series_r0();
        let mut st = s.serialize_struct("TrigField", 7)?;
        st.serialize_field("variables", &[&self.x, &self.y])?;
        st.serialize_field("f1", &self.f1.to_string())?;
        st.serialize_field("f2", &self.f2.to_string())?;
        st.serialize_field("f1_fourier_r0", &f1.to_string())?;
        st.serialize_field("f2_fourier_r0", &f2.to_string())?;
        st.serialize_field("division_exponent", &self.division_exponent)?;
        st.serialize_field("parameters", &self.parameters)?;
        st.end()
    }
}

fn r_power(r: &Symbol, e: i32) -> Polynomial {
    Polynomial::term(Q::from_integer(1.into()), Monomial::from_powers(vec![(r.clone(), e)]))
}

/// Polar blow-up of a planar field with parameter rescaling `p = r^β p̄`,
/// divided by `r^k`.
pub fn polar_blowup_2d(
    vf: &VectorField,
    parameter_weights: &BTreeMap<Symbol, u32>,
    k: i32,
) -> Result<TrigField> {
    if vf.dim() != 2 {
        return Err(Error::Dimension("polar blow-up needs a planar field".into()));
    }
    if k < 0 {
        return Err(Error::PolarExponent("k must be nonnegative".into()));
    }
    let (x, y) = (vf.variables[0].clone(), vf.variables[1].clone());
    let (r, c, s) = (Symbol::new("r"), Symbol::new("C"), Symbol::new("S"));
    let used: Vec<&Symbol> = vf.variables.iter().chain(&vf.parameters).collect();
    for reserved in [&r, &c, &s] {
        if used.contains(&reserved) {
            return Err(Error::Chart(format!("symbol {reserved} is reserved by the polar chart")));
        }
    }
    let mut bind = BTreeMap::new();
    bind.insert(x.clone(), &r_power(&r, 1) * &Polynomial::var(&c));
    bind.insert(y.clone(), &r_power(&r, 1) * &Polynomial::var(&s));
    let mut parameters = Vec::new();
    for p in &vf.parameters {
        match parameter_weights.get(p) {
            Some(&b) if b > 0 => {
                bind.insert(p.clone(), &r_power(&r, b as i32) * &Polynomial::var(&p.barred()));
                parameters.push(p.barred());
            }
            _ => parameters.push(p.clone()),
        }
    }
    for p in parameter_weights.keys() {
        if !vf.parameters.contains(p) {
            return Err(Error::Chart(format!("{p} is not a parameter of the field")));
        }
    }
    let pp = vf.components[0].substitute(&bind)?;
    let qq = vf.components[1].substitute(&bind)?;
    let (cp, sp) = (Polynomial::var(&c), Polynomial::var(&s));
    // r' = C P + S Q, r θ' = C Q − S P
    let fr = &(&cp * &pp) + &(&sp * &qq);
    let ft = &(&cp * &qq) - &(&sp * &pp);
    let div = |f: &Polynomial| -> Result<Polynomial> {
        let out = f.divide_r_power(&r, k + 1, true).map_err(|_| {
            Error::PolarExponent(format!("k = {k} too large: ({f}) is not divisible by r^{}", k + 1))
        })?;
        Ok(trig_normalize(&out, &c, &s))
    };
    let f1 = div(&fr)?;
    let f2 = div(&ft)?;
    let tf = TrigField {
        x,
        y,
        radial: r,
        cos: c,
        sin: s,
        f1,
        f2,
        division_exponent: k,
        parameter_weights: parameter_weights.clone(),
        parameters,
    };
    let (a, b) = tf.at_r0();
    if a.is_zero() && b.is_zero() {
        return Err(Error::PolarExponent(format!(
            "k = {k} too small: the field vanishes identically at r = 0"
        )));
    }
    Ok(tf)
}

impl TrigField {
    pub fn at_r0(&self) -> (Polynomial, Polynomial) {
        let pin: BTreeMap<Symbol, Q> = [(self.radial.clone(), Q::from_integer(0.into()))].into();
        (
            trig_normalize(&self.f1.partial_eval(&pin), &self.cos, &self.sin),
            trig_normalize(&self.f2.partial_eval(&pin), &self.cos, &self.sin),
        )
    }

    /// Fourier forms of `f1`, `f2` on the circle `r = 0`.
    pub fn series_r0(&self) -> (TrigSeries, TrigSeries) {
        let (a, b) = self.at_r0();
        (
            TrigSeries::from_polynomial(&a, &self.cos, &self.sin),
            TrigSeries::from_polynomial(&b, &self.cos, &self.sin),
        )
    }

    /// `df2/dθ = −S ∂f2/∂C + C ∂f2/∂S`.
    pub fn df2(&self) -> Polynomial {
        let (c, s) = (Polynomial::var(&self.cos), Polynomial::var(&self.sin));
        let d = &(&c * &self.f2.differentiate(&self.sin)) - &(&s * &self.f2.differentiate(&self.cos));
        trig_normalize(&d, &self.cos, &self.sin)
    }

    /// Exact `(f1, f2)` on `r = 0` at a rational multiple of π.
    pub fn evaluate_exact(&self, theta: &Value, params: &Point) -> Result<(Value, Value)> {
        let (a, b) = self.series_r0();
        Ok((a.evaluate(theta, params)?, b.evaluate(theta, params)?))
    }

    /// `(f1, f2)` at `(r, θ)` in floating point.
    pub fn eval_f64(&self, r: f64, theta: f64, params: &BTreeMap<Symbol, f64>) -> Result<(f64, f64)> {
        let (c, s) = (theta.cos(), theta.sin());
        let look = |sym: &Symbol| -> Option<f64> {
            if sym == &self.radial {
                Some(r)
            } else if sym == &self.cos {
                Some(c)
            } else if sym == &self.sin {
                Some(s)
            } else {
                params.get(sym).copied()
            }
        };
        Ok((self.f1.eval_f64(look)?, self.f2.eval_f64(look)?))
    }

    /// `r^{-k}·(ẋ, ẏ)` rebuilt from the chart: `r(C f1 − S f2, S f1 + C f2)`.
    pub fn reconstruct(&self, r: f64, theta: f64, params: &BTreeMap<Symbol, f64>) -> Result<(f64, f64)> {
        let (f1, f2) = self.eval_f64(r, theta, params)?;
        let (c, s) = (theta.cos(), theta.sin());
        Ok((r * (c * f1 - s * f2), r * (s * f1 + c * f2)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircleClass {
    StableNode,
    UnstableNode,
    Saddle,
    NonHyperbolic,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleEquilibrium {
    pub theta: f64,
    pub f1: f64,
    pub df2: f64,
    pub class: CircleClass,
}

fn classify(f1: f64, df2: f64) -> CircleClass {
    if df2.abs() < 1e-8 || f1.abs() < 1e-12 {
        CircleClass::NonHyperbolic
    } else {
        match (df2 < 0.0, f1 < 0.0) {
            (true, true) => CircleClass::StableNode,
            (false, false) => CircleClass::UnstableNode,
            _ => CircleClass::Saddle,
        }
    }
}

/// Equilibria on the circle `r = 0`: zeros of `f2` bracketed on a uniform
/// grid and refined by bisection; tangential zeros are located by
/// minimising `|f2|` and flagged non-hyperbolic.
pub fn circle_equilibria(
    tf: &TrigField,
    params: &BTreeMap<Symbol, f64>,
    grid: usize,
    tol: f64,
) -> Result<Vec<CircleEquilibrium>> {
    if grid < 8 {
        return Err(Error::GridTooCoarse(format!("grid of {grid} points")));
    }
    let (f1p, f2p) = tf.at_r0();
    let d2p = {
        let pin: BTreeMap<Symbol, Q> = [(tf.radial.clone(), Q::from_integer(0.into()))].into();
        tf.df2().partial_eval(&pin)
    };
    let eval = |p: &Polynomial, th: f64| -> Result<f64> {
        let (c, s) = (th.cos(), th.sin());
        p.eval_f64(|sym: &Symbol| {
            if sym == &tf.cos {
                Some(c)
            } else if sym == &tf.sin {
                Some(s)
            } else {
                params.get(sym).copied()
            }
        })
    };
    let f = |th: f64| eval(&f2p, th);
    let h = 2.0 * PI / grid as f64;
    let vals: Vec<f64> = (0..grid).map(|j| f(j as f64 * h)).collect::<Result<_>>()?;
    if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("f2 = {v}")));
    }

    let mut roots: Vec<f64> = Vec::new();
    for j in 0..grid {
        let (a, b) = (vals[j], vals[(j + 1) % grid]);
        let lo = j as f64 * h;
        if a == 0.0 {
            roots.push(lo);
            continue;
        }
        if b == 0.0 {
            continue;
        }
        if a * b < 0.0 {
            let sub = 16;
            let mut changes = 0;
            let mut prev = a;
            for m in 1..=sub {
                let v = f(lo + h * m as f64 / sub as f64)?;
                if v * prev < 0.0 {
                    changes += 1;
                }
                if v != 0.0 {
                    prev = v;
                }
            }
            if changes > 1 {
                return Err(Error::GridTooCoarse(format!(
                    "{changes} sign changes of f2 inside [{lo}, {}]",
                    lo + h
                )));
            }
            let (mut l, mut u, mut fl) = (lo, lo + h, a);
            while u - l > tol {
                let m = 0.5 * (l + u);
                let fm = f(m)?;
                if fm == 0.0 {
                    l = m;
                    u = m;
                    break;
                }
                if fm * fl < 0.0 {
                    u = m;
                } else {
                    l = m;
                    fl = fm;
                }
            }
            roots.push(0.5 * (l + u));
            continue;
        }
        // same sign: look for a tangential zero at a local minimum of |f2|
        let prev = vals[(j + grid - 1) % grid];
        if prev * a > 0.0 && a.abs() < prev.abs() && a.abs() <= b.abs() {
            let (mut l, mut u) = (lo - h, lo + h);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            while u - l > tol {
                let m1 = u - g * (u - l);
                let m2 = l + g * (u - l);
                if f(m1)?.abs() < f(m2)?.abs() {
                    u = m2;
                } else {
                    l = m1;
                }
            }
            let m = 0.5 * (l + u);
            let fm = f(m)?;
            if fm * a < 0.0 {
                return Err(Error::GridTooCoarse(format!(
                    "two sign changes of f2 near {m} between grid points"
                )));
            }
            if fm.abs() < 1e-9 {
                roots.push(m.rem_euclid(2.0 * PI));
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::new();
    for t in roots {
        if merged.last().is_none_or(|l| (t - l).abs() > 1e-8) {
            merged.push(t);
        }
    }
    if merged.len() > 1 && (merged[0] + 2.0 * PI - merged[merged.len() - 1]).abs() < 1e-8 {
        merged.pop();
    }
    merged
        .into_iter()
        .map(|t| {
            let f1 = eval(&f1p, t)?;
            let df2 = eval(&d2p, t)?;
            Ok(CircleEquilibrium {
                theta: t,
                f1,
                df2,
                class: classify(f1, df2),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::{parse_polynomial, permissive_roles};

    fn planar(p: &str, q: &str) -> VectorField {
        let roles = permissive_roles(&["x", "y", "a"]);
        VectorField::infer(
            vec!["x".into(), "y".into()],
            vec![parse_polynomial(p, &roles).unwrap(), parse_polynomial(q, &roles).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn rotation_and_radial_fields() {
        let rot = polar_blowup_2d(&planar("-y", "x"), &BTreeMap::new(), 0).unwrap();
        assert!(rot.f1.is_zero());
        assert_eq!(rot.f2, Polynomial::one());
        let rad = polar_blowup_2d(&planar("x", "y"), &BTreeMap::new(), 0).unwrap();
        assert_eq!(rad.f1, Polynomial::one());
        assert!(rad.f2.is_zero());
    }

    #[test]
    fn exponent_is_validated() {
        assert!(matches!(
            polar_blowup_2d(&planar("-y", "x"), &BTreeMap::new(), 1),
            Err(Error::PolarExponent(_))
        ));
        // x^3 field: k = 0 leaves everything O(r^2) at r = 0
        assert!(matches!(
            polar_blowup_2d(&planar("x^3", "y^3"), &BTreeMap::new(), 0),
            Err(Error::PolarExponent(_))
        ));
        assert!(polar_blowup_2d(&planar("x^3", "y^3"), &BTreeMap::new(), 2).is_ok());
    }

    #[test]
    fn reconstruction_matches_planar_field() {
        let vf = planar("a*x - y^2", "x*y + a*y");
        let w: BTreeMap<Symbol, u32> = [("a".into(), 1)].into();
        let tf = polar_blowup_2d(&vf, &w, 1).unwrap();
        let params: BTreeMap<Symbol, f64> = [("a_bar".into(), 0.7)].into();
        for (r, th) in [(0.3, 0.1), (0.05, 2.5), (0.2, 4.0)] {
            let (x, y) = (r * f64::cos(th), r * f64::sin(th));
            let a = 0.7 * r;
            let (px, py) = (a * x - y * y, x * y + a * y);
            let (ex, ey) = tf.reconstruct(r, th, &params).unwrap();
            assert!((ex - px / r).abs() < 1e-12 && (ey - py / r).abs() < 1e-12);
        }
    }

    #[test]
    fn tangential_zeros_are_flagged() {
        // f2 = -(1 + sin 2θ)/2 has double zeros at 3π/4 and 7π/4
        let vf = planar("y*(x^2/2 + y^2/2 + x*y)", "-x*(x^2/2 + y^2/2 + x*y)");
        let tf = polar_blowup_2d(&vf, &BTreeMap::new(), 2).unwrap();
        let eq = circle_equilibria(&tf, &BTreeMap::new(), 2048, 1e-12).unwrap();
        assert_eq!(eq.len(), 2, "{eq:?}");
        assert!((eq[0].theta - 0.75 * PI).abs() < 1e-5);
        assert!((eq[1].theta - 1.75 * PI).abs() < 1e-5);
        assert!(eq.iter().all(|e| e.class == CircleClass::NonHyperbolic));
    }
}
