use std::collections::BTreeMap;
use std::fmt;

use super::monomial::Monomial;
use super::polynomial::Polynomial;
use super::symbol::Symbol;
use super::value::{exact_trig, qf, Point, Value, Q};
use crate::error::Result;

/// Rewrites `S^2 ↦ 1 − C^2` until every term has `S`-degree at most one.
pub fn trig_normalize(p: &Polynomial, c: &Symbol, s: &Symbol) -> Polynomial {
    let one_minus_c2 = &Polynomial::one() - &Polynomial::var(c).pow(2).unwrap();
    let mut powers: Vec<Polynomial> = vec![Polynomial::one()];
    let mut out = Polynomial::zero();
    for (m, coef) in p.terms() {
        let (j, rest) = m.split(s);
        if j < 2 {
            out += Polynomial::term(coef.clone(), m.clone());
            continue;
        }
        let half = (j / 2) as usize;
        while powers.len() <= half {
            let next = powers.last().unwrap() * &one_minus_c2;
            powers.push(next);
        }
        let mut keep = rest;
        if j % 2 == 1 {
            keep = keep.mul(&Monomial::var(s.clone()));
        }
        out += powers[half].mul_monomial(&keep).scale(coef);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Harmonic {
    Cos(u32),
    Sin(u32),
}

/// Finite Fourier sum `Σ a_k cos(kθ) + b_k sin(kθ)` with polynomial
/// coefficients in the remaining symbols.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigSeries {
    terms: BTreeMap<Harmonic, Polynomial>,
}

impl TrigSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn harmonic(h: Harmonic, coef: Polynomial) -> Self {
        let mut t = TrigSeries::zero();
        t.add_term(h, coef);
        t
    }

    pub fn constant(coef: Polynomial) -> Self {
        Self::harmonic(Harmonic::Cos(0), coef)
    }

    pub fn cos(k: u32, coef: Polynomial) -> Self {
        Self::harmonic(Harmonic::Cos(k), coef)
    }

    pub fn sin(k: u32, coef: Polynomial) -> Self {
        Self::harmonic(Harmonic::Sin(k), coef)
    }

    fn add_term(&mut self, h: Harmonic, coef: Polynomial) {
        if h == Harmonic::Sin(0) || coef.is_zero() {
            return;
        }
        let e = self.terms.entry(h).or_default();
        *e += coef;
        if e.is_zero() {
            self.terms.remove(&h);
        }
    }

    /// Signed frequencies are folded to `k ≥ 0`.
    fn add_signed(&mut self, cos: bool, k: i64, coef: Polynomial) {
        let (h, sign) = if cos {
            (Harmonic::Cos(k.unsigned_abs() as u32), 1)
        } else if k >= 0 {
            (Harmonic::Sin(k as u32), 1)
        } else {
            (Harmonic::Sin((-k) as u32), -1)
        };
        self.add_term(h, if sign < 0 { -coef } else { coef });
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, h: Harmonic) -> Polynomial {
        self.terms.get(&h).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Harmonic, &Polynomial)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &TrigSeries) -> TrigSeries {
        let mut out = self.clone();
        for (h, c) in &other.terms {
            out.add_term(*h, c.clone());
        }
        out
    }

    pub fn scale(&self, k: &Polynomial) -> TrigSeries {
        let mut out = TrigSeries::zero();
        for (h, c) in &self.terms {
            out.add_term(*h, c * k);
        }
        out
    }

    pub fn mul(&self, other: &TrigSeries) -> TrigSeries {
        let half = Polynomial::constant(qf(1, 2));
        let mut out = TrigSeries::zero();
        for (ha, ca) in &self.terms {
            for (hb, cb) in &other.terms {
                let c = &(ca * cb) * &half;
                match (*ha, *hb) {
                    (Harmonic::Cos(a), Harmonic::Cos(b)) => {
                        let (a, b) = (a as i64, b as i64);
                        out.add_signed(true, a - b, c.clone());
                        out.add_signed(true, a + b, c);
                    }
                    (Harmonic::Sin(a), Harmonic::Sin(b)) => {
                        let (a, b) = (a as i64, b as i64);
                        out.add_signed(true, a - b, c.clone());
                        out.add_signed(true, a + b, -c);
                    }
                    (Harmonic::Sin(a), Harmonic::Cos(b)) | (Harmonic::Cos(b), Harmonic::Sin(a)) => {
                        let (a, b) = (a as i64, b as i64);
                        out.add_signed(false, a + b, c.clone());
                        out.add_signed(false, a - b, c);
                    }
                }
            }
        }
        out
    }

    /// Converts a polynomial in `C = cos θ`, `S = sin θ` to its Fourier form.
    pub fn from_polynomial(p: &Polynomial, c: &Symbol, s: &Symbol) -> TrigSeries {
        let cos1 = TrigSeries::cos(1, Polynomial::one());
        let sin1 = TrigSeries::sin(1, Polynomial::one());
        let mut cache: BTreeMap<(i32, i32), TrigSeries> = BTreeMap::new();
        let mut out = TrigSeries::zero();
        for (m, coef) in p.terms() {
            let (i, rest) = m.split(c);
            let (j, rest) = rest.split(s);
            let base = cache
                .entry((i, j))
                .or_insert_with(|| {
                    let mut t = TrigSeries::constant(Polynomial::one());
                    for _ in 0..i {
                        t = t.mul(&cos1);
                    }
                    for _ in 0..j {
                        t = t.mul(&sin1);
                    }
                    t
                })
                .clone();
            out = out.add(&base.scale(&Polynomial::term(coef.clone(), rest)));
        }
        out
    }

    /// Evaluates at `θ = theta` with the coefficient symbols bound by `point`.
    /// Exact when `theta` is a rational multiple of π hitting the exact table.
    pub fn evaluate(&self, theta: &Value, point: &Point) -> Result<Value> {
        let mut total = Value::zero();
        for (h, coef) in &self.terms {
            let (k, is_cos) = match h {
                Harmonic::Cos(k) => (*k, true),
                Harmonic::Sin(k) => (*k, false),
            };
            let angle = theta.mul(&Value::Exact(Q::from_integer(k.into())));
            let exact = exact_trig(&angle).and_then(|(s, c)| if is_cos { c } else { s });
            let t = match exact {
                Some(v) => Value::Exact(v),
                None => Value::Float(if is_cos {
                    angle.to_f64().cos()
                } else {
                    angle.to_f64().sin()
                }),
            };
            total = total.add(&t.mul(&coef.evaluate(point)?));
        }
        Ok(total)
    }

    pub fn eval_f64(&self, theta: f64, lookup: impl Fn(&Symbol) -> Option<f64> + Copy) -> Result<f64> {
        let mut total = 0.0;
        for (h, coef) in &self.terms {
            let c = coef.eval_f64(lookup)?;
            total += match h {
                Harmonic::Cos(k) => c * (*k as f64 * theta).cos(),
                Harmonic::Sin(k) => c * (*k as f64 * theta).sin(),
            };
        }
        Ok(total)
    }
}

impl fmt::Display for TrigSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (h, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match h {
                Harmonic::Cos(0) => write!(f, "({c})")?,
                Harmonic::Cos(k) => write!(f, "({c})*cos({k}*theta)")?,
                Harmonic::Sin(k) => write!(f, "({c})*sin({k}*theta)")?,
            }
        }
        Ok(())
    }
}
