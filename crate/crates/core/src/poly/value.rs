use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::symbol::Symbol;
use crate::error::{Error, Result};

/// Exact rational coefficient.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `3`, `-3/4` or a decimal literal like `0.2` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("not a rational literal: {text:?}"),
    };
    if t.is_empty() {
        return Err(bad());
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() || d.is_negative() {
            return Err(bad());
        }
        Q::new(n, d)
    } else if let Some((int, frac)) = body.split_once('.') {
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        Q::new(n, d)
    } else {
        if !body.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        Q::from_integer(BigInt::from_str(body).map_err(|_| bad())?)
    };
    Ok(if neg { -value } else { value })
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// The exact binary value of a finite double.
pub fn f64_to_q(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Best rational approximation with denominator at most `max_den`.
pub fn rationalize(x: f64, max_den: i64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Q::new(BigInt::from(h1), BigInt::from(k1)))
}

/// A real number kept exact whenever possible: a rational, a rational
/// combination `a + b·π`, or an IEEE double once exactness is lost.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Q),
    WithPi { rational: Q, pi: Q },
    Float(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Q::zero())
    }

    pub fn pi() -> Self {
        Value::WithPi {
            rational: Q::zero(),
            pi: Q::one(),
        }
    }

    fn norm(self) -> Self {
        match self {
            Value::WithPi { rational, pi } if pi.is_zero() => Value::Exact(rational),
            v => v,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q_to_f64(q),
            Value::WithPi { rational, pi } => q_to_f64(rational) + q_to_f64(pi) * std::f64::consts::PI,
            Value::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Q> {
        match self {
            Value::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Value::Float(_))
    }

    fn parts(&self) -> Option<(Q, Q)> {
        match self {
            Value::Exact(q) => Some((q.clone(), Q::zero())),
            Value::WithPi { rational, pi } => Some((rational.clone(), pi.clone())),
            Value::Float(_) => None,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self.parts(), other.parts()) {
            (Some((a, b)), Some((c, d))) => Value::WithPi {
                rational: a + c,
                pi: b + d,
            }
            .norm(),
            _ => Value::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            (Value::Exact(a), Value::WithPi { rational, pi })
            | (Value::WithPi { rational, pi }, Value::Exact(a)) => Value::WithPi {
                rational: a * rational,
                pi: a * pi,
            }
            .norm(),
            _ => Value::Float(self.to_f64() * other.to_f64()),
        }
    }

    pub fn powi(&self, e: i32) -> Result<Value> {
        match self {
            Value::Exact(a) => {
                if e < 0 && a.is_zero() {
                    return Err(Error::Eval("division by zero".into()));
                }
                Ok(Value::Exact(pow_q(a, e)))
            }
            Value::WithPi { .. } if e == 0 => Ok(Value::Exact(Q::one())),
            Value::WithPi { .. } if e == 1 => Ok(self.clone()),
            _ => Ok(Value::Float(self.to_f64().powi(e))),
        }
    }

    pub fn sin(&self) -> Value {
        match exact_trig(self) {
            Some((Some(s), _)) => Value::Exact(s),
            _ => Value::Float(self.to_f64().sin()),
        }
    }

    pub fn cos(&self) -> Value {
        match exact_trig(self) {
            Some((_, Some(c))) => Value::Exact(c),
            _ => Value::Float(self.to_f64().cos()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            Value::WithPi { rational, pi } => {
                if rational.is_zero() {
                    write!(f, "{pi}*pi")
                } else {
                    write!(f, "{rational} + {pi}*pi")
                }
            }
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

impl From<Q> for Value {
    fn from(q: Q) -> Self {
        Value::Exact(q)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Exact(q(n))
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

pub fn pow_q(a: &Q, e: i32) -> Q {
    if e >= 0 {
        num_traits::pow(a.clone(), e as usize)
    } else {
        num_traits::pow(a.recip(), (-e) as usize)
    }
}

/// Exact sine and cosine at angles `k·π/6`, each `None` when irrational.
pub fn exact_trig(v: &Value) -> Option<(Option<Q>, Option<Q>)> {
    let (rational, pi) = v.parts()?;
    if !rational.is_zero() {
        return None;
    }
    let sixths = &pi * Q::from_integer(BigInt::from(6));
    if !sixths.is_integer() {
        return None;
    }
    let k = sixths.to_integer() % BigInt::from(12);
    let k = ((k + BigInt::from(12)) % BigInt::from(12)).to_i64()?;
    let half = qf(1, 2);
    let sin = match k {
        0 | 6 => Some(q(0)),
        1 | 5 => Some(half.clone()),
        7 | 11 => Some(-half.clone()),
        3 => Some(q(1)),
        9 => Some(q(-1)),
        _ => None,
    };
    let cos = match k {
        0 => Some(q(1)),
        6 => Some(q(-1)),
        3 | 9 => Some(q(0)),
        2 | 10 => Some(half.clone()),
        4 | 8 => Some(-half),
        _ => None,
    };
    Some((sin, cos))
}

/// Parses a coordinate value: rationals, decimals, `pi`, `pi/2`, `3*pi/2`,
/// `-pi`, or a float in scientific notation (kept as a double).
pub fn parse_value(text: &str) -> Result<Value> {
    let t = text.trim();
    if t.contains("pi") {
        let (neg, body) = match t.strip_prefix('-') {
            Some(r) => (true, r.trim()),
            None => (false, t),
        };
        let (coef, rest) = match body.split_once('*') {
            Some((c, r)) => (parse_rational(c)?, r.trim()),
            None => (Q::one(), body),
        };
        let den = match rest.strip_prefix("pi") {
            Some("") => Q::one(),
            Some(d) => match d.trim().strip_prefix('/') {
                Some(d) => parse_rational(d)?,
                None => {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: format!("bad multiple of pi: {text:?}"),
                    })
                }
            },
            None => {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("bad multiple of pi: {text:?}"),
                })
            }
        };
        let pi = coef / den;
        let pi = if neg { -pi } else { pi };
        return Ok(Value::WithPi {
            rational: Q::zero(),
            pi,
        }
        .norm());
    }
    match parse_rational(t) {
        Ok(q) => Ok(Value::Exact(q)),
        Err(e) => t.parse::<f64>().map(Value::Float).map_err(|_| e),
    }
}

/// A binding of symbols to values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point(BTreeMap<Symbol, Value>);

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.0.insert(Symbol::new(name), v.into());
        self
    }

    pub fn set(&mut self, s: Symbol, v: impl Into<Value>) {
        self.0.insert(s, v.into());
    }

    pub fn get(&self, s: &Symbol) -> Option<&Value> {
        self.0.get(s)
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.0.contains_key(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&mut self, other: &Point) {
        for (k, v) in other.iter() {
            self.0.insert(k.clone(), v.clone());
        }
    }

    pub fn is_exact(&self) -> bool {
        self.0.values().all(|v| matches!(v, Value::Exact(_)))
    }

    /// Rational bindings only; `None` when any value is not rational.
    pub fn exact(&self) -> Option<BTreeMap<Symbol, Q>> {
        self.0
            .iter()
            .map(|(k, v)| v.as_exact().map(|q| (k.clone(), q.clone())))
            .collect()
    }

    /// Parses `a1=2,a2=-1/2,psi2=pi/2`.
    pub fn parse(text: &str) -> Result<Point> {
        let mut p = Point::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("expected name=value, got {item:?}"),
            })?;
            let k = k.trim();
            if !Symbol::is_valid_name(k) {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("invalid symbol name {k:?}"),
                });
            }
            p.set(Symbol::new(k), parse_value(v)?);
        }
        Ok(p)
    }
}

impl FromIterator<(Symbol, Value)> for Point {
    fn from_iter<T: IntoIterator<Item = (Symbol, Value)>>(iter: T) -> Self {
        Point(iter.into_iter().collect())
    }
}

impl From<BTreeMap<Symbol, Q>> for Point {
    fn from(m: BTreeMap<Symbol, Q>) -> Self {
        m.into_iter().map(|(k, v)| (k, Value::Exact(v))).collect()
    }
}

/// JSON rendering of a rational: an integer number when integral, else "p/q".
pub fn q_to_json(x: &Q) -> serde_json::Value {
    if x.is_integer() {
        if let Some(i) = x.to_integer().to_i64() {
            return serde_json::Value::from(i);
        }
    }
    serde_json::Value::from(x.to_string())
}
