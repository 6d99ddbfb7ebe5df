use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::polynomial::Polynomial;
use super::symbol::Symbol;
use super::value::{Point, Value, Q};
use crate::error::{Error, Result};

/// `Σ c_s·s + constant + pi·π`, the argument of a sine or cosine node.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Affine {
    pub coeffs: BTreeMap<Symbol, Q>,
    pub constant: Q,
    pub pi: Q,
}

impl Affine {
    pub fn symbol(s: &Symbol) -> Self {
        let mut a = Affine::default();
        a.coeffs.insert(s.clone(), Q::one());
        a
    }

    pub fn coefficient(&self, s: &Symbol) -> Q {
        self.coeffs.get(s).cloned().unwrap_or_else(Q::zero)
    }

    fn add_coeff(&mut self, s: Symbol, c: Q) {
        let e = self.coeffs.entry(s.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&s);
        }
    }

    pub fn add(&self, other: &Affine) -> Affine {
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            out.add_coeff(s.clone(), c.clone());
        }
        out.constant += &other.constant;
        out.pi += &other.pi;
        out
    }

    pub fn scale(&self, k: &Q) -> Affine {
        if k.is_zero() {
            return Affine::default();
        }
        Affine {
            coeffs: self.coeffs.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
            constant: &self.constant * k,
            pi: &self.pi * k,
        }
    }

    /// Reads an affine combination off an expression, if it is one.
    pub fn from_expr(e: &Expr) -> Option<Affine> {
        match e {
            Expr::Num(c) => Some(Affine {
                constant: c.clone(),
                ..Affine::default()
            }),
            Expr::Pi => Some(Affine {
                pi: Q::one(),
                ..Affine::default()
            }),
            Expr::Sym(s) => Some(Affine::symbol(s)),
            Expr::Add(items) => {
                let mut acc = Affine::default();
                for it in items {
                    acc = acc.add(&Affine::from_expr(it)?);
                }
                Some(acc)
            }
            Expr::Mul(items) => {
                let mut scale = Q::one();
                let mut inner: Option<Affine> = None;
                for it in items {
                    match it {
                        Expr::Num(c) => scale *= c,
                        other => {
                            if inner.is_some() {
                                return None;
                            }
                            inner = Some(Affine::from_expr(other)?);
                        }
                    }
                }
                Some(match inner {
                    Some(a) => a.scale(&scale),
                    None => Affine {
                        constant: scale,
                        ..Affine::default()
                    },
                })
            }
            Expr::Pow(b, 1) => Affine::from_expr(b),
            _ => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        let mut items = Vec::new();
        for (s, c) in &self.coeffs {
            items.push(Expr::Num(c.clone()) * Expr::Sym(s.clone()));
        }
        if !self.pi.is_zero() {
            items.push(Expr::Num(self.pi.clone()) * Expr::Pi);
        }
        if !self.constant.is_zero() {
            items.push(Expr::Num(self.constant.clone()));
        }
        Expr::sum(items)
    }

    pub fn evaluate(&self, point: &Point) -> Result<Value> {
        let mut v = Value::WithPi {
            rational: self.constant.clone(),
            pi: self.pi.clone(),
        };
        if self.pi.is_zero() {
            v = Value::Exact(self.constant.clone());
        }
        for (s, c) in &self.coeffs {
            let x = point
                .get(s)
                .ok_or_else(|| Error::UnboundSymbol(s.to_string()))?;
            v = v.add(&x.mul(&Value::Exact(c.clone())));
        }
        Ok(v)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.coeffs.keys()
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

/// Expression tree. Trig-free trees convert losslessly to [`Polynomial`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Q),
    Pi,
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Affine),
    Cos(Affine),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Q::zero())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(super::value::q(n))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    pub fn sum(mut items: Vec<Expr>) -> Expr {
        items.retain(|e| !matches!(e, Expr::Num(c) if c.is_zero()));
        match items.len() {
            0 => Expr::zero(),
            1 => items.pop().unwrap(),
            _ => Expr::Add(items),
        }
    }

    pub fn product(mut items: Vec<Expr>) -> Expr {
        if items.iter().any(|e| matches!(e, Expr::Num(c) if c.is_zero())) {
            return Expr::zero();
        }
        items.retain(|e| !matches!(e, Expr::Num(c) if c.is_one()));
        match items.len() {
            0 => Expr::Num(Q::one()),
            1 => items.pop().unwrap(),
            _ => Expr::Mul(items),
        }
    }

    pub fn pow(self, e: i32) -> Expr {
        match e {
            0 => Expr::Num(Q::one()),
            1 => self,
            _ => Expr::Pow(Box::new(self), e),
        }
    }

    pub fn has_trig(&self) -> bool {
        match self {
            Expr::Sin(_) | Expr::Cos(_) => true,
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(Expr::has_trig),
            Expr::Pow(b, _) => b.has_trig(),
            _ => false,
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Expr::Pow(b, _) => b.collect_symbols(out),
            Expr::Sin(a) | Expr::Cos(a) => out.extend(a.symbols().cloned()),
            Expr::Num(_) | Expr::Pi => {}
        }
    }

    pub fn to_polynomial(&self) -> Result<Polynomial> {
        match self {
            Expr::Num(c) => Ok(Polynomial::constant(c.clone())),
            Expr::Pi => Err(Error::Eval("pi is not a rational coefficient".into())),
            Expr::Sym(s) => Ok(Polynomial::var(s)),
            Expr::Add(v) => {
                let mut acc = Polynomial::zero();
                for e in v {
                    acc += e.to_polynomial()?;
                }
                Ok(acc)
            }
            Expr::Mul(v) => {
                let mut acc = Polynomial::one();
                for e in v {
                    acc = &acc * &e.to_polynomial()?;
                }
                Ok(acc)
            }
            Expr::Pow(b, e) => b.to_polynomial()?.pow(*e),
            Expr::Sin(_) | Expr::Cos(_) => Err(Error::TrigNeedsExpansion),
        }
    }

    pub fn from_polynomial(p: &Polynomial) -> Expr {
        let items = p
            .terms()
            .map(|(m, c)| {
                let mut factors = vec![Expr::Num(c.clone())];
                for (s, e) in m.powers() {
                    factors.push(Expr::Sym(s.clone()).pow(*e));
                }
                Expr::product(factors)
            })
            .collect();
        Expr::sum(items)
    }

    pub fn evaluate(&self, point: &Point) -> Result<Value> {
        match self {
            Expr::Num(c) => Ok(Value::Exact(c.clone())),
            Expr::Pi => Ok(Value::pi()),
            Expr::Sym(s) => point
                .get(s)
                .cloned()
                .ok_or_else(|| Error::UnboundSymbol(s.to_string())),
            Expr::Add(v) => {
                let mut acc = Value::zero();
                for e in v {
                    acc = acc.add(&e.evaluate(point)?);
                }
                Ok(acc)
            }
            Expr::Mul(v) => {
                let mut acc = Value::Exact(Q::one());
                for e in v {
                    acc = acc.mul(&e.evaluate(point)?);
                }
                Ok(acc)
            }
            Expr::Pow(b, e) => b.evaluate(point)?.powi(*e),
            Expr::Sin(a) => Ok(a.evaluate(point)?.sin()),
            Expr::Cos(a) => Ok(a.evaluate(point)?.cos()),
        }
    }

    /// Floating-point evaluation through a symbol lookup.
    pub fn eval_f64(&self, lookup: &dyn Fn(&Symbol) -> Option<f64>) -> Result<f64> {
        let aff = |a: &Affine| -> Result<f64> {
            let mut v = super::value::q_to_f64(&a.constant)
                + super::value::q_to_f64(&a.pi) * std::f64::consts::PI;
            for (s, c) in &a.coeffs {
                let x = lookup(s).ok_or_else(|| Error::UnboundSymbol(s.to_string()))?;
                v += super::value::q_to_f64(c) * x;
            }
            Ok(v)
        };
        match self {
            Expr::Num(c) => Ok(super::value::q_to_f64(c)),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::Sym(s) => lookup(s).ok_or_else(|| Error::UnboundSymbol(s.to_string())),
            Expr::Add(v) => v.iter().try_fold(0.0, |acc, e| Ok(acc + e.eval_f64(lookup)?)),
            Expr::Mul(v) => v.iter().try_fold(1.0, |acc, e| Ok(acc * e.eval_f64(lookup)?)),
            Expr::Pow(b, e) => Ok(b.eval_f64(lookup)?.powi(*e)),
            Expr::Sin(a) => Ok(aff(a)?.sin()),
            Expr::Cos(a) => Ok(aff(a)?.cos()),
        }
    }

    pub fn differentiate(&self, s: &Symbol) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => Expr::zero(),
            Expr::Sym(t) => Expr::Num(if t == s { Q::one() } else { Q::zero() }),
            Expr::Add(v) => Expr::sum(v.iter().map(|e| e.differentiate(s)).collect()),
            Expr::Mul(v) => {
                let mut terms = Vec::new();
                for i in 0..v.len() {
                    let d = v[i].differentiate(s);
                    if matches!(&d, Expr::Num(c) if c.is_zero()) {
                        continue;
                    }
                    let mut factors: Vec<Expr> = v.clone();
                    factors[i] = d;
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Expr::Pow(b, e) => {
                let db = b.differentiate(s);
                if matches!(&db, Expr::Num(c) if c.is_zero()) {
                    return Expr::zero();
                }
                Expr::product(vec![Expr::int(*e as i64), (**b).clone().pow(e - 1), db])
            }
            Expr::Sin(a) => {
                let c = a.coefficient(s);
                Expr::product(vec![Expr::Num(c), Expr::Cos(a.clone())])
            }
            Expr::Cos(a) => {
                let c = a.coefficient(s);
                Expr::product(vec![Expr::Num(-c), Expr::Sin(a.clone())])
            }
        }
    }

    /// Substitutes expressions for symbols. Replacements inside a trig
    /// argument must themselves be affine.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr> {
        let trig_arg = |a: &Affine| -> Result<Affine> {
            let mut out = Affine {
                coeffs: BTreeMap::new(),
                constant: a.constant.clone(),
                pi: a.pi.clone(),
            };
            for (s, c) in &a.coeffs {
                let rep = match bindings.get(s) {
                    Some(e) => Affine::from_expr(e).ok_or_else(|| {
                        Error::UnsupportedTrig(format!("non-affine replacement for {s}: {e}"))
                    })?,
                    None => Affine::symbol(s),
                };
                out = out.add(&rep.scale(c));
            }
            Ok(out)
        };
        Ok(match self {
            Expr::Sym(s) => bindings.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expr::Num(_) | Expr::Pi => self.clone(),
            Expr::Add(v) => Expr::sum(v.iter().map(|e| e.substitute(bindings)).collect::<Result<_>>()?),
            Expr::Mul(v) => {
                Expr::product(v.iter().map(|e| e.substitute(bindings)).collect::<Result<_>>()?)
            }
            Expr::Pow(b, e) => b.substitute(bindings)?.pow(*e),
            Expr::Sin(a) => Expr::Sin(trig_arg(a)?),
            Expr::Cos(a) => Expr::Cos(trig_arg(a)?),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Mul(_) => 2,
            Expr::Num(c) if c.is_negative() || !c.is_integer() => 2,
            Expr::Pow(_, _) => 3,
            _ => 4,
        }
    }

    /// `-e` when `e` carries a leading negative numeric factor.
    fn negated_lead(&self) -> Option<Expr> {
        match self {
            Expr::Num(c) if c.is_negative() => Some(Expr::Num(-c.clone())),
            Expr::Mul(v) => match v.first() {
                Some(Expr::Num(c)) if c.is_negative() => {
                    let c = -c.clone();
                    let mut rest: Vec<Expr> = v[1..].to_vec();
                    if !c.is_one() || rest.is_empty() {
                        rest.insert(0, Expr::Num(c));
                    }
                    Some(if rest.len() == 1 { rest.pop().unwrap() } else { Expr::Mul(rest) })
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Add(v) => {
                for (i, e) in v.iter().enumerate() {
                    match (i, e.negated_lead()) {
                        (0, _) | (_, None) => {
                            if i > 0 {
                                f.write_str(" + ")?;
                            }
                            e.fmt_child(f, 2)?;
                        }
                        (_, Some(n)) => {
                            f.write_str(" - ")?;
                            n.fmt_child(f, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Mul(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    if i == 0 {
                        e.fmt_child(f, 2)?;
                    } else {
                        e.fmt_child(f, 3)?;
                    }
                }
                Ok(())
            }
            Expr::Pow(b, e) => {
                b.fmt_child(f, 4)?;
                write!(f, "^{e}")
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        let mut items = Vec::new();
        for e in [self, rhs] {
            match e {
                Expr::Add(v) => items.extend(v),
                other => items.push(other),
            }
        }
        Expr::sum(items)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        let mut items = Vec::new();
        for e in [self, rhs] {
            match e {
                Expr::Mul(v) => items.extend(v),
                other => items.push(other),
            }
        }
        Expr::product(items)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::int(-1) * self
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl From<&Polynomial> for Expr {
    fn from(p: &Polynomial) -> Self {
        Expr::from_polynomial(p)
    }
}
