use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::monomial::Monomial;
use super::symbol::{Role, Roles, Symbol};
use super::value::{pow_q, Point, Value, Q};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial with exact rational coefficients, Laurent
/// in at most one radial symbol. Terms are kept in graded-lex order and zero
/// coefficients are never stored, so equal polynomials compare and print
/// identically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(super::value::q(n))
    }

    pub fn var(s: &Symbol) -> Self {
        Self::term(Q::one(), Monomial::var(s.clone()))
    }

    pub fn sym(name: &str) -> Self {
        Self::var(&Symbol::new(name))
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Monomial::one())
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.symbols().cloned())
            .collect()
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(s) != 0)
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, s: &Symbol) -> i32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    /// Integer power. Negative exponents need a single-term base.
    pub fn pow(&self, e: i32) -> Result<Polynomial> {
        if e < 0 {
            if self.terms.len() != 1 {
                return Err(Error::NegativePower(format!("({self})^{e}")));
            }
            let (m, c) = self.terms.iter().next().unwrap();
            return Ok(Polynomial::term(pow_q(c, e), m.pow(e)));
        }
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut n = e as u32;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Simultaneous substitution of symbols by polynomials.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Polynomial>) -> Result<Polynomial> {
        let mut cache: HashMap<(Symbol, i32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(c.clone());
            let mut kept = Vec::new();
            for (s, e) in m.powers() {
                match bindings.get(s) {
                    Some(rep) => {
                        let key = (s.clone(), *e);
                        let pw = match cache.get(&key) {
                            Some(p) => p.clone(),
                            None => {
                                let p = rep.pow(*e)?;
                                cache.insert(key, p.clone());
                                p
                            }
                        };
                        acc = &acc * &pw;
                    }
                    None => kept.push((s.clone(), *e)),
                }
            }
            out += acc.mul_monomial(&Monomial::from_powers(kept));
        }
        Ok(out)
    }

    /// Substitution that rejects replacements mentioning undeclared symbols.
    pub fn substitute_declared(
        &self,
        bindings: &BTreeMap<Symbol, Polynomial>,
        roles: &Roles,
    ) -> Result<Polynomial> {
        for rep in bindings.values() {
            for s in rep.symbols() {
                if roles.role(&s).is_none() {
                    return Err(Error::UndeclaredSymbol(s.to_string()));
                }
            }
        }
        self.substitute(bindings)
    }

    pub fn substitute_one(&self, s: &Symbol, rep: &Polynomial) -> Result<Polynomial> {
        let mut b = BTreeMap::new();
        b.insert(s.clone(), rep.clone());
        self.substitute(&b)
    }

    pub fn differentiate(&self, s: &Symbol) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            if e != 0 {
                let dm = m.mul(&Monomial::from_powers(vec![(s.clone(), -1)]));
                out.add_term(dm, c * Q::from_integer(e.into()));
            }
        }
        out
    }

    /// Minimal exponent of `r` over all terms.
    pub fn r_valuation(&self, r: &Symbol) -> Result<i32> {
        self.terms
            .keys()
            .map(|m| m.exponent(r))
            .min()
            .ok_or(Error::ZeroPolynomial)
    }

    /// Multiplies every term by `r^-k`. With `require_regular`, fails unless
    /// the result has no negative power of `r`.
    pub fn divide_r_power(&self, r: &Symbol, k: i32, require_regular: bool) -> Result<Polynomial> {
        let shift = Monomial::from_powers(vec![(r.clone(), -k)]);
        let out = self.mul_monomial(&shift);
        if require_regular && !self.is_zero() && out.r_valuation(r)? < 0 {
            return Err(Error::NotDivisible(format!("({self}) by {r}^{k}")));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &Point) -> Result<Value> {
        let mut total = Value::zero();
        for (m, c) in &self.terms {
            let mut t = Value::Exact(c.clone());
            for (s, e) in m.powers() {
                let v = point
                    .get(s)
                    .ok_or_else(|| Error::UnboundSymbol(s.to_string()))?;
                t = t.mul(&v.powi(*e)?);
            }
            total = total.add(&t);
        }
        Ok(total)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_q(&self, point: &BTreeMap<Symbol, Q>) -> Result<Q> {
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (s, e) in m.powers() {
                let v = point
                    .get(s)
                    .ok_or_else(|| Error::UnboundSymbol(s.to_string()))?;
                if *e < 0 && v.is_zero() {
                    return Err(Error::Eval(format!("{s} = 0 raised to {e}")));
                }
                t *= pow_q(v, *e);
            }
            total += t;
        }
        Ok(total)
    }

    pub fn eval_f64(&self, lookup: impl Fn(&Symbol) -> Option<f64>) -> Result<f64> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = super::value::q_to_f64(c);
            for (s, e) in m.powers() {
                let v = lookup(s).ok_or_else(|| Error::UnboundSymbol(s.to_string()))?;
                t *= v.powi(*e);
            }
            total += t;
        }
        Ok(total)
    }

    /// Substitutes rational values for the bound symbols, leaving the rest.
    pub fn partial_eval(&self, point: &BTreeMap<Symbol, Q>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut kept = Vec::new();
            for (s, e) in m.powers() {
                match point.get(s) {
                    Some(v) => coef *= pow_q(v, *e),
                    None => kept.push((s.clone(), *e)),
                }
            }
            out.add_term(Monomial::from_powers(kept), coef);
        }
        out
    }

    /// Groups terms by their power product in `syms`; the values are the
    /// coefficient polynomials in the remaining symbols.
    pub fn coefficients_in(&self, syms: &[Symbol]) -> BTreeMap<Monomial, Polynomial> {
        let mut out: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.only(syms))
                .or_default()
                .add_term(m.without(syms), c.clone());
        }
        out
    }

    /// Part of total degree (in `syms`) at most `degree`.
    pub fn truncate(&self, syms: &[Symbol], degree: i64) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(syms) <= degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Homogeneous part of degree exactly `degree` in `syms`.
    pub fn homogeneous_part(&self, syms: &[Symbol], degree: i64) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(syms) == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = divisor.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            let t = Polynomial::term(qc, qm);
            rem = &rem - &(&t * divisor);
            quot += t;
        }
        Some(quot)
    }

    /// Clears an inverse symbol: with `inv` standing for `1/denom`, returns
    /// `denom^P · self` with `inv` eliminated, `P` the top power of `inv`.
    /// Two expressions agree on `{inv·denom = 1}` iff their difference clears
    /// to zero.
    pub fn clear_inverse(&self, inv: &Symbol, denom: &Polynomial) -> Result<Polynomial> {
        let top = self.degree_in(inv).max(0);
        let mut powers: Vec<Polynomial> = Vec::with_capacity(top as usize + 1);
        for k in 0..=top {
            powers.push(denom.pow(k)?);
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(inv);
            if e < 0 {
                return Err(Error::NegativePower(format!("{inv}^{e}")));
            }
            let t = Polynomial::term(c.clone(), rest);
            out += &t * &powers[(top - e) as usize];
        }
        Ok(out)
    }

    /// Checks the Laurent rule: only `radial` may carry negative exponents.
    pub fn check_laurent(&self, radial: Option<&Symbol>) -> Result<()> {
        for m in self.terms.keys() {
            for (s, e) in m.powers() {
                if *e < 0 && Some(s) != radial {
                    return Err(Error::NegativePower(format!("{s}^{e}")));
                }
            }
        }
        Ok(())
    }

    pub fn check_declared(&self, roles: &Roles) -> Result<()> {
        for s in self.symbols() {
            match roles.role(&s) {
                None => return Err(Error::UndeclaredSymbol(s.to_string())),
                Some(Role::Radial) => {}
                Some(_) => {}
            }
        }
        Ok(())
    }

    fn fmt_coefficient(f: &mut fmt::Formatter<'_>, c: &Q, m: &Monomial) -> fmt::Result {
        if m.is_one() {
            write!(f, "{c}")
        } else if c.is_one() {
            write!(f, "{m}")
        } else {
            write!(f, "{c}*{m}")
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            Self::fmt_coefficient(f, &abs, m)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs.clone();
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += rhs;
        self
    }
}

impl std::ops::AddAssign for Polynomial {
    fn add_assign(&mut self, rhs: Polynomial) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl From<Q> for Polynomial {
    fn from(c: Q) -> Self {
        Polynomial::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::value::{q, qf};

    fn x(n: &str) -> Polynomial {
        Polynomial::sym(n)
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x("x1") + &x("x2")) * &(&x("x1") - &x("x2"));
        assert_eq!(p.to_string(), "x1^2 - x2^2");
    }

    #[test]
    fn binomial_cube_coefficient() {
        let p = (&x("x1") + &x("x2")).pow(3).unwrap();
        let m = Monomial::from_powers(vec![("x1".into(), 2), ("x2".into(), 1)]);
        assert_eq!(p.coefficient(&m), q(3));
    }

    #[test]
    fn negative_power_needs_monomial_base() {
        assert!((&x("x1") + &x("x2")).pow(-1).is_err());
        let r = x("r").scale(&q(2)).pow(-2).unwrap();
        assert_eq!(r.to_string(), "1/4*r^-2");
    }

    #[test]
    fn substitution_power_rule() {
        let p = x("x2").pow(2).unwrap();
        let rep = &x("r") * &x("x2_bar");
        let out = p.substitute_one(&"x2".into(), &rep).unwrap();
        assert_eq!(out.to_string(), "r^2*x2_bar^2");
        let id: BTreeMap<Symbol, Polynomial> = [("x2".into(), x("x2"))].into_iter().collect();
        assert_eq!(p.substitute(&id).unwrap(), p);
    }

    #[test]
    fn undeclared_binding_rejected() {
        let roles = Roles::new().with(&["x2", "r"], Role::State);
        let b: BTreeMap<Symbol, Polynomial> = [("x2".into(), x("zz"))].into_iter().collect();
        assert!(matches!(
            x("x2").substitute_declared(&b, &roles),
            Err(Error::UndeclaredSymbol(_))
        ));
    }

    #[test]
    fn derivative_examples() {
        // d/dx1 (a1 x1^3 (1 - x1))
        let p = &(&x("a1") * &x("x1").pow(3).unwrap()) * &(&Polynomial::one() - &x("x1"));
        let d = p.differentiate(&"x1".into());
        let expect = &(&x("a1") * &x("x1").pow(2).unwrap()).scale(&q(3))
            - &(&x("a1") * &x("x1").pow(3).unwrap()).scale(&q(4));
        assert_eq!(d, expect);
        let p = &x("r").pow(2).unwrap() * &x("x2_bar");
        assert_eq!(p.differentiate(&"r".into()).to_string(), "2*r*x2_bar");
    }

    #[test]
    fn valuations() {
        let r: Symbol = "r".into();
        let a = &(&x("r").pow(2).unwrap() * &x("x2")) + &x("r").pow(3).unwrap();
        assert_eq!(a.r_valuation(&r).unwrap(), 2);
        assert_eq!((&x("x2") + &x("r")).r_valuation(&r).unwrap(), 0);
        let b = &(&x("r").pow(-1).unwrap() * &x("x2")) + &Polynomial::one();
        assert_eq!(b.r_valuation(&r).unwrap(), -1);
        assert!(matches!(Polynomial::zero().r_valuation(&r), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn r_division() {
        let r: Symbol = "r".into();
        let p = &x("r").pow(2).unwrap() * &x("x2");
        assert_eq!(p.divide_r_power(&r, 2, true).unwrap(), x("x2"));
        let p = &(&x("r") * &x("a")) + &(&x("r").pow(2).unwrap() * &x("b"));
        assert_eq!(p.divide_r_power(&r, 1, true).unwrap(), &x("a") + &(&x("r") * &x("b")));
        assert!(x("x2").divide_r_power(&r, 1, true).is_err());
        assert!(x("x2").divide_r_power(&r, 1, false).is_ok());
    }

    #[test]
    fn exact_evaluation() {
        let p = &x("a1") * &x("x1");
        let pt = Point::new().with("a1", q(2)).with("x1", qf(1, 2));
        assert_eq!(p.evaluate(&pt).unwrap(), Value::Exact(q(1)));
        assert!(matches!(p.evaluate(&Point::new()), Err(Error::UnboundSymbol(_))));
    }

    #[test]
    fn exact_division_and_inverse_clearing() {
        let f = &x("a") - &x("b");
        let g = &x("a") + &x("b");
        let prod = &f * &g;
        assert_eq!(prod.div_exact(&f), Some(g.clone()));
        assert_eq!((&prod + &Polynomial::one()).div_exact(&f), None);

        // q·(a-b) - 1 clears to zero under q = 1/(a-b)
        let rel = &(&x("q") * &f) - &Polynomial::one();
        assert!(rel.clear_inverse(&"q".into(), &f).unwrap().is_zero());
    }
}
