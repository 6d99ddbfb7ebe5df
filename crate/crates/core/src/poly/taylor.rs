use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::expr::{Affine, Expr};
use super::polynomial::Polynomial;
use super::symbol::Symbol;
use super::value::{exact_trig, q, Point, Value, Q};
use crate::error::{Error, Result};

/// Auxiliary symbols standing for `sin(angle)` and `cos(angle)`, tied by
/// `sin² + cos² = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrigConstant {
    pub sin: Symbol,
    pub cos: Symbol,
    #[serde(serialize_with = "ser_affine")]
    pub angle: Affine,
}

fn ser_affine<S: serde::Serializer>(a: &Affine, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&a.to_string())
}

impl TrigConstant {
    /// `sin² + cos² − 1`, which vanishes on every consistent binding.
    pub fn identity(&self) -> Polynomial {
        &(&Polynomial::var(&self.sin).pow(2).unwrap() + &Polynomial::var(&self.cos).pow(2).unwrap())
            - &Polynomial::one()
    }

    /// Adds numeric values for the auxiliary symbols to `point`.
    pub fn bind(&self, point: &mut Point) -> Result<()> {
        let a = self.angle.evaluate(point)?;
        point.set(self.sin.clone(), a.sin());
        point.set(self.cos.clone(), a.cos());
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expansion {
    pub polynomial: Polynomial,
    pub trig_constants: Vec<TrigConstant>,
}

impl Expansion {
    pub fn bind_constants(&self, point: &mut Point) -> Result<()> {
        for t in &self.trig_constants {
            t.bind(point)?;
        }
        Ok(())
    }
}

struct Expander<'a> {
    center: &'a BTreeMap<Symbol, Q>,
    centered: Vec<Symbol>,
    degree: i64,
    constants: Vec<TrigConstant>,
}

fn factorial(n: u32) -> Q {
    Q::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)))
}

fn angle_name(v: &Value) -> String {
    let raw = match v {
        Value::Exact(c) => c.to_string(),
        Value::WithPi { rational, pi } if rational.is_zero() => format!("{pi}pi"),
        other => other.to_string(),
    };
    raw.chars()
        .map(|c| match c {
            '-' => 'm',
            c if c.is_ascii_alphanumeric() => c,
            _ => '_',
        })
        .filter(|c| *c != ' ')
        .collect()
}

impl Expander<'_> {
    fn trunc(&self, p: Polynomial) -> Polynomial {
        p.truncate(&self.centered, self.degree)
    }

    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        self.trunc(a * b)
    }

    fn constant_pair(&mut self, angle: Affine, name: String) -> (Polynomial, Polynomial) {
        let t = TrigConstant {
            sin: Symbol::new(&format!("sin_{name}")),
            cos: Symbol::new(&format!("cos_{name}")),
            angle,
        };
        let pair = (Polynomial::var(&t.sin), Polynomial::var(&t.cos));
        if !self.constants.contains(&t) {
            self.constants.push(t);
        }
        pair
    }

    /// `(sin ρ, cos ρ)` for the part of the argument that is not expanded.
    fn trig_of_rest(&mut self, numeric: Value, symbolic: &BTreeMap<Symbol, Q>) -> Result<(Polynomial, Polynomial)> {
        let (mut s, mut c) = if numeric == Value::zero() {
            (Polynomial::zero(), Polynomial::one())
        } else {
            let (es, ec) = exact_trig(&numeric).unwrap_or((None, None));
            let need_aux = es.is_none() || ec.is_none();
            let aux = if need_aux {
                let angle = match &numeric {
                    Value::Exact(r) => Affine {
                        constant: r.clone(),
                        ..Affine::default()
                    },
                    Value::WithPi { rational, pi } => Affine {
                        constant: rational.clone(),
                        pi: pi.clone(),
                        ..Affine::default()
                    },
                    Value::Float(_) => return Err(Error::UnsupportedTrig("non-exact angle".into())),
                };
                Some(self.constant_pair(angle, angle_name(&numeric)))
            } else {
                None
            };
            (
                es.map(Polynomial::constant)
                    .unwrap_or_else(|| aux.clone().unwrap().0),
                ec.map(Polynomial::constant).unwrap_or_else(|| aux.unwrap().1),
            )
        };
        for (sym, k) in symbolic {
            if !k.is_integer() {
                return Err(Error::UnsupportedTrig(format!(
                    "non-integer multiple {k} of symbolic angle {sym}"
                )));
            }
            let n = k.to_integer().to_i64().ok_or_else(|| Error::UnsupportedTrig(format!("{k}")))?;
            let (bs, bc) = self.constant_pair(Affine::symbol(sym), sym.to_string());
            let (mut ks, mut kc) = (Polynomial::zero(), Polynomial::one());
            for _ in 0..n.unsigned_abs() {
                let ns = &(&ks * &bc) + &(&kc * &bs);
                let nc = &(&kc * &bc) - &(&ks * &bs);
                ks = ns;
                kc = nc;
            }
            if n < 0 {
                ks = -ks;
            }
            let ns = &(&s * &kc) + &(&c * &ks);
            let nc = &(&c * &kc) - &(&s * &ks);
            s = ns;
            c = nc;
        }
        Ok((s, c))
    }

    fn trig(&mut self, a: &Affine, is_sin: bool) -> Result<Polynomial> {
        let mut lin = Polynomial::zero();
        let mut numeric = Value::WithPi {
            rational: a.constant.clone(),
            pi: a.pi.clone(),
        };
        if a.pi.is_zero() {
            numeric = Value::Exact(a.constant.clone());
        }
        let mut symbolic = BTreeMap::new();
        for (s, k) in &a.coeffs {
            match self.center.get(s) {
                Some(c0) => {
                    lin += Polynomial::var(s).scale(k);
                    numeric = numeric.add(&Value::Exact(c0 * k));
                }
                None => {
                    symbolic.insert(s.clone(), k.clone());
                }
            }
        }
        let (sr, cr) = self.trig_of_rest(numeric, &symbolic)?;
        let (mut sin_l, mut cos_l) = (Polynomial::zero(), Polynomial::zero());
        let mut power = Polynomial::one();
        for k in 0..=self.degree.max(0) as u32 {
            let term = power.scale(&factorial(k).recip());
            let sign = if (k / 2) % 2 == 0 { q(1) } else { q(-1) };
            if k % 2 == 0 {
                cos_l += term.scale(&sign);
            } else {
                sin_l += term.scale(&sign);
            }
            power = self.mul(&power, &lin);
            if power.is_zero() {
                break;
            }
        }
        Ok(if is_sin {
            self.trunc(&(&sr * &cos_l) + &(&cr * &sin_l))
        } else {
            self.trunc(&(&cr * &cos_l) - &(&sr * &sin_l))
        })
    }

    fn expand(&mut self, e: &Expr) -> Result<Polynomial> {
        match e {
            Expr::Num(c) => Ok(Polynomial::constant(c.clone())),
            Expr::Pi => Err(Error::Eval("pi outside a trigonometric argument".into())),
            Expr::Sym(s) => Ok(match self.center.get(s) {
                Some(c) if !c.is_zero() => &Polynomial::var(s) + &Polynomial::constant(c.clone()),
                Some(_) => self.trunc(Polynomial::var(s)),
                None => Polynomial::var(s),
            }),
            Expr::Add(v) => {
                let mut acc = Polynomial::zero();
                for x in v {
                    acc += self.expand(x)?;
                }
                Ok(acc)
            }
            Expr::Mul(v) => {
                let mut acc = Polynomial::one();
                for x in v {
                    let p = self.expand(x)?;
                    acc = self.mul(&acc, &p);
                }
                Ok(acc)
            }
            Expr::Pow(b, k) => {
                let p = self.expand(b)?;
                if *k < 0 {
                    if p.symbols().iter().any(|s| self.center.contains_key(s)) {
                        return Err(Error::NegativePower(format!(
                            "cannot expand negative power of {b} about the center"
                        )));
                    }
                    return p.pow(*k);
                }
                let mut acc = Polynomial::one();
                for _ in 0..*k {
                    acc = self.mul(&acc, &p);
                }
                Ok(acc)
            }
            Expr::Sin(a) => self.trig(a, true),
            Expr::Cos(a) => self.trig(a, false),
        }
    }
}

/// Taylor polynomial of `e` about `center` through total degree `degree` in
/// the centered symbols. Symbols absent from `center` stay symbolic; sines
/// and cosines of such symbols become auxiliary `sin_<s>`/`cos_<s>` symbols.
pub fn taylor_expand(e: &Expr, center: &Point, degree: u32) -> Result<Expansion> {
    let center: BTreeMap<Symbol, Q> = center
        .iter()
        .map(|(s, v)| match v {
            Value::Exact(c) => Ok((s.clone(), c.clone())),
            other => Err(Error::Input(format!(
                "center value for {s} must be rational, got {other}"
            ))),
        })
        .collect::<Result<_>>()?;
    let mut ex = Expander {
        center: &center,
        centered: center.keys().cloned().collect(),
        degree: degree as i64,
        constants: Vec::new(),
    };
    let shifted = ex.expand(e)?;
    // back from deviations u = s − c to the original symbols
    let back: BTreeMap<Symbol, Polynomial> = center
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(s, c)| (s.clone(), &Polynomial::var(s) - &Polynomial::constant(c.clone())))
        .collect();
    let polynomial = if back.is_empty() {
        shifted
    } else {
        shifted.substitute(&back)?
    };
    Ok(Expansion {
        polynomial,
        trig_constants: ex.constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::{parse_expression, permissive_roles};

    fn at_zero(names: &[&str]) -> Point {
        names.iter().map(|n| (Symbol::new(n), Value::zero())).collect()
    }

    #[test]
    fn sine_series() {
        let roles = permissive_roles(&["u"]);
        let e = parse_expression("sin(u)", &roles).unwrap();
        let ex = taylor_expand(&e, &at_zero(&["u"]), 3).unwrap();
        assert_eq!(ex.polynomial.to_string(), "-1/6*u^3 + u");
        let c = parse_expression("cos(u)", &roles).unwrap();
        assert_eq!(taylor_expand(&c, &at_zero(&["u"]), 0).unwrap().polynomial, Polynomial::one());
    }

    #[test]
    fn symbolic_phase_becomes_constants() {
        let roles = permissive_roles(&["ps1", "ps2", "beta"]);
        let e = parse_expression("sin(ps1 - ps2 + beta)", &roles).unwrap();
        let ex = taylor_expand(&e, &at_zero(&["ps1", "ps2"]), 1).unwrap();
        assert_eq!(
            ex.polynomial.to_string(),
            "cos_beta*ps1 - cos_beta*ps2 + sin_beta"
        );
        assert_eq!(ex.trig_constants.len(), 1);
        assert_eq!(ex.trig_constants[0].sin.as_str(), "sin_beta");
    }

    #[test]
    fn nonzero_center() {
        // x^2 about x = 1, degree 1: 1 + 2(x-1) = 2x - 1
        let roles = permissive_roles(&["x"]);
        let e = parse_expression("x^2", &roles).unwrap();
        let c = Point::new().with("x", q(1));
        assert_eq!(taylor_expand(&e, &c, 1).unwrap().polynomial.to_string(), "2*x - 1");
        let e = parse_expression("cos(x + pi/2)", &roles).unwrap();
        let ex = taylor_expand(&e, &at_zero(&["x"]), 1).unwrap();
        assert_eq!(ex.polynomial.to_string(), "-x");
    }

    #[test]
    fn fractional_symbolic_multiple_rejected() {
        let roles = permissive_roles(&["x", "b"]);
        let e = parse_expression("sin(x + b/2)", &roles).unwrap();
        assert!(matches!(
            taylor_expand(&e, &at_zero(&["x"]), 1),
            Err(Error::UnsupportedTrig(_))
        ));
    }
}
