//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := base ("^" int)?
//! base   := rational | decimal | symbol | "sin(" affine ")" | "cos(" affine ")" | "(" expr ")"
//! ```
//!
//! A leading `-` is accepted on a term, `pi` is reserved, and division is
//! only by nonzero numeric constants.

use num_traits::Zero;

use super::expr::{Affine, Expr};
use super::polynomial::Polynomial;
use super::symbol::{Role, Roles};
use super::value::parse_rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            if s.matches('.').count() > 1 || s == "." {
                return Err(Error::Parse {
                    pos,
                    msg: format!("malformed number {s:?}"),
                });
            }
            out.push((pos, Tok::Num(s)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    roles: &'a Roles,
}

/// Adjacent numeric factors collapse so `3/2` stays a single number.
fn push_factor(factors: &mut Vec<Expr>, e: Expr) {
    if let (Some(Expr::Num(a)), Expr::Num(b)) = (factors.last_mut(), &e) {
        *a *= b;
        return;
    }
    factors.push(e);
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected {c:?}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut items = vec![self.signed_term()?];
        loop {
            if self.eat('+') {
                items.push(self.signed_term()?);
            } else if self.eat('-') {
                items.push(-self.signed_term()?);
            } else {
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr::Add(items)
        })
    }

    fn signed_term(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(-self.term()?)
        } else {
            self.eat('+');
            self.term()
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat('*') {
                if self.eat('-') {
                    push_factor(&mut factors, Expr::int(-1));
                }
                let f = self.factor()?;
                push_factor(&mut factors, f);
            } else if self.peek() == Some(&Tok::Op('/')) {
                let pos = self.pos();
                self.at += 1;
                let d = self.factor()?;
                let c = match d.to_polynomial().ok().and_then(|p| p.as_constant()) {
                    Some(c) if !c.is_zero() => c,
                    _ => {
                        return Err(Error::Parse {
                            pos,
                            msg: "division only by a nonzero numeric constant".into(),
                        })
                    }
                };
                push_factor(&mut factors, Expr::Num(c.recip()));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Mul(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr> {
        let base_pos = self.pos();
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let e: i32 = match self.peek() {
            Some(Tok::Num(s)) if !s.contains('.') => match s.parse() {
                Ok(v) => v,
                Err(_) => return self.err("exponent out of range"),
            },
            _ => return self.err("expected integer exponent"),
        };
        self.at += 1;
        if paren {
            self.expect(')')?;
        }
        let e = if neg { -e } else { e };
        if e < 0 {
            let ok = match &base {
                Expr::Sym(s) => self.roles.role(s) == Some(Role::Radial),
                Expr::Num(c) => !c.is_zero(),
                _ => false,
            };
            if !ok {
                return Err(Error::NegativePower(format!(
                    "{base}^{e} at position {base_pos}"
                )));
            }
        }
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.at += 1;
                Ok(Expr::Num(parse_rational(&s).map_err(|_| Error::Parse {
                    pos,
                    msg: format!("bad number {s:?}"),
                })?))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match name.as_str() {
                    "pi" => Ok(Expr::Pi),
                    "sin" | "cos" => {
                        self.expect('(')?;
                        let arg_pos = self.pos();
                        let inner = self.expr()?;
                        self.expect(')')?;
                        let aff = Affine::from_expr(&inner).ok_or_else(|| Error::Parse {
                            pos: arg_pos,
                            msg: format!("trig argument must be affine: {inner}"),
                        })?;
                        Ok(if name == "sin" {
                            Expr::Sin(aff)
                        } else {
                            Expr::Cos(aff)
                        })
                    }
                    _ => match self.roles.lookup(&name) {
                        Some((s, _)) => Ok(Expr::Sym(s)),
                        None => Err(Error::UndeclaredSymbol(name)),
                    },
                }
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an expression whose symbols must all be declared in `roles`.
pub fn parse_expression(text: &str, roles: &Roles) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        roles,
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses a trig-free expression straight to a polynomial.
pub fn parse_polynomial(text: &str, roles: &Roles) -> Result<Polynomial> {
    parse_expression(text, roles)?.to_polynomial()
}

/// Roles table declaring every name as a state symbol, plus `r` as radial.
/// Handy in tests and for one-off inputs.
pub fn permissive_roles(names: &[&str]) -> Roles {
    let mut roles = Roles::new().with(names, Role::State);
    if !names.contains(&"r") {
        roles.declare("r", Role::Radial);
    }
    roles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::value::q;

    fn roles() -> Roles {
        Roles::new()
            .with(&["x1", "x2", "ps1", "ps2"], Role::State)
            .with(&["a1", "w12", "beta"], Role::Parameter)
            .with(&["r"], Role::Radial)
    }

    #[test]
    fn distributes_products() {
        let p = parse_polynomial("a1*x1 + w12*(x2 - x1)", &roles()).unwrap();
        let want = &(&(&Polynomial::sym("a1") * &Polynomial::sym("x1"))
            + &(&Polynomial::sym("w12") * &Polynomial::sym("x2")))
            - &(&Polynomial::sym("w12") * &Polynomial::sym("x1"));
        assert_eq!(p, want);
    }

    #[test]
    fn trig_argument_is_affine() {
        let e = parse_expression("sin(ps1 - ps2 + beta)", &roles()).unwrap();
        match e {
            Expr::Sin(a) => {
                assert_eq!(a.coefficient(&"ps1".into()), q(1));
                assert_eq!(a.coefficient(&"ps2".into()), q(-1));
                assert_eq!(a.coefficient(&"beta".into()), q(1));
            }
            other => panic!("expected sin node, got {other}"),
        }
        assert!(parse_expression("sin(ps1*ps2)", &roles()).is_err());
    }

    #[test]
    fn negative_powers_only_on_radial() {
        assert!(matches!(
            parse_expression("x1^-2", &roles()),
            Err(Error::NegativePower(_))
        ));
        assert!(parse_expression("r^-1*x1", &roles()).is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expression("x1 + * x2", &roles()) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_expression("x1 + zz", &roles()),
            Err(Error::UndeclaredSymbol(_))
        ));
    }

    #[test]
    fn decimals_and_division() {
        let p = parse_polynomial("0.2*x1 + x2/4 - 3/2", &roles()).unwrap();
        assert_eq!(p.to_string(), "1/5*x1 + 1/4*x2 - 3/2");
        let back = parse_polynomial(&p.to_string(), &roles()).unwrap();
        assert_eq!(back, p);
    }
}
