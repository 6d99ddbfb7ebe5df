use std::cmp::Ordering;
use std::fmt;

use super::symbol::Symbol;

/// A power product with exponents sorted by symbol. Zero exponents are never
/// stored; negative exponents only appear on the radial symbol.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    powers: Vec<(Symbol, i32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(s: Symbol) -> Self {
        Monomial {
            powers: vec![(s, 1)],
        }
    }

    pub fn from_powers(mut powers: Vec<(Symbol, i32)>) -> Self {
        powers.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Symbol, i32)> = Vec::with_capacity(powers.len());
        for (s, e) in powers {
            match merged.last_mut() {
                Some((last, le)) if *last == s => *le += e,
                _ => merged.push((s, e)),
            }
        }
        merged.retain(|(_, e)| *e != 0);
        Monomial { powers: merged }
    }

    pub fn powers(&self) -> &[(Symbol, i32)] {
        &self.powers
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.powers.iter().map(|(_, e)| *e as i64).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> i32 {
        self.powers
            .binary_search_by(|(k, _)| k.cmp(s))
            .map(|i| self.powers[i].1)
            .unwrap_or(0)
    }

    /// Total degree counting only the given symbols.
    pub fn degree_in(&self, syms: &[Symbol]) -> i64 {
        self.powers
            .iter()
            .filter(|(s, _)| syms.contains(s))
            .map(|(_, e)| *e as i64)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.powers.len() + other.powers.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.powers, &other.powers);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { powers: out }
    }

    pub fn pow(&self, e: i32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            powers: self.powers.iter().map(|(s, k)| (s.clone(), k * e)).collect(),
        }
    }

    /// `self / other` when every resulting exponent is nonnegative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let q = self.mul(&other.pow(-1));
        if q.powers.iter().all(|(_, e)| *e >= 0) {
            Some(q)
        } else {
            None
        }
    }

    /// Splits off the power of `s`.
    pub fn split(&self, s: &Symbol) -> (i32, Monomial) {
        let e = self.exponent(s);
        let rest = Monomial {
            powers: self.powers.iter().filter(|(k, _)| k != s).cloned().collect(),
        };
        (e, rest)
    }

    pub fn without(&self, syms: &[Symbol]) -> Monomial {
        Monomial {
            powers: self
                .powers
                .iter()
                .filter(|(k, _)| !syms.contains(k))
                .cloned()
                .collect(),
        }
    }

    pub fn only(&self, syms: &[Symbol]) -> Monomial {
        Monomial {
            powers: self
                .powers
                .iter()
                .filter(|(k, _)| syms.contains(k))
                .cloned()
                .collect(),
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.powers.iter().map(|(s, _)| s)
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.powers, &other.powers);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, ea)), None) => return ea.cmp(&0),
                (None, Some((_, eb))) => return 0.cmp(eb),
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(eb),
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

/// Graded lexicographic order, variables ranked by name.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.powers.is_empty() {
            return f.write_str("1");
        }
        for (i, (s, e)) in self.powers.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
