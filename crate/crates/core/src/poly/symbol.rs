use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// An interned-by-value symbol name. Ordering is plain string ordering, which
/// fixes the variable order used by the graded-lex term order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The barred chart coordinate standing in for this symbol.
    pub fn barred(&self) -> Symbol {
        Symbol::new(&format!("{}_bar", self.0))
    }

    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<&String> for Symbol {
    fn from(s: &String) -> Self {
        Symbol::new(s)
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Symbol::new(&s))
    }
}

/// What a symbol stands for in a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    State,
    Parameter,
    /// The one symbol allowed to carry negative powers.
    Radial,
    TrigCos,
    TrigSin,
}

/// Symbol declarations used by the parser.
#[derive(Clone, Debug, Default)]
pub struct Roles {
    table: BTreeMap<Symbol, Role>,
}

impl Roles {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, role: Role) -> &mut Self {
        self.table.insert(Symbol::new(name), role);
        self
    }

    pub fn with(mut self, names: &[&str], role: Role) -> Self {
        for n in names {
            self.declare(n, role);
        }
        self
    }

    pub fn role(&self, s: &Symbol) -> Option<Role> {
        self.table.get(s).copied()
    }

    pub fn lookup(&self, name: &str) -> Option<(Symbol, Role)> {
        self.table
            .get_key_value(&Symbol::new(name))
            .map(|(k, v)| (k.clone(), *v))
    }

    pub fn radial(&self) -> Option<Symbol> {
        self.table
            .iter()
            .find(|(_, r)| **r == Role::Radial)
            .map(|(s, _)| s.clone())
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, &Role)> {
        self.table.iter()
    }
}
