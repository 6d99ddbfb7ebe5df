use std::collections::BTreeMap;
use std::path::Path;

use netblow::netsys::{emit_system, parse_system, ExprField, NetworkSystem, VectorField};
use netblow::poly::{Point, Symbol, Value, Q};
use netblow::registry::{lookup, ExampleEntry};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// A system loaded from a file or the example registry.
pub struct Loaded {
    pub system: NetworkSystem,
    pub example: Option<ExampleEntry>,
    pub digest: String,
    /// Example defaults overridden by `--params`.
    pub params: Point,
}

impl Loaded {
    pub fn load(source: &str, params: Option<&str>) -> CliResult<Self> {
        let path = Path::new(source);
        let (system, example, text) = if path.is_file() {
            let text = std::fs::read_to_string(path)?;
            (parse_system(&text)?, None, text)
        } else {
            let entry = lookup(source).map_err(|_| {
                CliError::Input(format!("{source:?} is neither a readable file nor an example id"))
            })?;
            let ns = (entry.build)()?;
            let text = emit_system(&ns);
            (ns, Some(entry), text)
        };
        let mut p = example.as_ref().map(|e| (e.default_params)()).unwrap_or_default();
        if let Some(text) = params {
            p.extend(&Point::parse(text)?);
        }
        Ok(Loaded {
            system,
            example,
            digest: format!("{:x}", Sha256::digest(text.as_bytes())),
            params: p,
        })
    }

    pub fn expr_field(&self) -> CliResult<ExprField> {
        Ok(self.system.assemble_expr()?)
    }

    /// `--at` if given, else the example equilibrium, else the origin.
    pub fn point(&self, at: Option<&str>) -> CliResult<Point> {
        let mut p: Point = self
            .system
            .nodes
            .iter()
            .chain(self.system.adapted_weights().iter())
            .map(|s| (s.clone(), Value::zero()))
            .collect();
        if let Some(e) = &self.example {
            p.extend(&(e.equilibrium)());
        }
        if let Some(text) = at {
            p.extend(&Point::parse(text)?);
        }
        Ok(p)
    }

    /// Polynomial field with the bound parameters substituted, Taylor
    /// expanded about `at` when trig terms are present, and shifted so that
    /// `at` sits at the origin. Symbols in `keep` stay symbolic.
    pub fn polynomial_at(&self, at: &Point, keep: &[Symbol], taylor: u32, symbolic: bool) -> CliResult<VectorField> {
        let ef = self.expr_field()?;
        let mut center = at.clone();
        for s in &ef.parameters {
            if !center.contains(s) {
                center.set(s.clone(), Value::zero());
            }
        }
        let vf = if ef.has_trig() {
            let shifted = exact(&center, "the expansion point")?;
            self.system.assemble(Some((taylor, &Point::from(shifted))))?.field
        } else {
            self.system.assemble_polynomial()?
        };
        let mut bind = BTreeMap::new();
        if !symbolic {
            for (s, v) in self.params.iter() {
                if vf.parameters.contains(s) && !keep.contains(s) {
                    bind.insert(s.clone(), exact_value(s, v)?);
                }
            }
        }
        let vf = vf.bind_parameters(&bind);
        let shift: BTreeMap<Symbol, Q> = vf
            .variables
            .iter()
            .filter_map(|s| at.get(s).map(|v| exact_value(s, v).map(|q| (s.clone(), q))))
            .collect::<CliResult<_>>()?;
        if shift.values().all(|q| q == &Q::from_integer(0.into())) {
            Ok(vf)
        } else {
            Ok(vf.shift_origin_q(&shift)?)
        }
    }
}

fn exact_value(s: &Symbol, v: &Value) -> CliResult<Q> {
    v.as_exact()
        .cloned()
        .ok_or_else(|| CliError::Input(format!("{s} = {v} must be rational here")))
}

fn exact(p: &Point, what: &str) -> CliResult<BTreeMap<Symbol, Q>> {
    p.exact()
        .ok_or_else(|| CliError::Input(format!("{what} must be rational")))
}

/// Binds numeric values as f64.
pub fn floats(p: &Point) -> BTreeMap<Symbol, f64> {
    p.iter().map(|(s, v)| (s.clone(), v.to_f64())).collect()
}

/// State vector in the field's variable order.
pub fn state(vars: &[Symbol], p: &Point) -> CliResult<Vec<f64>> {
    vars.iter()
        .map(|s| {
            p.get(s)
                .map(Value::to_f64)
                .ok_or_else(|| CliError::Input(format!("no value given for {s}")))
        })
        .collect()
}

/// Symbol, bounds and optional point count.
pub type Range = (Symbol, f64, f64, Option<usize>);

/// `x=-1:1,y=-2:2` or with a count, `x=-1:1:11`.
pub fn ranges(text: &str) -> CliResult<Vec<Range>> {
    let bad = |item: &str| CliError::Input(format!("range {item:?} is not name=lo:hi[:n]"));
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (k, v) = item.split_once('=').ok_or_else(|| bad(item))?;
            let parts: Vec<&str> = v.split(':').collect();
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(item));
            match parts.as_slice() {
                [lo, hi] => Ok((Symbol::new(k.trim()), num(lo)?, num(hi)?, None)),
                [lo, hi, n] => {
                    let n = n.trim().parse().map_err(|_| bad(item))?;
                    Ok((Symbol::new(k.trim()), num(lo)?, num(hi)?, Some(n)))
                }
                _ => Err(bad(item)),
            }
        })
        .collect()
}

/// `r=0,eps_bar=1`.
pub fn pins(text: &str) -> CliResult<BTreeMap<Symbol, Q>> {
    let p = Point::parse(text)?;
    exact(&p, "restriction values")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_forms() {
        let r = ranges("x1=-1:1, x2=0:2:5").unwrap();
        assert_eq!(r[0], (Symbol::new("x1"), -1.0, 1.0, None));
        assert_eq!(r[1].3, Some(5));
        assert!(ranges("x1=1").is_err());
    }

    #[test]
    fn example_defaults_are_overridden() {
        let l = Loaded::load("diffusive2", Some("w12=3")).unwrap();
        assert_eq!(l.params.get(&Symbol::new("w12")), Some(&Value::Exact(Q::from_integer(3.into()))));
        assert_eq!(l.params.get(&Symbol::new("a1")), Some(&Value::Exact(Q::from_integer(2.into()))));
        assert_eq!(l.digest.len(), 64);
    }

    #[test]
    fn unknown_source_is_input_error() {
        assert!(matches!(Loaded::load("no-such-thing", None), Err(CliError::Input(_))));
    }
}
