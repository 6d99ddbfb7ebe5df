use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::value::{Point, Value, Q};
use crate::poly::{Expr, Polynomial, Symbol};

/// Polynomial vector field: one component per variable, with the remaining
/// free symbols listed as frozen parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub variables: Vec<Symbol>,
    pub components: Vec<Polynomial>,
    pub parameters: Vec<Symbol>,
}

impl VectorField {
    pub fn new(variables: Vec<Symbol>, components: Vec<Polynomial>, parameters: Vec<Symbol>) -> Result<Self> {
        if variables.len() != components.len() {
            return Err(Error::Dimension(format!(
                "{} variables but {} components",
                variables.len(),
                components.len()
            )));
        }
        Ok(VectorField {
            variables,
            components,
            parameters,
        })
    }

    /// Field whose parameters are whatever free symbols are not variables.
    pub fn infer(variables: Vec<Symbol>, components: Vec<Polynomial>) -> Result<Self> {
        let vars: BTreeSet<&Symbol> = variables.iter().collect();
        let params: Vec<Symbol> = components
            .iter()
            .flat_map(Polynomial::symbols)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .filter(|s| !vars.contains(s))
            .collect();
        Self::new(variables, components, params)
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.variables.iter().position(|v| v == s)
    }

    pub fn component(&self, s: &Symbol) -> Option<&Polynomial> {
        self.index_of(s).map(|i| &self.components[i])
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Result<Polynomial>) -> Result<VectorField> {
        Ok(VectorField {
            variables: self.variables.clone(),
            components: self.components.iter().map(f).collect::<Result<_>>()?,
            parameters: self.parameters.clone(),
        })
    }

    /// Substitutes rational values for parameters and drops them from the
    /// parameter list.
    pub fn bind_parameters(&self, values: &BTreeMap<Symbol, Q>) -> VectorField {
        VectorField {
            variables: self.variables.clone(),
            components: self.components.iter().map(|c| c.partial_eval(values)).collect(),
            parameters: self
                .parameters
                .iter()
                .filter(|p| !values.contains_key(*p))
                .cloned()
                .collect(),
        }
    }

    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Polynomial>) -> Result<VectorField> {
        self.map(|c| c.substitute(bindings))
    }

    /// Promotes a parameter to a variable with a zero row (`σ' = 0`).
    pub fn lift_parameter(&self, p: &Symbol) -> Result<VectorField> {
        if self.index_of(p).is_some() {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        out.parameters.retain(|s| s != p);
        out.variables.push(p.clone());
        out.components.push(Polynomial::zero());
        Ok(out)
    }

    pub fn lift_parameters(&self, ps: &[Symbol]) -> Result<VectorField> {
        ps.iter().try_fold(self.clone(), |acc, p| acc.lift_parameter(p))
    }

    /// `G(y) = F(y + shift)`; shifts may be symbolic.
    pub fn shift_origin(&self, shift: &BTreeMap<Symbol, Polynomial>) -> Result<VectorField> {
        let bindings: BTreeMap<Symbol, Polynomial> = shift
            .iter()
            .map(|(s, c)| (s.clone(), &Polynomial::var(s) + c))
            .collect();
        self.substitute(&bindings)
    }

    pub fn shift_origin_q(&self, shift: &BTreeMap<Symbol, Q>) -> Result<VectorField> {
        let shift = shift
            .iter()
            .map(|(s, c)| (s.clone(), Polynomial::constant(c.clone())))
            .collect();
        self.shift_origin(&shift)
    }

    /// Pins variables to constants after checking the pinned rows vanish
    /// identically there.
    pub fn restrict(&self, pins: &BTreeMap<Symbol, Q>) -> Result<VectorField> {
        for s in pins.keys() {
            if self.index_of(s).is_none() {
                return Err(Error::Input(format!("{s} is not a variable")));
            }
        }
        let mut vars = Vec::new();
        let mut comps = Vec::new();
        for (v, c) in self.variables.iter().zip(&self.components) {
            let pinned = c.partial_eval(pins);
            if pins.contains_key(v) {
                if !pinned.is_zero() {
                    return Err(Error::NotInvariant(format!(
                        "{v}' = {pinned} does not vanish on the subset"
                    )));
                }
            } else {
                vars.push(v.clone());
                comps.push(pinned);
            }
        }
        Self::new(vars, comps, self.parameters.clone())
    }

    pub fn evaluate(&self, point: &Point) -> Result<Vec<Value>> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }

    pub fn evaluate_q(&self, point: &BTreeMap<Symbol, Q>) -> Result<Vec<Q>> {
        self.components.iter().map(|c| c.eval_q(point)).collect()
    }

    pub fn jacobian_symbolic(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|c| self.variables.iter().map(|v| c.differentiate(v)).collect())
            .collect()
    }

    pub fn to_expr_field(&self) -> ExprField {
        ExprField {
            variables: self.variables.clone(),
            components: self.components.iter().map(Expr::from_polynomial).collect(),
            parameters: self.parameters.clone(),
        }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, c) in self.variables.iter().zip(&self.components) {
            writeln!(f, "{v}' = {c}")?;
        }
        Ok(())
    }
}

impl Serialize for VectorField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let comps: Vec<(String, String)> = self
            .variables
            .iter()
            .zip(&self.components)
            .map(|(v, c)| (v.to_string(), c.to_string()))
            .collect();
        let comps: serde_json::Map<String, serde_json::Value> =
            comps.into_iter().map(|(k, v)| (k, v.into())).collect();
        let mut st = s.serialize_struct("VectorField", 3)?;
        st.serialize_field("variables", &self.variables)?;
        st.serialize_field("parameters", &self.parameters)?;
        st.serialize_field("components", &comps)?;
        st.end()
    }
}

/// Expression-valued field for right-hand sides that keep sines and cosines.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprField {
    pub variables: Vec<Symbol>,
    pub components: Vec<Expr>,
    pub parameters: Vec<Symbol>,
}

impl ExprField {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn has_trig(&self) -> bool {
        self.components.iter().any(Expr::has_trig)
    }

    pub fn to_polynomial_field(&self) -> Result<VectorField> {
        VectorField::new(
            self.variables.clone(),
            self.components.iter().map(Expr::to_polynomial).collect::<Result<_>>()?,
            self.parameters.clone(),
        )
    }

    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<ExprField> {
        Ok(ExprField {
            variables: self.variables.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.substitute(bindings))
                .collect::<Result<_>>()?,
            parameters: self.parameters.clone(),
        })
    }

    pub fn evaluate(&self, point: &Point) -> Result<Vec<Value>> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }

    /// Drops variables (and their rows) after substituting values for them.
    pub fn eliminate(&self, values: &BTreeMap<Symbol, Q>) -> Result<ExprField> {
        let b: BTreeMap<Symbol, Expr> = values
            .iter()
            .map(|(s, v)| (s.clone(), Expr::Num(v.clone())))
            .collect();
        let sub = self.substitute(&b)?;
        let (vars, comps) = sub
            .variables
            .into_iter()
            .zip(sub.components)
            .filter(|(v, _)| !values.contains_key(v))
            .unzip();
        Ok(ExprField {
            variables: vars,
            components: comps,
            parameters: self.parameters.clone(),
        })
    }
}

impl fmt::Display for ExprField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, c) in self.variables.iter().zip(&self.components) {
            writeln!(f, "{v}' = {c}")?;
        }
        Ok(())
    }
}
