//! Network dynamical systems: per-node internal dynamics, weighted pairwise
//! interactions and optional slow edge adaptation.

mod field;
mod format;
mod linear;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::taylor::{taylor_expand, TrigConstant};
use crate::poly::value::{Point, Q};
use crate::poly::{parse_expression, Expr, Polynomial, Role, Roles, Symbol};

pub use field::{ExprField, VectorField};
pub use format::{emit_system, parse_system};
pub use linear::{diffusive_weights_2node, linearize, LinearDecomposition};

#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Symbol(Symbol),
    Constant(Q),
}

impl Weight {
    pub fn to_expr(&self) -> Expr {
        match self {
            Weight::Symbol(s) => Expr::Sym(s.clone()),
            Weight::Constant(c) => Expr::Num(c.clone()),
        }
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weight::Symbol(s) => write!(f, "{s}"),
            Weight::Constant(c) => write!(f, "{c}"),
        }
    }
}

/// `w_ij · h_ij(x_i, x_j)` contributing to the row of `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interaction {
    pub target: Symbol,
    pub source: Symbol,
    pub weight: Weight,
    pub coupling: Expr,
}

/// `w' = ε · rule`.
#[derive(Clone, Debug, PartialEq)]
pub struct Adaptation {
    pub weight: Symbol,
    pub rule: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSystem {
    pub name: String,
    pub nodes: Vec<Symbol>,
    pub params: Vec<Symbol>,
    pub slow: Option<Symbol>,
    pub internal: Vec<Expr>,
    pub interactions: Vec<Interaction>,
    pub adaptation: Vec<Adaptation>,
}

/// Assembled polynomial field plus any auxiliary trig constants introduced
/// by Taylor expansion.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub field: VectorField,
    pub trig_constants: Vec<TrigConstant>,
}

impl NetworkSystem {
    pub fn new(name: &str, nodes: &[&str], params: &[&str]) -> Self {
        NetworkSystem {
            name: name.to_string(),
            nodes: nodes.iter().map(|n| Symbol::new(n)).collect(),
            params: params.iter().map(|n| Symbol::new(n)).collect(),
            slow: None,
            internal: vec![Expr::zero(); nodes.len()],
            interactions: Vec::new(),
            adaptation: Vec::new(),
        }
    }

    pub fn roles(&self) -> Roles {
        let mut r = Roles::new();
        for n in &self.nodes {
            r.declare(n.as_str(), Role::State);
        }
        for p in self.params.iter().chain(self.slow.iter()) {
            r.declare(p.as_str(), Role::Parameter);
        }
        r
    }

    fn node_index(&self, s: &Symbol) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == s)
            .ok_or_else(|| Error::Input(format!("{s} is not a node")))
    }

    fn scalar_symbols(&self) -> BTreeSet<Symbol> {
        self.params.iter().chain(self.slow.iter()).cloned().collect()
    }

    pub fn with_slow(mut self, eps: &str) -> Self {
        self.slow = Some(Symbol::new(eps));
        self
    }

    pub fn set_internal(&mut self, node: &str, text: &str) -> Result<()> {
        let i = self.node_index(&Symbol::new(node))?;
        self.internal[i] = parse_expression(text, &self.roles())?;
        Ok(())
    }

    pub fn add_coupling(&mut self, target: &str, source: &str, weight: &str, text: &str) -> Result<()> {
        let weight = match crate::poly::value::parse_rational(weight) {
            Ok(c) => Weight::Constant(c),
            Err(_) => Weight::Symbol(Symbol::new(weight.trim())),
        };
        self.interactions.push(Interaction {
            target: Symbol::new(target),
            source: Symbol::new(source),
            weight,
            coupling: parse_expression(text, &self.roles())?,
        });
        Ok(())
    }

    pub fn add_adaptation(&mut self, weight: &str, text: &str) -> Result<()> {
        self.adaptation.push(Adaptation {
            weight: Symbol::new(weight),
            rule: parse_expression(text, &self.roles())?,
        });
        Ok(())
    }

    /// Checks the structural invariants of a network system.
    pub fn validate(&self) -> Result<()> {
        let scalars = self.scalar_symbols();
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.clone()) || scalars.contains(n) {
                return Err(Error::Input(format!("duplicate symbol {n}")));
            }
        }
        if self.internal.len() != self.nodes.len() {
            return Err(Error::Dimension("one internal expression per node".into()));
        }
        for (n, f) in self.nodes.iter().zip(&self.internal) {
            for s in f.symbols() {
                if &s != n && !scalars.contains(&s) {
                    return Err(Error::Input(format!(
                        "internal dynamics of {n} depend on {s}"
                    )));
                }
            }
        }
        for it in &self.interactions {
            self.node_index(&it.target)?;
            self.node_index(&it.source)?;
            if let Weight::Symbol(w) = &it.weight {
                if !self.params.contains(w) {
                    return Err(Error::UndeclaredSymbol(w.to_string()));
                }
            }
            for s in it.coupling.symbols() {
                if s != it.target && s != it.source && !scalars.contains(&s) {
                    return Err(Error::Input(format!(
                        "coupling {} <- {} depends on {s}",
                        it.target, it.source
                    )));
                }
            }
        }
        let mut adapted = BTreeSet::new();
        for ad in &self.adaptation {
            if !self.params.contains(&ad.weight) {
                return Err(Error::Input(format!(
                    "adapted weight {} must be a declared symbol",
                    ad.weight
                )));
            }
            if !adapted.insert(ad.weight.clone()) {
                return Err(Error::Input(format!("{} adapted twice", ad.weight)));
            }
            if self.slow.as_ref() == Some(&ad.weight) {
                return Err(Error::Input("slow symbol cannot be adapted".into()));
            }
        }
        Ok(())
    }

    pub fn adapted_weights(&self) -> Vec<Symbol> {
        self.adaptation.iter().map(|a| a.weight.clone()).collect()
    }

    /// `f_i + Σ_j w_ij h_ij` for node `i`.
    pub fn node_row(&self, i: usize) -> Expr {
        let mut items = vec![self.internal[i].clone()];
        for it in self.interactions.iter().filter(|it| it.target == self.nodes[i]) {
            items.push(it.weight.to_expr() * it.coupling.clone());
        }
        Expr::sum(items)
    }

    /// The interaction part `Σ_j w_ij h_ij` alone.
    pub fn interaction_row(&self, i: usize) -> Expr {
        Expr::sum(
            self.interactions
                .iter()
                .filter(|it| it.target == self.nodes[i])
                .map(|it| it.weight.to_expr() * it.coupling.clone())
                .collect(),
        )
    }

    fn frozen_parameters(&self) -> Vec<Symbol> {
        let adapted: BTreeSet<Symbol> = self.adapted_weights().into_iter().collect();
        self.params
            .iter()
            .filter(|p| !adapted.contains(*p))
            .chain(self.slow.iter())
            .cloned()
            .collect()
    }

    /// Node rows followed by `ε·g` rows for adapted weights, trig kept.
    pub fn assemble_expr(&self) -> Result<ExprField> {
        self.validate()?;
        let mut vars = self.nodes.clone();
        let mut comps: Vec<Expr> = (0..self.nodes.len()).map(|i| self.node_row(i)).collect();
        for ad in &self.adaptation {
            vars.push(ad.weight.clone());
            comps.push(match &self.slow {
                Some(eps) => Expr::Sym(eps.clone()) * ad.rule.clone(),
                None => ad.rule.clone(),
            });
        }
        Ok(ExprField {
            variables: vars,
            components: comps,
            parameters: self.frozen_parameters(),
        })
    }

    /// Polynomial field. Trig terms require `taylor = Some((degree, center))`.
    pub fn assemble(&self, taylor: Option<(u32, &Point)>) -> Result<Assembled> {
        let ef = self.assemble_expr()?;
        let mut trig_constants: Vec<TrigConstant> = Vec::new();
        let mut comps = Vec::with_capacity(ef.dim());
        for c in &ef.components {
            match (c.has_trig(), taylor) {
                (false, _) => comps.push(c.to_polynomial()?),
                (true, None) => return Err(Error::TrigNeedsExpansion),
                (true, Some((deg, center))) => {
                    let ex = taylor_expand(c, center, deg)?;
                    for t in ex.trig_constants {
                        if !trig_constants.contains(&t) {
                            trig_constants.push(t);
                        }
                    }
                    comps.push(ex.polynomial);
                }
            }
        }
        let mut params = ef.parameters.clone();
        for t in &trig_constants {
            params.push(t.sin.clone());
            params.push(t.cos.clone());
        }
        Ok(Assembled {
            field: VectorField::new(ef.variables, comps, params)?,
            trig_constants,
        })
    }

    /// Shorthand for trig-free systems.
    pub fn assemble_polynomial(&self) -> Result<VectorField> {
        Ok(self.assemble(None)?.field)
    }
}

/// Convenience for callers holding rows as polynomials.
pub fn polynomial_rows(vf: &VectorField) -> &[Polynomial] {
    &vf.components
}
