use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nilpotent::RationalMatrix;
use crate::poly::value::{Point, Value, Q};
use crate::poly::{Expr, Symbol};

use super::NetworkSystem;

/// `F(x* + y) = (D + A) y + N(y)` split into the internal diagonal `D`,
/// the interaction block `A` and the nonlinear residuals.
#[derive(Clone, Debug, Serialize)]
pub struct LinearDecomposition {
    pub nodes: Vec<Symbol>,
    pub d: RationalMatrix,
    pub a: RationalMatrix,
    #[serde(serialize_with = "ser_exprs")]
    pub residual_internal: Vec<Expr>,
    #[serde(serialize_with = "ser_exprs")]
    pub residual_interaction: Vec<Expr>,
}

fn ser_exprs<S: serde::Serializer>(v: &[Expr], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().serialize(s)
}

impl LinearDecomposition {
    pub fn jacobian(&self) -> RationalMatrix {
        self.d.add(&self.a)
    }

    /// Internal rates `a_i` (the diagonal of `D`).
    pub fn rates(&self) -> Vec<Q> {
        (0..self.d.dim()).map(|i| self.d.get(i, i).clone()).collect()
    }
}

fn value_expr(v: &Value) -> Result<Expr> {
    match v {
        Value::Exact(q) => Ok(Expr::Num(q.clone())),
        Value::WithPi { rational, pi } => {
            Ok(Expr::Num(rational.clone()) + Expr::Num(pi.clone()) * Expr::Pi)
        }
        Value::Float(_) => Err(Error::Input("linearization requires exact values".into())),
    }
}

fn exact_entry(v: Value, what: &str) -> Result<Q> {
    match v {
        Value::Exact(q) => Ok(q),
        other => Err(Error::Eval(format!("{what} is not rational: {other}"))),
    }
}

/// Linearizes the node rows at `x_star`, with every parameter (including
/// adapted weights) bound in `params`.
pub fn linearize(ns: &NetworkSystem, x_star: &Point, params: &Point) -> Result<LinearDecomposition> {
    ns.validate()?;
    let n = ns.nodes.len();
    let mut point = params.clone();
    point.extend(x_star);
    for s in &ns.nodes {
        if !x_star.contains(s) {
            return Err(Error::UnboundSymbol(s.to_string()));
        }
    }
    let param_bind: BTreeMap<Symbol, Expr> = params
        .iter()
        .map(|(s, v)| Ok((s.clone(), value_expr(v)?)))
        .collect::<Result<_>>()?;

    let mut d = RationalMatrix::zeros(n);
    let mut a = RationalMatrix::zeros(n);
    let mut res_f = Vec::with_capacity(n);
    let mut res_h = Vec::with_capacity(n);
    for i in 0..n {
        let row = ns.node_row(i).evaluate(&point)?;
        let zero = match &row {
            Value::Float(x) => x.abs() <= 1e-10,
            other => other.as_exact().is_some_and(Zero::is_zero),
        };
        if !zero {
            return Err(Error::NotEquilibrium(format!(
                "{}' = {row} at the given point",
                ns.nodes[i]
            )));
        }
        let xi = &ns.nodes[i];
        let f = &ns.internal[i];
        let di = exact_entry(f.differentiate(xi).evaluate(&point)?, "internal derivative")?;
        d.set(i, i, di.clone());
        let h = ns.interaction_row(i);
        for (j, xj) in ns.nodes.iter().enumerate() {
            let aij = exact_entry(h.differentiate(xj).evaluate(&point)?, "interaction derivative")?;
            a.set(i, j, aij);
        }

        // residual = g − g(x*) − Σ_j ∂g/∂x_j(x*)·(x_j − x*_j)
        let residual = |g: &Expr, lin: &dyn Fn(usize) -> Q| -> Result<Expr> {
            let mut items = vec![g.substitute(&param_bind)?, -value_expr(&g.evaluate(&point)?)?];
            for (j, xj) in ns.nodes.iter().enumerate() {
                let c = lin(j);
                if c.is_zero() {
                    continue;
                }
                let xs = value_expr(x_star.get(xj).unwrap())?;
                items.push(Expr::Num(-c) * (Expr::Sym(xj.clone()) - xs));
            }
            Ok(Expr::sum(items))
        };
        let di_c = di.clone();
        res_f.push(residual(f, &|j| if j == i { di_c.clone() } else { Q::zero() })?);
        let arow: Vec<Q> = (0..n).map(|j| a.get(i, j).clone()).collect();
        res_h.push(residual(&h, &|j| arow[j].clone())?);
    }
    Ok(LinearDecomposition {
        nodes: ns.nodes.clone(),
        d,
        a,
        residual_internal: res_f,
        residual_interaction: res_h,
    })
}

/// Weights making the diffusive two-node Jacobian nilpotent:
/// `w12 = a1²/(a1 − a2)`, `w21 = a2²/(a2 − a1)`.
pub fn diffusive_weights_2node(a1: &Q, a2: &Q) -> Result<(Q, Q)> {
    if a1 == a2 {
        return Err(Error::Singular("a1 = a2 admits no nilpotent weights".into()));
    }
    let d = a1 - a2;
    Ok((a1 * a1 / &d, -(a2 * a2) / d))
}
