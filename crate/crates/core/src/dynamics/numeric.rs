use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::netsys::{ExprField, VectorField};
use crate::poly::value::{q_to_f64, Point};
use crate::poly::{Affine, Expr, Symbol};

#[derive(Clone, Debug)]
enum Node {
    Const(f64),
    Var(usize),
    Add(Vec<Node>),
    Mul(Vec<Node>),
    Pow(Box<Node>, i32),
    Sin(Vec<(usize, f64)>, f64),
    Cos(Vec<(usize, f64)>, f64),
}

impl Node {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Node::Const(c) => *c,
            Node::Var(i) => x[*i],
            Node::Add(v) => v.iter().map(|n| n.eval(x)).sum(),
            Node::Mul(v) => v.iter().map(|n| n.eval(x)).product(),
            Node::Pow(b, e) => b.eval(x).powi(*e),
            Node::Sin(a, c) => (a.iter().map(|(i, k)| k * x[*i]).sum::<f64>() + c).sin(),
            Node::Cos(a, c) => (a.iter().map(|(i, k)| k * x[*i]).sum::<f64>() + c).cos(),
        }
    }
}

struct Compiler<'a> {
    vars: &'a [Symbol],
    params: &'a BTreeMap<Symbol, f64>,
}

impl Compiler<'_> {
    fn symbol(&self, s: &Symbol) -> Result<Node> {
        if let Some(i) = self.vars.iter().position(|v| v == s) {
            Ok(Node::Var(i))
        } else if let Some(v) = self.params.get(s) {
            Ok(Node::Const(*v))
        } else {
            Err(Error::UnboundSymbol(s.to_string()))
        }
    }

    fn affine(&self, a: &Affine) -> Result<(Vec<(usize, f64)>, f64)> {
        let mut lin = Vec::new();
        let mut c = q_to_f64(&a.constant) + q_to_f64(&a.pi) * std::f64::consts::PI;
        for (s, k) in &a.coeffs {
            match self.symbol(s)? {
                Node::Var(i) => lin.push((i, q_to_f64(k))),
                Node::Const(v) => c += q_to_f64(k) * v,
                _ => unreachable!(),
            }
        }
        Ok((lin, c))
    }

    fn compile(&self, e: &Expr) -> Result<Node> {
        Ok(match e {
            Expr::Num(q) => Node::Const(q_to_f64(q)),
            Expr::Pi => Node::Const(std::f64::consts::PI),
            Expr::Sym(s) => self.symbol(s)?,
            Expr::Add(v) => Node::Add(v.iter().map(|c| self.compile(c)).collect::<Result<_>>()?),
            Expr::Mul(v) => Node::Mul(v.iter().map(|c| self.compile(c)).collect::<Result<_>>()?),
            Expr::Pow(b, k) => Node::Pow(Box::new(self.compile(b)?), *k),
            Expr::Sin(a) => {
                let (l, c) = self.affine(a)?;
                Node::Sin(l, c)
            }
            Expr::Cos(a) => {
                let (l, c) = self.affine(a)?;
                Node::Cos(l, c)
            }
        })
    }
}

/// Right-hand side compiled for floating-point evaluation, parameters bound.
#[derive(Clone, Debug)]
pub struct NumericField {
    pub variables: Vec<Symbol>,
    rows: Vec<Node>,
    jac: Vec<Vec<Node>>,
}

impl NumericField {
    pub fn from_expr(ef: &ExprField, params: &BTreeMap<Symbol, f64>) -> Result<Self> {
        let c = Compiler {
            vars: &ef.variables,
            params,
        };
        let rows = ef.components.iter().map(|e| c.compile(e)).collect::<Result<_>>()?;
        let jac = ef
            .components
            .iter()
            .map(|e| {
                ef.variables
                    .iter()
                    .map(|v| c.compile(&e.differentiate(v)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(NumericField {
            variables: ef.variables.clone(),
            rows,
            jac,
        })
    }

    pub fn from_polynomial(vf: &VectorField, params: &BTreeMap<Symbol, f64>) -> Result<Self> {
        Self::from_expr(&vf.to_expr_field(), params)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, r) in out.iter_mut().zip(&self.rows) {
            *o = r.eval(x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out);
        out
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.jac[i][j].eval(x))
    }

    /// State vector from a point binding every variable.
    pub fn state(&self, p: &Point) -> Result<Vec<f64>> {
        self.variables
            .iter()
            .map(|v| {
                p.get(v)
                    .map(|x| x.to_f64())
                    .ok_or_else(|| Error::UnboundSymbol(v.to_string()))
            })
            .collect()
    }
}

/// Float view of a point.
pub fn point_f64(p: &Point) -> BTreeMap<Symbol, f64> {
    p.iter().map(|(s, v)| (s.clone(), v.to_f64())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::{parse_expression, permissive_roles};

    #[test]
    fn evaluates_trig_rows_and_jacobian() {
        let roles = permissive_roles(&["x", "y", "k"]);
        let ef = ExprField {
            variables: vec!["x".into(), "y".into()],
            components: vec![
                parse_expression("k*sin(y - x)", &roles).unwrap(),
                parse_expression("x^2*y - 1", &roles).unwrap(),
            ],
            parameters: vec!["k".into()],
        };
        let params: BTreeMap<Symbol, f64> = [("k".into(), 2.0)].into();
        let nf = NumericField::from_expr(&ef, &params).unwrap();
        let v = nf.eval(&[0.5, 1.0]);
        assert!((v[0] - 2.0 * 0.5f64.sin()).abs() < 1e-15);
        assert!((v[1] - (0.25 - 1.0)).abs() < 1e-15);
        let j = nf.jacobian(&[0.5, 1.0]);
        assert!((j[(0, 0)] + 2.0 * 0.5f64.cos()).abs() < 1e-15);
        assert!((j[(1, 0)] - 1.0).abs() < 1e-15);
        assert!(NumericField::from_expr(&ef, &BTreeMap::new()).is_err());
    }
}
