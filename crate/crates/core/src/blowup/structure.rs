use serde::Serialize;

use crate::error::{Error, Result};
use crate::netsys::{LinearDecomposition, VectorField};
use crate::nilpotent::RationalMatrix;
use crate::poly::value::{q_to_json, Q};
use crate::poly::{Monomial, Polynomial, Symbol};

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientCheck {
    pub row: Symbol,
    /// `"1"` for the constant term, otherwise the monomial.
    pub term: String,
    #[serde(serialize_with = "ser_q")]
    pub expected: Q,
    pub found: String,
    pub ok: bool,
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    q_to_json(q).serialize(s)
}

/// Comparison of a node chart at `r = 0` against the static-network
/// template built from `D` and `A`.
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub blown_node: Symbol,
    pub sign: i8,
    pub checks: Vec<CoefficientCheck>,
    pub matches: bool,
    /// Reading 1: internal rates `a_k − a_i − A_ii`, interactions `A`,
    /// constant inputs `σ A_ki`.
    #[serde(serialize_with = "ser_qs")]
    pub shifted_internal: Vec<Q>,
    /// Reading 2: internal rates `a_k` with self-interaction
    /// `Ã_kk = A_kk − a_i − A_ii`.
    pub modified_interaction: RationalMatrix,
    /// Rows of the reduced system, in chart order.
    pub rows: Vec<Symbol>,
}

fn ser_qs<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(q_to_json).collect::<Vec<_>>().serialize(s)
}

impl StructureReport {
    pub fn ensure(&self) -> Result<()> {
        if self.matches {
            return Ok(());
        }
        let bad: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| format!("{}: {} expected {} found {}", c.row, c.term, c.expected, c.found))
            .collect();
        Err(Error::Template(bad.join("; ")))
    }
}

/// Extracts constant and linear coefficients from each `x̄_k` row of a node
/// chart restricted to `r = 0` and compares them with
/// `x̄_k' = σA_ki + (a_k + A_kk − a_i − A_ii) x̄_k + Σ_{j≠i,k} A_kj x̄_j + …`.
pub fn structure_report(
    cf_r0: &VectorField,
    decomp: &LinearDecomposition,
    blown_node: usize,
    sign: i8,
) -> Result<StructureReport> {
    let n = decomp.nodes.len();
    if blown_node >= n {
        return Err(Error::Input(format!("node index {blown_node} out of range")));
    }
    let i = blown_node;
    let sigma = Q::from_integer(sign.into());
    let d = &decomp.d;
    let a = &decomp.a;
    let bars: Vec<Symbol> = decomp.nodes.iter().map(Symbol::barred).collect();
    let chart_states: Vec<Symbol> = (0..n).filter(|&k| k != i).map(|k| bars[k].clone()).collect();
    let shift = d.get(i, i) + a.get(i, i);

    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for k in (0..n).filter(|&k| k != i) {
        let row_sym = &bars[k];
        let row = cf_r0
            .component(row_sym)
            .ok_or_else(|| Error::Input(format!("{row_sym} is not a row of the field")))?;
        rows.push(row_sym.clone());
        let coeffs = row.coefficients_in(&chart_states);
        let found = |m: &Monomial| coeffs.get(m).cloned().unwrap_or_else(Polynomial::zero);
        let mut check = |term: String, expected: Q, got: Polynomial| {
            let ok = got == Polynomial::constant(expected.clone());
            checks.push(CoefficientCheck {
                row: row_sym.clone(),
                term,
                expected,
                found: got.to_string(),
                ok,
            });
        };
        check("1".into(), &sigma * a.get(k, i), found(&Monomial::one()));
        for j in (0..n).filter(|&j| j != i) {
            let expected = if j == k {
                d.get(k, k) + a.get(k, k) - &shift
            } else {
                a.get(k, j).clone()
            };
            check(bars[j].to_string(), expected, found(&Monomial::var(bars[j].clone())));
        }
    }
    let matches = checks.iter().all(|c| c.ok);
    let shifted_internal = (0..n)
        .filter(|&k| k != i)
        .map(|k| d.get(k, k) - &shift)
        .collect();
    let mut modified = a.clone();
    for k in 0..n {
        modified.set(k, k, a.get(k, k) - &shift);
    }
    Ok(StructureReport {
        blown_node: decomp.nodes[i].clone(),
        sign,
        checks,
        matches,
        shifted_internal,
        modified_interaction: modified,
        rows,
    })
}
