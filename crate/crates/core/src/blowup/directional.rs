use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::netsys::VectorField;
use crate::poly::value::{pow_q, q_to_f64, Q};
use crate::poly::{Polynomial, Symbol};

use super::chart::{BlowupChart, ChartKind};

/// Record of a non-`r` factor divided out of a field. Time runs backwards
/// wherever the factor is negative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrientationNote {
    #[serde(serialize_with = "ser_display")]
    pub factor: Polynomial,
    pub note: String,
}

fn ser_display<S: Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Blown-up field in chart coordinates `(r, x̄…, s̄…)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartField {
    pub chart: BlowupChart,
    pub variables: Vec<Symbol>,
    pub components: Vec<Polynomial>,
    pub parameters: Vec<Symbol>,
    pub division_exponent: i32,
    pub orientation_note: Option<OrientationNote>,
    pub warnings: Vec<String>,
    /// Original variable for each chart variable after `r`.
    pub origin: Vec<Symbol>,
}

impl ChartField {
    pub fn radial(&self) -> &Symbol {
        &self.chart.radial
    }

    pub fn component(&self, s: &Symbol) -> Option<&Polynomial> {
        self.variables.iter().position(|v| v == s).map(|i| &self.components[i])
    }

    pub fn to_vector_field(&self) -> VectorField {
        VectorField {
            variables: self.variables.clone(),
            components: self.components.clone(),
            parameters: self.parameters.clone(),
        }
    }

    /// Chart symbol standing for an original variable.
    pub fn chart_symbol(&self, original: &Symbol) -> Option<&Symbol> {
        self.origin
            .iter()
            .position(|o| o == original)
            .map(|i| &self.variables[i + 1])
    }
}

impl Serialize for ChartField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let comps: serde_json::Map<String, serde_json::Value> = self
            .variables
            .iter()
            .zip(&self.components)
            .map(|(v, c)| (v.to_string(), c.to_string().into()))
            .collect();
        let mut st = s.serialize_struct("ChartField", 7)?;
        st.serialize_field("chart", &self.chart.to_string())?;
        st.serialize_field("weights", &self.chart)?;
        st.serialize_field("variables", &self.variables)?;
        st.serialize_field("parameters", &self.parameters)?;
        st.serialize_field("components", &comps)?;
        st.serialize_field("division_exponent", &self.division_exponent)?;
        st.serialize_field("orientation_note", &self.orientation_note)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

/// Lifts every parameter carrying a positive chart weight to a variable
/// with a zero row.
pub fn lift_weighted(vf: &VectorField, chart: &BlowupChart) -> Result<VectorField> {
    let lift: Vec<Symbol> = chart
        .weighted()
        .into_iter()
        .filter(|s| vf.parameters.contains(s))
        .collect();
    vf.lift_parameters(&lift)
}

fn r_power(r: &Symbol, e: i32) -> Polynomial {
    Polynomial::term(
        Q::from_integer(1.into()),
        crate::poly::Monomial::from_powers(vec![(r.clone(), e)]),
    )
}

/// Directional chart of `vf`, before desingularization (components may be
/// Laurent in `r`).
pub fn directional_blowup(vf: &VectorField, chart: &BlowupChart) -> Result<ChartField> {
    chart.validate()?;
    if matches!(chart.kind, ChartKind::Polar { .. }) {
        return Err(Error::Chart("polar charts go through polar_blowup_2d".into()));
    }
    let r = &chart.radial;
    let d = chart.distinguished();
    let di = vf.index_of(d).ok_or_else(|| {
        Error::Chart(format!("{d} is not a variable of the field (lift parameters first)"))
    })?;
    if vf.variables.contains(r) || vf.parameters.contains(r) {
        return Err(Error::Chart(format!("radial symbol {r} already used by the field")));
    }
    for s in chart.weighted() {
        if vf.parameters.contains(&s) {
            return Err(Error::Chart(format!("parameter {s} has a positive weight but is not lifted")));
        }
    }
    let mut weights = Vec::with_capacity(vf.dim());
    for v in &vf.variables {
        let w = chart
            .weight(v)
            .ok_or_else(|| Error::Chart(format!("no weight declared for {v}")))?;
        weights.push(w as i32);
    }

    let sigma = Q::from_integer(chart.sign.into());
    let alpha_d = weights[di];
    let mut bindings = BTreeMap::new();
    for (v, &w) in vf.variables.iter().zip(&weights) {
        let rep = if v == d {
            r_power(r, w).scale(&sigma)
        } else if w > 0 {
            &r_power(r, w) * &Polynomial::var(&v.barred())
        } else {
            continue;
        };
        bindings.insert(v.clone(), rep);
    }
    let g: Vec<Polynomial> = vf
        .components
        .iter()
        .map(|c| c.substitute(&bindings))
        .collect::<Result<_>>()?;

    // r' = σ r^{1-α_d} G_d / α_d
    let ad = Q::from_integer(alpha_d.into());
    let r_dot = (&r_power(r, 1 - alpha_d) * &g[di]).scale(&(&sigma / &ad));
    let mut variables = vec![r.clone()];
    let mut components = vec![r_dot];
    let mut origin = Vec::new();
    for (i, v) in vf.variables.iter().enumerate() {
        if i == di {
            continue;
        }
        let w = weights[i];
        origin.push(v.clone());
        if w == 0 {
            variables.push(v.clone());
            components.push(g[i].clone());
            continue;
        }
        let bar = v.barred();
        // x̄' = r^{-α}(G − (α/α_d) σ r^{α−α_d} x̄ G_d)
        let k = Q::from_integer(w.into()) / &ad * &sigma;
        let corr = (&(&r_power(r, w - alpha_d) * &Polynomial::var(&bar)) * &g[di]).scale(&k);
        components.push(&r_power(r, -w) * &(&g[i] - &corr));
        variables.push(bar);
    }
    let mut parameters = vf.parameters.clone();
    parameters.retain(|p| !bindings.contains_key(p));
    Ok(ChartField {
        chart: chart.clone(),
        variables,
        components,
        parameters,
        division_exponent: 0,
        orientation_note: None,
        warnings: chart.warnings(),
        origin,
    })
}

/// Divides by the largest power of `r` common to all components.
pub fn desingularize(cf: &ChartField) -> Result<ChartField> {
    let r = cf.radial();
    let k = cf
        .components
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.r_valuation(r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or(Error::AllZero)?;
    if k < 0 {
        let bad = cf
            .variables
            .iter()
            .zip(&cf.components)
            .find(|(_, c)| !c.is_zero() && c.r_valuation(r).unwrap() < 0)
            .map(|(v, c)| format!("{v}' = {c}"))
            .unwrap_or_default();
        return Err(Error::WeightsInconsistent(format!(
            "component remains Laurent in {r}: {bad}"
        )));
    }
    divide(cf, k)
}

/// Divides by `r^k` for a user-chosen `k`; every component must stay regular.
pub fn divide(cf: &ChartField, k: i32) -> Result<ChartField> {
    let r = cf.radial().clone();
    let comps = cf
        .components
        .iter()
        .map(|c| c.divide_r_power(&r, k, true))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChartField {
        components: comps,
        division_exponent: cf.division_exponent + k,
        ..cf.clone()
    })
}

/// Blow-up followed by desingularization, lifting weighted parameters first.
pub fn blowup(vf: &VectorField, chart: &BlowupChart) -> Result<ChartField> {
    let lifted = lift_weighted(vf, chart)?;
    desingularize(&directional_blowup(&lifted, chart)?)
}

/// Restricts a chart field to an invariant subset given by pinned values.
pub fn restrict(cf: &ChartField, pins: &BTreeMap<Symbol, Q>) -> Result<VectorField> {
    cf.to_vector_field().restrict(pins)
}

/// Divides every component by a common non-`r` factor.
pub fn common_factor_divide(vf: &VectorField, factor: &Polynomial) -> Result<(VectorField, OrientationNote)> {
    if factor.is_zero() {
        return Err(Error::NotDivisible("division by zero".into()));
    }
    let comps = vf
        .components
        .iter()
        .map(|c| {
            c.div_exact(factor)
                .ok_or_else(|| Error::NotDivisible(format!("({c}) by ({factor})")))
        })
        .collect::<Result<Vec<_>>>()?;
    let note = match factor.as_constant() {
        Some(c) if c.is_positive() => "positive constant factor; orientation preserved".to_string(),
        Some(_) => "negative constant factor; time reversed everywhere".to_string(),
        None => format!("time reversed where {factor} < 0; factor vanishes on {factor} = 0"),
    };
    Ok((
        VectorField::new(vf.variables.clone(), comps, vf.parameters.clone())?,
        OrientationNote {
            factor: factor.clone(),
            note,
        },
    ))
}

pub fn common_factor_divide_chart(cf: &ChartField, factor: &Polynomial) -> Result<ChartField> {
    let (vf, note) = common_factor_divide(&cf.to_vector_field(), factor)?;
    Ok(ChartField {
        components: vf.components,
        orientation_note: Some(note),
        ..cf.clone()
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyReport {
    pub chart: String,
    pub samples: usize,
    pub division_exponent: i32,
    pub max_residual: f64,
    pub exact: bool,
}

fn random_rational(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.random_range(-12i64..=12).into(), rng.random_range(1i64..=7).into())
}

/// `r ∈ (0, 1/4]`.
fn random_radius(rng: &mut ChaCha8Rng) -> Q {
    let den: i64 = rng.random_range(1..=16);
    let num: i64 = rng.random_range(1..=den);
    Q::new(num.into(), (4 * den).into())
}

/// Checks `DΦ·(r^k X̃) = X∘Φ` exactly at seeded random rational points with
/// `r ∈ (0, 1/4]`. Parameters not in `fixed` are sampled too.
pub fn verify_conjugacy(
    vf: &VectorField,
    cf: &ChartField,
    fixed: &BTreeMap<Symbol, Q>,
    samples: usize,
    seed: u64,
) -> Result<ConjugacyReport> {
    let chart = &cf.chart;
    let vf = lift_weighted(vf, chart)?;
    let r = cf.radial();
    let d = chart.distinguished();
    let sigma = Q::from_integer(chart.sign.into());
    let alpha_d = chart.weight(d).unwrap_or(1) as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_res = Q::zero();

    let chart_vars: Vec<Symbol> = cf.variables.clone();
    let mut free: Vec<Symbol> = cf
        .parameters
        .iter()
        .chain(vf.parameters.iter())
        .filter(|p| !fixed.contains_key(*p))
        .cloned()
        .collect();
    free.sort();
    free.dedup();

    for _ in 0..samples {
        let mut pt: BTreeMap<Symbol, Q> = fixed.clone();
        for p in &free {
            pt.insert(p.clone(), random_rational(&mut rng));
        }
        let rv = random_radius(&mut rng);
        pt.insert(r.clone(), rv.clone());
        for v in chart_vars.iter().skip(1) {
            pt.insert(v.clone(), random_rational(&mut rng));
        }
        let rk = pow_q(&rv, cf.division_exponent);
        let chart_rhs: Vec<Q> = cf
            .components
            .iter()
            .map(|c| Ok(c.eval_q(&pt)? * &rk))
            .collect::<Result<_>>()?;
        let r_dot = &chart_rhs[0];

        // Φ(p) and DΦ·(r^k X̃)
        let mut orig = pt.clone();
        let mut pushed: BTreeMap<Symbol, Q> = BTreeMap::new();
        orig.insert(d.clone(), &sigma * pow_q(&rv, alpha_d));
        pushed.insert(
            d.clone(),
            &sigma * Q::from_integer(alpha_d.into()) * pow_q(&rv, alpha_d - 1) * r_dot,
        );
        for (i, o) in cf.origin.iter().enumerate() {
            let cv = &chart_vars[i + 1];
            let w = chart.weight(o).unwrap_or(0) as i32;
            let bar = pt[cv].clone();
            let bar_dot = &chart_rhs[i + 1];
            if w == 0 {
                orig.insert(o.clone(), bar);
                pushed.insert(o.clone(), bar_dot.clone());
            } else {
                let v = pow_q(&rv, w) * &bar;
                let vd = Q::from_integer(w.into()) * pow_q(&rv, w - 1) * &bar * r_dot
                    + pow_q(&rv, w) * bar_dot;
                orig.insert(o.clone(), v);
                pushed.insert(o.clone(), vd);
            }
        }
        for (v, c) in vf.variables.iter().zip(&vf.components) {
            let lhs = &pushed[v];
            let rhs = c.eval_q(&orig)?;
            let res = (lhs - &rhs).abs();
            if !res.is_zero() {
                return Err(Error::Conjugacy(format!(
                    "row {v} differs by {res} at {}",
                    pt.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
                )));
            }
            if res > max_res {
                max_res = res;
            }
        }
    }
    Ok(ConjugacyReport {
        chart: chart.to_string(),
        samples,
        division_exponent: cf.division_exponent,
        max_residual: q_to_f64(&max_res),
        exact: true,
    })
}
