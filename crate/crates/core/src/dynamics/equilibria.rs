use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netsys::{ExprField, VectorField};
use crate::nilpotent::{jacobian, jacobian_expr, spectrum_classify, RationalMatrix, SpectrumClass, SpectrumReport};
use crate::poly::value::{q_to_json, rationalize, Point, Value, Q};
use crate::poly::Symbol;

use super::numeric::{point_f64, NumericField};

#[derive(Clone, Debug, Serialize)]
pub struct Equilibrium {
    pub x: Vec<f64>,
    pub residual: f64,
    /// Rational coordinates when a nearby rational point is an exact zero.
    #[serde(serialize_with = "ser_exact")]
    pub exact: Option<Vec<Q>>,
}

fn ser_exact<S: serde::Serializer>(v: &Option<Vec<Q>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref()
        .map(|xs| xs.iter().map(q_to_json).collect::<Vec<_>>())
        .serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumSearch {
    pub variables: Vec<Symbol>,
    pub equilibria: Vec<Equilibrium>,
    pub seeds: usize,
    pub singular_seeds: usize,
}

const MAX_SEED_DIM: usize = 6;

/// Root and residual, `None` on divergence, `Err` on a singular step.
type NewtonOutcome = std::result::Result<Option<(Vec<f64>, f64)>, ()>;

fn newton(f: &NumericField, x0: &[f64], tol: f64) -> NewtonOutcome {
    let mut x = DVector::from_column_slice(x0);
    for _ in 0..60 {
        let fx = DVector::from_vec(f.eval(x.as_slice()));
        let res = fx.norm();
        if !res.is_finite() {
            return Ok(None);
        }
        if res <= tol {
            return Ok(Some((x.as_slice().to_vec(), res)));
        }
        let j = f.jacobian(x.as_slice());
        let lu = j.lu();
        let Some(dx) = lu.solve(&fx) else {
            return Err(());
        };
        x -= dx;
        if x.norm() > 1e8 {
            return Ok(None);
        }
    }
    let res = DVector::from_vec(f.eval(x.as_slice())).norm();
    Ok((res <= tol).then(|| (x.as_slice().to_vec(), res)))
}

/// Newton iteration from a uniform grid of seeds in `bounds`, keeping roots
/// inside the box with `‖F‖ ≤ tol`, deduplicated at distance `1e-8`.
pub fn find_equilibria(
    f: &NumericField,
    bounds: &[(f64, f64)],
    grid: usize,
    tol: f64,
) -> Result<EquilibriumSearch> {
    let n = f.dim();
    if bounds.len() != n {
        return Err(Error::Dimension(format!("{} bounds for {n} variables", bounds.len())));
    }
    if n > MAX_SEED_DIM {
        return Err(Error::Input(format!(
            "grid seeding supports at most {MAX_SEED_DIM} variables"
        )));
    }
    let grid = grid.max(1);
    let total = grid.pow(n as u32);
    let seeds: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            bounds
                .iter()
                .map(|(lo, hi)| {
                    let k = idx % grid;
                    idx /= grid;
                    if grid == 1 {
                        0.5 * (lo + hi)
                    } else {
                        lo + (hi - lo) * k as f64 / (grid - 1) as f64
                    }
                })
                .collect()
        })
        .collect();
    let outcomes: Vec<NewtonOutcome> =
        seeds.par_iter().map(|s| newton(f, s, tol)).collect();
    let singular = outcomes.iter().filter(|o| o.is_err()).count();
    let mut found: Vec<Equilibrium> = Vec::new();
    for (x, res) in outcomes.into_iter().filter_map(|o| o.ok().flatten()) {
        let inside = x.iter().zip(bounds).all(|(v, (lo, hi))| {
            let m = 1e-9 * (hi - lo).abs().max(1.0);
            *v >= lo - m && *v <= hi + m
        });
        if !inside {
            continue;
        }
        let dup = found.iter().any(|e| {
            e.x.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < 1e-8
        });
        if !dup {
            found.push(Equilibrium {
                x,
                residual: res,
                exact: None,
            });
        }
    }
    found.sort_by(|a, b| {
        a.x.iter()
            .zip(&b.x)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(EquilibriumSearch {
        variables: f.variables.clone(),
        equilibria: found,
        seeds: total,
        singular_seeds: singular,
    })
}

/// Attaches exact rational coordinates to equilibria of a polynomial field
/// with rational parameters when a small-denominator rational is an exact zero.
pub fn verify_exact(vf: &VectorField, params: &BTreeMap<Symbol, Q>, search: &mut EquilibriumSearch) -> Result<()> {
    for e in &mut search.equilibria {
        let Some(xs) = e
            .x
            .iter()
            .map(|v| rationalize(*v, 10_000))
            .collect::<Option<Vec<Q>>>()
        else {
            continue;
        };
        let mut pt = params.clone();
        for (v, q) in vf.variables.iter().zip(&xs) {
            pt.insert(v.clone(), q.clone());
        }
        if vf.evaluate_q(&pt)?.iter().all(Zero::is_zero) {
            e.exact = Some(xs);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumReport {
    pub variables: Vec<Symbol>,
    pub point: Vec<f64>,
    pub residual: f64,
    pub exact: bool,
    pub jacobian: Vec<Vec<f64>>,
    pub spectrum: SpectrumReport,
}

fn float_spectrum(m: &DMatrix<f64>, tol: f64) -> SpectrumReport {
    let mut eig: Vec<nalgebra::Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let stable = eig.iter().filter(|z| z.re < -tol).count();
    let unstable = eig.iter().filter(|z| z.re > tol).count();
    let center = eig.len() - stable - unstable;
    let class = if eig.iter().all(|z| z.norm() <= tol) {
        SpectrumClass::Nilpotent
    } else if center == 0 {
        SpectrumClass::Hyperbolic
    } else if eig.iter().filter(|z| z.re.abs() <= tol).all(|z| z.norm() <= tol) {
        SpectrumClass::SemiHyperbolic
    } else {
        SpectrumClass::NonHyperbolicNonNilpotent
    };
    SpectrumReport {
        char_poly: Vec::new(),
        eigenvalues: eig.iter().map(|z| [z.re, z.im]).collect(),
        class,
        zero_tolerance: tol,
        stable,
        unstable,
        center,
    }
}

fn rows_f64(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn rat_rows(m: &RationalMatrix) -> Vec<Vec<f64>> {
    m.to_f64().row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Jacobian spectrum at `x`; exact when every input is exact.
pub fn classify_equilibrium(ef: &ExprField, x: &Point, params: &Point, zero_tol: f64) -> Result<EquilibriumReport> {
    let mut full = params.clone();
    full.extend(x);
    let nf = NumericField::from_expr(ef, &point_f64(params))?;
    let xv = nf.state(x)?;
    let exact_vals: Option<Vec<Value>> = ef.components.iter().map(|c| c.evaluate(&full).ok()).collect();
    let exact_zero = exact_vals.as_ref().map(|vs| {
        vs.iter().all(|v| v.is_exact()) && vs.iter().all(|v| v.as_exact().is_some_and(Zero::is_zero))
    });
    let residual = nf.eval(&xv).iter().map(|v| v * v).sum::<f64>().sqrt();
    let all_exact = exact_vals
        .as_ref()
        .is_some_and(|vs| vs.iter().all(|v| !matches!(v, Value::Float(_))));
    if all_exact {
        if exact_zero != Some(true) {
            return Err(Error::NotEquilibrium(format!("residual {residual:e}")));
        }
    } else if residual > 1e-10 {
        return Err(Error::NotEquilibrium(format!("residual {residual:e}")));
    }
    let exact_jac = if all_exact {
        match ef.to_polynomial_field() {
            Ok(vf) => jacobian(&vf, &full).ok(),
            Err(_) => jacobian_expr(ef, &full).ok(),
        }
    } else {
        None
    };
    let (jac_rows, spectrum, exact) = match exact_jac {
        Some(j) => (rat_rows(&j), spectrum_classify(&j, zero_tol), true),
        None => {
            let j = nf.jacobian(&xv);
            (rows_f64(&j), float_spectrum(&j, zero_tol), false)
        }
    };
    Ok(EquilibriumReport {
        variables: ef.variables.clone(),
        point: xv,
        residual,
        exact,
        jacobian: jac_rows,
        spectrum,
    })
}
