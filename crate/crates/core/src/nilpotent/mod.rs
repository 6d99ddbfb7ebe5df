//! Exact nilpotency detection and spectrum classification.

mod matrix;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netsys::{ExprField, VectorField};
use crate::poly::value::{q_to_json, Point, Value, Q};

type Complex64 = nalgebra::Complex<f64>;

pub use matrix::RationalMatrix;

/// Monic characteristic polynomial `det(λI − M)`, highest degree first,
/// by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &RationalMatrix) -> Vec<Q> {
    let n = m.dim();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[0] = Q::one();
    let mut mk = RationalMatrix::zeros(n);
    for k in 1..=n {
        // M_k = M·M_{k-1} + c_{k-1}·I ; c_k = −tr(M·M_k)/k
        let mut next = m.mul(&mk);
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[k - 1];
            next.set(i, i, v);
        }
        mk = next;
        let t = m.mul(&mk).trace();
        coeffs[k] = -t / Q::from_integer((k as i64).into());
    }
    coeffs
}

pub fn is_nilpotent(m: &RationalMatrix) -> bool {
    char_poly(m).iter().skip(1).all(Zero::is_zero)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumClass {
    Hyperbolic,
    SemiHyperbolic,
    Nilpotent,
    NonHyperbolicNonNilpotent,
}

impl SpectrumClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumClass::Hyperbolic => "hyperbolic",
            SpectrumClass::SemiHyperbolic => "semi-hyperbolic",
            SpectrumClass::Nilpotent => "nilpotent",
            SpectrumClass::NonHyperbolicNonNilpotent => "non-hyperbolic-non-nilpotent",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    #[serde(serialize_with = "ser_coeffs")]
    pub char_poly: Vec<Q>,
    /// `[re, im]` pairs sorted by real part, then imaginary part.
    pub eigenvalues: Vec<[f64; 2]>,
    pub class: SpectrumClass,
    pub zero_tolerance: f64,
    pub stable: usize,
    pub unstable: usize,
    pub center: usize,
}

fn ser_coeffs<S: serde::Serializer>(c: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<serde_json::Value> = c.iter().map(q_to_json).collect();
    v.serialize(s)
}

/// Roots of a monic polynomial (highest coefficient first) through the
/// eigenvalues of its companion matrix.
pub fn poly_roots(coeffs: &[Q]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let c: Vec<f64> = coeffs.iter().map(crate::poly::value::q_to_f64).collect();
    let mut comp = nalgebra::DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        comp[(0, j)] = -c[j + 1] / c[0];
    }
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

pub fn spectrum_classify(m: &RationalMatrix, zero_tolerance: f64) -> SpectrumReport {
    let cp = char_poly(m);
    let nilpotent = cp.iter().skip(1).all(Zero::is_zero);
    let mut eig: Vec<Complex64> = if nilpotent {
        vec![Complex64::new(0.0, 0.0); m.dim()]
    } else {
        poly_roots(&cp)
    };
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let stable = eig.iter().filter(|z| z.re < -zero_tolerance).count();
    let unstable = eig.iter().filter(|z| z.re > zero_tolerance).count();
    let center = eig.len() - stable - unstable;
    let class = if nilpotent {
        SpectrumClass::Nilpotent
    } else if center == 0 {
        SpectrumClass::Hyperbolic
    } else if eig
        .iter()
        .filter(|z| z.re.abs() <= zero_tolerance)
        .all(|z| z.norm() <= zero_tolerance)
    {
        SpectrumClass::SemiHyperbolic
    } else {
        SpectrumClass::NonHyperbolicNonNilpotent
    };
    SpectrumReport {
        char_poly: cp,
        eigenvalues: eig.iter().map(|z| [z.re, z.im]).collect(),
        class,
        zero_tolerance,
        stable,
        unstable,
        center,
    }
}

/// Exact Jacobian of a polynomial field at a rational point that binds every
/// variable and parameter.
pub fn jacobian(vf: &VectorField, point: &Point) -> Result<RationalMatrix> {
    let exact = point
        .exact()
        .ok_or_else(|| Error::Input("jacobian point must be rational".into()))?;
    let n = vf.dim();
    let mut rows = Vec::with_capacity(n);
    for comp in &vf.components {
        let mut row = Vec::with_capacity(n);
        for v in &vf.variables {
            row.push(comp.differentiate(v).eval_q(&exact)?);
        }
        rows.push(row);
    }
    RationalMatrix::from_rows(rows)
}

/// Jacobian of a trig-bearing field, exact when every entry evaluates to a
/// rational (e.g. phases at multiples of π/6).
pub fn jacobian_expr(ef: &ExprField, point: &Point) -> Result<RationalMatrix> {
    let mut rows = Vec::new();
    for comp in &ef.components {
        let mut row = Vec::new();
        for v in &ef.variables {
            match comp.differentiate(v).evaluate(point)? {
                Value::Exact(q) => row.push(q),
                other => {
                    return Err(Error::Eval(format!(
                        "entry d/d{v} is not rational at this point: {other}"
                    )))
                }
            }
        }
        rows.push(row);
    }
    RationalMatrix::from_rows(rows)
}

/// Float Jacobian of a trig-bearing field.
pub fn jacobian_expr_f64(ef: &ExprField, point: &Point) -> Result<nalgebra::DMatrix<f64>> {
    let n = ef.dim();
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for (i, comp) in ef.components.iter().enumerate() {
        for (j, v) in ef.variables.iter().enumerate() {
            m[(i, j)] = comp
                .differentiate(v)
                .eval_f64(&|s| point.get(s).map(Value::to_f64))?;
        }
    }
    Ok(m)
}
