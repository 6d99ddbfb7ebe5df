use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blowup::{
    blowup, circle_equilibria, polar_blowup_2d, restrict, structure_report, verify_conjugacy, BlowupChart,
    CircleClass, TrigField,
};
use crate::dynamics::{point_f64, stability_probe, NumericField, ProbeOptions, StabilityVerdict, Verdict};
use crate::error::{Error, Result};
use crate::netsys::{linearize, ExprField, VectorField};
use crate::nilpotent::{char_poly, is_nilpotent, jacobian, jacobian_expr};
use crate::poly::parse::{parse_polynomial, permissive_roles};
use crate::poly::value::{q, qf, Point, Value, Q};
use crate::poly::{Polynomial, Symbol};

use super::*;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<String>) -> Self {
        match r {
            Ok(d) => Check::new(name, true, d),
            Err(e) => Check::new(name, false, e.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub id: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub seconds: f64,
}

fn poly(text: &str, names: &[&str]) -> Result<Polynomial> {
    parse_polynomial(text, &permissive_roles(names))
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn rows(m: &crate::nilpotent::RationalMatrix) -> String {
    list(&m.rows().iter().map(|r| list(r)).collect::<Vec<_>>())
}

fn syms(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|n| Symbol::new(n)).collect()
}

fn qmap(p: &Point) -> Result<BTreeMap<Symbol, Q>> {
    p.exact()
        .ok_or_else(|| Error::Input("parameters must be rational".into()))
}

fn chart_of(spec: &ChartSpec, params: &[Symbol]) -> Result<BlowupChart> {
    BlowupChart::parse(spec.spec, spec.weights, params)
}

/// Symbol standing for `1/(a1 − a2)` in the symbolic diffusive chart.
pub const INV_GAP: &str = "inv_gap";

/// Node chart on `x1` of the diffusive pair with `w12 = a1²·g`,
/// `w21 = −a2²·g`, `g = 1/(a1 − a2)` kept as the parameter [`INV_GAP`].
pub fn diffusive_symbolic_chart(sign: i8) -> Result<crate::blowup::ChartField> {
    let vf = diffusive2()?.assemble_polynomial()?;
    let names = ["a1", "a2", INV_GAP];
    let mut bind = BTreeMap::new();
    bind.insert(Symbol::new("w12"), poly(&format!("a1^2*{INV_GAP}"), &names)?);
    bind.insert(Symbol::new("w21"), poly(&format!("-a2^2*{INV_GAP}"), &names)?);
    let sub = vf.substitute(&bind)?;
    let vf = VectorField::new(sub.variables, sub.components, syms(&names))?;
    blowup(&vf, &BlowupChart::node("x1", sign).state(&["x1", "x2"], 1))
}

/// `p` agrees with zero modulo `inv·denom = 1`.
pub fn vanishes_mod_inverse(p: &Polynomial, inv: &str, denom: &Polynomial) -> Result<bool> {
    Ok(p.clear_inverse(&Symbol::new(inv), denom)?.is_zero())
}

/// Diffusive pair with cubic tail on `a1 = α`, `a2 = −α`, `w_ij = w*_ij`,
/// blown up in polar coordinates with `α = r³A`, `w = rW`, `k = 3`.
pub fn hot_polar() -> Result<TrigField> {
    let vf = diffusive2_hot()?.assemble_polynomial()?;
    let names = ["alpha", "w"];
    let mut bind = BTreeMap::new();
    bind.insert(Symbol::new("a1"), poly("alpha", &names)?);
    bind.insert(Symbol::new("a2"), poly("-alpha", &names)?);
    bind.insert(Symbol::new("w12"), poly("1/2*alpha", &names)?);
    bind.insert(Symbol::new("w21"), poly("-1/2*alpha", &names)?);
    let sub = vf.substitute(&bind)?;
    let vf = VectorField::new(sub.variables, sub.components, syms(&names))?;
    let weights = [(Symbol::new("alpha"), 3), (Symbol::new("w"), 1)].into();
    polar_blowup_2d(&vf, &weights, 3)
}

/// Closed forms of `(f1, f2)` on `r = 0` for [`hot_polar`].
pub fn hot_polar_reference(theta: f64, a: f64, w: f64) -> (f64, f64) {
    let (s2, c2, s4, c4) = ((2.0 * theta).sin(), (2.0 * theta).cos(), (4.0 * theta).sin(), (4.0 * theta).cos());
    (
        (4.0 * a * c2 + w * (6.0 * s2 + 3.0 * s4 - c4 + 9.0)) / 8.0,
        (-2.0 * (2.0 * a + 3.0 * w) * s2 - 4.0 * a + w * s4 + 3.0 * w * c4 - 3.0 * w) / 8.0,
    )
}

pub const HOT_ROOTS: [f64; 8] = [0.431808, 1.26918, 2.35619, 2.54775, 3.5734, 4.41077, 5.49779, 5.68935];

/// Node chart on `x_node` of the cubic ring with `eps = r²ε̄`, restricted to
/// the layer `ε̄ = 0` and to `x̄_k = 0` for every node except `keep`.
pub fn cubic_layer_chart(node: usize, keep: usize, params: &Point) -> Result<VectorField> {
    let ns = cubic3()?;
    let mut pq = qmap(params)?;
    pq.remove(&Symbol::new("eps"));
    let vf = ns.assemble_polynomial()?.bind_parameters(&pq);
    let chart = BlowupChart::parse(
        &format!("node:x{node}:+"),
        "x1=1,x2=1,x3=1,eps=2",
        &[Symbol::new("eps")],
    )?;
    let cf = blowup(&vf, &chart)?;
    let mut pins: BTreeMap<Symbol, Q> = [(Symbol::new("eps_bar"), q(0))].into();
    for k in (1..=3).filter(|&k| k != node && k != keep) {
        pins.insert(Symbol::new(&format!("x{k}_bar")), q(0));
    }
    restrict(&cf, &pins)
}

fn kuramoto_chart_for(n: usize) -> BlowupChart {
    let mut names: Vec<String> = (1..=n).map(|i| format!("psi{i}")).collect();
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            names.push(format!("sigma{i}{j}"));
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    BlowupChart::parameter("beta", 1)
        .state(&refs, 1)
        .params(&["alpha", "beta", "eps"], 1)
}

/// Degree-2 Taylor polynomial of the co-rotating Kuramoto network at the
/// origin, with every symbol expanded.
pub fn kuramoto_polynomial(n: usize) -> Result<VectorField> {
    let ns = kuramoto_adaptive(n, &vec![q(0); n])?;
    let ef = ns.assemble_expr()?;
    let mut center = Point::new();
    for s in ef.variables.iter().chain(&ef.parameters) {
        center.set(s.clone(), q(0));
    }
    Ok(ns.assemble(Some((2, &center)))?.field)
}

/// Rescaling chart `β = ±r` (all weights one) of [`kuramoto_polynomial`],
/// restricted to `ε̄ = 1`.
pub fn kuramoto_chart(n: usize, sign: i8) -> Result<(crate::blowup::ChartField, VectorField)> {
    let vf = kuramoto_polynomial(n)?;
    let mut chart = kuramoto_chart_for(n);
    chart.sign = sign;
    let cf = blowup(&vf, &chart)?;
    let pins: BTreeMap<Symbol, Q> = [(Symbol::new("eps_bar"), q(1))].into();
    let rf = restrict(&cf, &pins)?;
    Ok((cf, rf))
}

/// Edge chart `w12 = r` of [`adaptive3`] with all weights one, restricted to
/// `ε̄ = 0`.
pub fn edge_layer_chart() -> Result<(crate::blowup::ChartField, VectorField)> {
    let ns = adaptive3()?;
    let vf = ns.assemble_polynomial()?;
    let chart = BlowupChart::parse("edge:w12:+", ADAPTIVE3_WEIGHTS, &vf.parameters)?;
    let cf = blowup(&vf, &chart)?;
    let pins: BTreeMap<Symbol, Q> = [(Symbol::new("eps_bar"), q(0))].into();
    let rf = restrict(&cf, &pins)?;
    Ok((cf, rf))
}

/// Relative-phase Kuramoto field (anchor `psi<n>`) with the given offsets.
pub fn kuramoto_relative(n: usize, phases: &[Q]) -> Result<ExprField> {
    let ns = kuramoto_adaptive(n, phases)?;
    let ef = ns.assemble_expr()?;
    relative_phase_field(&ef, &ns.nodes, &Symbol::new(&format!("psi{n}")))
}

/// Probe at the origin of an expression field.
pub fn probe_origin(ef: &ExprField, params: &Point, opts: &ProbeOptions) -> Result<StabilityVerdict> {
    let nf = NumericField::from_expr(ef, &point_f64(params))?;
    let x = vec![0.0; nf.dim()];
    stability_probe(&nf, &x, opts)
}

fn acceptance_probe(seed: u64) -> ProbeOptions {
    ProbeOptions {
        radius: 0.05,
        samples: 64,
        t_end: 500.0,
        seed,
        ..ProbeOptions::default()
    }
}

fn probe_check(name: &str, r: Result<StabilityVerdict>, want: &[Verdict]) -> Check {
    match r {
        Ok(v) => Check::new(
            name,
            want.contains(&v.verdict),
            format!(
                "{:?}: {}/{} converged, {} escaped, max final distance {:.3e}",
                v.verdict, v.converged, v.sampled, v.escaped, v.max_final_distance
            ),
        ),
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

fn conjugacy_checks(id: &str, vf: &VectorField, charts: &[ChartSpec], seed: u64) -> Vec<Check> {
    charts
        .iter()
        .filter(|c| !c.spec.starts_with("polar"))
        .map(|c| {
            let r = (|| {
                let chart = chart_of(c, &vf.parameters)?;
                let cf = blowup(vf, &chart)?;
                let rep = verify_conjugacy(vf, &cf, &BTreeMap::new(), 100, seed)?;
                Ok(format!("{} samples exact, k = {}", rep.samples, rep.division_exponent))
            })();
            Check::from_result(format!("{id}: conjugacy {}", c.spec), r)
        })
        .collect()
}

/// `r^{-k}·X(r cosθ, r sinθ)` against the rebuilt chart field at random
/// float points; returns the largest relative discrepancy.
pub fn polar_conjugacy(vf: &VectorField, tf: &TrigField, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let r: f64 = rng.random_range(1e-3..=0.25);
        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let mut bar = BTreeMap::new();
        let mut orig = BTreeMap::new();
        for p in &vf.parameters {
            let v: f64 = rng.random_range(-2.0..2.0);
            match tf.parameter_weights.get(p) {
                Some(&b) if b > 0 => {
                    bar.insert(p.barred(), v);
                    orig.insert(p.clone(), v * r.powi(b as i32));
                }
                _ => {
                    bar.insert(p.clone(), v);
                    orig.insert(p.clone(), v);
                }
            }
        }
        orig.insert(tf.x.clone(), r * th.cos());
        orig.insert(tf.y.clone(), r * th.sin());
        let scale = r.powi(-tf.division_exponent);
        let look = |s: &Symbol| orig.get(s).copied();
        let want = (
            vf.components[0].eval_f64(look)? * scale,
            vf.components[1].eval_f64(look)? * scale,
        );
        let got = tf.reconstruct(r, th, &bar)?;
        let mag = want.0.abs().max(want.1.abs()).max(1.0);
        worst = worst.max((got.0 - want.0).abs() / mag).max((got.1 - want.1).abs() / mag);
    }
    Ok(worst)
}

fn verify_diffusive2(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ns = diffusive2()?;
    let vf = ns.assemble_polynomial()?;
    let params = diffusive_defaults();
    let mut at = params.clone();
    at.extend(&two_node_origin());
    let j = jacobian(&vf, &at)?;
    let cp = char_poly(&j);
    out.push(Check::new(
        "diffusive2: nilpotent Jacobian at a=(2,1), w=(4,-1)",
        is_nilpotent(&j) && cp == vec![q(1), q(0), q(0)],
        format!("char_poly {}", list(&cp)),
    ));

    for sign in [1i8, -1] {
        let r = (|| {
            let cf = diffusive_symbolic_chart(sign)?;
            let s = if sign > 0 { "-" } else { "" };
            let t = if sign > 0 { "-" } else { "+" };
            let names = ["r", "x2_bar", "a1", "a2", INV_GAP];
            let rdot = poly(&format!("-a1*r*{INV_GAP}*(a2 {t} a1*x2_bar)"), &names)?;
            let xdot = poly(&format!("{s}{INV_GAP}*(a2 {t} a1*x2_bar)^2"), &names)?;
            let gap = poly("a1 - a2", &names)?;
            let ok_r = vanishes_mod_inverse(&(cf.components[0].clone() - rdot), INV_GAP, &gap)?;
            let ok_x = vanishes_mod_inverse(&(cf.components[1].clone() - xdot), INV_GAP, &gap)?;
            if ok_r && ok_x {
                Ok(format!("r' = {}, x2_bar' = {}", cf.components[0], cf.components[1]))
            } else {
                Err(Error::Template(format!("chart gave r' = {}, x2_bar' = {}", cf.components[0], cf.components[1])))
            }
        })();
        out.push(Check::from_result(
            format!("diffusive2: symbolic node chart x1 ({})", if sign > 0 { "+" } else { "-" }),
            r,
        ));
    }

    let r = (|| {
        let cf = diffusive_symbolic_chart(1)?;
        let names = ["r", "x2_bar", "a1", "a2", INV_GAP, "inv_a1"];
        // x2_bar → x2_bar + a2/a1
        let shift: BTreeMap<Symbol, Polynomial> =
            [(Symbol::new("x2_bar"), poly("x2_bar + a2*inv_a1", &names)?)].into();
        let gap = poly("a1 - a2", &names)?;
        let a1 = poly("a1", &names)?;
        let want = [
            poly(&format!("a1^2*{INV_GAP}*r*x2_bar"), &names)?,
            poly(&format!("-a1^2*{INV_GAP}*x2_bar^2"), &names)?,
        ];
        for (c, w) in cf.components.iter().zip(&want) {
            let d = c.substitute(&shift)? - w.clone();
            let d = d.clear_inverse(&Symbol::new("inv_a1"), &a1)?;
            if !vanishes_mod_inverse(&d, INV_GAP, &gap)? {
                return Err(Error::Template(format!("shifted row {c} differs")));
            }
        }
        Ok("degenerate form recovered".to_string())
    })();
    out.push(Check::from_result("diffusive2: shift by a2/a1", r));

    let r = (|| {
        let pq = qmap(&params)?;
        let bound = vf.bind_parameters(&pq);
        let decomp = linearize(&ns, &two_node_origin(), &params)?;
        let mut n = 0;
        for c in DIFFUSIVE_CHARTS {
            let chart = chart_of(c, &[])?;
            let cf = blowup(&bound, &chart)?;
            let r0 = restrict(&cf, &[(Symbol::new("r"), q(0))].into())?;
            let node = ns.nodes.iter().position(|s| s == chart.distinguished()).unwrap_or(0);
            structure_report(&r0, &decomp, node, chart.sign)?.ensure()?;
            n += 1;
        }
        Ok(format!("{n} charts match the template"))
    })();
    out.push(Check::from_result("diffusive2: structure template", r));

    let r = (|| {
        // a1 = -1, a2 = 1, δ = 1: discriminant 4, roots x2_bar* ∈ {-1, 3}
        let p = diffusive_params(q(-1), q(1), q(1), q(1))?;
        let bound = vf.bind_parameters(&qmap(&p)?);
        let cf = blowup(&bound, &BlowupChart::node("x1", 1).state(&["x1", "x2"], 1))?;
        let cv = cf.to_vector_field();
        let (a1, a2, d12, d21) = (q(-1), q(1), q(1), q(1));
        let disc = q(4) * &a1 * &d21 + q(4) * &a2 * &d12 + (&d12 + &d21) * (&d12 + &d21);
        let sq = q(2);
        if &sq * &sq != disc {
            return Err(Error::Template("discriminant is not 4".into()));
        }
        // the closed form's ± and the Jacobian's ± are matched up to ordering
        let forms: Vec<(Q, Q)> = [q(1), q(-1)]
            .iter()
            .map(|pm| ((pm * &sq - &d12 - &d21) / q(2), -pm * &sq))
            .collect();
        let mut seen = Vec::new();
        let mut used = Vec::new();
        for pm in [q(1), q(-1)] {
            let num = &pm * (&a2 - &a1) * &sq + q(2) * &a1 * &a2 + &a1 * &d12 - &a1 * &d21 - &a2 * &d12 + &a2 * &d21;
            let den = q(2) * (&a1 * &a1 + &a1 * &d12 - &a2 * &d12);
            let xs = num / den;
            let pt = Point::new().with("r", q(0)).with("x2_bar", xs.clone());
            let vals = cv.evaluate_q(&qmap(&pt)?)?;
            if vals.iter().any(|v| !v.is_zero()) {
                return Err(Error::NotEquilibrium(format!("x2_bar* = {xs}")));
            }
            let j = jacobian(&cv, &pt)?;
            let diag = (j.get(0, 0).clone(), j.get(1, 1).clone());
            let k = forms.iter().position(|f| *f == diag);
            match k {
                Some(k) if j.get(0, 1).is_zero() && j.get(1, 0).is_zero() && !used.contains(&k) => used.push(k),
                _ => return Err(Error::Template(format!("Jacobian {} at x2_bar* = {xs}", rows(&j)))),
            }
            let branch = if k == Some(0) { "+" } else { "-" };
            seen.push(format!("{xs} (Jacobian branch {branch})"));
        }
        Ok(format!("x2_bar* = {}", seen.join(", ")))
    })();
    out.push(Check::from_result("diffusive2: perturbed equilibria closed form", r));

    let r = (|| {
        let p = diffusive_params(q(-2), q(1), qf(1, 5), qf(1, 5))?;
        probe_origin(&vf.to_expr_field(), &p, &acceptance_probe(seed))
    })();
    out.push(probe_check("diffusive2: delta = 1/5 probe stable", r, &[Verdict::Stable]));
    out.extend(conjugacy_checks("diffusive2", &vf, DIFFUSIVE_CHARTS, seed));
    Ok(out)
}

fn verify_hot(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let tf = hot_polar()?;
    let r = (|| {
        let mut worst: f64 = 0.0;
        for (a, w) in [(1.0, -1.0), (1.0 / 3.0, 2.0), (-2.0, 0.5)] {
            let pm: BTreeMap<Symbol, f64> = [(Symbol::new("alpha_bar"), a), (Symbol::new("w_bar"), w)].into();
            for k in 0..64 {
                let th = k as f64 * std::f64::consts::TAU / 64.0;
                let got = tf.eval_f64(0.0, th, &pm)?;
                let want = hot_polar_reference(th, a, w);
                worst = worst.max((got.0 - want.0).abs()).max((got.1 - want.1).abs());
            }
        }
        if worst <= 1e-12 {
            Ok(format!("max deviation {worst:.2e}"))
        } else {
            Err(Error::Template(format!("max deviation {worst:.2e}")))
        }
    })();
    out.push(Check::from_result("diffusive2-hot: polar f1, f2 closed forms", r));

    let r = (|| {
        let pm: BTreeMap<Symbol, f64> = [(Symbol::new("alpha_bar"), 1.0), (Symbol::new("w_bar"), -1.0)].into();
        let eq = circle_equilibria(&tf, &pm, 720, 1e-13)?;
        if eq.len() != 8 {
            return Err(Error::Template(format!("{} circle equilibria", eq.len())));
        }
        for (k, (e, want)) in eq.iter().zip(HOT_ROOTS).enumerate() {
            let class = if k % 2 == 1 { CircleClass::StableNode } else { CircleClass::Saddle };
            if (e.theta - want).abs() > 1e-4 || e.class != class || e.f1 >= 0.0 {
                return Err(Error::Template(format!("root {} at {:.6}: {:?}, f1 = {:.3e}", k + 1, e.theta, e.class, e.f1)));
            }
        }
        Ok("8 roots, even indices stable nodes, f1 < 0 throughout".to_string())
    })();
    out.push(Check::from_result("diffusive2-hot: circle equilibria at A=1, W=-1", r));

    let r = (|| {
        let p = Point::new().with("alpha_bar", q(1)).with("w_bar", q(-1));
        let th = Value::WithPi { rational: q(0), pi: qf(3, 4) };
        let (f1, f2) = tf.evaluate_exact(&th, &p)?;
        if f1 == Value::Exact(qf(-1, 2)) && f2 == Value::Exact(q(0)) {
            Ok("f1 = -1/2, f2 = 0".into())
        } else {
            Err(Error::Template(format!("f1 = {f1}, f2 = {f2}")))
        }
    })();
    out.push(Check::from_result("diffusive2-hot: exact values at 3pi/4", r));

    let ns = diffusive2_hot()?;
    let vf = ns.assemble_polynomial()?;
    for (w, want, label) in [
        (qf(-1, 10), &[Verdict::Stable][..], "w = -1/10 probe stable"),
        (q(0), &[Verdict::Unstable][..], "w = 0 probe unstable"),
    ] {
        let mut p = hot_defaults();
        p.set(Symbol::new("w"), w);
        let r = probe_origin(&vf.to_expr_field(), &p, &acceptance_probe(seed));
        out.push(probe_check(&format!("diffusive2-hot: {label}"), r, want));
    }

    let r = (|| {
        let names = ["alpha", "w"];
        let mut bind = BTreeMap::new();
        bind.insert(Symbol::new("a1"), poly("alpha", &names)?);
        bind.insert(Symbol::new("a2"), poly("-alpha", &names)?);
        bind.insert(Symbol::new("w12"), poly("1/2*alpha", &names)?);
        bind.insert(Symbol::new("w21"), poly("-1/2*alpha", &names)?);
        let sub = vf.substitute(&bind)?;
        let sub = VectorField::new(sub.variables, sub.components, syms(&names))?;
        let worst = polar_conjugacy(&sub, &tf, 100, seed)?;
        if worst <= 1e-12 {
            Ok(format!("100 samples, max relative residual {worst:.2e}"))
        } else {
            Err(Error::Conjugacy(format!("max relative residual {worst:.2e}")))
        }
    })();
    out.push(Check::from_result("diffusive2-hot: conjugacy polar:x1,x2", r));
    Ok(out)
}

fn verify_cubic(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let params = cubic_defaults();
    let r = (|| {
        let a = -1;
        let lay = cubic_layer_chart(1, 2, &params)?;
        let names = ["r", "x2_bar"];
        let want = [
            poly(&format!("{a}*r*(1 - r)"), &names)?,
            poly(&format!("-({a})*x2_bar + {a}*x2_bar^3 + r*({a}*x2_bar - ({a})*x2_bar^4)"), &names)?,
        ];
        if lay.components != want {
            return Err(Error::Template(format!("layer chart {}", list(&lay.components))));
        }
        let mut found = Vec::new();
        for xb in [q(-1), q(0), q(1)] {
            let pt = Point::new().with("r", q(0)).with("x2_bar", xb.clone());
            let j = jacobian(&lay, &pt)?;
            let diag = (j.get(0, 0).clone(), j.get(1, 1).clone());
            let want = if xb.is_zero() { (q(a), q(-a)) } else { (q(a), q(2 * a)) };
            // triangular: the diagonal carries the eigenvalues
            if diag != want || !j.get(0, 1).is_zero() {
                return Err(Error::Template(format!("Jacobian at x2_bar = {xb}: {}", rows(&j))));
            }
            found.push(format!("({xb}): ({}, {})", diag.0, diag.1));
        }
        Ok(found.join("; "))
    })();
    out.push(Check::from_result("cubic-network: layer chart equilibria and Jacobians", r));

    let ns = cubic3()?;
    let ef = ns.assemble_expr()?;
    out.push(probe_check(
        "cubic-network: probe stable",
        probe_origin(&ef, &params, &acceptance_probe(seed)),
        &[Verdict::Stable],
    ));
    let vf = ns.assemble_polynomial()?;
    out.extend(conjugacy_checks("cubic-network", &vf, CUBIC_CHARTS, seed));
    Ok(out)
}

/// The rescaled Kuramoto rows `u_i' = (1/N)Σ_j[±(u_i − u_j) − s_ij(A + u_i − u_j)]`,
/// `s_ij' = −(u_i − u_j + s_ij)`, `r' = A' = 0`, in chart names.
pub fn kuramoto_rescaled_reference(n: usize, sign: i8, variables: &[Symbol]) -> Result<Vec<Polynomial>> {
    let names: Vec<String> = variables.iter().map(|s| s.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let pm = if sign > 0 { "" } else { "-" };
    let mut out = Vec::new();
    for v in &names {
        let text = if let Some(i) = v.strip_prefix("psi").and_then(|s| s.strip_suffix("_bar")) {
            let mut terms = Vec::new();
            for j in (1..=n).map(|j| j.to_string()).filter(|j| j != i) {
                terms.push(format!(
                    "{pm}(psi{i}_bar - psi{j}_bar) - sigma{i}{j}_bar*(alpha_bar + psi{i}_bar - psi{j}_bar)"
                ));
            }
            format!("1/{n}*({})", terms.join(" + "))
        } else if let Some(ij) = v.strip_prefix("sigma").and_then(|s| s.strip_suffix("_bar")) {
            let (i, j) = ij.split_at(1);
            format!("-(psi{i}_bar - psi{j}_bar + sigma{ij}_bar)")
        } else {
            "0".to_string()
        };
        out.push(poly(&text, &refs)?);
    }
    Ok(out)
}

fn verify_kuramoto(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for sign in [1i8, -1] {
        let r = (|| {
            let (cf, rf) = kuramoto_chart(4, sign)?;
            let want = kuramoto_rescaled_reference(4, sign, &rf.variables)?;
            if cf.division_exponent != 1 {
                return Err(Error::Template(format!("k = {}", cf.division_exponent)));
            }
            for (v, (got, w)) in rf.variables.iter().zip(rf.components.iter().zip(&want)) {
                if got != w {
                    return Err(Error::Template(format!("{v}' = {got}, expected {w}")));
                }
            }
            Ok(format!("{} rows match, k = 1", rf.dim()))
        })();
        out.push(Check::from_result(
            format!("kuramoto-adaptive: rescaled chart beta {}", if sign > 0 { "+" } else { "-" }),
            r,
        ));
    }
    let phases = [q(0), q(1), q(0), q(1)];
    let r = kuramoto_relative(4, &phases);
    match r {
        Ok(ef) => {
            let stable = kuramoto_defaults();
            out.push(probe_check(
                "kuramoto-adaptive: beta < -alpha probe stable",
                probe_origin(&ef, &stable, &acceptance_probe(seed)),
                &[Verdict::Stable],
            ));
            let mut unstable = stable.clone();
            unstable.set(Symbol::new("beta"), qf(1, 10));
            let v = probe_origin(&ef, &unstable, &acceptance_probe(seed));
            let ok = matches!(&v, Ok(s) if s.verdict == Verdict::Unstable
                || (s.verdict == Verdict::Inconclusive && s.escaped > 0));
            let detail = match &v {
                Ok(s) => format!("{:?}: {} escaped", s.verdict, s.escaped),
                Err(e) => e.to_string(),
            };
            out.push(Check::new("kuramoto-adaptive: beta = 0.1 probe not stable", ok, detail));
        }
        Err(e) => out.push(Check::new("kuramoto-adaptive: relative-phase field", false, e.to_string())),
    }
    let vf = kuramoto_polynomial(4)?;
    out.extend(conjugacy_checks("kuramoto-adaptive", &vf, KURAMOTO_CHARTS, seed));
    Ok(out)
}

fn verify_adaptive3(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let r = (|| {
        let (_, rf) = edge_layer_chart()?;
        let names: Vec<String> = rf.variables.iter().chain(&rf.parameters).map(|s| s.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        for (v, c) in rf.variables.iter().zip(&rf.components) {
            let name = v.to_string();
            let want = match name.as_str() {
                "x1_bar" => poly("a1*x1_bar^2 + (x2_bar - x1_bar) + w13_bar*(x3_bar - x1_bar)", &refs)?,
                "x2_bar" => poly("a2*x2_bar^2 + w21_bar*(x1_bar - x2_bar) + w23_bar*(x3_bar - x2_bar)", &refs)?,
                "x3_bar" => poly("a3*x3_bar^2 + w31_bar*(x1_bar - x3_bar) + w32_bar*(x2_bar - x3_bar)", &refs)?,
                _ => Polynomial::zero(),
            };
            if *c != want {
                return Err(Error::Template(format!("{name}' = {c}, expected {want}")));
            }
        }
        Ok("weight rows vanish; node rows form the static network with w12 = 1".to_string())
    })();
    out.push(Check::from_result("adaptive3: edge chart layer", r));
    let vf = adaptive3()?.assemble_polynomial()?;
    out.extend(conjugacy_checks("adaptive3", &vf, ADAPTIVE3_CHARTS, seed));
    Ok(out)
}

fn verify_motivating() -> Result<Vec<Check>> {
    let ns = kuramoto_motivating()?;
    let ef = ns.assemble_expr()?;
    let r = (|| {
        let mut at = motivating_defaults();
        at.extend(&motivating_equilibrium());
        let j = jacobian_expr(&ef, &at)?;
        let n = ns.nodes.len();
        for i in 0..n {
            for k in 0..n {
                if !j.get(i, k).is_zero() {
                    return Err(Error::Template(format!("phase block entry ({i}, {k}) = {}", j.get(i, k))));
                }
            }
        }
        Ok("phase block is exactly zero".to_string())
    })();
    Ok(vec![Check::from_result("kuramoto-motivating: zero phase Jacobian", r)])
}

fn verify_gradient(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let vf = gradient()?.assemble_polynomial()?;
    let mut at = gradient_defaults();
    at.extend(&two_node_origin());
    let j = jacobian(&vf, &at)?;
    out.push(Check::new(
        "gradient: nilpotent linear part",
        is_nilpotent(&j),
        format!("char_poly {}", list(&char_poly(&j))),
    ));
    out.push(probe_check(
        "gradient: probe stable",
        probe_origin(&vf.to_expr_field(), &gradient_defaults(), &acceptance_probe(seed)),
        &[Verdict::Stable],
    ));
    out.extend(conjugacy_checks("gradient", &vf, GRADIENT_CHARTS, seed));
    Ok(out)
}

/// Runs every check attached to the example `id`.
pub fn verify_example(id: &str, seed: u64) -> Result<VerifyReport> {
    let entry = lookup(id)?;
    let start = Instant::now();
    let checks = match entry.id {
        "diffusive2" => verify_diffusive2(seed)?,
        "diffusive2-hot" => verify_hot(seed)?,
        "cubic-network" => verify_cubic(seed)?,
        "kuramoto-adaptive" => verify_kuramoto(seed)?,
        "adaptive3" => verify_adaptive3(seed)?,
        "kuramoto-motivating" => verify_motivating()?,
        "gradient" => verify_gradient(seed)?,
        other => return Err(Error::Input(format!("no checks for {other}"))),
    };
    Ok(VerifyReport {
        id: entry.id.to_string(),
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
        seconds: start.elapsed().as_secs_f64(),
    })
}
