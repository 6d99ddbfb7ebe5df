//! Built-in example systems.

mod verify;

use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::netsys::{diffusive_weights_2node, parse_system, ExprField, NetworkSystem};
use crate::poly::value::{q, qf, Point, Value, Q};
use crate::poly::{Expr, Symbol};

pub use verify::{
    cubic_layer_chart, diffusive_symbolic_chart, edge_layer_chart, hot_polar, hot_polar_reference, kuramoto_chart,
    kuramoto_polynomial, kuramoto_relative, kuramoto_rescaled_reference, polar_conjugacy, probe_origin,
    vanishes_mod_inverse, verify_example, Check, VerifyReport, HOT_ROOTS, INV_GAP,
};

#[derive(Clone, Debug)]
pub struct ChartSpec {
    pub spec: &'static str,
    pub weights: &'static str,
}

pub struct ExampleEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub notes: &'static str,
    pub build: fn() -> Result<NetworkSystem>,
    pub default_params: fn() -> Point,
    /// Equilibrium of interest (node states and adapted weights).
    pub equilibrium: fn() -> Point,
    pub charts: &'static [ChartSpec],
}

fn pt(pairs: &[(&str, Q)]) -> Point {
    let mut p = Point::new();
    for (k, v) in pairs {
        p.set(Symbol::new(k), v.clone());
    }
    p
}

fn zeros(names: &[String]) -> Point {
    let mut p = Point::new();
    for n in names {
        p.set(Symbol::new(n), q(0));
    }
    p
}

/// `a1 x1 + w12 (x2 − x1)`, `a2 x2 + w21 (x1 − x2)`.
pub fn diffusive2() -> Result<NetworkSystem> {
    parse_system(
        "system diffusive2
nodes: x1 x2
params: a1 a2 w12 w21
internal x1 = a1*x1
internal x2 = a2*x2
couple x1 <- x2 : w12 * (x2 - x1)
couple x2 <- x1 : w21 * (x1 - x2)
",
    )
}

/// Diffusive pair with the cubic higher-order terms scaled by `w`.
pub fn diffusive2_hot() -> Result<NetworkSystem> {
    parse_system(
        "system diffusive2-hot
nodes: x1 x2
params: a1 a2 w12 w21 w
internal x1 = a1*x1
internal x2 = a2*x2 + w*x2^3
couple x1 <- x2 : w12 * (x2 - x1)
couple x1 <- x2 : w * ((x1 + x2)^3 - x2^3)
couple x2 <- x1 : w21 * (x1 - x2)
",
    )
}

/// Ring of `n` nodes with cubic internal dynamics and weak diffusive coupling.
pub fn cubic_network(n: usize) -> Result<NetworkSystem> {
    if n < 2 {
        return Err(Error::Input("cubic network needs at least two nodes".into()));
    }
    let mut s = String::from("system cubic-network\nnodes:");
    for i in 1..=n {
        let _ = write!(s, " x{i}");
    }
    s.push_str("\nparams: eps");
    for i in 1..=n {
        let _ = write!(s, " a{i}");
    }
    for i in 1..=n {
        let _ = write!(s, " w{i}{}", i % n + 1);
    }
    s.push('\n');
    for i in 1..=n {
        let _ = writeln!(s, "internal x{i} = a{i}*x{i}^3*(1 - x{i})");
    }
    for i in 1..=n {
        let j = i % n + 1;
        let _ = writeln!(s, "couple x{i} <- x{j} : w{i}{j} * (eps*(x{j} - x{i}))");
    }
    parse_system(&s)
}

fn pi_text(k: &Q) -> String {
    if k.is_zero() {
        String::new()
    } else if k.is_negative() {
        format!(" - {}*pi", -k)
    } else {
        format!(" + {k}*pi")
    }
}

/// Co-rotating adaptive Kuramoto network about a one-cluster solution with
/// antipodal phase offsets `phases` (each `0` or `1`, in units of π).
pub fn kuramoto_adaptive(n: usize, phases: &[Q]) -> Result<NetworkSystem> {
    if phases.len() != n || n < 2 {
        return Err(Error::Input(format!("need {n} ≥ 2 phase offsets")));
    }
    if phases.iter().any(|a| !a.is_zero() && *a != q(1)) {
        return Err(Error::Input("phase offsets must be 0 or pi".into()));
    }
    let mut s = String::from("system kuramoto-adaptive\nnodes:");
    for i in 1..=n {
        let _ = write!(s, " psi{i}");
    }
    s.push_str("\nparams: alpha beta");
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            let _ = write!(s, " sigma{i}{j}");
        }
    }
    s.push_str("\nslow: eps\n");
    for i in 1..=n {
        let _ = writeln!(s, "internal psi{i} = -sin(alpha)*sin(beta) + 1/{n}*sin(beta)*sin(alpha)");
    }
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            let d = pi_text(&(&phases[i - 1] - &phases[j - 1]));
            let _ = writeln!(
                s,
                "couple psi{i} <- psi{j} : 1/{n} * (sin(beta{d})*sin(psi{i} - psi{j} + alpha{d}))"
            );
            let _ = writeln!(
                s,
                "couple psi{i} <- psi{j} : sigma{i}{j} * (-1/{n}*sin(psi{i} - psi{j} + alpha{d}))"
            );
            let _ = writeln!(
                s,
                "adapt sigma{i}{j} = -(sin(psi{i} - psi{j} + beta{d}) - sin(beta{d}) + sigma{i}{j})"
            );
        }
    }
    parse_system(&s)
}

/// Three nodes `a_i x_i²`, diffusive couplings, every weight adapting
/// slowly by `−w_ij + x_i x_j`.
pub fn adaptive3() -> Result<NetworkSystem> {
    let mut s = String::from("system adaptive3\nnodes: x1 x2 x3\nparams: a1 a2 a3");
    for i in 1..=3 {
        for j in (1..=3).filter(|&j| j != i) {
            let _ = write!(s, " w{i}{j}");
        }
    }
    s.push_str("\nslow: eps\n");
    for i in 1..=3 {
        let _ = writeln!(s, "internal x{i} = a{i}*x{i}^2");
    }
    for i in 1..=3 {
        for j in (1..=3).filter(|&j| j != i) {
            let _ = writeln!(s, "couple x{i} <- x{j} : w{i}{j} * (x{j} - x{i})");
            let _ = writeln!(s, "adapt w{i}{j} = -w{i}{j} + x{i}*x{j}");
        }
    }
    parse_system(&s)
}

/// Four adaptive Kuramoto phases with common frequency `Omega`.
pub fn kuramoto_motivating() -> Result<NetworkSystem> {
    let mut s = String::from("system kuramoto-motivating\nnodes: phi1 phi2 phi3 phi4\nparams: Omega alpha beta");
    for i in 1..=4 {
        for j in (1..=4).filter(|&j| j != i) {
            let _ = write!(s, " w{i}{j}");
        }
    }
    s.push_str("\nslow: eps\n");
    for i in 1..=4 {
        let _ = writeln!(s, "internal phi{i} = Omega");
    }
    for i in 1..=4 {
        for j in (1..=4).filter(|&j| j != i) {
            let _ = writeln!(s, "couple phi{i} <- phi{j} : w{i}{j} * (-1/4*sin(phi{i} - phi{j} + alpha))");
            let _ = writeln!(s, "adapt w{i}{j} = -(sin(phi{i} - phi{j} + beta) + w{i}{j})");
        }
    }
    parse_system(&s)
}

/// Nilpotent diffusive pair with gradient tail `−∇(x1⁴ + x2⁴)/4`.
pub fn gradient() -> Result<NetworkSystem> {
    parse_system(
        "system gradient
nodes: x1 x2
params: a1 a2 w12 w21
internal x1 = a1*x1 - x1^3
internal x2 = a2*x2 - x2^3
couple x1 <- x2 : w12 * (x2 - x1)
couple x2 <- x1 : w21 * (x1 - x2)
",
    )
}

/// Diffusive parameters `a` with nilpotent weights plus perturbations `δ`.
pub fn diffusive_params(a1: Q, a2: Q, d12: Q, d21: Q) -> Result<Point> {
    let (w12, w21) = diffusive_weights_2node(&a1, &a2)?;
    Ok(pt(&[("a1", a1), ("a2", a2), ("w12", w12 + d12), ("w21", w21 + d21)]))
}

fn diffusive_defaults() -> Point {
    diffusive_params(q(2), q(1), q(0), q(0)).unwrap()
}

fn hot_defaults() -> Point {
    let mut p = diffusive_params(q(1), q(-1), q(0), q(0)).unwrap();
    p.set(Symbol::new("w"), qf(-1, 10));
    p
}

fn cubic_defaults() -> Point {
    let mut p = pt(&[("eps", qf(1, 20))]);
    for i in 1..=3 {
        p.set(Symbol::new(&format!("a{i}")), q(-1));
        p.set(Symbol::new(&format!("w{i}{}", i % 3 + 1)), q(1));
    }
    p
}

fn kuramoto_defaults() -> Point {
    pt(&[("alpha", qf(1, 10)), ("beta", qf(-1, 5)), ("eps", qf(1, 50))])
}

fn adaptive3_defaults() -> Point {
    pt(&[("a1", q(1)), ("a2", q(-1)), ("a3", q(2)), ("eps", qf(1, 10))])
}

fn motivating_defaults() -> Point {
    pt(&[("Omega", qf(-1, 2)), ("alpha", q(0)), ("beta", q(0)), ("eps", qf(1, 10))])
}

fn gradient_defaults() -> Point {
    diffusive_defaults()
}

fn two_node_origin() -> Point {
    pt(&[("x1", q(0)), ("x2", q(0))])
}

fn cubic_origin() -> Point {
    zeros(&(1..=3).map(|i| format!("x{i}")).collect::<Vec<_>>())
}

fn kuramoto_origin() -> Point {
    let mut names: Vec<String> = (1..=4).map(|i| format!("psi{i}")).collect();
    for i in 1..=4 {
        for j in (1..=4).filter(|&j| j != i) {
            names.push(format!("sigma{i}{j}"));
        }
    }
    zeros(&names)
}

fn adaptive3_origin() -> Point {
    let mut names: Vec<String> = (1..=3).map(|i| format!("x{i}")).collect();
    for i in 1..=3 {
        for j in (1..=3).filter(|&j| j != i) {
            names.push(format!("w{i}{j}"));
        }
    }
    zeros(&names)
}

/// Phases `(0, π/2, π, 3π/2)` with weights `−sin(φ_i − φ_j + β)` at `β = 0`.
pub fn motivating_equilibrium() -> Point {
    let mut p = Point::new();
    let phase = |i: usize| qf(i as i64 - 1, 2);
    for i in 1..=4 {
        p.set(
            Symbol::new(&format!("phi{i}")),
            Value::WithPi {
                rational: q(0),
                pi: phase(i),
            },
        );
    }
    for i in 1..=4 {
        for j in (1..=4).filter(|&j| j != i) {
            let d = Value::WithPi {
                rational: q(0),
                pi: phase(i) - phase(j),
            };
            let w = d.sin();
            p.set(
                Symbol::new(&format!("w{i}{j}")),
                match w {
                    Value::Exact(v) => Value::Exact(-v),
                    other => Value::Float(-other.to_f64()),
                },
            );
        }
    }
    p
}

pub fn kuramoto4() -> Result<NetworkSystem> {
    kuramoto_adaptive(4, &[q(0), q(0), q(0), q(0)])
}

pub fn cubic3() -> Result<NetworkSystem> {
    cubic_network(3)
}

const DIFFUSIVE_CHARTS: &[ChartSpec] = &[
    ChartSpec { spec: "node:x1:+", weights: "x1=1,x2=1" },
    ChartSpec { spec: "node:x1:-", weights: "x1=1,x2=1" },
    ChartSpec { spec: "node:x2:+", weights: "x1=1,x2=1" },
    ChartSpec { spec: "node:x2:-", weights: "x1=1,x2=1" },
];

const CUBIC_CHARTS: &[ChartSpec] = &[
    ChartSpec { spec: "node:x1:+", weights: "x1=1,x2=1,x3=1,eps=2" },
    ChartSpec { spec: "node:x2:+", weights: "x1=1,x2=1,x3=1,eps=2" },
    ChartSpec { spec: "node:x3:-", weights: "x1=1,x2=1,x3=1,eps=2" },
    ChartSpec { spec: "param:eps:+", weights: "x1=1,x2=1,x3=1,eps=2" },
];

const KURAMOTO_WEIGHTS: &str = "psi1=1,psi2=1,psi3=1,psi4=1,\
sigma12=1,sigma13=1,sigma14=1,sigma21=1,sigma23=1,sigma24=1,\
sigma31=1,sigma32=1,sigma34=1,sigma41=1,sigma42=1,sigma43=1,alpha=1,beta=1,eps=1";

const KURAMOTO_CHARTS: &[ChartSpec] = &[
    ChartSpec { spec: "param:beta:+", weights: KURAMOTO_WEIGHTS },
    ChartSpec { spec: "param:beta:-", weights: KURAMOTO_WEIGHTS },
];

const ADAPTIVE3_WEIGHTS: &str = "x1=1,x2=1,x3=1,w12=1,w13=1,w21=1,w23=1,w31=1,w32=1,eps=1";

const ADAPTIVE3_CHARTS: &[ChartSpec] = &[
    ChartSpec { spec: "edge:w12:+", weights: ADAPTIVE3_WEIGHTS },
    ChartSpec { spec: "edge:w23:-", weights: ADAPTIVE3_WEIGHTS },
    ChartSpec { spec: "node:x1:+", weights: ADAPTIVE3_WEIGHTS },
];

const GRADIENT_CHARTS: &[ChartSpec] = &[
    ChartSpec { spec: "node:x1:+", weights: "x1=1,x2=1" },
    ChartSpec { spec: "node:x2:-", weights: "x1=1,x2=1" },
];

pub fn examples() -> Vec<ExampleEntry> {
    vec![
        ExampleEntry {
            id: "diffusive2",
            summary: "two diffusively coupled linear nodes, nilpotent at w = w*",
            notes: "2-node diffusive network; weights a_i^2/(a_i - a_j) make the origin nilpotent",
            build: diffusive2,
            default_params: diffusive_defaults,
            equilibrium: two_node_origin,
            charts: DIFFUSIVE_CHARTS,
        },
        ExampleEntry {
            id: "diffusive2-hot",
            summary: "diffusive pair with cubic higher-order interactions scaled by w",
            notes: "higher-order stabilisation of the nilpotent pair; polar chart with alpha = r^3 A, w = r W",
            build: diffusive2_hot,
            default_params: hot_defaults,
            equilibrium: two_node_origin,
            charts: &[ChartSpec { spec: "polar:x1,x2", weights: "" }],
        },
        ExampleEntry {
            id: "cubic-network",
            summary: "ring of three nodes a_i x_i^3 (1 - x_i) with weak diffusive coupling",
            notes: "nilpotent internal dynamics; node chart with eps weight 2",
            build: cubic3,
            default_params: cubic_defaults,
            equilibrium: cubic_origin,
            charts: CUBIC_CHARTS,
        },
        ExampleEntry {
            id: "kuramoto-adaptive",
            summary: "co-rotating adaptive Kuramoto network (N = 4) about a one-cluster solution",
            notes: "slowly adaptive Kuramoto oscillators; beta-directional rescaling chart",
            build: kuramoto4,
            default_params: kuramoto_defaults,
            equilibrium: kuramoto_origin,
            charts: KURAMOTO_CHARTS,
        },
        ExampleEntry {
            id: "adaptive3",
            summary: "three nodes with slowly adapting weights g_ij = -w_ij + x_i x_j",
            notes: "slowly adaptive network; edge chart gives a static network with w_kl = 1",
            build: adaptive3,
            default_params: adaptive3_defaults,
            equilibrium: adaptive3_origin,
            charts: ADAPTIVE3_CHARTS,
        },
        ExampleEntry {
            id: "kuramoto-motivating",
            summary: "four adaptive Kuramoto phases; splay state with zero phase Jacobian",
            notes: "motivating adaptive Kuramoto example at alpha = beta = 0",
            build: kuramoto_motivating,
            default_params: motivating_defaults,
            equilibrium: motivating_equilibrium,
            charts: &[],
        },
        ExampleEntry {
            id: "gradient",
            summary: "nilpotent diffusive pair with gradient tail -grad (x1^4 + x2^4)/4",
            notes: "nilpotent linear part with gradient higher-order terms",
            build: gradient,
            default_params: gradient_defaults,
            equilibrium: two_node_origin,
            charts: GRADIENT_CHARTS,
        },
    ]
}

pub fn lookup(id: &str) -> Result<ExampleEntry> {
    examples()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::Input(format!("unknown example {id:?}")))
}

/// Relative-phase reduction: with `anchor` as reference, rows become
/// `θ_i' = ψ_i' − ψ_anchor'` evaluated at `ψ_anchor = 0`, and the anchor row
/// is dropped. Other variables are substituted at `ψ_anchor = 0`.
pub fn relative_phase_field(ef: &ExprField, phases: &[Symbol], anchor: &Symbol) -> Result<ExprField> {
    let ai = ef
        .variables
        .iter()
        .position(|v| v == anchor)
        .ok_or_else(|| Error::Input(format!("{anchor} is not a variable")))?;
    let pin: BTreeMap<Symbol, Expr> = [(anchor.clone(), Expr::zero())].into();
    let sub = ef.substitute(&pin)?;
    let anchor_row = sub.components[ai].clone();
    let mut vars = Vec::new();
    let mut comps = Vec::new();
    for (i, (v, c)) in sub.variables.iter().zip(&sub.components).enumerate() {
        if i == ai {
            continue;
        }
        vars.push(v.clone());
        if phases.contains(v) {
            comps.push(c.clone() - anchor_row.clone());
        } else {
            comps.push(c.clone());
        }
    }
    Ok(ExprField {
        variables: vars,
        components: comps,
        parameters: ef.parameters.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsys::emit_system;

    #[test]
    fn registry_has_seven_buildable_entries() {
        let all = examples();
        assert_eq!(all.len(), 7);
        for e in &all {
            let ns = (e.build)().unwrap();
            ns.validate().unwrap();
            let again = parse_system(&emit_system(&ns)).unwrap();
            assert_eq!(again.nodes, ns.nodes, "{}", e.id);
        }
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn kuramoto_equilibrium_rows_vanish() {
        let ns = kuramoto_adaptive(4, &[q(0), q(1), q(0), q(1)]).unwrap();
        let ef = ns.assemble_expr().unwrap();
        let mut p = kuramoto_defaults();
        p.extend(&kuramoto_origin());
        for v in ef.evaluate(&p).unwrap() {
            assert!(v.to_f64().abs() < 1e-15, "{v}");
        }
    }

    #[test]
    fn motivating_point_is_an_equilibrium() {
        let ns = kuramoto_motivating().unwrap();
        let ef = ns.assemble_expr().unwrap();
        let mut p = motivating_defaults();
        p.extend(&motivating_equilibrium());
        for v in ef.evaluate(&p).unwrap() {
            assert_eq!(v, Value::Exact(q(0)));
        }
    }
}
