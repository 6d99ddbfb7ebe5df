//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::Instant;

use netblow::blowup::{blowup, circle_equilibria, restrict, structure_report, verify_conjugacy, BlowupChart, CircleClass};
use netblow::dynamics::{ProbeOptions, StabilityVerdict, Verdict};
use netblow::netsys::{linearize, NetworkSystem, VectorField};
use netblow::nilpotent::{char_poly, is_nilpotent, jacobian, jacobian_expr, RationalMatrix};
use netblow::poly::{q, qf, Point, Polynomial, Symbol, Value, Q};
use netblow::registry::{self, ChartSpec};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{oracle_conjugacy, poly, rand_q};

type Outcome = Result<String, String>;

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    limit: f64,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: "1", title: "exact nilpotency", limit: 1.0, run: c1_nilpotency },
        Criterion { id: "2", title: "symbolic diffusive chart", limit: 1.0, run: c2_diffusive_chart },
        Criterion { id: "3", title: "conjugacy on every example chart", limit: 30.0, run: c3_conjugacy },
        Criterion { id: "4", title: "structure template on random networks", limit: 60.0, run: c4_structure },
        Criterion { id: "5", title: "polar circle equilibria", limit: 5.0, run: c5_polar },
        Criterion { id: "6a", title: "higher-order stabilisation probe", limit: 600.0, run: c6a_hot },
        Criterion { id: "6b", title: "perturbed diffusive probe", limit: 600.0, run: c6b_delta },
        Criterion { id: "6c", title: "cubic ring probe and chart", limit: 600.0, run: c6c_cubic },
        Criterion { id: "6d", title: "adaptive Kuramoto probe", limit: 600.0, run: c6d_kuramoto },
        Criterion { id: "6e", title: "gradient tail probe", limit: 600.0, run: c6e_gradient },
        Criterion { id: "7", title: "Kuramoto rescaling chart", limit: 2.0, run: c7_kuramoto_chart },
        Criterion { id: "8", title: "edge chart layer", limit: 2.0, run: c8_edge },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut probe_total = 0.0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.id.starts_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = std::panic::catch_unwind(c.run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        if c.id.starts_with('6') {
            probe_total += secs;
        }
        let (ok, detail) = match out {
            Ok(d) if secs <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; took {secs:.2}s, limit {}s", c.limit)),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {:<3} {} ({secs:.2}s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title
        );
    }
    if probe_total > 600.0 {
        println!("FAIL criterion 6 total probe time {probe_total:.1}s exceeds 600s");
        failed += 1;
    }
    println!("acceptance: {failed} failing criteria");
    if failed > 0 {
        std::process::exit(1);
    }
}

fn c1_nilpotency() -> Outcome {
    let vf = registry::diffusive2().map_err(e)?.assemble_polynomial().map_err(e)?;
    let mut at = Point::new().with("x1", q(0)).with("x2", q(0));
    for (k, v) in [("a1", 2), ("a2", 1), ("w12", 4), ("w21", -1)] {
        at.set(Symbol::new(k), q(v));
    }
    let j = jacobian(&vf, &at).map_err(e)?;
    // a_i − w_ij on the diagonal, w_ij off it
    let hand = RationalMatrix::from_i64(&[&[-2, 4], &[-1, 2]]).map_err(e)?;
    if j != hand {
        return Err(format!("Jacobian {:?}", j.rows()));
    }
    let trace = j.get(0, 0) + j.get(1, 1);
    let det = j.get(0, 0) * j.get(1, 1) - j.get(0, 1) * j.get(1, 0);
    let cp = char_poly(&j);
    if cp != vec![q(1), -trace, det] || cp != vec![q(1), q(0), q(0)] || !is_nilpotent(&j) {
        return Err(format!("char_poly {cp:?}"));
    }

    let ns = registry::kuramoto_motivating().map_err(e)?;
    let ef = ns.assemble_expr().map_err(e)?;
    let mut at = Point::new().with("Omega", qf(-1, 2)).with("alpha", q(0)).with("beta", q(0)).with("eps", qf(1, 10));
    let phase = |i: i64| qf(i - 1, 2);
    for i in 1..=4 {
        at.set(Symbol::new(&format!("phi{i}")), Value::WithPi { rational: q(0), pi: phase(i) });
        for j in (1..=4).filter(|&j| j != i) {
            // w_ij = −sin(φ_i − φ_j) on quarter turns
            let quarter = ((i - j) % 4 + 4) % 4;
            let w = [0, -1, 0, 1][quarter as usize];
            at.set(Symbol::new(&format!("w{i}{j}")), q(w));
        }
    }
    for v in ef.evaluate(&at).map_err(e)? {
        if v != Value::Exact(q(0)) {
            return Err(format!("splay state residual {v}"));
        }
    }
    let jk = jacobian_expr(&ef, &at).map_err(e)?;
    for i in 0..4 {
        for k in 0..4 {
            if !jk.get(i, k).is_zero() {
                return Err(format!("phase block ({i},{k}) = {}", jk.get(i, k)));
            }
        }
    }
    Ok("diffusive char_poly = [1, 0, 0], nilpotent; Kuramoto phase block J = 0".into())
}

fn c2_diffusive_chart() -> Outcome {
    let names = ["r", "x2_bar", "a1", "a2", "g", "h"];
    let g = Symbol::new("g");
    let gap = poly("a1 - a2", &names);
    let rename = |p: &Polynomial| -> Polynomial {
        let b: BTreeMap<Symbol, Polynomial> = [(Symbol::new(registry::INV_GAP), Polynomial::var(&g))].into();
        p.substitute(&b).unwrap()
    };
    let same = |a: &Polynomial, b: &Polynomial| -> Result<bool, String> {
        Ok((a - b).clear_inverse(&g, &gap).map_err(e)?.is_zero())
    };
    for (sign, s, t) in [(1i8, "-", "-"), (-1, "", "+")] {
        let cf = registry::diffusive_symbolic_chart(sign).map_err(e)?;
        if cf.variables != [Symbol::new("r"), Symbol::new("x2_bar")] {
            return Err(format!("chart variables {:?}", cf.variables));
        }
        let rdot = poly(&format!("-a1*r*g*(a2 {t} a1*x2_bar)"), &names);
        let xdot = poly(&format!("{s}g*(a2 {t} a1*x2_bar)^2"), &names);
        let (gr, gx) = (rename(&cf.components[0]), rename(&cf.components[1]));
        if !same(&gr, &rdot)? || !same(&gx, &xdot)? {
            return Err(format!("sign {sign}: r' = {gr}, x2_bar' = {gx}"));
        }
        if sign > 0 {
            // x2_bar = a2/a1 + y, h = 1/a1
            let shift: BTreeMap<Symbol, Polynomial> = [(Symbol::new("x2_bar"), poly("x2_bar + a2*h", &names))].into();
            let want = [poly("a1^2*g*r*x2_bar", &names), poly("-a1^2*g*x2_bar^2", &names)];
            for (c, w) in [gr, gx].iter().zip(&want) {
                let d = c.substitute(&shift).map_err(e)? - w.clone();
                let d = d.clear_inverse(&Symbol::new("h"), &poly("a1", &names)).map_err(e)?;
                if !d.clear_inverse(&g, &gap).map_err(e)?.is_zero() {
                    return Err(format!("shifted row {c} does not reduce to {w}"));
                }
            }
        }
    }
    Ok("both signs equal the closed forms; shift gives the degenerate chart".into())
}

fn rng_for(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn c3_conjugacy() -> Outcome {
    let mut checked = 0;
    let mut worst_float: f64 = 0.0;
    for entry in registry::examples() {
        let vf = match entry.id {
            "kuramoto-adaptive" => registry::kuramoto_polynomial(4).map_err(e)?,
            "kuramoto-motivating" => continue,
            _ => (entry.build)().map_err(e)?.assemble_polynomial().map_err(e)?,
        };
        for ChartSpec { spec, weights } in entry.charts {
            if spec.starts_with("polar") {
                let tf = registry::hot_polar().map_err(e)?;
                let sub = hot_substituted(&vf)?;
                let worst = common::polar_oracle(&sub, &tf, 100, &mut rng_for(checked));
                worst_float = worst_float.max(worst);
                if worst > 1e-12 {
                    return Err(format!("{}: polar residual {worst:e}", entry.id));
                }
            } else {
                let chart = BlowupChart::parse(spec, weights, &vf.parameters).map_err(e)?;
                let cf = blowup(&vf, &chart).map_err(e)?;
                verify_conjugacy(&vf, &cf, &BTreeMap::new(), 100, checked).map_err(|x| format!("{} {spec}: {x}", entry.id))?;
                oracle_conjugacy(&vf, &cf, 100, &mut rng_for(checked)).map_err(|x| format!("{} {spec}: {x}", entry.id))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} charts x 100 points; polar float residual {worst_float:.1e}"))
}

fn hot_substituted(vf: &VectorField) -> Result<VectorField, String> {
    let names = ["alpha", "w"];
    let bind: BTreeMap<Symbol, Polynomial> = [
        ("a1", "alpha"),
        ("a2", "-alpha"),
        ("w12", "1/2*alpha"),
        ("w21", "-1/2*alpha"),
    ]
    .iter()
    .map(|(k, v)| (Symbol::new(k), poly(v, &names)))
    .collect();
    let sub = vf.substitute(&bind).map_err(e)?;
    VectorField::new(sub.variables, sub.components, vec![Symbol::new("alpha"), Symbol::new("w")]).map_err(e)
}

/// Random network with internal `a_k x_k + b_k x_k²` and couplings
/// `w (p x_j + c x_k + s x_j x_k)`; returns it with its Jacobian at 0.
fn random_network(rng: &mut ChaCha8Rng) -> (NetworkSystem, Vec<Vec<Q>>) {
    let n = rng.random_range(2..=5usize);
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut ns = NetworkSystem::new("random", &refs, &[]);
    let mut jac = vec![vec![q(0); n]; n];
    for k in 0..n {
        let (a, b) = (rand_q(rng, 6, 4), rand_q(rng, 6, 4));
        ns.set_internal(&names[k], &format!("({a})*{x} + ({b})*{x}^2", x = names[k])).unwrap();
        jac[k][k] += a;
    }
    for k in 0..n {
        for j in (0..n).filter(|&j| j != k) {
            if rng.random_bool(0.3) {
                continue;
            }
            let (w, p, c, s) = (rand_q(rng, 5, 3), rand_q(rng, 4, 3), rand_q(rng, 4, 3), rand_q(rng, 4, 3));
            let text = format!("({p})*{xj} + ({c})*{xk} + ({s})*{xj}*{xk}", xj = names[j], xk = names[k]);
            ns.add_coupling(&names[k], &names[j], &w.to_string(), &text).unwrap();
            jac[k][j] += &w * &p;
            jac[k][k] += &w * &c;
        }
    }
    (ns, jac)
}

fn c4_structure() -> Outcome {
    let mut rng = rng_for(4);
    let mut charts = 0;
    for net in 0..50 {
        let (ns, jac) = random_network(&mut rng);
        let vf = ns.assemble_polynomial().map_err(e)?;
        let n = ns.nodes.len();
        let origin: Point = ns.nodes.iter().map(|s| (s.clone(), Value::Exact(q(0)))).collect();
        let decomp = linearize(&ns, &origin, &Point::new()).map_err(e)?;
        for i in 0..n {
            for sign in [1i8, -1] {
                let mut chart = BlowupChart::node(ns.nodes[i].as_str(), sign);
                for s in &ns.nodes {
                    chart.state_weights.insert(s.clone(), 1);
                }
                let cf = blowup(&vf, &chart).map_err(e)?;
                let r0 = restrict(&cf, &[(Symbol::new("r"), q(0))].into()).map_err(e)?;
                let rep = structure_report(&r0, &decomp, i, sign).map_err(e)?;
                if !rep.matches {
                    return Err(format!("network {net}, chart {chart}: library template check failed"));
                }
                // x̄_k' = σJ_ki + Σ_{j≠i} J_kj x̄_j − x̄_k (J_ii + σ Σ_{j≠i} J_ij x̄_j)
                let sg = q(sign as i64);
                let bar = |j: usize| Polynomial::var(&ns.nodes[j].barred());
                let mut inner = Polynomial::constant(jac[i][i].clone());
                for j in (0..n).filter(|&j| j != i) {
                    inner += bar(j).scale(&(&sg * &jac[i][j]));
                }
                for k in (0..n).filter(|&k| k != i) {
                    let mut want = Polynomial::constant(&sg * &jac[k][i]);
                    for j in (0..n).filter(|&j| j != i) {
                        want += bar(j).scale(&jac[k][j]);
                    }
                    want = want - &bar(k) * &inner;
                    let got = r0.component(&ns.nodes[k].barred()).ok_or("missing row")?;
                    if *got != want {
                        return Err(format!("network {net}, chart {chart}, row {}: {got} vs {want}", ns.nodes[k]));
                    }
                }
                charts += 1;
            }
        }
    }
    Ok(format!("50 networks, {charts} node charts match exactly"))
}

const PUBLISHED_ROOTS: [f64; 8] = [0.431808, 1.26918, 2.35619, 2.54775, 3.5734, 4.41077, 5.49779, 5.68935];

fn c5_polar() -> Outcome {
    let tf = registry::hot_polar().map_err(e)?;
    let pm: BTreeMap<Symbol, f64> = [(Symbol::new("alpha_bar"), 1.0), (Symbol::new("w_bar"), -1.0)].into();
    for k in 0..128 {
        let th = k as f64 * TAU / 128.0;
        let (f1, f2) = tf.eval_f64(0.0, th, &pm).map_err(e)?;
        // A = 1, W = −1 in the closed forms
        let g1 = (4.0 * (2.0 * th).cos() - (6.0 * (2.0 * th).sin() + 3.0 * (4.0 * th).sin() - (4.0 * th).cos() + 9.0)) / 8.0;
        let g2 = (-2.0 * (2.0 - 3.0) * (2.0 * th).sin() - 4.0 - (4.0 * th).sin() - 3.0 * (4.0 * th).cos() + 3.0) / 8.0;
        if (f1 - g1).abs() > 1e-12 || (f2 - g2).abs() > 1e-12 {
            return Err(format!("closed form mismatch at θ = {th}"));
        }
    }
    let eq = circle_equilibria(&tf, &pm, 720, 1e-13).map_err(e)?;
    if eq.len() != 8 {
        return Err(format!("{} equilibria: {:?}", eq.len(), eq.iter().map(|x| x.theta).collect::<Vec<_>>()));
    }
    let mut dev: f64 = 0.0;
    for (k, (x, want)) in eq.iter().zip(PUBLISHED_ROOTS).enumerate() {
        dev = dev.max((x.theta - want).abs());
        let class = if (k + 1) % 2 == 0 { CircleClass::StableNode } else { CircleClass::Saddle };
        if (x.theta - want).abs() > 1e-4 || x.class != class || x.f1 >= 0.0 {
            return Err(format!("θ_{} = {:.6} {:?} f1 = {:.3e}", k + 1, x.theta, x.class, x.f1));
        }
    }
    let p = Point::new().with("alpha_bar", q(1)).with("w_bar", q(-1));
    let (f1, f2) = tf
        .evaluate_exact(&Value::WithPi { rational: q(0), pi: qf(3, 4) }, &p)
        .map_err(e)?;
    if f1 != Value::Exact(qf(-1, 2)) || f2 != Value::Exact(q(0)) {
        return Err(format!("f(3π/4) = ({f1}, {f2})"));
    }
    Ok(format!("8 roots within {dev:.1e}; stable nodes at even indices; f2(3π/4) = 0, f1(3π/4) = -1/2"))
}

fn probe_opts() -> ProbeOptions {
    ProbeOptions { radius: 0.05, samples: 64, t_end: 500.0, capture: 1e-4, escape_factor: 10.0, seed: 2024, ..Default::default() }
}

fn describe(v: &StabilityVerdict) -> String {
    format!(
        "{:?} ({}/{} captured, {} escaped, max final distance {:.2e})",
        v.verdict, v.converged, v.sampled, v.escaped, v.max_final_distance
    )
}

fn c6a_hot() -> Outcome {
    let vf = registry::diffusive2_hot().map_err(e)?.assemble_polynomial().map_err(e)?;
    let base = Point::new()
        .with("a1", q(1))
        .with("a2", q(-1))
        .with("w12", qf(1, 2))
        .with("w21", qf(-1, 2));
    let stable = registry::probe_origin(&vf.to_expr_field(), &base.clone().with("w", qf(-1, 10)), &probe_opts()).map_err(e)?;
    let unstable = registry::probe_origin(&vf.to_expr_field(), &base.with("w", q(0)), &probe_opts()).map_err(e)?;
    let msg = format!("w=-1/10: {}; w=0: {}", describe(&stable), describe(&unstable));
    if stable.verdict == Verdict::Stable && unstable.verdict == Verdict::Unstable {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c6b_delta() -> Outcome {
    let vf = registry::diffusive2().map_err(e)?.assemble_polynomial().map_err(e)?;
    // w* = a_i²/(a_i − a_j) at a = (−2, 1), plus δ = 1/5
    let p = Point::new()
        .with("a1", q(-2))
        .with("a2", q(1))
        .with("w12", qf(-4, 3) + qf(1, 5))
        .with("w21", qf(1, 3) + qf(1, 5));
    let v = registry::probe_origin(&vf.to_expr_field(), &p, &probe_opts()).map_err(e)?;
    if v.verdict == Verdict::Stable {
        Ok(describe(&v))
    } else {
        Err(describe(&v))
    }
}

fn c6c_cubic() -> Outcome {
    let mut params = Point::new().with("eps", qf(1, 20));
    for i in 1..=3 {
        params.set(Symbol::new(&format!("a{i}")), q(-1));
        params.set(Symbol::new(&format!("w{i}{}", i % 3 + 1)), q(1));
    }
    let lay = registry::cubic_layer_chart(1, 2, &params).map_err(e)?;
    let names = ["r", "x2_bar"];
    let want = [poly("-r + r^2", &names), poly("x2_bar - x2_bar^3 + r*(-x2_bar + x2_bar^4)", &names)];
    if lay.components != want {
        return Err(format!("layer chart {:?}", lay.components.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
    }
    let mut chart_msg = Vec::new();
    for (xb, eig) in [(0, (-1, 1)), (1, (-1, -2)), (-1, (-1, -2))] {
        let pt = Point::new().with("r", q(0)).with("x2_bar", q(xb));
        let j = jacobian(&lay, &pt).map_err(e)?;
        let ev = char_poly(&j);
        // λ² − tr λ + det against the expected pair
        let (l1, l2) = (q(eig.0), q(eig.1));
        let expect = vec![q(1), -(&l1 + &l2), &l1 * &l2];
        if ev != expect {
            return Err(format!("chart equilibrium (0, {xb}): char_poly {ev:?}"));
        }
        chart_msg.push(format!("(0,{xb}): {:?}", eig));
    }
    let ef = registry::cubic3().map_err(e)?.assemble_expr().map_err(e)?;
    let v = registry::probe_origin(&ef, &params, &probe_opts()).map_err(e)?;
    let msg = format!("chart eigenvalues {}; probe {}", chart_msg.join(" "), describe(&v));
    if v.verdict == Verdict::Stable {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c6d_kuramoto() -> Outcome {
    let ef = registry::kuramoto_relative(4, &[q(0), q(1), q(0), q(1)]).map_err(e)?;
    let p = Point::new().with("alpha", qf(1, 10)).with("beta", qf(-1, 5)).with("eps", qf(1, 50));
    let good = registry::probe_origin(&ef, &p, &probe_opts()).map_err(e)?;
    let bad = registry::probe_origin(&ef, &p.clone().with("beta", qf(1, 10)), &probe_opts()).map_err(e)?;
    let msg = format!("beta=-0.2: {}; beta=0.1: {}", describe(&good), describe(&bad));
    let bad_ok = bad.verdict == Verdict::Unstable || (bad.verdict == Verdict::Inconclusive && bad.escaped > 0);
    if good.verdict == Verdict::Stable && bad_ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c6e_gradient() -> Outcome {
    let vf = registry::gradient().map_err(e)?.assemble_polynomial().map_err(e)?;
    let p = Point::new().with("a1", q(2)).with("a2", q(1)).with("w12", q(4)).with("w21", q(-1));
    let mut at = p.clone();
    at.extend(&Point::new().with("x1", q(0)).with("x2", q(0)));
    if !is_nilpotent(&jacobian(&vf, &at).map_err(e)?) {
        return Err("linear part is not nilpotent".into());
    }
    let v = registry::probe_origin(&vf.to_expr_field(), &p, &probe_opts()).map_err(e)?;
    if v.verdict == Verdict::Stable {
        Ok(describe(&v))
    } else {
        Err(format!("{} (counterexample to the gradient stability claim)", describe(&v)))
    }
}

fn c7_kuramoto_chart() -> Outcome {
    let n = 4;
    for sign in [1i8, -1] {
        let (cf, rf) = registry::kuramoto_chart(n, sign).map_err(e)?;
        if cf.division_exponent != 1 {
            return Err(format!("division exponent {}", cf.division_exponent));
        }
        let names: Vec<String> = rf.variables.iter().map(|s| s.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let sg = if sign > 0 { "+" } else { "-" };
        for (v, got) in rf.variables.iter().zip(&rf.components) {
            let name = v.to_string();
            let want = if let Some(i) = name.strip_prefix("psi").and_then(|s| s.strip_suffix("_bar")) {
                let i: usize = i.parse().unwrap();
                let mut t = String::from("0");
                for j in (1..=n).filter(|&j| j != i) {
                    let d = format!("(psi{i}_bar - psi{j}_bar)");
                    t += &format!(" + 1/{n}*({sg}{d} - sigma{i}{j}_bar*(alpha_bar + {d}))");
                }
                poly(&t, &refs)
            } else if let Some(ij) = name.strip_prefix("sigma").and_then(|s| s.strip_suffix("_bar")) {
                let (i, j) = ij.split_at(1);
                poly(&format!("-((psi{i}_bar - psi{j}_bar) + sigma{ij}_bar)"), &refs)
            } else if name == "r" || name == "alpha_bar" {
                Polynomial::zero()
            } else {
                return Err(format!("unexpected chart variable {name}"));
            };
            if *got != want {
                return Err(format!("sign {sign}: {name}' = {got}, expected {want}"));
            }
        }
    }
    Ok("both beta signs: rescaled rows exact, r' = 0".into())
}

fn c8_edge() -> Outcome {
    let (cf, rf) = registry::edge_layer_chart().map_err(e)?;
    let names: Vec<String> = rf.variables.iter().chain(&rf.parameters).map(|s| s.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut zero_rows = 0;
    for (v, got) in rf.variables.iter().zip(&rf.components) {
        let name = v.to_string();
        if name.starts_with('w') || name == "r" {
            if !got.is_zero() {
                return Err(format!("{name}' = {got}"));
            }
            zero_rows += 1;
        }
    }
    let x1 = rf.component(&Symbol::new("x1_bar")).ok_or("no x1_bar row")?;
    let want = poly("a1*x1_bar^2 + 1*(x2_bar - x1_bar) + w13_bar*(x3_bar - x1_bar)", &refs);
    if *x1 != want {
        return Err(format!("x1_bar' = {x1}"));
    }
    let coupling = x1.coefficient(&netblow::poly::Monomial::var(Symbol::new("x2_bar")));
    if coupling != q(1) {
        return Err(format!("distinguished coupling coefficient {coupling}"));
    }
    Ok(format!("k = {}, {zero_rows} vanishing rows, x1_bar row is the static network with w12 = 1", cf.division_exponent))
}
