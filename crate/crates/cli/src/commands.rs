use std::collections::BTreeMap;
use std::path::Path;

use netblow::blowup::{
    circle_equilibria, desingularize, directional_blowup, divide, lift_weighted, parse_weights, polar_blowup_2d,
    restrict, structure_report, BlowupChart, ChartKind, TrigField,
};
use netblow::dynamics::{
    classify_equilibrium, find_equilibria, integrate, lattice, stability_probe, sweep_portrait, verify_exact,
    write_bundle, IntegrateOptions, NumericField, ProbeOptions,
};
use netblow::netsys::{emit_system, linearize};
use netblow::nilpotent::{jacobian_expr, spectrum_classify};
use netblow::poly::value::q_to_json;
use netblow::poly::{Point, Symbol, Value};
use netblow::registry::{examples, relative_phase_field, verify_example};
use serde_json::{json, Value as Json};

use crate::error::{CliError, CliResult};
use crate::input::{floats, pins, ranges, state, Loaded};
use crate::{Output, Probing, Source};

fn point_json(p: &Point) -> Json {
    Json::Object(p.iter().map(|(s, v)| (s.to_string(), Json::String(v.to_string()))).collect())
}

fn merge(mut base: Json, extra: Json) -> Json {
    if let (Json::Object(b), Json::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<Json> {
    serde_json::to_value(v).map_err(|e| CliError::Input(e.to_string()))
}

pub fn check_nilpotent(src: &Source, at: Option<&str>, zero_tol: f64) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let ef = l.expr_field()?;
    let x = l.point(at)?;
    let mut full = l.params.clone();
    full.extend(&x);
    let j = jacobian_expr(&ef, &full)?;
    let report = spectrum_classify(&j, zero_tol);
    let residual = ef.evaluate(&full)?;
    let is_eq = residual.iter().all(|v| v.as_exact().is_some_and(|q| *q == netblow::poly::q(0)));
    let rows: Vec<Vec<Json>> = j.rows().iter().map(|r| r.iter().map(q_to_json).collect()).collect();
    let out = merge(
        to_json(&report)?,
        json!({
            "variables": ef.variables,
            "jacobian": rows,
            "point": point_json(&x),
            "params": point_json(&l.params),
            "is_equilibrium": is_eq,
        }),
    );
    Ok((Output::Json(out), l.digest))
}

pub struct BlowupOpts<'a> {
    pub chart: &'a str,
    pub weights: &'a str,
    pub desing: bool,
    pub divide: Option<i32>,
    pub restrict: Option<&'a str>,
    pub at: Option<&'a str>,
    pub taylor: u32,
    pub symbolic: bool,
}

/// Parses a chart, giving the distinguished symbol weight one when the
/// weight string leaves it out.
fn parse_chart(spec: &str, weights: &str, params: &[Symbol]) -> CliResult<BlowupChart> {
    let given = parse_weights(weights)?;
    let mut w = weights.to_string();
    if let Some(d) = spec.split(':').nth(1).filter(|_| !spec.starts_with("polar")) {
        if !given.contains_key(&Symbol::new(d.trim())) {
            if !w.trim().is_empty() {
                w.push(',');
            }
            w.push_str(&format!("{}=1", d.trim()));
        }
    }
    Ok(BlowupChart::parse(spec, &w, params)?)
}

pub fn blowup(src: &Source, o: &BlowupOpts) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let ef = l.expr_field()?;
    // an example's own chart brings its weights unless overridden
    let listed = l
        .example
        .as_ref()
        .and_then(|e| e.charts.iter().find(|c| c.spec == o.chart.trim()))
        .map(|c| c.weights);
    let weights = match listed {
        Some(w) if o.weights.trim().is_empty() => w,
        _ => o.weights,
    };
    let mut chart = parse_chart(o.chart, weights, &ef.parameters)?;
    if matches!(chart.kind, ChartKind::Polar { .. }) {
        return Err(CliError::Input("use the polar command for polar charts".into()));
    }
    let keep: Vec<Symbol> = chart.parameter_weights.keys().cloned().collect();
    let at = l.point(o.at)?;
    let vf = l.polynomial_at(&at, &keep, o.taylor, o.symbolic)?;
    for v in &vf.variables {
        if chart.weight(v).is_none() {
            chart.state_weights.insert(v.clone(), 1);
        }
    }
    let lifted = lift_weighted(&vf, &chart)?;
    let raw = directional_blowup(&lifted, &chart)?;
    let cf = match (o.divide, o.desing) {
        (Some(k), _) => divide(&raw, k)?,
        (None, true) => desingularize(&raw)?,
        (None, false) => raw,
    };
    let mut out = json!({ "chart_field": to_json(&cf)?, "shifted_to": point_json(&at) });
    if let Some(text) = o.restrict {
        let rf = restrict(&cf, &pins(text)?)?;
        out["restricted"] = to_json(&rf)?;
    }
    Ok((Output::Json(out), l.digest))
}

pub fn structure(src: &Source, spec: &str, at: Option<&str>) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let ef = l.expr_field()?;
    let mut chart = parse_chart(spec, "", &ef.parameters)?;
    let ChartKind::Node { symbol } = chart.kind.clone() else {
        return Err(CliError::Input("structure reports need a node chart".into()));
    };
    let x = l.point(at)?;
    let vf = l.polynomial_at(&x, &[], 2, false)?;
    if !vf.parameters.is_empty() {
        let names: Vec<String> = vf.parameters.iter().map(|s| s.to_string()).collect();
        return Err(CliError::Input(format!("unbound parameters: {}", names.join(", "))));
    }
    for v in &vf.variables {
        chart.state_weights.insert(v.clone(), 1);
    }
    let decomp = linearize(&l.system, &x, &l.params)?;
    let node = l
        .system
        .nodes
        .iter()
        .position(|s| *s == symbol)
        .ok_or_else(|| CliError::Input(format!("{symbol} is not a node")))?;
    let cf = netblow::blowup::blowup(&vf, &chart)?;
    let r0 = restrict(&cf, &[(chart.radial.clone(), netblow::poly::q(0))].into())?;
    let report = structure_report(&r0, &decomp, node, chart.sign)?;
    let out = json!({ "chart": chart.to_string(), "report": to_json(&report)? });
    Ok((
        if report.matches {
            Output::Json(out)
        } else {
            Output::Failed(out)
        },
        l.digest,
    ))
}

fn polar_field(l: &Loaded, k: i32, param_weights: &str, at: Option<&str>) -> CliResult<TrigField> {
    let weights = parse_weights(param_weights)?;
    let keep: Vec<Symbol> = weights.keys().cloned().collect();
    let x = l.point(at)?;
    let vf = l.polynomial_at(&x, &keep, 2, false)?;
    Ok(polar_blowup_2d(&vf, &weights, k)?)
}

pub fn polar(src: &Source, k: i32, param_weights: &str, at: Option<&str>) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let tf = polar_field(&l, k, param_weights, at)?;
    Ok((Output::Json(json!({ "trig_field": to_json(&tf)? })), l.digest))
}

pub fn circle(
    src: &Source,
    k: i32,
    param_weights: &str,
    bar_params: &str,
    grid: usize,
    tol: f64,
    at: Option<&str>,
) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let tf = polar_field(&l, k, param_weights, at)?;
    let bars = floats(&Point::parse(bar_params)?);
    let eqs = circle_equilibria(&tf, &bars, grid, tol)?;
    Ok((
        Output::Json(json!({ "trig_field": to_json(&tf)?, "equilibria": to_json(&eqs)? })),
        l.digest,
    ))
}

pub fn equilibria(src: &Source, bounds: &str, grid: usize, tol: f64) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let ef = l.expr_field()?;
    let nf = NumericField::from_expr(&ef, &floats(&l.params))?;
    let given = ranges(bounds)?;
    let b = ef
        .variables
        .iter()
        .map(|v| {
            given
                .iter()
                .find(|(s, ..)| s == v)
                .map(|(_, lo, hi, _)| (*lo, *hi))
                .ok_or_else(|| CliError::Input(format!("no range given for {v}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut search = find_equilibria(&nf, &b, grid, tol)?;
    if !ef.has_trig() {
        if let Some(p) = l.params.exact() {
            let vf = ef.to_polynomial_field()?;
            let p: BTreeMap<_, _> = p.into_iter().filter(|(s, _)| vf.parameters.contains(s)).collect();
            verify_exact(&vf.bind_parameters(&p), &BTreeMap::new(), &mut search)?;
        }
    }
    let mut classes = Vec::new();
    for e in &search.equilibria {
        let x: Point = match &e.exact {
            Some(qs) => ef.variables.iter().cloned().zip(qs.iter().map(|q| Value::Exact(q.clone()))).collect(),
            None => ef.variables.iter().cloned().zip(e.x.iter().map(|v| Value::Float(*v))).collect(),
        };
        let rep = classify_equilibrium(&ef, &x, &l.params, 1e-9)?;
        classes.push(rep.spectrum.class);
    }
    let out = merge(to_json(&search)?, json!({ "classes": classes }));
    Ok((Output::Json(out), l.digest))
}

pub fn classify(src: &Source, at: Option<&str>, zero_tol: f64) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let ef = l.expr_field()?;
    let x = l.point(at)?;
    let x: Point = x.iter().filter(|(s, _)| ef.variables.contains(s)).map(|(s, v)| (s.clone(), v.clone())).collect();
    let rep = classify_equilibrium(&ef, &x, &l.params, zero_tol)?;
    Ok((Output::Json(to_json(&rep)?), l.digest))
}

pub fn simulate(src: &Source, x0: &str, t_end: f64, out: Option<&Path>) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let ef = l.expr_field()?;
    let nf = NumericField::from_expr(&ef, &floats(&l.params))?;
    let x0 = state(&ef.variables, &Point::parse(x0)?)?;
    let tr = integrate(&nf, &x0, t_end, &IntegrateOptions::default())?;
    let mut report = json!({
        "variables": ef.variables,
        "initial": x0,
        "final_state": tr.last(),
        "final_time": tr.final_time(),
        "termination": tr.termination,
        "steps": tr.times.len() - 1,
    });
    if let Some(dir) = out {
        let manifest = write_bundle(dir, &ef.variables, &[tr], t_end, json!({ "params": point_json(&l.params) }))?;
        report["manifest"] = json!(manifest);
    }
    Ok((Output::Json(report), l.digest))
}

pub fn probe(src: &Source, at: Option<&str>, p: &Probing, anchor: Option<&str>) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let mut ef = l.expr_field()?;
    if let Some(a) = anchor {
        ef = relative_phase_field(&ef, &l.system.nodes, &Symbol::new(a))?;
    }
    let nf = NumericField::from_expr(&ef, &floats(&l.params))?;
    let x = state(&ef.variables, &l.point(at)?)?;
    let opts = ProbeOptions {
        radius: p.radius,
        samples: p.samples,
        seed: p.seed,
        t_end: p.t_end,
        ..ProbeOptions::default()
    };
    let v = stability_probe(&nf, &x, &opts)?;
    let out = merge(to_json(&v)?, json!({ "variables": ef.variables, "center": x }));
    Ok((Output::Json(out), l.digest))
}

pub fn sweep(src: &Source, grid: &str, t_end: f64, out: &Path) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    let ef = l.expr_field()?;
    if ef.dim() != 2 {
        return Err(CliError::Input("sweep needs a planar system".into()));
    }
    let given = ranges(grid)?;
    let axis = |v: &Symbol| {
        given
            .iter()
            .find(|(s, ..)| s == v)
            .map(|(_, lo, hi, n)| ((*lo, *hi), n.unwrap_or(11)))
            .ok_or_else(|| CliError::Input(format!("no grid given for {v}")))
    };
    let (xr, nx) = axis(&ef.variables[0])?;
    let (yr, ny) = axis(&ef.variables[1])?;
    let nf = NumericField::from_expr(&ef, &floats(&l.params))?;
    let starts = lattice(xr, yr, nx, ny);
    let trs = sweep_portrait(&nf, &starts, t_end, &IntegrateOptions::default())?;
    let manifest = write_bundle(out, &ef.variables, &trs, t_end, json!({ "params": point_json(&l.params) }))?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in &trs {
        *counts.entry(to_json(&t.termination)?.as_str().unwrap_or("?").to_string()).or_default() += 1;
    }
    Ok((
        Output::Json(json!({ "trajectories": trs.len(), "terminations": counts, "manifest": manifest })),
        l.digest,
    ))
}

pub fn verify(id: &str, seed: u64) -> CliResult<Output> {
    let rep = verify_example(id, seed)?;
    let v = to_json(&rep)?;
    Ok(if rep.passed { Output::Json(v) } else { Output::Failed(v) })
}

pub fn list_examples() -> Output {
    let list: Vec<Json> = examples()
        .iter()
        .map(|e| {
            let ns = (e.build)().ok();
            json!({
                "id": e.id,
                "summary": e.summary,
                "notes": e.notes,
                "nodes": ns.as_ref().map(|n| n.nodes.clone()),
                "params": ns.as_ref().map(|n| n.params.clone()),
                "default_params": point_json(&(e.default_params)()),
                "equilibrium": point_json(&(e.equilibrium)()),
                "charts": e.charts.iter().map(|c| json!({ "spec": c.spec, "weights": c.weights })).collect::<Vec<_>>(),
            })
        })
        .collect();
    Output::Json(json!({ "count": list.len(), "examples": list }))
}

pub fn emit(src: &Source) -> CliResult<(Output, String)> {
    let l = Loaded::load(&src.system, src.params.as_deref())?;
    Ok((Output::Text(emit_system(&l.system)), l.digest))
}
