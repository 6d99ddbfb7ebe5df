//! Line-oriented text format for network systems.
//!
//! ```text
//! system diffusive2
//! nodes: x1 x2
//! params: a1 a2 w12 w21
//! slow: eps
//! internal x1 = a1*x1
//! couple x1 <- x2 : w12 * (x2 - x1)
//! adapt w12 = -w12 + x1*x2
//! ```
//!
//! `#` starts a comment. Header lines may appear anywhere.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::poly::Symbol;

use super::NetworkSystem;

fn line_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos: line,
        msg: format!("line {line}: {}", msg.into()),
    }
}

fn names(rest: &str, line: usize) -> Result<Vec<String>> {
    rest.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            if Symbol::is_valid_name(s) {
                Ok(s.to_string())
            } else {
                Err(line_err(line, format!("invalid symbol name {s:?}")))
            }
        })
        .collect()
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { pos, msg } => line_err(line, format!("column {pos}: {msg}")),
        other => line_err(line, other.to_string()),
    }
}

pub fn parse_system(text: &str) -> Result<NetworkSystem> {
    let mut name = String::from("system");
    let mut nodes = None;
    let mut params = Vec::new();
    let mut slow = None;
    let mut body = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix("system") {
            name = rest.trim().to_string();
        } else if let Some(rest) = l.strip_prefix("nodes:") {
            nodes = Some(names(rest, line)?);
        } else if let Some(rest) = l.strip_prefix("params:") {
            params.extend(names(rest, line)?);
        } else if let Some(rest) = l.strip_prefix("slow:") {
            let n = names(rest, line)?;
            if n.len() != 1 {
                return Err(line_err(line, "exactly one slow symbol"));
            }
            slow = n.into_iter().next();
        } else {
            body.push((line, l));
        }
    }
    let nodes = nodes.ok_or_else(|| line_err(0, "missing nodes: line"))?;
    let node_refs: Vec<&str> = nodes.iter().map(String::as_str).collect();
    let param_refs: Vec<&str> = params.iter().map(String::as_str).collect();
    let mut ns = NetworkSystem::new(&name, &node_refs, &param_refs);
    if let Some(eps) = slow {
        ns = ns.with_slow(&eps);
    }

    for (line, l) in body {
        if let Some(rest) = l.strip_prefix("internal ") {
            let (node, rhs) = rest
                .split_once('=')
                .ok_or_else(|| line_err(line, "expected internal <node> = <expr>"))?;
            ns.set_internal(node.trim(), rhs).map_err(|e| relocate(e, line))?;
        } else if let Some(rest) = l.strip_prefix("couple ") {
            let (edge, rhs) = rest
                .split_once(':')
                .ok_or_else(|| line_err(line, "expected couple <i> <- <j> : <w> * <h>"))?;
            let (target, source) = edge
                .split_once("<-")
                .ok_or_else(|| line_err(line, "expected <i> <- <j>"))?;
            let (w, h) = rhs.split_once('*').unwrap_or(("1", rhs));
            ns.add_coupling(target.trim(), source.trim(), w.trim(), h)
                .map_err(|e| relocate(e, line))?;
        } else if let Some(rest) = l.strip_prefix("adapt ") {
            let (w, rhs) = rest
                .split_once('=')
                .ok_or_else(|| line_err(line, "expected adapt <w> = <expr>"))?;
            ns.add_adaptation(w.trim(), rhs).map_err(|e| relocate(e, line))?;
        } else {
            return Err(line_err(line, format!("unrecognised line {l:?}")));
        }
    }
    ns.validate()?;
    Ok(ns)
}

pub fn emit_system(ns: &NetworkSystem) -> String {
    let mut out = String::new();
    let join = |v: &[Symbol]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "system {}", ns.name);
    let _ = writeln!(out, "nodes: {}", join(&ns.nodes));
    if !ns.params.is_empty() {
        let _ = writeln!(out, "params: {}", join(&ns.params));
    }
    if let Some(eps) = &ns.slow {
        let _ = writeln!(out, "slow: {eps}");
    }
    for (n, f) in ns.nodes.iter().zip(&ns.internal) {
        if *f != crate::poly::Expr::zero() {
            let _ = writeln!(out, "internal {n} = {f}");
        }
    }
    for it in &ns.interactions {
        let _ = writeln!(
            out,
            "couple {} <- {} : {} * ({})",
            it.target, it.source, it.weight, it.coupling
        );
    }
    for ad in &ns.adaptation {
        let _ = writeln!(out, "adapt {} = {}", ad.weight, ad.rule);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ADAPTIVE: &str = "\
system edge
nodes: x1 x2
params: a1 w12 # weights
slow: eps
internal x1 = a1*x1^2
couple x1 <- x2 : w12 * (x2 - x1)
couple x2 <- x1 : -1/2 * (x1 - x2)
adapt w12 = -w12 + x1*x2
";

    #[test]
    fn parses_and_round_trips() {
        let ns = parse_system(ADAPTIVE).unwrap();
        assert_eq!(ns.nodes.len(), 2);
        assert_eq!(ns.slow, Some(Symbol::new("eps")));
        assert_eq!(ns.interactions.len(), 2);
        let again = parse_system(&emit_system(&ns)).unwrap();
        assert_eq!(
            again.assemble_polynomial().unwrap(),
            ns.assemble_polynomial().unwrap()
        );
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_system("nodes: x\ninternal x = x +* 2\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_system("nodes: x\ninternal x = y\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn trig_couplings_round_trip() {
        let text = "nodes: p1 p2\nparams: alpha\ncouple p1 <- p2 : 1/2 * (-sin(p1 - p2 + alpha) + sin(alpha))\n";
        let ns = parse_system(text).unwrap();
        let emitted = emit_system(&ns);
        let again = parse_system(&emitted).unwrap();
        assert_eq!(again.interactions, ns.interactions, "{emitted}");
    }
}
