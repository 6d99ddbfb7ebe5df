use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Symbol;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ChartKind {
    Node { symbol: Symbol },
    Parameter { symbol: Symbol },
    Edge { symbol: Symbol },
    Polar { x: Symbol, y: Symbol },
}

/// Directional (or polar) chart with its quasihomogeneous weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupChart {
    pub kind: ChartKind,
    pub sign: i8,
    pub radial: Symbol,
    pub state_weights: BTreeMap<Symbol, u32>,
    pub parameter_weights: BTreeMap<Symbol, u32>,
}

impl BlowupChart {
    fn with_kind(kind: ChartKind, sign: i8) -> Self {
        BlowupChart {
            kind,
            sign,
            radial: Symbol::new("r"),
            state_weights: BTreeMap::new(),
            parameter_weights: BTreeMap::new(),
        }
    }

    pub fn node(symbol: &str, sign: i8) -> Self {
        Self::with_kind(ChartKind::Node { symbol: symbol.into() }, sign)
    }

    pub fn parameter(symbol: &str, sign: i8) -> Self {
        Self::with_kind(ChartKind::Parameter { symbol: symbol.into() }, sign)
    }

    pub fn edge(symbol: &str, sign: i8) -> Self {
        Self::with_kind(ChartKind::Edge { symbol: symbol.into() }, sign)
    }

    pub fn polar(x: &str, y: &str) -> Self {
        Self::with_kind(ChartKind::Polar { x: x.into(), y: y.into() }, 1)
    }

    pub fn state(mut self, names: &[&str], weight: u32) -> Self {
        for n in names {
            self.state_weights.insert(Symbol::new(n), weight);
        }
        self
    }

    pub fn params(mut self, names: &[&str], weight: u32) -> Self {
        for n in names {
            self.parameter_weights.insert(Symbol::new(n), weight);
        }
        self
    }

    pub fn radial_symbol(mut self, r: &str) -> Self {
        self.radial = Symbol::new(r);
        self
    }

    /// Distinguished symbol (the x-axis for polar charts).
    pub fn distinguished(&self) -> &Symbol {
        match &self.kind {
            ChartKind::Node { symbol } | ChartKind::Parameter { symbol } | ChartKind::Edge { symbol } => {
                symbol
            }
            ChartKind::Polar { x, .. } => x,
        }
    }

    pub fn weight(&self, s: &Symbol) -> Option<u32> {
        self.state_weights
            .get(s)
            .or_else(|| self.parameter_weights.get(s))
            .copied()
    }

    /// Symbols with a positive weight.
    pub fn weighted(&self) -> Vec<Symbol> {
        self.state_weights
            .iter()
            .chain(&self.parameter_weights)
            .filter(|(_, w)| **w > 0)
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::Chart(format!("sign must be ±1, got {}", self.sign)));
        }
        if let Some((s, _)) = self.state_weights.iter().find(|(_, w)| **w == 0) {
            return Err(Error::Chart(format!("state weight of {s} must be positive")));
        }
        if !matches!(self.kind, ChartKind::Polar { .. }) {
            match self.weight(self.distinguished()) {
                Some(w) if w > 0 => {}
                _ => {
                    return Err(Error::Chart(format!(
                        "distinguished symbol {} needs a positive weight",
                        self.distinguished()
                    )))
                }
            }
        }
        Ok(())
    }

    /// Warnings for node charts whose state weights are not all equal.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if matches!(self.kind, ChartKind::Node { .. }) {
            let mut ws = self.state_weights.values();
            if let Some(first) = ws.next() {
                if ws.any(|w| w != first) {
                    out.push(
                        "non-uniform state weights: the network structure is only preserved \
                         at r = 0 when all node weights agree"
                            .to_string(),
                    );
                }
            }
        }
        out
    }

    /// Parses `node:x1:+`, `param:eps:-`, `edge:w12:+` or `polar:x,y`.
    /// Weights given in `weights` go to `parameter_weights` when the symbol
    /// is listed in `parameters`, else to `state_weights`.
    pub fn parse(spec: &str, weights: &str, parameters: &[Symbol]) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let sign = |s: &str| match s {
            "+" => Ok(1),
            "-" => Ok(-1),
            other => Err(Error::Chart(format!("sign must be + or -, got {other:?}"))),
        };
        let mut chart = match parts.as_slice() {
            ["node", s, sg] => Self::node(s, sign(sg)?),
            ["param", s, sg] => Self::parameter(s, sign(sg)?),
            ["edge", s, sg] => Self::edge(s, sign(sg)?),
            ["polar", xy] => {
                let (x, y) = xy
                    .split_once(',')
                    .ok_or_else(|| Error::Chart("polar chart needs polar:<x>,<y>".into()))?;
                Self::polar(x.trim(), y.trim())
            }
            _ => return Err(Error::Chart(format!("unrecognised chart spec {spec:?}"))),
        };
        for (s, w) in parse_weights(weights)? {
            if parameters.contains(&s) {
                chart.parameter_weights.insert(s, w);
            } else {
                chart.state_weights.insert(s, w);
            }
        }
        chart.validate()?;
        Ok(chart)
    }
}

/// `x1=1,x2=1,eps=2`.
pub fn parse_weights(text: &str) -> Result<BTreeMap<Symbol, u32>> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Chart(format!("weight {item:?} is not name=value")))?;
        let w: u32 = v
            .trim()
            .parse()
            .map_err(|_| Error::Chart(format!("weight {v:?} is not a nonnegative integer")))?;
        out.insert(Symbol::new(k.trim()), w);
    }
    Ok(out)
}

impl fmt::Display for BlowupChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sg = if self.sign < 0 { "-" } else { "+" };
        match &self.kind {
            ChartKind::Node { symbol } => write!(f, "node:{symbol}:{sg}"),
            ChartKind::Parameter { symbol } => write!(f, "param:{symbol}:{sg}"),
            ChartKind::Edge { symbol } => write!(f, "edge:{symbol}:{sg}"),
            ChartKind::Polar { x, y } => write!(f, "polar:{x},{y}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        let c = BlowupChart::parse("node:x1:-", "x1=1,x2=1,eps=2", &[Symbol::new("eps")]).unwrap();
        assert_eq!(c.sign, -1);
        assert_eq!(c.weight(&"eps".into()), Some(2));
        assert_eq!(c.parameter_weights.len(), 1);
        assert_eq!(c.to_string(), "node:x1:-");
        let p = BlowupChart::parse("polar:x,y", "", &[]).unwrap();
        assert_eq!(p.to_string(), "polar:x,y");
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(BlowupChart::parse("node:x1:*", "x1=1", &[]).is_err());
        assert!(BlowupChart::parse("node:x1:+", "x2=1", &[]).is_err());
        assert!(BlowupChart::parse("node:x1:+", "x1=0", &[]).is_err());
        assert!(BlowupChart::parse("sphere", "", &[]).is_err());
        assert!(parse_weights("x=1.5").is_err());
    }

    #[test]
    fn non_uniform_node_weights_warn() {
        let c = BlowupChart::node("x", 1).state(&["x"], 1).state(&["y"], 2);
        assert_eq!(c.warnings().len(), 1);
        let c = BlowupChart::node("x", 1).state(&["x", "y"], 1);
        assert!(c.warnings().is_empty());
    }
}
