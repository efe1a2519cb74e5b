//! Reading graphs and writing flow results.
//!
//! Graph JSON: `{"vertices": [..], "edges": [{"id", "u", "v", "length"}, ..]}`
//! where vertex labels may be strings or integers and `id` is optional.
//! Edge-list text: one `u v length [id]` per line, `#` starts a comment.
//! Floats are written with 17 significant digits so they round-trip exactly.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::flow::{FlowTrace, TerminalState};
use crate::graph::{EdgeRecord, VertexId, WeightedGraph};

fn label(v: &Value, what: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        other => Err(Error::Parse(format!("{what} must be a string or integer, got {other}"))),
    }
}

fn checked_length(x: f64, edge: &str) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::NonpositiveLength {
            edge: edge.to_string(),
            length: x,
        })
    }
}

/// Parse graph JSON. Vertices may be omitted, in which case they are taken
/// from the edges in order of first appearance.
pub fn parse_graph_json(text: &str) -> Result<WeightedGraph> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    graph_from_value(&doc)
}

pub fn graph_from_value(doc: &Value) -> Result<WeightedGraph> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Parse("graph JSON must be an object".into()))?;
    let raw_edges = obj
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("graph JSON needs an \"edges\" array".into()))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (i, e) in raw_edges.iter().enumerate() {
        let id = match e.get("id") {
            Some(v) => label(v, "edge id")?,
            None => format!("e{i}"),
        };
        let field = |k: &str| e.get(k).ok_or_else(|| Error::Parse(format!("edge {id} lacks \"{k}\"")));
        let u = label(field("u")?, "vertex")?;
        let v = label(field("v")?, "vertex")?;
        let length = field("length")?
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("edge {id} length must be a number")))?;
        let length = checked_length(length, &id)?;
        edges.push(EdgeRecord::new(id, u, v, length));
    }
    let vertices: Vec<VertexId> = match obj.get("vertices") {
        Some(Value::Array(vs)) => vs
            .iter()
            .map(|v| label(v, "vertex").map(VertexId))
            .collect::<Result<_>>()?,
        Some(_) => return Err(Error::Parse("\"vertices\" must be an array".into())),
        None => {
            let mut seen: Vec<VertexId> = Vec::new();
            for e in &edges {
                for x in [&e.u, &e.v] {
                    if !seen.contains(x) {
                        seen.push(x.clone());
                    }
                }
            }
            seen
        }
    };
    WeightedGraph::new(vertices, edges)
}

pub fn graph_to_value(g: &WeightedGraph) -> Value {
    json!({
        "vertices": g.vertices(),
        "edges": g.edges().iter().map(|e| json!({
            "id": e.id,
            "u": e.u,
            "v": e.v,
            "length": e.length,
        })).collect::<Vec<_>>(),
    })
}

pub fn graph_to_json(g: &WeightedGraph) -> String {
    serde_json::to_string_pretty(&graph_to_value(g)).expect("graph values serialize")
}

/// Parse whitespace-separated `u v length [id]` lines.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut vertices: Vec<VertexId> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(Error::Parse(format!(
                "line {}: expected `u v length [id]`, got {} fields",
                lineno + 1,
                fields.len()
            )));
        }
        let id = fields.get(3).map_or_else(|| format!("e{}", edges.len()), |s| s.to_string());
        let length: f64 = fields[2]
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad length {:?}", lineno + 1, fields[2])))?;
        let length = checked_length(length, &id)?;
        for x in &fields[..2] {
            if !vertices.iter().any(|v| v.as_str() == *x) {
                vertices.push((*x).into());
            }
        }
        edges.push(EdgeRecord::new(id, fields[0], fields[1], length));
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    WeightedGraph::new(vertices, edges)
}

/// Parse either format: JSON if the first non-blank character is `{`.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    if text.trim_start().starts_with('{') {
        parse_graph_json(text)
    } else {
        parse_edge_list(text)
    }
}

/// C `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside `1e-4 ≤ |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `t,edge_id,length,curvature`, one row per edge per sample, edges in id order.
pub fn trace_csv(trace: &FlowTrace) -> String {
    let mut out = String::from("t,edge_id,length,curvature\n");
    for s in &trace.samples {
        let mut order: Vec<usize> = (0..s.edges.len()).collect();
        order.sort_by(|&a, &b| s.edges[a].cmp(&s.edges[b]));
        for i in order {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_g17(s.t),
                s.edges[i],
                format_g17(s.lengths[i]),
                format_g17(s.curvatures[i])
            );
        }
    }
    out
}

/// Surgery events as `[{"t", "contracted_edges", "vertex_map"}]`.
pub fn events_value(trace: &FlowTrace) -> Value {
    Value::Array(
        trace
            .events
            .iter()
            .map(|ev| {
                let map: Map<String, Value> = ev
                    .contraction
                    .vertex_map
                    .iter()
                    .map(|(k, v)| (k.0.clone(), Value::String(v.0.clone())))
                    .collect();
                json!({
                    "t": ev.t,
                    "contracted_edges": ev.contracted_edges,
                    "vertex_map": map,
                })
            })
            .collect(),
    )
}

/// `{"terminal_time", "terminal_state", "stop_reason", "surgeries"}`;
/// the state is `"point"` or a graph object.
pub fn terminal_summary(trace: &FlowTrace) -> Value {
    let state = match &trace.terminal {
        TerminalState::Point(_) => Value::String("point".into()),
        TerminalState::Graph(g) => graph_to_value(g),
    };
    json!({
        "terminal_time": trace.terminal_time,
        "terminal_state": state,
        "stop_reason": trace.stop_reason,
        "surgeries": trace.events.len(),
    })
}
