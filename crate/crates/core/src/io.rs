//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! graph <n>
//! exponents <p> <q> <gamma> <alpha>      (optional)
//! v <id> <mu> [<a> <b> <f> <g>]
//! e <id1> <id2> <weight>
//! ```
//!
//! Vertex ids are arbitrary tokens; vertices are numbered in order of
//! appearance. Vertex lines carry either the measure alone or the measure and
//! all four coefficients, uniformly across the file. Each `e` line is one
//! undirected edge.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::WeightedGraph;
use crate::spaces::{CoefficientFields, Exponents};

#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub graph: WeightedGraph,
    /// Present when the vertex lines carry coefficients.
    pub fields: Option<CoefficientFields>,
    pub exponents: Option<Exponents>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(tok: &str, line: usize, what: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("{what} `{tok}` is not a number")))
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut declared: Option<usize> = None;
    let mut exponents = None;
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut measure = Vec::new();
    let mut coeffs: Vec<[f64; 4]> = Vec::new();
    let mut columns: Option<usize> = None;
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "graph" => {
                if declared.is_some() {
                    return Err(parse_err(line, "duplicate `graph` header"));
                }
                if toks.len() != 2 {
                    return Err(parse_err(line, "expected `graph <n>`"));
                }
                let n = toks[1]
                    .parse::<usize>()
                    .map_err(|_| parse_err(line, format!("vertex count `{}` is not a nonnegative integer", toks[1])))?;
                declared = Some(n);
            }
            _ if declared.is_none() => return Err(parse_err(line, "expected `graph <n>` header first")),
            "exponents" => {
                if toks.len() != 5 {
                    return Err(parse_err(line, "expected `exponents <p> <q> <gamma> <alpha>`"));
                }
                let v: Vec<f64> = toks[1..]
                    .iter()
                    .map(|t| number(t, line, "exponent"))
                    .collect::<Result<_>>()?;
                let e = Exponents::new(v[0], v[1], v[2], v[3]).map_err(|err| parse_err(line, err.to_string()))?;
                exponents = Some(e);
            }
            "v" => {
                let cols = toks.len() - 2;
                if cols != 1 && cols != 5 {
                    return Err(parse_err(
                        line,
                        "expected `v <id> <mu>` or `v <id> <mu> <a> <b> <f> <g>`",
                    ));
                }
                match columns {
                    None => columns = Some(cols),
                    Some(c) if c != cols => {
                        return Err(parse_err(line, "vertex lines mix graph-only and full-instance columns"))
                    }
                    _ => {}
                }
                let name = toks[1].to_string();
                if index.contains_key(&name) {
                    return Err(parse_err(line, format!("vertex `{name}` declared twice")));
                }
                if names.len() == declared.unwrap() {
                    return Err(parse_err(
                        line,
                        format!("more vertices than the declared {}", declared.unwrap()),
                    ));
                }
                measure.push(number(toks[2], line, "measure")?);
                if cols == 5 {
                    let mut c = [0.0; 4];
                    for (k, slot) in c.iter_mut().enumerate() {
                        *slot = number(toks[3 + k], line, "coefficient")?;
                    }
                    coeffs.push(c);
                }
                index.insert(name.clone(), names.len());
                names.push(name);
            }
            "e" => {
                if toks.len() != 4 {
                    return Err(parse_err(line, "expected `e <id1> <id2> <weight>`"));
                }
                let lookup = |t: &str| {
                    index
                        .get(t)
                        .copied()
                        .ok_or_else(|| parse_err(line, format!("unknown vertex `{t}`")))
                };
                edges.push((lookup(toks[1])?, lookup(toks[2])?, number(toks[3], line, "weight")?));
            }
            other => return Err(parse_err(line, format!("unknown record `{other}`"))),
        }
    }

    let n = declared.ok_or_else(|| parse_err(text.lines().count().max(1), "missing `graph <n>` header"))?;
    if names.len() != n {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("declared {n} vertices but found {}", names.len()),
        ));
    }
    let graph = WeightedGraph::from_edges(measure, &edges).with_names(names);
    let fields = if columns == Some(5) {
        let col = |k: usize| GraphFunction::new(coeffs.iter().map(|c| c[k]).collect());
        Some(CoefficientFields::new(col(0), col(1), col(2), col(3))?)
    } else {
        None
    };
    Ok(InstanceFile {
        graph,
        fields,
        exponents,
    })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<InstanceFile> {
    parse_instance(&std::fs::read_to_string(path)?)
}

/// Serializes so that [`parse_instance`] reproduces every value bit for bit.
pub fn write_instance(
    graph: &WeightedGraph,
    fields: Option<&CoefficientFields>,
    exponents: Option<&Exponents>,
) -> String {
    let mut out = String::new();
    let n = graph.vertex_count();
    writeln!(out, "graph {n}").unwrap();
    if let Some(e) = exponents {
        writeln!(out, "exponents {} {} {} {}", e.p, e.q, e.gamma, e.alpha).unwrap();
    }
    for x in 0..n {
        write!(out, "v {} {}", graph.name(x), graph.mu(x)).unwrap();
        if let Some(f) = fields {
            write!(out, " {} {} {} {}", f.a()[x], f.b()[x], f.f()[x], f.g()[x]).unwrap();
        }
        out.push('\n');
    }
    for (x, y, w) in graph.edges() {
        writeln!(out, "e {} {} {}", graph.name(x), graph.name(y), w).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_only() {
        let f = parse_instance("# two vertices\ngraph 2\nv a 1\nv b 1\ne a b 2\n").unwrap();
        assert!(f.fields.is_none());
        assert_eq!(f.graph.weight(1, 0), Some(2.0));
        assert_eq!(f.graph.name(1), "b");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("graph 2\nv a 1\nv b x\n", 3),
            ("graph 1\nv a 1 1 1 1\n", 2),
            ("v a 1\n", 1),
            ("graph 2\nv a 1\nv b 1\ne a c 1\n", 4),
            ("graph 2\nv a 1\nv b 1 1 1 1 1\n", 3),
            ("graph 2\nv a 1\nz\n", 3),
        ];
        for (text, expected) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip_exact() {
        let g = WeightedGraph::from_edges(vec![0.1, 1.0 / 3.0, 7.0], &[(0, 1, 0.7), (1, 2, 1e-3)]);
        let fields = CoefficientFields::new(
            GraphFunction::new(vec![0.3, 1.0 / 7.0, 2.0]),
            GraphFunction::new(vec![1.0, 1.0, 1.0]),
            GraphFunction::new(vec![0.1, 0.2, std::f64::consts::PI]),
            GraphFunction::new(vec![1.0, 0.0, 0.5]),
        )
        .unwrap();
        let e = Exponents::new(3.0, 2.0, 0.5, 3.0).unwrap();
        let text = write_instance(&g, Some(&fields), Some(&e));
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.graph.measure(), g.measure());
        assert_eq!(back.graph.edges(), g.edges());
        let bf = back.fields.unwrap();
        assert_eq!(bf.a(), fields.a());
        assert_eq!(bf.f(), fields.f());
        assert_eq!(bf.g(), fields.g());
        assert_eq!(back.exponents, Some(e));
    }
}
