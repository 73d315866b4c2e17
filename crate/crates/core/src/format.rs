//! Plain-text graph, linkage, framework and distance-vector files.
//!
//! ```text
//! # comment
//! v 4              vertex count, before anything else
//! e 0 1 1.5        edge with optional length
//! p 0 0.0 0.5      coordinates of vertex 0
//! dv 3 1 1 4       distance vector on 3 points, values may wrap lines
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, Graph};
use crate::metrics::{DistanceVector, Framework, Linkage, NormParam};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
    pub lengths: BTreeMap<Edge, f64>,
    pub points: BTreeMap<usize, Vec<f64>>,
    pub distances: Option<DistanceVector>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad number `{tok}`")))
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut doc = Document::default();
        let mut seen_v = false;
        // (line of the `dv` header, n, values so far)
        let mut dv: Option<(usize, usize, Vec<f64>)> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            if let Some((_, n, values)) = dv.as_mut() {
                let want = *n * n.saturating_sub(1) / 2;
                if values.len() < want && toks[0].parse::<f64>().is_ok() {
                    for t in &toks {
                        values.push(number(t, line)?);
                    }
                    continue;
                }
            }
            let (known, count) = (seen_v, doc.vertex_count);
            let check_vertex = move |v: usize| {
                if !known {
                    Err(parse_err(line, "`v <n>` must come first"))
                } else if v >= count {
                    Err(parse_err(line, format!("vertex {v} out of range")))
                } else {
                    Ok(v)
                }
            };
            match toks[0] {
                "v" => {
                    if seen_v {
                        return Err(parse_err(line, "duplicate `v` line"));
                    }
                    if toks.len() != 2 {
                        return Err(parse_err(line, "expected `v <n>`"));
                    }
                    doc.vertex_count = number(toks[1], line)?;
                    seen_v = true;
                }
                "e" => {
                    if !(3..=4).contains(&toks.len()) {
                        return Err(parse_err(line, "expected `e <u> <w> [<length>]`"));
                    }
                    let u = check_vertex(number(toks[1], line)?)?;
                    let w = check_vertex(number(toks[2], line)?)?;
                    if u == w {
                        return Err(parse_err(line, "self-loop"));
                    }
                    let e = edge(u, w);
                    if doc.edges.contains(&e) {
                        return Err(parse_err(line, format!("duplicate edge {u} {w}")));
                    }
                    doc.edges.push(e);
                    if let Some(t) = toks.get(3) {
                        doc.lengths.insert(e, number(t, line)?);
                    }
                }
                "p" => {
                    if toks.len() < 2 {
                        return Err(parse_err(line, "expected `p <v> <coords..>`"));
                    }
                    let v = check_vertex(number(toks[1], line)?)?;
                    let coords = toks[2..]
                        .iter()
                        .map(|t| number(t, line))
                        .collect::<Result<Vec<f64>>>()?;
                    if doc.points.insert(v, coords).is_some() {
                        return Err(parse_err(line, format!("duplicate point {v}")));
                    }
                }
                "dv" => {
                    if dv.is_some() {
                        return Err(parse_err(line, "duplicate `dv` block"));
                    }
                    let n = number(toks.get(1).copied().unwrap_or(""), line)?;
                    let values = toks[2..]
                        .iter()
                        .map(|t| number(t, line))
                        .collect::<Result<Vec<f64>>>()?;
                    dv = Some((line, n, values));
                }
                other => return Err(parse_err(line, format!("unknown record `{other}`"))),
            }
        }
        if let Some((line, n, values)) = dv {
            doc.distances =
                Some(DistanceVector::new(n, values).map_err(|e| parse_err(line, e.to_string()))?);
            if !seen_v {
                doc.vertex_count = n;
                seen_v = true;
            }
        }
        if !seen_v {
            return Err(parse_err(text.lines().count().max(1), "missing `v <n>` line"));
        }
        Ok(doc)
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.vertex_count, self.edges.iter().copied())
            .expect("edges validated while parsing")
    }

    /// Every edge needs a length; zero lengths are rejected.
    pub fn linkage(&self) -> Result<Linkage> {
        Linkage::new(self.graph(), self.lengths.clone())
    }

    /// Dimension is taken from the points, which must cover every vertex.
    pub fn framework(&self, norm: NormParam) -> Result<Framework> {
        let points: Vec<Vec<f64>> = (0..self.vertex_count)
            .map(|v| self.points.get(&v).cloned().ok_or(Error::SizeMismatch {
                expected: self.vertex_count,
                found: self.points.len(),
            }))
            .collect::<Result<_>>()?;
        let dim = points.first().map_or(0, Vec::len);
        Framework::new(self.graph(), points, dim, norm)
    }
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("v {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        writeln!(s, "e {u} {v}").unwrap();
    }
    s
}

pub fn write_linkage(l: &Linkage) -> String {
    let mut s = format!("v {}\n", l.graph().vertex_count());
    for (&(u, v), len) in l.lengths() {
        writeln!(s, "e {u} {v} {len:?}").unwrap();
    }
    s
}

/// Linkage lines followed by one `p` line per vertex.
pub fn write_framework(f: &Framework, l: &Linkage) -> String {
    let mut s = write_linkage(l);
    for (v, q) in f.points().iter().enumerate() {
        write!(s, "p {v}").unwrap();
        for x in q {
            write!(s, " {x:?}").unwrap();
        }
        s.push('\n');
    }
    s
}
