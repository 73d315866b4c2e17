//! l_p norms, pairwise distance vectors and the linkage / framework types.
//!
//! Distance vectors hold l_p^p values (the cone coordinates); linkages hold
//! plain l_p lengths. Conversions between the two are explicit. For `p = ∞`
//! both hold the un-exponentiated max-norm value.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, Graph};

/// Serialized as `"1"`, `"2"`, ..., `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum NormParam {
    P(u32),
    Inf,
}

impl NormParam {
    pub fn new(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::Config("norm exponent must be >= 1".into()));
        }
        Ok(NormParam::P(p))
    }

    pub fn is_euclidean(self) -> bool {
        self == NormParam::P(2)
    }

    /// Polyhedral norms (l_1, l_∞) whose unit balls have facets.
    pub fn is_polyhedral(self) -> bool {
        matches!(self, NormParam::P(1) | NormParam::Inf)
    }

    /// Converts an l_p length to its l_p^p value.
    pub fn raise(self, length: f64) -> f64 {
        match self {
            NormParam::P(p) => length.powi(p as i32),
            NormParam::Inf => length,
        }
    }

    /// Converts an l_p^p value back to an l_p length.
    pub fn root(self, value: f64) -> f64 {
        match self {
            NormParam::P(1) | NormParam::Inf => value,
            NormParam::P(2) => value.sqrt(),
            NormParam::P(p) => value.powf(1.0 / p as f64),
        }
    }
}

impl fmt::Display for NormParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormParam::P(p) => write!(f, "{p}"),
            NormParam::Inf => write!(f, "inf"),
        }
    }
}

impl From<NormParam> for String {
    fn from(p: NormParam) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for NormParam {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for NormParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "inf" | "infinity" | "∞") {
            return Ok(NormParam::Inf);
        }
        let p: u32 = t
            .parse()
            .map_err(|_| Error::Config(format!("bad norm `{s}`: expected a positive integer or inf")))?;
        NormParam::new(p)
    }
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(())
}

/// `||x - y||_p^p` (for `p = ∞`, the max-norm itself).
pub fn lp_p_distance(x: &[f64], y: &[f64], p: NormParam) -> Result<f64> {
    check_dims(x, y)?;
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    Ok(match p {
        NormParam::Inf => diffs.fold(0.0, f64::max),
        NormParam::P(1) => diffs.sum(),
        NormParam::P(p) => diffs.map(|d| d.powi(p as i32)).sum(),
    })
}

/// `||x - y||_p`.
pub fn lp_distance(x: &[f64], y: &[f64], p: NormParam) -> Result<f64> {
    Ok(p.root(lp_p_distance(x, y, p)?))
}

/// Position of pair `(i, j)`, `i < j`, in the order (0,1), (0,2), ..., (1,2), ...
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Pairs in distance-vector order.
pub fn pairs(n: usize) -> impl Iterator<Item = Edge> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceVector {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceVector {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if entries.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                found: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
            let e = pairs(n).nth(pos).unwrap();
            return Err(Error::InvalidLength {
                edge: e,
                length: entries[pos],
            });
        }
        Ok(DistanceVector { n, entries })
    }

    /// Pairwise l_p^p distances of `points`.
    pub fn from_points(points: &[Vec<f64>], p: NormParam) -> Result<Self> {
        let n = points.len();
        let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (i, j) in pairs(n) {
            entries.push(lp_p_distance(&points[i], &points[j], p)?);
        }
        Ok(DistanceVector { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[pair_index(self.n, i, j)]
    }

    /// Restriction to the edges of `g`, keyed by edge (l_p^p units).
    pub fn project_to_edges(&self, g: &Graph) -> Result<BTreeMap<Edge, f64>> {
        if g.vertex_count() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: g.vertex_count(),
            });
        }
        Ok(g.edges().map(|(u, v)| ((u, v), self.get(u, v))).collect())
    }

    /// Complete-graph linkage with lengths `entry^{1/p}`. Zero entries are
    /// kept, since coincident points are legitimate configurations.
    pub fn to_linkage(&self, p: NormParam) -> Linkage {
        let g = crate::graph::presets::complete(self.n);
        let lengths = pairs(self.n)
            .zip(&self.entries)
            .map(|(e, &x)| (e, p.root(x)))
            .collect();
        Linkage {
            graph: g,
            lengths,
        }
    }
}

/// Free-function form of [`DistanceVector::from_points`].
pub fn distance_vector(points: &[Vec<f64>], p: NormParam) -> Result<DistanceVector> {
    DistanceVector::from_points(points, p)
}

/// Free-function form of [`DistanceVector::project_to_edges`].
pub fn project_to_edges(dv: &DistanceVector, g: &Graph) -> Result<BTreeMap<Edge, f64>> {
    dv.project_to_edges(g)
}

/// `(x, y) -> (x + y, x - y)`. Maps 2-D l_1 distances onto l_∞ distances.
pub fn rotate_l1_to_linf(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    points
        .iter()
        .map(|q| match q[..] {
            [x, y] => Ok(vec![x + y, x - y]),
            _ => Err(Error::DimensionMismatch {
                expected: 2,
                found: q.len(),
            }),
        })
        .collect()
}

/// Inverse of [`rotate_l1_to_linf`]: maps l_∞ distances back onto l_1.
pub fn rotate_linf_to_l1(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    points
        .iter()
        .map(|q| match q[..] {
            [u, v] => Ok(vec![(u + v) / 2.0, (u - v) / 2.0]),
            _ => Err(Error::DimensionMismatch {
                expected: 2,
                found: q.len(),
            }),
        })
        .collect()
}

/// A graph with prescribed l_p edge lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linkage {
    graph: Graph,
    #[serde(with = "crate::graph::edge_map")]
    lengths: BTreeMap<Edge, f64>,
}

impl Linkage {
    /// Requires a strictly positive finite length on every edge.
    pub fn new(graph: Graph, lengths: BTreeMap<Edge, f64>) -> Result<Self> {
        Self::build(graph, lengths, false)
    }

    /// Like [`Linkage::new`] but admits zero lengths (coincident endpoints).
    /// Used for Cayley probes and complete-graph cone queries.
    pub fn new_degenerate(graph: Graph, lengths: BTreeMap<Edge, f64>) -> Result<Self> {
        Self::build(graph, lengths, true)
    }

    fn build(graph: Graph, lengths: BTreeMap<Edge, f64>, allow_zero: bool) -> Result<Self> {
        let lengths: BTreeMap<Edge, f64> =
            lengths.into_iter().map(|((u, v), l)| (edge(u, v), l)).collect();
        for e in graph.edges() {
            let Some(&l) = lengths.get(&e) else {
                return Err(Error::MissingLength(e));
            };
            let ok = l.is_finite() && (l > 0.0 || (allow_zero && l == 0.0));
            if !ok {
                return Err(Error::InvalidLength { edge: e, length: l });
            }
        }
        if let Some(&e) = lengths.keys().find(|e| !graph.has_edge(e.0, e.1)) {
            return Err(Error::MissingEdge(e));
        }
        Ok(Linkage { graph, lengths })
    }

    /// Same length on every edge.
    pub fn uniform(graph: Graph, length: f64) -> Result<Self> {
        let lengths = graph.edges().map(|e| (e, length)).collect();
        Self::new(graph, lengths)
    }

    /// Edge lengths of `points` under `p`.
    pub fn from_points(graph: Graph, points: &[Vec<f64>], p: NormParam) -> Result<Self> {
        let mut lengths = BTreeMap::new();
        for (u, v) in graph.edges() {
            lengths.insert((u, v), lp_distance(&points[u], &points[v], p)?);
        }
        Self::new_degenerate(graph, lengths)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn lengths(&self) -> &BTreeMap<Edge, f64> {
        &self.lengths
    }

    pub fn length(&self, u: usize, v: usize) -> Option<f64> {
        self.lengths.get(&edge(u, v)).copied()
    }

    /// Adds the non-edge `f` with length `t >= 0` (probe semantics).
    pub fn with_probe(&self, f: Edge, t: f64) -> Result<Linkage> {
        let f = edge(f.0, f.1);
        if self.graph.has_edge(f.0, f.1) {
            return Err(Error::NotANonEdge(f));
        }
        let mut graph = self.graph.clone();
        graph.insert_edge(f.0, f.1)?;
        let mut lengths = self.lengths.clone();
        lengths.insert(f, t);
        Linkage::new_degenerate(graph, lengths)
    }

    /// Multiplies every length by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Linkage {
        Linkage {
            graph: self.graph.clone(),
            lengths: self.lengths.iter().map(|(&e, &l)| (e, l * alpha)).collect(),
        }
    }

    /// Shortest-path length between `s` and `t` using edge lengths.
    pub fn path_length(&self, s: usize, t: usize) -> Option<f64> {
        let n = self.graph.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[s] = 0.0;
        let adj = self.graph.adjacency();
        for _ in 0..n {
            let Some(v) = (0..n)
                .filter(|&v| !done[v] && dist[v].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            else {
                break;
            };
            done[v] = true;
            for &w in &adj[v] {
                let nd = dist[v] + self.lengths[&edge(v, w)];
                if nd < dist[w] {
                    dist[w] = nd;
                }
            }
        }
        dist[t].is_finite().then_some(dist[t])
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.values().sum()
    }
}

/// A placement of a graph's vertices in R^d under a given norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Framework {
    graph: Graph,
    points: Vec<Vec<f64>>,
    dim: usize,
    norm: NormParam,
}

impl Framework {
    pub fn new(graph: Graph, points: Vec<Vec<f64>>, dim: usize, norm: NormParam) -> Result<Self> {
        if points.len() != graph.vertex_count() {
            return Err(Error::SizeMismatch {
                expected: graph.vertex_count(),
                found: points.len(),
            });
        }
        if let Some(q) = points.iter().find(|q| q.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: q.len(),
            });
        }
        Ok(Framework {
            graph,
            points,
            dim,
            norm,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> NormParam {
        self.norm
    }

    /// Realized l_p length of every edge.
    pub fn edge_lengths(&self) -> BTreeMap<Edge, f64> {
        self.graph
            .edges()
            .map(|(u, v)| {
                let d = lp_distance(&self.points[u], &self.points[v], self.norm)
                    .expect("framework points share a dimension");
                ((u, v), d)
            })
            .collect()
    }

    pub fn distance_vector(&self) -> DistanceVector {
        DistanceVector::from_points(&self.points, self.norm).expect("framework points share a dimension")
    }
}
