//! Simple undirected graphs on vertices `0..n` and the elementary minor
//! operations (deletion, contraction) plus 2-sums.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unordered vertex pair, always stored with the smaller endpoint first.
pub type Edge = (usize, usize);

/// Normalizes a vertex pair so the smaller index comes first.
pub fn edge(u: usize, v: usize) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Serde adapter writing an edge-keyed map as a list of `[edge, value]`
/// pairs, since JSON object keys must be strings.
pub(crate) mod edge_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Edge;

    pub fn serialize<V: Serialize, S: Serializer>(
        map: &BTreeMap<Edge, V>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter())
    }

    pub fn deserialize<'de, V: Deserialize<'de>, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Edge, V>, D::Error> {
        Ok(Vec::<(Edge, V)>::deserialize(d)?.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<Edge>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds the edge `{u, v}`. Re-adding an existing edge is a no-op.
    pub fn insert_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::InvalidEdge(u, v, self.n));
        }
        Ok(self.edges.insert(edge(u, v)))
    }

    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.insert_edge(u, v)?;
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&edge(u, v))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Adjacency rows as bitmasks. Only valid for `n <= 64`.
    pub fn adjacency_bits(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bitmask adjacency needs n <= 64");
        let mut adj = vec![0u64; self.n];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    /// All pairs `u < v` that are not edges.
    pub fn non_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn delete_edge(&self, e: Edge) -> Result<Graph> {
        let e = edge(e.0, e.1);
        if !self.edges.contains(&e) {
            return Err(Error::MissingEdge(e));
        }
        let mut g = self.clone();
        g.edges.remove(&e);
        Ok(g)
    }

    /// Contracts `e`, merging its larger endpoint into the smaller one.
    /// Vertices above the removed endpoint shift down by one.
    pub fn contract_edge(&self, e: Edge) -> Result<Graph> {
        let e = edge(e.0, e.1);
        if !self.edges.contains(&e) {
            return Err(Error::MissingEdge(e));
        }
        Ok(self.merge_vertices(e.0, e.1).0)
    }

    /// Identifies `keep` and `gone` (no edge needed between them). Returns the
    /// merged graph and the old-to-new vertex map.
    pub(crate) fn merge_vertices(&self, keep: usize, gone: usize) -> (Graph, Vec<usize>) {
        debug_assert!(keep != gone);
        let map: Vec<usize> = (0..self.n)
            .map(|v| {
                let v = if v == gone { keep } else { v };
                if v > gone {
                    v - 1
                } else {
                    v
                }
            })
            .collect();
        let mut g = Graph::empty(self.n - 1);
        for &(a, b) in &self.edges {
            let (x, y) = (map[a], map[b]);
            if x != y {
                g.edges.insert(edge(x, y));
            }
        }
        (g, map)
    }

    /// Subgraph induced on `vertices`, relabelled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::empty(vertices.len());
        for &(a, b) in &self.edges {
            if index[a] != usize::MAX && index[b] != usize::MAX {
                g.edges.insert(edge(index[a], index[b]));
            }
        }
        g
    }

    /// Applies a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for &(a, b) in &self.edges {
            g.edges.insert(edge(perm[a], perm[b]));
        }
        g
    }

    /// Connected components as sorted vertex lists, ignoring `removed` vertices.
    pub fn components_without(&self, removed: &[usize]) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        for &r in removed {
            seen[r] = true;
        }
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_without(&[])
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.n
    }

    /// Vertices of degree at least one.
    pub fn non_isolated(&self) -> Vec<usize> {
        let deg = self.degrees();
        (0..self.n).filter(|&v| deg[v] > 0).collect()
    }

    /// Edge-identifying 2-sum. The first endpoint of `e1` is glued to the first
    /// endpoint of `e2` (as given, not normalized), the second to the second.
    /// Vertices of `g1` keep their labels; the remaining vertices of `g2`
    /// follow in increasing order.
    pub fn two_sum(g1: &Graph, e1: Edge, g2: &Graph, e2: Edge) -> Result<Graph> {
        if !g1.has_edge(e1.0, e1.1) {
            return Err(Error::MissingEdge(edge(e1.0, e1.1)));
        }
        if !g2.has_edge(e2.0, e2.1) {
            return Err(Error::MissingEdge(edge(e2.0, e2.1)));
        }
        let mut map = vec![0; g2.n];
        let mut next = g1.n;
        for (v, slot) in map.iter_mut().enumerate() {
            *slot = if v == e2.0 {
                e1.0
            } else if v == e2.1 {
                e1.1
            } else {
                next += 1;
                next - 1
            };
        }
        let mut g = Graph::empty(g1.n + g2.n - 2);
        g.edges = g1.edges.clone();
        for &(a, b) in &g2.edges {
            g.edges.insert(edge(map[a], map[b]));
        }
        Ok(g)
    }

    /// Unweighted BFS distance, `None` if disconnected.
    pub fn hop_distance(&self, s: usize, t: usize) -> Option<usize> {
        let adj = self.adjacency();
        let mut dist = vec![usize::MAX; self.n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                return Some(dist[v]);
            }
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Named graphs used throughout as forbidden-minor candidates and test inputs.
pub mod presets {
    use super::{edge, Graph};

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.edges.insert((u, v));
            }
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.edges.insert((v - 1, v));
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = path(n);
        if n >= 3 {
            g.edges.insert((0, n - 1));
        }
        g
    }

    pub fn triangle() -> Graph {
        complete(3)
    }

    pub fn k4() -> Graph {
        complete(4)
    }

    pub fn k5() -> Graph {
        complete(5)
    }

    /// K_5 minus the edge (3, 4). Vertices 3 and 4 have degree 3.
    pub fn banana() -> Graph {
        let mut g = complete(5);
        g.edges.remove(&(3, 4));
        g
    }

    /// K_5 minus the two edges (2, 4) and (3, 4) at vertex 4: a K_4 on
    /// `0..4` with vertex 4 joined to 0 and 1.
    pub fn k5_minus_two_at_vertex() -> Graph {
        let mut g = complete(5);
        g.edges.remove(&(2, 4));
        g.edges.remove(&(3, 4));
        g
    }

    /// Wheel with a `rim`-cycle on `0..rim` and hub `rim`. `wheel(4)` is W_4.
    pub fn wheel(rim: usize) -> Graph {
        let mut g = cycle(rim);
        g.n = rim + 1;
        for v in 0..rim {
            g.edges.insert(edge(v, rim));
        }
        g
    }

    pub fn w4() -> Graph {
        wheel(4)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut g = Graph::empty(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.edges.insert((u, v));
            }
        }
        g
    }

    pub fn k33() -> Graph {
        complete_bipartite(3, 3)
    }

    /// K_{2,2,2}: parts {0,1}, {2,3}, {4,5}.
    pub fn octahedron() -> Graph {
        let mut g = complete(6);
        for p in [(0, 1), (2, 3), (4, 5)] {
            g.edges.remove(&p);
        }
        g
    }

    /// Looks up a preset by its command-line name.
    pub fn by_name(name: &str) -> Option<Graph> {
        let key: String = name
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | '{' | '}' | ',' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        Some(match key.as_str() {
            "k3" | "triangle" => triangle(),
            "k4" => k4(),
            "k5" => k5(),
            "banana" | "k5e" | "k5minuse" => banana(),
            "w4" | "wheel" => w4(),
            "k33" => k33(),
            "k222" | "octahedron" => octahedron(),
            _ => return None,
        })
    }

    pub const NAMES: [&str; 7] = ["K3", "K4", "K5", "banana", "W4", "K33", "K222"];
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;

    #[test]
    fn contract_triangle_gives_k2() {
        let g = triangle().contract_edge((0, 1)).unwrap();
        assert_eq!(g, complete(2));
    }

    #[test]
    fn contract_any_k4_edge_gives_k3() {
        for e in k4().edges() {
            assert_eq!(k4().contract_edge(e).unwrap(), complete(3));
        }
    }

    #[test]
    fn contract_missing_edge_fails() {
        let g = path(3);
        assert_eq!(g.contract_edge((0, 2)), Err(Error::MissingEdge((0, 2))));
        assert_eq!(g.delete_edge((2, 0)), Err(Error::MissingEdge((0, 2))));
    }

    #[test]
    fn delete_edge_examples() {
        assert_eq!(k5().delete_edge((3, 4)).unwrap(), banana());
        let g = complete(2).delete_edge((0, 1)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 0));
        let g = k4().delete_edge((0, 2)).unwrap();
        assert_eq!(g.edge_count(), 5);
        let deg = g.degrees();
        assert_eq!(deg, vec![2, 3, 2, 3]);
    }

    #[test]
    fn contraction_never_adds_edges() {
        for g in [banana(), k5(), w4(), k33(), octahedron(), cycle(6)] {
            for e in g.edges() {
                let h = g.contract_edge(e).unwrap();
                assert_eq!(h.vertex_count(), g.vertex_count() - 1);
                assert!(h.edge_count() < g.edge_count());
            }
        }
    }

    #[test]
    fn two_sum_counts() {
        let g = Graph::two_sum(&triangle(), (0, 1), &triangle(), (0, 1)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 5));
        let g = Graph::two_sum(&k4(), (0, 1), &k4(), (2, 3)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 11));
        let g = Graph::two_sum(&triangle(), (1, 2), &k4(), (0, 3)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 8));
        assert!(Graph::two_sum(&path(3), (0, 2), &k4(), (0, 1)).is_err());
    }

    #[test]
    fn invalid_edges_rejected() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        let g = Graph::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn preset_shapes() {
        assert_eq!(w4().edge_count(), 8);
        assert_eq!(w4().degrees(), vec![3, 3, 3, 3, 4]);
        assert_eq!(k33().edge_count(), 9);
        assert_eq!(octahedron().edge_count(), 12);
        assert_eq!(k5_minus_two_at_vertex().edge_count(), 8);
        assert!(by_name("K_{2,2,2}").is_some());
        assert!(by_name("doublet").is_none());
    }

    #[test]
    fn components_and_forests() {
        let g = Graph::from_edges(5, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert!(g.is_forest());
        assert!(!cycle(4).is_forest());
        assert_eq!(cycle(6).hop_distance(0, 3), Some(3));
    }
}
