//! Minor containment, canonical forms and partial 2-tree recognition for
//! small graphs.
//!
//! The minor search explores contractions of the host. A graph `h` is a minor
//! of `g` exactly when some contraction of `g` (every vertex kept, connected
//! classes merged) contains `h` as a subgraph, so each search state is tested
//! with a subgraph-monomorphism check and only contractions are branched on.
//! Failed states are memoized by canonical form.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// Limits for the exact minor search. The search refuses hosts above the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorSearchCap {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for MinorSearchCap {
    fn default() -> Self {
        MinorSearchCap {
            max_vertices: 10,
            max_edges: 20,
        }
    }
}

/// Branch sets of the host graph, one per minor vertex, and for each minor
/// edge a host edge joining the two branch sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub branch_sets: Vec<Vec<usize>>,
    #[serde(with = "crate::graph::edge_map")]
    pub edge_map: BTreeMap<Edge, Edge>,
}

impl MinorWitness {
    /// Checks the witness against `host` and `minor`, returning the first
    /// violated condition.
    pub fn validate(&self, host: &Graph, minor: &Graph) -> std::result::Result<(), String> {
        if self.branch_sets.len() != minor.vertex_count() {
            return Err(format!(
                "{} branch sets for a minor on {} vertices",
                self.branch_sets.len(),
                minor.vertex_count()
            ));
        }
        let mut owner = vec![usize::MAX; host.vertex_count()];
        for (i, set) in self.branch_sets.iter().enumerate() {
            if set.is_empty() {
                return Err(format!("branch set {i} is empty"));
            }
            for &v in set {
                if v >= host.vertex_count() {
                    return Err(format!("branch set {i} names vertex {v} outside the host"));
                }
                if owner[v] != usize::MAX {
                    return Err(format!("vertex {v} lies in two branch sets"));
                }
                owner[v] = i;
            }
            let sub = host.induced(set);
            if !sub.is_connected() {
                return Err(format!("branch set {i} is not connected"));
            }
        }
        for e in minor.edges() {
            let Some(&(x, y)) = self.edge_map.get(&e) else {
                return Err(format!("minor edge {e:?} is unmapped"));
            };
            if !host.has_edge(x, y) {
                return Err(format!("mapped edge ({x}, {y}) is not a host edge"));
            }
            let ok = (owner[x] == e.0 && owner[y] == e.1) || (owner[x] == e.1 && owner[y] == e.0);
            if !ok {
                return Err(format!("host edge ({x}, {y}) does not join branch sets of {e:?}"));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Canonical forms

/// Isomorphism-invariant key for graphs with at most 11 vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub n: usize,
    pub bits: u64,
}

/// Upper bound on the number of vertex orderings tried per canonical form.
pub const CANONICAL_BUDGET: u64 = 362_880;

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Vertex classes ordered by an invariant label (degree, then the sorted
/// degrees of the neighbours). Orderings that respect the classes are the only
/// ones examined by the canonical form.
fn vertex_classes(adj: &[u64]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let mut labelled: Vec<((u32, Vec<u32>), usize)> = (0..n)
        .map(|v| {
            let mut nd: Vec<u32> = (0..n)
                .filter(|&w| adj[v] >> w & 1 == 1)
                .map(|w| deg[w])
                .collect();
            nd.sort_unstable_by(|a, b| b.cmp(a));
            ((deg[v], nd), v)
        })
        .collect();
    labelled.sort_by(|a, b| b.0.cmp(&a.0));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<&(u32, Vec<u32>)> = None;
    for (label, v) in &labelled {
        if last == Some(label) {
            classes.last_mut().unwrap().push(*v);
        } else {
            classes.push(vec![*v]);
        }
        last = Some(label);
    }
    classes
}

/// Canonical form of an adjacency-bitmask graph plus the ordering that attains
/// it (`order[i]` is the vertex placed at position `i`). Returns `None` when
/// `n > 11` or the class structure exceeds `budget` orderings.
pub fn canonical_bits(adj: &[u64], budget: u64) -> Option<(CanonicalForm, Vec<usize>)> {
    let n = adj.len();
    if n > 11 {
        return None;
    }
    let classes = vertex_classes(adj);
    let cost: u64 = classes
        .iter()
        .map(|c| factorial(c.len()))
        .try_fold(1u64, |acc, f| acc.checked_mul(f))?;
    if cost > budget {
        return None;
    }
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let class_of_pos: Vec<usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| c.iter().map(move |_| ci))
        .collect();
    fn encode(adj: &[u64], order: &[usize]) -> u64 {
        let mut bits = 0u64;
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                bits = (bits << 1) | (adj[order[i]] >> order[j] & 1);
            }
        }
        bits
    }
    fn rec(
        adj: &[u64],
        classes: &[Vec<usize>],
        class_of_pos: &[usize],
        order: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut Option<(u64, Vec<usize>)>,
    ) {
        let pos = order.len();
        if pos == adj.len() {
            let bits = encode(adj, order);
            if best.as_ref().is_none_or(|(b, _)| bits > *b) {
                *best = Some((bits, order.clone()));
            }
            return;
        }
        for &v in &classes[class_of_pos[pos]] {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(adj, classes, class_of_pos, order, used, best);
                order.pop();
                used[v] = false;
            }
        }
    }
    rec(adj, &classes, &class_of_pos, &mut order, &mut used, &mut best);
    let (bits, order) = best.unwrap_or((0, Vec::new()));
    Some((CanonicalForm { n, bits }, order))
}

pub fn canonical_form(g: &Graph) -> Option<CanonicalForm> {
    canonical_bits(&g.adjacency_bits(), CANONICAL_BUDGET).map(|(c, _)| c)
}

/// Relabels `g` into its canonical vertex order.
pub fn canonical_graph(g: &Graph) -> Option<(CanonicalForm, Graph)> {
    let (form, order) = canonical_bits(&g.adjacency_bits(), CANONICAL_BUDGET)?;
    let mut perm = vec![0; order.len()];
    for (pos, &v) in order.iter().enumerate() {
        perm[v] = pos;
    }
    Some((form, g.relabel(&perm)))
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    let mut dg = g.degrees();
    let mut dh = h.degrees();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return false;
    }
    match (canonical_form(g), canonical_form(h)) {
        (Some(a), Some(b)) => a == b,
        _ => find_monomorphism(&h.adjacency_bits(), &g.adjacency_bits()).is_some(),
    }
}

/// All graphs on `n` vertices up to isomorphism, in canonical labelling,
/// ordered by edge count. Practical for `n <= 7`.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let empty = Graph::empty(n);
    let mut level = vec![canonical_graph(&empty).expect("small graph").1];
    let mut out = level.clone();
    for _ in 0..n * n.saturating_sub(1) / 2 {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for (u, v) in g.non_edges() {
                let h = g.with_edge(u, v).expect("valid pair");
                let (form, canon) = canonical_graph(&h).expect("small graph");
                if seen.insert(form) {
                    next.push(canon);
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

pub fn all_connected_graphs(n: usize) -> Vec<Graph> {
    all_graphs(n).into_iter().filter(|g| g.is_connected()).collect()
}

// ---------------------------------------------------------------------------
// Subgraph monomorphism and minor search

/// Injective map from the vertices of `pattern` into `target` that sends
/// edges to edges, if one exists.
pub(crate) fn find_monomorphism(pattern: &[u64], target: &[u64]) -> Option<Vec<usize>> {
    let pn = pattern.len();
    let tn = target.len();
    if pn > tn {
        return None;
    }
    let pdeg: Vec<u32> = pattern.iter().map(|a| a.count_ones()).collect();
    let tdeg: Vec<u32> = target.iter().map(|a| a.count_ones()).collect();
    // Place high-degree pattern vertices first, preferring ones adjacent to
    // vertices already placed.
    let mut order: Vec<usize> = Vec::with_capacity(pn);
    let mut placed = 0u64;
    while order.len() < pn {
        let next = (0..pn)
            .filter(|&v| placed >> v & 1 == 0)
            .max_by_key(|&v| ((pattern[v] & placed).count_ones(), pdeg[v], std::cmp::Reverse(v)))
            .unwrap();
        order.push(next);
        placed |= 1 << next;
    }
    let mut map = vec![usize::MAX; pn];
    fn rec(
        k: usize,
        order: &[usize],
        pattern: &[u64],
        target: &[u64],
        pdeg: &[u32],
        tdeg: &[u32],
        map: &mut [usize],
        used: u64,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        for t in 0..target.len() {
            if used >> t & 1 == 1 || tdeg[t] < pdeg[v] {
                continue;
            }
            let consistent = order[..k]
                .iter()
                .all(|&w| pattern[v] >> w & 1 == 0 || target[t] >> map[w] & 1 == 1);
            if !consistent {
                continue;
            }
            map[v] = t;
            if rec(k + 1, order, pattern, target, pdeg, tdeg, map, used | 1 << t) {
                return true;
            }
        }
        map[v] = usize::MAX;
        false
    }
    rec(0, &order, pattern, target, &pdeg, &tdeg, &mut map, 0).then_some(map)
}

fn bits_edge_count(adj: &[u64]) -> usize {
    adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
}

/// Merges state vertex `b` into `a` (a < b) and removes `b`.
fn contract_bits(adj: &[u64], a: usize, b: usize) -> Vec<u64> {
    debug_assert!(a < b);
    let squeeze = |mask: u64| -> u64 {
        let low = mask & ((1u64 << b) - 1);
        let high = if b + 1 < 64 { mask >> (b + 1) } else { 0 };
        low | (high << b)
    };
    let mut out = Vec::with_capacity(adj.len() - 1);
    for (v, &row) in adj.iter().enumerate() {
        if v == b {
            continue;
        }
        let mut row = row;
        if v == a {
            row |= adj[b];
        }
        if row >> b & 1 == 1 {
            row |= 1 << a;
        }
        row &= !(1u64 << b);
        row &= !(1u64 << v);
        out.push(squeeze(row));
    }
    out
}

struct MinorSearch<'a> {
    pattern: Vec<u64>,
    pattern_edges: usize,
    host: &'a Graph,
    failed: HashSet<CanonicalForm>,
}

impl MinorSearch<'_> {
    fn search(&mut self, adj: &[u64], branch: &[u64]) -> Option<MinorWitness> {
        if let Some(map) = find_monomorphism(&self.pattern, adj) {
            return Some(self.witness(&map, branch));
        }
        let n = adj.len();
        if n == self.pattern.len() {
            return None;
        }
        for a in 0..n {
            for b in a + 1..n {
                if adj[a] >> b & 1 == 0 {
                    continue;
                }
                let next = contract_bits(adj, a, b);
                if bits_edge_count(&next) < self.pattern_edges {
                    continue;
                }
                let key = canonical_bits(&next, 40_320).map(|(c, _)| c);
                if let Some(k) = key {
                    if self.failed.contains(&k) {
                        continue;
                    }
                }
                let mut next_branch: Vec<u64> = branch.to_vec();
                next_branch[a] |= next_branch[b];
                next_branch.remove(b);
                if let Some(w) = self.search(&next, &next_branch) {
                    return Some(w);
                }
                if let Some(k) = key {
                    self.failed.insert(k);
                }
            }
        }
        None
    }

    fn witness(&self, map: &[usize], branch: &[u64]) -> MinorWitness {
        let sets: Vec<u64> = map.iter().map(|&t| branch[t]).collect();
        let branch_sets: Vec<Vec<usize>> = sets
            .iter()
            .map(|&m| (0..64).filter(|&v| m >> v & 1 == 1).collect())
            .collect();
        let mut edge_map = BTreeMap::new();
        for x in 0..self.pattern.len() {
            for y in x + 1..self.pattern.len() {
                if self.pattern[x] >> y & 1 == 0 {
                    continue;
                }
                let host_edge = self
                    .host
                    .edges()
                    .find(|&(u, v)| {
                        (sets[x] >> u & 1 == 1 && sets[y] >> v & 1 == 1)
                            || (sets[x] >> v & 1 == 1 && sets[y] >> u & 1 == 1)
                    })
                    .expect("contracted adjacency comes from a host edge");
                edge_map.insert((x, y), host_edge);
            }
        }
        MinorWitness {
            branch_sets,
            edge_map,
        }
    }
}

/// Exact minor test with the default size cap.
pub fn has_minor(g: &Graph, h: &Graph) -> Result<Option<MinorWitness>> {
    has_minor_capped(g, h, MinorSearchCap::default())
}

pub fn has_minor_capped(g: &Graph, h: &Graph, cap: MinorSearchCap) -> Result<Option<MinorWitness>> {
    if g.vertex_count() > cap.max_vertices || g.edge_count() > cap.max_edges {
        return Err(Error::SizeCapExceeded(format!(
            "minor search host has {} vertices and {} edges (cap {} / {})",
            g.vertex_count(),
            g.edge_count(),
            cap.max_vertices,
            cap.max_edges
        )));
    }
    if h.vertex_count() > g.vertex_count() || h.edge_count() > g.edge_count() {
        return Ok(None);
    }
    let adj = g.adjacency_bits();
    let branch: Vec<u64> = (0..g.vertex_count()).map(|v| 1u64 << v).collect();
    let mut search = MinorSearch {
        pattern: h.adjacency_bits(),
        pattern_edges: h.edge_count(),
        host: g,
        failed: HashSet::new(),
    };
    Ok(search.search(&adj, &branch))
}

// ---------------------------------------------------------------------------
// Partial 2-trees

/// One elimination step: `vertex` was removed while it had `neighbors`; a
/// degree-2 removal adds the edge between its two neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub vertex: usize,
    pub neighbors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoTreeCheck {
    pub is_partial_two_tree: bool,
    /// Elimination order; complete when the check succeeds, otherwise it
    /// stops at the first stuck state.
    pub trace: Vec<ReductionStep>,
}

/// Series-parallel reduction: repeatedly remove a vertex of degree at most
/// two, joining the neighbours of a degree-2 vertex. The graph is a partial
/// 2-tree (no K_4 minor) iff this empties it.
pub fn is_partial_two_tree(g: &Graph) -> TwoTreeCheck {
    let n = g.vertex_count();
    let mut adj: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n];
    for (a, b) in g.edges() {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut trace = Vec::with_capacity(n);
    while remaining > 0 {
        let Some(v) = (0..n).find(|&v| alive[v] && adj[v].len() <= 2) else {
            return TwoTreeCheck {
                is_partial_two_tree: false,
                trace,
            };
        };
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for &w in &nbrs {
            adj[w].remove(&v);
        }
        if let [a, b] = nbrs[..] {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj[v].clear();
        alive[v] = false;
        remaining -= 1;
        trace.push(ReductionStep {
            vertex: v,
            neighbors: nbrs,
        });
    }
    TwoTreeCheck {
        is_partial_two_tree: true,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::presets::*;

    fn minor(g: &Graph, h: &Graph) -> Option<MinorWitness> {
        let w = has_minor(g, h).unwrap();
        if let Some(w) = &w {
            w.validate(g, h).unwrap();
        }
        w
    }

    #[test]
    fn graph_counts_match_known_sequence() {
        // Unlabelled graphs on n vertices: 1, 2, 4, 11, 34, 156, 1044.
        let counts: Vec<usize> = (1..=6).map(|n| all_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34, 156]);
        let connected: Vec<usize> = (1..=6).map(|n| all_connected_graphs(n).len()).collect();
        assert_eq!(connected, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn canonical_form_is_label_invariant() {
        let g = banana();
        let perm = [4, 2, 0, 3, 1];
        assert_eq!(canonical_form(&g), canonical_form(&g.relabel(&perm)));
        assert_ne!(canonical_form(&banana()), canonical_form(&k5_minus_two_at_vertex()));
        assert!(is_isomorphic(&w4(), &k5().delete_edge((0, 1)).unwrap().delete_edge((2, 3)).unwrap()));
    }

    #[test]
    fn banana_has_k4_minor() {
        assert!(minor(&banana(), &k4()).is_some());
    }

    #[test]
    fn identity_witness_for_k4() {
        let w = minor(&k4(), &k4()).unwrap();
        assert!(w.branch_sets.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn two_trees_lack_k4_minor() {
        // 2-tree on 6 vertices built by attaching triangles to edges.
        let mut g = triangle();
        let attach = [(0, 1), (1, 3), (0, 2)];
        for (k, &(a, b)) in attach.iter().enumerate() {
            let v = 3 + k;
            let mut h = Graph::empty(v + 1);
            for e in g.edges() {
                h.insert_edge(e.0, e.1).unwrap();
            }
            h.insert_edge(a, v).unwrap();
            h.insert_edge(b, v).unwrap();
            g = h;
        }
        assert!(minor(&g, &k4()).is_none());
        assert!(is_partial_two_tree(&g).is_partial_two_tree);
    }

    #[test]
    fn partial_two_tree_examples() {
        assert!(is_partial_two_tree(&triangle()).is_partial_two_tree);
        assert!(!is_partial_two_tree(&k4()).is_partial_two_tree);
        assert!(is_partial_two_tree(&cycle(4)).is_partial_two_tree);
        assert!(minor(&cycle(4), &k4()).is_none());
        let check = is_partial_two_tree(&cycle(5));
        assert_eq!(check.trace.len(), 5);
    }

    #[test]
    fn forbidden_minor_relations() {
        assert!(minor(&k5(), &banana()).is_some());
        assert!(minor(&banana(), &w4()).is_some());
        assert!(minor(&w4(), &banana()).is_none());
        assert!(minor(&k33(), &w4()).is_some());
        assert!(minor(&banana(), &k5()).is_none());
        assert!(minor(&banana(), &octahedron()).is_none());
        assert!(minor(&octahedron(), &k5()).is_none());
        assert!(minor(&k33(), &k5()).is_none());
        assert!(minor(&complete(6), &k33()).is_some());
    }

    #[test]
    fn size_cap_refuses() {
        let g = complete(11);
        assert!(matches!(has_minor(&g, &k4()), Err(Error::SizeCapExceeded(_))));
        let cap = MinorSearchCap {
            max_vertices: 12,
            max_edges: 60,
        };
        assert!(has_minor_capped(&g, &k4(), cap).unwrap().is_some());
    }

    #[test]
    fn petersen_like_host_under_cap() {
        // 10-vertex cubic graph (prism over C_5) has a K_4 minor but no K_5.
        let mut g = Graph::empty(10);
        for i in 0..5 {
            g.insert_edge(i, (i + 1) % 5).unwrap();
            g.insert_edge(5 + i, 5 + (i + 1) % 5).unwrap();
            g.insert_edge(i, 5 + i).unwrap();
        }
        assert!(minor(&g, &k4()).is_some());
        assert!(minor(&g, &k5()).is_none());
    }

    #[test]
    fn partial_two_tree_agrees_with_minor_search() {
        for n in 1..=6 {
            for g in all_connected_graphs(n) {
                assert_eq!(
                    is_partial_two_tree(&g).is_partial_two_tree,
                    minor(&g, &k4()).is_none(),
                    "{g:?}"
                );
            }
        }
    }
}
