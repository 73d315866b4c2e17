//! Exact planar realization under l_1 and l_∞.
//!
//! Work happens in l_∞ coordinates (l_1 inputs are rotated first). An l_∞
//! edge constraint `max(|Δx|, |Δy|) = δ` holds iff, for some axis and sign,
//! the signed difference on that axis equals δ and the other difference lies
//! in `[-δ, δ]`. Once every edge has an (axis, sign) choice, the constraints
//! split into two independent systems of difference constraints, one per
//! axis, which are feasible iff their constraint graphs have no negative
//! cycle. The search assigns edges one at a time and keeps the all-pairs
//! shortest-path closure of both systems, pruning as soon as a cycle turns
//! negative. Arithmetic is exact: lengths are brought to a common
//! denominator and handled as integers.

use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{relative_residual, RealizeConfig, RealizeResult, RealizeStatus, SolverMode};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::lp::{to_f64, to_rational, Rational};
use crate::metrics::{Framework, Linkage, NormParam};

/// Axis (0 or 1) and sign chosen for each edge, in `graph.edges()` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarCase {
    pub choices: Vec<(usize, bool)>,
}

/// Shortest-path closure of a system `x_j - x_i <= w[i][j]`.
#[derive(Clone)]
struct Closure<T> {
    n: usize,
    w: Vec<Option<T>>,
}

impl<T> Closure<T>
where
    T: Clone + Ord + Zero + for<'a> Add<&'a T, Output = T>,
{
    fn new(n: usize) -> Self {
        let mut w = vec![None; n * n];
        for i in 0..n {
            w[i * n + i] = Some(T::zero());
        }
        Closure { n, w }
    }

    /// Adds `x_to - x_from <= c`. Returns false if this closes a negative cycle.
    fn add(&mut self, from: usize, to: usize, c: &T) -> bool {
        let n = self.n;
        if let Some(back) = &self.w[to * n + from] {
            if back.clone() + c < T::zero() {
                return false;
            }
        }
        if matches!(&self.w[from * n + to], Some(cur) if cur <= c) {
            return true;
        }
        let into_from: Vec<Option<T>> = (0..n).map(|i| self.w[i * n + from].clone()).collect();
        let out_of_to: Vec<Option<T>> = (0..n).map(|j| self.w[to * n + j].clone()).collect();
        for (i, a) in into_from.iter().enumerate() {
            let Some(a) = a else { continue };
            let head = a.clone() + c;
            for (j, b) in out_of_to.iter().enumerate() {
                let Some(b) = b else { continue };
                let cand = head.clone() + b;
                let slot = &mut self.w[i * n + j];
                if slot.as_ref().is_none_or(|cur| cand < *cur) {
                    *slot = Some(cand);
                }
            }
        }
        true
    }

    /// A solution: the shortest distance from a virtual source joined to every
    /// vertex with weight zero.
    fn potentials(&self) -> Vec<T> {
        (0..self.n)
            .map(|j| {
                (0..self.n)
                    .filter_map(|i| self.w[i * self.n + j].clone())
                    .min()
                    .expect("diagonal is always present")
            })
            .collect()
    }
}

struct Search<'a, T> {
    /// Edges in search order with their original index and scaled length.
    edges: &'a [(Edge, usize, T)],
    choices: Vec<(usize, bool)>,
    nodes: usize,
    order: Option<ChaCha8Rng>,
}

const ALL_CASES: [(usize, bool); 4] = [(0, true), (0, false), (1, true), (1, false)];

impl<T> Search<'_, T>
where
    T: Clone + Ord + Zero + std::ops::Neg<Output = T> + for<'a> Add<&'a T, Output = T>,
{
    fn run(&mut self, k: usize, axes: &[Closure<T>; 2]) -> Option<[Closure<T>; 2]> {
        if k == self.edges.len() {
            return Some(axes.clone());
        }
        let ((u, v), _, ref len) = self.edges[k];
        let mut cases: Vec<(usize, bool)> = if k == 0 {
            // Axis swaps and reflections are l_∞ isometries.
            vec![(0, true)]
        } else {
            ALL_CASES.to_vec()
        };
        if let Some(rng) = self.order.as_mut() {
            cases.shuffle(rng);
        }
        let neg = -len.clone();
        for (axis, positive) in cases {
            self.nodes += 1;
            let mut next = axes.clone();
            let (signed, flipped) = if positive { (len, &neg) } else { (&neg, len) };
            // x_u - x_v = ±δ on the attaining axis, |x_u - x_v| <= δ on the other.
            let ok = next[axis].add(v, u, signed)
                && next[axis].add(u, v, flipped)
                && next[1 - axis].add(v, u, len)
                && next[1 - axis].add(u, v, len);
            if !ok {
                continue;
            }
            self.choices.push((axis, positive));
            if let Some(found) = self.run(k + 1, &next) {
                return Some(found);
            }
            self.choices.pop();
        }
        None
    }
}

/// Orders edges so each one touches a vertex already reached, which lets the
/// closure prune early.
fn search_order(g: &Graph) -> Vec<(Edge, usize)> {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&v| std::cmp::Reverse(adj[v].len()));
    for s in starts {
        if rank[s] != usize::MAX {
            continue;
        }
        rank[s] = next;
        next += 1;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let mut nbrs = adj[v].clone();
            nbrs.sort_by_key(|&w| std::cmp::Reverse(adj[w].len()));
            for w in nbrs {
                if rank[w] == usize::MAX {
                    rank[w] = next;
                    next += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut edges: Vec<(Edge, usize)> = g.edges().enumerate().map(|(i, e)| (e, i)).collect();
    edges.sort_by_key(|&((u, v), _)| (rank[u].max(rank[v]), rank[u].min(rank[v])));
    edges
}

/// Lengths over a common denominator: returns the integer numerators and the
/// denominator.
fn common_denominator(lengths: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let denom = lengths
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let nums = lengths
        .iter()
        .map(|q| q.numer() * (&denom / q.denom()))
        .collect();
    (nums, denom)
}

enum Outcome {
    Found(Vec<Vec<Rational>>),
    Exhausted,
}

fn run_search(
    g: &Graph,
    lengths: &[Rational],
    order_seed: Option<u64>,
) -> (Outcome, usize) {
    let n = g.vertex_count();
    let order = search_order(g);
    let (nums, denom) = common_denominator(lengths);
    let bound: BigInt = nums.iter().map(|x| x.abs()).sum::<BigInt>() * 4 + 1;
    let rng = order_seed.map(ChaCha8Rng::seed_from_u64);
    // Path sums never exceed the total length, so i128 suffices when the
    // scaled total is small.
    if bound.bits() < 120 {
        let edges: Vec<(Edge, usize, i128)> = order
            .iter()
            .map(|&(e, i)| (e, i, nums[i].to_i128().expect("bounded")))
            .collect();
        finish(n, &edges, &denom, rng, |x: &i128| BigInt::from(*x))
    } else {
        let edges: Vec<(Edge, usize, BigInt)> =
            order.iter().map(|&(e, i)| (e, i, nums[i].clone())).collect();
        finish(n, &edges, &denom, rng, |x: &BigInt| x.clone())
    }
}

fn finish<T>(
    n: usize,
    edges: &[(Edge, usize, T)],
    denom: &BigInt,
    order: Option<ChaCha8Rng>,
    widen: impl Fn(&T) -> BigInt,
) -> (Outcome, usize)
where
    T: Clone + Ord + Zero + std::ops::Neg<Output = T> + for<'a> Add<&'a T, Output = T>,
{
    let mut search = Search {
        edges,
        choices: Vec::with_capacity(edges.len()),
        nodes: 0,
        order,
    };
    let start = [Closure::new(n), Closure::new(n)];
    match search.run(0, &start) {
        Some([cx, cy]) => {
            let px = cx.potentials();
            let py = cy.potentials();
            let points = (0..n)
                .map(|v| {
                    vec![
                        Rational::new(widen(&px[v]), denom.clone()),
                        Rational::new(widen(&py[v]), denom.clone()),
                    ]
                })
                .collect();
            (Outcome::Found(points), search.nodes)
        }
        None => (Outcome::Exhausted, search.nodes),
    }
}

fn l1_from_linf(points: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let two = Rational::from_integer(BigInt::from(2));
    points
        .into_iter()
        .map(|q| vec![(&q[0] + &q[1]) / &two, (&q[0] - &q[1]) / &two])
        .collect()
}

/// Exact planar realization for `p ∈ {1, ∞}`.
pub fn realize_exact_planar_polyhedral(
    l: &Linkage,
    p: NormParam,
    cfg: &RealizeConfig,
) -> Result<RealizeResult> {
    realize_exact_ordered(l, p, cfg, None)
}

/// As [`realize_exact_planar_polyhedral`], but tries the cases of each edge in
/// a seeded random order so repeated calls land on different witnesses.
pub(crate) fn realize_exact_ordered(
    l: &Linkage,
    p: NormParam,
    cfg: &RealizeConfig,
    order_seed: Option<u64>,
) -> Result<RealizeResult> {
    if !p.is_polyhedral() {
        return Err(Error::Unsupported(format!(
            "exact planar solver handles l_1 and l_inf, not l_{p}"
        )));
    }
    let m = l.graph().edge_count();
    if m > cfg.exact_mode_cap {
        return Err(Error::SizeCapExceeded(format!(
            "{m} edges exceed the exact planar cap of {}",
            cfg.exact_mode_cap
        )));
    }
    let lengths: Vec<Rational> = l.lengths().values().map(|&x| to_rational(x)).collect();
    let (outcome, nodes) = run_search(l.graph(), &lengths, order_seed);
    Ok(match outcome {
        Outcome::Found(points) => {
            let points = if p == NormParam::P(1) {
                l1_from_linf(points)
            } else {
                points
            };
            exact_result(l, p, points, nodes)
        }
        Outcome::Exhausted => RealizeResult {
            status: RealizeStatus::InfeasibleExact,
            mode: SolverMode::ExactPlanar,
            framework: None,
            residual: f64::INFINITY,
            certificate: nodes,
            exact_points: None,
        },
    })
}

pub(crate) fn exact_result(
    l: &Linkage,
    p: NormParam,
    points: Vec<Vec<Rational>>,
    nodes: usize,
) -> RealizeResult {
    let float_points: Vec<Vec<f64>> = points
        .iter()
        .map(|q| q.iter().map(to_f64).collect())
        .collect();
    let dim = float_points.first().map_or(2, |q| q.len());
    let framework = Framework::new(l.graph().clone(), float_points, dim, p)
        .expect("witness matches the linkage graph");
    let max_err = framework
        .edge_lengths()
        .iter()
        .map(|(e, &x)| (x - l.lengths()[e]).abs())
        .fold(0.0, f64::max);
    RealizeResult {
        status: RealizeStatus::Feasible,
        mode: SolverMode::ExactPlanar,
        framework: Some(framework),
        residual: relative_residual(max_err, l),
        certificate: nodes,
        exact_points: Some(points),
    }
}

/// Solves a single fully specified case in l_∞ coordinates, returning exact
/// points (in l_∞ coordinates) if the case is feasible.
pub fn solve_planar_case(l: &Linkage, case: &PlanarCase) -> Option<Vec<Vec<Rational>>> {
    let n = l.graph().vertex_count();
    let lengths: Vec<Rational> = l.lengths().values().map(|&x| to_rational(x)).collect();
    let (nums, denom) = common_denominator(&lengths);
    let mut axes = [Closure::<BigInt>::new(n), Closure::<BigInt>::new(n)];
    for (((u, v), len), &(axis, positive)) in l.graph().edges().zip(&nums).zip(&case.choices) {
        let signed = if positive { len.clone() } else { -len.clone() };
        let ok = axes[axis].add(v, u, &signed)
            && axes[axis].add(u, v, &-signed.clone())
            && axes[1 - axis].add(v, u, len)
            && axes[1 - axis].add(u, v, len);
        if !ok {
            return None;
        }
    }
    let px = axes[0].potentials();
    let py = axes[1].potentials();
    Some(
        (0..n)
            .map(|v| {
                vec![
                    Rational::new(px[v].clone(), denom.clone()),
                    Rational::new(py[v].clone(), denom.clone()),
                ]
            })
            .collect(),
    )
}
