//! Rigidity matrices under l_p norms, generic ranks and the rank of the
//! edge-length map.

use nalgebra::DMatrix;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::lp::Rational;
use crate::metrics::{Framework, NormParam};

/// Minimum `|Δ_i|` (l_1) or gap between the two largest `|Δ_i|` (l_∞) for a
/// framework to count as well-positioned.
pub const WELL_POSITIONED_TOL: f64 = 1e-9;
/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-8;
const FD_STEP: f64 = 1e-6;
/// Sampling margin for the finite-difference rank, so that no coordinate
/// difference changes sign within a step.
const FD_MARGIN: f64 = 1e-4;
const FD_STREAM_OFFSET: u64 = 1 << 32;
const EXACT_STREAM_OFFSET: u64 = 2 << 32;
const CLIMB_STEPS_PER_COORD: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityMatrix {
    pub edges: Vec<Edge>,
    pub dim: usize,
    pub vertex_count: usize,
    /// `|E|` rows of `d·n` entries; vertex `v` owns columns `v·d .. v·d + d`.
    pub entries: Vec<Vec<f64>>,
    pub framework: Framework,
}

impl RigidityMatrix {
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let cols = self.dim * self.vertex_count;
        DMatrix::from_fn(self.entries.len(), cols, |i, j| self.entries[i][j])
    }

    pub fn rank(&self) -> usize {
        numeric_rank(&self.to_matrix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RigidityClass {
    Independent,
    Isostatic,
    RigidDependent,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub max_possible: usize,
    pub classification: RigidityClass,
    pub samples_used: usize,
    /// Rank observed at each sample, in sample order.
    pub sample_ranks: Vec<usize>,
}

impl RankReport {
    /// Rows independent (covers both the independent and isostatic cases).
    pub fn is_independent(&self) -> bool {
        matches!(self.classification, RigidityClass::Independent | RigidityClass::Isostatic)
    }

    pub fn is_rigid(&self) -> bool {
        matches!(self.classification, RigidityClass::Isostatic | RigidityClass::RigidDependent)
    }
}

/// Dimension of the isometry group that fixes the rank deficit of a large
/// complete graph: `C(d+1, 2)` for l_2, `d` (translations) otherwise.
pub fn trivial_motions(d: usize, p: NormParam) -> usize {
    if p.is_euclidean() {
        d * (d + 1) / 2
    } else {
        d
    }
}

/// Generic rank of the complete graph on `n` vertices.
pub fn complete_rank(n: usize, d: usize, p: NormParam) -> usize {
    let pairs = n * n.saturating_sub(1) / 2;
    if p.is_euclidean() && n <= d + 1 {
        return pairs;
    }
    pairs.min((d * n).saturating_sub(trivial_motions(d, p)))
}

/// Places a graph's rank into one of the four cases.
pub fn classify(rank: usize, edges: usize, full: usize) -> RigidityClass {
    if rank == edges && edges < full {
        RigidityClass::Independent
    } else if rank == edges && edges == full {
        RigidityClass::Isostatic
    } else if rank == full && full < edges {
        RigidityClass::RigidDependent
    } else {
        RigidityClass::Neither
    }
}

fn check_well_positioned(delta: &[f64], p: NormParam, tol: f64) -> bool {
    match p {
        NormParam::P(1) => delta.iter().all(|a| a.abs() > tol),
        NormParam::Inf => {
            let mut mags: Vec<f64> = delta.iter().map(|a| a.abs()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            mags.len() < 2 || mags[0] - mags[1] > tol
        }
        NormParam::P(_) => true,
    }
}

fn row_block(delta: &[f64], p: NormParam) -> Vec<f64> {
    match p {
        NormParam::P(k) => delta
            .iter()
            .map(|&a| a.signum() * a.abs().powi(k as i32 - 1))
            .collect(),
        NormParam::Inf => {
            let axis = (0..delta.len())
                .max_by(|&a, &b| delta[a].abs().total_cmp(&delta[b].abs()))
                .unwrap_or(0);
            (0..delta.len())
                .map(|i| if i == axis { delta[i].signum() } else { 0.0 })
                .collect()
        }
    }
}

/// The rigidity matrix at `f`: for edge `(u, v)` with `Δ = r(u) - r(v)` the
/// `u`-block is `sign(Δ_i)|Δ_i|^{p-1}` and the `v`-block its negation.
pub fn rigidity_matrix(f: &Framework) -> Result<RigidityMatrix> {
    let d = f.dim();
    let n = f.graph().vertex_count();
    let p = f.norm();
    let mut entries = Vec::with_capacity(f.graph().edge_count());
    for (u, v) in f.graph().edges() {
        let delta: Vec<f64> = (0..d).map(|i| f.points()[u][i] - f.points()[v][i]).collect();
        if !check_well_positioned(&delta, p, WELL_POSITIONED_TOL) {
            return Err(Error::NotWellPositioned((u, v)));
        }
        let block = row_block(&delta, p);
        let mut row = vec![0.0; d * n];
        for i in 0..d {
            row[u * d + i] = block[i];
            row[v * d + i] = -block[i];
        }
        entries.push(row);
    }
    Ok(RigidityMatrix {
        edges: f.graph().edges().collect(),
        dim: d,
        vertex_count: n,
        entries,
        framework: f.clone(),
    })
}

/// Number of singular values above `RANK_TOL` times the largest.
pub fn numeric_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Exact rank over the rationals.
pub fn exact_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(piv, rank);
        let p = rows[rank][c].clone();
        for r in rank + 1..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let f = &rows[r][c] / &p;
            for k in c..cols {
                let delta = &f * &rows[rank][k];
                rows[r][k] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_points(g: &Graph, d: usize, p: NormParam, margin: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    loop {
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let ok = g.edges().all(|(u, v)| {
            let delta: Vec<f64> = (0..d).map(|i| pts[u][i] - pts[v][i]).collect();
            check_well_positioned(&delta, p, margin)
        });
        if ok {
            return pts;
        }
    }
}

fn report(g: &Graph, d: usize, p: NormParam, sample_ranks: Vec<usize>) -> RankReport {
    let m = g.edge_count();
    let rank = sample_ranks.iter().copied().max().unwrap_or(0);
    let full = complete_rank(g.vertex_count(), d, p);
    RankReport {
        rank,
        max_possible: m.min(full),
        classification: classify(rank, m, full),
        samples_used: sample_ranks.len(),
        sample_ranks,
    }
}

/// Ranks of `samples` independent searches. For smooth norms each search is
/// a single random well-positioned configuration. Under l_1 and l_∞ the rank
/// depends on which facet each edge direction lies in, and uniform samples
/// rarely hit the best pattern, so each search then hill-climbs: one
/// coordinate at a time is redrawn and the move kept if the rank does not
/// drop. Every visited configuration is well-positioned, so each value is a
/// genuine rank and the maximum is a lower bound that climbs to the generic
/// one.
fn search_ranks<F>(g: &Graph, d: usize, p: NormParam, samples: usize, seed: u64, stream: u64, margin: f64, rank_at: F) -> Vec<usize>
where
    F: Fn(&[Vec<f64>]) -> usize + Sync,
{
    let n = g.vertex_count();
    let ceiling = g.edge_count().min(complete_rank(n, d, p));
    let steps = if p.is_polyhedral() { CLIMB_STEPS_PER_COORD * n * d } else { 0 };
    (0..samples.max(1) as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(seed, stream + s);
            let mut pts = sample_points(g, d, p, margin, &mut rng);
            let mut best = rank_at(&pts);
            for _ in 0..steps {
                if best >= ceiling || n == 0 {
                    break;
                }
                let v = rng.gen_range(0..n);
                let i = rng.gen_range(0..d);
                let old = pts[v][i];
                pts[v][i] = rng.gen_range(-1.0..1.0);
                let ok = g.edges().filter(|&(a, b)| a == v || b == v).all(|(a, b)| {
                    let delta: Vec<f64> = (0..d).map(|k| pts[a][k] - pts[b][k]).collect();
                    check_well_positioned(&delta, p, margin)
                });
                let r = if ok { rank_at(&pts) } else { 0 };
                if ok && r >= best {
                    best = r;
                } else {
                    pts[v][i] = old;
                }
            }
            best
        })
        .collect()
}

/// Generic rank of `g`: the largest rigidity-matrix rank over `samples`
/// well-positioned frameworks.
pub fn generic_rank(g: &Graph, d: usize, p: NormParam, samples: usize, seed: u64) -> Result<RankReport> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let ranks = search_ranks(g, d, p, samples, seed, 0, WELL_POSITIONED_TOL * 10.0, |pts| {
        let f = Framework::new(g.clone(), pts.to_vec(), d, p).expect("sampled dimensions match");
        rigidity_matrix(&f).expect("sample is well-positioned").rank()
    });
    Ok(report(g, d, p, ranks))
}

/// Generic rank with every rank computed exactly over the rationals (the
/// sampled doubles are taken at their exact binary values). Cross-checks
/// [`generic_rank`] on small graphs.
pub fn exact_generic_rank(g: &Graph, d: usize, p: NormParam, samples: usize, seed: u64) -> usize {
    let n = g.vertex_count();
    let ranks = search_ranks(g, d, p, samples, seed, EXACT_STREAM_OFFSET, WELL_POSITIONED_TOL * 10.0, |pts| {
        let q: Vec<Vec<Rational>> = pts
            .iter()
            .map(|row| row.iter().map(|&x| Rational::from_float(x).expect("finite")).collect())
            .collect();
        let rows = g
            .edges()
            .map(|(u, v)| {
                let delta: Vec<Rational> = (0..d).map(|i| &q[u][i] - &q[v][i]).collect();
                let block: Vec<Rational> = match p {
                    NormParam::P(k) => delta
                        .iter()
                        .map(|a| {
                            let mag: Rational = Pow::pow(a.abs(), k - 1);
                            if a.is_negative() {
                                -mag
                            } else {
                                mag
                            }
                        })
                        .collect(),
                    NormParam::Inf => {
                        let axis = (0..d).max_by(|&i, &j| delta[i].abs().cmp(&delta[j].abs())).unwrap_or(0);
                        (0..d)
                            .map(|i| {
                                if i != axis {
                                    Rational::zero()
                                } else if delta[i].is_negative() {
                                    -Rational::one()
                                } else {
                                    Rational::one()
                                }
                            })
                            .collect()
                    }
                };
                let mut row = vec![Rational::zero(); d * n];
                for i in 0..d {
                    row[u * d + i] = block[i].clone();
                    row[v * d + i] = -block[i].clone();
                }
                row
            })
            .collect();
        exact_rank(rows)
    });
    ranks.into_iter().max().unwrap_or(0)
}

/// `‖r(u) - r(v)‖_p^p` per edge (the plain max for `∞`).
fn length_map(g: &Graph, d: usize, p: NormParam, x: &[f64]) -> Vec<f64> {
    g.edges()
        .map(|(u, v)| {
            let diffs = (0..d).map(|i| (x[u * d + i] - x[v * d + i]).abs());
            match p {
                NormParam::Inf => diffs.fold(0.0, f64::max),
                NormParam::P(k) => diffs.map(|a| a.powi(k as i32)).sum(),
            }
        })
        .collect()
}

/// Dimension of the image of the edge-length map near random
/// configurations: rank of its central-difference Jacobian, maximised over
/// `samples`. Shares no code with [`rigidity_matrix`].
pub fn projection_dimension(g: &Graph, d: usize, p: NormParam, samples: usize, seed: u64) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let n = g.vertex_count();
    let m = g.edge_count();
    let cols = n * d;
    let ranks = search_ranks(g, d, p, samples, seed, FD_STREAM_OFFSET, FD_MARGIN, |pts| {
        let x: Vec<f64> = pts.iter().flatten().copied().collect();
        let mut jac = DMatrix::zeros(m, cols);
        let mut probe = x.clone();
        for c in 0..cols {
            probe[c] = x[c] + FD_STEP;
            let plus = length_map(g, d, p, &probe);
            probe[c] = x[c] - FD_STEP;
            let minus = length_map(g, d, p, &probe);
            probe[c] = x[c];
            for r in 0..m {
                jac[(r, c)] = (plus[r] - minus[r]) / (2.0 * FD_STEP);
            }
        }
        numeric_rank(&jac)
    });
    Ok(ranks.into_iter().max().unwrap_or(0))
}

/// Whether the rows of `g` are generically independent.
pub fn independence_check(g: &Graph, d: usize, p: NormParam, samples: usize, seed: u64) -> Result<(bool, RankReport)> {
    let r = generic_rank(g, d, p, samples, seed)?;
    Ok((r.rank == g.edge_count(), r))
}
