//! Cayley configuration spaces over non-edges and their convexity.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, Graph};
use crate::metrics::{lp_distance, Linkage, NormParam};
use crate::realize::{exact, realize, uses_exact_mode, RealizeConfig, RealizeResult, RealizeStatus};

pub const DEFAULT_GRID_POINTS: usize = 201;
/// Bisection stops once a bracket is narrower than `U / REFINE_DIVISOR`.
pub const REFINE_DIVISOR: f64 = 1e4;
/// Largest non-edge set accepted by [`cayley_scan_multi`].
pub const MAX_MULTI_NONEDGES: usize = 3;
/// Largest graph accepted by [`inherent_convexity_audit`].
pub const MAX_AUDIT_VERTICES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Sorted, pairwise disjoint closed intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
}

impl IntervalUnion {
    /// Sorts and merges intervals whose gap is at most `merge_tol`.
    pub fn new(mut intervals: Vec<Interval>, merge_tol: f64) -> Self {
        intervals.retain(|i| i.lo <= i.hi);
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for i in intervals {
            match merged.last_mut() {
                Some(last) if i.lo - last.hi <= merge_tol => last.hi = last.hi.max(i.hi),
                _ => merged.push(i),
            }
        }
        IntervalUnion { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(t))
    }

    /// Open gaps between consecutive intervals.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].hi, w[1].lo)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub t: f64,
    pub status: RealizeStatus,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScanMode {
    Exact,
    Numeric,
}

/// Whether a scan's shape is proven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConvexityVerdict {
    /// At most one interval was found.
    Convex,
    /// Several intervals, and every gap holds an exactly infeasible probe.
    NonConvex,
    /// Several intervals, but some gap rests on numeric failures only.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CayleyScanReport {
    pub nonedge: Edge,
    /// Upper end of the probe range: shortest-path length between the
    /// non-edge's endpoints.
    pub upper: f64,
    pub space: IntervalUnion,
    /// Grid probes in increasing `t`.
    pub grid: Vec<Probe>,
    /// Extra probes made while bisecting interval endpoints.
    pub refinements: Vec<Probe>,
    pub convex: bool,
    pub verdict: ConvexityVerdict,
    pub mode: ScanMode,
}

impl CayleyScanReport {
    /// Plain `t,status` lines, grid probes only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,status\n");
        for p in &self.grid {
            out.push_str(&format!("{},{}\n", p.t, p.status.as_str()));
        }
        out
    }
}

fn probe(l: &Linkage, f: Edge, t: f64, d: usize, p: NormParam, cfg: &RealizeConfig) -> Result<Probe> {
    let augmented = l.with_probe(f, t)?;
    let exact = uses_exact_mode(&augmented, d, p, cfg);
    let r = realize(&augmented, d, p, cfg)?;
    Ok(Probe {
        t,
        status: r.status,
        exact,
    })
}

fn check_nonedge(g: &Graph, f: Edge) -> Result<Edge> {
    let n = g.vertex_count();
    let f = edge(f.0, f.1);
    if f.0 == f.1 || f.1 >= n {
        return Err(Error::InvalidEdge(f.0, f.1, n));
    }
    if g.has_edge(f.0, f.1) {
        return Err(Error::NotANonEdge(f));
    }
    Ok(f)
}

/// Scans the lengths attainable by the non-edge `f` over `[0, U]`, where `U`
/// is the shortest-path distance between its endpoints.
pub fn cayley_scan_1(
    l: &Linkage,
    f: Edge,
    d: usize,
    p: NormParam,
    grid_points: usize,
    cfg: &RealizeConfig,
) -> Result<CayleyScanReport> {
    let f = check_nonedge(l.graph(), f)?;
    if grid_points < 2 {
        return Err(Error::Config("a scan needs at least two grid points".into()));
    }
    let upper = l.path_length(f.0, f.1).ok_or(Error::Disconnected(f.0, f.1))?;
    let steps = (grid_points - 1) as f64;
    let grid: Vec<Probe> = (0..grid_points)
        .into_par_iter()
        .map(|k| probe(l, f, upper * k as f64 / steps, d, p, cfg))
        .collect::<Result<_>>()?;
    let tol = upper / REFINE_DIVISOR;
    let mut refinements = Vec::new();
    let mut bisect = |mut good: f64, mut bad: f64| -> Result<f64> {
        while (good - bad).abs() > tol {
            let mid = 0.5 * (good + bad);
            let pr = probe(l, f, mid, d, p, cfg)?;
            refinements.push(pr);
            if pr.status == RealizeStatus::Feasible {
                good = mid;
            } else {
                bad = mid;
            }
        }
        Ok(good)
    };
    let feasible: Vec<bool> = grid.iter().map(|pr| pr.status == RealizeStatus::Feasible).collect();
    let mut raw = Vec::new();
    let mut k = 0;
    while k < grid.len() {
        if !feasible[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < grid.len() && feasible[k + 1] {
            k += 1;
        }
        let lo = if start > 0 { bisect(grid[start].t, grid[start - 1].t)? } else { grid[start].t };
        let hi = if k + 1 < grid.len() { bisect(grid[k].t, grid[k + 1].t)? } else { grid[k].t };
        raw.push(Interval { lo, hi });
        k += 1;
    }
    let space = IntervalUnion::new(raw, tol);
    let all_exact = grid.iter().chain(&refinements).all(|pr| pr.exact);
    let convex = space.len() <= 1;
    let verdict = if convex {
        ConvexityVerdict::Convex
    } else {
        let certified = space.gaps().iter().all(|&(a, b)| {
            grid.iter()
                .any(|pr| pr.t > a && pr.t < b && pr.status == RealizeStatus::InfeasibleExact)
        });
        if certified {
            ConvexityVerdict::NonConvex
        } else {
            ConvexityVerdict::Inconclusive
        }
    };
    Ok(CayleyScanReport {
        nonedge: f,
        upper,
        space,
        grid,
        refinements,
        convex,
        verdict,
        mode: if all_exact { ScanMode::Exact } else { ScanMode::Numeric },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MultiVerdict {
    ConvexLikely,
    /// `midpoint` of the attained tuples `a` and `b` is exactly infeasible.
    NonconvexWitness {
        a: Vec<f64>,
        b: Vec<f64>,
        midpoint: Vec<f64>,
    },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiScanReport {
    pub nonedges: Vec<Edge>,
    /// Distinct attained tuples, one entry per non-edge, in sample order.
    pub cloud: Vec<Vec<f64>>,
    pub pairs_tested: usize,
    pub verdict: MultiVerdict,
}

fn sample_realization(l: &Linkage, d: usize, p: NormParam, cfg: &RealizeConfig, s: u64) -> Result<RealizeResult> {
    if uses_exact_mode(l, d, p, cfg) {
        exact::realize_exact_ordered(l, p, cfg, Some(cfg.seed.wrapping_add(s)))
    } else {
        let cfg = RealizeConfig {
            seed: cfg.seed.wrapping_add(s),
            ..cfg.clone()
        };
        realize(l, d, p, &cfg)
    }
}

fn with_probes(l: &Linkage, fs: &[Edge], ts: &[f64]) -> Result<Linkage> {
    fs.iter().zip(ts).try_fold(l.clone(), |acc, (&f, &t)| acc.with_probe(f, t))
}

/// Samples realizations of `l`, records the lengths they give the non-edges
/// `fs`, and tests midpoints of attained pairs for feasibility.
pub fn cayley_scan_multi(
    l: &Linkage,
    fs: &[Edge],
    d: usize,
    p: NormParam,
    samples: usize,
    cfg: &RealizeConfig,
) -> Result<MultiScanReport> {
    if fs.len() > MAX_MULTI_NONEDGES {
        return Err(Error::SizeCapExceeded(format!(
            "{} non-edges exceed {MAX_MULTI_NONEDGES}",
            fs.len()
        )));
    }
    let fs: Vec<Edge> = fs.iter().map(|&f| check_nonedge(l.graph(), f)).collect::<Result<_>>()?;
    let mut sorted = fs.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != fs.len() {
        return Err(Error::Config("repeated non-edge".into()));
    }
    if fs.is_empty() {
        return Ok(MultiScanReport {
            nonedges: fs,
            cloud: Vec::new(),
            pairs_tested: 0,
            verdict: MultiVerdict::ConvexLikely,
        });
    }
    let results: Vec<RealizeResult> = (0..samples.max(1) as u64)
        .into_par_iter()
        .map(|s| sample_realization(l, d, p, cfg, s))
        .collect::<Result<_>>()?;
    let mut cloud: Vec<Vec<f64>> = Vec::new();
    for r in results {
        let Some(fw) = r.framework else { continue };
        let tuple: Vec<f64> = fs
            .iter()
            .map(|&(u, v)| lp_distance(&fw.points()[u], &fw.points()[v], p))
            .collect::<Result<_>>()?;
        if !cloud.iter().any(|c| c.iter().zip(&tuple).all(|(a, b)| (a - b).abs() <= 1e-12)) {
            cloud.push(tuple);
        }
    }
    if cloud.len() < 2 {
        return Ok(MultiScanReport {
            nonedges: fs,
            pairs_tested: 0,
            verdict: if cloud.is_empty() { MultiVerdict::Inconclusive } else { MultiVerdict::ConvexLikely },
            cloud,
        });
    }
    let first = farthest_pair(&cloud);
    let mut pairs = vec![first];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut all: Vec<(usize, usize)> = (0..cloud.len())
        .flat_map(|i| (i + 1..cloud.len()).map(move |j| (i, j)))
        .collect();
    all.shuffle(&mut rng);
    pairs.extend(all.into_iter().filter(|&q| q != first).take(samples.max(1)));
    let mut unknown = false;
    for (tested, &(i, j)) in pairs.iter().enumerate() {
        let mid: Vec<f64> = cloud[i].iter().zip(&cloud[j]).map(|(a, b)| 0.5 * (a + b)).collect();
        let r = realize(&with_probes(l, &fs, &mid)?, d, p, cfg)?;
        match r.status {
            RealizeStatus::Feasible => {}
            RealizeStatus::UnknownNumeric => unknown = true,
            RealizeStatus::InfeasibleExact => {
                return Ok(MultiScanReport {
                    nonedges: fs,
                    pairs_tested: tested + 1,
                    verdict: MultiVerdict::NonconvexWitness {
                        a: cloud[i].clone(),
                        b: cloud[j].clone(),
                        midpoint: mid,
                    },
                    cloud,
                });
            }
        }
    }
    Ok(MultiScanReport {
        nonedges: fs,
        pairs_tested: pairs.len(),
        verdict: if unknown { MultiVerdict::Inconclusive } else { MultiVerdict::ConvexLikely },
        cloud,
    })
}

fn farthest_pair(cloud: &[Vec<f64>]) -> (usize, usize) {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let mut best = (0, 1);
    let mut best_d = -1.0;
    for i in 0..cloud.len() {
        for j in i + 1..cloud.len() {
            let dd = dist(&cloud[i], &cloud[j]);
            if dd > best_d {
                best_d = dd;
                best = (i, j);
            }
        }
    }
    best
}

/// A non-convex Cayley space of `g` minus `removed`, scanned over `removed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditFinding {
    pub removed: Edge,
    pub linkage: Linkage,
    pub scan: CayleyScanReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub scans: usize,
    /// Scans whose shape could not be proven either way.
    pub inconclusive: usize,
    pub refutation: Option<AuditFinding>,
}

/// Candidate edge lengths for the kept subgraph: unit lengths first, then
/// lengths read off random configurations on a coarse grid, alternating
/// between dimension `d` and `d + 1`.
fn audit_candidates(h: &Graph, d: usize, p: NormParam, trials: usize, seed: u64) -> Vec<Linkage> {
    let mut out = Vec::with_capacity(trials + 1);
    if let Ok(l) = Linkage::uniform(h.clone(), 1.0) {
        out.push(l);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while out.len() < trials + 1 && attempts < 20 * (trials + 1) {
        attempts += 1;
        let dim = if attempts % 2 == 1 { d } else { d + 1 };
        let pts: Vec<Vec<f64>> = (0..h.vertex_count())
            .map(|_| (0..dim).map(|_| rng.gen_range(-8i32..=8) as f64 / 4.0).collect())
            .collect();
        if let Ok(l) = Linkage::from_points(h.clone(), &pts, p) {
            if l.lengths().values().all(|&x| x > 0.0) {
                out.push(l);
            }
        }
    }
    out
}

/// Looks for a non-convex Cayley space among partitions `g = H ∪ {f}`: every
/// edge `f`, with unit lengths on `H` and then `trials` random realizable
/// length assignments. Stops at the first certified non-convex scan.
pub fn inherent_convexity_audit(
    g: &Graph,
    d: usize,
    p: NormParam,
    trials: usize,
    grid_points: usize,
    cfg: &RealizeConfig,
) -> Result<AuditReport> {
    if g.vertex_count() > MAX_AUDIT_VERTICES {
        return Err(Error::SizeCapExceeded(format!(
            "{} vertices exceed the audit cap of {MAX_AUDIT_VERTICES}",
            g.vertex_count()
        )));
    }
    let mut report = AuditReport {
        scans: 0,
        inconclusive: 0,
        refutation: None,
    };
    let mut candidates: BTreeMap<Edge, Vec<Linkage>> = BTreeMap::new();
    for (k, f) in g.edges().enumerate() {
        let h = g.delete_edge(f)?;
        candidates.insert(f, audit_candidates(&h, d, p, trials, cfg.seed.wrapping_add(k as u64)));
    }
    // Round-robin over partitions so cheap unit-length scans come first.
    let rounds = trials + 1;
    for round in 0..rounds {
        for (&f, ls) in &candidates {
            let Some(l) = ls.get(round) else { continue };
            if l.path_length(f.0, f.1).is_none() {
                continue;
            }
            let scan = cayley_scan_1(l, f, d, p, grid_points, cfg)?;
            report.scans += 1;
            match scan.verdict {
                ConvexityVerdict::Convex => {}
                ConvexityVerdict::Inconclusive => report.inconclusive += 1,
                ConvexityVerdict::NonConvex => {
                    report.refutation = Some(AuditFinding {
                        removed: f,
                        linkage: l.clone(),
                        scan,
                    });
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}
