//! Flattenability verdicts with certificates.
//!
//! The l_1 planar cascade only ever answers YES or NO on the strength of a
//! structural fact (a forbidden minor, a known flattenable graph, or a
//! decomposition along a small separator); everything else is UNKNOWN.
//! [`flatten_l1_d2_audited`] can additionally settle UNKNOWN graphs with an
//! exactly certified non-convex Cayley space.

use serde::{Deserialize, Serialize};

use crate::cayley::{inherent_convexity_audit, AuditFinding, MAX_AUDIT_VERTICES};
use crate::error::{Error, Result};
use crate::graph::{presets, Graph};
use crate::metrics::NormParam;
use crate::minor::{has_minor_capped, is_isomorphic, is_partial_two_tree, MinorSearchCap, MinorWitness};
use crate::realize::RealizeConfig;
use crate::rigidity::{independence_check, RankReport};

/// Minor-search limits used by the verdicts: any graph on at most ten vertices.
pub const FLATTEN_MINOR_CAP: MinorSearchCap = MinorSearchCap {
    max_vertices: 10,
    max_edges: 45,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FlattenStatus {
    Yes,
    No,
    Unknown,
}

/// One side of a separation: the host vertices it uses (the separator
/// first), whether the separator pair was joined by a virtual edge, and the
/// piece's own verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub vertices: Vec<usize>,
    pub virtual_edge: bool,
    pub has_k4_minor: bool,
    pub verdict: FlattenVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Empty for a disconnected graph, one cut vertex, or a separating pair.
    pub separator: Vec<usize>,
    /// Whether the separating pair is itself an edge of the graph.
    pub separator_is_edge: bool,
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    NoForbiddenMinor { name: String },
    ForbiddenMinor { name: String, witness: MinorWitness },
    /// The graph is one of the small graphs known to be flattenable.
    KnownFlattenable { name: String },
    TwoSumDecomposition(Decomposition),
    CayleyNonConvexity(Box<AuditFinding>),
    ConjectureFrontier { name: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlattenVerdict {
    pub status: FlattenStatus,
    pub norm: NormParam,
    pub d: usize,
    pub certificate: Certificate,
    /// A non-convex Cayley space backing a NO, when one was looked for.
    pub cayley: Option<Box<AuditFinding>>,
}

impl FlattenVerdict {
    fn new(status: FlattenStatus, norm: NormParam, d: usize, certificate: Certificate) -> Self {
        FlattenVerdict {
            status,
            norm,
            d,
            certificate,
            cayley: None,
        }
    }
}

fn named_minor(g: &Graph, name: &str, h: &Graph) -> Result<Option<Certificate>> {
    Ok(has_minor_capped(g, h, FLATTEN_MINOR_CAP)?.map(|witness| Certificate::ForbiddenMinor {
        name: name.to_string(),
        witness,
    }))
}

/// Euclidean flattenability for `d ≤ 3` by forbidden minors: forests for
/// `d = 1`, no K_4 for `d = 2`, no K_5 and no K_{2,2,2} for `d = 3`.
pub fn flatten_l2(g: &Graph, d: usize) -> Result<FlattenVerdict> {
    let l2 = NormParam::P(2);
    let forbidden: Vec<(&str, Graph)> = match d {
        0 => return Err(Error::InvalidDimension(d)),
        1 => vec![("K3", presets::triangle())],
        2 => vec![("K4", presets::k4())],
        3 => vec![("K5", presets::k5()), ("K222", presets::octahedron())],
        _ => return Err(Error::UnsupportedDimension(d)),
    };
    for (name, h) in &forbidden {
        if let Some(cert) = named_minor(g, name, h)? {
            return Ok(FlattenVerdict::new(FlattenStatus::No, l2, d, cert));
        }
    }
    let names: Vec<&str> = forbidden.iter().map(|(n, _)| *n).collect();
    Ok(FlattenVerdict::new(
        FlattenStatus::Yes,
        l2,
        d,
        Certificate::NoForbiddenMinor { name: names.join(",") },
    ))
}

fn has_k4_minor(g: &Graph) -> bool {
    !is_partial_two_tree(g).is_partial_two_tree
}

fn known_flattenable(g: &Graph) -> Option<&'static str> {
    if is_isomorphic(g, &presets::k4()) {
        Some("K4")
    } else if is_isomorphic(g, &presets::k5_minus_two_at_vertex()) {
        Some("K5 minus two edges at a vertex")
    } else if g.vertex_count() == 5 && g.edge_count() == 7 && g.is_connected() {
        Some("connected, 5 vertices, 7 edges")
    } else {
        None
    }
}

/// Ways to split `g` along a separator of at most two vertices, smallest
/// separators first. Each entry lists the separator and the components of
/// `g` minus it.
fn separations(g: &Graph) -> Vec<(Vec<usize>, Vec<Vec<usize>>)> {
    let n = g.vertex_count();
    let nontrivial = |comps: &Vec<Vec<usize>>| comps.len() >= 2;
    let mut out = Vec::new();
    let comps: Vec<Vec<usize>> = g
        .components()
        .into_iter()
        .filter(|c| c.len() > 1)
        .collect();
    if nontrivial(&comps) || comps.len() == 1 && comps[0].len() < n {
        // Disconnected, or isolated vertices alongside one component.
        out.push((Vec::new(), comps));
        return out;
    }
    for v in 0..n {
        let comps = g.components_without(&[v]);
        if nontrivial(&comps) {
            out.push((vec![v], comps));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for a in 0..n {
        for b in a + 1..n {
            let comps = g.components_without(&[a, b]);
            if nontrivial(&comps) {
                out.push((vec![a, b], comps));
            }
        }
    }
    out
}

/// Pieces of a separation. For a separating pair the pair is joined in every
/// piece; each such piece is a minor of `g` because another component
/// supplies a path between the pair.
fn pieces_of(g: &Graph, separator: &[usize], comps: &[Vec<usize>]) -> Vec<(Vec<usize>, Graph, bool)> {
    comps
        .iter()
        .map(|c| {
            let vertices: Vec<usize> = separator.iter().chain(c).copied().collect();
            let mut piece = g.induced(&vertices);
            let mut virtual_edge = false;
            if separator.len() == 2 && !piece.has_edge(0, 1) {
                piece.insert_edge(0, 1).expect("separator pair is distinct");
                virtual_edge = true;
            }
            (vertices, piece, virtual_edge)
        })
        .collect()
}

/// Combines piece verdicts for one separation; `None` when the pieces do
/// not settle the question.
fn combine(
    separator: &[usize],
    separator_is_edge: bool,
    pieces: Vec<Piece>,
) -> (Option<FlattenStatus>, Decomposition) {
    let any_no = pieces.iter().any(|p| p.verdict.status == FlattenStatus::No);
    let all_yes = pieces.iter().all(|p| p.verdict.status == FlattenStatus::Yes);
    let k4_pieces = pieces.iter().filter(|p| p.has_k4_minor).count();
    let status = if any_no {
        // Each piece is a minor of the whole graph.
        Some(FlattenStatus::No)
    } else if !all_yes {
        None
    } else if separator.len() < 2 || k4_pieces <= 1 {
        Some(FlattenStatus::Yes)
    } else if separator_is_edge || pieces.len() >= 3 {
        // Two K_4-minor pieces glued along the separating edge form a minor.
        Some(FlattenStatus::No)
    } else {
        None
    };
    let decomposition = Decomposition {
        separator: separator.to_vec(),
        separator_is_edge,
        pieces,
    };
    (status, decomposition)
}

/// 2-flattenability under l_1 (equivalently l_∞) in the plane.
pub fn flatten_l1_d2(g: &Graph) -> Result<FlattenVerdict> {
    let l1 = NormParam::P(1);
    let verdict = |status, cert| FlattenVerdict::new(status, l1, 2, cert);
    if !has_k4_minor(g) {
        return Ok(verdict(
            FlattenStatus::Yes,
            Certificate::NoForbiddenMinor { name: "K4".into() },
        ));
    }
    if let Some(cert) = named_minor(g, "banana", &presets::banana())? {
        return Ok(verdict(FlattenStatus::No, cert));
    }
    if let Some(name) = known_flattenable(g) {
        return Ok(verdict(
            FlattenStatus::Yes,
            Certificate::KnownFlattenable { name: name.into() },
        ));
    }
    let mut pending: Option<FlattenVerdict> = None;
    for (separator, comps) in separations(g) {
        let separator_is_edge = separator.len() == 2 && g.has_edge(separator[0], separator[1]);
        let mut pieces = Vec::with_capacity(comps.len());
        for (vertices, piece, virtual_edge) in pieces_of(g, &separator, &comps) {
            pieces.push(Piece {
                vertices,
                virtual_edge,
                has_k4_minor: has_k4_minor(&piece),
                verdict: flatten_l1_d2(&piece)?,
            });
        }
        let (status, decomposition) = combine(&separator, separator_is_edge, pieces);
        match status {
            Some(status) => return Ok(verdict(status, Certificate::TwoSumDecomposition(decomposition))),
            None if pending.is_none() => {
                pending = Some(verdict(
                    FlattenStatus::Unknown,
                    Certificate::TwoSumDecomposition(decomposition),
                ));
            }
            None => {}
        }
    }
    if let Some(v) = pending {
        return Ok(v);
    }
    let frontier = if has_minor_capped(g, &presets::w4(), FLATTEN_MINOR_CAP)?.is_some() {
        "W_4"
    } else {
        "unclassified"
    };
    Ok(verdict(
        FlattenStatus::Unknown,
        Certificate::ConjectureFrontier { name: frontier.into() },
    ))
}

/// [`flatten_l1_d2`], followed, for UNKNOWN or NO verdicts on at most
/// seven vertices, by an inherent-convexity audit. An exactly certified
/// non-convex Cayley space turns UNKNOWN into NO and is attached to a NO.
pub fn flatten_l1_d2_audited(
    g: &Graph,
    trials: usize,
    grid_points: usize,
    cfg: &RealizeConfig,
) -> Result<FlattenVerdict> {
    let mut v = flatten_l1_d2(g)?;
    if v.status == FlattenStatus::Yes || g.vertex_count() > MAX_AUDIT_VERTICES {
        return Ok(v);
    }
    let audit = inherent_convexity_audit(g, 2, NormParam::P(1), trials, grid_points, cfg)?;
    if let Some(finding) = audit.refutation {
        let finding = Box::new(finding);
        if v.status == FlattenStatus::Unknown {
            v.status = FlattenStatus::No;
            v.certificate = Certificate::CayleyNonConvexity(finding.clone());
        }
        v.cayley = Some(finding);
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditionReport {
    pub independent: bool,
    pub rank: RankReport,
}

/// Independence in the generic rigidity matroid, which every flattenable
/// graph satisfies. Failing it suggests, but does not prove, a NO.
pub fn flattenability_necessary_conditions(
    g: &Graph,
    d: usize,
    p: NormParam,
    samples: usize,
    seed: u64,
) -> Result<NecessaryConditionReport> {
    let (independent, rank) = independence_check(g, d, p, samples, seed)?;
    Ok(NecessaryConditionReport { independent, rank })
}
