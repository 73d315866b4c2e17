//! Realizing linkages in d-dimensional l_p space.
//!
//! Two engines sit behind [`realize`]:
//!
//! * an exact combinatorial solver for the plane under l_1 / l_∞, which can
//!   prove infeasibility ([`RealizeStatus::InfeasibleExact`]);
//! * a multi-start damped Gauss–Newton solver for everything else, which can
//!   only ever report [`RealizeStatus::Feasible`] or
//!   [`RealizeStatus::UnknownNumeric`].

pub(crate) mod exact;
mod numeric;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::lp::{to_rational, Rational};
use crate::metrics::{Framework, Linkage, NormParam};

pub use exact::{realize_exact_planar_polyhedral, solve_planar_case, PlanarCase};
pub use numeric::realize_numeric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizeConfig {
    pub restarts: usize,
    /// Feasibility threshold on `max_e (|r(u)-r(v)|_p - δ_e)^2 / mean_e δ_e^2`.
    pub residual_tol: f64,
    /// Smoothing parameters for non-smooth norms, strictly decreasing.
    pub smoothing_eps_schedule: Vec<f64>,
    pub seed: u64,
    /// Largest edge count handed to the exact planar solver.
    pub exact_mode_cap: usize,
    /// Gauss–Newton iterations per smoothing stage.
    pub max_iterations: usize,
}

impl Default for RealizeConfig {
    fn default() -> Self {
        RealizeConfig {
            restarts: 200,
            residual_tol: 1e-9,
            smoothing_eps_schedule: (2..=10).map(|k| 10f64.powi(-k)).collect(),
            seed: 0,
            exact_mode_cap: 12,
            max_iterations: 200,
        }
    }
}

impl RealizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be positive".into()));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::Config("residual_tol must be positive".into()));
        }
        let s = &self.smoothing_eps_schedule;
        if s.is_empty() || s.iter().any(|&e| !(e > 0.0)) || s.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config(
                "smoothing schedule must be positive and strictly decreasing".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RealizeStatus {
    Feasible,
    InfeasibleExact,
    UnknownNumeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolverMode {
    ExactPlanar,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizeResult {
    pub status: RealizeStatus,
    pub mode: SolverMode,
    pub framework: Option<Framework>,
    pub residual: f64,
    /// Exact mode: number of search nodes (partial axis/sign assignments)
    /// examined. Numeric mode: restarts attempted.
    pub certificate: usize,
    /// Rational coordinates when the witness is exact.
    #[serde(skip)]
    pub exact_points: Option<Vec<Vec<Rational>>>,
}

impl RealizeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RealizeStatus::Feasible => "FEASIBLE",
            RealizeStatus::InfeasibleExact => "INFEASIBLE_EXACT",
            RealizeStatus::UnknownNumeric => "UNKNOWN_NUMERIC",
        }
    }
}

impl RealizeResult {
    pub fn is_feasible(&self) -> bool {
        self.status == RealizeStatus::Feasible
    }
}

/// Realizes `l` in dimension `d` under `p`, dispatching to the exact planar
/// solver when `d = 2`, `p ∈ {1, ∞}` and the edge count is within
/// `cfg.exact_mode_cap`.
pub fn realize(l: &Linkage, d: usize, p: NormParam, cfg: &RealizeConfig) -> Result<RealizeResult> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    cfg.validate()?;
    if d == 2 && p.is_polyhedral() && l.graph().edge_count() <= cfg.exact_mode_cap {
        return realize_exact_planar_polyhedral(l, p, cfg);
    }
    realize_numeric(l, d, p, cfg)
}

/// Whether [`realize`] would use the exact solver for this query.
pub fn uses_exact_mode(l: &Linkage, d: usize, p: NormParam, cfg: &RealizeConfig) -> bool {
    d == 2 && p.is_polyhedral() && l.graph().edge_count() <= cfg.exact_mode_cap
}

/// Edge-length errors of a framework against a linkage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    pub worst_edge: Option<Edge>,
    /// `max_abs_error^2 / mean squared length`, comparable to `residual_tol`.
    pub relative_residual: f64,
}

impl ResidualReport {
    pub fn passes(&self, residual_tol: f64) -> bool {
        self.relative_residual <= residual_tol
    }
}

pub fn verify_framework(f: &Framework, l: &Linkage) -> Result<ResidualReport> {
    if f.graph() != l.graph() {
        return Err(Error::GraphMismatch);
    }
    let realized = f.edge_lengths();
    let mut max_abs_error = 0.0f64;
    let mut worst_edge = None;
    let mut total = 0.0;
    for (e, &target) in l.lengths() {
        let err = (realized[e] - target).abs();
        total += err;
        if err > max_abs_error || worst_edge.is_none() {
            max_abs_error = max_abs_error.max(err);
            worst_edge = Some(*e);
        }
    }
    let m = l.lengths().len();
    let mean_abs_error = if m == 0 { 0.0 } else { total / m as f64 };
    Ok(ResidualReport {
        max_abs_error,
        mean_abs_error,
        worst_edge,
        relative_residual: relative_residual(max_abs_error, l),
    })
}

pub(crate) fn relative_residual(max_abs_error: f64, l: &Linkage) -> f64 {
    let m = l.lengths().len();
    if m == 0 {
        return 0.0;
    }
    let mean_sq = l.lengths().values().map(|x| x * x).sum::<f64>() / m as f64;
    if mean_sq == 0.0 {
        max_abs_error * max_abs_error
    } else {
        max_abs_error * max_abs_error / mean_sq
    }
}

/// `sum_i |x_i - y_i|^p` in exact arithmetic (max for `p = ∞`).
pub fn exact_lp_p_distance(x: &[Rational], y: &[Rational], p: NormParam) -> Rational {
    use num_traits::{Pow, Signed, Zero};
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    match p {
        NormParam::Inf => diffs.fold(Rational::zero(), |m, d| if d > m { d } else { m }),
        NormParam::P(k) => diffs.map(|d| Pow::pow(d, k)).sum(),
    }
}

/// Exact check that rational `points` realize `l`. Lengths are converted with
/// [`to_rational`]; returns the offending edge on failure.
pub fn verify_exact(points: &[Vec<Rational>], l: &Linkage, p: NormParam) -> std::result::Result<(), Edge> {
    use num_traits::Pow;
    for (&(u, v), &len) in l.lengths() {
        let target = match p {
            NormParam::Inf => to_rational(len),
            NormParam::P(k) => Pow::pow(to_rational(len), k),
        };
        if exact_lp_p_distance(&points[u], &points[v], p) != target {
            return Err((u, v));
        }
    }
    Ok(())
}
