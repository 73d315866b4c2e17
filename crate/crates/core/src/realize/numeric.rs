//! Multi-start Levenberg–Marquardt realization.
//!
//! Residuals are `φ(r(u) - r(v)) - δ^p` in length units normalised by the
//! mean edge length. For odd `p` the absolute value is smoothed as
//! `sqrt(x^2 + ε)`; for `p = ∞` the max is replaced by a log-sum-exp with
//! temperature `sqrt(ε)`. Both anneal along `cfg.smoothing_eps_schedule`.
//! Under l_1 and l_∞ a converged point is then snapped to an exact rational
//! solution of the linear system fixed by its sign/axis pattern, when one
//! exists.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{relative_residual, RealizeConfig, RealizeResult, RealizeStatus, SolverMode};
use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::lp::{to_f64, to_rational, LinearSystem, Rational, Relation};
use crate::metrics::{Framework, Linkage, NormParam};

#[derive(Clone, Copy)]
enum Smoothing {
    None,
    Abs(f64),
    Max(f64),
}

struct Problem {
    n: usize,
    d: usize,
    p: NormParam,
    edges: Vec<Edge>,
    /// Normalised targets, already raised to `p` (plain lengths for `∞`).
    targets: Vec<f64>,
}

impl Problem {
    fn residuals(&self, x: &DVector<f64>, s: Smoothing, jac: Option<&mut DMatrix<f64>>) -> DVector<f64> {
        let d = self.d;
        let mut r = DVector::zeros(self.edges.len());
        let mut grad = vec![0.0; d];
        let mut jac = jac;
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            let delta: Vec<f64> = (0..d).map(|i| x[u * d + i] - x[v * d + i]).collect();
            let value = match (self.p, s) {
                (NormParam::P(p), Smoothing::None) => {
                    let p = p as i32;
                    for (g, &a) in grad.iter_mut().zip(&delta) {
                        *g = p as f64 * a.abs().powi(p - 1) * a.signum();
                    }
                    delta.iter().map(|a| a.abs().powi(p)).sum()
                }
                (NormParam::P(p), Smoothing::Abs(eps)) => {
                    let half = p as f64 / 2.0;
                    let mut total = 0.0;
                    for (g, &a) in grad.iter_mut().zip(&delta) {
                        let q = a * a + eps;
                        total += q.powf(half);
                        *g = p as f64 * a * q.powf(half - 1.0);
                    }
                    total
                }
                (NormParam::Inf, Smoothing::Max(eps)) => {
                    let tau = eps.sqrt();
                    let soft: Vec<f64> = delta.iter().map(|a| (a * a + eps).sqrt()).collect();
                    let top = soft.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let weights: Vec<f64> = soft.iter().map(|s| ((s - top) / tau).exp()).collect();
                    let z: f64 = weights.iter().sum();
                    for i in 0..d {
                        grad[i] = weights[i] / z * delta[i] / soft[i];
                    }
                    top + tau * z.ln()
                }
                _ => unreachable!("smoothing chosen per norm"),
            };
            r[k] = value - self.targets[k];
            if let Some(j) = jac.as_deref_mut() {
                for i in 0..d {
                    j[(k, u * d + i)] = grad[i];
                    j[(k, v * d + i)] = -grad[i];
                }
            }
        }
        r
    }

    fn stages(&self, cfg: &RealizeConfig) -> Vec<Smoothing> {
        match self.p {
            NormParam::P(p) if p % 2 == 0 => vec![Smoothing::None],
            NormParam::P(_) => cfg.smoothing_eps_schedule.iter().map(|&e| Smoothing::Abs(e)).collect(),
            NormParam::Inf => cfg.smoothing_eps_schedule.iter().map(|&e| Smoothing::Max(e)).collect(),
        }
    }

    fn levenberg_marquardt(&self, x: &mut DVector<f64>, s: Smoothing, max_iterations: usize) {
        let cols = self.n * self.d;
        let mut jac = DMatrix::zeros(self.edges.len(), cols);
        let mut r = self.residuals(x, s, Some(&mut jac));
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        for _ in 0..max_iterations {
            if cost < 1e-30 {
                break;
            }
            let jt = jac.transpose();
            let g = &jt * &r;
            let mut a = &jt * &jac;
            let scale = a.diagonal().max().max(1e-12);
            for i in 0..cols {
                a[(i, i)] += mu * scale;
            }
            let Some(chol) = a.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let step = chol.solve(&(-g));
            let trial = &*x + &step;
            let mut trial_jac = DMatrix::zeros(self.edges.len(), cols);
            let trial_r = self.residuals(&trial, s, Some(&mut trial_jac));
            let trial_cost = trial_r.norm_squared();
            if trial_cost < cost {
                let small = step.norm() <= 1e-15 * (1.0 + x.norm());
                *x = trial;
                r = trial_r;
                jac = trial_jac;
                let gain = cost - trial_cost;
                cost = trial_cost;
                mu = (mu / 3.0).max(1e-15);
                if small || gain <= 1e-16 * cost {
                    break;
                }
            } else {
                mu *= 4.0;
                if mu > 1e12 {
                    break;
                }
            }
        }
    }
}

/// Numeric realization in dimension `d`. Never reports infeasibility.
pub fn realize_numeric(l: &Linkage, d: usize, p: NormParam, cfg: &RealizeConfig) -> Result<RealizeResult> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    cfg.validate()?;
    let n = l.graph().vertex_count();
    let m = l.lengths().len();
    let mean = if m == 0 { 0.0 } else { l.total_length() / m as f64 };
    if mean == 0.0 {
        // No edges, or only zero-length probes: put everything at the origin.
        let framework = Framework::new(l.graph().clone(), vec![vec![0.0; d]; n], d, p)?;
        return Ok(RealizeResult {
            status: RealizeStatus::Feasible,
            mode: SolverMode::Numeric,
            framework: Some(framework),
            residual: 0.0,
            certificate: 0,
            exact_points: Some(vec![vec![Rational::from_integer(0.into()); d]; n]),
        });
    }
    let problem = Problem {
        n,
        d,
        p,
        edges: l.lengths().keys().copied().collect(),
        targets: l.lengths().values().map(|&x| p.raise(x / mean)).collect(),
    };
    let half_width = l.total_length() / mean;
    let stages = problem.stages(cfg);
    let found = (0..cfg.restarts).into_par_iter().find_map_first(|trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(trial as u64);
        let mut x = DVector::from_fn(n * d, |_, _| rng.gen_range(-half_width..=half_width));
        for &s in &stages {
            problem.levenberg_marquardt(&mut x, s, cfg.max_iterations);
        }
        let points: Vec<Vec<f64>> = (0..n)
            .map(|v| (0..d).map(|i| x[v * d + i] * mean).collect())
            .collect();
        let exact = if p.is_polyhedral() { polish(l, &points, p) } else { None };
        let points = match &exact {
            Some(q) => q.iter().map(|row| row.iter().map(to_f64).collect()).collect(),
            None => points,
        };
        let framework = Framework::new(l.graph().clone(), points, d, p).ok()?;
        let residual = max_error(&framework, l);
        let residual = relative_residual(residual, l);
        (residual <= cfg.residual_tol).then_some((trial, framework, residual, exact))
    });
    Ok(match found {
        Some((trial, framework, residual, exact_points)) => RealizeResult {
            status: RealizeStatus::Feasible,
            mode: SolverMode::Numeric,
            framework: Some(framework),
            residual,
            certificate: trial + 1,
            exact_points,
        },
        None => RealizeResult {
            status: RealizeStatus::UnknownNumeric,
            mode: SolverMode::Numeric,
            framework: None,
            residual: f64::INFINITY,
            certificate: cfg.restarts,
            exact_points: None,
        },
    })
}

fn max_error(f: &Framework, l: &Linkage) -> f64 {
    f.edge_lengths()
        .iter()
        .map(|(e, &x)| (x - l.lengths()[e]).abs())
        .fold(0.0, f64::max)
}

/// Fixes the sign pattern (l_1) or attaining axis and sign (l_∞) of every edge
/// at `points` and solves the resulting linear system exactly.
fn polish(l: &Linkage, points: &[Vec<f64>], p: NormParam) -> Option<Vec<Vec<Rational>>> {
    let n = points.len();
    let d = points.first()?.len();
    let mut sys = LinearSystem::free(n * d);
    let one = Rational::from_integer(1.into());
    let diff = |u: usize, v: usize, i: usize, c: &Rational| vec![(u * d + i, c.clone()), (v * d + i, -c.clone())];
    for (&(u, v), &len) in l.lengths() {
        let len = to_rational(len);
        let delta: Vec<f64> = (0..d).map(|i| points[u][i] - points[v][i]).collect();
        let sign = |a: f64| if a < 0.0 { -one.clone() } else { one.clone() };
        match p {
            NormParam::P(_) => {
                let mut row = Vec::with_capacity(2 * d);
                for (i, &a) in delta.iter().enumerate() {
                    let s = sign(a);
                    sys.constrain(diff(u, v, i, &s), Relation::Ge, Rational::from_integer(0.into()));
                    row.extend(diff(u, v, i, &s));
                }
                sys.constrain(row, Relation::Eq, len);
            }
            NormParam::Inf => {
                let axis = (0..d)
                    .max_by(|&a, &b| delta[a].abs().total_cmp(&delta[b].abs()))
                    .expect("d >= 1");
                sys.constrain(diff(u, v, axis, &sign(delta[axis])), Relation::Eq, len.clone());
                for i in (0..d).filter(|&i| i != axis) {
                    sys.constrain(diff(u, v, i, &one), Relation::Le, len.clone());
                    sys.constrain(diff(u, v, i, &one), Relation::Ge, -len.clone());
                }
            }
        }
    }
    let x = sys.solve()?;
    Some((0..n).map(|v| x[v * d..(v + 1) * d].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::graph::presets;
    use crate::realize::{verify_exact, verify_framework};

    fn cfg(restarts: usize) -> RealizeConfig {
        RealizeConfig {
            restarts,
            ..RealizeConfig::default()
        }
    }

    #[test]
    fn unit_square_in_l2_plane() {
        let l = Linkage::uniform(presets::cycle(4), 1.0).unwrap();
        let r = realize_numeric(&l, 2, NormParam::P(2), &cfg(20)).unwrap();
        assert!(r.is_feasible());
        let report = verify_framework(r.framework.as_ref().unwrap(), &l).unwrap();
        assert!(report.passes(1e-9));
    }

    #[test]
    fn every_norm_realizes_a_triangle() {
        let g = presets::triangle();
        let lengths = BTreeMap::from([((0, 1), 3.0), ((0, 2), 4.0), ((1, 2), 5.0)]);
        let l = Linkage::new(g, lengths).unwrap();
        for p in [NormParam::P(1), NormParam::P(2), NormParam::P(3), NormParam::P(4), NormParam::Inf] {
            for d in [2, 3] {
                let r = realize_numeric(&l, d, p, &cfg(30)).unwrap();
                assert!(r.is_feasible(), "p = {p}, d = {d}");
                assert!(r.residual <= 1e-9);
            }
        }
    }

    #[test]
    fn polyhedral_witness_is_exact() {
        let l = Linkage::uniform(presets::k4(), 2.0).unwrap();
        for p in [NormParam::P(1), NormParam::Inf] {
            let r = realize_numeric(&l, 3, p, &cfg(30)).unwrap();
            assert!(r.is_feasible());
            let q = r.exact_points.expect("polished");
            assert_eq!(verify_exact(&q, &l, p), Ok(()));
        }
    }

    #[test]
    fn impossible_lengths_stay_unknown() {
        let g = presets::triangle();
        let lengths = BTreeMap::from([((0, 1), 1.0), ((0, 2), 1.0), ((1, 2), 3.0)]);
        let l = Linkage::new(g, lengths).unwrap();
        let r = realize_numeric(&l, 2, NormParam::P(2), &cfg(5)).unwrap();
        assert_eq!(r.status, RealizeStatus::UnknownNumeric);
        assert!(r.framework.is_none());
    }

    #[test]
    fn equilateral_five_points_not_found_in_plane() {
        let l = Linkage::uniform(presets::k5(), 1.0).unwrap();
        let r = realize_numeric(&l, 2, NormParam::P(2), &cfg(10)).unwrap();
        assert_eq!(r.status, RealizeStatus::UnknownNumeric);
        let r = realize_numeric(&l, 4, NormParam::P(2), &cfg(20)).unwrap();
        assert!(r.is_feasible());
    }

    #[test]
    fn same_seed_same_answer() {
        let l = Linkage::uniform(presets::banana(), 1.0).unwrap();
        let a = realize_numeric(&l, 3, NormParam::P(2), &cfg(20)).unwrap();
        let b = realize_numeric(&l, 3, NormParam::P(2), &cfg(20)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_length_probe_collapses_points() {
        let l = Linkage::uniform(presets::path(3), 1.0)
            .unwrap()
            .with_probe((0, 2), 0.0)
            .unwrap();
        for p in [NormParam::P(1), NormParam::P(2), NormParam::P(3)] {
            let r = realize_numeric(&l, 2, p, &cfg(20)).unwrap();
            assert!(r.is_feasible(), "p = {p}");
        }
    }
}
