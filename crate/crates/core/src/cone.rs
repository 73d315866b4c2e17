//! Membership in the cone of pairwise l_p^p distance vectors and its
//! dimension strata, plus the constructions that make the cone convex.

use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{to_f64, to_rational, LinearSystem, Rational, Relation};
use crate::metrics::{pairs, DistanceVector, NormParam};
use crate::realize::{realize, RealizeConfig, RealizeStatus};

/// Largest point count for the cut-cone LP.
pub const CUT_CONE_MAX_POINTS: usize = 12;
/// Largest point count for the eigenvalue test.
pub const EDM_MAX_POINTS: usize = 64;
const EDM_TOL: f64 = 1e-10;
/// Tolerance, relative to the natural scale, below which a Cayley–Menger
/// determinant is treated as zero. Absorbs decimal rounding of the input.
const CAYLEY_MENGER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    Member,
    NonMember,
    UnknownNumeric,
}

/// One cut `S` (always containing point 0) with its weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCut {
    pub side: Vec<usize>,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeWitness {
    /// A point configuration whose distance vector is the query.
    Points(Vec<Vec<f64>>),
    /// An exact cut decomposition and the l_1 configuration it induces, one
    /// coordinate per cut.
    Cuts {
        cuts: Vec<WeightedCut>,
        #[serde(serialize_with = "ser_rational_points", deserialize_with = "de_rational_points")]
        points: Vec<Vec<Rational>>,
    },
    /// A subset whose Cayley–Menger determinant has the wrong sign (or is
    /// nonzero where it must vanish).
    CayleyMenger { subset: Vec<usize>, determinant: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeMembershipReport {
    pub member: Membership,
    pub witness: Option<ConeWitness>,
    pub embedding_dim: Option<usize>,
}

impl ConeMembershipReport {
    pub fn is_member(&self) -> bool {
        self.member == Membership::Member
    }

    fn non_member(witness: Option<ConeWitness>) -> Self {
        ConeMembershipReport {
            member: Membership::NonMember,
            witness,
            embedding_dim: None,
        }
    }
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn de_rational<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let text = String::deserialize(d)?;
    text.parse().map_err(serde::de::Error::custom)
}

fn ser_rational_points<S: serde::Serializer>(
    pts: &[Vec<Rational>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<Vec<String>> = pts.iter().map(|p| p.iter().map(|q| q.to_string()).collect()).collect();
    text.serialize(s)
}

fn de_rational_points<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
    let text = Vec::<Vec<String>>::deserialize(d)?;
    text.iter()
        .map(|p| p.iter().map(|q| q.parse().map_err(serde::de::Error::custom)).collect())
        .collect()
}

/// Eigenvalues and column eigenvectors of a symmetric matrix by cyclic
/// Jacobi rotations.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let norm: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Centered Gram matrix `-1/2 J D J` of a squared-distance vector.
pub fn centered_gram(dv: &DistanceVector) -> Vec<Vec<f64>> {
    let n = dv.n();
    let d = |i: usize, j: usize| if i == j { 0.0 } else { dv.get(i, j) };
    let row_mean: Vec<f64> = (0..n).map(|i| (0..n).map(|j| d(i, j)).sum::<f64>() / n as f64).collect();
    let total: f64 = row_mean.iter().sum::<f64>() / n as f64;
    (0..n)
        .map(|i| (0..n).map(|j| -0.5 * (d(i, j) - row_mean[i] - row_mean[j] + total)).collect())
        .collect()
}

/// Euclidean (squared-distance) cone membership via the centered Gram matrix.
pub fn edm_membership(dv: &DistanceVector) -> Result<ConeMembershipReport> {
    let n = dv.n();
    if n > EDM_MAX_POINTS {
        return Err(Error::SizeCapExceeded(format!("{n} points exceed {EDM_MAX_POINTS}")));
    }
    if n == 0 {
        return Ok(ConeMembershipReport {
            member: Membership::Member,
            witness: Some(ConeWitness::Points(Vec::new())),
            embedding_dim: Some(0),
        });
    }
    let (values, vectors) = jacobi_eigen(centered_gram(dv));
    let top = values.iter().cloned().fold(0.0, f64::max);
    let bottom = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if bottom < -EDM_TOL * top.max(f64::MIN_POSITIVE) && bottom < -f64::EPSILON {
        return Ok(ConeMembershipReport::non_member(None));
    }
    let mut kept: Vec<usize> = (0..n).filter(|&k| values[k] > EDM_TOL * top).collect();
    kept.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let points = (0..n)
        .map(|i| kept.iter().map(|&k| vectors[i][k] * values[k].sqrt()).collect())
        .collect();
    Ok(ConeMembershipReport {
        member: Membership::Member,
        witness: Some(ConeWitness::Points(points)),
        embedding_dim: Some(kept.len()),
    })
}

/// l_1 cone membership: exact LP over all cuts `S` with `0 ∈ S`.
pub fn cut_cone_membership(dv: &DistanceVector) -> Result<ConeMembershipReport> {
    let n = dv.n();
    if n > CUT_CONE_MAX_POINTS {
        return Err(Error::SizeCapExceeded(format!("{n} points exceed {CUT_CONE_MAX_POINTS}")));
    }
    if n <= 1 {
        return Ok(ConeMembershipReport {
            member: Membership::Member,
            witness: Some(ConeWitness::Cuts {
                cuts: Vec::new(),
                points: vec![Vec::new(); n],
            }),
            embedding_dim: Some(0),
        });
    }
    // Cut k has side {0} ∪ {i : bit i-1 of k is set}; the full set is skipped.
    let cut_count = (1usize << (n - 1)) - 1;
    let side = |k: usize, i: usize| i == 0 || (k >> (i - 1)) & 1 == 1;
    let mut sys = LinearSystem::nonnegative(cut_count);
    for ((i, j), &x) in pairs(n).zip(dv.entries()) {
        let coeffs = (0..cut_count)
            .filter(|&k| side(k, i) != side(k, j))
            .map(|k| (k, Rational::one()))
            .collect();
        sys.constrain(coeffs, Relation::Eq, to_rational(x));
    }
    let Some(lambda) = sys.solve() else {
        return Ok(ConeMembershipReport::non_member(None));
    };
    let cuts: Vec<WeightedCut> = lambda
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_positive())
        .map(|(k, w)| WeightedCut {
            side: (0..n).filter(|&i| side(k, i)).collect(),
            weight: w.clone(),
        })
        .collect();
    let points = cut_points(n, &cuts);
    let dim = cuts.len();
    Ok(ConeMembershipReport {
        member: Membership::Member,
        witness: Some(ConeWitness::Cuts { cuts, points }),
        embedding_dim: Some(dim),
    })
}

/// One coordinate per cut: `weight` on the side containing 0, zero elsewhere.
pub fn cut_points(n: usize, cuts: &[WeightedCut]) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            cuts.iter()
                .map(|c| if c.side.contains(&i) { c.weight.clone() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

/// Exact determinant by Gaussian elimination over rationals.
pub fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// Cayley–Menger determinant of the points `subset` from squared distances.
pub fn cayley_menger(dv: &DistanceVector, subset: &[usize]) -> Rational {
    let k = subset.len();
    let mut m = vec![vec![Rational::zero(); k + 1]; k + 1];
    for i in 0..k {
        m[0][i + 1] = Rational::one();
        m[i + 1][0] = Rational::one();
        for j in 0..k {
            if i != j {
                m[i + 1][j + 1] = to_rational(dv.get(subset[i], subset[j]));
            }
        }
    }
    determinant(m)
}

/// Necessary conditions for a squared-distance vector to come from `d`
/// dimensions: simplices on up to `d + 1` points have nonnegative squared
/// volume, and those on `d + 2` points are flat. Returns the first violation.
pub fn cayley_menger_filter(dv: &DistanceVector, d: usize) -> Option<ConeWitness> {
    let n = dv.n();
    let scale = dv.entries().iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for size in 2..=n.min(d + 2) {
        for subset in subsets(n, size) {
            let det = cayley_menger(dv, &subset);
            // Homogeneous of degree `size - 1` in the squared distances.
            let normalised = to_f64(&det) / scale.powi(size as i32 - 1);
            // Squared volume is (-1)^size · det up to a positive constant.
            let signed = if size % 2 == 0 { normalised } else { -normalised };
            let violated = if size == d + 2 {
                signed.abs() > CAYLEY_MENGER_TOL
            } else {
                signed < -CAYLEY_MENGER_TOL
            };
            if violated {
                return Some(ConeWitness::CayleyMenger {
                    subset,
                    determinant: to_f64(&det),
                });
            }
        }
    }
    None
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Membership in the `d`-dimensional stratum: realizes the complete-graph
/// linkage with lengths `entry^{1/p}` in dimension `d`.
pub fn stratum_membership(
    dv: &DistanceVector,
    d: usize,
    p: NormParam,
    cfg: &RealizeConfig,
) -> Result<ConeMembershipReport> {
    if p == NormParam::Inf && d != 2 {
        return Err(Error::Unsupported(
            "l_inf strata are supported only in the plane".into(),
        ));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if p.is_euclidean() {
        if let Some(w) = cayley_menger_filter(dv, d) {
            return Ok(ConeMembershipReport::non_member(Some(w)));
        }
    }
    let l = dv.to_linkage(p);
    let r = realize(&l, d, p, cfg)?;
    Ok(match r.status {
        RealizeStatus::Feasible => ConeMembershipReport {
            member: Membership::Member,
            witness: r.framework.map(|f| ConeWitness::Points(f.points().to_vec())),
            embedding_dim: Some(d),
        },
        RealizeStatus::InfeasibleExact => ConeMembershipReport::non_member(None),
        RealizeStatus::UnknownNumeric => ConeMembershipReport {
            member: Membership::UnknownNumeric,
            witness: None,
            embedding_dim: None,
        },
    })
}

/// Membership in the whole l_p^p cone. l_2 and l_1 use their exact tests;
/// other `p` try the stratum of dimension `C(n, 2)`, which contains the cone.
pub fn cone_membership(dv: &DistanceVector, p: NormParam, cfg: &RealizeConfig) -> Result<ConeMembershipReport> {
    match p {
        NormParam::P(1) => cut_cone_membership(dv),
        NormParam::P(2) => edm_membership(dv),
        NormParam::Inf => Err(Error::Unsupported(
            "the l_inf cone has no membership test outside the plane".into(),
        )),
        NormParam::P(_) => {
            let n = dv.n();
            stratum_membership(dv, (n * n.saturating_sub(1) / 2).max(1), p, cfg)
        }
    }
}

/// A distance vector together with a configuration realizing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedVector {
    pub vector: DistanceVector,
    pub points: Vec<Vec<f64>>,
}

impl RealizedVector {
    pub fn from_points(points: Vec<Vec<f64>>, p: NormParam) -> Result<Self> {
        Ok(RealizedVector {
            vector: DistanceVector::from_points(&points, p)?,
            points,
        })
    }
}

/// `λ·r + (1-λ)·s` with the configuration `(λ^{1/p} r, (1-λ)^{1/p} s)`.
pub fn convex_combine(r: &RealizedVector, s: &RealizedVector, lambda: f64, p: NormParam) -> Result<RealizedVector> {
    let NormParam::P(k) = p else {
        return Err(Error::Unsupported("convex combination needs finite p".into()));
    };
    if r.vector.n() != s.vector.n() || r.points.len() != s.points.len() {
        return Err(Error::SizeMismatch {
            expected: r.vector.n(),
            found: s.vector.n(),
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Config(format!("lambda {lambda} outside [0, 1]")));
    }
    let a = lambda.powf(1.0 / k as f64);
    let b = (1.0 - lambda).powf(1.0 / k as f64);
    let points = r
        .points
        .iter()
        .zip(&s.points)
        .map(|(x, y)| x.iter().map(|v| a * v).chain(y.iter().map(|v| b * v)).collect())
        .collect();
    let entries = r
        .vector
        .entries()
        .iter()
        .zip(s.vector.entries())
        .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
        .collect();
    Ok(RealizedVector {
        vector: DistanceVector::new(r.vector.n(), entries)?,
        points,
    })
}

/// Exact l_1 convex combination of rational configurations. Returns the
/// combined distance vector and the concatenated configuration.
pub fn convex_combine_exact_l1(
    r: &[Vec<Rational>],
    s: &[Vec<Rational>],
    lambda: &Rational,
) -> Result<(Vec<Rational>, Vec<Vec<Rational>>)> {
    if r.len() != s.len() {
        return Err(Error::SizeMismatch {
            expected: r.len(),
            found: s.len(),
        });
    }
    if lambda.is_negative() || *lambda > Rational::one() {
        return Err(Error::Config("lambda outside [0, 1]".into()));
    }
    let mu = Rational::one() - lambda;
    let dr = exact_distance_vector(r, 1);
    let ds = exact_distance_vector(s, 1);
    let vector = dr.iter().zip(&ds).map(|(x, y)| lambda * x + &mu * y).collect();
    let points = r
        .iter()
        .zip(s)
        .map(|(x, y)| x.iter().map(|v| lambda * v).chain(y.iter().map(|v| &mu * v)).collect())
        .collect();
    Ok((vector, points))
}

/// l_p^p distance vector of rational points.
pub fn exact_distance_vector(points: &[Vec<Rational>], p: u32) -> Vec<Rational> {
    pairs(points.len())
        .map(|(i, j)| {
            points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| Pow::pow((a - b).abs(), p))
                .sum()
        })
        .collect()
}

/// Splits the distance vector of a `k`-dimensional configuration into `k`
/// one-dimensional terms `(1/k, k·δ^l)` whose weighted sum is the original.
pub fn decompose_to_1d(points: &[Vec<f64>], p: NormParam) -> Result<Vec<(f64, DistanceVector)>> {
    let NormParam::P(_) = p else {
        return Err(Error::Unsupported("l_inf distances are not additive over coordinates".into()));
    };
    let k = points.first().map_or(0, |q| q.len());
    if let Some(q) = points.iter().find(|q| q.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: q.len(),
        });
    }
    (0..k)
        .map(|l| {
            let line: Vec<Vec<f64>> = points.iter().map(|q| vec![q[l]]).collect();
            let dv = DistanceVector::from_points(&line, p)?;
            let scaled = dv.entries().iter().map(|x| x * k as f64).collect();
            Ok((1.0 / k as f64, DistanceVector::new(points.len(), scaled)?))
        })
        .collect()
}

/// Exact version of [`decompose_to_1d`].
pub fn decompose_to_1d_exact(points: &[Vec<Rational>], p: u32) -> Vec<(Rational, Vec<Rational>)> {
    let k = points.first().map_or(0, |q| q.len());
    let kq = Rational::from_integer(k.into());
    (0..k)
        .map(|l| {
            let line: Vec<Vec<Rational>> = points.iter().map(|q| vec![q[l].clone()]).collect();
            let scaled = exact_distance_vector(&line, p).into_iter().map(|x| x * &kq).collect();
            (Rational::one() / &kq, scaled)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use nalgebra::{DMatrix, SymmetricEigen};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::realize::verify_exact;
    use crate::metrics::Linkage;

    fn dv(n: usize, e: &[f64]) -> DistanceVector {
        DistanceVector::new(n, e.to_vec()).unwrap()
    }

    fn unit_square() -> Vec<Vec<f64>> {
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]
    }

    #[test]
    fn jacobi_matches_reference_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..8 {
            let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let sym: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[i][j] + a[j][i]).collect()).collect();
            let (mut ours, _) = jacobi_eigen(sym.clone());
            let m = DMatrix::from_fn(n, n, |i, j| sym[i][j]);
            let mut theirs: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().cloned().collect();
            ours.sort_by(f64::total_cmp);
            theirs.sort_by(f64::total_cmp);
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-10, "{ours:?} vs {theirs:?}");
            }
        }
    }

    #[test]
    fn edm_examples() {
        let r = edm_membership(&dv(4, &[1.0, 2.0, 1.0, 1.0, 2.0, 1.0])).unwrap();
        assert!(r.is_member());
        assert_eq!(r.embedding_dim, Some(2));
        let Some(ConeWitness::Points(pts)) = r.witness else { panic!() };
        let back = DistanceVector::from_points(&pts, NormParam::P(2)).unwrap();
        for (x, y) in back.entries().iter().zip([1.0, 2.0, 1.0, 1.0, 2.0, 1.0]) {
            assert!((x - y).abs() < 1e-10);
        }
        let r = edm_membership(&dv(3, &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!((r.member, r.embedding_dim), (Membership::Member, Some(2)));
        let r = edm_membership(&dv(3, &[1.0, 1.0, 9.0])).unwrap();
        assert_eq!(r.member, Membership::NonMember);
    }

    #[test]
    fn cut_cone_examples() {
        let line = vec![vec![0.0], vec![2.0], vec![3.5], vec![-1.0]];
        let r = cut_cone_membership(&DistanceVector::from_points(&line, NormParam::P(1)).unwrap()).unwrap();
        assert!(r.is_member());
        let r = cut_cone_membership(&dv(4, &[3.0; 6])).unwrap();
        assert!(r.is_member());
        let Some(ConeWitness::Cuts { points, .. }) = r.witness else { panic!() };
        let l = Linkage::uniform(crate::graph::presets::k4(), 3.0).unwrap();
        assert_eq!(verify_exact(&points, &l, NormParam::P(1)), Ok(()));
        let r = cut_cone_membership(&dv(3, &[1.0, 1.0, 9.0])).unwrap();
        assert_eq!(r.member, Membership::NonMember);
    }

    #[test]
    fn cut_cone_size_cap() {
        let n = 13;
        let e = vec![1.0; n * (n - 1) / 2];
        assert!(matches!(cut_cone_membership(&dv(n, &e)), Err(Error::SizeCapExceeded(_))));
    }

    #[test]
    fn stratum_examples() {
        let cfg = RealizeConfig {
            restarts: 20,
            ..RealizeConfig::default()
        };
        let sq = dv(4, &[1.0, 2.0, 1.0, 1.0, 2.0, 1.0]);
        assert!(stratum_membership(&sq, 2, NormParam::P(2), &cfg).unwrap().is_member());
        let ones = dv(5, &[1.0; 10]);
        let r = stratum_membership(&ones, 2, NormParam::P(2), &cfg).unwrap();
        assert_eq!(r.member, Membership::NonMember);
        assert!(matches!(r.witness, Some(ConeWitness::CayleyMenger { .. })));
        assert!(stratum_membership(&ones, 4, NormParam::P(2), &cfg).unwrap().is_member());
        assert!(stratum_membership(&ones, 3, NormParam::Inf, &cfg).is_err());
    }

    #[test]
    fn cayley_menger_triangle_sign() {
        let good = dv(3, &[9.0, 16.0, 25.0]);
        assert!(cayley_menger_filter(&good, 2).is_none());
        let bad = dv(3, &[1.0, 1.0, 9.0]);
        assert!(cayley_menger_filter(&bad, 2).is_some());
        // Collinear points pass in one dimension; a right triangle does not.
        assert!(cayley_menger_filter(&dv(3, &[1.0, 4.0, 1.0]), 1).is_none());
        assert!(cayley_menger_filter(&good, 1).is_some());
    }

    #[test]
    fn convex_combine_examples() {
        let p = NormParam::P(2);
        let r = RealizedVector::from_points(unit_square(), p).unwrap();
        let s = RealizedVector::from_points(vec![vec![0.0]; 4], p).unwrap();
        let c = convex_combine(&r, &s, 1.0, p).unwrap();
        assert_eq!(c.vector, r.vector);
        assert!(c.points.iter().all(|q| q.len() == 3 && q[2] == 0.0));
        let c = convex_combine(&r, &r, 0.5, p).unwrap();
        let back = DistanceVector::from_points(&c.points, p).unwrap();
        for (x, y) in back.entries().iter().zip(r.vector.entries()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(convex_combine(&r, &s, 1.5, p).is_err());
    }

    #[test]
    fn decomposition_of_unit_square() {
        let terms = decompose_to_1d(&unit_square(), NormParam::P(1)).unwrap();
        assert_eq!(terms.len(), 2);
        let n = 4;
        let mut sum = vec![0.0; 6];
        for (w, v) in &terms {
            assert_eq!(*w, 0.5);
            for (s, x) in sum.iter_mut().zip(v.entries()) {
                *s += w * x;
            }
        }
        assert_eq!(sum, vec![1.0, 2.0, 1.0, 1.0, 2.0, 1.0]);
        let single = decompose_to_1d(&[vec![0.0], vec![1.0]], NormParam::P(3)).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].0, 1.0);
        let flat = decompose_to_1d(&vec![vec![2.0, 2.0]; n], NormParam::P(2)).unwrap();
        assert!(flat.iter().all(|(_, v)| v.entries().iter().all(|&x| x == 0.0)));
    }
}
