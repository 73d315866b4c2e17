use lpflat::cone::{
    convex_combine, convex_combine_exact_l1, cut_cone_membership, cut_points, decompose_to_1d,
    decompose_to_1d_exact, edm_membership, exact_distance_vector, stratum_membership, ConeWitness,
    RealizedVector,
};
use lpflat::graph::presets;
use lpflat::lp::{to_rational, Rational};
use lpflat::metrics::rotate_linf_to_l1;
use lpflat::realize::{verify_framework, RealizeConfig};
use lpflat::{DistanceVector, Framework, NormParam};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect()
}

fn grid(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|_| {
            (0..d)
                .map(|_| Rational::new(rng.gen_range(-16..=16).into(), 4.into()))
                .collect()
        })
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

#[test]
fn convex_combinations_are_realized() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 1..=3 {
        let p = NormParam::P(k);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let (d1, d2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let r = RealizedVector::from_points(points(&mut rng, n, d1), p).unwrap();
            let s = RealizedVector::from_points(points(&mut rng, n, d2), p).unwrap();
            let lambda = rng.gen_range(0.0..=1.0);
            let c = convex_combine(&r, &s, lambda, p).unwrap();
            let direct = DistanceVector::from_points(&c.points, p).unwrap();
            assert!(close(direct.entries(), c.vector.entries(), 1e-10));
            let f = Framework::new(presets::complete(n), c.points.clone(), d1 + d2, p).unwrap();
            let rep = verify_framework(&f, &c.vector.to_linkage(p)).unwrap();
            assert!(rep.relative_residual <= 1e-10, "{rep:?}");
        }
    }
}

#[test]
fn linf_combinations_through_the_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let (a, b) = (points(&mut rng, n, 2), points(&mut rng, n, 2));
        let da = DistanceVector::from_points(&a, NormParam::Inf).unwrap();
        let db = DistanceVector::from_points(&b, NormParam::Inf).unwrap();
        let r = RealizedVector::from_points(rotate_linf_to_l1(&a).unwrap(), NormParam::P(1)).unwrap();
        let s = RealizedVector::from_points(rotate_linf_to_l1(&b).unwrap(), NormParam::P(1)).unwrap();
        let lambda = rng.gen_range(0.0..=1.0);
        let c = convex_combine(&r, &s, lambda, NormParam::P(1)).unwrap();
        let want: Vec<f64> = da
            .entries()
            .iter()
            .zip(db.entries())
            .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
            .collect();
        let got = DistanceVector::from_points(&c.points, NormParam::P(1)).unwrap();
        assert!(close(got.entries(), &want, 1e-10));
    }
}

#[test]
fn exact_l1_combinations() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let (d1, d2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let r = grid(&mut rng, n, d1);
        let s = grid(&mut rng, n, d2);
        let lambda = Rational::new(rng.gen_range(0..=7).into(), 7.into());
        let (vector, pts) = convex_combine_exact_l1(&r, &s, &lambda).unwrap();
        assert_eq!(exact_distance_vector(&pts, 1), vector);
    }
}

#[test]
fn one_dimensional_decomposition_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for k in 1..=3u32 {
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let d = rng.gen_range(1..=4);
            let pts = grid(&mut rng, n, d);
            let whole = exact_distance_vector(&pts, k);
            let mut sum = vec![Rational::zero(); whole.len()];
            let parts = decompose_to_1d_exact(&pts, k);
            assert_eq!(parts.iter().map(|(w, _)| w.clone()).sum::<Rational>(), Rational::one());
            for (w, v) in parts {
                for (acc, x) in sum.iter_mut().zip(v) {
                    *acc += &w * x;
                }
            }
            assert_eq!(sum, whole);

            let fpts: Vec<Vec<f64>> = pts.iter().map(|q| q.iter().map(lpflat::lp::to_f64).collect()).collect();
            let p = NormParam::P(k);
            let whole = DistanceVector::from_points(&fpts, p).unwrap();
            let mut sum = vec![0.0; whole.entries().len()];
            for (w, v) in decompose_to_1d(&fpts, p).unwrap() {
                for (acc, x) in sum.iter_mut().zip(v.entries()) {
                    *acc += w * x;
                }
            }
            assert!(close(&sum, whole.entries(), 1e-12));
        }
    }
}

#[test]
fn planar_l1_vectors_are_in_the_cut_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let pts: Vec<Vec<f64>> = grid(&mut rng, n, 2)
            .iter()
            .map(|q| q.iter().map(lpflat::lp::to_f64).collect())
            .collect();
        let dv = DistanceVector::from_points(&pts, NormParam::P(1)).unwrap();
        let rep = cut_cone_membership(&dv).unwrap();
        assert!(rep.is_member());
        let Some(ConeWitness::Cuts { cuts, points }) = rep.witness else { panic!("{rep:?}") };
        assert_eq!(cut_points(n, &cuts), points);
        let want: Vec<Rational> = dv.entries().iter().map(|&x| to_rational(x)).collect();
        assert_eq!(exact_distance_vector(&points, 1), want);
    }
}

#[test]
fn edm_embedding_dimension_is_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for d in 1..=3 {
        for _ in 0..30 {
            let n = rng.gen_range(2..=8);
            let dv = DistanceVector::from_points(&points(&mut rng, n, d), NormParam::P(2)).unwrap();
            let rep = edm_membership(&dv).unwrap();
            assert!(rep.is_member());
            assert!(rep.embedding_dim.unwrap() <= d);
        }
    }
}

#[test]
fn euclidean_strata_agree_with_schoenberg() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let cfg = RealizeConfig {
        restarts: 20,
        ..RealizeConfig::default()
    };
    let (mut members, mut rejected) = (0, 0);
    for _ in 0..30 {
        let n = rng.gen_range(3..=5);
        let src = rng.gen_range(1..=3);
        let dv = DistanceVector::from_points(&points(&mut rng, n, src), NormParam::P(2)).unwrap();
        for d in 1..=3 {
            let s = stratum_membership(&dv, d, NormParam::P(2), &cfg).unwrap();
            if s.is_member() {
                members += 1;
                let e = edm_membership(&dv).unwrap();
                assert!(e.is_member() && e.embedding_dim.unwrap() <= d);
            } else {
                rejected += 1;
            }
        }
    }
    assert!(members > 0 && rejected > 0);
}
