use lpflat::cayley::{cayley_scan_1, cayley_scan_multi, inherent_convexity_audit, CayleyScanReport};
use lpflat::cone::stratum_membership;
use lpflat::graph::presets;
use lpflat::metrics::pairs;
use lpflat::realize::{realize, RealizeConfig, RealizeStatus};
use lpflat::{DistanceVector, Edge, Graph, Linkage, NormParam};

const L1: NormParam = NormParam::P(1);
const L2: NormParam = NormParam::P(2);

fn cfg() -> RealizeConfig {
    RealizeConfig {
        restarts: 30,
        ..RealizeConfig::default()
    }
}

fn unit_banana() -> Linkage {
    Linkage::uniform(presets::banana().delete_edge((2, 4)).unwrap(), 1.0).unwrap()
}

/// Every interval of the coarse scan meets an interval of the fine one, with
/// endpoints agreeing to within a coarse grid step.
fn refines(coarse: &CayleyScanReport, fine: &CayleyScanReport, step: f64) {
    assert!(fine.space.len() >= coarse.space.len());
    for c in coarse.space.intervals() {
        let hit = fine
            .space
            .intervals()
            .iter()
            .find(|f| f.lo <= c.hi + step && c.lo <= f.hi + step)
            .unwrap_or_else(|| panic!("{c:?} lost in {:?}", fine.space));
        assert!((hit.lo - c.lo).abs() <= step && (hit.hi - c.hi).abs() <= step);
    }
}

#[test]
fn doubling_the_grid_only_refines() {
    let cases: Vec<(Linkage, Edge, NormParam)> = vec![
        (unit_banana(), (2, 4), L1),
        (Linkage::uniform(presets::cycle(4), 1.0).unwrap(), (0, 2), L2),
        (Linkage::uniform(presets::cycle(5), 1.0).unwrap(), (0, 2), L1),
    ];
    for (l, f, p) in cases {
        let mut prev: Option<CayleyScanReport> = None;
        for grid in [26, 51, 101] {
            let scan = cayley_scan_1(&l, f, 2, p, grid, &cfg()).unwrap();
            if let Some(coarse) = &prev {
                refines(coarse, &scan, coarse.upper / (coarse.grid.len() - 1) as f64);
            }
            prev = Some(scan);
        }
    }
}

#[test]
fn attained_tuples_extend_to_realizations() {
    // Both non-edges of the unit banana: G plus F is K_5.
    let l = Linkage::uniform(presets::banana().delete_edge((2, 4)).unwrap(), 1.0).unwrap();
    let fs = [(2, 4), (3, 4)];
    let rep = cayley_scan_multi(&l, &fs, 2, L1, 12, &cfg()).unwrap();
    assert!(!rep.cloud.is_empty());
    for tuple in &rep.cloud {
        let mut aug = l.clone();
        for (&f, &t) in fs.iter().zip(tuple) {
            aug = aug.with_probe(f, t).unwrap();
        }
        let entries: Vec<f64> = pairs(5).map(|(u, v)| aug.length(u, v).unwrap()).collect();
        let dv = DistanceVector::new(5, entries).unwrap();
        assert!(stratum_membership(&dv, 2, L1, &cfg()).unwrap().is_member(), "{tuple:?}");
    }
    // A partial 2-tree in l_2 with one non-edge.
    let l = Linkage::uniform(presets::cycle(5), 1.0).unwrap();
    let rep = cayley_scan_multi(&l, &[(0, 2)], 2, L2, 12, &cfg()).unwrap();
    for tuple in &rep.cloud {
        let aug = l.with_probe((0, 2), tuple[0]).unwrap();
        assert_eq!(realize(&aug, 2, L2, &cfg()).unwrap().status, RealizeStatus::Feasible);
    }
}

#[test]
fn flattenable_graphs_never_refute() {
    let two_tree = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]).unwrap();
    let cases = [
        (presets::cycle(5), L1),
        (presets::cycle(5), L2),
        (two_tree.clone(), L1),
        (two_tree, L2),
        (presets::k4(), L1),
    ];
    for (g, p) in cases {
        let rep = inherent_convexity_audit(&g, 2, p, 6, 51, &cfg()).unwrap();
        assert!(rep.refutation.is_none(), "{g:?} p={p}: {:?}", rep.refutation);
        assert!(rep.scans > 0);
    }
}
