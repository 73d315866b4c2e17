use std::collections::HashMap;

use lpflat::cayley::inherent_convexity_audit;
use lpflat::flatten::{flatten_l1_d2, flatten_l2, FlattenStatus};
use lpflat::graph::presets;
use lpflat::minor::{all_connected_graphs, all_graphs, canonical_form, is_partial_two_tree, CanonicalForm};
use lpflat::realize::RealizeConfig;
use lpflat::rigidity::independence_check;
use lpflat::{Graph, NormParam};

use FlattenStatus::{No, Yes};

fn key(g: &Graph) -> CanonicalForm {
    canonical_form(g).expect("small graph")
}

fn one_step_minors(g: &Graph) -> Vec<Graph> {
    let n = g.vertex_count();
    let mut out: Vec<Graph> = g.edges().map(|e| g.delete_edge(e).unwrap()).collect();
    out.extend(g.edges().map(|e| g.contract_edge(e).unwrap()));
    out.extend((0..n).filter(|_| n > 1).map(|v| g.induced(&(0..n).filter(|&w| w != v).collect::<Vec<_>>())));
    out
}

#[test]
fn no_graph_with_a_no_minor_is_yes() {
    // A graph is tainted when it is NO or one of its one-step minors is
    // tainted; graphs come in order of size so minors are seen first.
    let mut tainted: HashMap<CanonicalForm, bool> = HashMap::new();
    let mut counts = [0usize; 3];
    for n in 1..=7 {
        let mut graphs = all_graphs(n);
        graphs.sort_by_key(Graph::edge_count);
        for g in graphs {
            let status = flatten_l1_d2(&g).unwrap().status;
            counts[status as usize] += 1;
            let bad = status == No || one_step_minors(&g).iter().any(|h| tainted[&key(h)]);
            assert!(!(bad && status == Yes), "YES graph with a NO minor: {g:?}");
            tainted.insert(key(&g), bad);
        }
    }
    assert!(counts.iter().all(|&c| c > 0), "{counts:?}");
}

#[test]
fn partial_two_trees_are_yes() {
    for n in 1..=6 {
        for g in all_graphs(n) {
            if is_partial_two_tree(&g).is_partial_two_tree {
                assert_eq!(flatten_l1_d2(&g).unwrap().status, Yes, "{g:?}");
            }
        }
    }
}

#[test]
fn euclidean_yes_is_strictly_inside_l1() {
    let mut strict = Vec::new();
    for n in 1..=5 {
        for g in all_connected_graphs(n) {
            let l2 = flatten_l2(&g, 2).unwrap().status;
            let l1 = flatten_l1_d2(&g).unwrap().status;
            if l2 == Yes {
                assert_eq!(l1, Yes, "{g:?}");
            } else if l1 != No {
                strict.push(g);
            }
        }
    }
    assert!(strict.iter().any(|g| *g == presets::k4()));
}

#[test]
fn yes_graphs_are_independent() {
    for n in 2..=6 {
        for g in all_connected_graphs(n) {
            if flatten_l1_d2(&g).unwrap().status == Yes {
                let (independent, r) = independence_check(&g, 2, NormParam::P(1), 8, 0).unwrap();
                assert!(independent, "{g:?} {r:?}");
            }
        }
    }
}

#[test]
fn five_vertex_no_verdicts_have_cayley_refutations() {
    let cfg = RealizeConfig {
        restarts: 10,
        ..RealizeConfig::default()
    };
    let mut checked = 0;
    for g in all_graphs(5) {
        let v = flatten_l1_d2(&g).unwrap();
        if v.status == No {
            let audit = inherent_convexity_audit(&g, 2, NormParam::P(1), 40, 101, &cfg).unwrap();
            assert!(audit.refutation.is_some(), "{g:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 2);
}
