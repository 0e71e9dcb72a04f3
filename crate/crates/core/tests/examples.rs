//! Worked examples for each public operation, module by module.

use std::collections::BTreeSet;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use relaynet::builder::{
    build_ses, build_ses_unfiltered, order_variants, valid_pairs, CandidateType, EndpointPair, SteinerEndpointSequence,
};
use relaynet::geometry::{disk_feasible, smallest_colour_spanning_disk, ColourClasses};
use relaynet::graph::{
    block_cut_forest, find_branching_decomposition, is_critical_edge, prune_to_critical, Edge, Role,
};
use relaynet::linked::{bin_link, canonical_representative, detect_linked_sets, exhaustive_markers, split_sites};
use relaynet::placement::{optimize_placement, placement_feasible};
use relaynet::repair::{potential_cuts, two_connect};
use relaynet::threshold::{distance_levels, threshold_network, valid_subset_partition, SubsetKind};
use relaynet::*;

fn pts(xy: &[(f64, f64)]) -> Vec<Point> {
    xy.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Network {
    let mut g = Network::new();
    for _ in 0..n {
        g.add_vertex(Role::Terminal, None);
    }
    for &(a, b) in edges {
        g.add_edge(a, b).unwrap();
    }
    g
}

fn triangle() -> Vec<Point> {
    pts(&[(0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0)])
}

fn two_triangles() -> Vec<Point> {
    pts(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8), (5.0, 0.0), (6.0, 0.0), (5.5, 0.8)])
}

fn unit_path(n: usize) -> Vec<Point> {
    (0..n).map(|i| Point::new(i as f64, 0.0)).collect()
}

fn classes(c: &[&[(f64, f64)]]) -> ColourClasses {
    ColourClasses::new(c.iter().map(|cl| pts(cl)).collect()).unwrap()
}

fn edge_set(g: &Network) -> BTreeSet<Edge> {
    g.edges().collect()
}

// ---- geometry ----

#[test]
fn distance_in_three_norms() {
    let (a, b) = (Point::new(0.0, 0.0), Point::new(3.0, 4.0));
    assert_eq!(Metric::L2.dist(a, b), 5.0);
    assert_eq!(Metric::L1.dist(a, b), 7.0);
    assert_eq!(Metric::LInf.dist(a, b), 4.0);
}

#[test]
fn colour_disk_examples() {
    let d = smallest_colour_spanning_disk(&classes(&[&[(5.0, 5.0)]]), &Metric::L2);
    assert_abs_diff_eq!(d.center.x, 5.0, epsilon = 1e-9);
    assert_abs_diff_eq!(d.center.y, 5.0, epsilon = 1e-9);
    assert_abs_diff_eq!(d.radius, 0.0, epsilon = 1e-9);

    let d = smallest_colour_spanning_disk(&classes(&[&[(0.0, 0.0)], &[(2.0, 0.0)]]), &Metric::L2);
    assert_abs_diff_eq!(d.center.x, 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(d.center.y, 0.0, epsilon = 1e-9);
    assert_abs_diff_eq!(d.radius, 1.0, epsilon = 1e-9);

    let t = triangle();
    let c = ColourClasses::new(t.iter().map(|&p| vec![p]).collect()).unwrap();
    let d = smallest_colour_spanning_disk(&c, &Metric::L2);
    assert_abs_diff_eq!(d.radius, 1.0 / 3f64.sqrt(), epsilon = 1e-9);
}

#[test]
fn disk_feasibility_examples() {
    let c = classes(&[&[(0.0, 0.0)], &[(2.0, 0.0)]]);
    let w = disk_feasible(&c, &Metric::L2, 1.0).expect("radius 1 is feasible");
    assert_abs_diff_eq!(w.x, 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(w.y, 0.0, epsilon = 1e-6);
    assert!(disk_feasible(&c, &Metric::L2, 0.99).is_none());

    let t = triangle();
    let c = ColourClasses::new(t.iter().map(|&p| vec![p]).collect()).unwrap();
    let r = smallest_colour_spanning_disk(&c, &Metric::L2).radius;
    assert!(r < 0.58);
    assert!(disk_feasible(&c, &Metric::L2, 0.58).is_some());
}

// ---- graph ----

#[test]
fn two_connectivity_examples() {
    assert!(!is_two_connected(&graph(3, &[(0, 1), (1, 2)])));
    assert!(is_two_connected(&graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])));
}

#[test]
fn block_cut_forest_examples() {
    let f = block_cut_forest(&graph(3, &[(0, 1), (1, 2), (2, 0)]));
    assert_eq!(f.blocks.len(), 1);
    assert!(f.cut_vertices.is_empty());
    assert_eq!(f.leaf_weight(), 2);

    let f = block_cut_forest(&graph(3, &[(0, 1), (1, 2)]));
    let blocks: BTreeSet<BTreeSet<usize>> = f.blocks.iter().map(|b| b.vertices.clone()).collect();
    assert_eq!(blocks, BTreeSet::from([BTreeSet::from([0, 1]), BTreeSet::from([1, 2])]));
    assert_eq!(f.cut_vertices, BTreeSet::from([1]));
    assert_eq!(f.leaf_blocks().len(), 2);
    assert_eq!(f.leaf_weight(), 2);

    let bowtie = graph(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]);
    let f = block_cut_forest(&bowtie);
    assert_eq!(f.blocks.len(), 2);
    assert_eq!(f.cut_vertices, BTreeSet::from([0]));
    assert_eq!(f.leaf_blocks().len(), 2);
}

#[test]
fn critical_edge_examples() {
    let cycle = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    for e in cycle.edges() {
        assert!(is_critical_edge(&cycle, e).unwrap());
    }
    let chorded = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
    assert!(!is_critical_edge(&chorded, Edge::new(0, 2)).unwrap());

    let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    for e in k4.edges() {
        // K4 minus an edge still survives every single vertex removal
        let mut h = k4.clone();
        h.remove_edge(e.0, e.1).unwrap();
        let survives = (0..4).all(|v| {
            let mut r = h.clone();
            r.remove_vertex(v).unwrap();
            r.is_connected()
        });
        assert_eq!(is_critical_edge(&k4, e).unwrap(), !survives);
        assert!(!is_critical_edge(&k4, e).unwrap());
    }
}

#[test]
fn pruning_examples() {
    let mut g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    let s = g.add_vertex(Role::Steiner, None);
    g.add_edge(s, 0).unwrap();
    g.add_edge(s, 2).unwrap();
    let p = prune_to_critical(&g).unwrap();
    assert_eq!(
        edge_set(&p),
        BTreeSet::from([Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3), Edge::new(0, 3)])
    );

    let critical = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
    assert_eq!(edge_set(&prune_to_critical(&critical).unwrap()), edge_set(&critical));
}

#[test]
fn branching_decomposition_examples() {
    let base = graph(3, &[(0, 1), (1, 2)]);
    assert_eq!(find_branching_decomposition(&base, &base), Some(vec![]));

    // the relay edge to 2 is already part of the base; the edge to 0 joins
    // the interiors of the two leaf blocks {0,1} and {2,s}
    let mut base = graph(3, &[(0, 1), (1, 2)]);
    let s = base.add_vertex(Role::Steiner, None);
    base.add_edge(s, 2).unwrap();
    let mut n = base.clone();
    n.add_edge(s, 0).unwrap();
    assert_eq!(find_branching_decomposition(&n, &base), Some(vec![Edge::new(0, s)]));

    let x = two_triangles();
    let levels = distance_levels(&x, &Metric::L2);
    let g = threshold_network(&x, &Metric::L2, levels.ceil_index(1.0), 2).unwrap();
    let entries = build_ses(&g).unwrap();
    assert!(!entries.is_empty());
    for e in entries {
        assert!(find_branching_decomposition(&e.representative, &g.network).is_some());
    }
}

// ---- threshold ----

#[test]
fn distance_level_examples() {
    let collinear = pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
    assert_eq!(distance_levels(&collinear, &Metric::L2).values(), &[1.0, 2.0, 3.0]);
    let t = distance_levels(&triangle(), &Metric::L2);
    assert_eq!(t.len(), 1);
    assert_abs_diff_eq!(t.values()[0], 1.0, epsilon = 1e-12);
    let square = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    assert_eq!(distance_levels(&square, &Metric::L1).values(), &[1.0, 2.0]);
}

#[test]
fn threshold_network_examples() {
    let collinear = pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
    let at = |d| edge_set(&threshold_network(&collinear, &Metric::L2, d, 0).unwrap().network);
    assert_eq!(at(1), BTreeSet::from([Edge::new(0, 1)]));
    assert_eq!(at(2), BTreeSet::from([Edge::new(0, 1), Edge::new(1, 2)]));
    assert_eq!(at(3), BTreeSet::from([Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 2)]));
}

#[test]
fn cut_set_examples() {
    let path = threshold_network(&unit_path(3), &Metric::L2, 1, 1).unwrap();
    assert_eq!(path.cut_set, BTreeSet::from([1]));
    let tri = threshold_network(&triangle(), &Metric::L2, 1, 1).unwrap();
    assert!(tri.cut_set.is_empty());
    let bowtie = pts(&[(0.0, 0.0), (-1.0, 0.3), (-1.0, -0.3), (1.0, 0.3), (1.0, -0.3)]);
    let levels = distance_levels(&bowtie, &Metric::L2);
    let g = threshold_network(&bowtie, &Metric::L2, levels.ceil_index(1.09f64.sqrt()), 1).unwrap();
    assert_eq!(g.network.edge_count(), 6);
    assert_eq!(g.cut_set, BTreeSet::from([0]));
}

#[test]
fn valid_subset_examples() {
    let path = threshold_network(&unit_path(3), &Metric::L2, 1, 1).unwrap();
    let subs = valid_subset_partition(&path).unwrap();
    let mut got: Vec<(SubsetKind, BTreeSet<usize>)> = subs.iter().map(|s| (s.kind, s.members.clone())).collect();
    got.sort_by_key(|s| s.1.clone());
    assert_eq!(
        got,
        vec![
            (SubsetKind::LeafInterior, BTreeSet::from([0])),
            (SubsetKind::CutVertex, BTreeSet::from([1])),
            (SubsetKind::LeafInterior, BTreeSet::from([2])),
        ]
    );

    let tri = threshold_network(&triangle(), &Metric::L2, 1, 1).unwrap();
    let subs = valid_subset_partition(&tri).unwrap();
    assert_eq!(subs.len(), 1);
    assert_eq!(subs[0].kind, SubsetKind::IsolatedBlock);
    assert_eq!(subs[0].members, BTreeSet::from([0, 1, 2]));

    let x = two_triangles();
    let levels = distance_levels(&x, &Metric::L2);
    let g = threshold_network(&x, &Metric::L2, levels.ceil_index(1.0), 1).unwrap();
    let subs = valid_subset_partition(&g).unwrap();
    assert_eq!(subs.len(), 2);
    assert!(subs.iter().all(|s| s.kind == SubsetKind::IsolatedBlock && s.members.len() == 3));
}

// ---- builder ----

fn triangles_at_unit(k: usize) -> Arc<relaynet::threshold::UnderlyingNetwork> {
    let x = two_triangles();
    let levels = distance_levels(&x, &Metric::L2);
    Arc::new(threshold_network(&x, &Metric::L2, levels.ceil_index(1.0), k).unwrap())
}

#[test]
fn valid_pair_examples() {
    let g = triangles_at_unit(1);
    let s = g.steiner_ids[0];
    let pairs = valid_pairs(&g.network, &g).unwrap();
    assert_eq!(
        pairs,
        vec![EndpointPair::terminals(s, [0, 1, 2]), EndpointPair::terminals(s, [3, 4, 5])]
    );

    // s already touches every vertex of the first triangle
    let mut f = g.network.clone();
    for v in 0..3 {
        f.add_edge(s, v).unwrap();
    }
    assert_eq!(valid_pairs(&f, &g).unwrap(), vec![EndpointPair::terminals(s, [3, 4, 5])]);

    // connected with no two leaf blocks to join
    let tri = threshold_network(&triangle(), &Metric::L2, 1, 1).unwrap();
    let mut f = tri.network.clone();
    let s = tri.steiner_ids[0];
    f.add_edge(s, 0).unwrap();
    f.add_edge(s, 1).unwrap();
    assert!(valid_pairs(&f, &tri).unwrap().is_empty());
}

#[test]
fn build_ses_examples() {
    let tri = threshold_network(&triangle(), &Metric::L2, 1, 1).unwrap();
    assert!(build_ses(&tri).unwrap().is_empty());

    // a single relay is always a cut vertex between two components
    assert!(build_ses_unfiltered(&triangles_at_unit(1)).unwrap().is_empty());
    let g = triangles_at_unit(2);
    let entries = build_ses(&g).unwrap();
    assert!(!entries.is_empty());
    for e in &entries {
        assert!(is_two_connected(&e.representative));
        for side in [0..3, 3..6] {
            let touched = g.steiner_ids.iter().flat_map(|&s| e.representative.neighbors(s)).filter(|v| side.contains(v));
            assert!(touched.collect::<BTreeSet<_>>().len() >= 2);
        }
    }

    // an isolated triangle and a three-leaf star use up the whole budget
    let x = pts(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8), (10.0, 0.0), (11.0, 0.0), (9.5, 0.9), (9.5, -0.9)]);
    let levels = distance_levels(&x, &Metric::L2);
    let g = threshold_network(&x, &Metric::L2, levels.ceil_index(Metric::L2.dist(x[3], x[5])), 1).unwrap();
    assert_eq!(g.leaf_weight(), 5);
    for e in build_ses(&g).unwrap() {
        assert!(is_two_connected(&e.representative));
    }
}

#[test]
fn order_variant_examples() {
    let path = threshold_network(&unit_path(3), &Metric::L2, 1, 1).unwrap();
    let mut f = path.network.clone();
    let s = path.steiner_ids[0];
    f.add_edge(s, 0).unwrap();
    f.add_edge(s, 2).unwrap();
    let v = order_variants(&f, &path).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(edge_set(&v[0]), edge_set(&f));

    // two relays landing in the interior {2, 3} of a six-vertex path
    let long = threshold_network(&unit_path(6), &Metric::L2, 1, 2).unwrap();
    let (a, b) = (long.steiner_ids[0], long.steiner_ids[1]);
    let mut f = long.network.clone();
    for (u, w) in [(a, 0), (a, 2), (b, 5), (b, 3)] {
        f.add_edge(u, w).unwrap();
    }
    let v = order_variants(&f, &long).unwrap();
    assert!(v.len() >= 2);
    assert!(v.iter().any(|g| g.has_edge(a, 3) && g.has_edge(b, 2)));

    // two relays entering the same isolated triangle may share a vertex
    let g = triangles_at_unit(2);
    let (a, b) = (g.steiner_ids[0], g.steiner_ids[1]);
    let mut f = g.network.clone();
    for (u, w) in [(a, 0), (a, 3), (b, 1), (b, 4)] {
        f.add_edge(u, w).unwrap();
    }
    let v = order_variants(&f, &g).unwrap();
    assert!(v.iter().any(|h| (0..3).any(|x| h.has_edge(a, x) && h.has_edge(b, x))));
}

// ---- placement ----

fn lone_relay(x: Vec<Point>, ends: &[usize]) -> CandidateType {
    let g = Arc::new(threshold_network(&x, &Metric::L2, 0, 1).unwrap());
    let s = g.steiner_ids[0];
    let pairs = ends.iter().map(|&y| EndpointPair::terminals(s, [y])).collect();
    CandidateType::new(g, SteinerEndpointSequence::new(pairs))
}

fn chain() -> CandidateType {
    let g = Arc::new(threshold_network(&pts(&[(0.0, 0.0), (3.0, 0.0)]), &Metric::L2, 0, 2).unwrap());
    let (a, b) = (g.steiner_ids[0], g.steiner_ids[1]);
    CandidateType::new(
        g,
        SteinerEndpointSequence::new(vec![
            EndpointPair::terminals(a, [0]),
            EndpointPair::internal(a, b),
            EndpointPair::terminals(b, [1]),
        ]),
    )
}

#[test]
fn placement_examples() {
    let mid = lone_relay(pts(&[(0.0, 0.0), (4.0, 0.0)]), &[0, 1]);
    let p = optimize_placement(&mid).unwrap();
    let at = p.positions[&mid.g_un.steiner_ids[0]];
    assert_abs_diff_eq!(at.x, 2.0, epsilon = 1e-9);
    assert_abs_diff_eq!(at.y, 0.0, epsilon = 1e-9);
    assert_abs_diff_eq!(p.steiner_bottleneck, 2.0, epsilon = 1e-9);
    assert!(placement_feasible(&mid, 2.0).unwrap());
    assert!(!placement_feasible(&mid, 1.9).unwrap());

    let c = chain();
    let p = optimize_placement(&c).unwrap();
    let (a, b) = (c.g_un.steiner_ids[0], c.g_un.steiner_ids[1]);
    assert_abs_diff_eq!(p.positions[&a].x, 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(p.positions[&b].x, 2.0, epsilon = 1e-6);
    assert_abs_diff_eq!(p.bottleneck, 1.0, epsilon = 1e-7);
    assert!(placement_feasible(&c, 1.01).unwrap());

    let star = lone_relay(triangle(), &[0, 1, 2]);
    let p = optimize_placement(&star).unwrap();
    let at = p.positions[&star.g_un.steiner_ids[0]];
    assert_abs_diff_eq!(at.x, 0.5, epsilon = 1e-9);
    assert_abs_diff_eq!(at.y, 3f64.sqrt() / 6.0, epsilon = 1e-9);
    assert_abs_diff_eq!(p.steiner_bottleneck, 1.0 / 3f64.sqrt(), epsilon = 1e-9);
}

// ---- repair ----

#[test]
fn potential_cut_examples() {
    // path 0-1-2 closed by one relay through two distinct singletons
    let g = Arc::new(threshold_network(&pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]), &Metric::L2, 1, 1).unwrap());
    let t = CandidateType::new(
        g,
        SteinerEndpointSequence::new(vec![EndpointPair::terminals(3, [0]), EndpointPair::terminals(3, [2])]),
    );
    assert!(potential_cuts(&t).is_empty());
    let r = two_connect(&t).unwrap();
    assert_eq!(r.placement, optimize_placement(&t).unwrap());

    // two triangles, each entered three times by two relays: removing one
    // edge per relay never separates anything
    let g = triangles_at_unit(2);
    let (a, b) = (g.steiner_ids[0], g.steiner_ids[1]);
    let t = CandidateType::new(
        g,
        SteinerEndpointSequence::new(vec![
            EndpointPair::terminals(a, [0, 1, 2]),
            EndpointPair::terminals(a, [0, 1, 2]),
            EndpointPair::terminals(a, [3, 4, 5]),
            EndpointPair::terminals(a, [3, 4, 5]),
            EndpointPair::terminals(b, [0, 1, 2]),
            EndpointPair::terminals(b, [3, 4, 5]),
        ]),
    );
    assert!(potential_cuts(&t).is_empty());
}

#[test]
fn two_relays_sharing_a_class() {
    // three unit pairs in a ring; relays a and b both reach the pair {4, 5}
    let x = pts(&[(0.0, -3.0), (0.0, -2.0), (3.0, -4.0), (3.0, -3.0), (6.0, 0.0), (6.0, 1.0)]);
    let levels = distance_levels(&x, &Metric::L2);
    let g = Arc::new(threshold_network(&x, &Metric::L2, levels.ceil_index(1.0), 3).unwrap());
    let t = CandidateType::new(
        g,
        SteinerEndpointSequence::new(vec![
            EndpointPair::terminals(6, [0, 1]),
            EndpointPair::terminals(6, [4, 5]),
            EndpointPair::terminals(7, [4, 5]),
            EndpointPair::terminals(7, [2, 3]),
            EndpointPair::terminals(8, [2, 3]),
            EndpointPair::terminals(8, [0, 1]),
        ]),
    );
    let cuts = potential_cuts(&t);
    let shared = cuts.iter().find(|c| c.edges == vec![1, 2]).expect("the two edges into {4, 5} form a cut");
    // removing both edges really separates the pair from the rest
    let plain = optimize_placement(&t).unwrap();
    let mut n = plain.network(&t).unwrap();
    n.remove_edge(6, plain.endpoints[1]).unwrap();
    n.remove_edge(7, plain.endpoints[2]).unwrap();
    assert!(!n.is_connected());
    assert_eq!(shared.common_terminals, BTreeSet::from([4, 5]));

    let r = two_connect(&t).unwrap();
    assert!(is_two_connected(&r.network));
    assert!(r.bottleneck() >= plain.bottleneck - 1e-9);
}

// ---- linked ----

#[test]
fn linked_set_examples() {
    let mut n = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    let a = n.add_vertex(Role::Steiner, None);
    let b = n.add_vertex(Role::Steiner, None);
    n.add_edge(a, b).unwrap();
    let g_un = threshold_network(&unit_path(4), &Metric::L2, 0, 2).unwrap();
    assert!(detect_linked_sets(&n, &g_un).is_empty());

    let g = triangles_at_unit(2);
    for e in build_ses(&g).unwrap() {
        assert!(detect_linked_sets(&e.representative, &g).is_empty());
    }
}

fn path_with_relays(into_interior: usize) -> (CandidateType, Network) {
    let g = Arc::new(threshold_network(&unit_path(6), &Metric::L2, 1, 2).unwrap());
    let (a, b) = (g.steiner_ids[0], g.steiner_ids[1]);
    let t = CandidateType::new(
        g.clone(),
        SteinerEndpointSequence::new(vec![
            EndpointPair::terminals(a, [0]),
            EndpointPair::internal(a, b),
            EndpointPair::terminals(b, [5]),
            EndpointPair::terminals(b, [2, 3]),
        ]),
    );
    let mut n = g.network.clone();
    for (u, w) in [(a, 0), (a, b), (b, 5), (b, into_interior)] {
        n.add_edge(u, w).unwrap();
    }
    (t, n)
}

#[test]
fn canonical_representative_examples() {
    let path = threshold_network(&unit_path(3), &Metric::L2, 1, 1).unwrap();
    let s = path.steiner_ids[0];
    let t = CandidateType::new(
        Arc::new(path.clone()),
        SteinerEndpointSequence::new(vec![EndpointPair::terminals(s, [0]), EndpointPair::terminals(s, [2])]),
    );
    let mut n = path.network.clone();
    n.add_edge(s, 0).unwrap();
    n.add_edge(s, 2).unwrap();
    assert_eq!(edge_set(&canonical_representative(&n, &t, 0)), edge_set(&n));

    // the edge into the interior {2, 3} moves as far from 5 as it can
    let (t, n) = path_with_relays(3);
    let b = t.g_un.steiner_ids[1];
    let m = canonical_representative(&n, &t, 1);
    assert!(is_two_connected(&m));
    assert!(m.has_edge(b, 2) && !m.has_edge(b, 3));
    let (t, n) = path_with_relays(2);
    assert_eq!(edge_set(&canonical_representative(&n, &t, 1)), edge_set(&n));
}

#[test]
fn bin_link_examples() {
    let star = lone_relay(triangle(), &[0, 1, 2]);
    let g = star.g_un.clone();
    let entry = relaynet::builder::SesEntry {
        sequence: star.sequence.clone(),
        representative: optimize_placement(&star).unwrap().network(&star).unwrap(),
    };
    let plain = two_connect(&star).ok().map(|r| r.bottleneck());
    assert!(split_sites(&entry, &g).is_empty());
    assert_eq!(bin_link(&entry, &star).0.map(|r| r.bottleneck()), plain);

    // one splittable internal edge along a bent path of four terminals
    let x = pts(&[(0.0, 0.0), (1.0, 0.2), (2.0, -0.1), (3.0, 0.1)]);
    let levels = distance_levels(&x, &Metric::L2);
    let step = (1..4).map(|i| Metric::L2.dist(x[i - 1], x[i])).fold(0.0, f64::max);
    let g = Arc::new(threshold_network(&x, &Metric::L2, levels.ceil_index(step), 2).unwrap());
    assert_eq!(g.network.edge_count(), 3);
    let mut seen = 0;
    for e in build_ses(&g).unwrap() {
        let sites = split_sites(&e, &g);
        if sites.len() != 1 {
            continue;
        }
        seen += 1;
        let t = CandidateType::new(g.clone(), e.sequence.clone());
        let fast = bin_link(&e, &t).0.unwrap().bottleneck();
        let full = exhaustive_markers(&e, &t).unwrap().bottleneck();
        assert_abs_diff_eq!(fast, full, epsilon = 1e-7);
        if let Ok(base) = two_connect(&t) {
            assert!(fast <= base.bottleneck() + 1e-9);
        }
    }
    assert!(seen > 0);
}

// ---- driver and oracle ----

fn instance(x: Vec<Point>, k: usize) -> Instance {
    Instance::new(x, k, Metric::L2).unwrap()
}

#[test]
fn solve_examples() {
    let s = solve(&instance(triangle(), 0)).unwrap();
    assert_eq!(s.bottleneck, 1.0);
    assert_eq!(s.network.edge_count(), 3);

    let s = solve(&instance(triangle(), 2)).unwrap();
    assert_abs_diff_eq!(s.bottleneck, 1.0 / 3f64.sqrt(), epsilon = 1e-6);
    let centre = Point::new(0.5, 3f64.sqrt() / 6.0);
    let relays: Vec<Point> = s.network.steiner_points().map(|v| s.network.point(v).unwrap()).collect();
    assert_eq!(relays.len(), 2);
    assert!(relays.iter().all(|&p| Metric::L2.dist(p, centre) < 1e-6));
    assert_eq!(s.network.edge_count(), 6);
}

#[test]
fn solve_k0_examples() {
    let collinear = instance(pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]), 0);
    assert_eq!(solve_k0(&collinear).unwrap().bottleneck, 3.0);
    let square = instance(pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), 0);
    let s = solve_k0(&square).unwrap();
    assert_eq!(s.bottleneck, 1.0);
    assert_eq!(s.network.edge_count(), 4);
    let pair = instance(pts(&[(0.0, 0.0), (3.0, 4.0)]), 0);
    let s = solve_k0(&pair).unwrap();
    assert_eq!(s.network.edge_count(), 1);
    assert_eq!(s.bottleneck, 5.0);
}

#[test]
fn oracle_examples() {
    let cfg = OracleConfig::default();
    let s = naive_solve(&instance(pts(&[(0.0, 0.0), (3.0, 4.0)]), 0), &cfg).unwrap();
    assert_eq!(s.bottleneck, 5.0);
    assert_eq!(s.network.edge_count(), 1);

    let one = naive_solve(&instance(triangle(), 1), &cfg).unwrap().bottleneck;
    assert!(one >= 1.0 / 3f64.sqrt() - 1e-9 && one <= 1.0 + 1e-12);
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/triangle_k1.json")).unwrap();
    let golden = relaynet::format::SolutionFile::parse(&text).unwrap().bottleneck;
    assert_abs_diff_eq!(one, golden, epsilon = 1e-9);

    let two = naive_solve(&instance(triangle(), 2), &cfg).unwrap().bottleneck;
    assert_abs_diff_eq!(two, 1.0 / 3f64.sqrt(), epsilon = 1e-6);

    let too_big = instance(unit_path(8), 0);
    assert!(naive_solve(&too_big, &cfg).is_err());
    assert!(naive_solve(&instance(triangle(), 3), &cfg).is_err());
}
