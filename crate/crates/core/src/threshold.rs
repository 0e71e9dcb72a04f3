//! Distance levels, threshold graphs and the valid-subset partition.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geometry::{Metric, Point};
use crate::graph::{block_cut_forest, is_two_connected, BlockCutForest, Network, Role, VertexId};

// relative gap under which two distances are treated as one level
const LEVEL_MERGE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error("level index {index} out of range 0..={max}")]
    LevelOutOfRange { index: usize, max: usize },
    #[error("{weight} leaf-block weight exceeds the external edge budget {budget}")]
    TooManyLeafBlocks { weight: usize, budget: usize },
}

/// Ascending distinct pairwise terminal distances. Index 0 is the empty
/// level of length zero; index `d >= 1` is the `d`-th smallest distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceLevels {
    values: Vec<f64>,
}

impl DistanceLevels {
    pub fn new(terminals: &[Point], metric: &Metric) -> Self {
        let mut all = Vec::new();
        for (i, a) in terminals.iter().enumerate() {
            for b in &terminals[i + 1..] {
                all.push(metric.dist(*a, *b));
            }
        }
        all.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = Vec::new();
        for d in all {
            match values.last() {
                Some(&last) if d - last <= LEVEL_MERGE * last.max(1.0) => {}
                _ => values.push(d),
            }
        }
        Self { values }
    }

    /// Number of non-empty levels.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn length(&self, d: usize) -> f64 {
        if d == 0 {
            0.0
        } else {
            self.values[d - 1]
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest level whose length is at least `x`.
    pub fn ceil_index(&self, x: f64) -> usize {
        (0..=self.len())
            .find(|&d| self.length(d) >= x * (1.0 - LEVEL_MERGE))
            .unwrap_or(self.len())
    }
}

pub fn distance_levels(terminals: &[Point], metric: &Metric) -> DistanceLevels {
    DistanceLevels::new(terminals, metric)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubsetKind {
    LeafInterior,
    PathInterior,
    IsolatedBlock,
    CutVertex,
    /// Non-cut vertices of a block of degree at least three.
    BranchInterior,
}

/// One member of the valid-subset partition of the terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidSubset {
    pub kind: SubsetKind,
    pub members: BTreeSet<VertexId>,
    /// Blocks of the surrounding block path, in path order.
    pub chain: Vec<usize>,
    /// Position along the chain: `2j` inside block `j`, `2j + 1` on the cut
    /// vertex between blocks `j` and `j + 1`.
    pub keys: BTreeMap<VertexId, usize>,
}

impl ValidSubset {
    pub fn key(&self, v: VertexId) -> Option<usize> {
        self.keys.get(&v).copied()
    }
}

/// A threshold graph plus `k` isolated Steiner placeholders.
#[derive(Debug, Clone, PartialEq)]
pub struct UnderlyingNetwork {
    pub metric: Metric,
    pub level: usize,
    pub length: f64,
    pub terminal_count: usize,
    pub steiner_ids: Vec<VertexId>,
    pub network: Network,
    /// Block-cut forest of the terminal part.
    pub forest: BlockCutForest,
    pub cut_set: BTreeSet<VertexId>,
}

pub fn threshold_network(
    terminals: &[Point],
    metric: &Metric,
    d: usize,
    k: usize,
) -> Result<UnderlyingNetwork, ThresholdError> {
    threshold_network_with(terminals, metric, &DistanceLevels::new(terminals, metric), d, k)
}

pub fn threshold_network_with(
    terminals: &[Point],
    metric: &Metric,
    levels: &DistanceLevels,
    d: usize,
    k: usize,
) -> Result<UnderlyingNetwork, ThresholdError> {
    if d > levels.len() {
        return Err(ThresholdError::LevelOutOfRange {
            index: d,
            max: levels.len(),
        });
    }
    let length = levels.length(d);
    let mut g = Network::with_terminals(terminals);
    let n = terminals.len();
    if d > 0 {
        let cap = length * (1.0 + LEVEL_MERGE) + f64::MIN_POSITIVE;
        for i in 0..n {
            for j in i + 1..n {
                if metric.dist(terminals[i], terminals[j]) <= cap {
                    g.add_edge(i, j).expect("fresh edge");
                }
            }
        }
    }
    let forest = block_cut_forest(&g);
    let cut_set = forest
        .cut_vertices
        .iter()
        .copied()
        .filter(|&c| {
            forest.cut_degree(c) >= 3 || forest.blocks_of(c).into_iter().any(|b| forest.block_degree(b) != 2)
        })
        .collect();
    let steiner_ids = (0..k).map(|_| g.add_vertex(Role::Steiner, None)).collect();
    Ok(UnderlyingNetwork {
        metric: *metric,
        level: d,
        length,
        terminal_count: n,
        steiner_ids,
        network: g,
        forest,
        cut_set,
    })
}

impl UnderlyingNetwork {
    pub fn k(&self) -> usize {
        self.steiner_ids.len()
    }

    pub fn leaf_weight(&self) -> usize {
        self.forest.leaf_weight()
    }

    pub fn terminal_part_two_connected(&self) -> bool {
        let mut t = self.network.clone();
        for &s in &self.steiner_ids {
            t.remove_vertex(s).expect("placeholder");
        }
        is_two_connected(&t)
    }

    pub fn terminal_edges(&self) -> Vec<crate::graph::Edge> {
        self.network.edges().collect()
    }
}

/// Partition of the terminals into valid subsets, ordered by smallest member.
pub fn valid_subset_partition(g_un: &UnderlyingNetwork) -> Result<Vec<ValidSubset>, ThresholdError> {
    let budget = g_un.metric.max_steiner_degree() * g_un.k();
    let weight = g_un.leaf_weight();
    if weight > budget && !g_un.terminal_part_two_connected() {
        return Err(ThresholdError::TooManyLeafBlocks { weight, budget });
    }
    Ok(partition(g_un))
}

fn partition(g_un: &UnderlyingNetwork) -> Vec<ValidSubset> {
    let f = &g_un.forest;
    let cuts = &g_un.cut_set;
    let mut out = Vec::new();
    let plain = |kind, members: BTreeSet<VertexId>, chain: Vec<usize>| ValidSubset {
        kind,
        members,
        chain,
        keys: BTreeMap::new(),
    };
    for &c in cuts {
        out.push(plain(SubsetKind::CutVertex, BTreeSet::from([c]), f.blocks_of(c)));
    }
    let mut grouped = vec![false; f.blocks.len()];
    for b in 0..f.blocks.len() {
        match f.block_degree(b) {
            0 => out.push(plain(SubsetKind::IsolatedBlock, f.blocks[b].vertices.clone(), vec![b])),
            1 => out.push(plain(SubsetKind::LeafInterior, f.interior(b), vec![b])),
            2 => {
                if !grouped[b] {
                    out.push(degree_two_path(g_un, b, &mut grouped));
                }
            }
            _ => {
                let inner = f.interior(b);
                if !inner.is_empty() {
                    out.push(plain(SubsetKind::BranchInterior, inner, vec![b]));
                }
            }
        }
    }
    out.retain(|s| !s.members.is_empty());
    out.sort_by_key(|s| *s.members.iter().next().unwrap());
    out
}

// Degree-two blocks joined through cut vertices outside the cut set form a
// path; the chain adds the end blocks reached through degree-two cut
// vertices.
fn degree_two_path(g_un: &UnderlyingNetwork, start: usize, grouped: &mut [bool]) -> ValidSubset {
    let f = &g_un.forest;
    let cuts = &g_un.cut_set;
    let other = |b: usize, c: VertexId| f.blocks_of(c).into_iter().find(|&o| o != b);
    let links = |b: usize| -> Vec<(VertexId, usize)> {
        f.block_cuts(b)
            .into_iter()
            .filter(|c| !cuts.contains(c))
            .filter_map(|c| other(b, c).map(|o| (c, o)))
            .collect()
    };
    // find an end of the run containing `start`
    let (mut end, mut prev) = (start, None);
    while let Some((c, b)) = links(end).into_iter().find(|(c, _)| Some(*c) != prev) {
        if b == start {
            break;
        }
        prev = Some(c);
        end = b;
    }
    let mut run = vec![end];
    let mut used: Vec<VertexId> = Vec::new();
    let mut cur = end;
    while let Some((c, b)) = links(cur).into_iter().find(|(c, _)| !used.contains(c)) {
        used.push(c);
        run.push(b);
        cur = b;
    }
    for &b in &run {
        grouped[b] = true;
    }
    let members: BTreeSet<VertexId> = run
        .iter()
        .flat_map(|&b| f.blocks[b].vertices.iter().copied())
        .filter(|v| !cuts.contains(v))
        .collect();
    let mut free: Vec<(usize, VertexId)> = Vec::new();
    for &b in [run[0], *run.last().unwrap()].iter() {
        for c in f.block_cuts(b) {
            if !used.contains(&c) && !free.iter().any(|(_, d)| *d == c) {
                free.push((b, c));
            }
        }
    }
    let outer = |(b, c): (usize, VertexId)| {
        if f.cut_degree(c) == 2 {
            other(b, c)
        } else {
            None
        }
    };
    let mut chain = Vec::new();
    let front = free.iter().copied().find(|(b, _)| *b == run[0]);
    if let Some(b) = front.and_then(outer) {
        chain.push(b);
    }
    chain.extend(run.iter().copied());
    let back = free
        .iter()
        .copied()
        .filter(|x| Some(*x) != front)
        .find(|(b, _)| *b == *run.last().unwrap());
    if let Some(b) = back.and_then(outer) {
        chain.push(b);
    }
    let mut keys = BTreeMap::new();
    for (j, &b) in chain.iter().enumerate() {
        for &v in &f.blocks[b].vertices {
            let shared = chain.get(j + 1).is_some_and(|&nb| f.blocks[nb].vertices.contains(&v));
            keys.entry(v).or_insert(if shared { 2 * j + 1 } else { 2 * j });
        }
    }
    ValidSubset {
        kind: SubsetKind::PathInterior,
        members,
        chain,
        keys,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn collinear_levels() {
        let x = pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        let l = distance_levels(&x, &Metric::L2);
        assert_eq!(l.values(), &[1.0, 2.0, 3.0]);
        let g = threshold_network(&x, &Metric::L2, 1, 0).unwrap();
        let edges: Vec<_> = g.network.edges().collect();
        assert_eq!(edges, vec![crate::graph::Edge(0, 1)]);
        assert!(threshold_network(&x, &Metric::L2, 4, 0).is_err());
    }

    #[test]
    fn empty_level_has_isolated_terminals() {
        let x = pts(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]);
        let g = threshold_network(&x, &Metric::L2, 0, 2).unwrap();
        assert_eq!(g.leaf_weight(), 6);
        assert_eq!(g.steiner_ids, vec![3, 4]);
        let parts = valid_subset_partition(&g).unwrap();
        assert_eq!(parts.len(), 3);
        assert!(parts.iter().all(|p| p.kind == SubsetKind::IsolatedBlock));
        let tight = threshold_network(&x, &Metric::L2, 0, 0).unwrap();
        assert!(valid_subset_partition(&tight).is_err());
    }

    #[test]
    fn path_of_points_is_partitioned() {
        // 0-1-2-3-4 spaced 1 apart: blocks are single edges
        let x = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]);
        let g = threshold_network(&x, &Metric::L2, 1, 1).unwrap();
        let parts = valid_subset_partition(&g).unwrap();
        let all: BTreeSet<VertexId> = parts.iter().flat_map(|p| p.members.iter().copied()).collect();
        assert_eq!(all.len(), 5);
        assert_eq!(parts.iter().map(|p| p.members.len()).sum::<usize>(), 5);
        let path = parts.iter().find(|p| p.kind == SubsetKind::PathInterior).unwrap();
        assert_eq!(path.members, BTreeSet::from([2]));
    }
}
