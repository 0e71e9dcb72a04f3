//! Networks over terminals and Steiner points, block-cut forests and
//! criticality tests.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geometry::{Metric, Point};

pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub VertexId, pub VertexId);

impl Edge {
    /// Normalised so that the smaller id comes first.
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Terminal,
    Steiner,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop at {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Edge),
    #[error("no edge {0:?}")]
    MissingEdge(Edge),
    #[error("no vertex {0}")]
    MissingVertex(VertexId),
    #[error("network is not 2-connected")]
    NotTwoConnected,
}

/// A simple undirected graph. Removed vertices keep their id slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    roles: Vec<Role>,
    points: Vec<Option<Point>>,
    active: Vec<bool>,
    adj: Vec<BTreeSet<VertexId>>,
}

impl Default for Network {
    fn default() -> Self {
        Self::new()
    }
}

impl Network {
    pub fn new() -> Self {
        Self {
            roles: Vec::new(),
            points: Vec::new(),
            active: Vec::new(),
            adj: Vec::new(),
        }
    }

    /// Terminals `0..n` at the given points, no edges.
    pub fn with_terminals(points: &[Point]) -> Self {
        let mut g = Self::new();
        for p in points {
            g.add_vertex(Role::Terminal, Some(*p));
        }
        g
    }

    pub fn add_vertex(&mut self, role: Role, at: Option<Point>) -> VertexId {
        self.roles.push(role);
        self.points.push(at);
        self.active.push(true);
        self.adj.push(BTreeSet::new());
        self.roles.len() - 1
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        for v in [a, b] {
            if !self.contains(v) {
                return Err(GraphError::MissingVertex(v));
            }
        }
        if !self.adj[a].insert(b) {
            return Err(GraphError::DuplicateEdge(Edge::new(a, b)));
        }
        self.adj[b].insert(a);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if !self.has_edge(a, b) {
            return Err(GraphError::MissingEdge(Edge::new(a, b)));
        }
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
        Ok(())
    }

    /// Drops a vertex and its edges; the id is not reused.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if !self.contains(v) {
            return Err(GraphError::MissingVertex(v));
        }
        for u in std::mem::take(&mut self.adj[v]) {
            self.adj[u].remove(&v);
        }
        self.active[v] = false;
        Ok(())
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.active.len() && self.active[v]
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.contains(a) && self.adj[a].contains(&b)
    }

    /// Number of id slots, including removed ones.
    pub fn capacity(&self) -> usize {
        self.roles.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.roles.len()).filter(move |&v| self.active[v])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().count()
    }

    pub fn role(&self, v: VertexId) -> Role {
        self.roles[v]
    }

    pub fn is_steiner(&self, v: VertexId) -> bool {
        self.roles[v] == Role::Steiner
    }

    pub fn point(&self, v: VertexId) -> Option<Point> {
        self.points[v]
    }

    pub fn set_point(&mut self, v: VertexId, at: Point) {
        self.points[v] = Some(at);
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices()
            .flat_map(move |a| self.adj[a].iter().filter(move |&&b| a < b).map(move |&b| Edge(a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn terminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |&v| !self.is_steiner(v))
    }

    pub fn steiner_points(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |&v| self.is_steiner(v))
    }

    pub fn is_steiner_edge(&self, e: Edge) -> bool {
        self.is_steiner(e.0) || self.is_steiner(e.1)
    }

    pub fn steiner_edges(&self) -> Vec<Edge> {
        self.edges().filter(|e| self.is_steiner_edge(*e)).collect()
    }

    pub fn edge_length(&self, e: Edge, metric: &Metric) -> Option<f64> {
        Some(metric.dist(self.points[e.0]?, self.points[e.1]?))
    }

    /// Longest edge; `None` if some endpoint has no coordinates.
    pub fn bottleneck(&self, metric: &Metric) -> Option<f64> {
        self.edges()
            .map(|e| self.edge_length(e, metric))
            .try_fold(0.0f64, |acc, l| l.map(|l| acc.max(l)))
    }

    /// Connected components of the active vertices, each sorted.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.capacity()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// A biconnected component; isolated vertices form edgeless blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<Edge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockCutForest {
    pub blocks: Vec<Block>,
    pub cut_vertices: BTreeSet<VertexId>,
}

impl BlockCutForest {
    /// Cut vertices in block `b`; its degree in the forest.
    pub fn block_cuts(&self, b: usize) -> Vec<VertexId> {
        self.blocks[b]
            .vertices
            .iter()
            .copied()
            .filter(|v| self.cut_vertices.contains(v))
            .collect()
    }

    pub fn block_degree(&self, b: usize) -> usize {
        self.block_cuts(b).len()
    }

    pub fn blocks_of(&self, v: VertexId) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| self.blocks[b].vertices.contains(&v)).collect()
    }

    pub fn cut_degree(&self, v: VertexId) -> usize {
        self.blocks_of(v).len()
    }

    pub fn is_leaf(&self, b: usize) -> bool {
        self.block_degree(b) == 1
    }

    pub fn is_isolated(&self, b: usize) -> bool {
        self.block_degree(b) == 0
    }

    /// Non-cut vertices of block `b`.
    pub fn interior(&self, b: usize) -> BTreeSet<VertexId> {
        self.blocks[b]
            .vertices
            .iter()
            .copied()
            .filter(|v| !self.cut_vertices.contains(v))
            .collect()
    }

    pub fn leaf_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| self.is_leaf(b)).collect()
    }

    pub fn isolated_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| self.is_isolated(b)).collect()
    }

    /// Leaf blocks plus twice the isolated blocks.
    pub fn leaf_weight(&self) -> usize {
        self.leaf_blocks().len() + 2 * self.isolated_blocks().len()
    }
}

/// Hopcroft-Tarjan lowpoint decomposition over the active vertices.
pub fn block_cut_forest(g: &Network) -> BlockCutForest {
    let cap = g.capacity();
    let mut disc = vec![usize::MAX; cap];
    let mut low = vec![0; cap];
    let mut clock = 0;
    let mut blocks = Vec::new();
    let mut cut_vertices = BTreeSet::new();
    let mut edge_stack: Vec<Edge> = Vec::new();

    for root in g.vertices() {
        if disc[root] != usize::MAX {
            continue;
        }
        if g.degree(root) == 0 {
            disc[root] = clock;
            clock += 1;
            blocks.push(Block {
                vertices: BTreeSet::from([root]),
                edges: BTreeSet::new(),
            });
            continue;
        }
        disc[root] = clock;
        low[root] = clock;
        clock += 1;
        let mut root_children = 0;
        // (vertex, parent, remaining neighbours)
        let mut stack: Vec<(VertexId, VertexId, Vec<VertexId>)> =
            vec![(root, usize::MAX, g.neighbors(root).collect())];
        while let Some(top) = stack.last_mut() {
            let (v, parent) = (top.0, top.1);
            if let Some(u) = top.2.pop() {
                if disc[u] == usize::MAX {
                    edge_stack.push(Edge::new(v, u));
                    disc[u] = clock;
                    low[u] = clock;
                    clock += 1;
                    stack.push((u, v, g.neighbors(u).collect()));
                } else if u != parent && disc[u] < disc[v] {
                    edge_stack.push(Edge::new(v, u));
                    low[v] = low[v].min(disc[u]);
                }
                continue;
            }
            stack.pop();
            let Some(&(p, _, _)) = stack.last() else {
                continue;
            };
            low[p] = low[p].min(low[v]);
            if low[v] >= disc[p] {
                if p == root {
                    root_children += 1;
                } else {
                    cut_vertices.insert(p);
                }
                let split = Edge::new(p, v);
                let mut block = Block {
                    vertices: BTreeSet::new(),
                    edges: BTreeSet::new(),
                };
                while let Some(e) = edge_stack.pop() {
                    block.vertices.insert(e.0);
                    block.vertices.insert(e.1);
                    block.edges.insert(e);
                    if e == split {
                        break;
                    }
                }
                blocks.push(block);
            }
        }
        if root_children > 1 {
            cut_vertices.insert(root);
        }
    }
    BlockCutForest { blocks, cut_vertices }
}

/// K_1 and K_2 count as 2-connected.
pub fn is_two_connected(g: &Network) -> bool {
    match g.vertex_count() {
        0 => false,
        1 => true,
        _ => {
            let f = block_cut_forest(g);
            f.blocks.len() == 1 && f.blocks[0].vertices.len() == g.vertex_count()
        }
    }
}

/// Whether removing `e` destroys 2-connectivity.
pub fn is_critical_edge(g: &Network, e: Edge) -> Result<bool, GraphError> {
    if !is_two_connected(g) {
        return Err(GraphError::NotTwoConnected);
    }
    let mut h = g.clone();
    h.remove_edge(e.0, e.1)?;
    Ok(!is_two_connected(&h))
}

/// A maximal path whose interior vertices are degree-two Steiner points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordPath {
    pub ends: (VertexId, VertexId),
    pub interior: Vec<VertexId>,
    pub edges: Vec<Edge>,
}

fn is_relay(g: &Network, v: VertexId) -> bool {
    g.is_steiner(v) && g.degree(v) == 2
}

/// The chord path through a degree-two Steiner point.
pub fn chord_path_through(g: &Network, s: VertexId) -> Option<ChordPath> {
    if !g.contains(s) || !is_relay(g, s) {
        return None;
    }
    let nb: Vec<VertexId> = g.neighbors(s).collect();
    let mut sides = Vec::new();
    for start in nb {
        let (mut prev, mut cur) = (s, start);
        let mut inner = Vec::new();
        while is_relay(g, cur) && cur != s {
            inner.push(cur);
            let next = g.neighbors(cur).find(|&u| u != prev).unwrap();
            prev = cur;
            cur = next;
        }
        if cur == s {
            // a cycle made only of relays
            return None;
        }
        sides.push((cur, inner));
    }
    let (a, left) = sides.remove(0);
    let (b, right) = sides.remove(0);
    let mut interior: Vec<VertexId> = left.into_iter().rev().collect();
    interior.push(s);
    interior.extend(right);
    let mut seq = vec![a];
    seq.extend(&interior);
    seq.push(b);
    let edges = seq.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
    Some(ChordPath {
        ends: (a, b),
        interior,
        edges,
    })
}

/// All distinct chord paths.
pub fn chord_paths(g: &Network) -> Vec<ChordPath> {
    let mut out: Vec<ChordPath> = Vec::new();
    for s in g.steiner_points() {
        if let Some(p) = chord_path_through(g, s) {
            if !out.iter().any(|q| q.interior.contains(&s)) {
                out.push(p);
            }
        }
    }
    out
}

/// Whether removing the path interior destroys 2-connectivity.
pub fn is_critical_chord_path(g: &Network, p: &ChordPath) -> bool {
    let mut h = g.clone();
    for &v in &p.interior {
        let _ = h.remove_vertex(v);
    }
    !is_two_connected(&h)
}

/// Whether every Steiner edge and every chord path is critical.
pub fn is_steiner_critical(g: &Network) -> bool {
    if !is_two_connected(g) {
        return false;
    }
    g.steiner_edges().into_iter().all(|e| is_critical_edge(g, e).unwrap_or(false))
        && chord_paths(g).iter().all(|p| is_critical_chord_path(g, p))
}

/// Removes non-critical Steiner edges and chord paths until none remain.
pub fn prune_to_critical(g: &Network) -> Result<Network, GraphError> {
    if !is_two_connected(g) {
        return Err(GraphError::NotTwoConnected);
    }
    let mut g = g.clone();
    'scan: loop {
        for e in g.steiner_edges() {
            if !is_critical_edge(&g, e)? {
                g.remove_edge(e.0, e.1)?;
                continue 'scan;
            }
            for v in [e.0, e.1] {
                if let Some(p) = chord_path_through(&g, v) {
                    if !is_critical_chord_path(&g, &p) {
                        for &s in &p.interior {
                            g.remove_vertex(s)?;
                        }
                        continue 'scan;
                    }
                }
            }
        }
        break;
    }
    // drop Steiner points left without edges
    let idle: Vec<VertexId> = g.steiner_points().filter(|&s| g.degree(s) == 0).collect();
    for s in idle {
        g.remove_vertex(s)?;
    }
    Ok(g)
}

/// Whether the Steiner-to-Steiner edges form a forest.
pub fn steiner_topology_is_acyclic(g: &Network) -> bool {
    let mut parent: BTreeMap<VertexId, VertexId> = g.steiner_points().map(|s| (s, s)).collect();
    fn find(parent: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
        let p = parent[&v];
        if p == v {
            return v;
        }
        let r = find(parent, p);
        parent.insert(v, r);
        r
    }
    for e in g.edges() {
        if g.is_steiner(e.0) && g.is_steiner(e.1) {
            let (a, b) = (find(&mut parent, e.0), find(&mut parent, e.1));
            if a == b {
                return false;
            }
            parent.insert(a, b);
        }
    }
    true
}

/// An ordering of the Steiner edges satisfying the branching rules, if any.
///
/// Removing the first `j` edges leaves `N_j`; the `j`-th edge must join the
/// interiors of two distinct leaf blocks of a connected `N_j`, or, for
/// `j >= 2`, two distinct components of a disconnected `N_j`.
pub fn find_branching_decomposition(g: &Network, base: &Network) -> Option<Vec<Edge>> {
    let steiner: Vec<Edge> = g.edges().filter(|e| !base.has_edge(e.0, e.1)).collect();
    if steiner.len() > 24 {
        return None;
    }
    let mut dead = std::collections::HashSet::new();
    let mut order = Vec::new();
    if search_branching(g, &steiner, 0, &mut order, &mut dead) {
        Some(order.into_iter().map(|i| steiner[i]).collect())
    } else {
        None
    }
}

fn search_branching(
    g: &Network,
    steiner: &[Edge],
    removed: u32,
    order: &mut Vec<usize>,
    dead: &mut std::collections::HashSet<u32>,
) -> bool {
    if order.len() == steiner.len() {
        return true;
    }
    if dead.contains(&removed) {
        return false;
    }
    for i in 0..steiner.len() {
        if removed & (1 << i) != 0 {
            continue;
        }
        let next = removed | (1 << i);
        let mut h = g.clone();
        for (j, e) in steiner.iter().enumerate() {
            if next & (1 << j) != 0 {
                h.remove_edge(e.0, e.1).ok();
            }
        }
        let e = steiner[i];
        let step = order.len() + 1;
        let ok = if h.is_connected() {
            let f = block_cut_forest(&h);
            let leaves = f.leaf_blocks();
            let ia: Vec<usize> = leaves.iter().copied().filter(|&b| f.interior(b).contains(&e.0)).collect();
            let ib: Vec<usize> = leaves.iter().copied().filter(|&b| f.interior(b).contains(&e.1)).collect();
            ia.iter().any(|a| ib.iter().any(|b| a != b))
        } else {
            step >= 2 && h.components().iter().all(|c| !(c.contains(&e.0) && c.contains(&e.1)))
        };
        if ok {
            order.push(i);
            if search_branching(g, steiner, next, order, dead) {
                return true;
            }
            order.pop();
        }
    }
    dead.insert(removed);
    false
}
