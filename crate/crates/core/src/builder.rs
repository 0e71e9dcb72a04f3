//! Steiner endpoint sequences, candidate types and their enumeration.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{
    block_cut_forest, is_steiner_critical, is_two_connected, steiner_topology_is_acyclic, Edge, GraphError,
    Network, VertexId,
};
use crate::linked::detect_linked_sets;
use crate::threshold::{valid_subset_partition, SubsetKind, ThresholdError, UnderlyingNetwork, ValidSubset};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuilderError {
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("choice {choice} is not an admissible endpoint of pair {pair}")]
    BadChoice { pair: usize, choice: VertexId },
    #[error("expected {expected} endpoint choices, got {got}")]
    ChoiceCount { expected: usize, got: usize },
}

/// The far end of a labelled edge: another Steiner point or a terminal set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoints {
    Steiner(VertexId),
    Terminals(BTreeSet<VertexId>),
}

impl Endpoints {
    pub fn contains(&self, v: VertexId) -> bool {
        match self {
            Endpoints::Steiner(s) => *s == v,
            Endpoints::Terminals(y) => y.contains(&v),
        }
    }

    pub fn terminals(&self) -> Option<&BTreeSet<VertexId>> {
        match self {
            Endpoints::Terminals(y) => Some(y),
            Endpoints::Steiner(_) => None,
        }
    }

    pub fn is_external(&self) -> bool {
        matches!(self, Endpoints::Terminals(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndpointPair {
    pub steiner: VertexId,
    pub ends: Endpoints,
}

impl EndpointPair {
    pub fn terminals(s: VertexId, y: impl IntoIterator<Item = VertexId>) -> Self {
        Self {
            steiner: s,
            ends: Endpoints::Terminals(y.into_iter().collect()),
        }
    }

    pub fn internal(s: VertexId, t: VertexId) -> Self {
        Self {
            steiner: s,
            ends: Endpoints::Steiner(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SteinerEndpointSequence {
    pub pairs: Vec<EndpointPair>,
}

impl SteinerEndpointSequence {
    pub fn new(pairs: Vec<EndpointPair>) -> Self {
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Steiner points touched by some pair.
    pub fn steiner_points(&self) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for p in &self.pairs {
            out.insert(p.steiner);
            if let Endpoints::Steiner(t) = p.ends {
                out.insert(t);
            }
        }
        out
    }

    /// Sorted pair list, minimised over relabellings of the Steiner points.
    pub fn canonical(&self) -> Vec<EndpointPair> {
        let ids: Vec<VertexId> = self.steiner_points().into_iter().collect();
        let mut best: Option<Vec<EndpointPair>> = None;
        for perm in permutations(ids.len()) {
            let map: BTreeMap<VertexId, VertexId> = ids.iter().zip(perm.iter().map(|&i| ids[i])).map(|(a, b)| (*a, b)).collect();
            let mut relabelled: Vec<EndpointPair> = self
                .pairs
                .iter()
                .map(|p| {
                    let s = map[&p.steiner];
                    match &p.ends {
                        Endpoints::Steiner(t) => {
                            let t = map[t];
                            EndpointPair::internal(s.min(t), s.max(t))
                        }
                        Endpoints::Terminals(y) => EndpointPair::terminals(s, y.iter().copied()),
                    }
                })
                .collect();
            relabelled.sort();
            if best.as_ref().is_none_or(|b| relabelled < *b) {
                best = Some(relabelled);
            }
        }
        best.unwrap_or_default()
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// A sequence together with the underlying network it augments.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateType {
    pub g_un: Arc<UnderlyingNetwork>,
    pub sequence: SteinerEndpointSequence,
}

impl CandidateType {
    pub fn new(g_un: Arc<UnderlyingNetwork>, sequence: SteinerEndpointSequence) -> Self {
        Self { g_un, sequence }
    }

    pub fn pairs(&self) -> &[EndpointPair] {
        &self.sequence.pairs
    }

    /// The network choosing `choices[i]` for pair `i`; internal pairs
    /// accept only their fixed partner.
    pub fn representative(&self, choices: &[VertexId]) -> Result<Network, BuilderError> {
        if choices.len() != self.pairs().len() {
            return Err(BuilderError::ChoiceCount {
                expected: self.pairs().len(),
                got: choices.len(),
            });
        }
        let mut g = self.g_un.network.clone();
        for (i, (p, &c)) in self.pairs().iter().zip(choices).enumerate() {
            if !p.ends.contains(c) {
                return Err(BuilderError::BadChoice { pair: i, choice: c });
            }
            g.add_edge(p.steiner, c)?;
        }
        for s in self.g_un.steiner_ids.iter().copied() {
            if g.degree(s) == 0 {
                g.remove_vertex(s)?;
            }
        }
        Ok(g)
    }

    /// Whether `n` realises this type for some choice of endpoints.
    pub fn admits(&self, n: &Network) -> bool {
        let edges: Vec<Edge> = n.steiner_edges();
        if edges.len() != self.pairs().len() {
            return false;
        }
        if self.g_un.network.edges().any(|e| !n.has_edge(e.0, e.1))
            || n.edges().filter(|e| !n.is_steiner_edge(*e)).count() != self.g_un.network.edge_count()
        {
            return false;
        }
        let options: Vec<Vec<usize>> = self
            .pairs()
            .iter()
            .map(|p| {
                edges
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.touches(p.steiner) && p.ends.contains(e.other(p.steiner)))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        crate::geometry::distinct_representatives(&options).is_some()
    }
}

/// One recorded sequence with its 2-connected representative.
#[derive(Debug, Clone, PartialEq)]
pub struct SesEntry {
    pub sequence: SteinerEndpointSequence,
    pub representative: Network,
}

struct Ctx<'a> {
    g_un: &'a UnderlyingNetwork,
    subsets: Vec<ValidSubset>,
    subset_of: BTreeMap<VertexId, usize>,
    delta: usize,
    cap: usize,
    visited: HashSet<(Vec<Edge>, Vec<EndpointPair>)>,
    out: Vec<SesEntry>,
}

impl<'a> Ctx<'a> {
    fn new(g_un: &'a UnderlyingNetwork) -> Result<Self, BuilderError> {
        let subsets = valid_subset_partition(g_un)?;
        let mut subset_of = BTreeMap::new();
        for (i, s) in subsets.iter().enumerate() {
            for &v in &s.members {
                subset_of.insert(v, i);
            }
        }
        let delta = g_un.metric.max_steiner_degree();
        Ok(Self {
            g_un,
            subsets,
            subset_of,
            delta,
            cap: delta * g_un.k(),
            visited: HashSet::new(),
            out: Vec::new(),
        })
    }
}

/// Valid pairs for `f`, an augmentation of `g_un`.
pub fn valid_pairs(f: &Network, g_un: &UnderlyingNetwork) -> Result<Vec<EndpointPair>, BuilderError> {
    let ctx = Ctx::new(g_un)?;
    Ok(pairs_for(&ctx, f))
}

fn pairs_for(ctx: &Ctx, f: &Network) -> Vec<EndpointPair> {
    let steiner = &ctx.g_un.steiner_ids;
    let untouched: Vec<VertexId> = steiner.iter().copied().filter(|&s| f.degree(s) == 0).collect();
    // placeholders are interchangeable; only the lowest untouched ones may start
    let fresh_ok = |used: &[VertexId]| {
        let fresh: Vec<VertexId> = used.iter().copied().filter(|s| untouched.contains(s)).collect();
        fresh.iter().all(|s| untouched[..fresh.len()].contains(s))
    };
    let roomy = |s: VertexId| f.degree(s) < ctx.delta;
    let mut out = Vec::new();
    let comps = f.components();
    if comps.len() > 1 {
        let comp_of = |v: VertexId| comps.iter().position(|c| c.contains(&v)).unwrap();
        for &s in steiner {
            if !roomy(s) {
                continue;
            }
            for &t in steiner {
                if t > s && roomy(t) && comp_of(s) != comp_of(t) && fresh_ok(&[s, t]) {
                    out.push(EndpointPair::internal(s, t));
                }
            }
            if !fresh_ok(&[s]) {
                continue;
            }
            for sub in &ctx.subsets {
                let first = *sub.members.iter().next().unwrap();
                if comp_of(first) != comp_of(s) {
                    out.push(EndpointPair::terminals(s, sub.members.iter().copied()));
                }
            }
        }
    } else {
        let bcf = block_cut_forest(f);
        let leaves = bcf.leaf_blocks();
        for &b in &leaves {
            let inner = bcf.interior(b);
            for &s in inner.iter().filter(|&&s| f.is_steiner(s) && roomy(s)) {
                for &b2 in leaves.iter().filter(|&&b2| b2 != b) {
                    let inner2 = bcf.interior(b2);
                    for &t in inner2.iter().filter(|&&t| f.is_steiner(t)) {
                        if t > s && roomy(t) && !f.has_edge(s, t) {
                            out.push(EndpointPair::internal(s, t));
                        }
                    }
                    for sub in &ctx.subsets {
                        let y: BTreeSet<VertexId> =
                            sub.members.intersection(&bcf.blocks[b2].vertices).copied().collect();
                        if !y.is_empty() && y.iter().any(|&u| !f.has_edge(s, u)) {
                            out.push(EndpointPair::terminals(s, y));
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

// Endpoint for a new edge from `s` into `y`: unused, preferably in the
// interior of a leaf block away from `s`, smallest id.
fn pick_endpoint(f: &Network, s: VertexId, y: &BTreeSet<VertexId>) -> Option<VertexId> {
    let free: Vec<VertexId> = y.iter().copied().filter(|&u| !f.has_edge(s, u)).collect();
    if f.is_connected() {
        let bcf = block_cut_forest(f);
        for &u in &free {
            if bcf
                .leaf_blocks()
                .into_iter()
                .any(|b| bcf.interior(b).contains(&u) && !bcf.blocks[b].vertices.contains(&s))
            {
                return Some(u);
            }
        }
    }
    free.first().copied()
}

/// Every recorded sequence and representative, before filtering.
pub fn build_ses_unfiltered(g_un: &UnderlyingNetwork) -> Result<Vec<SesEntry>, BuilderError> {
    let mut ctx = Ctx::new(g_un)?;
    explore(&mut ctx, g_un.network.clone(), Vec::new(), false);
    Ok(ctx.out)
}

/// Sequences whose representative is 2-connected, critical, degree-bounded
/// and free of linked sets; one entry per sequence up to Steiner relabelling.
pub fn build_ses(g_un: &UnderlyingNetwork) -> Result<Vec<SesEntry>, BuilderError> {
    let raw = build_ses_unfiltered(g_un)?;
    let delta = g_un.metric.max_steiner_degree();
    let mut seen: HashSet<Vec<EndpointPair>> = HashSet::new();
    let mut out = Vec::new();
    for entry in raw {
        let key = entry.sequence.canonical();
        if seen.contains(&key) {
            continue;
        }
        let rep = &entry.representative;
        let ok = rep.steiner_points().all(|s| rep.degree(s) <= delta)
            && steiner_topology_is_acyclic(rep)
            && is_steiner_critical(rep)
            && detect_linked_sets(rep, g_un).is_empty();
        if ok {
            seen.insert(key);
            out.push(entry);
        }
    }
    Ok(out)
}

fn explore(ctx: &mut Ctx, f: Network, pairs: Vec<EndpointPair>, was_connected: bool) {
    let mut key_pairs = pairs.clone();
    key_pairs.sort();
    if !ctx.visited.insert((f.edges().collect(), key_pairs)) {
        return;
    }
    let connected = f.is_connected();
    let candidates = pairs_for(ctx, &f);
    if pairs.len() == ctx.cap || candidates.is_empty() {
        if is_two_connected(&f) {
            ctx.out.push(SesEntry {
                sequence: SteinerEndpointSequence::new(pairs),
                representative: f,
            });
        }
        return;
    }
    let variants = if connected && !was_connected && !pairs.is_empty() {
        order_in(ctx, &f)
    } else {
        vec![f]
    };
    for g in variants {
        let options = pairs_for(ctx, &g);
        for p in options {
            let x = match &p.ends {
                Endpoints::Steiner(t) => Some(*t),
                Endpoints::Terminals(y) => pick_endpoint(&g, p.steiner, y),
            };
            let Some(x) = x else { continue };
            let mut next = g.clone();
            if next.add_edge(p.steiner, x).is_err() {
                continue;
            }
            let mut seq = pairs.clone();
            seq.push(p);
            explore(ctx, next, seq, connected);
        }
    }
}

/// Relocations of terminal endpoints of Steiner edges within their valid
/// subsets: every relative order along degree-two block paths and every
/// pattern of shared endpoints. `f` itself comes first.
pub fn order_variants(f: &Network, g_un: &UnderlyingNetwork) -> Result<Vec<Network>, BuilderError> {
    let ctx = Ctx::new(g_un)?;
    Ok(order_in(&ctx, f))
}

fn order_in(ctx: &Ctx, f: &Network) -> Vec<Network> {
    let external: Vec<(VertexId, VertexId)> = f
        .steiner_edges()
        .into_iter()
        .filter_map(|e| match (f.is_steiner(e.0), f.is_steiner(e.1)) {
            (true, false) => Some((e.0, e.1)),
            (false, true) => Some((e.1, e.0)),
            _ => None,
        })
        .collect();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(_, x)) in external.iter().enumerate() {
        if let Some(&sub) = ctx.subset_of.get(&x) {
            groups.entry(sub).or_default().push(i);
        }
    }
    // per group, the alternative endpoint lists
    let mut options: Vec<(Vec<usize>, Vec<Vec<VertexId>>)> = Vec::new();
    for (sub, idx) in groups {
        let subset = &ctx.subsets[sub];
        let owners: Vec<VertexId> = idx.iter().map(|&i| external[i].0).collect();
        let mut alts = realisations(subset, idx.len());
        alts.retain(|a| {
            let mut seen = HashSet::new();
            owners.iter().zip(a).all(|(s, x)| seen.insert((*s, *x)))
        });
        options.push((idx, alts));
    }
    let mut out = vec![f.clone()];
    let mut seen: HashSet<Vec<Edge>> = HashSet::from([f.edges().collect()]);
    let mut current: Vec<VertexId> = external.iter().map(|&(_, x)| x).collect();
    product(&options, 0, &mut current, &mut |ends| {
        let mut g = f.clone();
        for (&(s, x), _) in external.iter().zip(ends) {
            g.remove_edge(s, x).unwrap();
        }
        for (&(s, _), &y) in external.iter().zip(ends) {
            if g.add_edge(s, y).is_err() {
                return;
            }
        }
        if seen.insert(g.edges().collect()) {
            out.push(g);
        }
    });
    out
}

fn product(
    options: &[(Vec<usize>, Vec<Vec<VertexId>>)],
    at: usize,
    current: &mut Vec<VertexId>,
    visit: &mut dyn FnMut(&[VertexId]),
) {
    if at == options.len() {
        visit(current);
        return;
    }
    let (idx, alts) = &options[at];
    for alt in alts {
        let saved: Vec<VertexId> = idx.iter().map(|&i| current[i]).collect();
        for (&i, &x) in idx.iter().zip(alt) {
            current[i] = x;
        }
        product(options, at + 1, current, visit);
        for (&i, x) in idx.iter().zip(saved) {
            current[i] = x;
        }
    }
}

// Endpoint lists for `r` edges into one valid subset, one per distinct
// arrangement (shared-endpoint pattern, plus relative order along a path).
fn realisations(subset: &ValidSubset, r: usize) -> Vec<Vec<VertexId>> {
    let members: Vec<VertexId> = subset.members.iter().copied().collect();
    let mut out = Vec::new();
    for classes in set_partitions(r) {
        let c = classes.iter().copied().max().map_or(0, |m| m + 1);
        if c > members.len() {
            continue;
        }
        if subset.kind != SubsetKind::PathInterior {
            out.push(classes.iter().map(|&k| members[k]).collect());
            continue;
        }
        // group members by position key
        let mut by_key: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for &v in &members {
            by_key.entry(subset.key(v).unwrap_or(0)).or_default().push(v);
        }
        for levels in ordered_partitions(c) {
            let m = levels.iter().copied().max().map_or(0, |x| x + 1);
            let mut assign = vec![usize::MAX; c];
            let mut floor = None;
            let mut ok = true;
            for l in 0..m {
                let here: Vec<usize> = (0..c).filter(|&k| levels[k] == l).collect();
                let slot = by_key
                    .iter()
                    .find(|(key, vs)| floor.is_none_or(|f| **key > f) && vs.len() >= here.len());
                match slot {
                    Some((key, vs)) => {
                        floor = Some(*key);
                        for (j, &k) in here.iter().enumerate() {
                            assign[k] = vs[j];
                        }
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.push(classes.iter().map(|&k| assign[k]).collect());
            }
        }
    }
    out
}

/// Restricted growth strings of length `r`.
fn set_partitions(r: usize) -> Vec<Vec<usize>> {
    fn go(r: usize, cur: &mut Vec<usize>, top: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for k in 0..=top {
            cur.push(k);
            go(r, cur, if k == top { top + 1 } else { top }, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(r, &mut Vec::new(), 0, &mut out);
    out
}

/// Surjections from `c` items onto `0..m` for every `m`.
fn ordered_partitions(c: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for m in 1..=c.max(1) {
        let mut cur = vec![0; c];
        loop {
            let mut hit = vec![false; m];
            for &x in &cur {
                hit[x] = true;
            }
            if hit.iter().all(|&h| h) {
                out.push(cur.clone());
            }
            let mut i = 0;
            while i < c {
                cur[i] += 1;
                if cur[i] < m {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
            if i == c {
                break;
            }
        }
        if c == 0 {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Metric, Point};
    use crate::threshold::threshold_network;

    fn two_triangles() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 0.8),
            Point::new(5.0, 0.0),
            Point::new(6.0, 0.0),
            Point::new(5.5, 0.8),
        ]
    }

    #[test]
    fn triangle_needs_no_steiner_type() {
        let x = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 3f64.sqrt() / 2.0)];
        let g = threshold_network(&x, &Metric::L2, 1, 1).unwrap();
        assert!(build_ses(&g).unwrap().is_empty());
    }

    #[test]
    fn disjoint_triangles_pairs() {
        let x = two_triangles();
        let levels = crate::threshold::distance_levels(&x, &Metric::L2);
        let d = levels.ceil_index(1.0);
        // one relay would be a cut vertex, so two are needed
        let g = threshold_network(&x, &Metric::L2, d, 1).unwrap();
        assert!(build_ses_unfiltered(&g).unwrap().is_empty());
        let g = threshold_network(&x, &Metric::L2, d, 2).unwrap();
        assert_eq!(g.network.components().len(), 4);
        let pairs = valid_pairs(&g.network, &g).unwrap();
        assert_eq!(pairs.len(), 3);
        let all = build_ses_unfiltered(&g).unwrap();
        assert!(!all.is_empty());
        for e in &all {
            assert!(is_two_connected(&e.representative));
            for s in g.steiner_ids.iter().copied() {
                let left = e.representative.neighbors(s).filter(|&v| v < 3).count();
                let right = e.representative.neighbors(s).filter(|&v| (3..6).contains(&v)).count();
                assert!(left + right >= 1);
            }
        }
    }

    #[test]
    fn partitions_are_counted() {
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(ordered_partitions(3).len(), 13);
    }

    #[test]
    fn canonical_form_ignores_labels() {
        let a = SteinerEndpointSequence::new(vec![
            EndpointPair::terminals(3, [0]),
            EndpointPair::terminals(4, [1]),
        ]);
        let b = SteinerEndpointSequence::new(vec![
            EndpointPair::terminals(4, [0]),
            EndpointPair::terminals(3, [1]),
        ]);
        assert_eq!(a.canonical(), b.canonical());
    }
}
