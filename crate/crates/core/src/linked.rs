//! Linked sets, splits of internal Steiner edges and the marker search.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::builder::{CandidateType, EndpointPair, Endpoints, SesEntry, SteinerEndpointSequence};
use crate::graph::{block_cut_forest, is_two_connected, Edge, Network, VertexId};
use crate::placement::steiner_components;
use crate::repair::{two_connect, Repaired};
use crate::threshold::{valid_subset_partition, SubsetKind, UnderlyingNetwork};

/// Two external Steiner edges whose removal leaves a block path with their
/// Steiner ends inside opposite leaf blocks. `edges.0` leaves the first
/// block of `blocks`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedSet {
    pub edges: (Edge, Edge),
    pub blocks: Vec<BTreeSet<VertexId>>,
}

/// Blocks of `g` in path order starting at the leaf block holding `from`
/// in its interior, if the block-cut forest of `g` is a path.
pub fn block_path(g: &Network, from: VertexId) -> Option<Vec<BTreeSet<VertexId>>> {
    if !g.is_connected() {
        return None;
    }
    let f = block_cut_forest(g);
    if f.blocks.len() == 1 {
        return Some(vec![f.blocks[0].vertices.clone()]);
    }
    if f.blocks.iter().enumerate().any(|(b, _)| f.block_degree(b) > 2)
        || f.cut_vertices.iter().any(|&c| f.cut_degree(c) != 2)
    {
        return None;
    }
    let start = f
        .leaf_blocks()
        .into_iter()
        .find(|&b| f.interior(b).contains(&from))?;
    let mut out = vec![f.blocks[start].vertices.clone()];
    let (mut cur, mut via) = (start, None);
    loop {
        let next = f
            .block_cuts(cur)
            .into_iter()
            .filter(|&c| Some(c) != via)
            .find_map(|c| f.blocks_of(c).into_iter().find(|&o| o != cur).map(|o| (c, o)));
        match next {
            Some((c, o)) => {
                out.push(f.blocks[o].vertices.clone());
                via = Some(c);
                cur = o;
            }
            None => break,
        }
    }
    Some(out)
}

fn external_edges(n: &Network) -> Vec<(VertexId, VertexId)> {
    n.steiner_edges()
        .into_iter()
        .filter_map(|e| match (n.is_steiner(e.0), n.is_steiner(e.1)) {
            (true, false) => Some((e.0, e.1)),
            (false, true) => Some((e.1, e.0)),
            _ => None,
        })
        .collect()
}

pub fn detect_linked_sets(n: &Network, _g_un: &UnderlyingNetwork) -> Vec<LinkedSet> {
    let ext = external_edges(n);
    let mut out = Vec::new();
    for (i, &(s1, x1)) in ext.iter().enumerate() {
        for &(s2, x2) in &ext[i + 1..] {
            if s1 == s2 {
                continue;
            }
            let mut rest = n.clone();
            rest.remove_edge(s1, x1).unwrap();
            rest.remove_edge(s2, x2).unwrap();
            let Some(path) = block_path(&rest, s1) else { continue };
            if path.len() < 2 {
                continue;
            }
            let last = path.len() - 1;
            let inner_last = path[last].contains(&s2) && !path[last - 1].contains(&s2);
            if inner_last && !path[1].contains(&s1) {
                out.push(LinkedSet {
                    edges: (Edge::new(s1, x1), Edge::new(s2, x2)),
                    blocks: path,
                });
            }
        }
    }
    out
}

/// Relocates terminal endpoints of external edges into degree-two path
/// interiors as far along their path as 2-connectivity allows. The rule
/// does not depend on the internal pair `_a`, so one network serves all.
pub fn canonical_representative(n_q: &Network, t: &CandidateType, _a: usize) -> Network {
    let subsets = valid_subset_partition(&t.g_un).unwrap_or_default();
    let mut m = n_q.clone();
    for p in t.pairs() {
        let Endpoints::Terminals(y) = &p.ends else { continue };
        let s = p.steiner;
        // the current endpoint of this labelled edge
        let Some(x) = m.neighbors(s).find(|v| y.contains(v) && !m.is_steiner(*v)) else { continue };
        let Some(sub) = subsets
            .iter()
            .find(|sub| sub.kind == SubsetKind::PathInterior && sub.members.contains(&x))
        else {
            continue;
        };
        let h: BTreeSet<VertexId> = sub.keys.keys().copied().collect();
        // shortest path x - s - ... - y' with no interior vertex on the path H
        let mut q = VecDeque::from([s]);
        let mut seen = BTreeSet::from([s, x]);
        let mut target = None;
        while let Some(v) = q.pop_front() {
            for u in m.neighbors(v) {
                if (v == s && u == x) || !seen.insert(u) {
                    continue;
                }
                if h.contains(&u) {
                    if !m.is_steiner(u) {
                        target = Some(u);
                        break;
                    }
                    continue;
                }
                q.push_back(u);
            }
            if target.is_some() {
                break;
            }
        }
        let Some(yp) = target else { continue };
        let flip = sub.key(x) < sub.key(yp);
        let top = sub.keys.values().copied().max().unwrap_or(0);
        let oriented = |v: VertexId| sub.key(v).map(|k| if flip { top - k } else { k });
        let mut options: Vec<VertexId> = sub.members.iter().copied().filter(|&v| v == x || !m.has_edge(s, v)).collect();
        options.sort_by(|&u, &v| oriented(v).cmp(&oriented(u)).then(u.cmp(&v)));
        for v in options {
            if v == x {
                break;
            }
            let mut g = m.clone();
            g.remove_edge(s, x).unwrap();
            g.add_edge(s, v).unwrap();
            if is_two_connected(&g) {
                m = g;
                break;
            }
        }
    }
    m
}

/// One internal pair that may be split, with the block path of the
/// canonical representative minus that edge.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSite {
    pub pair: usize,
    pub blocks: Vec<BTreeSet<VertexId>>,
}

impl SplitSite {
    pub fn p_z(&self) -> usize {
        self.blocks.len()
    }

    fn block(&self, j: usize) -> Option<&BTreeSet<VertexId>> {
        if j == 0 || j > self.blocks.len() {
            None
        } else {
            Some(&self.blocks[j - 1])
        }
    }

    /// Terminal windows for the two new edges at marker `mk` (1-based).
    pub fn windows(&self, mk: usize, terminals: usize) -> (BTreeSet<VertexId>, BTreeSet<VertexId>) {
        let empty = BTreeSet::new();
        let mut u1: BTreeSet<VertexId> = (mk..=self.p_z()).flat_map(|j| self.blocks[j - 1].iter().copied()).collect();
        for v in self.block(mk - 1).unwrap_or(&empty) {
            u1.remove(v);
        }
        let mut u2: BTreeSet<VertexId> = (1..=mk).flat_map(|j| self.blocks[j - 1].iter().copied()).collect();
        for v in self.block(mk + 1).unwrap_or(&empty) {
            u2.remove(v);
        }
        u1.retain(|&v| v < terminals);
        u2.retain(|&v| v < terminals);
        (u1, u2)
    }

    // terminals y, y' with y' before y, both away from the leaf blocks
    fn splittable(&self, terminals: usize) -> bool {
        let p = self.p_z();
        let empty = BTreeSet::new();
        let u = |a: usize, side: usize| -> BTreeSet<VertexId> {
            let nb = if side == 1 { self.block(a - 1) } else { self.block(a + 1) };
            let nb = nb.unwrap_or(&empty);
            self.blocks[a - 1].iter().copied().filter(|v| *v < terminals && !nb.contains(v)).collect()
        };
        (2..p).any(|a| !u(a, 1).is_empty() && (2..=a).any(|b| !u(b, 2).is_empty()))
    }
}

/// Internal pairs of `entry` that admit a split.
pub fn split_sites(entry: &SesEntry, g_un: &UnderlyingNetwork) -> Vec<SplitSite> {
    let t = CandidateType::new(std::sync::Arc::new(g_un.clone()), entry.sequence.clone());
    site_list(entry, &t)
}

fn site_list(entry: &SesEntry, t: &CandidateType) -> Vec<SplitSite> {
    let mut out = Vec::new();
    for (i, p) in t.pairs().iter().enumerate() {
        let Endpoints::Steiner(o) = p.ends else { continue };
        let mut m = canonical_representative(&entry.representative, t, i);
        if m.remove_edge(p.steiner, o).is_err() {
            continue;
        }
        let Some(blocks) = block_path(&m, p.steiner) else { continue };
        if !blocks.last().is_some_and(|b| b.contains(&o)) {
            continue;
        }
        let site = SplitSite { pair: i, blocks };
        if site.p_z() > 2 && site.splittable(t.g_un.terminal_count) {
            out.push(site);
        }
    }
    out
}

/// Result of one split: the new type plus, per split site, the pair
/// indices of its left and right edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub candidate: CandidateType,
    pub links: Vec<(usize, usize)>,
}

/// Replaces every chosen internal pair by two external pairs with the
/// marker windows intersected with the chosen components. `None` when a
/// window misses its component.
pub fn mark_ses(
    t: &CandidateType,
    sites: &[&SplitSite],
    markers: &[usize],
    comps: &[(usize, usize)],
    components: &[BTreeSet<VertexId>],
) -> Option<Split> {
    let mut pairs = Vec::new();
    let mut links = vec![(0, 0); sites.len()];
    for (i, p) in t.pairs().iter().enumerate() {
        match sites.iter().position(|s| s.pair == i) {
            None => pairs.push(p.clone()),
            Some(w) => {
                let Endpoints::Steiner(o) = p.ends else { return None };
                let (u1, u2) = sites[w].windows(markers[w], t.g_un.terminal_count);
                let (c1, c2) = comps[w];
                let y1: BTreeSet<VertexId> = u1.intersection(&components[c1]).copied().collect();
                let y2: BTreeSet<VertexId> = u2.intersection(&components[c2]).copied().collect();
                if y1.is_empty() || y2.is_empty() {
                    return None;
                }
                links[w] = (pairs.len(), pairs.len() + 1);
                pairs.push(EndpointPair::terminals(p.steiner, y1));
                pairs.push(EndpointPair::terminals(o, y2));
            }
        }
    }
    Some(Split {
        candidate: CandidateType::new(t.g_un.clone(), SteinerEndpointSequence::new(pairs)),
        links,
    })
}

fn terminal_components(g_un: &UnderlyingNetwork) -> Vec<BTreeSet<VertexId>> {
    g_un.network
        .components()
        .into_iter()
        .filter(|c| c.iter().all(|&v| v < g_un.terminal_count))
        .map(|c| c.into_iter().collect())
        .collect()
}

/// Nonempty subsets of `0..m` with at most `cap` members.
fn subsets(m: usize, cap: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << m))
        .filter(|mask| (mask.count_ones() as usize) <= cap)
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

fn tuples(len: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..base).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

struct Search<'a> {
    t: &'a CandidateType,
    sites: Vec<&'a SplitSite>,
    comps: Vec<(usize, usize)>,
    components: &'a [BTreeSet<VertexId>],
    memo: HashMap<Vec<usize>, Option<(Repaired, Vec<(usize, usize)>)>>,
    visited: HashSet<(Vec<usize>, Vec<usize>, Vec<usize>)>,
    best: Option<Repaired>,
    evaluations: usize,
}

impl Search<'_> {
    fn evaluate(&mut self, markers: &[usize]) -> Option<(Repaired, Vec<(usize, usize)>)> {
        if let Some(hit) = self.memo.get(markers) {
            return hit.clone();
        }
        self.evaluations += 1;
        let out = mark_ses(self.t, &self.sites, markers, &self.comps, self.components)
            .and_then(|s| two_connect(&s.candidate).ok().map(|r| (r, s.links)));
        if let Some((r, _)) = &out {
            if self.best.as_ref().is_none_or(|b| r.bottleneck() < b.bottleneck()) {
                self.best = Some(r.clone());
            }
        }
        self.memo.insert(markers.to_vec(), out.clone());
        out
    }

    fn calc_opt(&mut self, markers: Vec<usize>, left_max: Vec<usize>, right_max: Vec<usize>) {
        if !self.visited.insert((markers.clone(), left_max.clone(), right_max.clone())) {
            return;
        }
        let Some((r, links)) = self.evaluate(&markers) else { return };
        let hot = bottleneck_component(&r);
        for w in 0..self.sites.len() {
            let (l, rt) = links[w];
            let pairs = r.candidate.pairs();
            for (side, idx) in [(0usize, l), (1usize, rt)] {
                if !hot.contains(&pairs[idx].steiner) {
                    continue;
                }
                let mk = markers[w];
                let (own, other) = if side == 0 { (left_max[w], right_max[w]) } else { (right_max[w], left_max[w]) };
                if mk == own || mk == other {
                    continue;
                }
                let next: Vec<usize> = if mk.abs_diff(own) == 1 { vec![mk, own] } else { vec![(mk + own) / 2] };
                let p_z = self.sites[w].p_z();
                for m2 in next.into_iter().filter(|&m| m >= 2 && m < p_z) {
                    let mut mk2 = markers.clone();
                    mk2[w] = m2;
                    let (mut lm, mut rm) = (left_max.clone(), right_max.clone());
                    if side == 0 {
                        rm[w] = mk;
                    } else {
                        lm[w] = mk;
                    }
                    self.calc_opt(mk2, lm, rm);
                }
            }
        }
    }
}

// Steiner points of the component holding a longest Steiner edge; ties go
// to the component listed first.
fn bottleneck_component(r: &Repaired) -> BTreeSet<VertexId> {
    let comps = steiner_components(&r.candidate);
    let metric = r.candidate.g_un.metric;
    let mut best: Option<(f64, usize)> = None;
    for (ci, comp) in comps.iter().enumerate() {
        let longest = comp
            .iter()
            .flat_map(|&s| r.network.neighbors(s).map(move |v| (s, v)))
            .map(|(s, v)| metric.dist(r.network.point(s).unwrap(), r.network.point(v).unwrap()))
            .fold(0.0, f64::max);
        if best.is_none_or(|(b, _)| longest > b) {
            best = Some((longest, ci));
        }
    }
    best.map(|(_, ci)| comps[ci].iter().copied().collect()).unwrap_or_default()
}

/// Counters from one marker search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkStats {
    pub evaluations: usize,
}

fn split_plans(entry: &SesEntry, t: &CandidateType) -> (Vec<SplitSite>, Vec<Vec<usize>>, Vec<BTreeSet<VertexId>>) {
    let sites = site_list(entry, t);
    let budget = t.g_un.metric.max_steiner_degree() * t.g_un.k();
    let used = entry.representative.steiner_edges().len();
    let plans = subsets(sites.len(), budget.saturating_sub(used));
    (sites, plans, terminal_components(&t.g_un))
}

/// Cheapest 2-connected network over the unsplit type and all splits of
/// its internal edges, searching markers by halving.
pub fn bin_link(entry: &SesEntry, t: &CandidateType) -> (Option<Repaired>, LinkStats) {
    let mut best = two_connect(t).ok();
    let mut stats = LinkStats::default();
    let (sites, plans, components) = split_plans(entry, t);
    for plan in plans {
        let chosen: Vec<&SplitSite> = plan.iter().map(|&i| &sites[i]).collect();
        let c = components.len();
        for seq in tuples(2 * chosen.len(), c) {
            let comps: Vec<(usize, usize)> = seq.chunks(2).map(|p| (p[0], p[1])).collect();
            let mut search = Search {
                t,
                sites: chosen.clone(),
                comps,
                components: &components,
                memo: HashMap::new(),
                visited: HashSet::new(),
                best: None,
                evaluations: 0,
            };
            let start: Vec<usize> = chosen.iter().map(|s| 2 + (s.p_z() - 3) / 2).collect();
            let left = vec![1; chosen.len()];
            let right: Vec<usize> = chosen.iter().map(|s| s.p_z()).collect();
            search.calc_opt(start, left, right);
            stats.evaluations += search.evaluations;
            if let Some(r) = search.best {
                if best.as_ref().is_none_or(|b| r.bottleneck() < b.bottleneck()) {
                    best = Some(r);
                }
            }
        }
    }
    (best, stats)
}

/// Same candidate set as [`bin_link`], trying every marker combination.
pub fn exhaustive_markers(entry: &SesEntry, t: &CandidateType) -> Option<Repaired> {
    let mut best = two_connect(t).ok();
    let (sites, plans, components) = split_plans(entry, t);
    for plan in plans {
        let chosen: Vec<&SplitSite> = plan.iter().map(|&i| &sites[i]).collect();
        for seq in tuples(2 * chosen.len(), components.len()) {
            let comps: Vec<(usize, usize)> = seq.chunks(2).map(|p| (p[0], p[1])).collect();
            let mut markers = vec![Vec::new()];
            for s in &chosen {
                markers = markers
                    .into_iter()
                    .flat_map(|m: Vec<usize>| {
                        (2..s.p_z()).map(move |x| {
                            let mut m = m.clone();
                            m.push(x);
                            m
                        })
                    })
                    .collect();
            }
            for mk in markers {
                let Some(split) = mark_ses(t, &chosen, &mk, &comps, &components) else { continue };
                if let Ok(r) = two_connect(&split.candidate) {
                    if best.as_ref().is_none_or(|b| r.bottleneck() < b.bottleneck()) {
                        best = Some(r);
                    }
                }
            }
        }
    }
    best
}
