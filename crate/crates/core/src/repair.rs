//! Potential cuts of a candidate type and the 2-connecting repair.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::builder::{CandidateType, EndpointPair, Endpoints, SteinerEndpointSequence};
use crate::graph::{is_two_connected, Network, VertexId};
use crate::placement::{optimize_placement, Placement, PlacementError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepairError {
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error("no 2-connected representative was found")]
    NoTwoConnected,
}

/// Labelled external edges (pair indices) forming a minimal cut of every
/// representative, with the terminals they could all share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialCut {
    pub edges: Vec<usize>,
    pub common_terminals: BTreeSet<VertexId>,
}

/// A placed representative together with the type it realises.
#[derive(Debug, Clone, PartialEq)]
pub struct Repaired {
    pub candidate: CandidateType,
    pub placement: Placement,
    pub network: Network,
}

impl Repaired {
    pub fn bottleneck(&self) -> f64 {
        self.placement.bottleneck
    }
}

// Nodes: terminal components of the underlying network, then Steiner points.
struct Skeleton {
    nodes: usize,
    // terminal count of each component node
    sizes: Vec<usize>,
    links: Vec<(usize, usize)>,
    external: Vec<usize>,
}

fn skeleton(t: &CandidateType) -> Skeleton {
    let g = &t.g_un.network;
    let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut nodes = 0;
    let mut sizes = Vec::new();
    for c in g.components() {
        if c.iter().all(|&v| !g.is_steiner(v)) {
            sizes.push(c.len());
            for v in c {
                comp_of.insert(v, nodes);
            }
            nodes += 1;
        }
    }
    let mut steiner_node = BTreeMap::new();
    for s in t.sequence.steiner_points() {
        steiner_node.insert(s, nodes);
        nodes += 1;
    }
    let mut links = Vec::new();
    let mut external = Vec::new();
    for (i, p) in t.pairs().iter().enumerate() {
        let a = steiner_node[&p.steiner];
        match &p.ends {
            Endpoints::Steiner(o) => links.push((a, steiner_node[o])),
            Endpoints::Terminals(y) => {
                external.push(i);
                links.push((a, comp_of[y.iter().next().expect("nonempty endpoint set")]));
            }
        }
    }
    Skeleton {
        nodes,
        sizes,
        links,
        external,
    }
}

fn disconnected(sk: &Skeleton, removed: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..sk.nodes).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut parts = sk.nodes;
    for (i, &(a, b)) in sk.links.iter().enumerate() {
        if removed.contains(&i) {
            continue;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            parts -= 1;
        }
    }
    parts > 1
}

pub fn potential_cuts(t: &CandidateType) -> Vec<PotentialCut> {
    let sk = skeleton(t);
    let mut out = Vec::new();
    grow(t, &sk, 0, &mut Vec::new(), None, &mut out);
    // a lone bridge cannot be repaired by moving endpoints, and edges meeting
    // at an isolated terminal never make it a cut vertex
    out.retain(|c| c.edges.len() >= 2 && sk.sizes[sk.links[c.edges[0]].1] >= 2);
    out
}

fn grow(
    t: &CandidateType,
    sk: &Skeleton,
    from: usize,
    chosen: &mut Vec<usize>,
    common: Option<&BTreeSet<VertexId>>,
    out: &mut Vec<PotentialCut>,
) {
    if !chosen.is_empty() && disconnected(sk, chosen) {
        let minimal = (0..chosen.len()).all(|skip| {
            let rest: Vec<usize> = chosen.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, &e)| e).collect();
            rest.is_empty() || !disconnected(sk, &rest)
        });
        if minimal {
            out.push(PotentialCut {
                edges: chosen.clone(),
                common_terminals: common.cloned().unwrap_or_default(),
            });
        }
        return;
    }
    for j in from..sk.external.len() {
        let e = sk.external[j];
        // edges at one Steiner point never share an endpoint
        if chosen.iter().any(|&c| t.pairs()[c].steiner == t.pairs()[e].steiner) {
            continue;
        }
        let y = t.pairs()[e].ends.terminals().unwrap();
        let next: BTreeSet<VertexId> = match common {
            Some(c) => c.intersection(y).copied().collect(),
            None => y.clone(),
        };
        if next.is_empty() {
            continue;
        }
        chosen.push(e);
        grow(t, sk, j + 1, chosen, Some(&next), out);
        chosen.pop();
    }
}

fn with_ends(t: &CandidateType, ends: &[Endpoints]) -> CandidateType {
    let pairs = t
        .pairs()
        .iter()
        .zip(ends)
        .map(|(p, e)| EndpointPair {
            steiner: p.steiner,
            ends: e.clone(),
        })
        .collect();
    CandidateType::new(t.g_un.clone(), SteinerEndpointSequence::new(pairs))
}

fn realise(t: CandidateType, placement: Placement) -> Result<Repaired, RepairError> {
    let network = placement.network(&t)?;
    Ok(Repaired {
        candidate: t,
        placement,
        network,
    })
}

/// Cheapest 2-connected representative. A cheapest representative that is
/// already 2-connected is returned as is; otherwise endpoints along the
/// potential cuts are pinned and banned in every order.
pub fn two_connect(t: &CandidateType) -> Result<Repaired, RepairError> {
    let base = optimize_placement(t)?;
    if is_two_connected(&base.network(t)?) {
        return realise(t.clone(), base);
    }
    let cuts = potential_cuts(t);
    let q = cuts.len();
    let mut best: Option<Repaired> = None;
    for order in crate::builder::permutations(q) {
        // (pinned, banned) choices per cut, in the order given
        let choices: Vec<Vec<(usize, usize)>> = order
            .iter()
            .map(|&r| {
                let g = &cuts[r].edges;
                let mut c = Vec::new();
                for &a in g {
                    for &b in g {
                        if a != b {
                            c.push((a, b));
                        }
                    }
                }
                c
            })
            .collect();
        let mut idx = vec![0usize; q];
        loop {
            if let Some(r) = attempt(t, &choices, &idx)? {
                if best.as_ref().is_none_or(|b| r.bottleneck() < b.bottleneck()) {
                    best = Some(r);
                }
            }
            let mut i = 0;
            while i < q {
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == q {
                break;
            }
        }
    }
    best.ok_or(RepairError::NoTwoConnected)
}

fn attempt(t: &CandidateType, choices: &[Vec<(usize, usize)>], idx: &[usize]) -> Result<Option<Repaired>, RepairError> {
    let mut ends: Vec<Endpoints> = t.pairs().iter().map(|p| p.ends.clone()).collect();
    let mut current = t.clone();
    let mut placement = optimize_placement(&current);
    for (opts, &i) in choices.iter().zip(idx) {
        let Ok(g) = &placement else { return Ok(None) };
        let (pin, ban) = opts[i];
        let x = g.endpoints[pin];
        ends[pin] = Endpoints::Terminals(BTreeSet::from([x]));
        if let Endpoints::Terminals(y) = &mut ends[ban] {
            y.remove(&x);
            if y.is_empty() {
                return Ok(None);
            }
        }
        current = with_ends(t, &ends);
        placement = optimize_placement(&current);
    }
    let placement = match placement {
        Ok(p) => p,
        Err(PlacementError::NoRepresentative) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let r = realise(current, placement)?;
    Ok(is_two_connected(&r.network).then_some(r))
}
