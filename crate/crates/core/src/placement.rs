//! Cheapest representative of a candidate type: endpoint choices and
//! Steiner point positions minimising the longest Steiner edge.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::builder::{BuilderError, CandidateType, Endpoints};
use crate::convex::{self, End};
use crate::geometry::{smallest_colour_spanning_disk_with, ColourClasses, DiskOptions, Metric, Point, Site};
use crate::graph::{Network, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("no representative with distinct endpoints per Steiner point")]
    NoRepresentative,
    #[error("conic solver failed on a Steiner component")]
    Solver,
    #[error(transparent)]
    Builder(#[from] BuilderError),
}

/// Positions and endpoint choices of a cheapest representative.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub positions: BTreeMap<VertexId, Point>,
    /// Chosen far endpoint for every pair of the sequence.
    pub endpoints: Vec<VertexId>,
    pub steiner_bottleneck: f64,
    /// Including the underlying threshold length.
    pub bottleneck: f64,
}

impl Placement {
    /// The representative with coordinates on every Steiner point.
    pub fn network(&self, t: &CandidateType) -> Result<Network, PlacementError> {
        let mut g = t.representative(&self.endpoints)?;
        for (&s, &p) in &self.positions {
            g.set_point(s, p);
        }
        Ok(g)
    }
}

/// Steiner points of the sequence grouped by internal edges, each group
/// sorted, groups ordered by smallest member.
pub fn steiner_components(t: &CandidateType) -> Vec<Vec<VertexId>> {
    let pts: Vec<VertexId> = t.sequence.steiner_points().into_iter().collect();
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = pts.iter().map(|&s| (s, Vec::new())).collect();
    for p in t.pairs() {
        if let Endpoints::Steiner(o) = p.ends {
            adj.get_mut(&p.steiner).unwrap().push(o);
            adj.get_mut(&o).unwrap().push(p.steiner);
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in &pts {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &u in &adj[&v] {
                if seen.insert(u) {
                    comp.push(u);
                    q.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn optimize_placement(t: &CandidateType) -> Result<Placement, PlacementError> {
    let metric = t.g_un.metric;
    let coords = |v: VertexId| t.g_un.network.point(v).expect("terminal coordinates");
    let mut endpoints: Vec<VertexId> = t
        .pairs()
        .iter()
        .map(|p| match &p.ends {
            Endpoints::Steiner(o) => *o,
            Endpoints::Terminals(_) => usize::MAX,
        })
        .collect();
    let mut positions = BTreeMap::new();
    for comp in steiner_components(t) {
        let pairs: Vec<usize> = (0..t.pairs().len())
            .filter(|&i| comp.contains(&t.pairs()[i].steiner))
            .collect();
        if comp.len() == 1 {
            let ext: Vec<usize> = pairs.clone();
            let classes = ColourClasses::from_sites(
                ext.iter()
                    .map(|&i| {
                        let y = t.pairs()[i].ends.terminals().unwrap();
                        y.iter().map(|&v| Site { id: v, at: coords(v) }).collect()
                    })
                    .collect(),
            )
            .map_err(|_| PlacementError::NoRepresentative)?;
            let disk = smallest_colour_spanning_disk_with(
                &classes,
                &metric,
                DiskOptions {
                    distinct: true,
                    ..Default::default()
                },
            )
            .ok_or(PlacementError::NoRepresentative)?;
            for (&i, &c) in ext.iter().zip(&disk.choices) {
                endpoints[i] = c;
            }
            positions.insert(comp[0], disk.center);
        } else {
            let (pos, ends) = solve_tree(t, &comp, &pairs, &metric)?;
            for (i, e) in ends {
                endpoints[i] = e;
            }
            for (s, p) in comp.iter().zip(pos) {
                positions.insert(*s, p);
            }
        }
    }
    let steiner_bottleneck = t
        .pairs()
        .iter()
        .zip(&endpoints)
        .map(|(p, &e)| {
            let a = positions[&p.steiner];
            let b = positions.get(&e).copied().unwrap_or_else(|| coords(e));
            metric.dist(a, b)
        })
        .fold(0.0, f64::max);
    Ok(Placement {
        positions,
        endpoints,
        steiner_bottleneck,
        bottleneck: steiner_bottleneck.max(t.g_un.length),
    })
}

/// Whether some representative has all Steiner edges of length <= `lambda`.
pub fn placement_feasible(t: &CandidateType, lambda: f64) -> Result<bool, PlacementError> {
    match optimize_placement(t) {
        Ok(p) => Ok(p.steiner_bottleneck <= lambda * (1.0 + 1e-12) + 1e-12),
        Err(PlacementError::NoRepresentative) => Ok(false),
        Err(e) => Err(e),
    }
}

struct Tree<'a> {
    metric: Metric,
    points: &'a dyn Fn(VertexId) -> Point,
    // (pair index, local node, candidates in preference order)
    ext: Vec<(usize, usize, Vec<VertexId>)>,
    internal: Vec<(usize, usize)>,
    hops: Vec<Vec<usize>>,
    nodes: usize,
    best: Option<(f64, Vec<Point>, Vec<VertexId>)>,
}

// Branch and bound over endpoint assignments; each complete assignment is
// solved exactly as a conic program.
fn solve_tree(
    t: &CandidateType,
    comp: &[VertexId],
    pairs: &[usize],
    metric: &Metric,
) -> Result<(Vec<Point>, Vec<(usize, VertexId)>), PlacementError> {
    let local = |s: VertexId| comp.iter().position(|&c| c == s).unwrap();
    let coords = |v: VertexId| t.g_un.network.point(v).expect("terminal coordinates");
    let mut internal = Vec::new();
    let mut ext = Vec::new();
    for &i in pairs {
        let p = &t.pairs()[i];
        match &p.ends {
            Endpoints::Steiner(o) => internal.push((local(p.steiner), local(*o))),
            Endpoints::Terminals(y) => ext.push((i, local(p.steiner), y.iter().copied().collect::<Vec<_>>())),
        }
    }
    let n = comp.len();
    let mut hops = vec![vec![usize::MAX; n]; n];
    for (src, row) in hops.iter_mut().enumerate() {
        row[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(v) = q.pop_front() {
            for &(a, b) in &internal {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && row[y] == usize::MAX {
                        row[y] = row[v] + 1;
                        q.push_back(y);
                    }
                }
            }
        }
    }
    // candidates nearest to the centroid of their node's classes first
    let mut anchor = vec![(0.0, 0.0, 0usize); n];
    for (_, u, ys) in &ext {
        for &y in ys {
            let p = coords(y);
            anchor[*u].0 += p.x;
            anchor[*u].1 += p.y;
            anchor[*u].2 += 1;
        }
    }
    for (_, u, ys) in ext.iter_mut() {
        let (sx, sy, c) = anchor[*u];
        let a = Point::new(sx / c.max(1) as f64, sy / c.max(1) as f64);
        ys.sort_by(|&p, &q| metric.dist(coords(p), a).total_cmp(&metric.dist(coords(q), a)).then(p.cmp(&q)));
    }
    ext.sort_by_key(|(_, _, ys)| ys.len());
    let mut tree = Tree {
        metric: *metric,
        points: &coords,
        ext,
        internal,
        hops,
        nodes: n,
        best: None,
    };
    let mut chosen = Vec::new();
    branch(&mut tree, &mut chosen, 0.0)?;
    let (_, pos, ends) = tree.best.ok_or(PlacementError::NoRepresentative)?;
    let pairs_out = tree.ext.iter().map(|(i, _, _)| *i).zip(ends).collect();
    Ok((pos, pairs_out))
}

fn branch(tree: &mut Tree, chosen: &mut Vec<VertexId>, lb: f64) -> Result<(), PlacementError> {
    if let Some((best, _, _)) = &tree.best {
        if lb >= *best {
            return Ok(());
        }
    }
    let j = chosen.len();
    if j == tree.ext.len() {
        let edges: Vec<(usize, End)> = tree
            .internal
            .iter()
            .map(|&(a, b)| (a, End::Free(b)))
            .chain(
                tree.ext
                    .iter()
                    .zip(chosen.iter())
                    .map(|((_, u, _), &y)| (*u, End::Fixed((tree.points)(y)))),
            )
            .collect();
        let (pos, value) = convex::solve_minimax(tree.nodes, &edges, &tree.metric).ok_or(PlacementError::Solver)?;
        if tree.best.as_ref().is_none_or(|(b, _, _)| value < *b) {
            tree.best = Some((value, pos, chosen.clone()));
        }
        return Ok(());
    }
    let (_, u, cands) = tree.ext[j].clone();
    for y in cands {
        let mut bound = lb;
        let mut clash = false;
        for (k, &z) in chosen.iter().enumerate() {
            let v = tree.ext[k].1;
            if v == u && z == y {
                clash = true;
                break;
            }
            let d = tree.metric.dist((tree.points)(y), (tree.points)(z));
            bound = bound.max(d / (tree.hops[u][v] + 2) as f64);
        }
        if clash {
            continue;
        }
        chosen.push(y);
        branch(tree, chosen, bound)?;
        chosen.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{EndpointPair, SteinerEndpointSequence};
    use crate::threshold::threshold_network;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn triangle() -> Vec<Point> {
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 3f64.sqrt() / 2.0)]
    }

    #[test]
    fn two_stars_at_the_centre() {
        let g = Arc::new(threshold_network(&triangle(), &Metric::L2, 0, 2).unwrap());
        let mut pairs = Vec::new();
        for s in [3, 4] {
            for y in 0..3 {
                pairs.push(EndpointPair::terminals(s, [y]));
            }
        }
        let t = CandidateType::new(g, SteinerEndpointSequence::new(pairs));
        let p = optimize_placement(&t).unwrap();
        assert_abs_diff_eq!(p.bottleneck, 1.0 / 3f64.sqrt(), epsilon = 1e-9);
        assert!(crate::graph::is_two_connected(&p.network(&t).unwrap()));
    }

    #[test]
    fn chain_between_far_terminals() {
        let x = vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0)];
        let g = Arc::new(threshold_network(&x, &Metric::L2, 0, 2).unwrap());
        let t = CandidateType::new(
            g,
            SteinerEndpointSequence::new(vec![
                EndpointPair::terminals(2, [0]),
                EndpointPair::internal(2, 3),
                EndpointPair::terminals(3, [1]),
            ]),
        );
        let p = optimize_placement(&t).unwrap();
        assert_abs_diff_eq!(p.steiner_bottleneck, 1.0, epsilon = 1e-7);
        assert!(placement_feasible(&t, 1.0 + 1e-6).unwrap());
        assert!(!placement_feasible(&t, 0.9).unwrap());
    }
}
