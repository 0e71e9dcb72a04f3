//! Binary search over distance levels driving the per-level pipeline.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::builder::{build_ses, BuilderError, CandidateType};
use crate::geometry::{Metric, Point};
use crate::graph::{GraphError, Network, Role};
use crate::linked::bin_link;
use crate::threshold::{threshold_network_with, DistanceLevels, ThresholdError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("at least two terminals are required, got {0}")]
    TooFewTerminals(usize),
    #[error("terminals {0} and {1} coincide")]
    DuplicateTerminal(usize, usize),
    #[error("terminal {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("k must be 0 for this entry point")]
    NeedsZeroK,
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Builder(#[from] BuilderError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub terminals: Vec<Point>,
    pub k: usize,
    pub metric: Metric,
}

impl Instance {
    pub fn new(terminals: Vec<Point>, k: usize, metric: Metric) -> Result<Self, SolveError> {
        let inst = Self { terminals, k, metric };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let x = &self.terminals;
        if x.len() < 2 {
            return Err(SolveError::TooFewTerminals(x.len()));
        }
        if let Some(i) = x.iter().position(|p| !p.is_finite()) {
            return Err(SolveError::NonFinite(i));
        }
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                if x[i] == x[j] {
                    return Err(SolveError::DuplicateTerminal(i, j));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Explore every level instead of binary searching.
    pub sweep: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub candidate_types: usize,
    pub levels_explored: usize,
    pub split_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Terminals keep their input ids; Steiner points follow as n, n+1, ...
    pub network: Network,
    pub bottleneck: f64,
    pub steiner_count: usize,
    pub level: usize,
    pub level_length: f64,
    pub stats: SolveStats,
}

/// Best network found at one level, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub index: usize,
    pub length: f64,
    pub best: Option<(f64, Network)>,
    pub candidate_types: usize,
    pub split_evaluations: usize,
}

impl LevelResult {
    pub fn bottleneck(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.0)
    }
}

/// Runs the pipeline on one level: the threshold graph itself when it is
/// 2-connected, otherwise every candidate type with its splits.
pub fn solve_level(inst: &Instance, levels: &DistanceLevels, d: usize) -> Result<LevelResult, SolveError> {
    let g_un = threshold_network_with(&inst.terminals, &inst.metric, levels, d, inst.k)?;
    let mut out = LevelResult {
        index: d,
        length: levels.length(d),
        best: None,
        candidate_types: 0,
        split_evaluations: 0,
    };
    if g_un.terminal_part_two_connected() {
        let mut g = Network::with_terminals(&inst.terminals);
        for e in g_un.network.edges() {
            g.add_edge(e.0, e.1)?;
        }
        let b = g.bottleneck(&inst.metric).unwrap_or(0.0);
        out.best = Some((b, g));
        return Ok(out);
    }
    if inst.k == 0 || g_un.leaf_weight() > inst.metric.max_steiner_degree() * inst.k {
        return Ok(out);
    }
    let g_un = Arc::new(g_un);
    let entries = build_ses(&g_un)?;
    out.candidate_types = entries.len();
    for entry in &entries {
        let t = CandidateType::new(g_un.clone(), entry.sequence.clone());
        let (found, stats) = bin_link(entry, &t);
        out.split_evaluations += stats.evaluations;
        if let Some(r) = found {
            let g = renumber(&r.network, inst.terminals.len());
            let b = g.bottleneck(&inst.metric).unwrap_or(0.0);
            if out.best.as_ref().is_none_or(|(c, _)| b < *c) {
                out.best = Some((b, g));
            }
        }
    }
    Ok(out)
}

// Terminals first, then the Steiner points in id order.
fn renumber(g: &Network, n: usize) -> Network {
    let mut out = Network::new();
    let mut map = std::collections::BTreeMap::new();
    for v in 0..n {
        map.insert(v, out.add_vertex(Role::Terminal, g.point(v)));
    }
    let steiner: BTreeSet<_> = g.steiner_points().collect();
    for s in steiner {
        map.insert(s, out.add_vertex(Role::Steiner, g.point(s)));
    }
    for e in g.edges() {
        out.add_edge(map[&e.0], map[&e.1]).expect("renumbered edge");
    }
    out
}

pub fn solve(inst: &Instance) -> Result<Solution, SolveError> {
    solve_with(inst, SolveOptions::default())
}

pub fn solve_with(inst: &Instance, opts: SolveOptions) -> Result<Solution, SolveError> {
    inst.validate()?;
    let levels = DistanceLevels::new(&inst.terminals, &inst.metric);
    let top = levels.len();
    let mut stats = SolveStats::default();
    let mut best: Option<(f64, Network, usize)> = None;
    let take = |r: LevelResult, stats: &mut SolveStats, best: &mut Option<(f64, Network, usize)>| {
        stats.levels_explored += 1;
        stats.candidate_types += r.candidate_types;
        stats.split_evaluations += r.split_evaluations;
        if let Some((b, g)) = r.best {
            if best.as_ref().is_none_or(|(c, _, _)| b < *c) {
                *best = Some((b, g, r.index));
            }
        }
    };
    if opts.sweep {
        for d in 0..=top {
            take(solve_level(inst, &levels, d)?, &mut stats, &mut best);
        }
    } else {
        let mut explored = BTreeSet::new();
        let (mut lo, mut hi) = (0, top);
        let mut d = top / 2;
        loop {
            explored.insert(d);
            take(solve_level(inst, &levels, d)?, &mut stats, &mut best);
            let next = match &best {
                Some((b, _, _)) if *b <= levels.length(d) => {
                    hi = d;
                    (lo + d) / 2
                }
                _ => {
                    lo = d;
                    (d + hi).div_ceil(2)
                }
            };
            if explored.contains(&next) {
                break;
            }
            d = next;
        }
    }
    let (bottleneck, network, level) = best.expect("the complete graph is 2-connected");
    Ok(Solution {
        steiner_count: network.steiner_points().count(),
        network,
        bottleneck,
        level,
        level_length: levels.length(level),
        stats,
    })
}

/// Per-level results over every level.
pub fn sweep(inst: &Instance) -> Result<Vec<LevelResult>, SolveError> {
    inst.validate()?;
    let levels = DistanceLevels::new(&inst.terminals, &inst.metric);
    (0..=levels.len()).map(|d| solve_level(inst, &levels, d)).collect()
}

/// Smallest level whose threshold graph is 2-connected.
pub fn solve_k0(inst: &Instance) -> Result<Solution, SolveError> {
    inst.validate()?;
    if inst.k != 0 {
        return Err(SolveError::NeedsZeroK);
    }
    let levels = DistanceLevels::new(&inst.terminals, &inst.metric);
    for d in 1..=levels.len() {
        let g = threshold_network_with(&inst.terminals, &inst.metric, &levels, d, 0)?;
        if crate::graph::is_two_connected(&g.network) {
            return Ok(Solution {
                bottleneck: g.network.bottleneck(&inst.metric).unwrap_or(0.0),
                network: g.network,
                steiner_count: 0,
                level: d,
                level_length: levels.length(d),
                stats: SolveStats {
                    levels_explored: d,
                    ..Default::default()
                },
            });
        }
    }
    unreachable!("the complete graph is 2-connected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inst(pts: &[(f64, f64)], k: usize) -> Instance {
        Instance::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), k, Metric::L2).unwrap()
    }

    #[test]
    fn two_terminals_single_edge() {
        let s = solve(&inst(&[(0.0, 0.0), (3.0, 4.0)], 0)).unwrap();
        assert_eq!(s.bottleneck, 5.0);
        assert_eq!(s.network.edge_count(), 1);
    }

    #[test]
    fn k0_examples() {
        assert_eq!(solve_k0(&inst(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)], 0)).unwrap().bottleneck, 3.0);
        let sq = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], 0);
        assert_eq!(solve_k0(&sq).unwrap().bottleneck, 1.0);
        assert_eq!(solve(&sq).unwrap().bottleneck, 1.0);
    }

    #[test]
    fn equilateral_with_two_relays() {
        let h = 3f64.sqrt() / 2.0;
        let s = solve(&inst(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)], 2)).unwrap();
        assert_abs_diff_eq!(s.bottleneck, 1.0 / 3f64.sqrt(), epsilon = 1e-6);
        assert!(crate::graph::is_two_connected(&s.network));
        assert_eq!(s.steiner_count, 2);
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(Instance::new(vec![Point::new(0.0, 0.0)], 0, Metric::L2).is_err());
        assert!(Instance::new(vec![Point::new(0.0, 0.0); 2], 0, Metric::L2).is_err());
    }
}
