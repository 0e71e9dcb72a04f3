//! Brute-force reference solver for small instances.
//!
//! Enumerates every Steiner configuration (an acyclic Steiner-Steiner edge
//! set plus terminal neighbourhoods), pairs it with the lowest threshold
//! level that makes the whole network 2-connected, and optimises Steiner
//! positions with a cutting-plane linear program. Shares no code with the
//! main pipeline beyond the metric and the network container.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::driver::{Instance, Solution, SolveError, SolveStats};
use crate::geometry::{Metric, Point};
use crate::graph::{Network, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{n} terminals exceed the oracle limit {max}")]
    TooManyTerminals { n: usize, max: usize },
    #[error("k = {k} exceeds the oracle limit {max}")]
    TooManySteiner { k: usize, max: usize },
    #[error("invalid oracle configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Instance(#[from] SolveError),
    #[error("linear program failed")]
    Lp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub max_n: usize,
    pub max_k: usize,
    /// Relative gap at which cutting planes stop.
    pub tolerance: f64,
    /// Cutting-plane rounds per configuration.
    pub refinement_iters: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_n: 7,
            max_k: 2,
            tolerance: 1e-11,
            refinement_iters: 400,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.max_n > 7 {
            return Err(OracleError::Config("max_n must be at most 7"));
        }
        if self.max_k > 3 {
            return Err(OracleError::Config("max_k must be at most 3"));
        }
        if !(self.tolerance > 0.0) || self.refinement_iters == 0 {
            return Err(OracleError::Config("tolerance and refinement_iters must be positive"));
        }
        Ok(())
    }
}

/// Structured record of an oracle optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub p: String,
    pub k: usize,
    pub terminals: Vec<[f64; 2]>,
    pub bottleneck: f64,
    pub level: usize,
    pub steiner_points: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
}

pub fn certificate(inst: &Instance, s: &Solution) -> Certificate {
    let xy = |p: Point| [p.x, p.y];
    Certificate {
        p: inst.metric.to_string(),
        k: inst.k,
        terminals: inst.terminals.iter().map(|&p| xy(p)).collect(),
        bottleneck: s.bottleneck,
        level: s.level,
        steiner_points: s.network.steiner_points().map(|v| xy(s.network.point(v).unwrap())).collect(),
        edges: s.network.edges().map(|e| [e.0, e.1]).collect(),
    }
}

#[derive(Debug, Clone)]
struct Config {
    masks: Vec<u32>,
    links: Vec<(usize, usize)>,
}

// adjacency bitmasks; vertices 0..n terminals, n.. Steiner points
fn two_connected(adj: &[u32]) -> bool {
    let v = adj.len();
    let all: u32 = if v == 32 { u32::MAX } else { (1 << v) - 1 };
    let reach = |skip: u32| {
        let alive = all & !skip;
        if alive == 0 {
            return true;
        }
        let start = alive.trailing_zeros();
        let mut seen = 1u32 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let next = adj[u] & alive & !seen;
            seen |= next;
            frontier |= next;
        }
        seen == alive
    };
    if !reach(0) {
        return false;
    }
    v <= 2 || (0..v).all(|u| reach(1 << u))
}

fn configurations(n: usize, k: usize, delta: usize) -> Vec<Config> {
    let mut out = vec![Config {
        masks: Vec::new(),
        links: Vec::new(),
    }];
    for kk in 1..=k {
        let pairs: Vec<(usize, usize)> = (0..kk).flat_map(|a| (a + 1..kk).map(move |b| (a, b))).collect();
        for lmask in 0u32..(1 << pairs.len()) {
            let links: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| lmask & (1 << i) != 0).map(|(_, &p)| p).collect();
            if !forest(kk, &links) {
                continue;
            }
            let mut ldeg = vec![0usize; kk];
            for &(a, b) in &links {
                ldeg[a] += 1;
                ldeg[b] += 1;
            }
            let mut masks = vec![0u32; kk];
            enumerate_masks(n, delta, &ldeg, 0, &mut masks, &links, &mut out);
        }
    }
    out
}

fn forest(k: usize, links: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

fn enumerate_masks(
    n: usize,
    delta: usize,
    ldeg: &[usize],
    at: usize,
    masks: &mut Vec<u32>,
    links: &[(usize, usize)],
    out: &mut Vec<Config>,
) {
    if at == masks.len() {
        let c = Config {
            masks: masks.clone(),
            links: links.to_vec(),
        };
        if is_canonical(&c) {
            out.push(c);
        }
        return;
    }
    for m in 0u32..(1 << n) {
        let deg = m.count_ones() as usize + ldeg[at];
        if deg < 2 || deg > delta {
            continue;
        }
        masks[at] = m;
        enumerate_masks(n, delta, ldeg, at + 1, masks, links, out);
    }
}

fn relabel(c: &Config, perm: &[usize]) -> (Vec<u32>, Vec<(usize, usize)>) {
    let mut masks = vec![0; c.masks.len()];
    for (i, &m) in c.masks.iter().enumerate() {
        masks[perm[i]] = m;
    }
    let mut links: Vec<(usize, usize)> = c
        .links
        .iter()
        .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
        .collect();
    links.sort_unstable();
    (masks, links)
}

fn is_canonical(c: &Config) -> bool {
    let own = relabel(c, &(0..c.masks.len()).collect::<Vec<_>>());
    perms(c.masks.len()).iter().all(|p| relabel(c, p) >= own)
}

fn perms(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, i);
                    q
                })
            })
            .collect();
    }
    out
}

fn lower_bound(c: &Config, x: &[Point], metric: &Metric) -> f64 {
    let k = c.masks.len();
    let mut hops = vec![vec![usize::MAX; k]; k];
    for (s, row) in hops.iter_mut().enumerate() {
        row[s] = 0;
        for _ in 0..k {
            for &(a, b) in &c.links {
                if row[a] != usize::MAX && row[b] == usize::MAX {
                    row[b] = row[a] + 1;
                }
                if row[b] != usize::MAX && row[a] == usize::MAX {
                    row[a] = row[b] + 1;
                }
            }
        }
    }
    let mut lb: f64 = 0.0;
    for a in 0..k {
        for b in a..k {
            if hops[a][b] == usize::MAX {
                continue;
            }
            for i in bits(c.masks[a]) {
                for j in bits(c.masks[b]) {
                    if i != j {
                        lb = lb.max(metric.dist(x[i], x[j]) / (hops[a][b] + 2) as f64);
                    }
                }
            }
        }
    }
    lb
}

fn bits(m: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| m & (1 << i) != 0)
}

// min over positions of the longest configured Steiner edge
fn place(c: &Config, x: &[Point], metric: &Metric, cfg: &OracleConfig) -> Result<(Vec<Point>, f64), OracleError> {
    let k = c.masks.len();
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in x {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let z: Vec<(Variable, Variable)> = (0..k)
        .map(|_| (lp.add_var(0.0, (lo.x, hi.x)), lp.add_var(0.0, (lo.y, hi.y))))
        .collect();
    let t = lp.add_var(1.0, (0.0, 4.0 * span));
    // each edge: free end `a`, other end a point or a free index
    let mut edges: Vec<(usize, Result<Point, usize>)> = Vec::new();
    for (s, &m) in c.masks.iter().enumerate() {
        for i in bits(m) {
            edges.push((s, Ok(x[i])));
        }
    }
    for &(a, b) in &c.links {
        edges.push((a, Err(b)));
    }
    let cut = |g: (f64, f64), e: &(usize, Result<Point, usize>)| -> (LinearExpr, f64) {
        let mut expr = LinearExpr::empty();
        expr.add(z[e.0].0, g.0);
        expr.add(z[e.0].1, g.1);
        expr.add(t, -1.0);
        match e.1 {
            Ok(q) => (expr, g.0 * q.x + g.1 * q.y),
            Err(b) => {
                expr.add(z[b].0, -g.0);
                expr.add(z[b].1, -g.1);
                (expr, 0.0)
            }
        }
    };
    let initial: Vec<(f64, f64)> = match metric {
        Metric::L1 => vec![(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)],
        Metric::LInf => vec![(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)],
        _ => (0..16)
            .map(|j| {
                let a = j as f64 * std::f64::consts::PI / 8.0;
                let (cx, cy) = (a.cos(), a.sin());
                let q = dual_norm(metric, cx, cy);
                (cx / q, cy / q)
            })
            .collect(),
    };
    for e in &edges {
        for &g in &initial {
            let (expr, rhs) = cut(g, e);
            lp.add_constraint(expr, ComparisonOp::Le, rhs);
        }
    }
    let mut sol = lp.solve().map_err(|_| OracleError::Lp)?.into_solution().map_err(|_| OracleError::Lp)?;
    for _ in 0..cfg.refinement_iters {
        let pos: Vec<Point> = z.iter().map(|&(a, b)| Point::new(sol.var_value(a), sol.var_value(b))).collect();
        let bound = sol.var_value(t);
        let lens: Vec<(f64, f64, f64)> = edges
            .iter()
            .map(|(a, other)| {
                let q = match other {
                    Ok(q) => *q,
                    Err(b) => pos[*b],
                };
                let (dx, dy) = (pos[*a].x - q.x, pos[*a].y - q.y);
                (metric.norm(dx, dy), dx, dy)
            })
            .collect();
        let actual = lens.iter().map(|l| l.0).fold(0.0, f64::max);
        if actual - bound <= cfg.tolerance * actual.max(1.0) {
            return Ok((pos, actual));
        }
        let mut cuts = Vec::new();
        for (e, &(len, dx, dy)) in edges.iter().zip(&lens) {
            if len > bound + cfg.tolerance * actual.max(1.0) * 0.5 {
                cuts.push(cut(gradient(metric, dx, dy, len), e));
            }
        }
        if cuts.is_empty() {
            return Ok((pos, actual));
        }
        for (expr, rhs) in cuts {
            sol = sol
                .add_constraint(expr, ComparisonOp::Le, rhs)
                .map_err(|_| OracleError::Lp)?
                .into_solution()
                .map_err(|_| OracleError::Lp)?;
        }
    }
    let pos: Vec<Point> = z.iter().map(|&(a, b)| Point::new(sol.var_value(a), sol.var_value(b))).collect();
    let actual = edges
        .iter()
        .map(|(a, other)| {
            let q = match other {
                Ok(q) => *q,
                Err(b) => pos[*b],
            };
            metric.dist(pos[*a], q)
        })
        .fold(0.0, f64::max);
    Ok((pos, actual))
}

// norm dual to `metric` of (x, y)
fn dual_norm(metric: &Metric, x: f64, y: f64) -> f64 {
    let p = metric.p();
    if p.is_infinite() {
        x.abs() + y.abs()
    } else if p == 1.0 {
        x.abs().max(y.abs())
    } else {
        let q = p / (p - 1.0);
        (x.abs().powf(q) + y.abs().powf(q)).powf(1.0 / q)
    }
}

// a subgradient of the norm at (dx, dy) with dual norm one
fn gradient(metric: &Metric, dx: f64, dy: f64, len: f64) -> (f64, f64) {
    let p = metric.p();
    if p == 1.0 {
        return (dx.signum(), dy.signum());
    }
    if p.is_infinite() {
        return if dx.abs() >= dy.abs() { (dx.signum(), 0.0) } else { (0.0, dy.signum()) };
    }
    let f = |d: f64| d.signum() * (d.abs() / len).powf(p - 1.0);
    (f(dx), f(dy))
}

/// Exhaustive optimum for a small instance.
pub fn naive_solve(inst: &Instance, cfg: &OracleConfig) -> Result<Solution, OracleError> {
    cfg.validate()?;
    inst.validate()?;
    let n = inst.terminals.len();
    if n > cfg.max_n {
        return Err(OracleError::TooManyTerminals { n, max: cfg.max_n });
    }
    if inst.k > cfg.max_k {
        return Err(OracleError::TooManySteiner { k: inst.k, max: cfg.max_k });
    }
    let x = &inst.terminals;
    let metric = inst.metric;
    // ascending distinct distances, with the empty level first
    let mut dists: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            dists.push((metric.dist(x[i], x[j]), i, j));
        }
    }
    dists.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut levels: Vec<f64> = vec![0.0];
    for &(d, _, _) in &dists {
        if d - levels.last().unwrap() > 1e-12 * d.max(1.0) || levels.len() == 1 {
            levels.push(d);
        }
    }
    let level_adj = |d: usize| -> Vec<u32> {
        let mut adj = vec![0u32; n];
        if d > 0 {
            let cap = levels[d] * (1.0 + 1e-12) + f64::MIN_POSITIVE;
            for &(len, i, j) in &dists {
                if len <= cap {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        adj
    };
    let level_graphs: Vec<Vec<u32>> = (0..levels.len()).map(level_adj).collect();
    let delta = metric.max_steiner_degree();
    let mut ranked: Vec<(f64, usize, Config)> = Vec::new();
    for c in configurations(n, inst.k, delta) {
        let k = c.masks.len();
        let first = (0..levels.len()).find(|&d| {
            let mut adj = level_graphs[d].clone();
            adj.resize(n + k, 0);
            for (s, &m) in c.masks.iter().enumerate() {
                adj[n + s] |= m;
                for i in bits(m) {
                    adj[i] |= 1 << (n + s);
                }
            }
            for &(a, b) in &c.links {
                adj[n + a] |= 1 << (n + b);
                adj[n + b] |= 1 << (n + a);
            }
            two_connected(&adj)
        });
        if let Some(d) = first {
            let lb = lower_bound(&c, x, &metric).max(levels[d]);
            ranked.push((lb, d, c));
        }
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.masks.len().cmp(&b.2.masks.len())));
    let mut best: Option<(f64, usize, Config, Vec<Point>)> = None;
    for (lb, d, c) in ranked {
        if best.as_ref().is_some_and(|b| lb >= b.0) {
            break;
        }
        let (pos, value) = if c.masks.is_empty() {
            (Vec::new(), 0.0)
        } else {
            place(&c, x, &metric, cfg)?
        };
        let total = value.max(levels[d]);
        if best.as_ref().is_none_or(|b| total < b.0) {
            best = Some((total, d, c, pos));
        }
    }
    let (_, d, c, pos) = best.expect("the complete graph is 2-connected");
    let mut g = Network::with_terminals(x);
    for (s, p) in pos.iter().enumerate() {
        let id = g.add_vertex(Role::Steiner, Some(*p));
        debug_assert_eq!(id, n + s);
    }
    for (i, row) in level_graphs[d].iter().enumerate() {
        for j in bits(*row).filter(|&j| j > i) {
            g.add_edge(i, j).expect("level edge");
        }
    }
    for (s, &m) in c.masks.iter().enumerate() {
        for i in bits(m) {
            g.add_edge(n + s, i).expect("Steiner edge");
        }
    }
    for &(a, b) in &c.links {
        g.add_edge(n + a, n + b).expect("Steiner link");
    }
    Ok(Solution {
        bottleneck: g.bottleneck(&metric).unwrap_or(0.0),
        steiner_count: c.masks.len(),
        network: g,
        level: d,
        level_length: levels[d],
        stats: SolveStats {
            levels_explored: levels.len(),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bitmask_two_connectivity() {
        assert!(two_connected(&[0b10, 0b01]));
        assert!(two_connected(&[0b110, 0b101, 0b011]));
        assert!(!two_connected(&[0b010, 0b101, 0b010]));
    }

    #[test]
    fn config_counts_are_canonical() {
        // one Steiner point on three terminals: masks of size 2 or 3
        assert_eq!(configurations(3, 1, 5).len(), 1 + 4);
    }

    #[test]
    fn two_terminals() {
        let inst = Instance::new(vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0)], 0, Metric::L2).unwrap();
        let s = naive_solve(&inst, &OracleConfig::default()).unwrap();
        assert_eq!(s.bottleneck, 4.0);
        let inst = Instance { k: 2, ..inst };
        let s = naive_solve(&inst, &OracleConfig::default()).unwrap();
        assert_abs_diff_eq!(s.bottleneck, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn equilateral_two_relays() {
        let h = 3f64.sqrt() / 2.0;
        let x = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)];
        let s = naive_solve(&Instance::new(x, 2, Metric::L2).unwrap(), &OracleConfig::default()).unwrap();
        assert_abs_diff_eq!(s.bottleneck, 1.0 / 3f64.sqrt(), epsilon = 1e-8);
    }
}
