//! Points, L_p distances and colour-spanning disks.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convex;

/// Default absolute tolerance for bottleneck lengths.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

// slack used when testing ball membership of a candidate centre
const MEMBERSHIP_SLACK: f64 = 1e-12;
const BOUNDARY_SAMPLES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid exponent p = {0}; expected p >= 1 or infinity")]
    InvalidExponent(f64),
    #[error("colour classes must be non-empty")]
    EmptyClass,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("no point set")]
    NoPoints,
}

/// An L_p metric on the plane, 1 <= p <= infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    L1,
    L2,
    LInf,
    Lp(f64),
}

impl Metric {
    pub fn new(p: f64) -> Result<Self, GeometryError> {
        if p.is_nan() || p < 1.0 {
            return Err(GeometryError::InvalidExponent(p));
        }
        Ok(if p == f64::INFINITY {
            Metric::LInf
        } else if p == 1.0 {
            Metric::L1
        } else if p == 2.0 {
            Metric::L2
        } else {
            Metric::Lp(p)
        })
    }

    pub fn p(&self) -> f64 {
        match *self {
            Metric::L1 => 1.0,
            Metric::L2 => 2.0,
            Metric::LInf => f64::INFINITY,
            Metric::Lp(p) => p,
        }
    }

    pub fn norm(&self, dx: f64, dy: f64) -> f64 {
        let (ax, ay) = (dx.abs(), dy.abs());
        match *self {
            Metric::L1 => ax + ay,
            Metric::L2 => ax.hypot(ay),
            Metric::LInf => ax.max(ay),
            Metric::Lp(p) => {
                let m = ax.max(ay);
                if m == 0.0 {
                    return 0.0;
                }
                m * ((ax / m).powf(p) + (ay / m).powf(p)).powf(1.0 / p)
            }
        }
    }

    pub fn dist(&self, a: Point, b: Point) -> f64 {
        self.norm(a.x - b.x, a.y - b.y)
    }

    /// Largest degree a Steiner point needs in an optimal network.
    pub fn max_steiner_degree(&self) -> usize {
        match self {
            Metric::L1 | Metric::LInf => 7,
            _ => 5,
        }
    }

    fn unit_direction(&self, theta: f64) -> (f64, f64) {
        let (s, c) = theta.sin_cos();
        let n = self.norm(c, s);
        (c / n, s / n)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::LInf => write!(f, "inf"),
            m => write!(f, "{}", m.p()),
        }
    }
}

/// A point with an identity, so equal coordinates can still be told apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub id: usize,
    pub at: Point,
}

/// A family of non-empty point classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ColourClasses {
    classes: Vec<Vec<Site>>,
}

impl ColourClasses {
    /// Builds classes from bare points; equal coordinates share an id.
    pub fn new(classes: Vec<Vec<Point>>) -> Result<Self, GeometryError> {
        let mut seen: Vec<Point> = Vec::new();
        let sites = classes
            .into_iter()
            .map(|class| {
                class
                    .into_iter()
                    .map(|at| {
                        let id = match seen.iter().position(|q| *q == at) {
                            Some(i) => i,
                            None => {
                                seen.push(at);
                                seen.len() - 1
                            }
                        };
                        Site { id, at }
                    })
                    .collect()
            })
            .collect();
        Self::from_sites(sites)
    }

    pub fn from_sites(classes: Vec<Vec<Site>>) -> Result<Self, GeometryError> {
        if classes.is_empty() {
            return Err(GeometryError::NoPoints);
        }
        for class in &classes {
            if class.is_empty() {
                return Err(GeometryError::EmptyClass);
            }
            if class.iter().any(|s| !s.at.is_finite()) {
                return Err(GeometryError::NonFinite);
            }
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[Vec<Site>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn sites(&self) -> Vec<Site> {
        let mut out: Vec<Site> = Vec::new();
        for s in self.classes.iter().flatten() {
            if !out.iter().any(|t| t.id == s.id) {
                out.push(*s);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColourDisk {
    pub center: Point,
    pub radius: f64,
    /// Chosen site id for every class, in class order.
    pub choices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskOptions {
    pub tolerance: f64,
    /// Require pairwise distinct sites across classes.
    pub distinct: bool,
}

impl Default for DiskOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            distinct: false,
        }
    }
}

/// Returns a centre of a radius-`lambda` ball meeting every class, if any.
pub fn disk_feasible(classes: &ColourClasses, metric: &Metric, lambda: f64) -> Option<Point> {
    feasible_center(classes, metric, lambda, false).map(|(c, _)| c)
}

pub fn smallest_colour_spanning_disk(classes: &ColourClasses, metric: &Metric) -> ColourDisk {
    smallest_colour_spanning_disk_with(classes, metric, DiskOptions::default())
        .expect("without distinctness every non-empty family has a spanning disk")
}

/// Smallest ball containing one site of every class; `None` only when
/// `distinct` is set and the classes admit no distinct representatives.
pub fn smallest_colour_spanning_disk_with(
    classes: &ColourClasses,
    metric: &Metric,
    opts: DiskOptions,
) -> Option<ColourDisk> {
    let sites = classes.sites();
    let mut hi = 0.0f64;
    for (i, a) in sites.iter().enumerate() {
        for b in &sites[i + 1..] {
            hi = hi.max(metric.dist(a.at, b.at));
        }
    }
    let (_, mut picks) = feasible_center(classes, metric, hi, opts.distinct)?;
    if let Some((_, p)) = feasible_center(classes, metric, 0.0, opts.distinct) {
        picks = p;
    } else {
        // bisect well below the tolerance; the exact ball of the picks is
        // taken afterwards
        let mut lo = 0.0;
        let tol = opts.tolerance.clamp(f64::EPSILON, 1e-12);
        while hi - lo > tol * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            match feasible_center(classes, metric, mid, opts.distinct) {
                Some((_, p)) => {
                    hi = mid;
                    picks = p;
                }
                None => lo = mid,
            }
        }
    }
    let chosen: Vec<Point> = picks.iter().map(|&id| site_at(&sites, id)).collect();
    let (center, _) = smallest_enclosing_ball(&chosen, metric).ok()?;
    let radius = chosen
        .iter()
        .map(|q| metric.dist(center, *q))
        .fold(0.0, f64::max);
    let choices = assign(classes, metric, center, radius, opts.distinct).unwrap_or(picks);
    let radius = classes
        .classes()
        .iter()
        .zip(&choices)
        .map(|(_, id)| metric.dist(center, site_at(&sites, *id)))
        .fold(0.0, f64::max);
    Some(ColourDisk {
        center,
        radius,
        choices,
    })
}

fn site_at(sites: &[Site], id: usize) -> Point {
    sites.iter().find(|s| s.id == id).map(|s| s.at).unwrap()
}

fn within(metric: &Metric, c: Point, q: Point, lambda: f64) -> bool {
    metric.dist(c, q) <= lambda * (1.0 + MEMBERSHIP_SLACK) + MEMBERSHIP_SLACK
}

// Chooses a site for every class inside the ball, nearest first.
fn assign(
    classes: &ColourClasses,
    metric: &Metric,
    c: Point,
    lambda: f64,
    distinct: bool,
) -> Option<Vec<usize>> {
    let options: Vec<Vec<usize>> = classes
        .classes()
        .iter()
        .map(|class| {
            let mut ok: Vec<&Site> = class.iter().filter(|s| within(metric, c, s.at, lambda)).collect();
            ok.sort_by(|a, b| {
                metric
                    .dist(c, a.at)
                    .total_cmp(&metric.dist(c, b.at))
                    .then(a.id.cmp(&b.id))
            });
            ok.into_iter().map(|s| s.id).collect()
        })
        .collect();
    if options.iter().any(|o| o.is_empty()) {
        return None;
    }
    if !distinct {
        return Some(options.iter().map(|o| o[0]).collect());
    }
    distinct_representatives(&options)
}

/// Kuhn matching of classes to distinct ids; options are in preference order.
pub(crate) fn distinct_representatives(options: &[Vec<usize>]) -> Option<Vec<usize>> {
    fn augment(
        c: usize,
        options: &[Vec<usize>],
        owner: &mut std::collections::HashMap<usize, usize>,
        seen: &mut std::collections::HashSet<usize>,
    ) -> bool {
        for &id in &options[c] {
            if !seen.insert(id) {
                continue;
            }
            let free = match owner.get(&id) {
                None => true,
                Some(&other) => augment(other, options, owner, seen),
            };
            if free {
                owner.insert(id, c);
                return true;
            }
        }
        false
    }
    let mut owner = std::collections::HashMap::new();
    for c in 0..options.len() {
        let mut seen = std::collections::HashSet::new();
        if !augment(c, options, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut out = vec![0; options.len()];
    for (id, c) in owner {
        out[c] = id;
    }
    Some(out)
}

fn feasible_center(
    classes: &ColourClasses,
    metric: &Metric,
    lambda: f64,
    distinct: bool,
) -> Option<(Point, Vec<usize>)> {
    let sites = classes.sites();
    let mut candidates: Vec<Point> = Vec::new();
    for s in &sites {
        candidates.push(s.at);
        candidates.extend(extreme_points(metric, s.at, lambda));
    }
    for (i, a) in sites.iter().enumerate() {
        for b in &sites[i + 1..] {
            if metric.dist(a.at, b.at) <= 2.0 * lambda * (1.0 + 1e-9) + MEMBERSHIP_SLACK {
                candidates.extend(boundary_crossings(metric, a.at, b.at, lambda));
                candidates.push(Point::new(0.5 * (a.at.x + b.at.x), 0.5 * (a.at.y + b.at.y)));
            }
        }
    }
    candidates.sort_by(|a, b| a.lex_cmp(b));
    candidates
        .into_iter()
        .find_map(|c| assign(classes, metric, c, lambda, distinct).map(|p| (c, p)))
}

fn extreme_points(metric: &Metric, c: Point, r: f64) -> Vec<Point> {
    match metric {
        Metric::LInf => vec![
            Point::new(c.x - r, c.y - r),
            Point::new(c.x - r, c.y + r),
            Point::new(c.x + r, c.y - r),
            Point::new(c.x + r, c.y + r),
        ],
        _ => vec![
            Point::new(c.x - r, c.y),
            Point::new(c.x + r, c.y),
            Point::new(c.x, c.y - r),
            Point::new(c.x, c.y + r),
        ],
    }
}

fn polygon(metric: &Metric, c: Point, r: f64) -> Vec<Point> {
    match metric {
        Metric::LInf => vec![
            Point::new(c.x - r, c.y - r),
            Point::new(c.x + r, c.y - r),
            Point::new(c.x + r, c.y + r),
            Point::new(c.x - r, c.y + r),
        ],
        _ => vec![
            Point::new(c.x + r, c.y),
            Point::new(c.x, c.y + r),
            Point::new(c.x - r, c.y),
            Point::new(c.x, c.y - r),
        ],
    }
}

fn boundary_crossings(metric: &Metric, a: Point, b: Point, r: f64) -> Vec<Point> {
    match metric {
        Metric::L2 => circle_crossings(a, b, r),
        Metric::L1 | Metric::LInf => {
            let pa = polygon(metric, a, r);
            let pb = polygon(metric, b, r);
            let mut out = Vec::new();
            for i in 0..4 {
                for j in 0..4 {
                    segment_crossings(pa[i], pa[(i + 1) % 4], pb[j], pb[(j + 1) % 4], &mut out);
                }
            }
            out
        }
        Metric::Lp(_) => sampled_crossings(metric, a, b, r)
            .into_iter()
            .chain(sampled_crossings(metric, b, a, r))
            .collect(),
    }
}

fn circle_crossings(a: Point, b: Point, r: f64) -> Vec<Point> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let d = dx.hypot(dy);
    if d == 0.0 || d > 2.0 * r * (1.0 + 1e-9) {
        return Vec::new();
    }
    let h = (r * r - 0.25 * d * d).max(0.0).sqrt();
    let (mx, my) = (a.x + 0.5 * dx, a.y + 0.5 * dy);
    let (ux, uy) = (-dy / d, dx / d);
    vec![
        Point::new(mx + h * ux, my + h * uy),
        Point::new(mx - h * ux, my - h * uy),
    ]
}

fn segment_crossings(p: Point, p2: Point, q: Point, q2: Point, out: &mut Vec<Point>) {
    let (rx, ry) = (p2.x - p.x, p2.y - p.y);
    let (sx, sy) = (q2.x - q.x, q2.y - q.y);
    let denom = rx * sy - ry * sx;
    let (qpx, qpy) = (q.x - p.x, q.y - p.y);
    let scale = (rx.abs() + ry.abs()).max(1e-300);
    if denom.abs() <= 1e-14 * scale * scale {
        // parallel: keep endpoints lying on the other segment
        if (qpx * ry - qpy * rx).abs() > 1e-12 * scale * scale {
            return;
        }
        for (pt, a, b) in [(p, q, q2), (p2, q, q2), (q, p, p2), (q2, p, p2)] {
            if on_segment(pt, a, b) {
                out.push(pt);
            }
        }
        return;
    }
    let t = (qpx * sy - qpy * sx) / denom;
    let u = (qpx * ry - qpy * rx) / denom;
    let eps = 1e-12;
    if (-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&u) {
        out.push(Point::new(p.x + t * rx, p.y + t * ry));
    }
}

fn on_segment(pt: Point, a: Point, b: Point) -> bool {
    let eps = 1e-12 * (1.0 + (b.x - a.x).abs() + (b.y - a.y).abs());
    pt.x >= a.x.min(b.x) - eps
        && pt.x <= a.x.max(b.x) + eps
        && pt.y >= a.y.min(b.y) - eps
        && pt.y <= a.y.max(b.y) + eps
}

// Roots of dist(boundary_a(theta), b) - r located by sampling plus bisection.
fn sampled_crossings(metric: &Metric, a: Point, b: Point, r: f64) -> Vec<Point> {
    let at = |theta: f64| {
        let (ux, uy) = metric.unit_direction(theta);
        Point::new(a.x + r * ux, a.y + r * uy)
    };
    let phi = |theta: f64| metric.dist(at(theta), b) - r;
    let step = std::f64::consts::TAU / BOUNDARY_SAMPLES as f64;
    let mut out = Vec::new();
    let mut prev = phi(0.0);
    for i in 1..=BOUNDARY_SAMPLES {
        let theta = i as f64 * step;
        let cur = phi(theta);
        if prev == 0.0 {
            out.push(at(theta - step));
        } else if prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (theta - step, theta);
            let lo_sign = prev.signum();
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if phi(mid).signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(at(0.5 * (lo + hi)));
        }
        prev = cur;
    }
    out
}

/// Exact minimum enclosing ball; ties resolved towards the lexicographically
/// smallest centre.
pub fn smallest_enclosing_ball(points: &[Point], metric: &Metric) -> Result<(Point, f64), GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::NoPoints);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    if points.iter().all(|p| *p == points[0]) {
        return Ok((points[0], 0.0));
    }
    let center = match metric {
        Metric::L2 => euclidean_ball(points),
        Metric::LInf => {
            let (x0, x1, y0, y1) = bounds(points.iter().map(|p| (p.x, p.y)));
            let r = 0.5 * (x1 - x0).max(y1 - y0);
            Point::new(x1 - r, y1 - r)
        }
        Metric::L1 => {
            // L1 is L_inf in (x + y, x - y)
            let (u0, u1, v0, v1) = bounds(points.iter().map(|p| (p.x + p.y, p.x - p.y)));
            let r = 0.5 * (u1 - u0).max(v1 - v0);
            let (u, v) = (u1 - r, v1 - r);
            Point::new(0.5 * (u + v), 0.5 * (u - v))
        }
        Metric::Lp(_) => {
            let edges: Vec<(usize, convex::End)> = points.iter().map(|p| (0, convex::End::Fixed(*p))).collect();
            match convex::solve_minimax(1, &edges, metric) {
                Some((z, _)) => z[0],
                None => euclidean_ball(points),
            }
        }
    };
    let r = points.iter().map(|p| metric.dist(center, *p)).fold(0.0, f64::max);
    Ok((center, r))
}

fn bounds(it: impl Iterator<Item = (f64, f64)>) -> (f64, f64, f64, f64) {
    it.fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a0, a1, b0, b1), (a, b)| (a0.min(a), a1.max(a), b0.min(b), b1.max(b)),
    )
}

// Smallest of the circles fixed by two or three points that covers everything.
fn euclidean_ball(points: &[Point]) -> Point {
    let covers = |c: Point, r: f64| {
        points
            .iter()
            .all(|p| (p.x - c.x).hypot(p.y - c.y) <= r * (1.0 + 1e-10) + 1e-12)
    };
    let mut best: Option<(Point, f64)> = None;
    let mut offer = |c: Point, r: f64| {
        if best.is_none_or(|(_, br)| r < br) && covers(c, r) {
            best = Some((c, r));
        }
    };
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i], points[j]);
            let c = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
            offer(c, 0.5 * (a.x - b.x).hypot(a.y - b.y));
            for &q in &points[j + 1..] {
                if let Some(c) = circumcenter(a, b, q) {
                    offer(c, (a.x - c.x).hypot(a.y - c.y));
                }
            }
        }
    }
    best.map(|(c, _)| c).unwrap_or(points[0])
}

fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Some(Point::new(
        a.x + (cy * b2 - by * c2) / d,
        a.y + (bx * c2 - cx * b2) / d,
    ))
}
