//! Validity report for a solution file.

use relaynet::format::{FormatError, SolutionFile};
use relaynet::graph::Edge;
use relaynet::is_two_connected;

pub struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.0)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for (ok, line) in &self.lines {
            out += if *ok { "ok    " } else { "FAIL  " };
            out += line;
            out.push('\n');
        }
        out += if self.passed() { "valid\n" } else { "invalid\n" };
        out
    }
}

pub fn check(file: &SolutionFile, tol: f64) -> Result<Report, FormatError> {
    let metric = file.metric()?;
    let g = file.network()?;
    let mut lines = Vec::new();
    let two = is_two_connected(&g);
    lines.push((two, if two { "2-connected".to_string() } else { "not 2-connected".to_string() }));

    let used = file.steiner_points.len();
    lines.push((used <= file.k, format!("budget: {used} Steiner points, k = {}", file.k)));

    let delta = metric.max_steiner_degree();
    let deg = g.steiner_points().map(|s| g.degree(s)).max().unwrap_or(0);
    lines.push((deg <= delta, format!("degree: max Steiner degree {deg}, bound {delta}")));

    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
    let mut stale = 0;
    for e in &file.edges {
        let real = g.edge_length(Edge::new(e.u, e.v), &metric).unwrap_or(f64::NAN);
        if !close(real, e.length) {
            stale += 1;
        }
    }
    lines.push((stale == 0, format!("edge lengths: {stale} of {} differ from coordinates", file.edges.len())));

    let real = g.bottleneck(&metric).unwrap_or(0.0);
    lines.push((
        close(real, file.bottleneck),
        format!("bottleneck: recorded {}, recomputed {real}", file.bottleneck),
    ));
    Ok(Report { lines })
}
