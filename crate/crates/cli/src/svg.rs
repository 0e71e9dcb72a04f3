//! SVG drawing: filled terminals, open Steiner points, bottleneck edge
//! labelled "b".

use std::fmt::Write;

use relaynet::format::{FormatError, SolutionFile};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 32.0;

pub fn render(file: &SolutionFile) -> Result<String, FormatError> {
    let metric = file.metric()?;
    let g = file.network()?;
    let pts: Vec<[f64; 2]> = file.terminals.iter().chain(&file.steiner_points).copied().collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &[x, y] in &pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    // y grows upwards in the plane and downwards on screen
    let at = |v: usize| {
        let [x, y] = pts[v];
        (MARGIN + (x - x0) * scale, SIZE - MARGIN - (y - y0) * scale)
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let longest = g
        .edges()
        .map(|e| (e, g.edge_length(e, &metric).unwrap_or(0.0)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    for e in g.edges() {
        let ((ax, ay), (bx, by)) = (at(e.0), at(e.1));
        let _ = writeln!(
            s,
            r#"<line class="edge" x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke="black" stroke-width="1.5"/>"#
        );
    }
    if let Some((e, _)) = longest {
        let ((ax, ay), (bx, by)) = (at(e.0), at(e.1));
        let _ = writeln!(
            s,
            r#"<text class="label" x="{:.3}" y="{:.3}" font-family="serif" font-style="italic" font-size="16">b</text>"#,
            (ax + bx) / 2.0 + 6.0,
            (ay + by) / 2.0 - 6.0
        );
    }
    let n = file.terminals.len();
    for v in 0..pts.len() {
        let (x, y) = at(v);
        if v < n {
            let _ = writeln!(s, r#"<circle class="terminal" cx="{x:.3}" cy="{y:.3}" r="5" fill="black"/>"#);
        } else {
            let _ = writeln!(
                s,
                r#"<circle class="steiner" cx="{x:.3}" cy="{y:.3}" r="5" fill="white" stroke="black" stroke-width="1.5"/>"#
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
