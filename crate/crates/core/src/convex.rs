//! Min-max placement of free points as a conic program.
//!
//! Variables are the free coordinates followed by the objective `t`;
//! every edge contributes `||z_a - end|| <= t`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
    SupportedConeT::{NonnegativeConeT, PowerConeT, SecondOrderConeT, ZeroConeT},
};

use crate::geometry::{Metric, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum End {
    Fixed(Point),
    Free(usize),
}

struct Rows {
    i: Vec<usize>,
    j: Vec<usize>,
    v: Vec<f64>,
    b: Vec<f64>,
    cones: Vec<SupportedConeT<f64>>,
}

impl Rows {
    fn push(&mut self, entries: &[(usize, f64)], rhs: f64) {
        let row = self.b.len();
        for &(col, val) in entries {
            if val != 0.0 {
                self.i.push(row);
                self.j.push(col);
                self.v.push(val);
            }
        }
        self.b.push(rhs);
    }
}

/// Minimises the longest edge. Returns free positions and the optimum.
pub(crate) fn solve_minimax(n_free: usize, edges: &[(usize, End)], metric: &Metric) -> Option<(Vec<Point>, f64)> {
    let t = 2 * n_free;
    let mut n_vars = t + 1;
    let mut rows = Rows {
        i: Vec::new(),
        j: Vec::new(),
        v: Vec::new(),
        b: Vec::new(),
        cones: Vec::new(),
    };
    // s = b - A x; with d = z_a - end, a row "s = c0 * t + sx * d_x + sy * d_y"
    // is encoded through this helper.
    let lin = |rows: &mut Rows, a: usize, end: &End, c0: f64, sx: f64, sy: f64, extra: &[(usize, f64)]| {
        let mut ent = vec![(t, -c0), (2 * a, -sx), (2 * a + 1, -sy)];
        let mut rhs = 0.0;
        match *end {
            End::Fixed(q) => rhs = -(sx * q.x + sy * q.y),
            End::Free(b) => {
                ent.push((2 * b, sx));
                ent.push((2 * b + 1, sy));
            }
        }
        ent.extend_from_slice(extra);
        rows.push(&ent, rhs);
    };
    match *metric {
        Metric::L2 => {
            for (a, end) in edges {
                lin(&mut rows, *a, end, 1.0, 0.0, 0.0, &[]);
                lin(&mut rows, *a, end, 0.0, 1.0, 0.0, &[]);
                lin(&mut rows, *a, end, 0.0, 0.0, 1.0, &[]);
                rows.cones.push(SecondOrderConeT(3));
            }
        }
        Metric::L1 | Metric::LInf => {
            let signs: &[(f64, f64)] = if *metric == Metric::L1 {
                &[(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            } else {
                &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
            };
            for (a, end) in edges {
                for &(sx, sy) in signs {
                    lin(&mut rows, *a, end, 1.0, -sx, -sy, &[]);
                }
            }
            rows.cones.push(NonnegativeConeT(4 * edges.len()));
        }
        Metric::Lp(p) => {
            let first = n_vars;
            n_vars += 2 * edges.len();
            // r1 + r2 = t for every edge
            for e in 0..edges.len() {
                let (r1, r2) = (first + 2 * e, first + 2 * e + 1);
                rows.push(&[(r1, 1.0), (r2, 1.0), (t, -1.0)], 0.0);
            }
            rows.cones.push(ZeroConeT(edges.len()));
            for (e, (a, end)) in edges.iter().enumerate() {
                for axis in 0..2 {
                    let r = first + 2 * e + axis;
                    rows.push(&[(r, -1.0)], 0.0);
                    rows.push(&[(t, -1.0)], 0.0);
                    let (sx, sy) = if axis == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
                    lin(&mut rows, *a, end, 0.0, sx, sy, &[]);
                    rows.cones.push(PowerConeT(1.0 / p));
                }
            }
        }
    }
    let m = rows.b.len();
    let a = CscMatrix::new_from_triplets(m, n_vars, rows.i, rows.j, rows.v);
    let pm = CscMatrix::<f64>::zeros((n_vars, n_vars));
    let mut q = vec![0.0; n_vars];
    q[t] = 1.0;
    let mut settings = DefaultSettings::<f64>::default();
    settings.verbose = false;
    settings.tol_gap_abs = 1e-12;
    settings.tol_gap_rel = 1e-12;
    settings.tol_feas = 1e-12;
    settings.max_iter = 400;
    let mut solver = DefaultSolver::new(&pm, &q, &a, &rows.b, &rows.cones, settings).ok()?;
    solver.solve();
    match solver.solution.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => {}
        _ => return None,
    }
    let x = &solver.solution.x;
    let z: Vec<Point> = (0..n_free).map(|i| Point::new(x[2 * i], x[2 * i + 1])).collect();
    let value = edges
        .iter()
        .map(|(a, end)| {
            let q = match *end {
                End::Fixed(q) => q,
                End::Free(b) => z[b],
            };
            metric.dist(z[*a], q)
        })
        .fold(0.0, f64::max);
    Some((z, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn chain(metric: Metric) -> f64 {
        // s0 - s1 chain between (0,0) and (3,0): every edge 1
        let edges = [
            (0, End::Fixed(Point::new(0.0, 0.0))),
            (0, End::Free(1)),
            (1, End::Fixed(Point::new(3.0, 0.0))),
        ];
        solve_minimax(2, &edges, &metric).unwrap().1
    }

    #[test]
    fn chain_splits_evenly() {
        for m in [Metric::L1, Metric::L2, Metric::LInf, Metric::Lp(3.0)] {
            assert_abs_diff_eq!(chain(m), 1.0, epsilon = 1e-7);
        }
    }
}
