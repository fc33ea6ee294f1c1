//! Interval certificates of empty intersection.
//!
//! `ball_empty` covers the Euclidean ball by adaptively subdivided boxes;
//! a box is discharged when it provably misses the ball or when interval
//! evaluation of the cell structure proves the cell empty on it. The
//! verdict is one-sided: `None` means budget exhausted, never "nonempty".

use crate::cell::{Cell, CellKind};
use crate::interval::{Interval, IntervalSet};

use super::OracleConfig;

/// Certify `B(center, rho) ∩ cell = ∅`; returns the number of boxes used.
pub fn ball_empty(
    cell: &Cell,
    center: &[f64],
    rho: f64,
    cfg: &OracleConfig,
) -> Option<usize> {
    let root: Vec<Interval<f64>> = center
        .iter()
        .map(|&c| Interval::new(c - rho, c + rho))
        .collect();
    let mut work = vec![root];
    let mut used = 0usize;
    while let Some(bx) = work.pop() {
        used += 1;
        if used > cfg.certify_max_boxes {
            return None;
        }
        if box_ball_dist2(&bx, center) >= rho * rho {
            continue;
        }
        if box_empty(cell, &bx) {
            continue;
        }
        // Split the widest axis; degenerate boxes that still fail are a
        // budget loss, caught by the box cap.
        let (axis, width) = widest_axis(&bx);
        if width <= 0.0 || !width.is_finite() {
            return None;
        }
        let lo = bx[axis].lo();
        let hi = bx[axis].hi();
        let mid = bx[axis].midpoint();
        if !(lo < mid && mid < hi) {
            return None;
        }
        let mut left = bx.clone();
        left[axis] = Interval::new(lo, mid);
        let mut right = bx;
        right[axis] = Interval::new(mid, hi);
        work.push(left);
        work.push(right);
    }
    Some(used)
}

fn widest_axis(bx: &[Interval<f64>]) -> (usize, f64) {
    let mut axis = 0;
    let mut width = -1.0;
    for (i, iv) in bx.iter().enumerate() {
        let w = iv.width();
        if w > width {
            width = w;
            axis = i;
        }
    }
    (axis, width)
}

/// Squared distance from a point to a box.
fn box_ball_dist2(bx: &[Interval<f64>], p: &[f64]) -> f64 {
    bx.iter()
        .zip(p)
        .map(|(iv, &c)| {
            let d = if c < iv.lo() {
                iv.lo() - c
            } else if c > iv.hi() {
                c - iv.hi()
            } else {
                0.0
            };
            d * d
        })
        .sum()
}

/// Interval proof that the cell does not meet the box.
pub fn box_empty(cell: &Cell, bx: &[Interval<f64>]) -> bool {
    match &cell.kind {
        CellKind::Point1D(v) => {
            let e: IntervalSet<f64> = v.enclose_box(&[]);
            e.is_empty() || !e.intersects_interval(&bx[0])
        }
        CellKind::Interval1D { lo, hi } => {
            one_d_side_empty(lo, hi, &[], bx[0])
        }
        CellKind::Section { base, bound } => {
            let prefix = &bx[..bx.len() - 1];
            if box_empty(base, prefix) {
                return true;
            }
            let f: IntervalSet<f64> = bound.enclose_box(prefix);
            // Empty enclosure: the bound is undefined on the whole box, and
            // bounds are total on their base, so the base misses the box.
            f.is_empty() || !f.intersects_interval(&bx[bx.len() - 1])
        }
        CellKind::Sector { base, lo, hi } => {
            let prefix = &bx[..bx.len() - 1];
            if box_empty(base, prefix) {
                return true;
            }
            one_d_side_empty(lo, hi, prefix, bx[bx.len() - 1])
        }
        CellKind::Union(members) => members.iter().all(|m| box_empty(m, bx)),
    }
}

/// Certify that no `t` in `t_box` satisfies `lo(x) < t < hi(x)` for any `x`
/// in the prefix box.
fn one_d_side_empty(
    lo: &Option<crate::expr::ScalarExpr>,
    hi: &Option<crate::expr::ScalarExpr>,
    prefix: &[Interval<f64>],
    t_box: Interval<f64>,
) -> bool {
    if let Some(e) = lo {
        let enc: IntervalSet<f64> = e.enclose_box(prefix);
        if enc.is_empty() {
            // Lower bound undefined on the whole box; bounds are total on
            // the base, so the base misses the box.
            return true;
        }
        // t <= min possible lo(x) means t <= lo(x) everywhere: empty.
        if t_box.hi() <= enc.min() {
            return true;
        }
    }
    if let Some(e) = hi {
        let enc: IntervalSet<f64> = e.enclose_box(prefix);
        if enc.is_empty() {
            return true;
        }
        if t_box.lo() >= enc.max() {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, ScalarExpr};
    use std::sync::Arc;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn far_point_certifies_in_one_box() {
        // Graph of x1^2 over (0, 2); a faraway point separates immediately.
        let base = Arc::new(Cell::interval1d(
            Some(ScalarExpr::constant(0)),
            Some(ScalarExpr::constant(2)),
        ));
        let graph = Cell::section(base, parse("x1^2", 1).unwrap()).unwrap();
        let used = ball_empty(&graph, &[1.0, 3.0], 0.5, &cfg()).expect("certificate");
        assert!(used <= 8, "used {used} boxes");
    }

    #[test]
    fn near_point_needs_smaller_radius() {
        let base = Arc::new(Cell::interval1d(
            Some(ScalarExpr::constant(0)),
            Some(ScalarExpr::constant(2)),
        ));
        let graph = Cell::section(base, parse("x1^2", 1).unwrap()).unwrap();
        // Distance from (1, 1.2) to the parabola is about 0.178/sqrt(...).
        assert!(ball_empty(&graph, &[1.0, 1.2], 0.05, &cfg()).is_some());
        // A ball that actually meets the graph must never certify.
        assert!(ball_empty(&graph, &[1.0, 1.2], 0.5, &cfg()).is_none());
    }

    #[test]
    fn pole_tail_certifies() {
        // Section x4 = -1/x1 over (0, inf): points above the pole separate
        // even though enclosures near x1 = 0 are infinite.
        let base = Arc::new(Cell::interval1d(Some(ScalarExpr::constant(0)), None));
        let graph = Cell::section(base, parse("-1/x1", 1).unwrap()).unwrap();
        assert!(ball_empty(&graph, &[0.0, 1.0], 0.25, &cfg()).is_some());
        assert!(ball_empty(&graph, &[0.001, -1000.0], 0.25, &cfg()).is_none());
    }
}
