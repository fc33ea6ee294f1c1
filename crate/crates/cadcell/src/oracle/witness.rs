//! Witness search: find cell points within a given radius of a target.
//!
//! The search recurses through the stack structure: produce base points
//! near the target's projection (inside the base, or approaching its
//! closure), then solve the last coordinate against the bounds. Base
//! candidates mix axis steps, warm-start rescalings and log-scaled random
//! offsets; the log scales matter because the interesting approach regions
//! are parabola-like (`x2^2 + x3^2 = O(x1)`), which uniform sampling at a
//! single scale never hits.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{dist2, OracleConfig};
use crate::cell::{Cell, CellKind, Containment};
use crate::expr::ScalarExpr;

pub(crate) fn find_witness(
    cell: &Cell,
    p: &[f64],
    eps: f64,
    warm: Option<&[f64]>,
    rng: &mut ChaCha8Rng,
    cfg: &OracleConfig,
) -> Option<Vec<f64>> {
    find_witness_with_tries(cell, p, eps, warm, rng, cfg, cfg.witness_tries)
}

pub(crate) fn find_witness_with_tries(
    cell: &Cell,
    p: &[f64],
    eps: f64,
    warm: Option<&[f64]>,
    rng: &mut ChaCha8Rng,
    cfg: &OracleConfig,
    tries: usize,
) -> Option<Vec<f64>> {
    match &cell.kind {
        CellKind::Point1D(v) => {
            let x = v.eval(&[])?;
            if (x - p[0]).abs() <= eps && cell.contains(&[x]) == Containment::In {
                Some(vec![x])
            } else {
                None
            }
        }
        CellKind::Interval1D { lo, hi } => {
            let a = lo.as_ref().and_then(|e| e.eval(&[])).unwrap_or(f64::NEG_INFINITY);
            let b = hi.as_ref().and_then(|e| e.eval(&[])).unwrap_or(f64::INFINITY);
            let w = clamp_into_open(p[0], a, b, eps)?;
            if (w - p[0]).abs() <= eps && cell.contains(&[w]) == Containment::In {
                Some(vec![w])
            } else {
                None
            }
        }
        CellKind::Union(members) => {
            let warm_member_first = |m: &Cell| {
                warm.map(|w| m.contains(w) == Containment::In).unwrap_or(false)
            };
            let mut order: Vec<&std::sync::Arc<Cell>> = members.iter().collect();
            order.sort_by_key(|m| !warm_member_first(m));
            for m in order {
                if let Some(w) =
                    find_witness_with_tries(m, p, eps, warm, rng, cfg, tries / members.len().max(1) + 8)
                {
                    return Some(w);
                }
            }
            None
        }
        CellKind::Section { base, bound } => {
            let (x, t) = split_last(p);
            let warm_prefix = warm.map(|w| &w[..w.len() - 1]);
            let cands = base_candidates(base, x, eps * 0.98, warm_prefix, rng, cfg, tries);
            let mut lifted: Vec<(Vec<f64>, f64)> = Vec::new();
            for bx in cands {
                let d2 = dist2(&bx, x);
                if d2 >= eps * eps {
                    continue;
                }
                let theta = (eps * eps - d2).sqrt();
                if let Some(v) = bound.eval(&bx) {
                    if (v - t).abs() <= theta {
                        let mut w = bx.clone();
                        w.push(v);
                        if cell.contains(&w) == Containment::In {
                            return Some(w);
                        }
                    }
                    lifted.push((bx, v));
                }
            }
            // Level-set bisection between straddling pairs.
            let mut pairs = 0;
            for i in 0..lifted.len() {
                for j in (i + 1)..lifted.len() {
                    if (lifted[i].1 - t).signum() * (lifted[j].1 - t).signum() < 0.0 {
                        pairs += 1;
                        if let Some(w) =
                            bisect_to_graph(cell, base, bound, &lifted[i].0, &lifted[j].0, p, eps)
                        {
                            return Some(w);
                        }
                        if pairs >= 6 {
                            return None;
                        }
                    }
                }
            }
            None
        }
        CellKind::Sector { base, lo, hi } => {
            let (x, t) = split_last(p);
            let warm_prefix = warm.map(|w| &w[..w.len() - 1]);
            let cands = base_candidates(base, x, eps * 0.98, warm_prefix, rng, cfg, tries);
            for bx in cands {
                let d2 = dist2(&bx, x);
                if d2 >= eps * eps {
                    continue;
                }
                let theta = (eps * eps - d2).sqrt();
                let lo_v = match lo {
                    Some(e) => match e.eval(&bx) {
                        Some(v) => v,
                        None => continue,
                    },
                    None => f64::NEG_INFINITY,
                };
                let hi_v = match hi {
                    Some(e) => match e.eval(&bx) {
                        Some(v) => v,
                        None => continue,
                    },
                    None => f64::INFINITY,
                };
                if !(lo_v < hi_v) {
                    continue;
                }
                let gap = hi_v - lo_v;
                let margin = if gap.is_finite() {
                    (gap / 4.0).min(theta / 2.0)
                } else {
                    theta / 2.0
                };
                let lo_eff = if lo_v.is_finite() { lo_v + margin } else { lo_v };
                let hi_eff = if hi_v.is_finite() { hi_v - margin } else { hi_v };
                if lo_eff > hi_eff {
                    continue;
                }
                let t2 = t.clamp(lo_eff, hi_eff);
                if (t2 - t).abs() <= theta {
                    let mut w = bx;
                    w.push(t2);
                    if cell.contains(&w) == Containment::In {
                        return Some(w);
                    }
                }
            }
            None
        }
    }
}

/// Base points inside `base` within `radius` of `x`.
fn base_candidates(
    base: &Cell,
    x: &[f64],
    radius: f64,
    warm: Option<&[f64]>,
    rng: &mut ChaCha8Rng,
    cfg: &OracleConfig,
    tries: usize,
) -> Vec<Vec<f64>> {
    let dim = x.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let push = |out: &mut Vec<Vec<f64>>, bx: Vec<f64>| {
        if dist2(&bx, x) < radius * radius && base.contains(&bx) == Containment::In {
            out.push(bx);
        }
    };

    if base.contains(x) == Containment::In {
        out.push(x.to_vec());
    }

    // Warm-start rescalings: per-coordinate log factors reach the
    // parabola-shaped approach regions a plain ray would leave.
    if let Some(w) = warm {
        for lam in [1.0, 0.5, 0.25, 0.1, 0.04, 0.01] {
            let bx: Vec<f64> = x.iter().zip(w).map(|(xi, wi)| xi + lam * (wi - xi)).collect();
            push(&mut out, bx);
        }
        for _ in 0..tries / 3 {
            let bx: Vec<f64> = x
                .iter()
                .zip(w)
                .map(|(xi, wi)| {
                    let f = 10f64.powf(rng.gen_range(-3.0..0.15));
                    xi + f * (wi - xi)
                })
                .collect();
            push(&mut out, bx);
        }
    }

    // Axis steps at several scales: these land exactly on coordinate
    // subspaces, where many catalog bounds take their limit values.
    for scale in [0.7, 0.3, 0.1, 0.01, 1e-4] {
        let r = radius * scale;
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut bx = x.to_vec();
                bx[i] += s * r;
                push(&mut out, bx);
            }
        }
        if out.len() > tries * 2 {
            break;
        }
    }

    // Random offsets, half at uniform radius, half log-scaled.
    for k in 0..tries {
        let r = if k % 2 == 0 {
            radius * rng.gen_range(0.0f64..0.95)
        } else {
            radius * 10f64.powf(rng.gen_range(-9.0..-0.05))
        };
        let dir = random_unit(rng, dim);
        let mut bx = x.to_vec();
        for i in 0..dim {
            // Per-coordinate log rescale of the direction.
            let f = 10f64.powf(rng.gen_range(-2.0..0.0));
            bx[i] += r * dir[i] * f;
        }
        push(&mut out, bx);
    }

    // Measure-zero bases (sections, points) are unreachable by random
    // offsets; recurse into the base's own witness search.
    let needs_recursion = out.len() < 4;
    if needs_recursion && dim >= 1 {
        for _ in 0..6 {
            if let Some(bw) = find_witness_with_tries(
                base,
                x,
                radius,
                warm,
                rng,
                cfg,
                cfg.witness_tries,
            ) {
                if !out.contains(&bw) {
                    out.push(bw);
                }
            }
        }
    }
    out
}

/// Bisect between two base points whose bound values straddle the target
/// height, staying inside the base, until the lifted point enters the ball.
fn bisect_to_graph(
    cell: &Cell,
    base: &Cell,
    bound: &ScalarExpr,
    a: &[f64],
    b: &[f64],
    p: &[f64],
    eps: f64,
) -> Option<Vec<f64>> {
    let (x, t) = split_last(p);
    let mut lo = a.to_vec();
    let mut hi = b.to_vec();
    let mut v_lo = bound.eval(&lo)?;
    for _ in 0..70 {
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(u, w)| 0.5 * (u + w)).collect();
        if base.contains(&mid) != Containment::In {
            return None;
        }
        let v_mid = bound.eval(&mid)?;
        let d2 = dist2(&mid, x);
        if d2 < eps * eps {
            let theta = (eps * eps - d2).sqrt();
            if (v_mid - t).abs() <= theta {
                let mut w = mid.clone();
                w.push(v_mid);
                if cell.contains(&w) == Containment::In {
                    return Some(w);
                }
            }
        }
        if (v_lo - t).signum() * (v_mid - t).signum() < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            v_lo = v_mid;
        }
    }
    None
}

fn clamp_into_open(t: f64, a: f64, b: f64, eps: f64) -> Option<f64> {
    if !(a < b) {
        return None;
    }
    let gap = b - a;
    let margin = if gap.is_finite() {
        (gap / 4.0).min(eps / 2.0)
    } else {
        eps / 2.0
    };
    let lo_eff = if a.is_finite() { a + margin } else { a };
    let hi_eff = if b.is_finite() { b - margin } else { b };
    if lo_eff > hi_eff {
        return None;
    }
    Some(t.clamp(lo_eff, hi_eff))
}

pub(crate) fn split_last(p: &[f64]) -> (&[f64], f64) {
    (&p[..p.len() - 1], p[p.len() - 1])
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0f64..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-12 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Sample points of `cell ∩ B(center, radius)`.
///
/// Sections are measure zero vertically, so straight rejection sampling
/// cannot touch them; lifted candidates are enriched by level-set bisection
/// between base points whose bound values straddle the ball.
pub(crate) fn sample_in_ball(
    cell: &Cell,
    center: &[f64],
    radius: f64,
    want: usize,
    rng: &mut ChaCha8Rng,
    cfg: &OracleConfig,
) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    match &cell.kind {
        CellKind::Point1D(v) => {
            if let Some(x) = v.eval(&[]) {
                if (x - center[0]).abs() <= radius {
                    out.push(vec![x]);
                }
            }
        }
        CellKind::Interval1D { lo, hi } => {
            let a = lo
                .as_ref()
                .and_then(|e| e.eval(&[]))
                .unwrap_or(f64::NEG_INFINITY)
                .max(center[0] - radius);
            let b = hi
                .as_ref()
                .and_then(|e| e.eval(&[]))
                .unwrap_or(f64::INFINITY)
                .min(center[0] + radius);
            if a < b {
                for _ in 0..want {
                    out.push(vec![rng.gen_range(a..b)]);
                }
            }
        }
        CellKind::Union(members) => {
            for m in members {
                out.extend(sample_in_ball(
                    m,
                    center,
                    radius,
                    want / members.len() + 1,
                    rng,
                    cfg,
                ));
            }
        }
        CellKind::Sector { base, lo, hi } => {
            let (x, t) = split_last(center);
            let base_pts = ball_base_points(base, x, radius, want * 2, rng, cfg);
            for bx in base_pts {
                let d2 = dist2(&bx, x);
                if d2 >= radius * radius {
                    continue;
                }
                let theta = (radius * radius - d2).sqrt();
                let lo_v = match lo {
                    Some(e) => match e.eval(&bx) {
                        Some(v) => v,
                        None => continue,
                    },
                    None => f64::NEG_INFINITY,
                };
                let hi_v = match hi {
                    Some(e) => match e.eval(&bx) {
                        Some(v) => v,
                        None => continue,
                    },
                    None => f64::INFINITY,
                };
                let a = lo_v.max(t - theta);
                let b = hi_v.min(t + theta);
                if !(a < b) {
                    continue;
                }
                let tv = rng.gen_range(a..b);
                if tv > lo_v && tv < hi_v {
                    let mut w = bx;
                    w.push(tv);
                    if cell.contains(&w) == Containment::In {
                        out.push(w);
                    }
                }
                if out.len() >= want {
                    break;
                }
            }
        }
        CellKind::Section { base, bound } => {
            let (x, t) = split_last(center);
            let base_pts = ball_base_points(base, x, radius, want * 3, rng, cfg);
            let mut lifted: Vec<(Vec<f64>, f64)> = Vec::new();
            for bx in base_pts {
                let d2 = dist2(&bx, x);
                if d2 >= radius * radius {
                    continue;
                }
                if let Some(v) = bound.eval(&bx) {
                    let theta = (radius * radius - d2).sqrt();
                    if (v - t).abs() <= theta {
                        let mut w = bx.clone();
                        w.push(v);
                        if cell.contains(&w) == Containment::In {
                            out.push(w);
                        }
                    }
                    lifted.push((bx, v));
                }
            }
            // Level-set enrichment: bisect straddling pairs toward random
            // heights inside the ball.
            let mut budget = want.saturating_sub(out.len()) * 2;
            'outer: for i in 0..lifted.len() {
                for j in (i + 1)..lifted.len() {
                    if budget == 0 {
                        break 'outer;
                    }
                    let span_lo = lifted[i].1.min(lifted[j].1);
                    let span_hi = lifted[i].1.max(lifted[j].1);
                    let a = span_lo.max(t - radius);
                    let b = span_hi.min(t + radius);
                    if !(a < b) {
                        continue;
                    }
                    let target = rng.gen_range(a..b);
                    if (lifted[i].1 - target) * (lifted[j].1 - target) >= 0.0 {
                        continue;
                    }
                    budget -= 1;
                    let mut probe = x.to_vec();
                    probe.push(target);
                    if let Some(w) =
                        bisect_to_graph(cell, base, bound, &lifted[i].0, &lifted[j].0, &probe, radius)
                    {
                        out.push(w);
                    }
                }
            }
        }
    }
    out.truncate(want);
    out
}

/// Base points within `radius` of `x` that lie inside the base cell.
fn ball_base_points(
    base: &Cell,
    x: &[f64],
    radius: f64,
    want: usize,
    rng: &mut ChaCha8Rng,
    cfg: &OracleConfig,
) -> Vec<Vec<f64>> {
    match &base.kind {
        // Full-dimensional recursion handles structured bases.
        CellKind::Section { .. } | CellKind::Union { .. } => {
            sample_in_ball(base, x, radius, want, rng, cfg)
        }
        CellKind::Point1D(_) => sample_in_ball(base, x, radius, want, rng, cfg),
        _ => {
            // Open cells: mix rejection sampling with structural sampling.
            let dim = x.len();
            let mut out = Vec::new();
            for k in 0..want {
                let r = if k % 2 == 0 {
                    radius * rng.gen::<f64>()
                } else {
                    radius * 10f64.powf(rng.gen_range(-6.0..0.0))
                };
                let dir = random_unit(rng, dim);
                let bx: Vec<f64> = x.iter().zip(&dir).map(|(xi, d)| xi + r * d).collect();
                if base.contains(&bx) == Containment::In {
                    out.push(bx);
                }
            }
            if out.len() < want / 4 {
                out.extend(sample_in_ball(base, x, radius, want / 2, rng, cfg));
            }
            out
        }
    }
}
