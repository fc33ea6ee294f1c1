//! Local boundary connectedness probing.
//!
//! At a boundary point `p`, sample `B(p, eps) ∩ cell` for a shrinking
//! schedule of radii and count connected components of a neighbor graph.
//! Edges are only accepted when interpolated midpoints stay in the cell
//! and in the ball: a plain proximity graph would tunnel across a slit,
//! since the two sides are Euclidean-close but not connected inside the
//! cell. Sampling cannot prove connectedness, so the positive verdict is
//! only "consistent with".

use rand_chacha::ChaCha8Rng;

use super::witness::sample_in_ball;
use super::{dist, dist2, OracleConfig};
use crate::cell::{Cell, CellKind, Containment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbcVerdict {
    FailsLbc,
    ConsistentWithLbc,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct LbcLevel {
    pub eps: f64,
    pub samples: usize,
    /// Number of components holding a significant share of the samples.
    pub components: usize,
    /// One representative point per significant component (at most 4).
    pub witnesses: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LbcReport {
    pub verdict: LbcVerdict,
    pub levels: Vec<LbcLevel>,
}

/// Number of consecutive multi-component levels required for `fails-lbc`.
const PERSISTENCE: usize = 3;
/// Fraction of samples a component must hold to count.
const SIGNIFICANT_SHARE: f64 = 0.10;

pub fn locally_boundary_connected_at(
    cell: &Cell,
    p: &[f64],
    samples_per_level: usize,
    cfg: &OracleConfig,
    rng: &mut ChaCha8Rng,
) -> LbcReport {
    assert!(
        cell.contains(p) != Containment::In,
        "lbc probe must lie outside the cell"
    );
    let dim = cell.dimension().max(1) as f64;
    let mut levels = Vec::new();
    // Radii 2^-2 .. 2^-9; unit-scale geometry.
    for k in 2..=9 {
        let eps = 0.5f64.powi(k);
        let pts = sample_in_ball(cell, p, eps, samples_per_level, rng, cfg);
        if pts.len() < samples_per_level / 8 {
            levels.push(LbcLevel {
                eps,
                samples: pts.len(),
                components: 0,
                witnesses: Vec::new(),
            });
            continue;
        }
        let spacing = eps * (1.0 / pts.len() as f64).powf(1.0 / dim);
        let delta = cfg.comp_radius_factor * spacing;
        let comps = components(cell, &pts, delta, p, eps);
        let total = pts.len();
        let mut significant: Vec<(usize, Vec<f64>)> = comps
            .into_iter()
            .filter(|c| c.len() as f64 >= SIGNIFICANT_SHARE * total as f64)
            .map(|c| (c.len(), pts[c[0]].clone()))
            .collect();
        significant.sort_by(|a, b| b.0.cmp(&a.0));
        levels.push(LbcLevel {
            eps,
            samples: total,
            components: significant.len(),
            witnesses: significant.into_iter().take(4).map(|(_, w)| w).collect(),
        });
    }

    let mut verdict = LbcVerdict::Inconclusive;
    let informative = levels.iter().filter(|l| l.samples > 0 && l.components > 0);
    if informative.clone().count() >= PERSISTENCE {
        verdict = LbcVerdict::ConsistentWithLbc;
        let mut run = 0usize;
        let mut prev: Option<&LbcLevel> = None;
        for level in &levels {
            if level.components >= 2 && stable_with(prev, level) {
                run += 1;
                if run >= PERSISTENCE {
                    verdict = LbcVerdict::FailsLbc;
                    break;
                }
            } else if level.components > 0 {
                run = 0;
            }
            if level.components > 0 {
                prev = Some(level);
            }
        }
    }
    LbcReport { verdict, levels }
}

/// Witness pairs are stable when the two leading representatives of the
/// finer level match the previous ones under the best 2x2 pairing.
fn stable_with(prev: Option<&LbcLevel>, cur: &LbcLevel) -> bool {
    let Some(prev) = prev else {
        return true;
    };
    if prev.components < 2 || prev.witnesses.len() < 2 || cur.witnesses.len() < 2 {
        return true;
    }
    let (a, b) = (&prev.witnesses[0], &prev.witnesses[1]);
    let (c, d) = (&cur.witnesses[0], &cur.witnesses[1]);
    let straight = dist(a, c) + dist(b, d);
    let crossed = dist(a, d) + dist(b, c);
    let bound = 2.0 * (prev.eps + cur.eps);
    straight.min(crossed) <= bound
}

/// Union-find components of the membership-verified neighbor graph.
fn components(
    cell: &Cell,
    pts: &[Vec<f64>],
    delta: f64,
    center: &[f64],
    eps: f64,
) -> Vec<Vec<usize>> {
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if dist2(&pts[i], &pts[j]) > delta * delta {
                continue;
            }
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri == rj {
                continue;
            }
            if edge_ok(cell, &pts[i], &pts[j], center, eps) {
                parent[ri] = rj;
            }
        }
    }
    let mut groups: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Structure-aware midpoints of the arc between two cell points must stay
/// in the cell and the ball.
fn edge_ok(cell: &Cell, a: &[f64], b: &[f64], center: &[f64], eps: f64) -> bool {
    const STEPS: usize = 4;
    for k in 1..=STEPS {
        let s = k as f64 / (STEPS + 1) as f64;
        let Some(m) = interpolate(cell, a, b, s) else {
            return false;
        };
        if dist2(&m, center) > eps * eps * 1.0201 {
            return false;
        }
        if cell.contains(&m) != Containment::In {
            return false;
        }
    }
    true
}

/// Interpolate inside the stack structure: linear everywhere except that
/// section points follow the graph over the interpolated base point.
fn interpolate(cell: &Cell, a: &[f64], b: &[f64], s: f64) -> Option<Vec<f64>> {
    match &cell.kind {
        CellKind::Section { base, bound } => {
            let (xa, _) = super::witness::split_last(a);
            let (xb, _) = super::witness::split_last(b);
            let mut m = interpolate_base(base, xa, xb, s)?;
            let v = bound.eval(&m)?;
            m.push(v);
            Some(m)
        }
        CellKind::Sector { base, .. } => {
            let (xa, ta) = super::witness::split_last(a);
            let (xb, tb) = super::witness::split_last(b);
            let mut m = interpolate_base(base, xa, xb, s)?;
            m.push(ta + s * (tb - ta));
            Some(m)
        }
        _ => Some(lerp(a, b, s)),
    }
}

fn interpolate_base(base: &Cell, a: &[f64], b: &[f64], s: f64) -> Option<Vec<f64>> {
    match &base.kind {
        CellKind::Section { .. } | CellKind::Sector { .. } => interpolate(base, a, b, s),
        _ => Some(lerp(a, b, s)),
    }
}

fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::test_support::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn slit_disk_fails_lbc_at_inner_slit_point() {
        let ds = slit_disk();
        let cfg = OracleConfig::default();
        let report =
            locally_boundary_connected_at(&ds, &[-0.5, 0.0], 320, &cfg, &mut rng(1));
        assert_eq!(report.verdict, LbcVerdict::FailsLbc, "{:?}", report.levels);
        // The two persistent components sit above and below the slit.
        let two = report.levels.iter().find(|l| l.components == 2).unwrap();
        let signs: Vec<f64> = two.witnesses.iter().map(|w| w[1].signum()).collect();
        assert_eq!(signs.len(), 2);
        assert!(signs[0] * signs[1] < 0.0);
    }

    #[test]
    fn open_disk_consistent_with_lbc() {
        // Unit disk about the origin, described as a single sector.
        let base = arc(crate::cell::Cell::interval1d(
            Some(crate::expr::ScalarExpr::constant(-1)),
            Some(crate::expr::ScalarExpr::constant(1)),
        ));
        let disk = crate::cell::Cell::sector(
            base,
            Some(crate::expr::parse("-sqrt(1-x1^2)", 1).unwrap()),
            Some(crate::expr::parse("sqrt(1-x1^2)", 1).unwrap()),
        )
        .unwrap();
        let cfg = OracleConfig::default();
        let report =
            locally_boundary_connected_at(&disk, &[1.0, 0.0], 320, &cfg, &mut rng(2));
        assert_eq!(
            report.verdict,
            LbcVerdict::ConsistentWithLbc,
            "{:?}",
            report.levels
        );
    }

    #[test]
    fn cornet_fails_lbc_at_slit_edge_image() {
        let c = cornet();
        let cfg = OracleConfig::default();
        let report =
            locally_boundary_connected_at(&c, &[0.0, 0.0, 0.5], 320, &cfg, &mut rng(3));
        assert_eq!(report.verdict, LbcVerdict::FailsLbc, "{:?}", report.levels);
    }
}
