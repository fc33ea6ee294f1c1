//! Numerical and interval oracles: closure membership, boundary sampling,
//! fibers, local boundary connectedness, and the checkers built on them.
//!
//! Closure membership is semi-decidable by design. A `yes` needs a witness
//! inside the cell at every radius of a shrinking schedule; a `no` needs an
//! interval certificate that a whole ball misses the cell. Anything else is
//! reported as `unknown`, never guessed.

pub mod boundary;
pub mod certify;
pub mod checks;
pub mod fiber;
pub mod lbc;
#[cfg(test)]
pub(crate) mod test_support;
pub mod witness;

use rand_chacha::ChaCha8Rng;

use crate::cell::{Cell, Containment};

/// Tolerances and budgets shared by the oracles. Defaults assume the
/// unit-scale catalog geometry.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Witness schedule runs eps = 2^-1 .. 2^-eps_min_pow.
    pub eps_min_pow: u32,
    /// Random base candidates per witness level.
    pub witness_tries: usize,
    /// Starting separation radius for emptiness certificates.
    pub rho_init: f64,
    /// Geometric shrink factor of the certificate schedule.
    pub rho_factor: f64,
    /// Smallest separation radius attempted.
    pub rho_min: f64,
    /// Box budget per certificate attempt.
    pub certify_max_boxes: usize,
    /// Fiber endpoint refinement tolerance.
    pub tau_fib: f64,
    /// Homeomorphism identity tolerance.
    pub tau_homeo: f64,
    /// Equality tolerance when a guard acts as a membership predicate.
    pub tau_pred: f64,
    /// Neighbor-graph radius = factor * expected sample spacing.
    pub comp_radius_factor: f64,
    /// Divergence threshold for the unbounded-below test.
    pub divergence_m: f64,
    /// Fiber scan range and step (step must be a power of two so the grid
    /// hits dyadic values exactly).
    pub scan_lo: f64,
    pub scan_hi: f64,
    pub scan_step: f64,
    /// Bounding half-width for sampling unbounded directions.
    pub half_width: f64,
    /// Cap on the inconclusive fraction before a check degrades to
    /// `inconclusive`.
    pub inconclusive_cap: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            eps_min_pow: 20,
            witness_tries: 48,
            rho_init: 0.5,
            rho_factor: 0.75,
            rho_min: 1e-7,
            certify_max_boxes: 4096,
            tau_fib: 1e-6,
            tau_homeo: 1e-9,
            tau_pred: 1e-9,
            comp_radius_factor: 3.0,
            divergence_m: 1e6,
            scan_lo: -8.0,
            scan_hi: 8.0,
            scan_step: 1.0 / 16.0,
            half_width: 8.0,
            inconclusive_cap: 0.02,
        }
    }
}

impl OracleConfig {
    pub fn sample_cfg(&self) -> crate::sample::SampleCfg {
        crate::sample::SampleCfg {
            half_width: self.half_width,
            max_tries: 64,
        }
    }

    pub fn eps_schedule(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.eps_min_pow).map(|k| 0.5f64.powi(k as i32))
    }
}

/// How hard `closure_contains` should work on a `no` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifyMode {
    /// Witness failure is reported as `unknown` without certification;
    /// cheap scanning mode.
    Never,
    /// Certify at the first radius that works.
    Fast,
    /// Additionally grow the certified radius by bisection; used where the
    /// reported separation radius matters.
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureKind {
    Yes,
    No,
    Unknown,
}

/// Separation evidence for a `no`: a ball of this radius around the query
/// point was covered by interval-certified empty boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    pub radius: f64,
    pub boxes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureVerdict {
    pub kind: ClosureKind,
    /// `(eps, witness)` per schedule level for a `yes`.
    pub witness_chain: Vec<(f64, Vec<f64>)>,
    pub separation: Option<Separation>,
}

impl ClosureVerdict {
    pub fn is_yes(&self) -> bool {
        self.kind == ClosureKind::Yes
    }

    pub fn is_no(&self) -> bool {
        self.kind == ClosureKind::No
    }

    pub fn is_unknown(&self) -> bool {
        self.kind == ClosureKind::Unknown
    }

    fn unknown() -> ClosureVerdict {
        ClosureVerdict {
            kind: ClosureKind::Unknown,
            witness_chain: Vec::new(),
            separation: None,
        }
    }
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Closure membership of `p` in the closure of `cell`.
pub fn closure_contains(
    cell: &Cell,
    p: &[f64],
    cfg: &OracleConfig,
    mode: CertifyMode,
    rng: &mut ChaCha8Rng,
) -> ClosureVerdict {
    assert_eq!(p.len(), cell.ambient() as usize, "point/cell arity mismatch");

    // Membership implies closure membership.
    if cell.contains(p) == Containment::In {
        let chain = cfg.eps_schedule().map(|e| (e, p.to_vec())).collect();
        return ClosureVerdict {
            kind: ClosureKind::Yes,
            witness_chain: chain,
            separation: None,
        };
    }

    let mut chain: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut warm: Option<Vec<f64>> = None;
    for eps in cfg.eps_schedule() {
        let found = witness::find_witness(cell, p, eps, warm.as_deref(), rng, cfg)
            .or_else(|| {
                // One harder retry before giving up on this level.
                witness::find_witness_with_tries(
                    cell,
                    p,
                    eps,
                    warm.as_deref(),
                    rng,
                    cfg,
                    cfg.witness_tries * 4,
                )
            });
        match found {
            Some(w) => {
                chain.push((eps, w.clone()));
                warm = Some(w);
            }
            None => {
                if mode == CertifyMode::Never {
                    return ClosureVerdict::unknown();
                }
                return certify_no(cell, p, eps, cfg, mode);
            }
        }
    }
    ClosureVerdict {
        kind: ClosureKind::Yes,
        witness_chain: chain,
        separation: None,
    }
}

/// Try to certify `B(p, rho) ∩ cell = ∅` over a shrinking radius schedule;
/// in `Maximize` mode then grow the radius by bisection.
fn certify_no(
    cell: &Cell,
    p: &[f64],
    failed_eps: f64,
    cfg: &OracleConfig,
    mode: CertifyMode,
) -> ClosureVerdict {
    // Witnesses existed at the previous level (if any), so the distance to
    // the cell is at most twice the failed radius; larger certificates
    // cannot succeed.
    let mut rho = cfg.rho_init.min(failed_eps);
    let mut certified: Option<Separation> = None;
    while rho >= cfg.rho_min {
        if let Some(boxes) = certify::ball_empty(cell, p, rho, cfg) {
            certified = Some(Separation { radius: rho, boxes });
            break;
        }
        rho *= cfg.rho_factor;
    }
    let Some(mut sep) = certified else {
        return ClosureVerdict::unknown();
    };

    if mode == CertifyMode::Maximize {
        // Grow toward the true separation radius: bisection between the
        // certified radius and the level that still had witnesses.
        let mut lo = sep.radius;
        let mut hi = 2.0 * failed_eps.max(sep.radius);
        for _ in 0..6 {
            let mid = 0.5 * (lo + hi);
            if let Some(boxes) = certify::ball_empty(cell, p, mid, cfg) {
                sep = Separation { radius: mid, boxes };
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    ClosureVerdict {
        kind: ClosureKind::No,
        witness_chain: Vec::new(),
        separation: Some(sep),
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn membership_implies_closure() {
        let c = w_section("0");
        let cfg = OracleConfig::default();
        let v = closure_contains(&c, &[1.0, 0.0, 0.0, 0.0], &cfg, CertifyMode::Fast, &mut rng(0));
        assert!(v.is_yes());
        assert_eq!(v.witness_chain.len(), cfg.eps_min_pow as usize);
    }

    #[test]
    fn w_section_halfline_is_in_closure() {
        let c = w_section("0");
        let cfg = OracleConfig::default();
        // Endpoint of the half-line (t = r = 0).
        let v = closure_contains(&c, &[0.0, 0.0, 0.0, 0.0], &cfg, CertifyMode::Fast, &mut rng(1));
        assert!(v.is_yes(), "expected yes at the endpoint, got {:?}", v.kind);
        // Deep point of the half-line (t = -3).
        let v = closure_contains(&c, &[0.0, 0.0, 0.0, -3.0], &cfg, CertifyMode::Fast, &mut rng(2));
        assert!(v.is_yes(), "expected yes deep on the half-line, got {:?}", v.kind);
        for (eps, w) in &v.witness_chain {
            assert!(dist(w, &[0.0, 0.0, 0.0, -3.0]) <= *eps + 1e-12);
            assert_eq!(c.contains(w), crate::cell::Containment::In);
        }
    }

    #[test]
    fn w_section_above_r_is_not_in_closure() {
        let c = w_section("0");
        let cfg = OracleConfig::default();
        let v = closure_contains(&c, &[0.0, 0.0, 0.0, 1.0], &cfg, CertifyMode::Fast, &mut rng(3));
        assert!(v.is_no(), "expected no above the half-line, got {:?}", v.kind);
        assert!(v.separation.unwrap().radius > 0.0);
    }

    #[test]
    fn w_section_shifted() {
        let c = w_section("1/2");
        let cfg = OracleConfig::default();
        let v = closure_contains(&c, &[0.0, 0.0, 0.0, 0.5], &cfg, CertifyMode::Fast, &mut rng(4));
        assert!(v.is_yes(), "endpoint at shifted r");
        let v = closure_contains(&c, &[0.0, 0.0, 0.0, 0.75], &cfg, CertifyMode::Fast, &mut rng(5));
        assert!(v.is_no(), "above shifted r");
    }

    #[test]
    fn trousers_probe_separation() {
        // Brute-force oracle: min distance from the probe to the graph is
        // 1/(4 sqrt(2)) ~ 0.17678, attained on the y1-branch at x = -3/8.
        let ds = arc(slit_disk());
        let graph = crate::cell::Cell::section(ds, trousers_f()).unwrap();
        let probe = [-0.5, 0.0, -0.25];
        let mut brute = f64::INFINITY;
        let n = 400;
        for i in 0..n {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
            for j in 0..n {
                let y = -1.0 + 2.0 * (j as f64 + 0.5) / n as f64;
                if x * x + y * y >= 1.0 || (y == 0.0 && x <= 0.0) {
                    continue;
                }
                if let Some(t) = trousers_f().eval(&[x, y]) {
                    brute = brute.min(dist(&[x, y, t], &probe));
                }
            }
        }
        assert!((brute - 0.1767766).abs() < 2e-3, "brute oracle {brute}");

        let cfg = OracleConfig::default();
        let v = closure_contains(&graph, &probe, &cfg, CertifyMode::Maximize, &mut rng(6));
        assert!(v.is_no(), "probe must be outside the closure");
        let sep = v.separation.unwrap();
        assert!(sep.radius >= 0.15, "radius {} too small", sep.radius);
        assert!(sep.radius <= brute + 1e-3, "radius {} exceeds brute {brute}", sep.radius);
    }

    #[test]
    fn trousers_fiber_points_are_in_closure() {
        let ds = arc(slit_disk());
        let graph = crate::cell::Cell::section(ds, trousers_f()).unwrap();
        let cfg = OracleConfig::default();
        for probe in [[-0.5, 0.0, -0.5], [-0.5, 0.0, 0.0]] {
            let v = closure_contains(&graph, &probe, &cfg, CertifyMode::Fast, &mut rng(7));
            assert!(v.is_yes(), "doubleton point {probe:?} must be in the closure");
        }
        let v = closure_contains(&graph, &[-0.5, 0.0, -0.25], &cfg, CertifyMode::Fast, &mut rng(8));
        assert!(v.is_no());
    }

    #[test]
    fn cornet_closure_at_tip_height() {
        // psi(-1/2, 0) = (0, 0, 1/2) lies in the closure of the cornet.
        let c = cornet();
        let cfg = OracleConfig::default();
        let v = closure_contains(&c, &[0.0, 0.0, 0.5], &cfg, CertifyMode::Fast, &mut rng(9));
        assert!(v.is_yes(), "cornet closure misses the slit-edge image");
        // Above an interior base point the bound enclosure is finite and a
        // separation certificate exists.
        let v = closure_contains(&c, &[1.0, 0.0, 5.0], &cfg, CertifyMode::Fast, &mut rng(10));
        assert!(v.is_no(), "far above the cornet interior");
        // Above the tip the bound enclosure blows up in both directions and
        // no box certificate exists; the verdict must degrade to unknown,
        // never to a false yes.
        let v = closure_contains(&c, &[0.0, 0.0, 5.0], &cfg, CertifyMode::Fast, &mut rng(11));
        assert!(!v.is_yes(), "no witnesses exist five units above the tip");
    }
}
