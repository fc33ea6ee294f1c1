//! Leveled decompositions built by repeated stacking.

use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cell::{build_level1, stack, Cell, CellError, CellIndex, Containment};
use crate::expr::ScalarExpr;
use crate::sample::{sample_many, SampleCfg};

/// A cylindrical decomposition of `ℝ^dimension`: level `k` partitions `ℝ^k`
/// and every level-(k+1) cell stacks over a level-k cell.
#[derive(Debug, Clone)]
pub struct Cad {
    pub dimension: u32,
    levels: Vec<Vec<Arc<Cell>>>,
}

/// Construction data: level-1 split points plus stacking bounds per base
/// cell index. Bases without an entry get the single full sector.
#[derive(Debug, Clone, Default)]
pub struct CadSpec {
    pub dimension: u32,
    pub level1: Vec<ScalarExpr>,
    pub stacks: Vec<(CellIndex, Vec<ScalarExpr>)>,
}

impl Cad {
    pub fn build(spec: &CadSpec) -> Result<Cad, CellError> {
        let stacks: HashMap<&CellIndex, &Vec<ScalarExpr>> =
            spec.stacks.iter().map(|(i, b)| (i, b)).collect();
        // The ordering precondition is sampled with a fixed generator so
        // construction stays deterministic.
        let mut rng = ChaCha8Rng::seed_from_u64(0xCAD);
        let sample_cfg = SampleCfg::default();

        let mut levels: Vec<Vec<Arc<Cell>>> = Vec::with_capacity(spec.dimension as usize);
        levels.push(build_level1(&spec.level1)?.into_iter().map(Arc::new).collect());
        for _k in 2..=spec.dimension {
            let mut next = Vec::new();
            for base in levels.last().unwrap() {
                let empty = Vec::new();
                let bounds = base
                    .index
                    .as_ref()
                    .and_then(|i| stacks.get(i).copied())
                    .unwrap_or(&empty);
                let order_samples = if bounds.len() > 1 {
                    sample_many(base, 32, &mut rng, &sample_cfg)
                } else {
                    Vec::new()
                };
                next.extend(
                    stack(base, bounds, &order_samples)?
                        .into_iter()
                        .map(Arc::new),
                );
            }
            levels.push(next);
        }
        Ok(Cad {
            dimension: spec.dimension,
            levels,
        })
    }

    /// Cells of level `k` (1-based).
    pub fn level(&self, k: u32) -> &[Arc<Cell>] {
        &self.levels[(k - 1) as usize]
    }

    /// Cells of the top level.
    pub fn top(&self) -> &[Arc<Cell>] {
        self.levels.last().unwrap()
    }

    /// Look a cell up by its index name (`C3112`) at any level.
    pub fn by_name(&self, name: &str) -> Option<&Arc<Cell>> {
        self.levels.iter().flatten().find(|c| {
            c.index
                .as_ref()
                .map(|i| i.to_string() == name)
                .unwrap_or(false)
        })
    }

    pub fn all_cells(&self) -> impl Iterator<Item = &Arc<Cell>> {
        self.levels.iter().flatten()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartitionStats {
    pub samples: usize,
    pub exactly_one: usize,
    pub none: usize,
    pub multiple: usize,
    pub uncertain: usize,
}

impl Cad {
    /// Sampled partition check: random points of the bounding box should be
    /// claimed by exactly one cell of the level; `uncertain` verdicts are
    /// tolerated as a small fraction near section graphs.
    pub fn partition_stats(
        &self,
        level: u32,
        samples: usize,
        seed: u64,
        half_width: f64,
    ) -> PartitionStats {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = self.level(level);
        let mut stats = PartitionStats {
            samples,
            ..Default::default()
        };
        for _ in 0..samples {
            let p: Vec<f64> = (0..level)
                .map(|_| rng.gen_range(-half_width..half_width))
                .collect();
            let mut ins = 0;
            let mut unc = 0;
            for c in cells {
                match c.contains(&p) {
                    Containment::In => ins += 1,
                    Containment::Uncertain => unc += 1,
                    Containment::Out => {}
                }
            }
            if unc > 0 {
                stats.uncertain += 1;
            } else if ins == 1 {
                stats.exactly_one += 1;
            } else if ins == 0 {
                stats.none += 1;
            } else {
                stats.multiple += 1;
            }
        }
        stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    /// Three levels split only at x1 = 0: the seven-cell decomposition of ℝ³.
    pub(crate) fn c3_spec() -> CadSpec {
        CadSpec {
            dimension: 3,
            level1: vec![ScalarExpr::constant(0)],
            stacks: vec![
                (CellIndex::new(vec![2]), vec![parse("0", 1).unwrap()]),
                (CellIndex::new(vec![2, 2]), vec![parse("0", 2).unwrap()]),
            ],
        }
    }

    #[test]
    fn c3_has_seven_cells() {
        let cad = Cad::build(&c3_spec()).unwrap();
        assert_eq!(cad.level(1).len(), 3);
        assert_eq!(cad.level(2).len(), 5);
        assert_eq!(cad.level(3).len(), 7);
        let names: Vec<String> = cad.top().iter().map(|c| c.name()).collect();
        assert_eq!(
            names,
            vec!["C111", "C211", "C221", "C222", "C223", "C231", "C311"]
        );
    }

    #[test]
    fn c3_membership_examples() {
        let cad = Cad::build(&c3_spec()).unwrap();
        let c221 = cad.by_name("C221").unwrap();
        assert_eq!(c221.contains(&[0.0, 0.0, -1.0]), Containment::In);
        let c222 = cad.by_name("C222").unwrap();
        assert_eq!(c222.contains(&[0.0, 0.0, 0.0]), Containment::In);
        assert_eq!(c222.contains(&[0.0, 0.0, 0.5]), Containment::Out);
    }

    #[test]
    fn c3_dimensions() {
        let cad = Cad::build(&c3_spec()).unwrap();
        let dims: Vec<u32> = cad.top().iter().map(|c| c.dimension()).collect();
        assert_eq!(dims, vec![3, 2, 1, 0, 1, 2, 3]);
        for c in cad.top() {
            assert_eq!(c.dimension(), c.index.as_ref().unwrap().odd_count());
        }
    }

    #[test]
    fn c3_partition() {
        let cad = Cad::build(&c3_spec()).unwrap();
        let stats = cad.partition_stats(3, 20_000, 0, 8.0);
        assert_eq!(stats.none, 0);
        assert_eq!(stats.multiple, 0);
        assert!(stats.uncertain as f64 / stats.samples as f64 <= 0.01);
    }
}
