//! Cells of cylindrical decompositions.
//!
//! A cell is a point or interval of the line, or a section/sector stacked
//! over a lower-dimensional base cell. Indices follow the convention that
//! even entries are section/point layers and odd entries are
//! sector/interval layers.
//!
//! `Union` is an extension: finite disjoint unions of cells of the same
//! ambient space. The slit disk needs it — the oracles work over bases
//! that are not themselves cylindrical cells.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::expr::ScalarExpr;
use crate::interval::IntervalSet;

/// Index tuple of a cell within its decomposition, e.g. `(3,1,1,2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex(pub Vec<u32>);

impl CellIndex {
    pub fn new(entries: Vec<u32>) -> CellIndex {
        assert!(entries.iter().all(|&e| e >= 1), "index entries start at 1");
        CellIndex(entries)
    }

    pub fn child(&self, j: u32) -> CellIndex {
        let mut v = self.0.clone();
        v.push(j);
        CellIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of odd entries; equals the dimension of the cell.
    pub fn odd_count(&self) -> u32 {
        self.0.iter().filter(|&&e| e % 2 == 1).count() as u32
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C")?;
        for e in &self.0 {
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Three-valued membership verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    In,
    Out,
    Uncertain,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellKind {
    /// Single algebraic point of the line, as a closed-form constant.
    Point1D(ScalarExpr),
    /// Open interval of the line; `None` bounds are infinite.
    Interval1D {
        lo: Option<ScalarExpr>,
        hi: Option<ScalarExpr>,
    },
    /// Graph of `bound` over the base.
    Section {
        base: Arc<Cell>,
        bound: ScalarExpr,
    },
    /// Open band between `lo` and `hi` over the base.
    Sector {
        base: Arc<Cell>,
        lo: Option<ScalarExpr>,
        hi: Option<ScalarExpr>,
    },
    /// Finite disjoint union of cells of the same ambient space.
    Union(Vec<Arc<Cell>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub kind: CellKind,
    pub index: Option<CellIndex>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum CellError {
    #[error("bound arity {got} does not match base ambient dimension {want}")]
    BoundArity { got: u32, want: u32 },
    #[error("level-1 split points must be strictly increasing ({left} vs {right})")]
    SplitsNotIncreasing { left: f64, right: f64 },
    #[error("level-1 split point is not a defined constant")]
    SplitUndefined,
    #[error("stack bounds are not strictly increasing on the base at {point:?} ({left} vs {right})")]
    BoundsNotIncreasing {
        point: Vec<f64>,
        left: f64,
        right: f64,
    },
    #[error("1-dimensional cells have no base to project to")]
    NoBase,
    #[error("a union cell needs at least one member")]
    EmptyUnion,
    #[error("union members live in different ambient spaces")]
    MixedAmbient,
}

/// Position of a value `t` relative to a bound value `f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundCmp {
    /// `t < f(x)` certified by the enclosure.
    Below,
    /// `t > f(x)` certified by the enclosure.
    Above,
    /// `t == f(x)` under exact floating evaluation.
    Equal,
    /// `t != f(x)` certified (the enclosure has a gap at `t`), side unknown.
    NotEqual,
    Uncertain,
    /// The bound is undefined at `x`.
    Undefined,
}

/// Classify `t` against `bound(x)` using the enclosure first and exact
/// evaluation only to confirm equality on the graph.
pub fn cmp_vs_bound(bound: &ScalarExpr, prefix: &[f64], t: f64) -> BoundCmp {
    let enc: IntervalSet<f64> = bound.enclose_point(prefix);
    if enc.is_empty() {
        return BoundCmp::Undefined;
    }
    if t < enc.min() {
        return BoundCmp::Below;
    }
    if t > enc.max() {
        return BoundCmp::Above;
    }
    if let Some(v) = bound.eval(prefix) {
        if v == t {
            return BoundCmp::Equal;
        }
    }
    if !enc.contains(t) {
        return BoundCmp::NotEqual;
    }
    BoundCmp::Uncertain
}

impl Cell {
    fn plain(kind: CellKind) -> Cell {
        Cell {
            kind,
            index: None,
            label: None,
        }
    }

    pub fn point1d(value: ScalarExpr) -> Cell {
        assert_eq!(value.max_var(), 0, "level-1 points are closed forms");
        Cell::plain(CellKind::Point1D(value))
    }

    pub fn interval1d(lo: Option<ScalarExpr>, hi: Option<ScalarExpr>) -> Cell {
        for b in [&lo, &hi].into_iter().flatten() {
            assert_eq!(b.max_var(), 0, "level-1 bounds are closed forms");
        }
        Cell::plain(CellKind::Interval1D { lo, hi })
    }

    pub fn section(base: Arc<Cell>, bound: ScalarExpr) -> Result<Cell, CellError> {
        let want = base.ambient();
        if bound.max_var() > want {
            return Err(CellError::BoundArity {
                got: bound.max_var(),
                want,
            });
        }
        Ok(Cell::plain(CellKind::Section { base, bound }))
    }

    pub fn sector(
        base: Arc<Cell>,
        lo: Option<ScalarExpr>,
        hi: Option<ScalarExpr>,
    ) -> Result<Cell, CellError> {
        let want = base.ambient();
        for b in [&lo, &hi].into_iter().flatten() {
            if b.max_var() > want {
                return Err(CellError::BoundArity {
                    got: b.max_var(),
                    want,
                });
            }
        }
        Ok(Cell::plain(CellKind::Sector { base, lo, hi }))
    }

    pub fn union(members: Vec<Arc<Cell>>) -> Result<Cell, CellError> {
        let first = members.first().ok_or(CellError::EmptyUnion)?;
        let ambient = first.ambient();
        if members.iter().any(|m| m.ambient() != ambient) {
            return Err(CellError::MixedAmbient);
        }
        Ok(Cell::plain(CellKind::Union(members)))
    }

    pub fn with_index(mut self, index: CellIndex) -> Cell {
        self.index = Some(index);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Cell {
        self.label = Some(label.into());
        self
    }

    pub fn name(&self) -> String {
        if let Some(l) = &self.label {
            l.clone()
        } else if let Some(i) = &self.index {
            i.to_string()
        } else {
            "<cell>".to_string()
        }
    }

    /// Dimension of the ambient space the cell lives in.
    pub fn ambient(&self) -> u32 {
        match &self.kind {
            CellKind::Point1D(_) | CellKind::Interval1D { .. } => 1,
            CellKind::Section { base, .. } | CellKind::Sector { base, .. } => {
                base.ambient() + 1
            }
            CellKind::Union(members) => members[0].ambient(),
        }
    }

    /// Intrinsic dimension of the cell.
    pub fn dimension(&self) -> u32 {
        match &self.kind {
            CellKind::Point1D(_) => 0,
            CellKind::Interval1D { .. } => 1,
            CellKind::Section { base, .. } => base.dimension(),
            CellKind::Sector { base, .. } => base.dimension() + 1,
            CellKind::Union(members) => {
                members.iter().map(|m| m.dimension()).max().unwrap_or(0)
            }
        }
    }

    /// Base cell of a section or sector.
    pub fn project(&self) -> Result<Arc<Cell>, CellError> {
        match &self.kind {
            CellKind::Section { base, .. } | CellKind::Sector { base, .. } => {
                Ok(base.clone())
            }
            _ => Err(CellError::NoBase),
        }
    }

    /// Three-valued membership test.
    pub fn contains(&self, p: &[f64]) -> Containment {
        assert_eq!(
            p.len(),
            self.ambient() as usize,
            "point dimension does not match cell ambient space"
        );
        match &self.kind {
            CellKind::Point1D(v) => match cmp_vs_bound(v, &[], p[0]) {
                BoundCmp::Equal => Containment::In,
                BoundCmp::Below | BoundCmp::Above | BoundCmp::NotEqual => Containment::Out,
                BoundCmp::Undefined => Containment::Out,
                BoundCmp::Uncertain => Containment::Uncertain,
            },
            CellKind::Interval1D { lo, hi } => {
                combine_open(bound_side(lo, &[], p[0], true), bound_side(hi, &[], p[0], false))
            }
            CellKind::Section { base, bound } => {
                let (prefix, t) = split_last(p);
                let b = base.contains(prefix);
                if b == Containment::Out {
                    return Containment::Out;
                }
                match cmp_vs_bound(bound, prefix, t) {
                    BoundCmp::Equal => b,
                    BoundCmp::Below | BoundCmp::Above | BoundCmp::NotEqual => Containment::Out,
                    // Bound undefined at x: no graph point over x.
                    BoundCmp::Undefined => Containment::Out,
                    BoundCmp::Uncertain => Containment::Uncertain,
                }
            }
            CellKind::Sector { base, lo, hi } => {
                let (prefix, t) = split_last(p);
                let b = base.contains(prefix);
                if b == Containment::Out {
                    return Containment::Out;
                }
                let v = combine_open(
                    bound_side(lo, prefix, t, true),
                    bound_side(hi, prefix, t, false),
                );
                match (b, v) {
                    (_, Containment::Out) => Containment::Out,
                    (Containment::In, Containment::In) => Containment::In,
                    _ => Containment::Uncertain,
                }
            }
            CellKind::Union(members) => {
                let mut uncertain = false;
                for m in members {
                    match m.contains(p) {
                        Containment::In => return Containment::In,
                        Containment::Uncertain => uncertain = true,
                        Containment::Out => {}
                    }
                }
                if uncertain {
                    Containment::Uncertain
                } else {
                    Containment::Out
                }
            }
        }
    }

    /// Tolerant membership under plain floating evaluation: sections and
    /// points accept a `tol` discrepancy on the last coordinate. Used when
    /// classifying images of points under float-evaluated maps.
    pub fn contains_within(&self, p: &[f64], tol: f64) -> bool {
        match &self.kind {
            CellKind::Point1D(v) => match v.eval(&[]) {
                Some(x) => (p[0] - x).abs() <= tol,
                None => false,
            },
            CellKind::Interval1D { lo, hi } => {
                open_side_holds(lo, &[], p[0], true) && open_side_holds(hi, &[], p[0], false)
            }
            CellKind::Section { base, bound } => {
                let (prefix, t) = split_last(p);
                base.contains_within(prefix, tol)
                    && match bound.eval(prefix) {
                        Some(v) => (t - v).abs() <= tol,
                        None => false,
                    }
            }
            CellKind::Sector { base, lo, hi } => {
                let (prefix, t) = split_last(p);
                base.contains_within(prefix, tol)
                    && open_side_holds(lo, prefix, t, true)
                    && open_side_holds(hi, prefix, t, false)
            }
            CellKind::Union(members) => members.iter().any(|m| m.contains_within(p, tol)),
        }
    }
}

fn split_last(p: &[f64]) -> (&[f64], f64) {
    (&p[..p.len() - 1], p[p.len() - 1])
}

/// Strict float comparison against an optional bound (for `contains_within`).
fn open_side_holds(bound: &Option<ScalarExpr>, prefix: &[f64], t: f64, is_lower: bool) -> bool {
    match bound {
        None => true,
        Some(b) => match b.eval(prefix) {
            Some(v) => {
                if is_lower {
                    t > v
                } else {
                    t < v
                }
            }
            None => false,
        },
    }
}

/// Verdict for one open side of a sector/interval.
fn bound_side(
    bound: &Option<ScalarExpr>,
    prefix: &[f64],
    t: f64,
    is_lower: bool,
) -> Containment {
    let Some(b) = bound else {
        return Containment::In;
    };
    match cmp_vs_bound(b, prefix, t) {
        BoundCmp::Above => {
            if is_lower {
                Containment::In
            } else {
                Containment::Out
            }
        }
        BoundCmp::Below => {
            if is_lower {
                Containment::Out
            } else {
                Containment::In
            }
        }
        BoundCmp::Equal => Containment::Out,
        BoundCmp::NotEqual | BoundCmp::Uncertain | BoundCmp::Undefined => Containment::Uncertain,
    }
}

fn combine_open(a: Containment, b: Containment) -> Containment {
    match (a, b) {
        (Containment::Out, _) | (_, Containment::Out) => Containment::Out,
        (Containment::In, Containment::In) => Containment::In,
        _ => Containment::Uncertain,
    }
}

/// Split the line at strictly increasing points into `2u+1` alternating
/// interval/point cells with indices `1..=2u+1`.
pub fn build_level1(points: &[ScalarExpr]) -> Result<Vec<Cell>, CellError> {
    let values: Vec<f64> = points
        .iter()
        .map(|p| p.eval(&[]).ok_or(CellError::SplitUndefined))
        .collect::<Result<_, _>>()?;
    for w in values.windows(2) {
        if w[0] >= w[1] {
            return Err(CellError::SplitsNotIncreasing {
                left: w[0],
                right: w[1],
            });
        }
    }
    let u = points.len();
    let mut cells = Vec::with_capacity(2 * u + 1);
    for j in 0..=u {
        let lo = if j == 0 {
            None
        } else {
            Some(points[j - 1].clone())
        };
        let hi = if j == u { None } else { Some(points[j].clone()) };
        cells.push(
            Cell::interval1d(lo, hi).with_index(CellIndex::new(vec![2 * j as u32 + 1])),
        );
        if j < u {
            cells.push(
                Cell::point1d(points[j].clone())
                    .with_index(CellIndex::new(vec![2 * j as u32 + 2])),
            );
        }
    }
    Ok(cells)
}

/// Stack sections and sectors over a base cell. Bounds must be strictly
/// increasing on the base; this is checked on the provided sample points.
pub fn stack(
    base: &Arc<Cell>,
    bounds: &[ScalarExpr],
    order_samples: &[Vec<f64>],
) -> Result<Vec<Cell>, CellError> {
    let ambient = base.ambient();
    for b in bounds {
        if b.max_var() > ambient {
            return Err(CellError::BoundArity {
                got: b.max_var(),
                want: ambient,
            });
        }
    }
    for x in order_samples {
        for w in bounds.windows(2) {
            if let (Some(a), Some(b)) = (w[0].eval(x), w[1].eval(x)) {
                if a >= b {
                    return Err(CellError::BoundsNotIncreasing {
                        point: x.clone(),
                        left: a,
                        right: b,
                    });
                }
            }
        }
    }
    let u = bounds.len();
    let mut cells = Vec::with_capacity(2 * u + 1);
    for j in 0..=u {
        let lo = if j == 0 {
            None
        } else {
            Some(bounds[j - 1].clone())
        };
        let hi = if j == u { None } else { Some(bounds[j].clone()) };
        let mut cell = Cell::sector(base.clone(), lo, hi)?;
        if let Some(idx) = &base.index {
            cell = cell.with_index(idx.child(2 * j as u32 + 1));
        }
        cells.push(cell);
        if j < u {
            let mut section = Cell::section(base.clone(), bounds[j].clone())?;
            if let Some(idx) = &base.index {
                section = section.with_index(idx.child(2 * j as u32 + 2));
            }
            cells.push(section);
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn arc(c: Cell) -> Arc<Cell> {
        Arc::new(c)
    }

    /// The cornet cell (0,2) ⊙ (g⁻, g⁺) ⊙ {h}.
    pub(crate) fn cornet() -> Cell {
        let base1 = arc(
            Cell::interval1d(Some(ScalarExpr::constant(0)), Some(ScalarExpr::constant(2)))
                .with_index(CellIndex::new(vec![1])),
        );
        let g_minus = parse("-sqrt(1-(x1-1)^2)", 1).unwrap();
        let g_plus = parse("sqrt(1-(x1-1)^2)", 1).unwrap();
        let disk = arc(
            Cell::sector(base1, Some(g_minus), Some(g_plus))
                .unwrap()
                .with_label("disk"),
        );
        let h = parse("(x1^2+x2^2)/(2*x1)", 2).unwrap();
        Cell::section(disk, h).unwrap().with_label("cornet")
    }

    #[test]
    fn level1_split_at_zero() {
        let cells = build_level1(&[ScalarExpr::constant(0)]).unwrap();
        assert_eq!(cells.len(), 3);
        assert_eq!(cells[0].index, Some(CellIndex::new(vec![1])));
        assert_eq!(cells[1].index, Some(CellIndex::new(vec![2])));
        assert_eq!(cells[2].index, Some(CellIndex::new(vec![3])));
        assert_eq!(cells[0].contains(&[-1.0]), Containment::In);
        assert_eq!(cells[0].contains(&[1.0]), Containment::Out);
        assert_eq!(cells[1].contains(&[0.0]), Containment::In);
        assert_eq!(cells[2].contains(&[1.0]), Containment::In);
    }

    #[test]
    fn level1_empty_and_two_splits() {
        let cells = build_level1(&[]).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].contains(&[123.0]), Containment::In);

        let cells =
            build_level1(&[ScalarExpr::constant(0), ScalarExpr::constant(1)]).unwrap();
        assert_eq!(cells.len(), 5);
    }

    #[test]
    fn level1_rejects_unsorted() {
        let err =
            build_level1(&[ScalarExpr::constant(1), ScalarExpr::constant(0)]).unwrap_err();
        assert!(matches!(err, CellError::SplitsNotIncreasing { .. }));
    }

    #[test]
    fn stack_shapes_and_indices() {
        let base = arc(
            Cell::interval1d(Some(ScalarExpr::constant(0)), None)
                .with_index(CellIndex::new(vec![3])),
        );
        let f = parse("x1", 1).unwrap();
        let cells = stack(&base, &[f], &[vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(cells.len(), 3);
        assert_eq!(cells[0].index, Some(CellIndex::new(vec![3, 1])));
        assert_eq!(cells[1].index, Some(CellIndex::new(vec![3, 2])));
        assert_eq!(cells[2].index, Some(CellIndex::new(vec![3, 3])));
        // Sector below the diagonal, the graph, sector above.
        assert_eq!(cells[0].contains(&[2.0, 1.0]), Containment::In);
        assert_eq!(cells[1].contains(&[2.0, 2.0]), Containment::In);
        assert_eq!(cells[2].contains(&[2.0, 3.0]), Containment::In);
        assert_eq!(cells[0].contains(&[2.0, 3.0]), Containment::Out);
    }

    #[test]
    fn stack_empty_bounds_gives_full_sector() {
        let base = arc(Cell::interval1d(None, None).with_index(CellIndex::new(vec![1])));
        let cells = stack(&base, &[], &[]).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].contains(&[0.0, 1000.0]), Containment::In);
        assert_eq!(cells[0].project().unwrap().as_ref(), base.as_ref());
    }

    #[test]
    fn stack_rejects_misordered_bounds() {
        let base = arc(Cell::interval1d(None, None));
        let f = parse("x1", 1).unwrap();
        let g = parse("0", 1).unwrap();
        let err = stack(&base, &[f, g], &[vec![1.0]]).unwrap_err();
        assert!(matches!(err, CellError::BoundsNotIncreasing { .. }));
    }

    #[test]
    fn cornet_membership() {
        let c = cornet();
        assert_eq!(c.ambient(), 3);
        assert_eq!(c.dimension(), 2);
        assert_eq!(c.contains(&[1.0, 0.0, 0.5]), Containment::In);
        // x1 = 0 fails the base interval.
        assert_eq!(c.contains(&[0.0, 0.0, 0.0]), Containment::Out);
        // Off-graph point.
        assert_eq!(c.contains(&[1.0, 0.0, 0.75]), Containment::Out);
    }

    #[test]
    fn index_dimension_consistency() {
        let idx = CellIndex::new(vec![3, 1, 1, 2]);
        assert_eq!(idx.odd_count(), 3);
        assert_eq!(idx.to_string(), "C3112");
        assert_eq!(CellIndex::new(vec![2, 2, 2, 1]).odd_count(), 1);
        assert_eq!(CellIndex::new(vec![2, 2, 2, 2]).odd_count(), 0);
    }

    #[test]
    fn projection_errors_on_line_cells() {
        let c = Cell::interval1d(None, None);
        assert!(matches!(c.project(), Err(CellError::NoBase)));
    }
}
