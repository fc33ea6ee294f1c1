//! Shared constructors for oracle tests: the slit disk, the cornet cell,
//! and the half-space section family. The catalog builds the same objects
//! from their JSON definitions; tests construct them directly.

use std::sync::Arc;

use crate::cell::{Cell, CellIndex};
use crate::expr::{parse, ScalarExpr};

pub fn arc(c: Cell) -> Arc<Cell> {
    Arc::new(c)
}

/// Open unit disk minus the radius `(-1, 0] x {0}`, as a five-cell union.
pub fn slit_disk() -> Cell {
    let chord = |arity_src: &str| parse(arity_src, 1).unwrap();
    let left = arc(Cell::interval1d(
        Some(ScalarExpr::constant(-1)),
        Some(ScalarExpr::constant(0)),
    ));
    let origin_col = arc(Cell::point1d(ScalarExpr::constant(0)));
    let right = arc(Cell::interval1d(
        Some(ScalarExpr::constant(0)),
        Some(ScalarExpr::constant(1)),
    ));
    let members = vec![
        arc(Cell::sector(left.clone(), Some(chord("-sqrt(1-x1^2)")), Some(chord("0"))).unwrap()),
        arc(Cell::sector(left, Some(chord("0")), Some(chord("sqrt(1-x1^2)"))).unwrap()),
        arc(Cell::sector(
            origin_col.clone(),
            Some(ScalarExpr::constant(-1)),
            Some(ScalarExpr::constant(0)),
        )
        .unwrap()),
        arc(Cell::sector(
            origin_col,
            Some(ScalarExpr::constant(0)),
            Some(ScalarExpr::constant(1)),
        )
        .unwrap()),
        arc(Cell::sector(right, Some(chord("-sqrt(1-x1^2)")), Some(chord("sqrt(1-x1^2)"))).unwrap()),
    ];
    Cell::union(members).unwrap().with_label("slit-disk")
}

/// The disk-shaped base sector `(0,2) ⊙ (g⁻, g⁺)` of the cornet.
pub fn cornet_base() -> Arc<Cell> {
    let base1 = arc(Cell::interval1d(
        Some(ScalarExpr::constant(0)),
        Some(ScalarExpr::constant(2)),
    ));
    arc(
        Cell::sector(
            base1,
            Some(parse("-sqrt(1-(x1-1)^2)", 1).unwrap()),
            Some(parse("sqrt(1-(x1-1)^2)", 1).unwrap()),
        )
        .unwrap()
        .with_label("cornet-base"),
    )
}

/// The cornet cell `(0,2) ⊙ (g⁻, g⁺) ⊙ {h}`.
pub fn cornet() -> Cell {
    Cell::section(cornet_base(), parse("(x1^2+x2^2)/(2*x1)", 2).unwrap())
        .unwrap()
        .with_label("cornet")
}

/// Trousers bound on the slit disk.
pub fn trousers_f() -> ScalarExpr {
    parse("piecewise{ x1<0 && x2<0 : x1 ; _ : 0 }", 2).unwrap()
}

/// `C311 = (0, ∞) × ℝ²` with its index.
pub fn c311() -> Arc<Cell> {
    let l1 = arc(
        Cell::interval1d(Some(ScalarExpr::constant(0)), None)
            .with_index(CellIndex::new(vec![3])),
    );
    let l2 = arc(
        Cell::sector(l1, None, None)
            .unwrap()
            .with_index(CellIndex::new(vec![3, 1])),
    );
    arc(
        Cell::sector(l2, None, None)
            .unwrap()
            .with_index(CellIndex::new(vec![3, 1, 1])),
    )
}

/// The section `C311 ⊙ {g + s}` of the half-space family.
pub fn w_section(s: &str) -> Cell {
    let f = parse(&format!("-(x2^2+x3^2)/x1 + {s}"), 3).unwrap();
    Cell::section(c311(), f)
        .unwrap()
        .with_index(CellIndex::new(vec![3, 1, 1, 2]))
}
