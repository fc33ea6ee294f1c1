//! Cylindrical cell stacks, interval oracles and verification suites.

pub mod cad;
pub mod cell;
pub mod expr;
pub mod interval;
pub mod oracle;
pub mod real;
pub mod sample;

pub use cad::{Cad, CadSpec};
pub use cell::{Cell, CellError, CellIndex, CellKind, Containment};
pub use expr::{parse, parse_guard, Guard, ParseError, ScalarExpr, VectorMap};
pub use interval::{Interval, IntervalSet, Trivalent};
pub use real::Real;

/// Concrete scalar used by the oracles and the catalog.
pub type Scalar = f64;
/// `f64` interval, the default working type.
pub type Interval64 = Interval<f64>;
pub type IntervalSet64 = IntervalSet<f64>;
/// Reduced-precision variants, mainly exercised by tests.
pub type Interval32 = Interval<f32>;
pub type IntervalSet32 = IntervalSet<f32>;
