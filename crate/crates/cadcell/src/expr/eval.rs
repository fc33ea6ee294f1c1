//! Point evaluation and interval enclosure of expressions.
//!
//! Point evaluation is strict about partiality: a square root of a negative
//! number or a division by zero makes the value undefined (`None`). Interval
//! enclosure is the sound counterpart: the returned set contains every
//! defined value over the box, and an empty set means the expression is
//! defined nowhere on it.


use super::{CmpOp, Guard, ScalarExpr};
use crate::interval::{Interval, IntervalSet, Trivalent};
use crate::real::Real;

impl ScalarExpr {
    /// Evaluate at a point, `f64` flavour used throughout the oracles.
    pub fn eval(&self, p: &[f64]) -> Option<f64> {
        self.eval_in::<f64>(p)
    }

    pub fn eval_in<T: Real>(&self, p: &[T]) -> Option<T> {
        let v = match self {
            ScalarExpr::Var(i) => *p.get((*i - 1) as usize)?,
            ScalarExpr::Const(r) => T::from_rational(*r),
            ScalarExpr::Neg(a) => -a.eval_in(p)?,
            ScalarExpr::Add(a, b) => a.eval_in(p)? + b.eval_in(p)?,
            ScalarExpr::Sub(a, b) => a.eval_in(p)? - b.eval_in(p)?,
            ScalarExpr::Mul(a, b) => a.eval_in(p)? * b.eval_in(p)?,
            ScalarExpr::Div(a, b) => {
                let den = b.eval_in(p)?;
                if den == T::zero() {
                    return None;
                }
                a.eval_in(p)? / den
            }
            ScalarExpr::Pow(a, k) => {
                let base = a.eval_in(p)?;
                if *k < 0 && base == T::zero() {
                    return None;
                }
                base.powi(*k)
            }
            ScalarExpr::Sqrt(a) => {
                let v = a.eval_in(p)?;
                if v < T::zero() {
                    return None;
                }
                v.sqrt()
            }
            ScalarExpr::Root4(a) => {
                let v = a.eval_in(p)?;
                if v < T::zero() {
                    return None;
                }
                v.sqrt().sqrt()
            }
            ScalarExpr::Abs(a) => a.eval_in(p)?.abs(),
            ScalarExpr::Sign(a) => {
                let v = a.eval_in(p)?;
                if v > T::zero() {
                    T::one()
                } else if v < T::zero() {
                    -T::one()
                } else {
                    T::zero()
                }
            }
            ScalarExpr::Min(a, b) => a.eval_in(p)?.min(b.eval_in(p)?),
            ScalarExpr::Max(a, b) => a.eval_in(p)?.max(b.eval_in(p)?),
            ScalarExpr::Piecewise(pw) => {
                for (g, e) in &pw.branches {
                    match g.eval_in(p)? {
                        true => return e.eval_in(p),
                        false => continue,
                    }
                }
                return pw.default.eval_in(p);
            }
        };
        if v.is_nan() {
            None
        } else {
            Some(v)
        }
    }

    /// Sound enclosure of the defined values over a box of interval sets.
    pub fn enclose<T: Real>(&self, boxes: &[IntervalSet<T>]) -> IntervalSet<T> {
        match self {
            ScalarExpr::Var(i) => boxes
                .get((*i - 1) as usize)
                .cloned()
                .unwrap_or_else(IntervalSet::empty),
            ScalarExpr::Const(r) => {
                let v = T::from_rational(*r);
                if T::rational_is_exact(*r) {
                    IntervalSet::point(v)
                } else {
                    IntervalSet::single(Interval::point(v).widened())
                }
            }
            ScalarExpr::Neg(a) => a.enclose(boxes).neg(),
            ScalarExpr::Add(a, b) => a.enclose(boxes).add(&b.enclose(boxes)),
            ScalarExpr::Sub(a, b) => a.enclose(boxes).sub(&b.enclose(boxes)),
            ScalarExpr::Mul(a, b) => a.enclose(boxes).mul(&b.enclose(boxes)),
            ScalarExpr::Div(a, b) => a.enclose(boxes).div(&b.enclose(boxes)),
            ScalarExpr::Pow(a, k) => a.enclose(boxes).powi(*k),
            ScalarExpr::Sqrt(a) => a.enclose(boxes).sqrt_s(),
            ScalarExpr::Root4(a) => a.enclose(boxes).root4_s(),
            ScalarExpr::Abs(a) => a.enclose(boxes).abs_s(),
            ScalarExpr::Sign(a) => a.enclose(boxes).sign_s(),
            ScalarExpr::Min(a, b) => a.enclose(boxes).min_s(&b.enclose(boxes)),
            ScalarExpr::Max(a, b) => a.enclose(boxes).max_s(&b.enclose(boxes)),
            ScalarExpr::Piecewise(pw) => {
                let mut out = IntervalSet::empty();
                for (g, e) in &pw.branches {
                    match g.enclose(boxes) {
                        Trivalent::False => continue,
                        Trivalent::True => {
                            // Branch certainly taken wherever defined; later
                            // branches are unreachable.
                            return out.union(&e.enclose(boxes));
                        }
                        Trivalent::Unknown => {
                            out = out.union(&e.enclose(boxes));
                        }
                    }
                }
                out.union(&pw.default.enclose(boxes))
            }
        }
    }

    /// Enclosure over a plain interval box.
    pub fn enclose_box<T: Real>(&self, boxes: &[Interval<T>]) -> IntervalSet<T> {
        let sets: Vec<IntervalSet<T>> =
            boxes.iter().map(|iv| IntervalSet::single(*iv)).collect();
        self.enclose(&sets)
    }

    /// Enclosure at a degenerate point box.
    pub fn enclose_point<T: Real>(&self, p: &[T]) -> IntervalSet<T> {
        let sets: Vec<IntervalSet<T>> = p.iter().map(|&x| IntervalSet::point(x)).collect();
        self.enclose(&sets)
    }
}

impl Guard {
    /// Kleene three-valued point evaluation: an undefined operand only
    /// poisons the result when the other side cannot decide it.
    pub fn eval_in<T: Real>(&self, p: &[T]) -> Option<bool> {
        match self {
            Guard::Cmp(op, a, b) => {
                let va = a.eval_in(p)?;
                let vb = b.eval_in(p)?;
                Some(match op {
                    CmpOp::Lt => va < vb,
                    CmpOp::Le => va <= vb,
                    CmpOp::Eq => va == vb,
                    CmpOp::Ge => va >= vb,
                    CmpOp::Gt => va > vb,
                })
            }
            Guard::And(x, y) => match (x.eval_in(p), y.eval_in(p)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Guard::Or(x, y) => match (x.eval_in(p), y.eval_in(p)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
            Guard::Not(x) => x.eval_in(p).map(|b| !b),
        }
    }

    pub fn eval(&self, p: &[f64]) -> Option<bool> {
        self.eval_in::<f64>(p)
    }

    /// Point evaluation with a tolerance on equality comparisons; used when
    /// a guard acts as an analytic membership predicate for float points.
    pub fn eval_tol(&self, p: &[f64], tol: f64) -> Option<bool> {
        match self {
            Guard::Cmp(CmpOp::Eq, a, b) => {
                let va = a.eval(p)?;
                let vb = b.eval(p)?;
                Some((va - vb).abs() <= tol)
            }
            Guard::Cmp(..) => self.eval(p),
            Guard::And(x, y) => match (x.eval_tol(p, tol), y.eval_tol(p, tol)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Guard::Or(x, y) => match (x.eval_tol(p, tol), y.eval_tol(p, tol)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
            Guard::Not(x) => x.eval_tol(p, tol).map(|b| !b),
        }
    }

    /// Three-valued truth over a box.
    pub fn enclose<T: Real>(&self, boxes: &[IntervalSet<T>]) -> Trivalent {
        match self {
            Guard::Cmp(op, a, b) => {
                let ia = a.enclose(boxes);
                let ib = b.enclose(boxes);
                if ia.is_empty() || ib.is_empty() {
                    return Trivalent::Unknown;
                }
                match op {
                    CmpOp::Lt => ia.lt(&ib),
                    CmpOp::Le => ia.le(&ib),
                    CmpOp::Eq => ia.eq_tri(&ib),
                    CmpOp::Ge => ib.le(&ia),
                    CmpOp::Gt => ib.lt(&ia),
                }
            }
            Guard::And(x, y) => x.enclose(boxes).and(y.enclose(boxes)),
            Guard::Or(x, y) => x.enclose(boxes).or(y.enclose(boxes)),
            Guard::Not(x) => x.enclose(boxes).not(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn set(lo: f64, hi: f64) -> IntervalSet<f64> {
        IntervalSet::single(Interval::new(lo, hi))
    }

    #[test]
    fn cornet_h_at_unit_point() {
        let h = parse("(x1^2+x2^2)/(2*x1)", 2).unwrap();
        assert_eq!(h.eval(&[1.0, 0.0]), Some(0.5));
    }

    #[test]
    fn g_at_ones() {
        let g = parse("-(x2^2+x3^2)/x1", 3).unwrap();
        assert_eq!(g.eval(&[1.0, 1.0, 1.0]), Some(-2.0));
    }

    #[test]
    fn lazard_h_at_e1() {
        let h = parse(
            "-((1+(x2/x1)^2) + sqrt((1+(x2/x1)^2)^2 + 4*(1+(x3/x1)^2)))/2",
            3,
        )
        .unwrap();
        let v = h.eval(&[1.0, 0.0, 0.0]).unwrap();
        let expected = -(1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((v - expected).abs() < 1e-12, "{v} vs {expected}");
        assert!((v + 1.6180339887).abs() < 1e-9);
    }

    #[test]
    fn undefined_cases() {
        let inv = parse("1/x1", 1).unwrap();
        assert_eq!(inv.eval(&[0.0]), None);
        let root = parse("sqrt(x1)", 1).unwrap();
        assert_eq!(root.eval(&[-1.0]), None);
        assert_eq!(root.eval(&[4.0]), Some(2.0));
    }

    #[test]
    fn trousers_branches() {
        let f = parse("piecewise{ x1<0 && x2<0 : x1 ; _ : 0 }", 2).unwrap();
        assert_eq!(f.eval(&[-0.5, -0.25]), Some(-0.5));
        assert_eq!(f.eval(&[0.5, -0.25]), Some(0.0));
        assert_eq!(f.eval(&[-0.5, 0.25]), Some(0.0));
    }

    #[test]
    fn square_enclosure() {
        let sq = parse("x1^2", 1).unwrap();
        let e = sq.enclose(&[set(-1.0, 2.0)]);
        assert!(e.min() <= 0.0 && e.max() >= 4.0);
    }

    #[test]
    fn point_box_is_tight() {
        let g = parse("-(x2^2+x3^2)/x1", 3).unwrap();
        let e = g.enclose(&[
            IntervalSet::point(1.0),
            IntervalSet::point(0.0),
            IntervalSet::point(0.0),
        ]);
        assert!(e.contains(0.0));
        assert!(e.max() - e.min() < 1e-12);
    }

    #[test]
    fn ring_branch_envelope() {
        // sign(x2)*sqrt(1/4-(x1+1/2)^2) over x1 = -1/2, x2 in [-eps, eps]
        // must enclose [-1/2, 1/2]; brute-force envelope of the same
        // expression confirms those are the extreme values.
        let e = parse("sign(x2)*sqrt(1/4-(x1+1/2)^2)", 2).unwrap();
        let eps = 1e-3;
        let mut brute_min = f64::INFINITY;
        let mut brute_max = f64::NEG_INFINITY;
        for k in 0..=1000 {
            let x2 = -eps + 2.0 * eps * (k as f64) / 1000.0;
            if let Some(v) = e.eval(&[-0.5, x2]) {
                brute_min = brute_min.min(v);
                brute_max = brute_max.max(v);
            }
        }
        assert!((brute_min + 0.5).abs() < 1e-12);
        assert!((brute_max - 0.5).abs() < 1e-12);
        let enc = e.enclose(&[set(-0.5, -0.5), set(-eps, eps)]);
        assert!(enc.min() <= -0.5 && enc.max() >= 0.5);
    }

    #[test]
    fn piecewise_enclosure_keeps_branch_gap() {
        // Trousers over a box straddling the guard: values are the x1 range
        // and the isolated 0; the gap in between must not be filled in.
        let f = parse("piecewise{ x1<0 && x2<0 : x1 ; _ : 0 }", 2).unwrap();
        let e = f.enclose(&[set(-0.65, -0.35), set(-0.1, 0.1)]);
        assert!(e.contains(-0.5));
        assert!(e.contains(0.0));
        assert!(!e.contains(-0.2));
    }

    #[test]
    fn guard_three_valued() {
        let g = crate::expr::parse_guard("x1<0", 1).unwrap();
        assert_eq!(g.enclose(&[set(-2.0, -1.0)]), Trivalent::True);
        assert_eq!(g.enclose(&[set(1.0, 2.0)]), Trivalent::False);
        assert_eq!(g.enclose(&[set(-1.0, 1.0)]), Trivalent::Unknown);
    }

    #[test]
    fn division_through_pole_encloses() {
        let g = parse("-(x2^2+x3^2)/x1", 3).unwrap();
        let e = g.enclose(&[set(0.0, 0.5), set(1.0, 1.0), set(0.0, 0.0)]);
        // Numerator is -1, denominator (0, 1/2]: values (-inf, -2].
        assert!(e.min() == f64::NEG_INFINITY);
        assert!(e.max() <= -2.0 + 1e-9);
    }
}
