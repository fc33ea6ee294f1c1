//! Interval arithmetic with outward rounding and interval unions.
//!
//! A single [`Interval`] is a closed extended-real interval `[lo, hi]`.
//! An [`IntervalSet`] is a finite union of disjoint intervals. The union
//! form matters: dividing through a pole or taking `sign` of a straddling
//! interval produces two rays or three points, and collapsing those to a
//! hull would destroy the gaps the emptiness certificates rely on.
//!
//! Every inexact operation widens its result by one ulp per endpoint, so
//! enclosures stay sound under round-to-nearest hardware arithmetic.

use crate::real::Real;

/// Closed interval `[lo, hi]`, endpoints may be infinite.
/// `lo > hi` encodes the empty interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

/// Three-valued truth for guard evaluation over boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trivalent {
    True,
    False,
    Unknown,
}

impl Trivalent {
    pub fn and(self, other: Trivalent) -> Trivalent {
        use Trivalent::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }

    pub fn or(self, other: Trivalent) -> Trivalent {
        use Trivalent::*;
        match (self, other) {
            (True, _) | (_, True) => True,
            (False, False) => False,
            _ => Unknown,
        }
    }

    pub fn not(self) -> Trivalent {
        use Trivalent::*;
        match self {
            True => False,
            False => True,
            Unknown => Unknown,
        }
    }
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(!lo.is_nan() && !hi.is_nan(), "NaN interval endpoint");
        Interval { lo, hi }
    }

    pub fn empty() -> Self {
        Interval {
            lo: T::infinity(),
            hi: T::neg_infinity(),
        }
    }

    pub fn whole() -> Self {
        Interval {
            lo: T::neg_infinity(),
            hi: T::infinity(),
        }
    }

    pub fn point(x: T) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> T {
        if self.is_empty() {
            T::zero()
        } else {
            self.hi - self.lo
        }
    }

    pub fn midpoint(&self) -> T {
        let two = T::from_f64(2.0).unwrap();
        if self.lo.is_infinite() && self.hi.is_infinite() {
            T::zero()
        } else if self.lo.is_infinite() {
            self.hi - T::one()
        } else if self.hi.is_infinite() {
            self.lo + T::one()
        } else {
            (self.lo + self.hi) / two
        }
    }

    pub fn contains(&self, x: T) -> bool {
        !self.is_empty() && self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, other: &Interval<T>) -> bool {
        !self.is_empty() && !other.is_empty() && self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval<T>) -> Interval<T> {
        if self.intersects(other) {
            Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
        } else {
            Interval::empty()
        }
    }

    pub fn hull(&self, other: &Interval<T>) -> Interval<T> {
        if self.is_empty() {
            *other
        } else if other.is_empty() {
            *self
        } else {
            Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
        }
    }

    /// One-ulp outward widening; infinite endpoints stay put.
    pub fn widened(&self) -> Interval<T> {
        if self.is_empty() {
            return *self;
        }
        let lo = if self.lo.is_finite() {
            self.lo.next_down()
        } else {
            self.lo
        };
        let hi = if self.hi.is_finite() {
            self.hi.next_up()
        } else {
            self.hi
        };
        Interval::new(lo, hi)
    }

    pub fn neg(&self) -> Interval<T> {
        if self.is_empty() {
            return *self;
        }
        Interval::new(-self.hi, -self.lo)
    }

    pub fn add(&self, other: &Interval<T>) -> Interval<T> {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        widen_pair(
            add_ep(self.lo, other.lo),
            add_ep(self.hi, other.hi),
        )
    }

    pub fn sub(&self, other: &Interval<T>) -> Interval<T> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Interval<T>) -> Interval<T> {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        let cands = [
            mul_ep(self.lo, other.lo),
            mul_ep(self.lo, other.hi),
            mul_ep(self.hi, other.lo),
            mul_ep(self.hi, other.hi),
        ];
        let mut lo = cands[0];
        let mut hi = cands[0];
        for &c in &cands[1..] {
            if c.0 < lo.0 || (c.0 == lo.0 && c.1 && !lo.1) {
                lo = c;
            }
            if c.0 > hi.0 || (c.0 == hi.0 && c.1 && !hi.1) {
                hi = c;
            }
        }
        widen_pair(lo, hi)
    }

    pub fn abs_i(&self) -> Interval<T> {
        if self.is_empty() {
            return *self;
        }
        if self.lo >= T::zero() {
            *self
        } else if self.hi <= T::zero() {
            self.neg()
        } else {
            Interval::new(T::zero(), self.hi.max(-self.lo))
        }
    }

    pub fn min_i(&self, other: &Interval<T>) -> Interval<T> {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    pub fn max_i(&self, other: &Interval<T>) -> Interval<T> {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    /// Square root over the defined part of the interval; empty when the
    /// whole interval is negative.
    pub fn sqrt_i(&self) -> Interval<T> {
        if self.is_empty() || self.hi < T::zero() {
            return Interval::empty();
        }
        let lo = sqrt_ep(self.lo.max(T::zero()));
        let hi = if self.hi.is_infinite() {
            (self.hi, true)
        } else {
            sqrt_ep(self.hi)
        };
        widen_pair(lo, hi).intersect(&Interval::new(T::zero(), T::infinity()))
    }

    pub fn root4_i(&self) -> Interval<T> {
        self.sqrt_i().sqrt_i()
    }

    /// `self` raised to a non-negative integer power.
    pub fn powi_nonneg(&self, k: u32) -> Interval<T> {
        if self.is_empty() {
            return *self;
        }
        if k == 0 {
            return Interval::point(T::one());
        }
        if k == 1 {
            return *self;
        }
        if k == 2 {
            // Endpoint squares of |self| keep multiplication exactness and
            // never dip below zero.
            let a = self.abs_i();
            return widen_pair(mul_ep(a.lo, a.lo), mul_ep(a.hi, a.hi))
                .intersect(&Interval::new(T::zero(), T::infinity()));
        }
        let ki = k as i32;
        if k % 2 == 1 {
            return widen_pair(
                (powi_ep(self.lo, ki), false),
                (powi_ep(self.hi, ki), false),
            );
        }
        let a = self.abs_i();
        widen_pair((powi_ep(a.lo, ki), false), (powi_ep(a.hi, ki), false))
            .intersect(&Interval::new(T::zero(), T::infinity()))
    }

    /// Exact range of `sign` over the interval, as up to three point pieces.
    pub fn sign_set(&self) -> IntervalSet<T> {
        let mut pieces = Vec::new();
        if self.is_empty() {
            return IntervalSet::empty();
        }
        if self.lo < T::zero() {
            pieces.push(Interval::point(-T::one()));
        }
        if self.contains(T::zero()) {
            pieces.push(Interval::point(T::zero()));
        }
        if self.hi > T::zero() {
            pieces.push(Interval::point(T::one()));
        }
        IntervalSet::from_pieces(pieces)
    }

    /// Extended division. Splitting the divisor at zero keeps the two rays
    /// of a pole separate instead of collapsing them to the whole line.
    pub fn div_set(&self, other: &Interval<T>) -> IntervalSet<T> {
        if self.is_empty() || other.is_empty() {
            return IntervalSet::empty();
        }
        let mut pieces = Vec::new();
        // Positive part of the divisor: (a, b] with a >= 0; a == 0 means the
        // divisor reaches down to 0 from above.
        if other.hi > T::zero() {
            let a = other.lo.max(T::zero());
            let b = other.hi;
            pieces.push(div_by_positive(self, a, b));
        }
        if other.lo < T::zero() {
            // X / Y⁻ = (−X) / (−Y⁻) with −Y⁻ positive.
            let a = (-other.hi).max(T::zero());
            let b = -other.lo;
            pieces.push(div_by_positive(&self.neg(), a, b));
        }
        IntervalSet::from_pieces(pieces)
    }
}

/// Divide `x` by the positive interval `(a, b]`; `a == 0` is the open pole end.
fn div_by_positive<T: Real>(x: &Interval<T>, a: T, b: T) -> Interval<T> {
    let lo = if x.lo < T::zero() {
        if a == T::zero() {
            (T::neg_infinity(), true)
        } else {
            div_ep(x.lo, a)
        }
    } else {
        div_ep(x.lo, b)
    };
    let hi = if x.hi > T::zero() {
        if a == T::zero() {
            (T::infinity(), true)
        } else {
            div_ep(x.hi, a)
        }
    } else {
        div_ep(x.hi, b)
    };
    widen_pair(lo, hi)
}

/// Widen the endpoints of `(value, exact)` pairs outward where the float
/// operation actually rounded. Exact endpoints stay put, which keeps the
/// dyadic geometry of the catalog tight (and in particular keeps zeros
/// signed: a sum of squares never dips below zero).
fn widen_pair<T: Real>(lo: (T, bool), hi: (T, bool)) -> Interval<T> {
    let l = if lo.1 || !lo.0.is_finite() {
        lo.0
    } else {
        lo.0.next_down()
    };
    let h = if hi.1 || !hi.0.is_finite() {
        hi.0
    } else {
        hi.0.next_up()
    };
    Interval::new(l, h)
}

/// Endpoint sum with an exactness flag (TwoSum residual test).
fn add_ep<T: Real>(a: T, b: T) -> (T, bool) {
    let s = a + b;
    if s.is_nan() {
        // Opposite infinities only meet when intervals are malformed
        // upstream; fall back to the dominant operand.
        return (if a.is_infinite() { a } else { b }, true);
    }
    if s.is_infinite() {
        return (s, a.is_infinite() || b.is_infinite());
    }
    let exact = s - a == b && s - b == a;
    (s, exact)
}

/// Endpoint product with the 0 * inf = 0 convention and an fma-based
/// exactness flag.
fn mul_ep<T: Real>(a: T, b: T) -> (T, bool) {
    if a == T::zero() || b == T::zero() {
        return (T::zero(), true);
    }
    let m = a * b;
    if m.is_infinite() {
        return (m, a.is_infinite() || b.is_infinite());
    }
    let exact = a.mul_add(b, -m) == T::zero();
    (m, exact)
}

fn div_ep<T: Real>(a: T, b: T) -> (T, bool) {
    if a == T::zero() {
        return (T::zero(), true);
    }
    if a.is_infinite() && b.is_infinite() {
        // Magnitude-capped quotient; callers only hit this through widening.
        let q = if (a > T::zero()) == (b > T::zero()) {
            T::infinity()
        } else {
            T::neg_infinity()
        };
        return (q, true);
    }
    let q = a / b;
    if !q.is_finite() {
        return (q, a.is_infinite());
    }
    let exact = q.mul_add(b, -a) == T::zero();
    (q, exact)
}

fn sqrt_ep<T: Real>(a: T) -> (T, bool) {
    let r = a.sqrt();
    if !r.is_finite() {
        return (r, true);
    }
    let exact = r.mul_add(r, -a) == T::zero();
    (r, exact)
}

fn powi_ep<T: Real>(a: T, k: i32) -> T {
    if a.is_infinite() {
        if a > T::zero() || k % 2 == 0 {
            return T::infinity();
        }
        return T::neg_infinity();
    }
    a.powi(k)
}

/// Finite union of disjoint intervals, kept sorted by lower endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet<T> {
    pieces: Vec<Interval<T>>,
}

/// Above this many pieces the closest pair gets hulled together.
const MAX_PIECES: usize = 12;

impl<T: Real> IntervalSet<T> {
    pub fn empty() -> Self {
        IntervalSet { pieces: Vec::new() }
    }

    pub fn whole() -> Self {
        IntervalSet {
            pieces: vec![Interval::whole()],
        }
    }

    pub fn point(x: T) -> Self {
        IntervalSet {
            pieces: vec![Interval::point(x)],
        }
    }

    pub fn single(iv: Interval<T>) -> Self {
        Self::from_pieces(vec![iv])
    }

    pub fn from_pieces(pieces: Vec<Interval<T>>) -> Self {
        let mut pieces: Vec<Interval<T>> =
            pieces.into_iter().filter(|p| !p.is_empty()).collect();
        pieces.sort_by(|a, b| a.lo().partial_cmp(&b.lo()).unwrap());
        let mut merged: Vec<Interval<T>> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if p.lo() <= last.hi() => {
                    *last = Interval::new(last.lo(), last.hi().max(p.hi()));
                }
                _ => merged.push(p),
            }
        }
        // Cap the piece count by hulling the narrowest gap.
        while merged.len() > MAX_PIECES {
            let mut best = 0;
            let mut best_gap = T::infinity();
            for i in 0..merged.len() - 1 {
                let gap = merged[i + 1].lo() - merged[i].hi();
                if gap < best_gap {
                    best_gap = gap;
                    best = i;
                }
            }
            let hulled = merged[best].hull(&merged[best + 1]);
            merged[best] = hulled;
            merged.remove(best + 1);
        }
        IntervalSet { pieces: merged }
    }

    pub fn pieces(&self) -> &[Interval<T>] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Smallest single interval containing the set.
    pub fn hull(&self) -> Interval<T> {
        match (self.pieces.first(), self.pieces.last()) {
            (Some(a), Some(b)) => Interval::new(a.lo(), b.hi()),
            _ => Interval::empty(),
        }
    }

    pub fn contains(&self, x: T) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn intersects_interval(&self, iv: &Interval<T>) -> bool {
        self.pieces.iter().any(|p| p.intersects(iv))
    }

    pub fn min(&self) -> T {
        self.hull().lo()
    }

    pub fn max(&self) -> T {
        self.hull().hi()
    }

    pub fn union(&self, other: &IntervalSet<T>) -> IntervalSet<T> {
        let mut pieces = self.pieces.clone();
        pieces.extend_from_slice(&other.pieces);
        Self::from_pieces(pieces)
    }

    pub fn map_unary(&self, f: impl Fn(&Interval<T>) -> Interval<T>) -> IntervalSet<T> {
        Self::from_pieces(self.pieces.iter().map(f).collect())
    }

    pub fn map_binary(
        &self,
        other: &IntervalSet<T>,
        f: impl Fn(&Interval<T>, &Interval<T>) -> Interval<T>,
    ) -> IntervalSet<T> {
        let mut pieces = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for a in &self.pieces {
            for b in &other.pieces {
                pieces.push(f(a, b));
            }
        }
        Self::from_pieces(pieces)
    }

    pub fn neg(&self) -> IntervalSet<T> {
        self.map_unary(Interval::neg)
    }

    pub fn add(&self, other: &IntervalSet<T>) -> IntervalSet<T> {
        self.map_binary(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &IntervalSet<T>) -> IntervalSet<T> {
        self.map_binary(other, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &IntervalSet<T>) -> IntervalSet<T> {
        self.map_binary(other, |a, b| a.mul(b))
    }

    pub fn div(&self, other: &IntervalSet<T>) -> IntervalSet<T> {
        let mut out = IntervalSet::empty();
        for a in &self.pieces {
            for b in &other.pieces {
                out = out.union(&a.div_set(b));
            }
        }
        out
    }

    pub fn abs_s(&self) -> IntervalSet<T> {
        self.map_unary(Interval::abs_i)
    }

    pub fn min_s(&self, other: &IntervalSet<T>) -> IntervalSet<T> {
        self.map_binary(other, |a, b| a.min_i(b))
    }

    pub fn max_s(&self, other: &IntervalSet<T>) -> IntervalSet<T> {
        self.map_binary(other, |a, b| a.max_i(b))
    }

    pub fn sqrt_s(&self) -> IntervalSet<T> {
        self.map_unary(Interval::sqrt_i)
    }

    pub fn root4_s(&self) -> IntervalSet<T> {
        self.map_unary(Interval::root4_i)
    }

    pub fn powi(&self, k: i32) -> IntervalSet<T> {
        if k >= 0 {
            self.map_unary(|p| p.powi_nonneg(k as u32))
        } else {
            let pos = self.map_unary(|p| p.powi_nonneg((-k) as u32));
            IntervalSet::point(T::one()).div(&pos)
        }
    }

    pub fn sign_s(&self) -> IntervalSet<T> {
        let mut out = IntervalSet::empty();
        for p in &self.pieces {
            out = out.union(&p.sign_set());
        }
        out
    }

    /// Certain `a < b` comparison over all value pairs.
    pub fn lt(&self, other: &IntervalSet<T>) -> Trivalent {
        if self.is_empty() || other.is_empty() {
            return Trivalent::Unknown;
        }
        if self.max() < other.min() {
            Trivalent::True
        } else if self.min() >= other.max() {
            Trivalent::False
        } else {
            Trivalent::Unknown
        }
    }

    pub fn le(&self, other: &IntervalSet<T>) -> Trivalent {
        if self.is_empty() || other.is_empty() {
            return Trivalent::Unknown;
        }
        if self.max() <= other.min() {
            Trivalent::True
        } else if self.min() > other.max() {
            Trivalent::False
        } else {
            Trivalent::Unknown
        }
    }

    pub fn eq_tri(&self, other: &IntervalSet<T>) -> Trivalent {
        if self.is_empty() || other.is_empty() {
            return Trivalent::Unknown;
        }
        let a = self.hull();
        let b = other.hull();
        if a.is_point() && b.is_point() && a.lo() == b.lo() {
            return Trivalent::True;
        }
        if self.pieces.iter().any(|p| other.intersects_interval(p)) {
            Trivalent::Unknown
        } else {
            Trivalent::False
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type I = Interval<f64>;
    type S = IntervalSet<f64>;

    #[test]
    fn add_mul_enclose() {
        let a = I::new(1.0, 3.0);
        let b = I::new(-2.0, 2.0);
        let s = a.add(&b);
        assert!(s.lo() <= -1.0 && s.hi() >= 5.0);
        let p = a.mul(&b);
        assert!(p.lo() <= -6.0 && p.hi() >= 6.0);
    }

    #[test]
    fn square_straddling_zero() {
        let x = I::new(-1.0, 2.0);
        let sq = x.powi_nonneg(2);
        assert!(sq.lo() <= 0.0 && sq.lo() >= -1e-12);
        assert!(sq.hi() >= 4.0 && sq.hi() <= 4.0 + 1e-12);
    }

    #[test]
    fn sqrt_clamps_domain() {
        let x = I::new(-2.0, 4.0);
        let r = x.sqrt_i();
        assert!(r.lo() <= 0.0 + 1e-15 && r.lo() >= 0.0);
        assert!(r.hi() >= 2.0);
        assert!(I::new(-3.0, -1.0).sqrt_i().is_empty());
    }

    #[test]
    fn division_keeps_pole_gap() {
        let x = S::point(1.0);
        let y = S::single(I::new(-2.0, 2.0));
        let q = x.div(&y);
        assert_eq!(q.pieces().len(), 2);
        assert!(!q.contains(0.0));
        assert!(q.contains(10.0) && q.contains(-10.0));
        assert!(q.min() == f64::NEG_INFINITY && q.max() == f64::INFINITY);
    }

    #[test]
    fn division_by_zero_point_is_empty() {
        let x = S::point(1.0);
        let y = S::point(0.0);
        assert!(x.div(&y).is_empty());
    }

    #[test]
    fn division_one_sided_pole() {
        // [1,2] / [0, 0.5] = [2, +inf)
        let x = S::single(I::new(1.0, 2.0));
        let y = S::single(I::new(0.0, 0.5));
        let q = x.div(&y);
        assert_eq!(q.pieces().len(), 1);
        assert!(q.min() <= 2.0 && q.min() >= 2.0 - 1e-9);
        assert!(q.max() == f64::INFINITY);
    }

    #[test]
    fn sign_is_three_points() {
        let s = I::new(-1.0, 2.0).sign_set();
        assert_eq!(s.pieces().len(), 3);
        assert!(s.contains(-1.0) && s.contains(0.0) && s.contains(1.0));
        assert!(!s.contains(0.5));
    }

    #[test]
    fn comparisons() {
        let a = S::single(I::new(0.0, 1.0));
        let b = S::single(I::new(2.0, 3.0));
        assert_eq!(a.lt(&b), Trivalent::True);
        assert_eq!(b.lt(&a), Trivalent::False);
        assert_eq!(a.lt(&a), Trivalent::Unknown);
        assert_eq!(a.eq_tri(&b), Trivalent::False);
        assert_eq!(S::point(1.0).eq_tri(&S::point(1.0)), Trivalent::True);
    }

    #[test]
    fn piece_cap_hulls_narrowest_gap() {
        let pieces: Vec<I> = (0..20)
            .map(|i| I::new(i as f64 * 10.0, i as f64 * 10.0 + 1.0))
            .collect();
        let s = S::from_pieces(pieces);
        assert!(s.pieces().len() <= MAX_PIECES);
        assert!(s.contains(0.5) && s.contains(190.5));
    }
}
