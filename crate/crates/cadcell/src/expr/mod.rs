//! Piecewise semi-algebraic scalar expressions.
//!
//! These are the closed forms used as cell bounds and homeomorphism
//! components: rational constants, arithmetic, integer powers, `sqrt`,
//! `root4`, `abs`, `sign`, `min`/`max`, and a guarded piecewise node.
//! Constants are exact rationals; irrational values are written as
//! expressions (`-(1+sqrt(5))/2`), never decimal literals, so interval
//! evaluation stays sound.

mod eval;
mod parse;

pub use parse::{parse, parse_guard, ParseError};

use std::fmt;

use num_rational::Rational64;

/// Comparison operator inside a guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// Boolean combination of comparisons, used in piecewise guards and as
/// point-set predicates.
#[derive(Debug, Clone, PartialEq)]
pub enum Guard {
    Cmp(CmpOp, Box<ScalarExpr>, Box<ScalarExpr>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
    Not(Box<Guard>),
}

/// One piecewise alternative list with a mandatory default branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    pub branches: Vec<(Guard, ScalarExpr)>,
    pub default: Box<ScalarExpr>,
}

/// Expression tree over variables `x1..xn` (1-based indices).
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Var(u32),
    Const(Rational64),
    Neg(Box<ScalarExpr>),
    Add(Box<ScalarExpr>, Box<ScalarExpr>),
    Sub(Box<ScalarExpr>, Box<ScalarExpr>),
    Mul(Box<ScalarExpr>, Box<ScalarExpr>),
    Div(Box<ScalarExpr>, Box<ScalarExpr>),
    Pow(Box<ScalarExpr>, i32),
    Sqrt(Box<ScalarExpr>),
    Root4(Box<ScalarExpr>),
    Abs(Box<ScalarExpr>),
    Sign(Box<ScalarExpr>),
    Min(Box<ScalarExpr>, Box<ScalarExpr>),
    Max(Box<ScalarExpr>, Box<ScalarExpr>),
    Piecewise(Piecewise),
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ExprError {
    #[error("expression references x{index} but only {arity} variables are available")]
    ArityMismatch { index: u32, arity: u32 },
}

impl ScalarExpr {
    pub fn constant(n: i64) -> ScalarExpr {
        ScalarExpr::Const(Rational64::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> ScalarExpr {
        ScalarExpr::Const(Rational64::new(num, den))
    }

    pub fn var(index: u32) -> ScalarExpr {
        assert!(index >= 1, "variable indices are 1-based");
        ScalarExpr::Var(index)
    }

    /// Largest variable index mentioned anywhere in the tree (0 if closed).
    pub fn max_var(&self) -> u32 {
        match self {
            ScalarExpr::Var(i) => *i,
            ScalarExpr::Const(_) => 0,
            ScalarExpr::Neg(a)
            | ScalarExpr::Sqrt(a)
            | ScalarExpr::Root4(a)
            | ScalarExpr::Abs(a)
            | ScalarExpr::Sign(a) => a.max_var(),
            ScalarExpr::Pow(a, _) => a.max_var(),
            ScalarExpr::Add(a, b)
            | ScalarExpr::Sub(a, b)
            | ScalarExpr::Mul(a, b)
            | ScalarExpr::Div(a, b)
            | ScalarExpr::Min(a, b)
            | ScalarExpr::Max(a, b) => a.max_var().max(b.max_var()),
            ScalarExpr::Piecewise(pw) => {
                let mut m = pw.default.max_var();
                for (g, e) in &pw.branches {
                    m = m.max(g.max_var()).max(e.max_var());
                }
                m
            }
        }
    }

    pub fn check_arity(&self, arity: u32) -> Result<(), ExprError> {
        let m = self.max_var();
        if m > arity {
            Err(ExprError::ArityMismatch { index: m, arity })
        } else {
            Ok(())
        }
    }

    /// Replace `x_i` by `args[i-1]` everywhere; this is how bounds are
    /// pulled back along maps (`f ∘ φ` is `f.substitute(φ_components)`).
    pub fn substitute(&self, args: &[ScalarExpr]) -> ScalarExpr {
        match self {
            ScalarExpr::Var(i) => args
                .get((*i - 1) as usize)
                .cloned()
                .unwrap_or_else(|| panic!("substitute: no argument for x{i}")),
            ScalarExpr::Const(r) => ScalarExpr::Const(*r),
            ScalarExpr::Neg(a) => ScalarExpr::Neg(Box::new(a.substitute(args))),
            ScalarExpr::Add(a, b) => ScalarExpr::Add(
                Box::new(a.substitute(args)),
                Box::new(b.substitute(args)),
            ),
            ScalarExpr::Sub(a, b) => ScalarExpr::Sub(
                Box::new(a.substitute(args)),
                Box::new(b.substitute(args)),
            ),
            ScalarExpr::Mul(a, b) => ScalarExpr::Mul(
                Box::new(a.substitute(args)),
                Box::new(b.substitute(args)),
            ),
            ScalarExpr::Div(a, b) => ScalarExpr::Div(
                Box::new(a.substitute(args)),
                Box::new(b.substitute(args)),
            ),
            ScalarExpr::Pow(a, k) => ScalarExpr::Pow(Box::new(a.substitute(args)), *k),
            ScalarExpr::Sqrt(a) => ScalarExpr::Sqrt(Box::new(a.substitute(args))),
            ScalarExpr::Root4(a) => ScalarExpr::Root4(Box::new(a.substitute(args))),
            ScalarExpr::Abs(a) => ScalarExpr::Abs(Box::new(a.substitute(args))),
            ScalarExpr::Sign(a) => ScalarExpr::Sign(Box::new(a.substitute(args))),
            ScalarExpr::Min(a, b) => ScalarExpr::Min(
                Box::new(a.substitute(args)),
                Box::new(b.substitute(args)),
            ),
            ScalarExpr::Max(a, b) => ScalarExpr::Max(
                Box::new(a.substitute(args)),
                Box::new(b.substitute(args)),
            ),
            ScalarExpr::Piecewise(pw) => ScalarExpr::Piecewise(Piecewise {
                branches: pw
                    .branches
                    .iter()
                    .map(|(g, e)| (g.substitute(args), e.substitute(args)))
                    .collect(),
                default: Box::new(pw.default.substitute(args)),
            }),
        }
    }

    /// Printing precedence; used to decide parenthesization.
    fn prec(&self) -> u8 {
        match self {
            ScalarExpr::Add(..) | ScalarExpr::Sub(..) | ScalarExpr::Neg(..) => 1,
            ScalarExpr::Mul(..) | ScalarExpr::Div(..) => 2,
            ScalarExpr::Pow(..) => 3,
            ScalarExpr::Const(r) => {
                if *r.numer() < 0 {
                    1
                } else if !r.is_integer() {
                    2
                } else {
                    4
                }
            }
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        let prec = self.prec();
        let parens = prec < parent;
        if parens {
            write!(f, "(")?;
        }
        match self {
            ScalarExpr::Var(i) => write!(f, "x{i}")?,
            ScalarExpr::Const(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())?;
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())?;
                }
            }
            ScalarExpr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 2)?;
            }
            ScalarExpr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "+")?;
                b.fmt_prec(f, 2)?;
            }
            ScalarExpr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "-")?;
                b.fmt_prec(f, 2)?;
            }
            ScalarExpr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            ScalarExpr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
            ScalarExpr::Pow(a, k) => {
                a.fmt_prec(f, 4)?;
                write!(f, "^{k}")?;
            }
            ScalarExpr::Sqrt(a) => write!(f, "sqrt({a})")?,
            ScalarExpr::Root4(a) => write!(f, "root4({a})")?,
            ScalarExpr::Abs(a) => write!(f, "abs({a})")?,
            ScalarExpr::Sign(a) => write!(f, "sign({a})")?,
            ScalarExpr::Min(a, b) => write!(f, "min({a},{b})")?,
            ScalarExpr::Max(a, b) => write!(f, "max({a},{b})")?,
            ScalarExpr::Piecewise(pw) => {
                write!(f, "piecewise{{ ")?;
                for (g, e) in &pw.branches {
                    write!(f, "{g} : {e} ; ")?;
                }
                write!(f, "_ : {} }}", pw.default)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Guard {
    pub fn max_var(&self) -> u32 {
        match self {
            Guard::Cmp(_, a, b) => a.max_var().max(b.max_var()),
            Guard::And(a, b) | Guard::Or(a, b) => a.max_var().max(b.max_var()),
            Guard::Not(a) => a.max_var(),
        }
    }

    pub fn substitute(&self, args: &[ScalarExpr]) -> Guard {
        match self {
            Guard::Cmp(op, a, b) => Guard::Cmp(
                *op,
                Box::new(a.substitute(args)),
                Box::new(b.substitute(args)),
            ),
            Guard::And(a, b) => {
                Guard::And(Box::new(a.substitute(args)), Box::new(b.substitute(args)))
            }
            Guard::Or(a, b) => {
                Guard::Or(Box::new(a.substitute(args)), Box::new(b.substitute(args)))
            }
            Guard::Not(a) => Guard::Not(Box::new(a.substitute(args))),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Guard::Or(..) => 1,
            Guard::And(..) => 2,
            Guard::Not(..) | Guard::Cmp(..) => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        let prec = self.prec();
        let parens = prec < parent;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Guard::Cmp(op, a, b) => write!(f, "{a}{}{b}", op.symbol())?,
            Guard::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " && ")?;
                b.fmt_prec(f, 3)?;
            }
            Guard::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " || ")?;
                b.fmt_prec(f, 2)?;
            }
            Guard::Not(a) => {
                write!(f, "!(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A map `ℝ^arity -> ℝ^m` given componentwise; homeomorphisms and the
/// retraction are shipped this way.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorMap {
    pub arity: u32,
    pub components: Vec<ScalarExpr>,
}

impl VectorMap {
    pub fn new(arity: u32, components: Vec<ScalarExpr>) -> VectorMap {
        for c in &components {
            assert!(c.max_var() <= arity, "component exceeds declared arity");
        }
        VectorMap { arity, components }
    }

    pub fn parse(arity: u32, sources: &[&str]) -> Result<VectorMap, ParseError> {
        let components = sources
            .iter()
            .map(|s| parse(s, arity))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorMap::new(arity, components))
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, p: &[f64]) -> Option<Vec<f64>> {
        self.components.iter().map(|c| c.eval(p)).collect()
    }

    /// Composition `self ∘ inner` by substitution.
    pub fn compose(&self, inner: &VectorMap) -> VectorMap {
        assert_eq!(self.arity as usize, inner.components.len());
        VectorMap {
            arity: inner.arity,
            components: self
                .components
                .iter()
                .map(|c| c.substitute(&inner.components))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trip_g() {
        let g = parse("-(x2^2+x3^2)/x1", 3).unwrap();
        let printed = g.to_string();
        assert_eq!(printed, "-(x2^2+x3^2)/x1");
        assert_eq!(parse(&printed, 3).unwrap(), g);
    }

    #[test]
    fn substitution_composes() {
        // f(y1, y2) = y1 + y2 pulled back along (x1 - x3, x2).
        let f = parse("x1+x2", 2).unwrap();
        let phi1 = parse("x1-x3", 3).unwrap();
        let phi2 = parse("x2", 3).unwrap();
        let composed = f.substitute(&[phi1, phi2]);
        assert_eq!(composed, parse("x1-x3+x2", 3).unwrap());
    }

    #[test]
    fn arity_check() {
        let e = parse("x2", 2).unwrap();
        assert!(e.check_arity(1).is_err());
        assert!(e.check_arity(2).is_ok());
    }
}
