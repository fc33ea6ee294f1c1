//! Recursive-descent parser for the bound-function DSL.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := ["-"] term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := atom ["^" ["-"] integer]
//! atom   := number | "x" integer | "(" expr ")"
//!         | ("sqrt"|"root4"|"abs"|"sign") "(" expr ")"
//!         | ("min"|"max") "(" expr "," expr ")"
//!         | "piecewise" "{" (guard ":" expr ";")+ "_" ":" expr "}"
//! guard  := and ("||" and)* ; and := unary ("&&" unary)*
//! unary  := ["!"] ("(" guard ")" | comparison)
//! comparison := expr ("<"|"<="|"=="|">="|">") expr
//! ```
//!
//! Numbers are integer literals; ratios like `1/2` arrive through the
//! division rule and are folded into exact rational constants, as is a
//! leading minus on a constant, so printing and re-parsing is stable.


use super::{CmpOp, Guard, Piecewise, ScalarExpr};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Var(u32),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Colon,
    Comma,
    Underscore,
    Lt,
    Le,
    EqEq,
    Ge,
    Gt,
    AndAnd,
    OrOr,
    Bang,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'{' => {
                self.pos += 1;
                Tok::LBrace
            }
            b'}' => {
                self.pos += 1;
                Tok::RBrace
            }
            b';' => {
                self.pos += 1;
                Tok::Semi
            }
            b':' => {
                self.pos += 1;
                Tok::Colon
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            b'!' => {
                self.pos += 1;
                Tok::Bang
            }
            b'<' => {
                self.pos += 1;
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            b'>' => {
                self.pos += 1;
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            b'=' => {
                self.pos += 1;
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    Tok::EqEq
                } else {
                    return Err(self.err("expected `==`"));
                }
            }
            b'&' => {
                self.pos += 1;
                if self.peek() == Some(b'&') {
                    self.pos += 1;
                    Tok::AndAnd
                } else {
                    return Err(self.err("expected `&&`"));
                }
            }
            b'|' => {
                self.pos += 1;
                if self.peek() == Some(b'|') {
                    self.pos += 1;
                    Tok::OrOr
                } else {
                    return Err(self.err("expected `||`"));
                }
            }
            b'0'..=b'9' => {
                let mut n: i64 = 0;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add((self.src[self.pos] - b'0') as i64))
                        .ok_or_else(|| self.err("integer literal overflows"))?;
                    self.pos += 1;
                }
                Tok::Num(n)
            }
            b'_' => {
                self.pos += 1;
                Tok::Underscore
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let word = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                if let Some(rest) = word.strip_prefix('x') {
                    if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                        let idx: u32 = rest
                            .parse()
                            .map_err(|_| self.err("variable index overflows"))?;
                        if idx == 0 {
                            return Err(ParseError {
                                pos: start,
                                msg: "variable indices start at x1".into(),
                            });
                        }
                        return Ok(Some((start, Tok::Var(idx))));
                    }
                }
                Tok::Ident(word.to_string())
            }
            other => {
                return Err(self.err(format!("unexpected character `{}`", other as char)))
            }
        };
        Ok(Some((start, tok)))
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    arity: u32,
    src_len: usize,
}

/// Parse an expression of the given arity.
pub fn parse(text: &str, arity: u32) -> Result<ScalarExpr, ParseError> {
    let mut p = Parser {
        toks: Lexer::tokenize(text)?,
        idx: 0,
        arity,
        src_len: text.len(),
    };
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parse a standalone guard (used for point-set predicates in catalog data).
pub fn parse_guard(text: &str, arity: u32) -> Result<Guard, ParseError> {
    let mut p = Parser {
        toks: Lexer::tokenize(text)?,
        idx: 0,
        arity,
        src_len: text.len(),
    };
    let g = p.guard()?;
    p.expect_end()?;
    Ok(g)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks
            .get(self.idx)
            .map(|(p, _)| *p)
            .unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.idx == self.toks.len() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = if self.eat(&Tok::Minus) {
            let t = self.term()?;
            fold_neg(t)
        } else {
            self.term()?
        };
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.term()?;
                lhs = ScalarExpr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.term()?;
                lhs = ScalarExpr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                let rhs = self.factor()?;
                lhs = ScalarExpr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Slash) {
                let rhs = self.factor()?;
                lhs = fold_div(lhs, rhs, self.pos())?;
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ScalarExpr, ParseError> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let neg = self.eat(&Tok::Minus);
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let k = i32::try_from(n)
                        .map_err(|_| self.error("exponent overflows"))?;
                    let k = if neg { -k } else { k };
                    Ok(ScalarExpr::Pow(Box::new(base), k))
                }
                _ => Err(self.error("expected integer exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ScalarExpr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(ScalarExpr::constant(n)),
            Some(Tok::Var(i)) => {
                if i > self.arity {
                    Err(ParseError {
                        pos,
                        msg: format!("x{i} is out of range for arity {}", self.arity),
                    })
                } else {
                    Ok(ScalarExpr::Var(i))
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "sqrt" | "root4" | "abs" | "sign" => {
                    self.expect(&Tok::LParen, "`(`")?;
                    let a = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    let a = Box::new(a);
                    Ok(match name.as_str() {
                        "sqrt" => ScalarExpr::Sqrt(a),
                        "root4" => ScalarExpr::Root4(a),
                        "abs" => ScalarExpr::Abs(a),
                        _ => ScalarExpr::Sign(a),
                    })
                }
                "min" | "max" => {
                    self.expect(&Tok::LParen, "`(`")?;
                    let a = self.expr()?;
                    self.expect(&Tok::Comma, "`,`")?;
                    let b = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(if name == "min" {
                        ScalarExpr::Min(Box::new(a), Box::new(b))
                    } else {
                        ScalarExpr::Max(Box::new(a), Box::new(b))
                    })
                }
                "piecewise" => self.piecewise(),
                other => Err(ParseError {
                    pos,
                    msg: format!("unknown function `{other}`"),
                }),
            },
            _ => Err(ParseError {
                pos,
                msg: "expected expression".into(),
            }),
        }
    }

    fn piecewise(&mut self) -> Result<ScalarExpr, ParseError> {
        self.expect(&Tok::LBrace, "`{`")?;
        let mut branches = Vec::new();
        loop {
            if self.eat(&Tok::Underscore) {
                self.expect(&Tok::Colon, "`:`")?;
                let default = self.expr()?;
                self.expect(&Tok::RBrace, "`}`")?;
                if branches.is_empty() {
                    return Err(self.error("piecewise needs at least one guarded branch"));
                }
                return Ok(ScalarExpr::Piecewise(Piecewise {
                    branches,
                    default: Box::new(default),
                }));
            }
            let g = self.guard()?;
            self.expect(&Tok::Colon, "`:`")?;
            let e = self.expr()?;
            self.expect(&Tok::Semi, "`;`")?;
            branches.push((g, e));
        }
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        let mut lhs = self.guard_and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.guard_and()?;
            lhs = Guard::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn guard_and(&mut self) -> Result<Guard, ParseError> {
        let mut lhs = self.guard_unary()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.guard_unary()?;
            lhs = Guard::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn guard_unary(&mut self) -> Result<Guard, ParseError> {
        if self.eat(&Tok::Bang) {
            let g = self.guard_unary()?;
            return Ok(Guard::Not(Box::new(g)));
        }
        // `(` is ambiguous: guard grouping or a parenthesized comparison
        // operand. Try the grouping first and backtrack.
        if self.peek() == Some(&Tok::LParen) {
            let save = self.idx;
            self.idx += 1;
            if let Ok(g) = self.guard() {
                if self.eat(&Tok::RParen) && !self.peek_is_cmp() {
                    return Ok(g);
                }
            }
            self.idx = save;
        }
        self.comparison()
    }

    fn peek_is_cmp(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Lt) | Some(Tok::Le) | Some(Tok::EqEq) | Some(Tok::Ge) | Some(Tok::Gt)
        )
    }

    fn comparison(&mut self) -> Result<Guard, ParseError> {
        let lhs = self.expr()?;
        let op = match self.bump() {
            Some(Tok::Lt) => CmpOp::Lt,
            Some(Tok::Le) => CmpOp::Le,
            Some(Tok::EqEq) => CmpOp::Eq,
            Some(Tok::Ge) => CmpOp::Ge,
            Some(Tok::Gt) => CmpOp::Gt,
            _ => return Err(self.error("expected comparison operator")),
        };
        let rhs = self.expr()?;
        Ok(Guard::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }
}

/// `-c` on a constant folds to the negated constant so that `-1/2` prints
/// and re-parses as the same node.
fn fold_neg(e: ScalarExpr) -> ScalarExpr {
    match e {
        ScalarExpr::Const(r) => ScalarExpr::Const(-r),
        other => ScalarExpr::Neg(Box::new(other)),
    }
}

/// `p/q` on constants folds to an exact rational.
fn fold_div(a: ScalarExpr, b: ScalarExpr, pos: usize) -> Result<ScalarExpr, ParseError> {
    match (&a, &b) {
        (ScalarExpr::Const(x), ScalarExpr::Const(y)) => {
            if *y.numer() == 0 {
                Err(ParseError {
                    pos,
                    msg: "division of constants by zero".into(),
                })
            } else {
                Ok(ScalarExpr::Const(x / y))
            }
        }
        _ => Ok(ScalarExpr::Div(Box::new(a), Box::new(b))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_variable() {
        assert_eq!(parse("x1", 1).unwrap(), ScalarExpr::Var(1));
    }

    #[test]
    fn parses_g() {
        let g = parse("-(x2^2+x3^2)/x1", 3).unwrap();
        match &g {
            ScalarExpr::Neg(inner) => match inner.as_ref() {
                ScalarExpr::Div(num, den) => {
                    assert!(matches!(num.as_ref(), ScalarExpr::Add(..)));
                    assert_eq!(den.as_ref(), &ScalarExpr::Var(1));
                }
                other => panic!("expected division, got {other:?}"),
            },
            other => panic!("expected negation, got {other:?}"),
        }
    }

    #[test]
    fn parses_trousers_piecewise() {
        let f = parse("piecewise{ x1<0 && x2<0 : x1 ; _ : 0 }", 2).unwrap();
        match &f {
            ScalarExpr::Piecewise(pw) => {
                assert_eq!(pw.branches.len(), 1);
                assert_eq!(pw.default.as_ref(), &ScalarExpr::constant(0));
                let (g, e) = &pw.branches[0];
                assert_eq!(e, &ScalarExpr::Var(1));
                assert!(matches!(g, Guard::And(..)));
            }
            other => panic!("expected piecewise, got {other:?}"),
        }
    }

    #[test]
    fn ratio_literals_fold() {
        assert_eq!(parse("1/2", 0).unwrap(), ScalarExpr::ratio(1, 2));
        assert_eq!(parse("-1/2", 0).unwrap(), ScalarExpr::ratio(-1, 2));
        assert_eq!(parse("2/4", 0).unwrap(), ScalarExpr::ratio(1, 2));
    }

    #[test]
    fn arity_is_enforced() {
        let err = parse("x3", 2).unwrap_err();
        assert_eq!(err.pos, 0);
        assert!(err.msg.contains("x3"));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse("x1 + + x2", 2).unwrap_err();
        assert_eq!(err.pos, 5);
    }

    #[test]
    fn guard_grouping_and_negation() {
        let g = parse_guard("!(x1<0) && (x2<0 || x1>1)", 2).unwrap();
        assert!(matches!(g, Guard::And(..)));
        let printed = g.to_string();
        assert_eq!(parse_guard(&printed, 2).unwrap(), g);
    }

    #[test]
    fn parenthesized_comparison_operand() {
        let g = parse_guard("(x1+1)<x2", 2).unwrap();
        assert!(matches!(g, Guard::Cmp(CmpOp::Lt, ..)));
    }

    #[test]
    fn exponent_sign() {
        let e = parse("x1^-2", 1).unwrap();
        assert_eq!(e, ScalarExpr::Pow(Box::new(ScalarExpr::Var(1)), -2));
        assert_eq!(parse(&e.to_string(), 1).unwrap(), e);
    }
}
