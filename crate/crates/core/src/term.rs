//! Term grammar for both sorts.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*
//! power  := atom ('^' INT)?
//! atom   := NUMBER | 'sqrt' '(' INT ')' | 'sqrt' INT | xN | vN
//!         | '(' expr ')' | '[' expr ',' expr ']'
//! ```
//!
//! `xN` are sort-1 letters, `vN` sort-2 generators. A product `f * vN` is the
//! action of `f` on `vN`; mixing the sorts additively is a `SortError`.

use std::fmt;

use thiserror::Error;

use crate::field::Scalar;
use crate::freealg::{NCPoly, Word};
use crate::freelie::LieElement;
use crate::representation::{ModKey, ModuleElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("syntax error at {line}:{col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("unknown generator `{name}` at {line}:{col}")]
    UnknownGenerator { name: String, line: usize, col: usize },
    #[error("sort error at {line}:{col}: {msg}")]
    SortError { line: usize, col: usize, msg: String },
}

/// Parsed value of a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Scalar(Scalar),
    Poly(NCPoly),
    Lie(LieElement),
    Module(ModuleElement),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Scalar(s) => write!(f, "{s}"),
            Term::Poly(p) => write!(f, "{p}"),
            Term::Lie(l) => write!(f, "{l}"),
            Term::Module(m) => write!(f, "{m}"),
        }
    }
}

/// Generator bounds; `None` accepts any index.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TermContext {
    pub n1: Option<usize>,
    pub n2: Option<usize>,
}

impl TermContext {
    pub fn new(n1: usize, n2: usize) -> Self {
        TermContext {
            n1: Some(n1),
            n2: Some(n2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, TermError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Num(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        if "+-*/^()[],".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                col: c0,
            });
            col += 1;
            i += 1;
            continue;
        }
        return Err(TermError::SyntaxError {
            line: l0,
            col: c0,
            msg: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

#[derive(Debug, Clone)]
enum Val {
    Scalar(Scalar),
    Alg { poly: NCPoly, lie: bool, expr: String },
    Module(ModuleElement),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    ctx: TermContext,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, t: &Token, msg: impl Into<String>) -> TermError {
        TermError::SyntaxError {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TermError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(self.syntax(&t, format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Val, TermError> {
        let mut acc = if self.peek().tok == Tok::Sym('-') {
            let t = self.next();
            let v = self.term()?;
            neg(v, &t)?
        } else {
            self.term()?
        };
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Sym('+') => {
                    self.next();
                    let rhs = self.term()?;
                    acc = add(acc, rhs, &t)?;
                }
                Tok::Sym('-') => {
                    self.next();
                    let rhs = self.term()?;
                    acc = add(acc, neg(rhs, &t)?, &t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Val, TermError> {
        let mut acc = self.power()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Sym('*') => {
                    self.next();
                    let rhs = self.power()?;
                    acc = mul(acc, rhs, &t)?;
                }
                Tok::Sym('/') => {
                    self.next();
                    let rhs = self.power()?;
                    let Val::Scalar(s) = rhs else {
                        return Err(sort(&t, "only division by scalars is allowed"));
                    };
                    let inv = s
                        .checked_inv()
                        .map_err(|e| self.syntax(&t, e.to_string()))?;
                    acc = mul(acc, Val::Scalar(inv), &t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Val, TermError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Sym('^') {
            return Ok(base);
        }
        let t = self.next();
        let e = self.next();
        let Tok::Num(n) = &e.tok else {
            return Err(self.syntax(&e, "expected an exponent"));
        };
        let n: u32 = n.parse().map_err(|_| self.syntax(&e, "exponent too large"))?;
        if n == 0 {
            return Ok(Val::Scalar(Scalar::one()));
        }
        let mut acc = base.clone();
        for _ in 1..n {
            acc = mul(acc, base.clone(), &t)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Val, TermError> {
        let t = self.next();
        match &t.tok {
            Tok::Num(n) => {
                let v: i64 = n.parse().map_err(|_| self.syntax(&t, "integer literal too large"))?;
                Ok(Val::Scalar(Scalar::from_int(v)))
            }
            Tok::Ident(name) if name == "sqrt" => {
                let paren = self.peek().tok == Tok::Sym('(');
                if paren {
                    self.next();
                }
                let mut neg = false;
                if self.peek().tok == Tok::Sym('-') {
                    self.next();
                    neg = true;
                }
                let e = self.next();
                let Tok::Num(n) = &e.tok else {
                    return Err(self.syntax(&e, "expected an integer radicand"));
                };
                let mut d: i64 = n.parse().map_err(|_| self.syntax(&e, "radicand too large"))?;
                if neg {
                    d = -d;
                }
                if paren {
                    self.expect(')')?;
                }
                if d == 0 || d == 1 {
                    return Ok(Val::Scalar(Scalar::from_int(d)));
                }
                crate::field::FieldDescriptor::quadratic(d).map_err(|err| self.syntax(&e, err.to_string()))?;
                Ok(Val::Scalar(Scalar::sqrt(d)))
            }
            Tok::Ident(name) => self.generator(name, &t),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(match v {
                    Val::Alg { poly, lie, expr } => Val::Alg {
                        poly,
                        lie,
                        expr: format!("({expr})"),
                    },
                    other => other,
                })
            }
            Tok::Sym('[') => {
                let a = self.expr()?;
                let comma = self.peek().clone();
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(']')?;
                bracket(a, b, &comma)
            }
            Tok::End => Err(self.syntax(&t, "unexpected end of input")),
            Tok::Sym(c) => Err(self.syntax(&t, format!("unexpected `{c}`"))),
        }
    }

    fn generator(&self, name: &str, t: &Token) -> Result<Val, TermError> {
        let unknown = || TermError::UnknownGenerator {
            name: name.to_string(),
            line: t.line,
            col: t.col,
        };
        let (sort, idx) = name.split_at(1);
        let idx: usize = idx.parse().map_err(|_| unknown())?;
        if idx == 0 {
            return Err(unknown());
        }
        match sort {
            "x" => {
                if self.ctx.n1.is_some_and(|n| idx > n) || idx > u8::MAX as usize {
                    return Err(unknown());
                }
                Ok(Val::Alg {
                    poly: NCPoly::letter(idx - 1),
                    lie: true,
                    expr: name.to_string(),
                })
            }
            "v" => {
                if self.ctx.n2.is_some_and(|n| idx > n) {
                    return Err(unknown());
                }
                Ok(Val::Module(ModuleElement::generator(idx - 1)))
            }
            _ => Err(unknown()),
        }
    }
}

fn sort(t: &Token, msg: &str) -> TermError {
    TermError::SortError {
        line: t.line,
        col: t.col,
        msg: msg.to_string(),
    }
}

fn arith(t: &Token, e: impl fmt::Display) -> TermError {
    TermError::SyntaxError {
        line: t.line,
        col: t.col,
        msg: e.to_string(),
    }
}

fn neg(v: Val, t: &Token) -> Result<Val, TermError> {
    mul(Val::Scalar(Scalar::from_int(-1)), v, t).map(|v| match v {
        Val::Alg { poly, lie, expr } => Val::Alg {
            poly,
            lie,
            expr: format!("-{expr}"),
        },
        other => other,
    })
}

fn scalar_poly(s: Scalar) -> NCPoly {
    NCPoly::constant(s)
}

fn check_scalars<'a>(t: &Token, cs: impl IntoIterator<Item = &'a Scalar>, s: &Scalar) -> Result<(), TermError> {
    for c in cs {
        c.checked_add(s).map_err(|e| arith(t, e))?;
    }
    Ok(())
}

fn add(a: Val, b: Val, t: &Token) -> Result<Val, TermError> {
    Ok(match (a, b) {
        (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(x.checked_add(&y).map_err(|e| arith(t, e))?),
        (Val::Scalar(x), Val::Alg { poly, .. }) | (Val::Alg { poly, .. }, Val::Scalar(x)) => {
            check_scalars(t, poly.coefficients(), &x)?;
            Val::Alg {
                poly: &poly + &scalar_poly(x),
                lie: false,
                expr: String::new(),
            }
        }
        (
            Val::Alg {
                poly: p,
                lie: l1,
                expr: e1,
            },
            Val::Alg {
                poly: q,
                lie: l2,
                expr: e2,
            },
        ) => {
            if let Some(c) = q.coefficients().next() {
                check_scalars(t, p.coefficients(), c)?;
            }
            let sign = if e2.starts_with('-') { " " } else { " + " };
            Val::Alg {
                poly: &p + &q,
                lie: l1 && l2,
                expr: format!("{e1}{sign}{e2}"),
            }
        }
        (Val::Module(m), Val::Module(n)) => {
            if let Some(c) = n.coefficients().next() {
                check_scalars(t, m.coefficients(), c)?;
            }
            Val::Module(&m + &n)
        }
        (Val::Module(_), _) | (_, Val::Module(_)) => {
            return Err(sort(t, "cannot add a sort-2 element to a sort-1 element or scalar"))
        }
    })
}

fn mul(a: Val, b: Val, t: &Token) -> Result<Val, TermError> {
    Ok(match (a, b) {
        (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(x.checked_mul(&y).map_err(|e| arith(t, e))?),
        (Val::Scalar(x), Val::Alg { poly, lie, expr }) | (Val::Alg { poly, lie, expr }, Val::Scalar(x)) => {
            check_scalars(t, poly.coefficients(), &x)?;
            let expr = if x.is_one() || x == Scalar::from_int(-1) {
                expr
            } else {
                format!("({x})*{expr}")
            };
            Val::Alg {
                poly: poly.scale(&x),
                lie,
                expr,
            }
        }
        (Val::Scalar(x), Val::Module(m)) | (Val::Module(m), Val::Scalar(x)) => {
            check_scalars(t, m.coefficients(), &x)?;
            Val::Module(m.scale(&x))
        }
        (Val::Alg { poly: p, .. }, Val::Alg { poly: q, .. }) => {
            if let Some(c) = q.coefficients().next() {
                check_scalars(t, p.coefficients(), c)?;
            }
            Val::Alg {
                poly: p.mul(&q),
                lie: false,
                expr: String::new(),
            }
        }
        (Val::Alg { poly, .. }, Val::Module(m)) => {
            if let Some(c) = m.coefficients().next() {
                check_scalars(t, poly.coefficients(), c)?;
            }
            let mut out = ModuleElement::zero();
            for (w, c) in poly.iter() {
                for (k, d) in m.iter() {
                    out.add_term(ModKey::new(w.concat(&k.word), k.gen), c * d);
                }
            }
            Val::Module(out)
        }
        (Val::Module(_), _) => return Err(sort(t, "a sort-2 element can only be multiplied by scalars")),
    })
}

fn bracket(a: Val, b: Val, t: &Token) -> Result<Val, TermError> {
    let as_alg = |v: Val| -> Result<(NCPoly, bool, String), TermError> {
        match v {
            Val::Scalar(s) => Ok((scalar_poly(s.clone()), s.is_zero(), s.to_string())),
            Val::Alg { poly, lie, expr } => Ok((poly, lie, expr)),
            Val::Module(_) => Err(sort(t, "brackets take sort-1 arguments")),
        }
    };
    let (p, l1, e1) = as_alg(a)?;
    let (q, l2, e2) = as_alg(b)?;
    if let Some(c) = q.coefficients().next() {
        check_scalars(t, p.coefficients(), c)?;
    }
    Ok(Val::Alg {
        poly: p.commutator(&q),
        lie: l1 && l2,
        expr: format!("[{e1},{e2}]"),
    })
}

/// Parses a term of either sort.
pub fn parse_term(src: &str, ctx: TermContext) -> Result<Term, TermError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        ctx,
    };
    let v = p.expr()?;
    let t = p.next();
    if t.tok != Tok::End {
        return Err(p.syntax(&t, "trailing input"));
    }
    Ok(match v {
        Val::Scalar(s) => Term::Scalar(s),
        Val::Alg { poly, lie: true, expr } => {
            let mut l = LieElement::from_pbw(poly);
            if expr.contains('[') {
                l.expr = Some(expr);
            }
            Term::Lie(l)
        }
        Val::Alg { poly, .. } => Term::Poly(poly),
        Val::Module(m) => Term::Module(m),
    })
}

fn wrong_sort(expected: &str, got: &Term) -> TermError {
    let (line, col) = (1, 1);
    let got = match got {
        Term::Scalar(_) => "a scalar",
        Term::Poly(_) => "an associative polynomial",
        Term::Lie(_) => "a Lie element",
        Term::Module(_) => "a sort-2 element",
    };
    TermError::SortError {
        line,
        col,
        msg: format!("expected {expected}, found {got}"),
    }
}

pub fn parse_scalar(src: &str) -> Result<Scalar, TermError> {
    match parse_term(src, TermContext::new(0, 0))? {
        Term::Scalar(s) => Ok(s),
        other => Err(wrong_sort("a scalar", &other)),
    }
}

/// Associative polynomial in the sort-1 letters; Lie elements and scalars are accepted.
pub fn parse_poly(src: &str, ctx: TermContext) -> Result<NCPoly, TermError> {
    match parse_term(src, ctx)? {
        Term::Scalar(s) => Ok(NCPoly::constant(s)),
        Term::Poly(p) => Ok(p),
        Term::Lie(l) => Ok(l.pbw),
        other => Err(wrong_sort("a sort-1 polynomial", &other)),
    }
}

pub fn parse_lie(src: &str, ctx: TermContext) -> Result<LieElement, TermError> {
    match parse_term(src, ctx)? {
        Term::Lie(l) => Ok(l),
        Term::Scalar(s) if s.is_zero() => Ok(LieElement::zero()),
        other => Err(wrong_sort("a Lie element", &other)),
    }
}

pub fn parse_module(src: &str, ctx: TermContext) -> Result<ModuleElement, TermError> {
    match parse_term(src, ctx)? {
        Term::Module(m) => Ok(m),
        Term::Scalar(s) if s.is_zero() => Ok(ModuleElement::zero()),
        other => Err(wrong_sort("a sort-2 element", &other)),
    }
}

/// Formats a word as a product of letters, `1` for the empty word.
pub fn word_term(w: &Word) -> String {
    w.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_expansion() {
        let Term::Lie(l) = parse_term("[x1,[x1,x2]]", TermContext::default()).unwrap() else {
            panic!("expected a Lie element")
        };
        let expect = &(&NCPoly::word(&[0, 0, 1]) - &NCPoly::word(&[0, 1, 0]).scale(&Scalar::from_int(2)))
            + &NCPoly::word(&[1, 0, 0]);
        assert_eq!(l.pbw, expect);
        assert_eq!(l.to_string(), "[x1,[x1,x2]]");
    }

    #[test]
    fn commutator_as_poly() {
        let Term::Poly(p) = parse_term("x1*x2 - x2*x1", TermContext::default()).unwrap() else {
            panic!("expected a polynomial")
        };
        assert_eq!(p, NCPoly::letter(0).commutator(&NCPoly::letter(1)));
    }

    #[test]
    fn sort_errors() {
        assert!(matches!(
            parse_term("x1 + v1", TermContext::default()),
            Err(TermError::SortError { .. })
        ));
        assert!(matches!(
            parse_term("v1 * x1", TermContext::default()),
            Err(TermError::SortError { .. })
        ));
        assert!(matches!(
            parse_term("x3", TermContext::new(2, 1)),
            Err(TermError::UnknownGenerator { .. })
        ));
        assert!(matches!(
            parse_term("y1", TermContext::default()),
            Err(TermError::UnknownGenerator { .. })
        ));
    }

    #[test]
    fn syntax_positions() {
        assert_eq!(
            parse_term("x1 +\n  * x2", TermContext::default()),
            Err(TermError::SyntaxError {
                line: 2,
                col: 3,
                msg: "unexpected `*`".into()
            })
        );
        assert!(matches!(parse_term("[x1, x2", TermContext::default()), Err(TermError::SyntaxError { .. })));
    }

    #[test]
    fn scalars_and_actions() {
        assert_eq!(parse_scalar("3 - 2*sqrt(2)").unwrap(), &Scalar::from_int(3) - &(&Scalar::from_int(2) * &Scalar::sqrt(2)));
        assert_eq!(parse_scalar("1/2*sqrt 2").unwrap(), &Scalar::sqrt(2) * &Scalar::ratio(1, 2));
        assert!(parse_scalar("sqrt(2) + sqrt(3)").is_err());
        let m = parse_module("(1 + sqrt(2))*x1*x2*v1 - v1", TermContext::default()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(parse_module(&m.to_string(), TermContext::default()).unwrap(), m);
        assert_eq!(parse_poly("x1^3", TermContext::default()).unwrap(), NCPoly::word(&[0, 0, 0]));
    }
}
