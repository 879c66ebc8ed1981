//! Expression mini-language shared by series, term, and operator flags.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary | <juxtaposed> power)*
//! unary   := '-' unary | power
//! power   := postfix ('^' '-'? INT)?
//! postfix := primary '!'?
//! primary := INT | IDENT | ('S' | 'd') '{' expr '}' | ('sum' | 'qfact') '(' expr ')' | '(' expr ')'
//! ```
//!
//! `S{r}` is `sigma_r`, `d{r}` is `delta_r`; `D` is `d/dz`.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: lexical error: unexpected character {ch:?}")]
    Lexical { pos: Pos, ch: char },
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Lexical { pos, .. } | ParseError::Syntax { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    /// `sum(g)` is `sum_(n>=0) g(n) z^n`.
    Sum,
    QFact,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sum => "sum",
            Func::QFact => "qfact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    Sigma,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigUint),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Fact(Box<Expr>),
    Shift(ShiftKind, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigUint),
    Ident(String),
    Bang,
    Caret,
    Star,
    Plus,
    Minus,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::Bang => write!(f, "'!'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        let tok = match c {
            '!' => Tok::Bang,
            '^' => Tok::Caret,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            _ => return Err(ParseError::Lexical { pos, ch: c }),
        };
        chars.next();
        column += 1;
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.postfix()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => {
                let e: i64 = i64::try_from(n).map_err(|_| ParseError::Syntax { pos, msg: "exponent too large".into() })?;
                Ok(Expr::Pow(Box::new(base), if negative { -e } else { e }))
            }
            t => Err(ParseError::Syntax { pos, msg: format!("expected integer exponent, found {t}") }),
        }
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let e = self.primary()?;
        if *self.peek() != Tok::Bang {
            return Ok(e);
        }
        self.bump();
        if *self.peek() == Tok::Bang {
            return self.error("repeated '!'; write (x!)! for an iterated factorial");
        }
        Ok(Expr::Fact(Box::new(e)))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match (name.as_str(), self.peek()) {
                ("S" | "d", Tok::LBrace) => {
                    self.bump();
                    let r = self.expr()?;
                    self.expect(Tok::RBrace)?;
                    let kind = if name == "S" { ShiftKind::Sigma } else { ShiftKind::Delta };
                    Ok(Expr::Shift(kind, Box::new(r)))
                }
                ("sum" | "qfact", _) => {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let f = if name == "sum" { Func::Sum } else { Func::QFact };
                    Ok(Expr::Call(f, Box::new(arg)))
                }
                _ => Ok(Expr::Var(name)),
            },
            t => Err(ParseError::Syntax { pos, msg: format!("unexpected {t}") }),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.peek()));
    }
    Ok(e)
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Fact(_) => 5,
            _ => 6,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, p: u8| -> fmt::Result {
            a.write_child(f, p)?;
            write!(f, " {op} ")?;
            b.write_child(f, p + 1)
        };
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(s) => write!(f, "{s}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_child(f, 3)
            }
            Expr::Add(a, b) => bin(f, a, "+", b, 1),
            Expr::Sub(a, b) => bin(f, a, "-", b, 1),
            Expr::Mul(a, b) => bin(f, a, "*", b, 2),
            Expr::Div(a, b) => bin(f, a, "/", b, 2),
            Expr::Pow(a, e) => {
                a.write_child(f, 5)?;
                write!(f, "^{e}")
            }
            Expr::Fact(a) => {
                a.write_child(f, 6)?;
                write!(f, "!")
            }
            Expr::Shift(k, r) => write!(f, "{}{{{r}}}", if *k == ShiftKind::Sigma { "S" } else { "d" }),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn var(s: &str) -> Box<Expr> {
        Box::new(Expr::Var(s.into()))
    }

    fn int(n: u32) -> Box<Expr> {
        Box::new(Expr::Int(n.into()))
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_spec("n * n!").unwrap(), Expr::Mul(var("n"), Box::new(Expr::Fact(var("n")))));
        let shifted = Expr::Fact(Box::new(Expr::Add(var("n"), int(1))));
        assert_eq!(parse_spec("n^5 * (n+1)!").unwrap(), Expr::Mul(Box::new(Expr::Pow(var("n"), 5)), Box::new(shifted)));
        assert_eq!(parse_spec("z^2 D + z - 1").unwrap(), parse_spec("z^2*D + z - 1").unwrap());
        let op = parse_spec("(1/(q*z))*S{1/q} - xi").unwrap();
        assert!(matches!(op, Expr::Sub(_, _)));
    }

    #[test]
    fn double_bang_is_a_syntax_error_at_the_second_bang() {
        match parse_spec("n !!") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, Pos { line: 1, column: 4 }),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions_and_categories() {
        assert!(matches!(parse_spec("n + $"), Err(ParseError::Lexical { pos: Pos { line: 1, column: 5 }, ch: '$' })));
        assert!(matches!(parse_spec("n +\n  )"), Err(ParseError::Syntax { pos: Pos { line: 2, column: 3 }, .. })));
        assert!(matches!(parse_spec("sum n"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_spec("n^x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_spec(""), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn printing_examples() {
        assert_eq!(parse_spec("n*(n+1)!").unwrap().to_string(), "n * (n + 1)!");
        assert_eq!(parse_spec("(n!)!").unwrap().to_string(), "(n!)!");
        assert_eq!(parse_spec("-(a - b) - -c").unwrap().to_string(), "-(a - b) - -c");
        assert_eq!(parse_spec("(z^2)^3").unwrap().to_string(), "(z^2)^3");
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..50).prop_map(|n| Expr::Int(n.into())),
            prop::sample::select(vec!["n", "z", "D", "theta", "q", "xi"]).prop_map(|s| Expr::Var(s.into())),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            let b = |e: Expr| Box::new(e);
            prop_oneof![
                inner.clone().prop_map(move |a| Expr::Neg(b(a))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
                (inner.clone(), -3i64..6).prop_map(move |(x, e)| Expr::Pow(b(x), e)),
                inner.clone().prop_map(move |a| Expr::Fact(b(a))),
                (prop::bool::ANY, inner.clone()).prop_map(move |(s, a)| Expr::Shift(if s { ShiftKind::Sigma } else { ShiftKind::Delta }, b(a))),
                (prop::bool::ANY, inner).prop_map(move |(s, a)| Expr::Call(if s { Func::Sum } else { Func::QFact }, b(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn pretty_print_round_trips(e in arb_expr()) {
            let text = e.to_string();
            prop_assert_eq!(parse_spec(&text).unwrap(), e);
        }
    }
}
