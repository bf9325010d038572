//! Scalar expressions in the coordinates `x1..x4`.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := ("-" | "+") unary | power
//! power   := primary ("^" unary)?          right-associative, constant exponent
//! primary := number | "pi" | "e" | x1..x4 | func "(" sum ")" | "(" sum ")"
//! ```
//!
//! `-x1^2` therefore parses as `-(x1^2)`.

use std::f64::consts;
use std::fmt;

use crate::error::{EvalError, ParseError, ParseErrorKind};
use crate::jet::{binomial_series, Jet, Series, MAX_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Atan,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Atan => "atan",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: f64) -> Result<f64, EvalError> {
        let domain = |func| EvalError::Domain { func, arg: x };
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => {
                if x.cos() == 0.0 {
                    return Err(domain("tan"));
                }
                x.tan()
            }
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(domain("log"));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x <= 0.0 {
                    return Err(domain("sqrt"));
                }
                x.sqrt()
            }
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Atan => x.atan(),
        })
    }

    /// Taylor coefficients of the function at `u0`, up to degree four.
    fn series(self, u0: f64) -> Result<[f64; MAX_ORDER + 1], EvalError> {
        const INV_FACT: [f64; 5] = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        let domain = |func| EvalError::Domain { func, arg: u0 };
        let (s, c) = u0.sin_cos();
        let sin_s = Series([s, c, -s / 2.0, -c / 6.0, s / 24.0]);
        let cos_s = Series([c, -s, -c / 2.0, s / 6.0, c / 24.0]);
        let (sh, ch) = (u0.sinh(), u0.cosh());
        let sinh_s = Series([sh, ch, sh / 2.0, ch / 6.0, sh / 24.0]);
        let cosh_s = Series([ch, sh, ch / 2.0, sh / 6.0, ch / 24.0]);
        Ok(match self {
            Func::Sin => sin_s.0,
            Func::Cos => cos_s.0,
            Func::Tan => {
                if c == 0.0 {
                    return Err(domain("tan"));
                }
                sin_s.div(&cos_s).0
            }
            Func::Exp => {
                let e = u0.exp();
                INV_FACT.map(|f| e * f)
            }
            Func::Log => {
                if u0 <= 0.0 {
                    return Err(domain("log"));
                }
                let inv = 1.0 / u0;
                [u0.ln(), inv, -inv * inv / 2.0, inv.powi(3) / 3.0, -inv.powi(4) / 4.0]
            }
            Func::Sqrt => {
                if u0 <= 0.0 {
                    return Err(domain("sqrt"));
                }
                binomial_series(u0, 0.5)
            }
            Func::Sinh => sinh_s.0,
            Func::Cosh => cosh_s.0,
            Func::Tanh => sinh_s.div(&cosh_s).0,
            Func::Atan => {
                // d/du atan(u) = 1 / (1 + u²)
                let one = Series([1.0, 0.0, 0.0, 0.0, 0.0]);
                let denom = Series([1.0 + u0 * u0, 2.0 * u0, 1.0, 0.0, 0.0]);
                one.div(&denom).integrate(u0.atan()).0
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => consts::PI,
            Constant::E => consts::E,
        }
    }
}

/// Expression tree. Coordinates are zero-based (`Coord(0)` is `x1`).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(Constant),
    Coord(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Power with a constant exponent.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Const(Constant::Pi) => write!(f, "pi"),
            Expr::Const(Constant::E) => write!(f, "e"),
            Expr::Coord(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Pow(a, p) => write!(f, "({a}^{p})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl Expr {
    fn uses_coordinates(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Coord(_) => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.uses_coordinates(),
            Expr::Binary(_, a, b) => a.uses_coordinates() || b.uses_coordinates(),
        }
    }

    /// Plain floating-point evaluation.
    pub fn eval(&self, p: &[f64; 4]) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Const(c) => c.value(),
            Expr::Coord(i) => p[*i],
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Binary(op, a, b) => {
                let (x, y) = (a.eval(p)?, b.eval(p)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::Domain { func: "/", arg: y });
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, e) => {
                let x = a.eval(p)?;
                if is_integer(*e) {
                    if x == 0.0 && *e < 0.0 {
                        return Err(EvalError::Domain { func: "^", arg: x });
                    }
                    x.powi(*e as i32)
                } else {
                    if x <= 0.0 {
                        return Err(EvalError::Domain { func: "^", arg: x });
                    }
                    (e * x.ln()).exp()
                }
            }
            Expr::Call(func, a) => func.apply(a.eval(p)?)?,
        })
    }

    /// Truncated Taylor expansion at `p` up to `order`.
    pub fn eval_jet(&self, p: &[f64; 4], order: usize) -> Result<Jet, EvalError> {
        if order > MAX_ORDER {
            return Err(crate::error::JetError::OrderOutOfRange(order).into());
        }
        self.jet_rec(p, order)
    }

    fn jet_rec(&self, p: &[f64; 4], order: usize) -> Result<Jet, EvalError> {
        Ok(match self {
            Expr::Num(v) => Jet::constant(*v, order),
            Expr::Const(c) => Jet::constant(c.value(), order),
            Expr::Coord(i) => Jet::variable(*i, p[*i], order),
            Expr::Neg(a) => -a.jet_rec(p, order)?,
            Expr::Binary(op, a, b) => {
                let (x, y) = (a.jet_rec(p, order)?, b.jet_rec(p, order)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x.try_div(&y).map_err(|_| EvalError::Domain {
                        func: "/",
                        arg: y.value(),
                    })?,
                }
            }
            Expr::Pow(a, e) => {
                let x = a.jet_rec(p, order)?;
                if is_integer(*e) {
                    x.powi(*e as i32).map_err(|_| EvalError::Domain {
                        func: "^",
                        arg: x.value(),
                    })?
                } else {
                    if x.value() <= 0.0 {
                        return Err(EvalError::Domain {
                            func: "^",
                            arg: x.value(),
                        });
                    }
                    let log = x.compose(&Func::Log.series(x.value())?);
                    let scaled = log.scale(*e);
                    scaled.compose(&Func::Exp.series(scaled.value())?)
                }
            }
            Expr::Call(func, a) => {
                let x = a.jet_rec(p, order)?;
                x.compose(&func.series(x.value())?)
            }
        })
    }
}

fn is_integer(e: f64) -> bool {
    e.fract() == 0.0 && e.abs() <= i32::MAX as f64
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Op(c) => write!(f, "{c:?}"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // Scientific notation: 1e-3, 2.5E+4.
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s = &text[start..i];
            let v: f64 = s.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(s.to_string()),
                offset: start,
            })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or(c);
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedChar(ch),
                offset: i,
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            offset: self.offset(),
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.err(ParseErrorKind::UnexpectedToken(t.to_string())),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let exponent = self.unary()?;
        if exponent.uses_coordinates() {
            return Err(ParseError {
                kind: ParseErrorKind::NonConstantExponent,
                offset: at,
            });
        }
        let value = exponent.eval(&[0.0; 4]).map_err(|_| ParseError {
            kind: ParseErrorKind::NonConstantExponent,
            offset: at,
        })?;
        Ok(Expr::Pow(Box::new(base), value))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        let tok = match self.toks.get(self.pos) {
            Some((t, _)) => t.clone(),
            None => return Err(self.unexpected()),
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.unexpected());
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(func) = Func::from_name(&name) {
                    return self.call(func, &name, at);
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Const(Constant::Pi)),
                    "e" => Ok(Expr::Const(Constant::E)),
                    "x1" => Ok(Expr::Coord(0)),
                    "x2" => Ok(Expr::Coord(1)),
                    "x3" => Ok(Expr::Coord(2)),
                    "x4" => Ok(Expr::Coord(3)),
                    _ => Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        offset: at,
                    }),
                }
            }
            Tok::Op(_) => Err(self.unexpected()),
        }
    }

    fn call(&mut self, func: Func, name: &str, at: usize) -> Result<Expr, ParseError> {
        let arity = |got| ParseError {
            kind: ParseErrorKind::Arity {
                name: name.to_string(),
                got,
            },
            offset: at,
        };
        if !self.eat('(') {
            return Err(arity(0));
        }
        if self.eat(')') {
            return Err(arity(0));
        }
        let mut args = vec![self.sum()?];
        while self.eat(',') {
            args.push(self.sum()?);
        }
        if !self.eat(')') {
            return Err(self.unexpected());
        }
        if args.len() != 1 {
            return Err(arity(args.len()));
        }
        Ok(Expr::Call(func, Box::new(args.pop().expect("one argument"))))
    }
}

/// Parses an expression in `x1..x4`.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            offset: 0,
        });
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let expr = parser.sum()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.unexpected());
    }
    Ok(expr)
}
