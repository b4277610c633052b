//! Closed-form expressions in the coordinates of the circle or torus.
//!
//! Syntax: numbers (`3`, `1/2`, `0.25`), variables `x` and `y`, binary `+ - *`,
//! unary `-`, and the functions `cos2pi(e) = cos(2πe)`, `sin2pi(e)`, `abs(e)`.

use std::fmt;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::numeric::{format_rational, frac, parse_rational, rat, to_f64, Rational, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(usize),
    Const(Rational),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Cos2Pi(Box<Expr>),
    Sin2Pi(Box<Expr>),
    Abs(Box<Expr>),
}

/// `cos(2πr)` when it is rational (Niven's theorem: only at multiples of 1/6 and 1/4).
fn exact_cos2pi(r: &Rational) -> Option<Rational> {
    let f = frac(r);
    let table = [
        (rat(0, 1), rat(1, 1)),
        (rat(1, 6), rat(1, 2)),
        (rat(1, 4), rat(0, 1)),
        (rat(1, 3), rat(-1, 2)),
        (rat(1, 2), rat(-1, 1)),
        (rat(2, 3), rat(-1, 2)),
        (rat(3, 4), rat(0, 1)),
        (rat(5, 6), rat(1, 2)),
    ];
    table.into_iter().find(|(a, _)| *a == f).map(|(_, c)| c)
}

impl Expr {
    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn constant(c: Rational) -> Self {
        Expr::Const(c)
    }

    /// `-cos(2πx)`, the standard test observable on the circle.
    pub fn neg_cos() -> Self {
        Expr::Neg(Box::new(Expr::Cos2Pi(Box::new(Expr::Var(0)))))
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            Expr::Neg(a) | Expr::Cos2Pi(a) | Expr::Sin2Pi(a) | Expr::Abs(a) => a.max_var(),
        }
    }

    /// Exact where the arithmetic allows, float otherwise.
    pub fn eval(&self, coords: &[Rational]) -> Value {
        match self {
            Expr::Var(i) => Value::Exact(coords[*i].clone()),
            Expr::Const(c) => Value::Exact(c.clone()),
            Expr::Add(a, b) => a.eval(coords) + b.eval(coords),
            Expr::Sub(a, b) => a.eval(coords) - b.eval(coords),
            Expr::Mul(a, b) => a.eval(coords) * b.eval(coords),
            Expr::Neg(a) => -a.eval(coords),
            Expr::Abs(a) => a.eval(coords).abs(),
            Expr::Cos2Pi(a) => match a.eval(coords) {
                Value::Exact(r) => match exact_cos2pi(&r) {
                    Some(c) => Value::Exact(c),
                    None => Value::Approx((std::f64::consts::TAU * to_f64(&frac(&r))).cos()),
                },
                Value::Approx(x) => Value::Approx((std::f64::consts::TAU * x).cos()),
            },
            Expr::Sin2Pi(a) => match a.eval(coords) {
                // sin(2πr) = cos(2π(r - 1/4)).
                Value::Exact(r) => match exact_cos2pi(&(&r - rat(1, 4))) {
                    Some(c) => Value::Exact(c),
                    None => Value::Approx((std::f64::consts::TAU * to_f64(&frac(&r))).sin()),
                },
                Value::Approx(x) => Value::Approx((std::f64::consts::TAU * x).sin()),
            },
        }
    }

    pub fn eval_f64(&self, coords: &[f64]) -> f64 {
        match self {
            Expr::Var(i) => coords[*i],
            Expr::Const(c) => to_f64(c),
            Expr::Add(a, b) => a.eval_f64(coords) + b.eval_f64(coords),
            Expr::Sub(a, b) => a.eval_f64(coords) - b.eval_f64(coords),
            Expr::Mul(a, b) => a.eval_f64(coords) * b.eval_f64(coords),
            Expr::Neg(a) => -a.eval_f64(coords),
            Expr::Abs(a) => a.eval_f64(coords).abs(),
            Expr::Cos2Pi(a) => (std::f64::consts::TAU * a.eval_f64(coords)).cos(),
            Expr::Sin2Pi(a) => (std::f64::consts::TAU * a.eval_f64(coords)).sin(),
        }
    }

    /// `(B, D)` with `|e| <= B` on `[0,1]^d` and `D` bounding the sum of the
    /// absolute partial derivatives (a Lipschitz bound for the max metric).
    pub fn symbolic_bounds(&self) -> (f64, f64) {
        match self {
            Expr::Var(_) => (1.0, 1.0),
            Expr::Const(c) => (to_f64(c).abs(), 0.0),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let ((ba, da), (bb, db)) = (a.symbolic_bounds(), b.symbolic_bounds());
                (ba + bb, da + db)
            }
            Expr::Mul(a, b) => {
                let ((ba, da), (bb, db)) = (a.symbolic_bounds(), b.symbolic_bounds());
                (ba * bb, da * bb + ba * db)
            }
            Expr::Neg(a) | Expr::Abs(a) => a.symbolic_bounds(),
            Expr::Cos2Pi(a) | Expr::Sin2Pi(a) => (1.0, std::f64::consts::TAU * a.symbolic_bounds().1),
        }
    }

    pub fn parse(s: &str) -> Result<Expr> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(0) => f.write_str("x"),
            Expr::Var(1) => f.write_str("y"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Const(c) if c.is_negative() => write!(f, "({})", format_rational(c)),
            Expr::Const(c) => f.write_str(&format_rational(c)),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a} * {b}"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Cos2Pi(a) => write!(f, "cos2pi({a})"),
            Expr::Sin2Pi(a) => write!(f, "sin2pi({a})"),
            Expr::Abs(a) => write!(f, "abs({a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!(
            "expression {:?} at offset {}: {msg}",
            String::from_utf8_lossy(self.src),
            self.pos
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match name {
                    "x" => Ok(Expr::Var(0)),
                    "y" => Ok(Expr::Var(1)),
                    "cos2pi" | "sin2pi" | "abs" => {
                        self.expect(b'(')?;
                        let arg = Box::new(self.expr()?);
                        self.expect(b')')?;
                        Ok(match name {
                            "cos2pi" => Expr::Cos2Pi(arg),
                            "sin2pi" => Expr::Sin2Pi(arg),
                            _ => Expr::Abs(arg),
                        })
                    }
                    _ => Err(self.err(&format!("unknown identifier {name:?}"))),
                }
            }
            _ => Err(self.err("expected a term")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && (p.src[p.pos].is_ascii_digit() || p.src[p.pos] == b'.') {
                p.pos += 1;
            }
        };
        digits(self);
        // A '/' directly followed by a digit continues a rational literal.
        if self.pos + 1 < self.src.len()
            && self.src[self.pos] == b'/'
            && self.src[self.pos + 1].is_ascii_digit()
        {
            self.pos += 1;
            digits(self);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(Expr::Const(parse_rational(text)?))
    }
}
