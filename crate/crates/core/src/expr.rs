//! Expression trees for user-supplied scalar functions.
//!
//! Profiles and immersion components can be given on the command line as
//! strings like `"2+0.5*sin(r)"`. The parser supports `+ - * / ^`, unary
//! minus, parentheses, the constant `pi`, and the functions
//! `sin cos sinh cosh exp ln`. Trees differentiate symbolically, so custom
//! profiles get exact derivatives in closed-form mode.

use crate::error::{GeoError, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Ln,
}

impl Func {
    fn eval(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Fun(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    // Smart constructors fold constants so derivative trees stay small.
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(0.0), None) => b,
            (None, Some(0.0)) => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (None, Some(0.0)) => a,
            (Some(0.0), None) => Expr::neg(b),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(0.0), None) | (None, Some(0.0)) => Expr::Const(0.0),
            (Some(1.0), None) => b,
            (None, Some(1.0)) => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x / y),
            (Some(0.0), None) => Expr::Const(0.0),
            (None, Some(1.0)) => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x.powf(y)),
            (None, Some(1.0)) => a,
            _ => Expr::Pow(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a.as_const() {
            Some(x) => Expr::Const(-x),
            None => Expr::Neg(Box::new(a)),
        }
    }

    pub fn fun(f: Func, a: Expr) -> Expr {
        match a.as_const() {
            Some(x) => Expr::Const(f.eval(x)),
            None => Expr::Fun(f, Box::new(a)),
        }
    }

    pub fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => vars[*i],
            Expr::Add(a, b) => a.eval(vars) + b.eval(vars),
            Expr::Sub(a, b) => a.eval(vars) - b.eval(vars),
            Expr::Mul(a, b) => a.eval(vars) * b.eval(vars),
            Expr::Div(a, b) => a.eval(vars) / b.eval(vars),
            Expr::Pow(a, b) => a.eval(vars).powf(b.eval(vars)),
            Expr::Neg(a) => -a.eval(vars),
            Expr::Fun(f, a) => f.eval(a.eval(vars)),
        }
    }

    /// Symbolic partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(j) => Expr::Const(if *j == i { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => Expr::add(a.diff(i), b.diff(i)),
            Expr::Sub(a, b) => Expr::sub(a.diff(i), b.diff(i)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(i), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(i)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.diff(i), (**b).clone()),
                    Expr::mul((**a).clone(), b.diff(i)),
                ),
                Expr::mul((**b).clone(), (**b).clone()),
            ),
            Expr::Pow(a, b) => {
                if let Some(n) = b.as_const() {
                    // n * a^(n-1) * a'
                    Expr::mul(
                        Expr::mul(
                            Expr::Const(n),
                            Expr::pow((**a).clone(), Expr::Const(n - 1.0)),
                        ),
                        a.diff(i),
                    )
                } else {
                    // a^b * (b' ln a + b a'/a)
                    Expr::mul(
                        self.clone(),
                        Expr::add(
                            Expr::mul(b.diff(i), Expr::fun(Func::Ln, (**a).clone())),
                            Expr::div(Expr::mul((**b).clone(), a.diff(i)), (**a).clone()),
                        ),
                    )
                }
            }
            Expr::Neg(a) => Expr::neg(a.diff(i)),
            Expr::Fun(f, a) => {
                let inner = a.diff(i);
                let outer = match f {
                    Func::Sin => Expr::fun(Func::Cos, (**a).clone()),
                    Func::Cos => Expr::neg(Expr::fun(Func::Sin, (**a).clone())),
                    Func::Sinh => Expr::fun(Func::Cosh, (**a).clone()),
                    Func::Cosh => Expr::fun(Func::Sinh, (**a).clone()),
                    Func::Exp => self.clone(),
                    Func::Ln => Expr::div(Expr::Const(1.0), (**a).clone()),
                };
                Expr::mul(outer, inner)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Fun(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}

/// Parse `src` over the given variable names (e.g. `["r"]` or
/// `["u1","u2","u3"]`).
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        vars,
        src,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(GeoError::Parse(format!(
            "trailing input at token {} in `{}`",
            p.pos, src
        )));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| GeoError::Parse(format!("bad number `{text}` in `{src}`")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(GeoError::Parse(format!(
                    "unexpected character `{other}` in `{src}`"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            // right-associative; exponent may carry unary minus
            let exp = self.unary()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(GeoError::Parse(format!("missing `)` in `{}`", self.src))),
                }
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "sinh" => Some(Func::Sinh),
                    "cosh" => Some(Func::Cosh),
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::Ln),
                    _ => None,
                };
                if let Some(f) = func {
                    match self.bump() {
                        Some(Tok::LParen) => {}
                        _ => {
                            return Err(GeoError::Parse(format!(
                                "`{name}` needs parentheses in `{}`",
                                self.src
                            )))
                        }
                    }
                    let arg = self.expr()?;
                    match self.bump() {
                        Some(Tok::RParen) => Ok(Expr::fun(f, arg)),
                        _ => Err(GeoError::Parse(format!("missing `)` in `{}`", self.src))),
                    }
                } else if name == "pi" {
                    Ok(Expr::Const(std::f64::consts::PI))
                } else if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(Expr::Var(i))
                } else {
                    Err(GeoError::Parse(format!(
                        "unknown identifier `{name}` in `{}` (variables: {:?})",
                        self.src, self.vars
                    )))
                }
            }
            other => Err(GeoError::Parse(format!(
                "unexpected token {:?} in `{}`",
                other, self.src
            ))),
        }
    }
}
