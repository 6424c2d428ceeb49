//! Small expression language for user surface profiles, with symbolic
//! differentiation.
//!
//! Grammar: numbers, the variable (`t`, `s` or `x`), constants `pi` and `e`,
//! `+ - * / ^` (exponent must be constant), unary minus, parentheses and the
//! functions `sin`, `cos`, `exp`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, f64),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

use Expr::*;

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Config(format!(
                "unexpected token {:?} in expression '{src}'",
                p.tokens[p.pos]
            )));
        }
        Ok(e.simplify())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Const(c) => *c,
            Var => t,
            Add(a, c) => a.eval(t) + c.eval(t),
            Sub(a, c) => a.eval(t) - c.eval(t),
            Mul(a, c) => a.eval(t) * c.eval(t),
            Div(a, c) => a.eval(t) / c.eval(t),
            Neg(a) => -a.eval(t),
            Pow(a, p) => {
                let x = a.eval(t);
                if p.fract() == 0.0 && p.abs() < 64.0 {
                    x.powi(*p as i32)
                } else {
                    x.powf(*p)
                }
            }
            Sin(a) => a.eval(t).sin(),
            Cos(a) => a.eval(t).cos(),
            Exp(a) => a.eval(t).exp(),
        }
    }

    pub fn derivative(&self) -> Expr {
        let d = match self {
            Const(_) => Const(0.0),
            Var => Const(1.0),
            Add(a, c) => Add(b(a.derivative()), b(c.derivative())),
            Sub(a, c) => Sub(b(a.derivative()), b(c.derivative())),
            Mul(a, c) => Add(
                b(Mul(b(a.derivative()), c.clone())),
                b(Mul(a.clone(), b(c.derivative()))),
            ),
            Div(a, c) => Div(
                b(Sub(
                    b(Mul(b(a.derivative()), c.clone())),
                    b(Mul(a.clone(), b(c.derivative()))),
                )),
                b(Pow(c.clone(), 2.0)),
            ),
            Neg(a) => Neg(b(a.derivative())),
            Pow(a, p) => Mul(
                b(Mul(b(Const(*p)), b(Pow(a.clone(), p - 1.0)))),
                b(a.derivative()),
            ),
            Sin(a) => Mul(b(Cos(a.clone())), b(a.derivative())),
            Cos(a) => Neg(b(Mul(b(Sin(a.clone())), b(a.derivative())))),
            Exp(a) => Mul(b(Exp(a.clone())), b(a.derivative())),
        };
        d.simplify()
    }

    fn is_const(&self, v: f64) -> bool {
        matches!(self, Const(c) if *c == v)
    }

    pub fn simplify(&self) -> Expr {
        match self {
            Const(_) | Var => self.clone(),
            Add(a, c) => {
                let (a, c) = (a.simplify(), c.simplify());
                match (&a, &c) {
                    (Const(x), Const(y)) => Const(x + y),
                    _ if a.is_const(0.0) => c,
                    _ if c.is_const(0.0) => a,
                    _ => Add(b(a), b(c)),
                }
            }
            Sub(a, c) => {
                let (a, c) = (a.simplify(), c.simplify());
                match (&a, &c) {
                    (Const(x), Const(y)) => Const(x - y),
                    _ if c.is_const(0.0) => a,
                    _ if a.is_const(0.0) => Neg(b(c)).simplify(),
                    _ => Sub(b(a), b(c)),
                }
            }
            Mul(a, c) => {
                let (a, c) = (a.simplify(), c.simplify());
                match (&a, &c) {
                    (Const(x), Const(y)) => Const(x * y),
                    _ if a.is_const(0.0) || c.is_const(0.0) => Const(0.0),
                    _ if a.is_const(1.0) => c,
                    _ if c.is_const(1.0) => a,
                    _ => Mul(b(a), b(c)),
                }
            }
            Div(a, c) => {
                let (a, c) = (a.simplify(), c.simplify());
                match (&a, &c) {
                    (Const(x), Const(y)) => Const(x / y),
                    _ if a.is_const(0.0) => Const(0.0),
                    _ if c.is_const(1.0) => a,
                    _ => Div(b(a), b(c)),
                }
            }
            Neg(a) => match a.simplify() {
                Const(x) => Const(-x),
                Neg(inner) => *inner,
                s => Neg(b(s)),
            },
            Pow(a, p) => {
                let a = a.simplify();
                match (&a, *p) {
                    (_, 0.0) => Const(1.0),
                    (_, 1.0) => a,
                    (Const(x), p) => Const(x.powf(p)),
                    _ => Pow(b(a), *p),
                }
            }
            Sin(a) => match a.simplify() {
                Const(x) => Const(x.sin()),
                s => Sin(b(s)),
            },
            Cos(a) => match a.simplify() {
                Const(x) => Const(x.cos()),
                s => Cos(b(s)),
            },
            Exp(a) => match a.simplify() {
                Const(x) => Const(x.exp()),
                s => Exp(b(s)),
            },
        }
    }

    fn has_var(&self) -> bool {
        match self {
            Const(_) => false,
            Var => true,
            Add(a, c) | Sub(a, c) | Mul(a, c) | Div(a, c) => a.has_var() || c.has_var(),
            Neg(a) | Pow(a, _) | Sin(a) | Cos(a) | Exp(a) => a.has_var(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(c) => write!(f, "{c}"),
            Var => write!(f, "t"),
            Add(a, c) => write!(f, "({a} + {c})"),
            Sub(a, c) => write!(f, "({a} - {c})"),
            Mul(a, c) => write!(f, "({a} * {c})"),
            Div(a, c) => write!(f, "({a} / {c})"),
            Neg(a) => write!(f, "(-{a})"),
            Pow(a, p) => write!(f, "({a}^{p})"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{text}' in expression")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Config(format!("unexpected character '{c}' in expression")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Add(b(lhs), b(self.term()?));
            } else if self.eat('-') {
                lhs = Sub(b(lhs), b(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Mul(b(lhs), b(self.unary()?));
            } else if self.eat('/') {
                lhs = Div(b(lhs), b(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Neg(b(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let ex = self.unary()?.simplify();
            if ex.has_var() {
                return Err(Error::Config("exponents must be constant".into()));
            }
            return Ok(Pow(b(base), ex.eval(0.0)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Const(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Config("missing ')' in expression".into()));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "t" | "s" | "x" => Ok(Var),
                    "pi" => Ok(Const(std::f64::consts::PI)),
                    "e" => Ok(Const(std::f64::consts::E)),
                    "sin" | "cos" | "exp" => {
                        if !self.eat('(') {
                            return Err(Error::Config(format!("expected '(' after {name}")));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return Err(Error::Config(format!("missing ')' after {name} argument")));
                        }
                        Ok(match name.as_str() {
                            "sin" => Sin(b(arg)),
                            "cos" => Cos(b(arg)),
                            _ => Exp(b(arg)),
                        })
                    }
                    other => Err(Error::Config(format!("unknown identifier '{other}' in expression"))),
                }
            }
            Some(t) => Err(Error::Config(format!("unexpected token {t:?} in expression"))),
            None => Err(Error::Config("unexpected end of expression".into())),
        }
    }
}
