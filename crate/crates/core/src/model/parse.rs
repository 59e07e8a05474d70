//! Text format for Weierstrass models.
//!
//! ```text
//! eps = 0.001
//! f = -3*s^2
//! g = 2*s^3 - s^3 + eps   # comments run to end of line
//! ```
//!
//! Statements end at `;` or a newline. `s` is the base coordinate, literals may
//! carry an `i` suffix (`2.5i`, `1e-3i`), and any other name is a parameter that
//! must be bound to a constant expression somewhere in the file or by an override.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Scalar, C};
use num_complex::Complex;
use std::collections::BTreeMap;

const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, imag: bool, integral: Option<u32> },
    Ident(String),
    Op(char),
    Sep,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, column, message: message.into() })
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start_col = col;
        match c {
            '\n' => {
                out.push(Token { tok: Tok::Sep, line, column: col });
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ';' => out.push(Token { tok: Tok::Sep, line, column: col }),
            ' ' | '\t' | '\r' => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '+' | '-' | '*' | '^' | '(' | ')' | '=' | '/' => out.push(Token { tok: Tok::Op(c), line, column: col }),
            d if d.is_ascii_digit() || d == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text: String = chars[i..j].iter().collect();
                let value: f64 = match text.parse() {
                    Ok(v) => v,
                    Err(_) => return err(line, start_col, format!("malformed number '{text}'")),
                };
                let integral = if text.chars().all(|c| c.is_ascii_digit()) { text.parse::<u32>().ok() } else { None };
                let imag = j < chars.len() && chars[j] == 'i' && !chars.get(j + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_');
                if imag {
                    j += 1;
                }
                col += j - i;
                i = j;
                out.push(Token { tok: Tok::Num { value, imag, integral }, line, column: start_col });
                continue;
            }
            a if a.is_alphabetic() || a == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                col += j - i;
                i = j;
                out.push(Token { tok: Tok::Ident(name), line, column: start_col });
                continue;
            }
            other => return err(line, col, format!("unexpected character '{other}'")),
        }
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Sep, line, column: col });
    Ok(out)
}

#[derive(Debug, Clone)]
enum Expr {
    Num(Complex<f64>),
    S,
    Param { name: String, line: usize, column: usize },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    let t = self.peek();
                    return err(t.line, t.column, "division is not supported; write coefficients as literals");
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        let caret = self.bump();
        let t = self.bump();
        match t.tok {
            Tok::Num { imag: false, integral: Some(k), .. } if k <= MAX_EXPONENT => Ok(Expr::Pow(Box::new(base), k)),
            Tok::Num { imag: false, integral: Some(_), .. } => err(t.line, t.column, format!("exponent exceeds {MAX_EXPONENT}")),
            Tok::Num { .. } => err(t.line, t.column, "exponent must be a non-negative integer literal"),
            Tok::Op('-') => err(t.line, t.column, "negative exponents are not supported"),
            _ => err(caret.line, caret.column, "missing exponent after '^'"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.bump();
        match t.tok {
            Tok::Num { value, imag, .. } => Ok(Expr::Num(if imag { Complex::new(0.0, value) } else { Complex::new(value, 0.0) })),
            Tok::Ident(name) if name == "s" => Ok(Expr::S),
            Tok::Ident(name) => Ok(Expr::Param { name, line: t.line, column: t.column }),
            Tok::Op('(') => {
                let e = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::Op(')') {
                    return err(close.line, close.column, "expected ')'");
                }
                Ok(e)
            }
            Tok::Sep => err(t.line, t.column, "unexpected end of expression"),
            Tok::Op(c) => err(t.line, t.column, format!("unexpected '{c}'")),
        }
    }
}

struct Statement {
    name: String,
    expr: Expr,
    line: usize,
    column: usize,
}

fn statements(src: &str) -> Result<Vec<Statement>> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut out = Vec::new();
    while p.pos < p.toks.len() {
        let t = p.bump();
        match t.tok {
            Tok::Sep => continue,
            Tok::Ident(name) => {
                let eq = p.bump();
                if eq.tok != Tok::Op('=') {
                    return err(eq.line, eq.column, format!("expected '=' after '{name}'"));
                }
                if name == "s" {
                    return err(t.line, t.column, "'s' is the base coordinate and cannot be assigned");
                }
                let expr = p.expr()?;
                let end = p.peek().clone();
                if end.tok != Tok::Sep {
                    return err(end.line, end.column, "expected ';' or end of line");
                }
                if out.iter().any(|s: &Statement| s.name == name) {
                    return err(t.line, t.column, format!("'{name}' is defined twice"));
                }
                out.push(Statement { name, expr, line: t.line, column: t.column });
            }
            _ => return err(t.line, t.column, "expected a statement of the form 'name = expression'"),
        }
    }
    Ok(out)
}

struct Env<'a> {
    defs: &'a [Statement],
    overrides: &'a BTreeMap<String, Complex<f64>>,
    bound: BTreeMap<String, Complex<f64>>,
    stack: Vec<String>,
}

impl Env<'_> {
    fn param(&mut self, name: &str, line: usize, column: usize) -> Result<Complex<f64>> {
        if let Some(v) = self.overrides.get(name).or_else(|| self.bound.get(name)).copied() {
            self.bound.insert(name.to_string(), v);
            return Ok(v);
        }
        if name == "f" || name == "g" {
            return err(line, column, format!("'{name}' cannot be used inside an expression"));
        }
        let Some(def) = self.defs.iter().find(|d| d.name == name) else {
            return err(line, column, format!("unbound parameter '{name}'"));
        };
        if self.stack.iter().any(|n| n == name) {
            return err(line, column, format!("parameter '{name}' is defined in terms of itself"));
        }
        self.stack.push(name.to_string());
        let p = self.eval(&def.expr)?;
        self.stack.pop();
        if p.degree().unwrap_or(0) > 0 {
            return err(def.line, def.column, format!("parameter '{name}' must not depend on s"));
        }
        let v = p.coeff(0);
        self.bound.insert(name.to_string(), v);
        Ok(v)
    }

    fn eval(&mut self, e: &Expr) -> Result<Poly<f64>> {
        Ok(match e {
            Expr::Num(c) => Poly::constant(*c),
            Expr::S => Poly::monomial(Complex::new(1.0, 0.0), 1),
            Expr::Param { name, line, column } => Poly::constant(self.param(name, *line, *column)?),
            Expr::Add(a, b) => &self.eval(a)? + &self.eval(b)?,
            Expr::Sub(a, b) => &self.eval(a)? - &self.eval(b)?,
            Expr::Mul(a, b) => &self.eval(a)? * &self.eval(b)?,
            Expr::Neg(a) => -&self.eval(a)?,
            Expr::Pow(a, k) => self.eval(a)?.pow(*k),
        })
    }
}

/// Result of parsing: the two polynomials plus every parameter that was bound.
pub struct ParsedModel<T: Scalar> {
    pub f: Poly<T>,
    pub g: Poly<T>,
    pub params: BTreeMap<String, C<T>>,
}

pub fn parse_polys<T: Scalar>(src: &str, overrides: &BTreeMap<String, Complex<f64>>) -> Result<ParsedModel<T>> {
    let defs = statements(src)?;
    let mut env = Env { defs: &defs, overrides, bound: BTreeMap::new(), stack: vec![] };
    let mut get = |key: &str| -> Result<Poly<f64>> {
        match defs.iter().find(|d| d.name == key) {
            Some(d) => env.eval(&d.expr),
            None => Err(Error::Parse { line: 1, column: 1, message: format!("missing definition of '{key}'") }),
        }
    };
    let f = get("f")?;
    let g = get("g")?;
    // Unused definitions still have to be well formed.
    for d in defs.iter().filter(|d| d.name != "f" && d.name != "g") {
        env.param(&d.name, d.line, d.column)?;
    }
    for name in overrides.keys() {
        if !env.bound.contains_key(name) {
            return Err(Error::Config(format!("override for unknown parameter '{name}'")));
        }
    }
    let conv = |z: Complex<f64>| C::new(T::lit(z.re), T::lit(z.im));
    Ok(ParsedModel { f: f.map(conv), g: g.map(conv), params: env.bound.into_iter().map(|(k, v)| (k, conv(v))).collect() })
}

/// A constant expression such as `0.01`, `-2.5i` or `1+2i`.
pub fn parse_constant(text: &str) -> Result<Complex<f64>> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    let end = p.peek().clone();
    if end.tok != Tok::Sep || p.pos + 1 < p.toks.len() {
        return err(end.line, end.column, "trailing input after constant");
    }
    let empty = BTreeMap::new();
    let mut env = Env { defs: &[], overrides: &empty, bound: BTreeMap::new(), stack: vec![] };
    let v = env.eval(&e)?;
    if v.degree().unwrap_or(0) > 0 {
        return err(1, 1, "constant must not depend on s");
    }
    Ok(v.coeff(0))
}
