//! Text grammar shared by every printer in the crate:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | identifier | '(' expr ')'
//! ```

use std::collections::BTreeMap;

use super::{Coeff, Field, Int, Param, Poly, Rat, RatFun};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Int),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(Int),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Num(text.parse().unwrap())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|&(_, c)| c).collect())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |&(p, _)| p)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                let e: i64 =
                    n.try_into().map_err(|_| Error::Parse { pos: self.pos(), msg: "exponent too large".into() })?;
                Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
            }
            _ => self.err("expected integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(s)) => {
                self.i += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let toks = tokenize(s)?;
    let mut p = Parser { toks, i: 0, end: s.len() };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Evaluation target for parsed expressions.
pub trait Algebra: Sized + Clone {
    fn from_int(n: &Int) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self>;
    fn unit() -> Self {
        Self::from_int(&Int::from(1))
    }
    fn pow(&self, e: i64) -> Result<Self> {
        let mut acc = Self::unit();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(self);
        }
        if e < 0 {
            Self::unit().div(&acc)
        } else {
            Ok(acc)
        }
    }
}

macro_rules! algebra_via_field {
    ($t:ty) => {
        impl Algebra for $t {
            fn from_int(n: &Int) -> Self {
                <$t as Field>::from_rat(Rat::from_integer(n.clone()))
            }
            fn add(&self, rhs: &Self) -> Self {
                self.plus(rhs)
            }
            fn sub(&self, rhs: &Self) -> Self {
                self.minus(rhs)
            }
            fn mul(&self, rhs: &Self) -> Self {
                self.times(rhs)
            }
            fn neg(&self) -> Self {
                self.negated()
            }
            fn div(&self, rhs: &Self) -> Result<Self> {
                Ok(self.times(&rhs.inverse().ok_or(Error::DivisionByZero)?))
            }
        }
    };
}

algebra_via_field!(Rat);
algebra_via_field!(Coeff);
algebra_via_field!(RatFun);

/// Evaluates `e`, resolving identifiers through `var`.
pub fn eval<A: Algebra>(e: &Expr, var: &dyn Fn(&str) -> Result<A>) -> Result<A> {
    Ok(match e {
        Expr::Num(n) => A::from_int(n),
        Expr::Var(s) => var(s)?,
        Expr::Neg(a) => eval(a, var)?.neg(),
        Expr::Add(a, b) => eval(a, var)?.add(&eval(b, var)?),
        Expr::Sub(a, b) => eval(a, var)?.sub(&eval(b, var)?),
        Expr::Mul(a, b) => eval(a, var)?.mul(&eval(b, var)?),
        Expr::Div(a, b) => eval(a, var)?.div(&eval(b, var)?)?,
        Expr::Pow(a, k) => eval(a, var)?.pow(*k)?,
    })
}

fn unknown<T>(name: &str) -> Result<T> {
    Err(Error::Parse { pos: 0, msg: format!("unknown identifier '{name}'") })
}

/// Parses an element of ℚ(params); every identifier must be declared.
pub fn parse_coeff(s: &str, params: &[&str]) -> Result<Coeff> {
    let e = parse_expr(s)?;
    eval(&e, &|name| {
        if params.contains(&name) {
            Ok(Coeff::param(Param::new(name)))
        } else {
            unknown(name)
        }
    })
}

/// Parses a rational function in `var` with declared parameters.
pub fn parse_ratfun(s: &str, var: &str, params: &[&str]) -> Result<RatFun> {
    let e = parse_expr(s)?;
    eval(&e, &|name| {
        if name == var {
            Ok(RatFun::x())
        } else if params.contains(&name) {
            Ok(RatFun::param(Param::new(name)))
        } else {
            unknown(name)
        }
    })
}

/// Parses a polynomial in `var`; fails on a nontrivial denominator.
pub fn parse_poly(s: &str, var: &str, params: &[&str]) -> Result<Poly> {
    let f = parse_ratfun(s, var, params)?;
    if !f.is_polynomial() {
        return Err(Error::Input(format!("not a polynomial in {var}: {s}")));
    }
    Ok(f.num().clone())
}

/// Substitutes values given as `name = rational` into declared params.
pub fn assignment(pairs: &[(&str, Rat)]) -> BTreeMap<Param, Rat> {
    pairs.iter().map(|(n, v)| (Param::new(n), v.clone())).collect()
}
