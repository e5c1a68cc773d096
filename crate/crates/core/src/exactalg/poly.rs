use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::coeff::ring_ops;
use super::{Coeff, Field, Param, Rat};
use crate::Result;

/// Dense univariate polynomial over [`Coeff`]. The main variable is
/// anonymous; its name is chosen when printing.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Coeff::one())
    }

    /// The main variable.
    pub fn x() -> Self {
        Poly::monomial(Coeff::one(), 1)
    }

    pub fn constant(c: Coeff) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn monomial(c: Coeff, k: usize) -> Self {
        let mut v = vec![Coeff::zero(); k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<Coeff>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_rats(v: &[Rat]) -> Self {
        Poly::from_coeffs(v.iter().cloned().map(Coeff::Rat).collect())
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Poly::from_coeffs(v.iter().map(|&n| Coeff::from(n)).collect())
    }

    /// `x - a`.
    pub fn linear(a: Coeff) -> Self {
        Poly::from_coeffs(vec![a.negated(), Coeff::one()])
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Coeff {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer with `None` for zero.
    pub fn deg_i(&self) -> Option<i64> {
        self.degree().map(|d| d as i64)
    }

    pub fn lc(&self) -> Coeff {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_rat().is_some())
    }

    pub fn to_rats(&self) -> Option<Vec<Rat>> {
        self.coeffs.iter().map(|c| c.as_rat().cloned()).collect()
    }

    pub fn params(&self) -> Vec<Param> {
        let mut v: Vec<Param> = self.coeffs.iter().flat_map(|c| c.params()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn scale(&self, s: &Coeff) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|c| c.times(s)).collect())
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Coeff::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.lc().is_one() {
            return self.clone();
        }
        self.scale(&self.lc().inverse().unwrap())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        if d.is_constant() {
            return (self.scale(&d.coeffs[0].inverse().unwrap()), Poly::zero());
        }
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = d.lc().inverse().unwrap();
        let mut q = vec![Coeff::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].times(&inv);
            if c.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i].minus(&c.times(dc));
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Exact quotient, `None` if the division leaves a remainder.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if let (Some(x), Some(y)) = (a.to_rats(), b.to_rats()) {
            if super::modp::certainly_coprime(&x, &y) {
                return Poly::one();
            }
        }
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s·a + t·b = g`, `g` monic.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inverse().unwrap();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.times(&Coeff::from(k as i64))).collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Coeff) -> Coeff {
        let mut acc = Coeff::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> Option<Rat> {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.as_rat()?;
        }
        Some(acc)
    }

    /// `self(x + s)`.
    pub fn taylor_shift(&self, s: &Coeff) -> Poly {
        let lin = Poly::from_coeffs(vec![s.clone(), Coeff::one()]);
        self.compose(&lin)
    }

    /// `self(q(x))`.
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Yun's squarefree decomposition: monic `(factor, multiplicity)` pairs,
    /// multiplicities increasing, constant content dropped.
    pub fn squarefree(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = Poly::gcd(&f, &df);
        let mut b = f.div_exact(&a0).unwrap();
        let mut c = df.div_exact(&a0).unwrap();
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while !b.is_constant() {
            let a = Poly::gcd(&b, &d);
            if !a.is_constant() {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a).unwrap();
            c = d.div_exact(&a).unwrap();
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn specialize(&self, assignment: &BTreeMap<Param, Rat>) -> Result<Poly> {
        Ok(Poly::from_coeffs(self.coeffs.iter().map(|c| c.specialize(assignment)).collect::<Result<_>>()?))
    }

    /// Printed form in the given variable name.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative_rat();
            let a = if neg { c.negated() } else { c.clone() };
            if first {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let cs = if a.as_rat().is_some() { a.render() } else { format!("({})", a.render()) };
            if k == 0 {
                s.push_str(&cs);
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{cs}*{mono}"));
            }
        }
        s
    }

    /// Number of printed terms.
    pub(crate) fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

impl Poly {
    pub fn plus(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k).plus(&rhs.coeff(k))).collect())
    }
    pub fn minus(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k).minus(&rhs.coeff(k))).collect())
    }
    pub fn times(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Coeff::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] = v[i + j].plus(&a.times(b));
                }
            }
        }
        Poly::from_coeffs(v)
    }
    pub fn negated(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.negated()).collect() }
    }
}

ring_ops!(Poly);

impl From<Coeff> for Poly {
    fn from(c: Coeff) -> Self {
        Poly::constant(c)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}
