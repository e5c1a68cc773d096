use std::collections::BTreeMap;
use std::fmt;

use crate::exactalg::parse::Algebra;
use crate::exactalg::{Field, Int, Rat, RatFun};
use crate::{Error, Result};

/// Jet coordinate `x_coord^(order)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub coord: usize,
    pub order: usize,
}

impl JetVar {
    pub fn new(coord: usize, order: usize) -> Self {
        JetVar { coord, order }
    }

    pub fn render(&self, names: &[String]) -> String {
        let name = names.get(self.coord).map_or_else(|| format!("x{}", self.coord), |s| s.clone());
        if self.order == 0 {
            name
        } else {
            format!("{name}^({})", self.order)
        }
    }
}

/// Monomial in jet variables, sorted by variable, exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct JetMono(Vec<(JetVar, u32)>);

impl JetMono {
    pub fn one() -> Self {
        JetMono(Vec::new())
    }

    pub fn var(v: JetVar) -> Self {
        JetMono(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(JetVar, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort();
        let mut out: Vec<(JetVar, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        JetMono(out)
    }

    pub fn factors(&self) -> &[(JetVar, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: JetVar) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |&(_, e)| e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Weighted degree, `x^(ℓ)` counting `ℓ`.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&(v, e)| v.order * e as usize).sum()
    }

    pub fn mul(&self, rhs: &JetMono) -> JetMono {
        JetMono::from_pairs(self.0.iter().chain(rhs.0.iter()).copied().collect())
    }

    /// `self / v`, assuming `v` divides.
    fn remove_one(&self, v: JetVar) -> JetMono {
        JetMono::from_pairs(self.0.iter().map(|&(w, e)| (w, if w == v { e - 1 } else { e })).collect())
    }

    /// Number of distinct orderings of the factors within each jet order:
    /// `Π_ℓ (Σ e)! / Π e!` over variables of order `ℓ`.
    pub fn multinomial(&self) -> Int {
        let mut out = Int::from(1);
        let mut by_order: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for &(v, e) in &self.0 {
            by_order.entry(v.order).or_default().push(e);
        }
        for es in by_order.values() {
            let total: u32 = es.iter().sum();
            out *= factorial(total);
            for &e in es {
                out /= factorial(e);
            }
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(v, e)| {
                let s = v.render(names);
                match (e, v.order) {
                    (1, _) => s,
                    (_, 0) => format!("{s}^{e}"),
                    _ => format!("({s})^{e}"),
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

pub(crate) fn factorial(n: u32) -> Int {
    (1..=n).fold(Int::from(1), |acc, k| acc * Int::from(k))
}

/// Polynomial in jet variables with rational-function coefficients in the
/// independent variable.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct JetPoly {
    terms: BTreeMap<JetMono, RatFun>,
}

impl JetPoly {
    pub fn zero() -> Self {
        JetPoly::default()
    }

    pub fn constant(c: RatFun) -> Self {
        JetPoly::term(JetMono::one(), c)
    }

    pub fn var(v: JetVar) -> Self {
        JetPoly::term(JetMono::var(v), RatFun::one())
    }

    pub fn term(m: JetMono, c: RatFun) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        JetPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JetMono, &RatFun)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &JetMono) -> RatFun {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn as_constant(&self) -> Option<RatFun> {
        match self.terms.len() {
            0 => Some(RatFun::zero()),
            1 => self.terms.get(&JetMono::one()).cloned(),
            _ => None,
        }
    }

    /// Variables actually occurring, ascending.
    pub fn vars(&self) -> Vec<JetVar> {
        let mut v: Vec<JetVar> = self.terms.keys().flat_map(|m| m.0.iter().map(|&(w, _)| w)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn max_order(&self) -> Option<usize> {
        self.vars().iter().map(|v| v.order).max()
    }

    /// `Some(w)` when every term has weighted degree `w`.
    pub fn homogeneous_weight(&self) -> Option<usize> {
        let mut ws = self.terms.keys().map(|m| m.weight());
        let w = ws.next()?;
        ws.all(|x| x == w).then_some(w)
    }

    fn insert_add(&mut self, m: JetMono, c: RatFun) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn plus(&self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn minus(&self, rhs: &JetPoly) -> JetPoly {
        self.plus(&rhs.negated())
    }

    pub fn negated(&self) -> JetPoly {
        JetPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &RatFun) -> JetPoly {
        if c.is_zero() {
            return JetPoly::zero();
        }
        JetPoly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn times(&self, rhs: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.insert_add(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> JetPoly {
        let mut acc = JetPoly::constant(RatFun::one());
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }

    /// `∂/∂v`.
    pub fn partial(&self, v: JetVar) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                out.insert_add(m.remove_one(v), c * &RatFun::from(e as i64));
            }
        }
        out
    }

    /// Derivative of the coefficients in the independent variable.
    pub fn coeff_derivative(&self) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            out.insert_add(m.clone(), c.derivative());
        }
        out
    }

    /// Total derivative `δ = Σ x_j^(m+1) ∂/∂x_j^(m)`; when `indep` is set,
    /// coefficients depend on `x_indep^(0)` and contribute
    /// `x_indep^(1)·∂_coeff`.
    pub fn total_derivative(&self, indep: Option<usize>) -> JetPoly {
        let mut out = JetPoly::zero();
        for v in self.vars() {
            let next = JetPoly::var(JetVar::new(v.coord, v.order + 1));
            out = out.plus(&self.partial(v).times(&next));
        }
        if let Some(i) = indep {
            let dc = self.coeff_derivative();
            if !dc.is_zero() {
                out = out.plus(&dc.times(&JetPoly::var(JetVar::new(i, 1))));
            }
        }
        out
    }

    /// Substitutes polynomials for variables; variables not in `map` stay.
    pub fn substitute(&self, map: &BTreeMap<JetVar, JetPoly>) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = JetPoly::constant(c.clone());
            let mut kept = Vec::new();
            for &(v, e) in &m.0 {
                match map.get(&v) {
                    Some(p) => acc = acc.times(&p.pow(e)),
                    None => kept.push((v, e)),
                }
            }
            out = out.plus(&acc.times(&JetPoly::term(JetMono::from_pairs(kept), RatFun::one())));
        }
        out
    }

    /// Drops every term containing a variable of `coord` with order ≥ 1.
    pub fn kill_coord_jets(&self, coord: usize) -> JetPoly {
        JetPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.0.iter().any(|(v, _)| v.coord == coord && v.order >= 1))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluates at floating point jet values and independent value `x`.
    pub fn eval_f64(&self, x: f64, value: &dyn Fn(JetVar) -> f64) -> Option<f64> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.eval_f64(x)?;
            for &(v, e) in &m.0 {
                t *= value(v).powi(e as i32);
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn render(&self, names: &[String], indep_name: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        // Descending weight, then descending monomial.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.weight().cmp(&a.0.weight()).then_with(|| b.0.cmp(a.0)));
        for (m, c) in terms {
            let neg = c.num().num_terms() == 1 && c.num().lc().is_negative_rat();
            let a = if neg { -c } else { c.clone() };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let cs = a.render(indep_name);
            let cs = if a.num().num_terms() > 1 && a.is_polynomial() && !m.is_one() { format!("({cs})") } else { cs };
            if m.is_one() {
                s.push_str(&cs);
            } else if a.is_one() {
                s.push_str(&m.render(names));
            } else {
                s.push_str(&format!("{cs}*{}", m.render(names)));
            }
        }
        s
    }
}

impl Algebra for JetPoly {
    fn from_int(n: &Int) -> Self {
        JetPoly::constant(RatFun::from_rat(Rat::from_integer(n.clone())))
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
        let c = rhs
            .as_constant()
            .ok_or_else(|| Error::Input("components must be polynomial in the dependent coordinates".into()))?;
        let inv = c.inverse().ok_or(Error::DivisionByZero)?;
        Ok(self.scale(&inv))
    }
}

impl fmt::Debug for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = Vec::new();
        f.write_str(&self.render(&names, "t"))
    }
}
