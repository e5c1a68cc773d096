use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{fmt_rat, Param, Rat};

/// Power product of parameters, stored as sorted `(param, exponent)` pairs
/// with positive exponents. Ordered degree-lexicographically, earlier
/// declared parameters being larger.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Param, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(p: Param) -> Self {
        Monomial(vec![(p, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, p: Param) -> u32 {
        self.0.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    pub fn factors(&self) -> &[(Param, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(p, a)), Some(&(q, b))) if p == q => {
                    out.push((p, a + b));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, a)), Some(&(q, _))) if p < q => {
                    out.push((p, a));
                    i += 1;
                }
                (Some(&(p, a)), None) => {
                    out.push((p, a));
                    i += 1;
                }
                (_, Some(&(q, b))) => {
                    out.push((q, b));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(p, a) in &self.0 {
            let b = match other.0.get(j) {
                Some(&(q, b)) if q == p => {
                    j += 1;
                    b
                }
                Some(&(q, _)) if q < p => return None,
                _ => 0,
            };
            match a.cmp(&b) {
                Ordering::Less => return None,
                Ordering::Equal => {}
                Ordering::Greater => out.push((p, a - b)),
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes `p`, returning its exponent and the remaining monomial.
    fn split_off(&self, p: Param) -> (u32, Monomial) {
        let e = self.exponent(p);
        let rest = self.0.iter().copied().filter(|&(q, _)| q != p).collect();
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            // Lex with the smallest param id as the most significant variable.
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.0.get(i), other.0.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(p, a)), Some(&(q, b))) => {
                        if p != q {
                            return if p < q { Ordering::Greater } else { Ordering::Less };
                        }
                        if a != b {
                            return a.cmp(&b);
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> =
            self.0.iter().map(|&(p, e)| if e == 1 { p.name() } else { format!("{}^{}", p.name(), e) }).collect();
        f.write_str(&parts.join("*"))
    }
}

/// Multivariate polynomial in parameters with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MPoly { terms }
    }

    pub fn var(p: Param) -> Self {
        MPoly::term(Rat::one(), Monomial::var(p))
    }

    pub fn term(c: Rat, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn lc(&self) -> Rat {
        self.leading().map_or_else(Rat::zero, |(_, c)| c.clone())
    }

    pub fn total_degree(&self) -> u32 {
        self.leading().map_or(0, |(m, _)| m.degree())
    }

    pub fn degree_in(&self, p: Param) -> u32 {
        self.terms.keys().map(|m| m.exponent(p)).max().unwrap_or(0)
    }

    pub fn params(&self) -> Vec<Param> {
        let mut v: Vec<Param> = self.terms.keys().flat_map(|m| m.factors().iter().map(|&(p, _)| p)).collect();
        v.sort();
        v.dedup();
        v
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Rat) -> MPoly {
        if s.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn mul(&self, rhs: &MPoly) -> MPoly {
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut out = MPoly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.leading()?;
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut r = self.clone();
        let mut q = MPoly::zero();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.checked_div(dm)?;
            let c = rc / dc;
            let t = MPoly::term(c.clone(), m.clone());
            r = r.sub(&t.mul(d));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> MPoly {
        match self.leading() {
            None => MPoly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Monic gcd via recursive content/primitive-part decomposition.
    pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.as_constant().is_some() || b.as_constant().is_some() {
            return MPoly::one();
        }
        if a == b {
            return a.monic();
        }
        let pa = a.params();
        let pb = b.params();
        // Main variable: smallest param occurring in either.
        let v = *pa.iter().chain(pb.iter()).min().unwrap();
        let ua = a.to_univariate(v);
        let ub = b.to_univariate(v);
        let ca = content(&ua);
        let cb = content(&ub);
        let c = MPoly::gcd(&ca, &cb);
        let g = prs_gcd(primitive(&ua, &ca), primitive(&ub, &cb));
        MPoly::from_univariate(&g, v).mul(&c).monic()
    }

    /// Coefficients in `v`, indexed by exponent.
    pub fn to_univariate(&self, v: Param) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_univariate(coeffs: &[MPoly], v: Param) -> MPoly {
        let mut out = MPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let pv = if e == 0 { Monomial::one() } else { Monomial(vec![(v, e as u32)]) };
            for (m, cc) in &c.terms {
                out.add_term(m.mul(&pv), cc.clone());
            }
        }
        out
    }

    /// Substitutes `p = value`.
    pub fn substitute(&self, p: Param, value: &Rat) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(p);
            let f = num_traits::pow::Pow::pow(value, e);
            out.add_term(rest, c * f);
        }
        out
    }

    /// Substitutes `p = value` where `value` is itself a polynomial.
    pub fn substitute_poly(&self, p: Param, value: &MPoly) -> MPoly {
        let u = self.to_univariate(p);
        let mut out = MPoly::zero();
        for c in u.iter().rev() {
            out = out.mul(value).add(c);
        }
        out
    }

    pub fn derivative(&self, p: Param) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(p);
            if e > 0 {
                let pv = if e == 1 { Monomial::one() } else { Monomial(vec![(p, e - 1)]) };
                out.add_term(rest.mul(&pv), c * Rat::from_integer(e.into()));
            }
        }
        out
    }

    /// Writes the polynomial; `wrap` adds parentheses around sums.
    pub(crate) fn render(&self, wrap: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&fmt_rat(&a));
            } else {
                if !a.is_one() {
                    s.push_str(&fmt_rat(&a));
                    s.push('*');
                }
                s.push_str(&format!("{m:?}"));
            }
        }
        if wrap && self.terms.len() > 1 {
            format!("({s})")
        } else {
            s
        }
    }
}

fn content(u: &[MPoly]) -> MPoly {
    let mut g = MPoly::zero();
    for c in u {
        g = MPoly::gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive(u: &[MPoly], c: &MPoly) -> Vec<MPoly> {
    u.iter().map(|x| x.div_exact(c).expect("content divides")).collect()
}

fn trim(u: &mut Vec<MPoly>) {
    while u.last().is_some_and(|c| c.is_zero()) {
        u.pop();
    }
}

fn prem(f: &[MPoly], g: &[MPoly]) -> Vec<MPoly> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let lc = g[dg].clone();
    trim(&mut r);
    while r.len() > dg {
        let k = r.len() - 1 - dg;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c = c.mul(&lc);
        }
        for (i, gc) in g.iter().enumerate() {
            r[i + k] = r[i + k].sub(&gc.mul(&lr));
        }
        trim(&mut r);
    }
    r
}

/// Primitive gcd of primitive univariate polynomials over a polynomial ring.
fn prs_gcd(mut f: Vec<MPoly>, mut g: Vec<MPoly>) -> Vec<MPoly> {
    trim(&mut f);
    trim(&mut g);
    loop {
        if f.len() < g.len() {
            std::mem::swap(&mut f, &mut g);
        }
        if g.is_empty() {
            return f;
        }
        let r = prem(&f, &g);
        if r.is_empty() {
            return g;
        }
        if r.len() == 1 {
            return vec![MPoly::one()];
        }
        let c = content(&r);
        f = g;
        g = primitive(&r, &c);
        // Over ℚ the content is trivial; normalizing keeps the rational
        // coefficients from growing exponentially along the sequence.
        if let Some(lc) = g.last().and_then(MPoly::as_constant) {
            let s = lc.recip();
            g = g.iter().map(|x| x.scale(&s)).collect();
        }
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}
