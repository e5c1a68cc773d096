use std::collections::BTreeMap;
use std::fmt;

use crate::exactalg::parse::{eval, parse_expr, Algebra};
use crate::exactalg::{Field, Int, Param, Rat, RatFun};
use crate::{Error, Result};

/// Scalar linear differential operator `Σ cᵢ ∂ⁱ`, coefficients stored
/// non-monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiffOp {
    coeffs: Vec<RatFun>,
}

fn binom(n: usize, k: usize) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

impl DiffOp {
    pub fn new(mut coeffs: Vec<RatFun>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DiffOp { coeffs }
    }

    pub fn zero() -> Self {
        DiffOp { coeffs: Vec::new() }
    }

    /// Multiplication by `f`.
    pub fn mult(f: RatFun) -> Self {
        DiffOp::new(vec![f])
    }

    /// `∂`.
    pub fn d() -> Self {
        DiffOp::new(vec![RatFun::zero(), RatFun::one()])
    }

    pub fn coeffs(&self) -> &[RatFun] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RatFun {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order; zero for the zero operator as well.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> RatFun {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn monic(&self) -> DiffOp {
        match self.leading().inverse() {
            Some(inv) if !inv.is_one() => DiffOp { coeffs: self.coeffs.iter().map(|c| c * &inv).collect() },
            _ => self.clone(),
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn scale(&self, f: &RatFun) -> DiffOp {
        DiffOp::new(self.coeffs.iter().map(|c| c * f).collect())
    }

    pub fn add(&self, rhs: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffOp::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffOp::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Composition `self ∘ rhs`.
    pub fn compose(&self, rhs: &DiffOp) -> DiffOp {
        let mut out = vec![RatFun::zero(); self.coeffs.len() + rhs.coeffs.len()];
        for (j, b) in rhs.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            // ∂^i ∘ b = Σ_k C(i,k) b^(i-k) ∂^k
            let mut derivs = vec![b.clone()];
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                while derivs.len() <= i {
                    let next = derivs.last().unwrap().derivative();
                    derivs.push(next);
                }
                for k in 0..=i {
                    let db = &derivs[i - k];
                    if db.is_zero() {
                        continue;
                    }
                    let c = &(a * db) * &RatFun::from(binom(i, k));
                    out[j + k] = &out[j + k] + &c;
                }
            }
        }
        DiffOp::new(out)
    }

    /// Formal adjoint `Σ (−∂)ⁱ ∘ cᵢ`.
    pub fn adjoint(&self) -> DiffOp {
        let mut out = vec![RatFun::zero(); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let mut d = c.clone();
            let mut derivs = vec![d.clone()];
            for _ in 0..i {
                d = d.derivative();
                derivs.push(d.clone());
            }
            for k in 0..=i {
                let term = &derivs[i - k] * &RatFun::from(sign * binom(i, k));
                out[k] = &out[k] + &term;
            }
        }
        DiffOp::new(out)
    }

    /// `Σ cᵢ f⁽ⁱ⁾`.
    pub fn apply(&self, f: &RatFun) -> RatFun {
        let mut acc = RatFun::zero();
        let mut d = f.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                d = d.derivative();
            }
            if !c.is_zero() && !d.is_zero() {
                acc = &acc + &(c * &d);
            }
        }
        acc
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_rational())
    }

    pub fn params(&self) -> Vec<Param> {
        let mut v: Vec<Param> = self.coeffs.iter().flat_map(|c| c.params()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn specialize(&self, a: &BTreeMap<Param, Rat>) -> Result<DiffOp> {
        Ok(DiffOp::new(self.coeffs.iter().map(|c| c.specialize(a)).collect::<Result<_>>()?))
    }

    /// Clears denominators: returns `q·self` with polynomial coefficients,
    /// `q` the lcm of coefficient denominators.
    pub fn clear_denominators(&self) -> DiffOp {
        let mut l = crate::exactalg::Poly::one();
        for c in &self.coeffs {
            let g = crate::exactalg::Poly::gcd(&l, c.den());
            l = (&l * c.den()).div_exact(&g).unwrap();
        }
        self.scale(&RatFun::from_poly(l))
    }

    /// Printed form, descending in ∂, using `D^k`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.num().num_terms() == 1 && c.num().lc().is_negative_rat();
            let a = if neg { -c } else { c.clone() };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let cs = a.render(var);
            let cs = if a.is_polynomial() && a.num().num_terms() > 1 && k > 0 { format!("({cs})") } else { cs };
            let d = match k {
                0 => String::new(),
                1 => "D".to_string(),
                _ => format!("D^{k}"),
            };
            if k == 0 {
                s.push_str(&cs);
            } else if a.is_one() {
                s.push_str(&d);
            } else {
                s.push_str(&format!("{cs}*{d}"));
            }
        }
        s
    }

    /// Parses the `D^k` notation; `D` composes on the left of what follows.
    pub fn parse(s: &str, var: &str, params: &[&str]) -> Result<DiffOp> {
        let e = parse_expr(s)?;
        eval(&e, &|name| {
            if name == "D" {
                Ok(DiffOp::d())
            } else if name == var {
                Ok(DiffOp::mult(RatFun::x()))
            } else if params.contains(&name) {
                Ok(DiffOp::mult(RatFun::param(Param::new(name))))
            } else {
                Err(Error::Parse { pos: 0, msg: format!("unknown identifier '{name}'") })
            }
        })
    }
}

impl Algebra for DiffOp {
    fn from_int(n: &Int) -> Self {
        DiffOp::mult(RatFun::from_rat(Rat::from_integer(n.clone())))
    }
    fn add(&self, rhs: &Self) -> Self {
        DiffOp::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        DiffOp::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.compose(rhs)
    }
    fn neg(&self) -> Self {
        DiffOp::neg(self)
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.order() != 0 || rhs.is_zero() {
            return Err(Error::InvalidOperator("division by a non-scalar operator".into()));
        }
        if self.order() != 0 && rhs.coeff(0).as_constant().is_none() {
            return Err(Error::InvalidOperator("ambiguous right division by a function".into()));
        }
        Ok(self.scale(&rhs.coeff(0).inverse().unwrap()))
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &str) -> DiffOp {
        DiffOp::parse(s, "t", &["mu"]).unwrap()
    }

    #[test]
    fn parse_and_render() {
        let l4 = op("D^5 - 20*t*D^3 - 30*D^2 + 64*t^2*D + 64*t");
        assert_eq!(l4.order(), 5);
        assert_eq!(l4.render("t"), "D^5 - 20*t*D^3 - 30*D^2 + 64*t^2*D + 64*t");
        assert_eq!(op("D*t"), op("t*D + 1"));
        let l = op("(t + 1)*D^2 - 1/t*D + 3/4");
        assert_eq!(op(&l.render("t")), l);
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(op("D^2 - t").adjoint(), op("D^2 - t"));
        assert_eq!(op("D").adjoint(), op("-D"));
        assert_eq!(op("t*D").adjoint(), op("-t*D - 1"));
    }

    #[test]
    fn apply_examples() {
        let l4 = op("D^5 - 20*t*D^3 - 30*D^2 + 64*t^2*D + 64*t");
        let t = RatFun::x();
        assert_eq!(l4.apply(&t), &RatFun::from(128) * &t.pow(2));
        assert_eq!(op("D^2 - t").apply(&RatFun::one()), -t.clone());
        assert_eq!(op("D").apply(&t.pow(3)), &RatFun::from(3) * &t.pow(2));
    }

    #[test]
    fn compose_matches_application() {
        let a = op("t*D^2 + 1");
        let b = op("D - 1/t");
        let f = RatFun::x().pow(5);
        assert_eq!(a.compose(&b).apply(&f), a.apply(&b.apply(&f)));
    }
}
