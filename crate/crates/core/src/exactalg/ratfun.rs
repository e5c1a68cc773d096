use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::coeff::field_ops;
use super::roots::factor_over_q;
use super::{Coeff, Field, Param, Poly, Rat};
use crate::{Error, Result};

/// Reduced fraction `num/den` of univariate polynomials, `den` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

/// Output of [`RatFun::pole_orders`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleOrders {
    /// Monic denominator factors with their pole orders.
    pub finite: Vec<(Poly, usize)>,
    /// `deg den - deg num`; negative for polynomial growth.
    pub at_infinity: i64,
}

impl PoleOrders {
    pub fn order_at(&self, factor: &Poly) -> usize {
        self.finite.iter().find(|(f, _)| f == factor).map_or(0, |&(_, k)| k)
    }

    pub fn max_finite(&self) -> usize {
        self.finite.iter().map(|&(_, k)| k).max().unwrap_or(0)
    }
}

impl RatFun {
    pub fn zero() -> RatFun {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFun {
        RatFun { num: Poly::one(), den: Poly::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn new(num: Poly, den: Poly) -> RatFun {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFun::zero();
        }
        if den.is_constant() {
            let inv = den.lc().inverse().unwrap();
            return RatFun { num: num.scale(&inv), den: Poly::one() };
        }
        // Denominator c·x^k: the gcd is a power of x.
        let lead = den.coeffs().len() - 1;
        if den.coeffs()[..lead].iter().all(Coeff::is_zero) {
            let v = num.coeffs().iter().take_while(|c| c.is_zero()).count().min(lead);
            let inv = den.lc().inverse().unwrap();
            let num = Poly::from_coeffs(num.coeffs()[v..].to_vec()).scale(&inv);
            return RatFun { num, den: Poly::monomial(Coeff::one(), lead - v) };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) =
            if g.is_constant() { (num, den) } else { (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap()) };
        let lc = den.lc();
        if lc.is_one() {
            RatFun { num, den }
        } else {
            let inv = lc.inverse().unwrap();
            RatFun { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: Poly) -> RatFun {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn constant(c: Coeff) -> RatFun {
        RatFun::from_poly(Poly::constant(c))
    }

    pub fn from_i64(n: i64) -> RatFun {
        RatFun::constant(Coeff::from(n))
    }

    pub fn param(p: Param) -> RatFun {
        RatFun::constant(Coeff::param(p))
    }

    /// The main variable.
    pub fn x() -> RatFun {
        RatFun::from_poly(Poly::x())
    }

    /// `c / x^k`.
    pub fn inv_power(c: Coeff, k: usize) -> RatFun {
        RatFun::new(Poly::constant(c), Poly::monomial(Coeff::one(), k))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn as_rat(&self) -> Option<Rat> {
        self.as_constant().and_then(|c| c.as_rat().cloned())
    }

    pub fn is_rational(&self) -> bool {
        self.num.is_rational() && self.den.is_rational()
    }

    pub fn params(&self) -> Vec<Param> {
        let mut v = self.num.params();
        v.extend(self.den.params());
        v.sort();
        v.dedup();
        v
    }

    pub fn scale(&self, c: &Coeff) -> RatFun {
        RatFun { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn derivative(&self) -> RatFun {
        if self.den.is_one() {
            return RatFun::from_poly(self.num.derivative());
        }
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFun::new(n, &self.den * &self.den)
    }

    pub fn pow(&self, e: i64) -> RatFun {
        let base = if e < 0 { self.inverse().expect("zero to a negative power") } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        RatFun { num: base.num.pow(e), den: base.den.pow(e) }
    }

    /// `deg den - deg num`; `None` for zero.
    pub fn order_at_infinity(&self) -> Option<i64> {
        Some(self.den.deg_i()? - self.num.deg_i()?)
    }

    /// Multiplicity of an irreducible `factor` in `num` minus that in `den`.
    pub fn valuation_at(&self, factor: &Poly) -> i64 {
        fn mult(p: &Poly, f: &Poly) -> i64 {
            let mut k = 0;
            let mut p = p.clone();
            while !p.is_zero() {
                match p.div_exact(f) {
                    Some(q) => {
                        p = q;
                        k += 1;
                    }
                    None => break,
                }
            }
            k
        }
        mult(&self.num, factor) - mult(&self.den, factor)
    }

    /// Pole structure of the function; see [`PoleOrders`].
    pub fn pole_orders(&self) -> Result<PoleOrders> {
        if self.num.is_zero() {
            return Err(Error::ZeroPoleOrders);
        }
        Ok(PoleOrders { finite: factor_over_q(&self.den), at_infinity: self.order_at_infinity().unwrap() })
    }

    /// Evaluation; `None` if the denominator vanishes.
    pub fn eval(&self, x: &Coeff) -> Option<Coeff> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x).quotient(&d))
    }

    pub fn eval_f64(&self, x: f64) -> Option<f64> {
        let ev = |p: &Poly| -> Option<f64> {
            let mut acc = 0.0;
            for c in p.coeffs().iter().rev() {
                acc = acc * x + rat_to_f64(c.as_rat()?);
            }
            Some(acc)
        };
        Some(ev(&self.num)? / ev(&self.den)?)
    }

    pub fn specialize(&self, assignment: &BTreeMap<Param, Rat>) -> Result<RatFun> {
        let den = self.den.specialize(assignment)?;
        if den.is_zero() {
            return Err(Error::VanishingDenominator { factor: self.den.render("x") });
        }
        Ok(RatFun::new(self.num.specialize(assignment)?, den))
    }

    /// `self(q)` for a rational function `q`.
    pub fn compose(&self, q: &RatFun) -> RatFun {
        let ev = |p: &Poly| {
            let mut acc = RatFun::zero();
            for c in p.coeffs().iter().rev() {
                acc = &(&acc * q) + &RatFun::constant(c.clone());
            }
            acc
        };
        &ev(&self.num) / &ev(&self.den)
    }

    /// Printed form in the given variable, in the parse grammar.
    pub fn render(&self, var: &str) -> String {
        let n = self.num.render(var);
        if self.den.is_one() {
            return n;
        }
        let n = if self.num.num_terms() > 1 || self.num.lc().as_rat().is_none() { format!("({n})") } else { n };
        let d = self.den.render(var);
        if self.den.num_terms() == 1 && self.den.lc().is_one() {
            format!("{n}/{d}")
        } else {
            format!("{n}/({d})")
        }
    }
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Zero for RatFun {
    fn zero() -> Self {
        RatFun::zero()
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
}

impl One for RatFun {
    fn one() -> Self {
        RatFun::one()
    }
    fn is_one(&self) -> bool {
        RatFun::is_one(self)
    }
}

impl Field for RatFun {
    fn from_rat(r: Rat) -> Self {
        RatFun::constant(Coeff::Rat(r))
    }
    fn plus(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            if self.den.is_one() {
                return RatFun::from_poly(&self.num + &rhs.num);
            }
            return RatFun::new(&self.num + &rhs.num, self.den.clone());
        }
        if rhs.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return rhs.clone();
        }
        let g = Poly::gcd(&self.den, &rhs.den);
        let a = self.den.div_exact(&g).unwrap();
        let b = rhs.den.div_exact(&g).unwrap();
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        RatFun::new(num, &(&a * &b) * &g)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negated())
    }
    fn times(&self, rhs: &Self) -> Self {
        if self.num.is_zero() || rhs.num.is_zero() {
            return RatFun::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFun::from_poly(&self.num * &rhs.num);
        }
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n = &self.num.div_exact(&g1).unwrap() * &rhs.num.div_exact(&g2).unwrap();
        let d = &self.den.div_exact(&g2).unwrap() * &rhs.den.div_exact(&g1).unwrap();
        RatFun::new(n, d)
    }
    fn negated(&self) -> Self {
        RatFun { num: self.num.negated(), den: self.den.clone() }
    }
    fn inverse(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFun::new(self.den.clone(), self.num.clone()))
        }
    }
}

field_ops!(RatFun);

impl Default for RatFun {
    fn default() -> Self {
        RatFun::zero()
    }
}

impl From<Poly> for RatFun {
    fn from(p: Poly) -> Self {
        RatFun::from_poly(p)
    }
}

impl From<Coeff> for RatFun {
    fn from(c: Coeff) -> Self {
        RatFun::constant(c)
    }
}

impl From<i64> for RatFun {
    fn from(n: i64) -> Self {
        RatFun::from_i64(n)
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn t() -> RatFun {
        RatFun::x()
    }

    #[test]
    fn derivative_examples() {
        assert!(RatFun::one().derivative().is_zero());
        assert_eq!(t().pow(2).derivative(), &RatFun::from(2) * &t());
        assert_eq!(t().pow(-1).derivative(), -t().pow(-2));
    }

    #[test]
    fn pole_orders_examples() {
        let p = t().pow(-5).pole_orders().unwrap();
        assert_eq!(p.finite, vec![(Poly::x(), 5)]);
        assert_eq!(p.at_infinity, 5);
        let q = (&(&t() + &RatFun::one()) / &t().pow(2)).pole_orders().unwrap();
        assert_eq!(q.finite, vec![(Poly::x(), 2)]);
        assert_eq!(q.at_infinity, 1);
        assert_eq!(RatFun::zero().pole_orders(), Err(Error::ZeroPoleOrders));
    }

    #[test]
    fn specialize_examples() {
        let mu = Param::new("mu");
        let m = RatFun::param(mu);
        let mut a = BTreeMap::new();
        a.insert(mu, rat(1, 2));
        let f = &m.inverse().unwrap() + &t().inverse().unwrap();
        let expect = &RatFun::from(2) + &t().inverse().unwrap();
        assert_eq!(f.specialize(&a).unwrap(), expect);
        let g = &(&m.pow(4) * &RatFun::from(-32)) / &t();
        assert_eq!(g.specialize(&a).unwrap(), &RatFun::from(-2) / &t());
    }

    #[test]
    fn render_forms() {
        assert_eq!(t().pow(-1).render("t"), "1/t");
        let f = &(&t() + &RatFun::one()) / &(&t().pow(2) - &RatFun::one());
        assert_eq!(f.render("t"), "1/(t - 1)");
        let g = &RatFun::from_rat(rat(-3, 4)) * &t().pow(2);
        assert_eq!(g.render("x"), "-3/4*x^2");
    }
}
