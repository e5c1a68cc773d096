use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{fmt_rat, Field, MPoly, Param, Rat};
use crate::{Error, Result};

/// Element of ℚ(params): a reduced fraction of parameter polynomials.
///
/// Canonical form: constants are always `Rat`; otherwise `num`/`den` are
/// coprime and `den` has leading coefficient 1 under the deg-lex order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Coeff {
    Rat(Rat),
    Frac { num: MPoly, den: MPoly },
}

impl Coeff {
    pub fn zero() -> Coeff {
        Coeff::Rat(Rat::zero())
    }

    pub fn one() -> Coeff {
        Coeff::Rat(Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coeff::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Coeff::Rat(r) if r.is_one())
    }

    pub fn param(p: Param) -> Coeff {
        Coeff::Frac { num: MPoly::var(p), den: MPoly::one() }
    }

    pub fn from_parts(num: MPoly, den: MPoly) -> Coeff {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Coeff::Rat(Rat::zero());
        }
        if let (Some(n), Some(d)) = (num.as_constant(), den.as_constant()) {
            return Coeff::Rat(n / d);
        }
        if let Some(d) = den.as_constant() {
            return Coeff::Frac { num: num.scale(&d.recip()), den: MPoly::one() };
        }
        let g = MPoly::gcd(&num, &den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap()) };
        let lc = den.lc();
        let (num, den) = if lc.is_one() {
            (num, den)
        } else {
            let s = lc.recip();
            (num.scale(&s), den.scale(&s))
        };
        match (num.as_constant(), den.is_one()) {
            (Some(c), true) => Coeff::Rat(c),
            _ => Coeff::Frac { num, den },
        }
    }

    pub fn from_mpoly(p: MPoly) -> Coeff {
        Coeff::from_parts(p, MPoly::one())
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Coeff::Rat(r) => Some(r),
            Coeff::Frac { .. } => None,
        }
    }

    pub fn num(&self) -> MPoly {
        match self {
            Coeff::Rat(r) => MPoly::constant(r.clone()),
            Coeff::Frac { num, .. } => num.clone(),
        }
    }

    pub fn den(&self) -> MPoly {
        match self {
            Coeff::Rat(_) => MPoly::one(),
            Coeff::Frac { den, .. } => den.clone(),
        }
    }

    pub fn params(&self) -> Vec<Param> {
        match self {
            Coeff::Rat(_) => Vec::new(),
            Coeff::Frac { num, den } => {
                let mut v = num.params();
                v.extend(den.params());
                v.sort();
                v.dedup();
                v
            }
        }
    }

    /// Substitutes rational values for parameters; unassigned ones stay.
    pub fn specialize(&self, assignment: &BTreeMap<Param, Rat>) -> Result<Coeff> {
        match self {
            Coeff::Rat(_) => Ok(self.clone()),
            Coeff::Frac { num, den } => {
                let (mut n, mut d) = (num.clone(), den.clone());
                for (p, v) in assignment {
                    n = n.substitute(*p, v);
                    d = d.substitute(*p, v);
                }
                if d.is_zero() {
                    return Err(Error::VanishingDenominator { factor: den.to_string() });
                }
                Ok(Coeff::from_parts(n, d))
            }
        }
    }

    /// Substitutes a polynomial for a parameter.
    pub fn substitute_poly(&self, p: Param, value: &MPoly) -> Result<Coeff> {
        match self {
            Coeff::Rat(_) => Ok(self.clone()),
            Coeff::Frac { num, den } => {
                let d = den.substitute_poly(p, value);
                if d.is_zero() {
                    return Err(Error::VanishingDenominator { factor: den.to_string() });
                }
                Ok(Coeff::from_parts(num.substitute_poly(p, value), d))
            }
        }
    }

    /// Partial derivative in a parameter.
    pub fn derivative(&self, p: Param) -> Coeff {
        match self {
            Coeff::Rat(_) => Coeff::zero(),
            Coeff::Frac { num, den } => {
                Coeff::from_parts(num.derivative(p).mul(den).sub(&num.mul(&den.derivative(p))), den.mul(den))
            }
        }
    }

    pub fn is_negative_rat(&self) -> bool {
        matches!(self, Coeff::Rat(r) if r.is_negative())
    }

    pub(crate) fn render(&self) -> String {
        match self {
            Coeff::Rat(r) => fmt_rat(r),
            Coeff::Frac { num, den } => {
                if den.is_one() {
                    num.render(false)
                } else if den.num_terms() == 1 && den.lc().is_one() {
                    format!("{}/{}", num.render(true), den.render(false))
                } else {
                    format!("{}/{}", num.render(true), den.render(true))
                }
            }
        }
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::Rat(Rat::zero())
    }
}

impl From<Rat> for Coeff {
    fn from(r: Rat) -> Self {
        Coeff::Rat(r)
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::Rat(Rat::from_integer(n.into()))
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn add_coeff(a: &Coeff, b: &Coeff, negate_b: bool) -> Coeff {
    match (a, b) {
        (Coeff::Rat(x), Coeff::Rat(y)) => Coeff::Rat(if negate_b { x - y } else { x + y }),
        _ => {
            let (na, da) = (a.num(), a.den());
            let (mut nb, db) = (b.num(), b.den());
            if negate_b {
                nb = nb.neg();
            }
            if da == db {
                Coeff::from_parts(na.add(&nb), da)
            } else {
                Coeff::from_parts(na.mul(&db).add(&nb.mul(&da)), da.mul(&db))
            }
        }
    }
}

fn mul_coeff(a: &Coeff, b: &Coeff) -> Coeff {
    match (a, b) {
        (Coeff::Rat(x), Coeff::Rat(y)) => Coeff::Rat(x * y),
        (Coeff::Rat(r), Coeff::Frac { num, den }) | (Coeff::Frac { num, den }, Coeff::Rat(r)) => {
            if r.is_zero() {
                Coeff::zero()
            } else {
                Coeff::Frac { num: num.scale(r), den: den.clone() }
            }
        }
        (Coeff::Frac { num: n1, den: d1 }, Coeff::Frac { num: n2, den: d2 }) => {
            let g1 = MPoly::gcd(n1, d2);
            let g2 = MPoly::gcd(n2, d1);
            let num = n1.div_exact(&g1).unwrap().mul(&n2.div_exact(&g2).unwrap());
            let den = d1.div_exact(&g2).unwrap().mul(&d2.div_exact(&g1).unwrap());
            // Cofactors of monic gcds keep the scaling of the originals.
            Coeff::from_parts(num, den)
        }
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff::zero()
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(self)
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff::one()
    }
    fn is_one(&self) -> bool {
        Coeff::is_one(self)
    }
}

impl Field for Coeff {
    fn from_rat(r: Rat) -> Self {
        Coeff::Rat(r)
    }
    fn plus(&self, rhs: &Self) -> Self {
        add_coeff(self, rhs, false)
    }
    fn minus(&self, rhs: &Self) -> Self {
        add_coeff(self, rhs, true)
    }
    fn times(&self, rhs: &Self) -> Self {
        mul_coeff(self, rhs)
    }
    fn negated(&self) -> Self {
        match self {
            Coeff::Rat(r) => Coeff::Rat(-r),
            Coeff::Frac { num, den } => Coeff::Frac { num: num.neg(), den: den.clone() },
        }
    }
    fn inverse(&self) -> Option<Self> {
        match self {
            Coeff::Rat(r) if r.is_zero() => None,
            Coeff::Rat(r) => Some(Coeff::Rat(r.recip())),
            Coeff::Frac { num, den } => Some(Coeff::from_parts(den.clone(), num.clone())),
        }
    }
}

/// `+ - * neg` on owned values and references, delegating to methods
/// `plus`, `minus`, `times`, `negated` in scope for the type.
macro_rules! ring_ops {
    ($t:ty) => {
        impl std::ops::Add for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                self.plus(rhs)
            }
        }
        impl std::ops::Sub for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                self.minus(rhs)
            }
        }
        impl std::ops::Mul for &$t {
            type Output = $t;
            fn mul(self, rhs: &$t) -> $t {
                self.times(rhs)
            }
        }
        impl std::ops::Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.negated()
            }
        }
        impl std::ops::Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                self.plus(&rhs)
            }
        }
        impl std::ops::Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                self.minus(&rhs)
            }
        }
        impl std::ops::Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                self.times(&rhs)
            }
        }
        impl std::ops::Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                self.negated()
            }
        }
    };
}
pub(crate) use ring_ops;

/// Ring ops plus `/` for types implementing [`Field`].
macro_rules! field_ops {
    ($t:ty) => {
        $crate::exactalg::coeff::ring_ops!($t);
        impl std::ops::Div for &$t {
            type Output = $t;
            fn div(self, rhs: &$t) -> $t {
                $crate::exactalg::Field::quotient(self, rhs)
            }
        }
        impl std::ops::Div for $t {
            type Output = $t;
            fn div(self, rhs: $t) -> $t {
                $crate::exactalg::Field::quotient(&self, &rhs)
            }
        }
    };
}
pub(crate) use field_ops;

field_ops!(Coeff);
