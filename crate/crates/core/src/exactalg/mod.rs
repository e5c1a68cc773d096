//! Exact arithmetic tower: rationals, the parameter field, univariate
//! polynomials and rational functions over it.

pub(crate) mod coeff;
mod field;
mod modp;
mod mpoly;
mod param;
pub mod parse;
mod poly;
pub(crate) mod ratfun;
pub mod roots;

pub use coeff::Coeff;
pub use field::Field;
pub use mpoly::{MPoly, Monomial};
pub use num_traits::{One, Zero};
pub use param::Param;
pub use poly::Poly;
pub use ratfun::{PoleOrders, RatFun};

pub type Rat = num_rational::BigRational;
pub type Int = num_bigint::BigInt;

/// Shorthand for a small rational constant.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Shorthand for an integer-valued rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Parses a rational constant such as `3`, `-1/2`.
pub fn parse_rat(s: &str) -> crate::Result<Rat> {
    let s = s.trim();
    let bad = || crate::Error::Input(format!("not a rational number: {s}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = n.parse().map_err(|_| bad())?;
    let d: Int = d.parse().map_err(|_| bad())?;
    if num_traits::Zero::is_zero(&d) {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
