use std::fmt::Debug;

use num_traits::{One, Zero};

use super::{Int, Rat};

/// Minimal field interface shared by matrix and operator code.
///
/// Method names avoid the `std::ops` ones so generic code never hits
/// method ambiguity with operator impls on concrete types.
pub trait Field: Zero + One + Clone + PartialEq + Debug + Send + Sync + 'static {
    fn from_rat(r: Rat) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    /// `None` for zero.
    fn inverse(&self) -> Option<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(Int::from(n)))
    }
    /// Panics on division by zero; callers check pivots first.
    fn quotient(&self, rhs: &Self) -> Self {
        self.times(&rhs.inverse().expect("division by zero"))
    }
}

impl Field for Rat {
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}
