//! Exact coefficient rings in the variable `q`.

mod laurent;
mod rational;
mod series;

pub use laurent::{quantum_int, LaurentPoly};
pub use rational::{rf_normalize, RationalFunction};
pub use series::{expand_series, TruncatedSeries};

use std::fmt;

use serde::Serialize;

/// A commutative ring containing the integer Laurent polynomials, used as
/// the coefficient ring of Temperley-Lieb elements.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Serialize + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_laurent(p: &LaurentPoly) -> Self;
}

impl Coeff for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_laurent(p: &LaurentPoly) -> Self {
        p.clone()
    }
}

impl Coeff for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_laurent(p: &LaurentPoly) -> Self {
        RationalFunction::from_poly(p.clone())
    }
}

impl Coeff for TruncatedSeries {
    fn zero() -> Self {
        TruncatedSeries::exact(&LaurentPoly::zero())
    }
    fn one() -> Self {
        TruncatedSeries::exact(&LaurentPoly::one())
    }
    fn is_zero(&self) -> bool {
        TruncatedSeries::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        TruncatedSeries::add(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        TruncatedSeries::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        TruncatedSeries::neg(self)
    }
    fn from_laurent(p: &LaurentPoly) -> Self {
        TruncatedSeries::exact(p)
    }
}
