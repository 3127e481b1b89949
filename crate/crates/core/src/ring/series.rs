use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

/// A Laurent series in `q`, bounded below, known exactly through exponent
/// `order`. `order == None` marks an exact (polynomial) value.
#[derive(Clone, Serialize, Deserialize)]
pub struct TruncatedSeries {
    min_exp: i64,
    coeffs: Vec<BigInt>,
    order: Option<i64>,
}

impl TruncatedSeries {
    pub fn new(min_exp: i64, coeffs: Vec<BigInt>, order: Option<i64>) -> Self {
        let mut s = Self { min_exp, coeffs, order };
        s.canonicalize();
        s
    }

    pub fn exact(p: &LaurentPoly) -> Self {
        Self::from_poly(p, None)
    }

    pub fn from_poly(p: &LaurentPoly, order: Option<i64>) -> Self {
        let Some(lo) = p.min_exp() else {
            return Self::new(0, Vec::new(), order);
        };
        let hi = p.max_exp().unwrap();
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in p.terms() {
            coeffs[(e - lo) as usize] = c.clone();
        }
        Self::new(lo, coeffs, order)
    }

    fn canonicalize(&mut self) {
        if let Some(d) = self.order {
            let keep = (d - self.min_exp + 1).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min_exp = 0;
        }
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.min_exp)
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        if e < self.min_exp {
            return BigInt::zero();
        }
        self.coeffs.get((e - self.min_exp) as usize).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The known part as a polynomial.
    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.coeffs.iter().enumerate().map(|(i, c)| (self.min_exp + i as i64, c.clone())))
    }

    pub fn truncate(&self, d: i64) -> Self {
        let order = Some(self.order.map_or(d, |o| o.min(d)));
        Self::new(self.min_exp, self.coeffs.clone(), order)
    }

    /// Exponent below which the value is known to vanish; for a zero value
    /// this is one past its order.
    fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            self.order.map(|d| d + 1)
        } else {
            Some(self.min_exp)
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = min_opt(self.order, rhs.order);
        let mut p = self.to_poly();
        p += &rhs.to_poly();
        Self::from_poly(&p, order)
    }

    pub fn neg(&self) -> Self {
        Self { min_exp: self.min_exp, coeffs: self.coeffs.iter().map(|c| -c).collect(), order: self.order }
    }

    /// The product is known through `min(D_a + v_b, D_b + v_a)` where `v`
    /// is the valuation; for non-negative valuations this never exceeds the
    /// weaker order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let lhs_bound = self.order.map(|d| d + rhs.valuation().unwrap_or(i64::MAX / 4));
        let rhs_bound = rhs.order.map(|d| d + self.valuation().unwrap_or(i64::MAX / 4));
        let order = min_opt(lhs_bound, rhs_bound);
        let p = &self.to_poly() * &rhs.to_poly();
        Self::from_poly(&p, order)
    }

    /// Coefficient-wise agreement through the weaker of the two orders.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let order = min_opt(self.order, other.order);
        let (a, b) = match order {
            Some(d) => (self.to_poly().truncate_above(d), other.to_poly().truncate_above(d)),
            None => (self.to_poly(), other.to_poly()),
        };
        a == b
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.min_exp == other.min_exp && self.coeffs == other.coeffs
    }
}

impl Eq for TruncatedSeries {}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())?;
        if let Some(d) = self.order {
            write!(f, " + O(q^{})", d + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries({self})")
    }
}

/// Expands `r` as a power series in `q` through exponent `order`.
///
/// Requires the lowest coefficient of the denominator to be `±1`, which
/// makes every coefficient of the expansion an integer.
pub fn expand_series(r: &RationalFunction, order: i64) -> Result<TruncatedSeries> {
    let (num, den) = (r.num(), r.den());
    if num.is_zero() {
        return Ok(TruncatedSeries::new(0, Vec::new(), Some(order)));
    }
    let d0 = den.lowest_coeff().expect("nonzero denominator").clone();
    if !d0.abs().is_one() {
        return Err(Error::NonUnitExpansion(d0.to_string()));
    }
    let a = num.min_exp().unwrap();
    let b = den.min_exp().unwrap();
    let start = a - b;
    if order < start {
        return Ok(TruncatedSeries::new(start, Vec::new(), Some(order)));
    }
    let len = (order - start + 1) as usize;
    let dcoef: Vec<BigInt> = (0..len).map(|k| den.coeff(b + k as i64)).collect();
    // num = den * s, solved term by term from the bottom
    let mut s: Vec<BigInt> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = num.coeff(a + k as i64);
        for j in 1..=k {
            if !dcoef[j].is_zero() {
                acc -= &dcoef[j] * &s[k - j];
            }
        }
        s.push(if d0.is_negative() { -acc } else { acc });
    }
    Ok(TruncatedSeries::new(start, s, Some(order)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::quantum_int;

    fn lp(t: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(t.iter().copied())
    }

    #[test]
    fn inverse_delta() {
        let r = RationalFunction::new(LaurentPoly::one(), LaurentPoly::delta()).unwrap();
        let s = expand_series(&r, 8).unwrap();
        assert_eq!(s.to_poly(), lp(&[(1, 1), (3, -1), (5, 1), (7, -1)]));
        assert_eq!(s.order(), Some(8));
    }

    #[test]
    fn unit() {
        let s = expand_series(&RationalFunction::one(), 5).unwrap();
        assert_eq!(s.to_poly(), LaurentPoly::one());
    }

    #[test]
    fn inverse_quantum_three() {
        let r = RationalFunction::new(LaurentPoly::one(), quantum_int(3).unwrap()).unwrap();
        let s = expand_series(&r, 10).unwrap();
        assert_eq!(s.to_poly(), lp(&[(2, 1), (4, -1), (8, 1), (10, -1)]));
        // multiplying back by [3] gives 1 through q^10
        let back = &s.to_poly() * &quantum_int(3).unwrap();
        assert_eq!(back.truncate_above(10), LaurentPoly::one());
    }

    #[test]
    fn rejects_non_unit() {
        let r = RationalFunction::new(LaurentPoly::one(), lp(&[(0, 2), (1, 1)])).unwrap();
        assert!(matches!(expand_series(&r, 4), Err(Error::NonUnitExpansion(_))));
    }

    #[test]
    fn truncation_is_pessimistic() {
        let a = TruncatedSeries::from_poly(&lp(&[(0, 1), (1, 1)]), Some(3));
        let b = TruncatedSeries::from_poly(&lp(&[(2, 1)]), Some(5));
        assert_eq!(a.add(&b).order(), Some(3));
        assert_eq!(a.mul(&b).order(), Some(5));
        let inv = TruncatedSeries::exact(&lp(&[(-1, 1)]));
        assert_eq!(a.mul(&inv).order(), Some(2));
    }
}
