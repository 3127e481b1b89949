use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;
use crate::error::{Error, Result};

/// A quotient of integer Laurent polynomials in canonical form.
///
/// Canonical form: the denominator has minimal exponent 0 and a positive
/// leading coefficient, numerator and denominator share no non-unit factor
/// over the rationals, and their coefficients are jointly primitive.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

// dense polynomial over Q, index = degree
type QPoly = Vec<BigRational>;

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Splits `q^a * P(q)` with `P(0) != 0` into `(a, P)`.
fn to_qpoly(p: &LaurentPoly) -> (i64, QPoly) {
    let lo = p.min_exp().unwrap_or(0);
    let hi = p.max_exp().unwrap_or(0);
    let mut v = vec![BigRational::zero(); (hi - lo + 1) as usize];
    for (e, c) in p.terms() {
        v[(e - lo) as usize] = BigRational::from_integer(c.clone());
    }
    trim(&mut v);
    (lo, v)
}

fn poly_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let f = &r[r.len() - 1] / &lead;
        for (i, c) in b.iter().enumerate() {
            let t = &r[k + i] - &f * c;
            r[k + i] = t;
        }
        trim(&mut r);
    }
    r
}

fn poly_div_exact(a: &QPoly, b: &QPoly) -> QPoly {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return Vec::new();
    }
    let mut r = a.clone();
    let mut out = vec![BigRational::zero(); a.len() - db];
    let lead = b[db].clone();
    for k in (0..out.len()).rev() {
        let f = &r[k + db] / &lead;
        for (i, c) in b.iter().enumerate() {
            let t = &r[k + i] - &f * c;
            r[k + i] = t;
        }
        out[k] = f;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    trim(&mut out);
    out
}

fn poly_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

impl RationalFunction {
    /// Reduces `num / den` to canonical form.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (a, n) = to_qpoly(&num);
        let (b, d) = to_qpoly(&den);
        let g = poly_gcd(&n, &d);
        let (n, d) = if g.len() > 1 { (poly_div_exact(&n, &g), poly_div_exact(&d, &g)) } else { (n, d) };
        // clear denominators jointly, then remove the joint content
        let lcm = n.iter().chain(d.iter()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = |p: &QPoly| -> Vec<BigInt> {
            p.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect()
        };
        let (ni, di) = (ints(&n), ints(&d));
        let mut content = ni.iter().chain(di.iter()).fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if di.last().is_some_and(|c| c.is_negative()) {
            content = -content;
        }
        let build = |v: &[BigInt], shift: i64| {
            LaurentPoly::from_terms(v.iter().enumerate().map(|(i, c)| (i as i64 + shift, c / &content)))
        };
        Ok(Self { num: build(&ni, a - b), den: build(&di, 0) })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Self::new(p, LaurentPoly::one()).expect("unit denominator")
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Equality by cross-multiplication; agrees with `==` on canonical values.
    pub fn cross_eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }
}

/// `rf_normalize` under its operation name.
pub fn rf_normalize(num: LaurentPoly, den: LaurentPoly) -> Result<RationalFunction> {
    RationalFunction::new(num, den)
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero den");
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(num, &self.den * &rhs.den).expect("nonzero den")
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero den")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}
