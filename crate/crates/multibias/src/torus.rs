//! Exact elements of the torus `T = R/Z` of finite order: reduced
//! fractions `num/den` with `0 ≤ num < den`.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A rational number modulo 1, always stored reduced with
/// `0 ≤ num < den`; zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusValue {
    num: BigInt,
    den: BigInt,
}

impl TorusValue {
    pub fn zero() -> Self {
        TorusValue { num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("torus value with zero denominator"));
        }
        Ok(Self::from_ratio(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    /// Reduces an arbitrary rational modulo 1.
    pub fn from_ratio(r: BigRational) -> Self {
        let f = &r - r.floor();
        TorusValue { num: f.numer().clone(), den: f.denom().clone() }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    /// Additive order: the denominator, as a machine integer when it fits.
    pub fn order(&self) -> Option<u64> {
        (&self.den).try_into().ok()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &TorusValue) -> TorusValue {
        let r = BigRational::new(self.num.clone(), self.den.clone())
            + BigRational::new(other.num.clone(), other.den.clone());
        TorusValue::from_ratio(r)
    }

    pub fn neg(&self) -> TorusValue {
        if self.num.is_zero() {
            return self.clone();
        }
        TorusValue { num: &self.den - &self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &TorusValue) -> TorusValue {
        self.add(&other.neg())
    }

    /// `n·t mod 1`.
    pub fn scale(&self, n: &BigInt) -> TorusValue {
        let m = n.mod_floor(&self.den);
        let num = (&self.num * m).mod_floor(&self.den);
        let g = num.gcd(&self.den);
        TorusValue { num: &num / &g, den: &self.den / &g }
    }

    pub fn scale_i128(&self, n: i128) -> TorusValue {
        self.scale(&BigInt::from(n))
    }

    /// The underlying rational representative in `[0, 1)`.
    pub fn as_ratio(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }
}

impl std::fmt::Display for TorusValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Parses a fraction literal `a/b` (or a bare integer `a`).
pub fn parse_fraction(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>().map_err(|_| Error::invalid(format!("bad integer `{t}`")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let num = parse_int(a.trim())?;
            let den = parse_int(b.trim())?;
            if den <= BigInt::zero() {
                return Err(Error::invalid(format!("fraction `{s}` must have positive denominator")));
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s.trim())?)),
    }
}

/// Formats a nonnegative rational as `a/b` (always with the slash).
pub fn format_fraction(r: &BigRational) -> String {
    debug_assert!(!r.is_negative());
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraparound() {
        let h = TorusValue::new(1, 2).unwrap();
        assert!(h.add(&h).is_zero());
    }

    #[test]
    fn scaling() {
        let q = TorusValue::new(1, 4).unwrap();
        assert_eq!(q.scale_i128(2), TorusValue::new(1, 2).unwrap());
        assert_eq!(q.scale_i128(-1), TorusValue::new(3, 4).unwrap());
        assert_eq!(q.scale_i128(4), TorusValue::zero());
    }

    #[test]
    fn mixed_denominators() {
        // 1/2 + 2/3 = 7/6 = 1/6 mod 1
        let a = TorusValue::new(1, 2).unwrap();
        let b = TorusValue::new(2, 3).unwrap();
        assert_eq!(a.add(&b), TorusValue::new(1, 6).unwrap());
    }

    #[test]
    fn negative_input_reduced() {
        let t = TorusValue::new(-1, 4).unwrap();
        assert_eq!(t, TorusValue::new(3, 4).unwrap());
        assert_eq!(t.neg(), TorusValue::new(1, 4).unwrap());
    }

    #[test]
    fn group_laws_sampled() {
        // associativity / identity / inverses on a denominator sweep
        let vals: Vec<TorusValue> = (1..40u64)
            .map(|i| TorusValue::new(i as i128 * 7 % 1000, 1 + (i as i128 * 131) % 1000).unwrap())
            .collect();
        for w in vals.windows(3) {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
            assert_eq!(a.add(&TorusValue::zero()), *a);
            assert!(a.add(&a.neg()).is_zero());
        }
    }

    #[test]
    fn fraction_parsing() {
        assert_eq!(parse_fraction("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_fraction("2").unwrap(), BigRational::from_integer(2.into()));
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("1/-2").is_err());
        assert!(parse_fraction("x").is_err());
    }
}
