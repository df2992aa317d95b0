//! Exact probabilities as reduced fractions of big integers.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability in `[0, 1]`, kept as a reduced fraction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(Ratio<BigUint>);

impl ExactProb {
    pub fn new(num: impl Into<BigUint>, den: impl Into<BigUint>) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(Error::InvalidCounts("zero denominator".into()));
        }
        if num > den {
            return Err(Error::InvalidCounts(format!("{num}/{den} exceeds 1")));
        }
        Ok(ExactProb(Ratio::new(num, den)))
    }

    /// `num/den` for counts already known to satisfy `num ≤ den`, `den > 0`.
    pub(crate) fn from_counts(num: BigUint, den: BigUint) -> Self {
        debug_assert!(!den.is_zero() && num <= den);
        ExactProb(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        ExactProb(Ratio::zero())
    }

    pub fn one() -> Self {
        ExactProb(Ratio::one())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `(1 + self) / 2`.
    pub fn half_up(&self) -> Self {
        ExactProb((self.0.clone() + Ratio::one()) / BigUint::from(2u32))
    }

    /// `1 − 3 / 2^e`, which lies in `[0, 1]` for `e ≥ 2`.
    pub fn one_minus_three_over_pow2(e: u32) -> Self {
        assert!(e >= 2, "1 - 3/2^e is negative for e < 2");
        let den = BigUint::one() << e;
        let num = &den - BigUint::from(3u32);
        ExactProb(Ratio::new(num, den))
    }

    pub fn pow(&self, e: u32) -> Self {
        ExactProb(Ratio::new(self.numer().pow(e), self.denom().pow(e)))
    }

    pub fn as_ratio(&self) -> &Ratio<BigUint> {
        &self.0
    }
}

impl Mul for &ExactProb {
    type Output = ExactProb;
    fn mul(self, rhs: &ExactProb) -> ExactProb {
        ExactProb(&self.0 * &rhs.0)
    }
}

impl fmt::Display for ExactProb {
    /// Always `num/den`, so `1` prints as `1/1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for ExactProb {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidCounts(format!("cannot parse `{s}` as num/den"));
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: BigUint = n.trim().parse().map_err(|_| bad())?;
        let d: BigUint = d.trim().parse().map_err(|_| bad())?;
        ExactProb::new(n, d)
    }
}

impl Serialize for ExactProb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactProb {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduces_and_prints() {
        let p = ExactProb::new(18u32, 36u32).unwrap();
        assert_eq!(p.to_string(), "1/2");
        assert_eq!(ExactProb::one().to_string(), "1/1");
        assert_eq!(ExactProb::zero().to_string(), "0/1");
        assert!(ExactProb::new(3u32, 2u32).is_err());
        assert!(ExactProb::new(0u32, 0u32).is_err());
    }

    #[test]
    fn gap_constants() {
        assert_eq!(ExactProb::one_minus_three_over_pow2(2).to_string(), "1/4");
        assert_eq!(ExactProb::one_minus_three_over_pow2(3).to_string(), "5/8");
        assert_eq!(ExactProb::one_minus_three_over_pow2(4).to_string(), "13/16");
    }

    #[test]
    fn half_up() {
        let p: ExactProb = "1/2".parse().unwrap();
        assert_eq!(p.half_up().to_string(), "3/4");
    }

    #[test]
    fn parses_integers_and_rejects_junk() {
        assert!("1".parse::<ExactProb>().unwrap().is_one());
        assert_eq!("0".parse::<ExactProb>().unwrap(), ExactProb::zero());
        assert_eq!("2/4".parse::<ExactProb>().unwrap().to_string(), "1/2");
        for bad in ["2", "3/2", "1/0", "a/b", ""] {
            assert!(bad.parse::<ExactProb>().is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn serde_round_trip(n in 0u64..1_000_000, extra in 0u64..1_000_000) {
            let p = ExactProb::new(n, n + extra + 1).unwrap();
            let json = serde_json::to_string(&p).unwrap();
            let back: ExactProb = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert!(back.to_f64() >= 0.0 && back.to_f64() <= 1.0);
        }

        #[test]
        fn product_stays_in_unit_interval(a in 0u64..1000, b in 0u64..1000, d in 1000u64..2000) {
            let p = ExactProb::new(a, d).unwrap();
            let q = ExactProb::new(b, d).unwrap();
            let r = &p * &q;
            prop_assert!(r <= p && r <= q);
        }
    }
}
