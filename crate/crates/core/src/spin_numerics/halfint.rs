use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spin or projection quantum number, stored exactly as twice its value.
///
/// `HalfInt::from_twice(3)` is s = 3/2. Ordering follows the numeric value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn is_negative(self) -> bool {
        self.twice < 0
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// s(s+1).
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }

    /// 2s+1, or zero for negative values.
    pub fn multiplicity(self) -> usize {
        if self.twice < 0 {
            0
        } else {
            self.twice as usize + 1
        }
    }

    /// Projections s, s-1, ..., -s (the basis order used everywhere).
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let top = self.twice;
        (0..self.multiplicity() as i32).map(move |i| HalfInt::from_twice(top - 2 * i))
    }

    /// Position of projection `m` in the basis order, i.e. s - m.
    pub fn index_of(self, m: HalfInt) -> Result<usize> {
        let diff = self.twice - m.twice;
        if self.twice < 0 || m.twice.abs() > self.twice || diff % 2 != 0 {
            return Err(Error::InvalidProjection { s: self, m });
        }
        Ok((diff / 2) as usize)
    }

    /// (-1)^self for an integer-valued exponent.
    pub fn parity_sign(self) -> Result<f64> {
        if !self.is_integer() {
            return Err(Error::NonIntegerExponent(self));
        }
        Ok(if (self.twice / 2) % 2 == 0 { 1.0 } else { -1.0 })
    }

    /// Rounds a floating value to the nearest half-integer if it is one.
    pub fn from_f64(x: f64, tol: f64) -> Option<HalfInt> {
        let t = (2.0 * x).round();
        if (2.0 * x - t).abs() <= tol && t.abs() < f64::from(i32::MAX) {
            Some(HalfInt::from_twice(t as i32))
        } else {
            None
        }
    }

    /// Recovers j from a Casimir eigenvalue j(j+1).
    pub fn from_casimir(c: f64, tol: f64) -> Option<HalfInt> {
        let j = ((1.0 + 4.0 * c.max(0.0)).sqrt() - 1.0) / 2.0;
        let h = HalfInt::from_f64(j, 1e-6)?;
        ((h.casimir() - c).abs() <= tol).then_some(h)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `3/2`, `-1/2`, `2` or a decimal such as `1.5`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidSpin(text.to_string());
        let t = text.trim();
        if let Some((num, den)) = t.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "1" => Ok(HalfInt::integer(num)),
                "2" => Ok(HalfInt::from_twice(num)),
                _ => Err(bad()),
            };
        }
        if let Ok(n) = t.parse::<i32>() {
            return Ok(HalfInt::integer(n));
        }
        let x: f64 = t.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        HalfInt::from_f64(x, 0.0).ok_or_else(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("1.5".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("-1/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(-1));
        assert_eq!("2".parse::<HalfInt>().unwrap(), HalfInt::integer(2));
        assert_eq!("4/2".parse::<HalfInt>().unwrap(), HalfInt::integer(2));
        assert!("1.25".parse::<HalfInt>().is_err());
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("abc".parse::<HalfInt>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for t in -7..8 {
            let h = HalfInt::from_twice(t);
            assert_eq!(h.to_string().parse::<HalfInt>().unwrap(), h);
        }
    }

    #[test]
    fn parity_needs_integer_exponent() {
        let s = HalfInt::from_twice(3);
        assert_eq!((s - HalfInt::from_twice(1)).parity_sign().unwrap(), -1.0);
        assert_eq!((s - HalfInt::from_twice(-1)).parity_sign().unwrap(), 1.0);
        assert_eq!(HalfInt::integer(-3).parity_sign().unwrap(), -1.0);
        assert!(matches!(
            (s - HalfInt::ONE).parity_sign(),
            Err(Error::NonIntegerExponent(_))
        ));
    }

    #[test]
    fn projections_and_indices() {
        let s = HalfInt::from_twice(3);
        let ms: Vec<_> = s.projections().map(|m| m.twice()).collect();
        assert_eq!(ms, vec![3, 1, -1, -3]);
        assert_eq!(s.index_of(HalfInt::from_twice(-1)).unwrap(), 2);
        assert!(s.index_of(HalfInt::ONE).is_err());
        assert!(s.index_of(HalfInt::from_twice(5)).is_err());
        assert_eq!(HalfInt::ZERO.projections().count(), 1);
    }

    #[test]
    fn casimir_inversion() {
        for t in 0..10 {
            let j = HalfInt::from_twice(t);
            assert_eq!(HalfInt::from_casimir(j.casimir(), 1e-9), Some(j));
        }
        assert_eq!(HalfInt::from_casimir(1.0, 1e-9), None);
    }

    #[test]
    fn serializes_as_twice() {
        let json = serde_json::to_string(&HalfInt::from_twice(3)).unwrap();
        assert_eq!(json, r#"{"twice":3}"#);
    }
}
