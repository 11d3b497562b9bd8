//! Exact non-negative rational scalars used for edge weights, distances and costs.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::WeightError;

/// Exact rational used for quotients such as competitive ratios.
pub type Rational = Ratio<i128>;

/// A non-negative exact rational.
///
/// All solver comparisons go through this type, so ties are decided exactly.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight(Rational);

impl Weight {
    pub const ZERO: Weight = Weight(Ratio::new_raw(0, 1));

    pub fn new(numer: i128, denom: i128) -> Result<Self, WeightError> {
        if denom == 0 {
            return Err(WeightError::ZeroDenominator);
        }
        Self::from_rational(Ratio::new(numer, denom))
    }

    pub fn from_int(value: u64) -> Self {
        Weight(Ratio::from_integer(value as i128))
    }

    pub fn from_rational(value: Rational) -> Result<Self, WeightError> {
        if value.is_negative() {
            return Err(WeightError::Negative(value.to_string()));
        }
        Ok(Weight(value))
    }

    pub fn ratio(self) -> Rational {
        self.0
    }

    pub fn numer(self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }

    /// `self - rhs`, or `None` when the result would be negative.
    pub fn checked_sub(self, rhs: Weight) -> Option<Weight> {
        let diff = self.0 - rhs.0;
        (!diff.is_negative()).then_some(Weight(diff))
    }

    /// `self - rhs` clamped at zero.
    pub fn saturating_sub(self, rhs: Weight) -> Weight {
        self.checked_sub(rhs).unwrap_or(Weight::ZERO)
    }

    pub fn scale(self, factor: u64) -> Weight {
        Weight(self.0 * Ratio::from_integer(factor as i128))
    }

    pub fn to_f64(self) -> f64 {
        rational_to_f64(self.0)
    }

    /// Exact quotient `self / rhs`; `None` when `rhs` is zero.
    pub fn checked_div(self, rhs: Weight) -> Option<Rational> {
        (!rhs.is_zero()).then(|| self.0 / rhs.0)
    }

    pub fn one() -> Weight {
        Weight(Ratio::one())
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        // integer fast path; the long ring and path suites add millions of these
        if self.0.is_integer() && rhs.0.is_integer() {
            return Weight(Ratio::from_integer(self.0.numer() + rhs.0.numer()));
        }
        Weight(self.0 + rhs.0)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        *self = *self + rhs;
    }
}

/// Panics if the result would be negative; use [`Weight::checked_sub`] when that is possible.
impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        self.checked_sub(rhs)
            .unwrap_or_else(|| panic!("weight subtraction underflow: {self} - {rhs}"))
    }
}

impl Mul<u64> for Weight {
    type Output = Weight;
    fn mul(self, rhs: u64) -> Weight {
        self.scale(rhs)
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Weight> for Weight {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Weight {
        iter.copied().sum()
    }
}

impl From<u64> for Weight {
    fn from(value: u64) -> Self {
        Weight::from_int(value)
    }
}

/// Always `num/den`, never decimal, so values survive a text round trip exactly.
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `n` or `n/d`.
impl FromStr for Weight {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<i128>()
                .map_err(|_| WeightError::Parse(s.to_string()))
        };
        match s.split_once('/') {
            Some((n, d)) => Weight::new(parse(n)?, parse(d)?),
            None => Weight::new(parse(s)?, 1),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Formats a rational as `num/den`.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Lossy conversion for reporting.
pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
