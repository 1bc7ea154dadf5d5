//! Half-integer quantum numbers stored as doubled integers.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A half-integer `j`, stored as `2j` so that `1/2` is held as `1`.
///
/// Used both for spin magnitudes (non-negative) and projections.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    #[inline]
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    #[inline]
    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    /// `(n - 1) / 2`, the spin carried by an `n`-dimensional irrep.
    #[inline]
    pub const fn from_dimension(n: u32) -> Self {
        HalfInt(n as i32 - 1)
    }

    #[inline]
    pub const fn twice(self) -> i32 {
        self.0
    }

    #[inline]
    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// The integer value, if there is one.
    #[inline]
    pub fn to_int(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    /// Dimension `2j + 1` of the irrep with this spin.
    #[inline]
    pub const fn multiplicity(self) -> i32 {
        self.0 + 1
    }

    #[inline]
    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// True when `self` is an admissible projection `m` of spin `j`:
    /// `|2m| <= 2j` and `2m ≡ 2j (mod 2)`.
    #[inline]
    pub fn is_projection_of(self, j: HalfInt) -> bool {
        j.0 >= 0 && self.0.abs() <= j.0 && (j.0 - self.0) % 2 == 0
    }

    /// Projections `j, j-1, …, -j` in descending order.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + ExactSizeIterator {
        let j = self.0;
        let count = if j < 0 { 0 } else { j as usize + 1 };
        (0..count).map(move |k| HalfInt(j - 2 * k as i32))
    }

    /// `lo, lo+1, …, hi` (empty when `hi < lo`).
    pub fn range_inclusive(lo: HalfInt, hi: HalfInt) -> impl Iterator<Item = HalfInt> {
        let n = if hi.0 < lo.0 { 0 } else { (hi.0 - lo.0) / 2 + 1 };
        (0..n).map(move |k| HalfInt(lo.0 + 2 * k))
    }

    /// `(-1)^self`; `self` must be an integer.
    #[inline]
    pub fn phase(self) -> i32 {
        debug_assert!(self.is_integer(), "phase of a half-integer exponent");
        if (self.0 / 2) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl From<i32> for HalfInt {
    fn from(n: i32) -> Self {
        HalfInt::from_int(n)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3"`, `"-1/2"`, `"3/2"` and decimal forms such as `"1.5"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidSpin(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => Ok(HalfInt::from_int(num)),
                "2" => Ok(HalfInt(num)),
                _ => Err(bad()),
            }
        } else if let Ok(n) = s.parse::<i32>() {
            Ok(HalfInt::from_int(n))
        } else {
            let x: f64 = s.parse().map_err(|_| bad())?;
            let twice = (2.0 * x).round();
            if (2.0 * x - twice).abs() > 1e-12 || twice.abs() > f64::from(i32::MAX) {
                return Err(bad());
            }
            Ok(HalfInt(twice as i32))
        }
    }
}
