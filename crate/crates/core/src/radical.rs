//! Signed square roots of rationals, and exact sums of them.
//!
//! Every Wigner symbol, every entry of the coupling matrix and every
//! closed-form point coordinate in this crate has the form `s·√(n/d)`.
//! Sums of such values are not closed under that form, so [`RadicalSum`]
//! keeps them as a rational combination of distinct square-free radicals,
//! which makes exact comparison of identities possible.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The value `sign · √(numerator / denominator)`.
///
/// Kept in lowest terms; `sign == 0` exactly when `numerator == 0`, and the
/// zero value always has denominator 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactRadical {
    sign: i8,
    numerator: BigUint,
    denominator: BigUint,
}

impl Default for ExactRadical {
    fn default() -> Self {
        Self::zero()
    }
}

impl ExactRadical {
    pub fn zero() -> Self {
        ExactRadical { sign: 0, numerator: BigUint::zero(), denominator: BigUint::one() }
    }

    pub fn one() -> Self {
        ExactRadical { sign: 1, numerator: BigUint::one(), denominator: BigUint::one() }
    }

    /// `sign · √(numerator / denominator)`; panics on a zero denominator.
    pub fn new(sign: i8, numerator: BigUint, denominator: BigUint) -> Self {
        assert!(!denominator.is_zero(), "zero denominator under radical");
        if sign == 0 || numerator.is_zero() {
            return Self::zero();
        }
        let g = numerator.gcd(&denominator);
        ExactRadical {
            sign: sign.signum(),
            numerator: numerator / &g,
            denominator: denominator / g,
        }
    }

    /// The value whose signed square is `q`, i.e. `sign(q)·√|q|`.
    pub fn from_signed_square(q: &BigRational) -> Self {
        let sign = match q.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        Self::new(sign, q.numer().magnitude().clone(), q.denom().magnitude().clone())
    }

    /// `√r` for a non-negative rational; `None` when `r < 0`.
    pub fn sqrt(r: &BigRational) -> Option<Self> {
        (!r.is_negative()).then(|| Self::from_signed_square(r))
    }

    /// `√(p/q)` for small integers, `p >= 0`, `q > 0`.
    pub fn sqrt_ratio(p: i64, q: i64) -> Self {
        assert!(p >= 0 && q > 0, "sqrt_ratio needs p >= 0, q > 0 (got {p}/{q})");
        Self::new(1, BigUint::from(p as u64), BigUint::from(q as u64))
    }

    /// The rational `q` itself.
    pub fn from_rational(q: &BigRational) -> Self {
        Self::with_coefficient(q, &BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// `c · √r` with `r >= 0`.
    pub fn with_coefficient(c: &BigRational, r: &BigRational) -> Self {
        debug_assert!(!r.is_negative());
        let sq = c * c * r;
        let sign = if c.is_negative() { -1 } else if c.is_zero() { 0 } else { 1 };
        Self::new(sign, sq.numer().magnitude().clone(), sq.denom().magnitude().clone())
    }

    #[inline]
    pub fn sign(&self) -> i8 {
        self.sign
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    #[inline]
    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    #[inline]
    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// `|x|²`.
    pub fn square(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(self.denominator.clone()),
        )
    }

    /// `sign(x)·x²`.
    pub fn signed_square(&self) -> BigRational {
        let sq = self.square();
        if self.sign < 0 {
            -sq
        } else {
            sq
        }
    }

    /// The value as a rational, if it is one.
    pub fn to_rational(&self) -> Option<BigRational> {
        let n = exact_sqrt(&self.numerator)?;
        let d = exact_sqrt(&self.denominator)?;
        let q = BigRational::new(BigInt::from(n), BigInt::from(d));
        Some(if self.sign < 0 { -q } else { q })
    }

    /// Nearest-double conversion, accurate to about one ulp.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        // floor(√(n·4^k/d)) carries at least 64 significant bits, then scale by 2^-k.
        let target = 130i64;
        let k = ((target + self.denominator.bits() as i64 - self.numerator.bits() as i64) / 2).max(0);
        let scaled = (&self.numerator << (2 * k as usize)) / &self.denominator;
        let root = scaled.sqrt();
        let mantissa = root.to_f64().unwrap_or(f64::INFINITY);
        let value = scale_pow2(mantissa, -k);
        if self.sign < 0 {
            -value
        } else {
            value
        }
    }

    /// Splits `|x| = c·√f` with rational `c > 0` and square-free integer `f`.
    ///
    /// Square-freeness is exact whenever every prime factor of the radicand is
    /// below the trial-division bound (always true for factorial-derived values);
    /// otherwise a residual perfect square is still removed.
    pub fn squarefree_split(&self) -> (BigRational, BigUint) {
        if self.is_zero() {
            return (BigRational::zero(), BigUint::one());
        }
        // √(n/d) = √(n·d)/d
        let m = &self.numerator * &self.denominator;
        let (outer, inner) = split_square(&m);
        let c = BigRational::new(BigInt::from(outer), BigInt::from(self.denominator.clone()));
        (c, inner)
    }
}

fn scale_pow2(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    x * 2f64.powi(e as i32)
}

fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

const TRIAL_DIVISION_BOUND: u64 = 100_000;

/// `m = a²·f`, returning `(a, f)` with `f` square-free (see [`ExactRadical::squarefree_split`]).
fn split_square(m: &BigUint) -> (BigUint, BigUint) {
    let mut rest = m.clone();
    let mut outer = BigUint::one();
    let mut inner = BigUint::one();
    let mut p: u64 = 2;
    while p <= TRIAL_DIVISION_BOUND {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut count = 0u32;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            count += 1;
        }
        if count > 0 {
            outer *= bp.pow(count / 2);
            if count % 2 == 1 {
                inner *= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    match exact_sqrt(&rest) {
        Some(r) => outer *= r,
        None => inner *= rest,
    }
    (outer, inner)
}

impl Mul for &ExactRadical {
    type Output = ExactRadical;
    fn mul(self, rhs: &ExactRadical) -> ExactRadical {
        if self.is_zero() || rhs.is_zero() {
            return ExactRadical::zero();
        }
        ExactRadical::new(
            self.sign * rhs.sign,
            &self.numerator * &rhs.numerator,
            &self.denominator * &rhs.denominator,
        )
    }
}

impl Mul for ExactRadical {
    type Output = ExactRadical;
    fn mul(self, rhs: ExactRadical) -> ExactRadical {
        &self * &rhs
    }
}

impl Mul<i64> for &ExactRadical {
    type Output = ExactRadical;
    fn mul(self, rhs: i64) -> ExactRadical {
        self * &ExactRadical::from_integer(rhs)
    }
}

impl Mul<i64> for ExactRadical {
    type Output = ExactRadical;
    fn mul(self, rhs: i64) -> ExactRadical {
        &self * rhs
    }
}

impl Div for &ExactRadical {
    type Output = ExactRadical;
    fn div(self, rhs: &ExactRadical) -> ExactRadical {
        assert!(!rhs.is_zero(), "division by zero radical");
        if self.is_zero() {
            return ExactRadical::zero();
        }
        ExactRadical::new(
            self.sign * rhs.sign,
            &self.numerator * &rhs.denominator,
            &self.denominator * &rhs.numerator,
        )
    }
}

impl Neg for ExactRadical {
    type Output = ExactRadical;
    fn neg(mut self) -> ExactRadical {
        self.sign = -self.sign;
        self
    }
}

impl Neg for &ExactRadical {
    type Output = ExactRadical;
    fn neg(self) -> ExactRadical {
        -self.clone()
    }
}

impl From<&ExactRadical> for f64 {
    fn from(x: &ExactRadical) -> f64 {
        x.to_f64()
    }
}

impl fmt::Display for ExactRadical {
    /// `0`, `-3/4`, `sqrt(5/3)`, `-sqrt(7)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let minus = if self.sign < 0 { "-" } else { "" };
        if let Some(q) = self.to_rational() {
            return write!(f, "{q}");
        }
        if self.denominator.is_one() {
            write!(f, "{minus}sqrt({})", self.numerator)
        } else {
            write!(f, "{minus}sqrt({}/{})", self.numerator, self.denominator)
        }
    }
}

/// An exact finite sum `Σ cᵢ·√fᵢ` over distinct square-free `fᵢ`.
///
/// Distinct square-free radicals are linearly independent over the
/// rationals, so the sum is zero iff every coefficient is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RadicalSum {
    terms: BTreeMap<BigUint, BigRational>,
}

impl RadicalSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_radical(&mut self, x: &ExactRadical) {
        if x.is_zero() {
            return;
        }
        let (c, f) = x.squarefree_split();
        let c = if x.sign() < 0 { -c } else { c };
        let entry = self.terms.entry(f).or_insert_with(BigRational::zero);
        *entry += c;
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct square-free radicals with non-zero coefficient.
    pub fn num_classes(&self) -> usize {
        self.terms.len()
    }

    /// The sum as a single radical, when it is one.
    pub fn to_radical(&self) -> Option<ExactRadical> {
        match self.terms.len() {
            0 => Some(ExactRadical::zero()),
            1 => {
                let (f, c) = self.terms.iter().next()?;
                let r = BigRational::from_integer(BigInt::from(f.clone()));
                Some(ExactRadical::with_coefficient(c, &r))
            }
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(f, c)| {
                let r = BigRational::from_integer(BigInt::from(f.clone()));
                ExactRadical::with_coefficient(c, &r).to_f64()
            })
            .sum()
    }
}

impl Add<&ExactRadical> for RadicalSum {
    type Output = RadicalSum;
    fn add(mut self, rhs: &ExactRadical) -> RadicalSum {
        self.add_radical(rhs);
        self
    }
}

impl<'a> std::iter::Sum<&'a ExactRadical> for RadicalSum {
    fn sum<I: Iterator<Item = &'a ExactRadical>>(iter: I) -> Self {
        iter.fold(RadicalSum::new(), |acc, x| acc + x)
    }
}

impl std::iter::Sum<ExactRadical> for RadicalSum {
    fn sum<I: Iterator<Item = ExactRadical>>(iter: I) -> Self {
        iter.fold(RadicalSum::new(), |acc, x| acc + &x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn lowest_terms() {
        let x = ExactRadical::sqrt_ratio(6, 4);
        assert_eq!(x.numerator(), &BigUint::from(3u32));
        assert_eq!(x.denominator(), &BigUint::from(2u32));
        assert_eq!(ExactRadical::new(-1, BigUint::zero(), BigUint::from(7u32)), ExactRadical::zero());
    }

    #[test]
    fn display() {
        assert_eq!(ExactRadical::from_signed_square(&rat(-5, 3)).to_string(), "-sqrt(5/3)");
        assert_eq!(ExactRadical::sqrt_ratio(7, 1).to_string(), "sqrt(7)");
        assert_eq!(ExactRadical::from_rational(&rat(-3, 4)).to_string(), "-3/4");
        assert_eq!(ExactRadical::zero().to_string(), "0");
    }

    #[test]
    fn to_f64_matches_libm() {
        let x = ExactRadical::sqrt_ratio(2, 1);
        assert_eq!(x.to_f64(), std::f64::consts::SQRT_2);
        let y = ExactRadical::from_signed_square(&rat(-1, 3));
        assert!((y.to_f64() + (1.0f64 / 3.0).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn squarefree_split_extracts_squares() {
        // √(72/5) = √360/5 = 6√10/5
        let x = ExactRadical::sqrt_ratio(72, 5);
        let (c, f) = x.squarefree_split();
        assert_eq!(c, rat(6, 5));
        assert_eq!(f, BigUint::from(10u32));
    }

    #[test]
    fn radical_sum_cancels_and_collects() {
        let a = ExactRadical::sqrt_ratio(8, 1); // 2√2
        let b = -ExactRadical::sqrt_ratio(2, 1); // -√2
        let c = ExactRadical::sqrt_ratio(3, 1);
        let s: RadicalSum = [a.clone(), b.clone(), c.clone()].iter().sum();
        assert_eq!(s.num_classes(), 2);
        assert!(s.to_radical().is_none());
        let t: RadicalSum = [a, b.clone(), b].iter().sum();
        assert!(t.is_zero());
        assert_eq!(t.to_radical(), Some(ExactRadical::zero()));
    }

    proptest! {
        #[test]
        fn float_square_round_trips(p in 0i64..1_000_000, q in 1i64..1_000_000, neg in any::<bool>()) {
            let r = rat(if neg { -p } else { p }, q);
            let x = ExactRadical::from_signed_square(&r);
            let f = x.to_f64();
            let expected = (p as f64) / (q as f64);
            prop_assert!((f * f - expected).abs() <= 4.0 * f64::EPSILON * expected.max(f64::MIN_POSITIVE));
            prop_assert_eq!(f < 0.0, neg && p != 0);
        }

        #[test]
        fn product_is_exact(p1 in 0i64..500, q1 in 1i64..500, p2 in 0i64..500, q2 in 1i64..500) {
            let x = ExactRadical::sqrt_ratio(p1, q1);
            let y = ExactRadical::sqrt_ratio(p2, q2);
            prop_assert_eq!((&x * &y).square(), rat(p1, q1) * rat(p2, q2));
        }
    }
}
