//! Exact Wigner 3-j and 6-j symbols and Clebsch–Gordan coefficients.
//!
//! Symbols are evaluated with the Racah single-sum formulas over big
//! integers and returned as [`ExactRadical`]s. Condon–Shortley phases
//! throughout. Arguments that violate a selection rule give exact zero.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::radical::{ExactRadical, RadicalSum};
use crate::spin::HalfInt;

static FACTORIALS: RwLock<Vec<BigInt>> = RwLock::new(Vec::new());

fn factorial(n: i32) -> BigInt {
    debug_assert!(n >= 0);
    let n = n as usize;
    {
        let table = FACTORIALS.read().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = FACTORIALS.write().unwrap_or_else(|e| e.into_inner());
    if table.is_empty() {
        table.push(BigInt::one());
    }
    while table.len() <= n {
        let k = table.len();
        let next = &table[k - 1] * BigInt::from(k);
        table.push(next);
    }
    table[n].clone()
}

type SymbolCache = RwLock<HashMap<[i32; 6], ExactRadical>>;

fn three_j_cache() -> &'static SymbolCache {
    static CACHE: OnceLock<SymbolCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn six_j_cache() -> &'static SymbolCache {
    static CACHE: OnceLock<SymbolCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Looks up `key`, computing and inserting on a miss. Concurrent misses may
/// both compute; they insert identical values.
fn memoized(cache: &SymbolCache, key: [i32; 6], compute: impl FnOnce() -> ExactRadical) -> ExactRadical {
    if let Some(v) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return v.clone();
    }
    let value = compute();
    cache
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .entry(key)
        .or_insert(value)
        .clone()
}

/// Triangle rule on doubled values, including integer perimeter.
#[inline]
fn triangle(ta: i32, tb: i32, tc: i32) -> bool {
    ta >= 0 && tb >= 0 && tc >= 0 && tc <= ta + tb && tc >= (ta - tb).abs() && (ta + tb + tc) % 2 == 0
}

/// Δ(abc) = (a+b−c)!(a−b+c)!(−a+b+c)!/(a+b+c+1)!, doubled inputs.
fn triangle_coefficient(ta: i32, tb: i32, tc: i32) -> BigRational {
    BigRational::new(
        factorial((ta + tb - tc) / 2) * factorial((ta - tb + tc) / 2) * factorial((-ta + tb + tc) / 2),
        factorial((ta + tb + tc) / 2 + 1),
    )
}

#[inline]
fn sign_of_parity(n: i32) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn three_j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> ExactRadical {
    if !(m1.is_projection_of(j1) && m2.is_projection_of(j2) && m3.is_projection_of(j3)) {
        return ExactRadical::zero();
    }
    let (tj1, tj2, tj3) = (j1.twice(), j2.twice(), j3.twice());
    let (tm1, tm2, tm3) = (m1.twice(), m2.twice(), m3.twice());
    if tm1 + tm2 + tm3 != 0 || !triangle(tj1, tj2, tj3) {
        return ExactRadical::zero();
    }
    memoized(three_j_cache(), [tj1, tj2, tj3, tm1, tm2, tm3], || {
        racah_three_j(tj1, tj2, tj3, tm1, tm2, tm3)
    })
}

fn racah_three_j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> ExactRadical {
    let h = |t: i32| t / 2;
    let radicand = triangle_coefficient(tj1, tj2, tj3)
        * BigRational::from_integer(
            factorial(h(tj1 + tm1))
                * factorial(h(tj1 - tm1))
                * factorial(h(tj2 + tm2))
                * factorial(h(tj2 - tm2))
                * factorial(h(tj3 + tm3))
                * factorial(h(tj3 - tm3)),
        );

    let kmin = 0.max(h(tj2 - tj3 - tm1)).max(h(tj1 - tj3 + tm2));
    let kmax = h(tj1 + tj2 - tj3).min(h(tj1 - tm1)).min(h(tj2 + tm2));
    let mut series = BigRational::zero();
    for k in kmin..=kmax {
        let denom = factorial(k)
            * factorial(h(tj3 - tj2 + tm1) + k)
            * factorial(h(tj3 - tj1 - tm2) + k)
            * factorial(h(tj1 + tj2 - tj3) - k)
            * factorial(h(tj1 - tm1) - k)
            * factorial(h(tj2 + tm2) - k);
        let term = BigRational::new(BigInt::from(sign_of_parity(k)), denom);
        series += term;
    }
    let phase = sign_of_parity(h(tj1 - tj2 - tm3));
    let coeff = series * BigRational::from_integer(BigInt::from(phase));
    ExactRadical::with_coefficient(&coeff, &radicand)
}

/// Wigner 6-j symbol `{a b c; d e f}`.
///
/// Zero unless the triads (a,b,c), (a,e,f), (d,b,f), (d,e,c) all satisfy
/// the triangle rule with integer perimeter.
pub fn six_j(a: HalfInt, b: HalfInt, c: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> ExactRadical {
    let t = [a.twice(), b.twice(), c.twice(), d.twice(), e.twice(), f.twice()];
    let [ta, tb, tc, td, te, tf] = t;
    if !(triangle(ta, tb, tc) && triangle(ta, te, tf) && triangle(td, tb, tf) && triangle(td, te, tc)) {
        return ExactRadical::zero();
    }
    memoized(six_j_cache(), t, || racah_six_j(ta, tb, tc, td, te, tf))
}

fn racah_six_j(ta: i32, tb: i32, tc: i32, td: i32, te: i32, tf: i32) -> ExactRadical {
    let radicand = triangle_coefficient(ta, tb, tc)
        * triangle_coefficient(ta, te, tf)
        * triangle_coefficient(td, tb, tf)
        * triangle_coefficient(td, te, tc);
    let alphas = [(ta + tb + tc) / 2, (ta + te + tf) / 2, (td + tb + tf) / 2, (td + te + tc) / 2];
    let betas = [(ta + tb + td + te) / 2, (ta + tc + td + tf) / 2, (tb + tc + te + tf) / 2];
    let tmin = *alphas.iter().max().expect("four triads");
    let tmax = *betas.iter().min().expect("three pairs");
    let mut series = BigRational::zero();
    for t in tmin..=tmax {
        let mut denom = BigInt::one();
        for &al in &alphas {
            denom *= factorial(t - al);
        }
        for &be in &betas {
            denom *= factorial(be - t);
        }
        series += BigRational::new(factorial(t + 1) * sign_of_parity(t), denom);
    }
    ExactRadical::with_coefficient(&series, &radicand)
}

/// Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | J M⟩`, Condon–Shortley phase:
/// `(−1)^(j1−j2+M) √(2J+1) (j1 j2 J; m1 m2 −M)`.
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> ExactRadical {
    let w = three_j(j1, j2, j, m1, m2, -m);
    if w.is_zero() {
        return w;
    }
    let phase = (j1 - j2 + m).phase();
    &w * &ExactRadical::sqrt_ratio(i64::from(j.multiplicity()), 1) * i64::from(phase)
}

/// Admissible `K` for `{a b J; c d K}`: `K ∈ a⊗d ∩ c⊗b`.
fn recoupling_range(a: HalfInt, b: HalfInt, c: HalfInt, d: HalfInt) -> impl Iterator<Item = HalfInt> {
    let lo = (a - d).abs().max((b - c).abs());
    let hi = (a + d).min(b + c);
    let consistent = (a + d - b - c).is_integer();
    HalfInt::range_inclusive(lo, if consistent { hi } else { lo - HalfInt::ONE })
}

/// `Σ_K (2J+1)(2K+1){a b J; c d K}{a b J'; c d K}`, which equals `δ_{JJ'}`.
pub fn verify_orthogonality_sum(a: HalfInt, b: HalfInt, c: HalfInt, d: HalfInt, j: HalfInt, jp: HalfInt) -> ExactRadical {
    let sum: RadicalSum = recoupling_range(a, b, c, d)
        .map(|k| {
            let weight = i64::from(j.multiplicity()) * i64::from(k.multiplicity());
            &six_j(a, b, j, c, d, k) * &six_j(a, b, jp, c, d, k) * weight
        })
        .sum();
    sum.to_radical().expect("orthogonality sum collapses to a rational")
}

/// `Σ_K (−1)^(K+J+J')(2K+1){a b J; c d K}{a c J'; b d K}`, which equals
/// `{a b J; d c J'}`.
///
/// `K+J+J'` is always an integer, so the phase is real even when `K` runs
/// over half-integers. For integer `K` this is `(−1)^(J+J')` times the
/// plain `Σ_K (−1)^K …` form.
pub fn verify_recoupling_sum(a: HalfInt, b: HalfInt, c: HalfInt, d: HalfInt, j: HalfInt, jp: HalfInt) -> ExactRadical {
    let sum: RadicalSum = recoupling_range(a, b, c, d)
        .filter_map(|k| {
            let exponent = k + j + jp;
            if !exponent.is_integer() {
                // only reachable for inputs whose 6-j symbols all vanish
                return None;
            }
            let w = i64::from(exponent.phase()) * i64::from(k.multiplicity());
            Some(&six_j(a, b, j, c, d, k) * &six_j(a, c, jp, b, d, k) * w)
        })
        .sum();
    sum.to_radical().expect("recoupling sum collapses to a single 6-j symbol")
}

/// The two sums of the `Γ`/`D̃''` identity for spins `j1 <= j2` (dimensions
/// `n1`, `n2`):
///
/// ```text
/// S1 = Σ_{K=0}^{n1−1}        (2K+1){j1 j2 j2−j1; j2 j1 K}{j1 j2 j1+j2; j2 j1 K}
/// S2 = Σ_{K=0}^{n1−1} (−1)^K (2K+1){j1 j2 j2−j1; j2 j1 K}{j1 j2 j1+j2; j2 j1 K}
/// ```
///
/// `S1 = 0` by orthogonality and `S2 = −1/n2`.
pub fn boundary_identity_sums(n1: u32, n2: u32) -> (ExactRadical, ExactRadical) {
    let j1 = HalfInt::from_dimension(n1);
    let j2 = HalfInt::from_dimension(n2);
    let (jlo, jhi) = (j2 - j1, j1 + j2);
    let mut first = RadicalSum::new();
    let mut second = RadicalSum::new();
    for k in 0..n1 as i32 {
        let k = HalfInt::from_int(k);
        let term = &six_j(j1, j2, jlo, j2, j1, k) * &six_j(j1, j2, jhi, j2, j1, k) * i64::from(k.multiplicity());
        first.add_radical(&term);
        second.add_radical(&(&term * i64::from(k.phase())));
    }
    (
        first.to_radical().expect("single radical"),
        second.to_radical().expect("single radical"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn three_j_k0_row() {
        // (1 1 0; 0 0 0) = −1/√3
        let v = three_j(h(2), h(2), h(0), h(0), h(0), h(0));
        assert_eq!(v, -ExactRadical::sqrt_ratio(1, 3));
    }

    #[test]
    fn three_j_selection_rules() {
        assert!(three_j(h(2), h(2), h(2), h(2), h(0), h(0)).is_zero());
        assert!(three_j(h(2), h(2), h(6), h(0), h(0), h(0)).is_zero());
        assert!(three_j(h(2), h(2), h(2), h(4), h(-4), h(0)).is_zero());
        // odd perimeter
        assert!(three_j(h(1), h(1), h(1), h(1), h(-1), h(0)).is_zero());
    }

    #[test]
    fn three_j_two_halves() {
        // (1/2 1/2 1; 1/2 −1/2 0) = +1/√6
        assert_eq!(three_j(h(1), h(1), h(2), h(1), h(-1), h(0)), ExactRadical::sqrt_ratio(1, 6));
    }

    #[test]
    fn six_j_selection_zero() {
        assert!(six_j(h(2), h(2), h(6), h(2), h(2), h(2)).is_zero());
    }

    #[test]
    fn six_j_one_zero_argument() {
        // {j1 j2 J; j2 j1 0} = (−1)^(j1+j2+J)/√((2j1+1)(2j2+1))
        for tj1 in 0..7 {
            for tj2 in 0..7 {
                let (j1, j2) = (h(tj1), h(tj2));
                let mut tj = (tj1 - tj2).abs();
                while tj <= tj1 + tj2 {
                    let jj = h(tj);
                    let expected = ExactRadical::sqrt_ratio(1, i64::from((tj1 + 1) * (tj2 + 1)))
                        * i64::from((j1 + j2 + jj).phase());
                    assert_eq!(six_j(j1, j2, jj, j2, j1, h(0)), expected);
                    tj += 2;
                }
            }
        }
    }

    #[test]
    fn cg_top_state_and_singlet() {
        for tj in 0..8 {
            let j = h(tj);
            assert_eq!(clebsch_gordan(j, j, j, j, j + j, j + j), ExactRadical::one());
        }
        assert_eq!(clebsch_gordan(h(1), h(1), h(1), h(-1), h(0), h(0)), ExactRadical::sqrt_ratio(1, 2));
        assert_eq!(clebsch_gordan(h(1), h(-1), h(1), h(1), h(0), h(0)), -ExactRadical::sqrt_ratio(1, 2));
        assert!(clebsch_gordan(h(1), h(1), h(1), h(1), h(2), h(0)).is_zero());
    }

    #[test]
    fn orthogonality_examples() {
        let (j1, j2) = (h(3), h(5));
        let one = verify_orthogonality_sum(j1, j2, j2, j1, j2 - j1, j2 - j1);
        assert_eq!(one, ExactRadical::one());
        let zero = verify_orthogonality_sum(j1, j2, j2, j1, j2 - j1, j1 + j2);
        assert!(zero.is_zero());
    }

    #[test]
    fn recoupling_degenerate() {
        let z = HalfInt::ZERO;
        assert_eq!(verify_recoupling_sum(z, z, z, z, z, z), ExactRadical::one());
    }

    #[test]
    fn boundary_sums_examples() {
        let (s1, s2) = boundary_identity_sums(4, 4);
        assert!(s1.is_zero());
        assert_eq!(s2, ExactRadical::from_rational(&rat(-1, 4)));
        let (s1, s2) = boundary_identity_sums(4, 6);
        assert!(s1.is_zero());
        assert_eq!(s2, ExactRadical::from_rational(&rat(-1, 6)));
    }

    #[test]
    fn cache_is_consistent_across_threads() {
        let handles: Vec<_> = (0..8)
            .map(|_| {
                std::thread::spawn(|| {
                    (0..9).map(|t| six_j(h(7), h(9), h(2 * t), h(9), h(7), h(4)).to_f64()).collect::<Vec<_>>()
                })
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|t| t.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }
}
