//! Closed-form geometry of the invariant state space.
//!
//! On 4⊗N the states form the tetrahedron `ABCD` in `(β1, β2, β3)`; its
//! `ϑ₁` image is `A'B'C'D'` and their intersection (the PPT set) is
//! `DD'EE'FF'GG'`. For general even `n1` the `ϑ₁`-invariant states form a
//! polytope in `(β2, β4, …, β_{n1−2})`, and the hyperplane `Γ` separates the
//! states detected by the Breuer map from those that are not.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{breuer_detects, partial_time_reversal, symmetrize};
use crate::radical::ExactRadical;
use crate::repr::{
    alpha_to_beta, beta_to_alpha, build_l_matrix, projector_state, AlphaVector, BetaVector, SpinPair,
};
use crate::spin::HalfInt;
use crate::wigner::six_j;

/// Affine functional `constant + Σ_i coefficients[i] · β_{2(i+1)}` over the
/// even coordinates of a `ϑ₁`-invariant β.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hyperplane {
    #[serde(serialize_with = "serialize_system")]
    pub system: SpinPair,
    pub label: String,
    pub constant: f64,
    pub coefficients: Vec<f64>,
    #[serde(skip)]
    pub exact: Option<(ExactRadical, Vec<ExactRadical>)>,
}

fn serialize_system<S: serde::Serializer>(s: &SpinPair, ser: S) -> std::result::Result<S::Ok, S::Error> {
    [s.n1(), s.n2()].serialize(ser)
}

impl Hyperplane {
    fn from_exact(system: SpinPair, label: String, constant: ExactRadical, coefficients: Vec<ExactRadical>) -> Self {
        Hyperplane {
            system,
            label,
            constant: constant.to_f64(),
            coefficients: coefficients.iter().map(ExactRadical::to_f64).collect(),
            exact: Some((constant, coefficients)),
        }
    }

    pub fn evaluate_even(&self, even: &[f64]) -> f64 {
        self.constant + self.coefficients.iter().zip(even).map(|(c, x)| c * x).sum::<f64>()
    }

    /// Value at β; odd coordinates are ignored.
    pub fn evaluate(&self, beta: &BetaVector) -> f64 {
        self.evaluate_even(&beta.even_coords())
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// A labelled point with exact coordinates when a closed form exists.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedPoint {
    pub label: String,
    pub beta: BetaVector,
    pub exact: Option<Vec<ExactRadical>>,
}

impl NamedPoint {
    fn from_exact(system: SpinPair, label: &str, exact: Vec<ExactRadical>) -> Self {
        let beta = BetaVector::new(system, exact.iter().map(ExactRadical::to_f64).collect()).expect("n1 coordinates");
        NamedPoint { label: label.to_string(), beta, exact: Some(exact) }
    }

    /// The `ϑ₁` image, labelled with a prime.
    pub fn primed(&self) -> NamedPoint {
        let exact = self.exact.as_ref().map(|e| {
            e.iter().enumerate().map(|(k, x)| if k % 2 == 1 { -x } else { x.clone() }).collect()
        });
        NamedPoint { label: format!("{}'", self.label), beta: partial_time_reversal(&self.beta), exact }
    }
}

/// One extreme state per `J`: `α_J = √(n1 n2/(2J+1))`, others zero.
pub fn alpha_extreme_points(system: SpinPair) -> Vec<AlphaVector> {
    system.j_values().into_iter().map(|j| projector_state(system, j).expect("J in range")).collect()
}

fn require_4xn(n: u32) -> Result<SpinPair> {
    if n < 4 {
        return Err(Error::invalid_system(4, n, "4xN geometry needs N >= 4"));
    }
    SpinPair::new(4, n)
}

fn require_even_n1(system: SpinPair) -> Result<()> {
    if !system.supports_breuer() {
        return Err(Error::CriterionInapplicable(system.n1()));
    }
    Ok(())
}

/// `(cn/cd) · √(p/q)`.
fn cr(cn: i64, cd: i64, p: i64, q: i64) -> ExactRadical {
    let c = BigRational::new(BigInt::from(cn), BigInt::from(cd));
    let r = BigRational::new(BigInt::from(p), BigInt::from(q));
    ExactRadical::with_coefficient(&c, &r)
}

/// The coupling matrix of 4⊗N in closed form, row `K`, column `J = j−3/2 … j+3/2`.
pub fn l_matrix_4xn(n: u32) -> Result<[[ExactRadical; 4]; 4]> {
    require_4xn(n)?;
    let n = i64::from(n);
    Ok([
        [cr(1, 2, n - 3, n), cr(1, 2, n - 1, n), cr(1, 2, n + 1, n), cr(1, 2, n + 3, n)],
        [
            cr(-3, 2, (n - 3) * (n + 1), 5 * (n - 1) * n),
            cr(-(n + 7), 2, 1, 5 * n * (n + 1)),
            cr(n - 7, 2, 1, 5 * n * (n - 1)),
            cr(3, 2, (n + 3) * (n - 1), 5 * (n + 1) * n),
        ],
        [
            cr(1, 2, (n - 3) * (n + 1) * (n + 2), n * (n - 1) * (n - 2)),
            cr(-(n - 5), 2, n + 2, (n - 2) * n * (n + 1)),
            cr(-(n + 5), 2, n - 2, (n - 1) * n * (n + 2)),
            cr(1, 2, (n - 1) * (n - 2) * (n + 3), n * (n + 1) * (n + 2)),
        ],
        [
            cr(-1, 2, (n + 1) * (n + 2) * (n + 3), 5 * (n - 2) * (n - 1) * n),
            cr(3, 2, (n * n - 9) * (n + 2), 5 * (n - 2) * n * (n + 1)),
            cr(-3, 2, (n * n - 9) * (n - 2), 5 * (n - 1) * n * (n + 2)),
            cr(1, 2, (n - 3) * (n - 2) * (n - 1), 5 * n * (n + 1) * (n + 2)),
        ],
    ])
}

fn point4(system: SpinPair, label: &str, b1: ExactRadical, b2: ExactRadical, b3: ExactRadical) -> NamedPoint {
    NamedPoint::from_exact(system, label, vec![ExactRadical::one(), b1, b2, b3])
}

/// Vertices `A, B, C, D` of the 4⊗N state tetrahedron (images of the
/// extreme states for `J = j−3/2 … j+3/2`).
pub fn vertices_4xn(n: u32) -> Result<Vec<NamedPoint>> {
    let s = require_4xn(n)?;
    let n = i64::from(n);
    Ok(vec![
        point4(
            s,
            "A",
            cr(-3, 1, n + 1, 5 * (n - 1)),
            cr(1, 1, (n + 1) * (n + 2), (n - 1) * (n - 2)),
            cr(-1, 1, (n + 1) * (n + 2) * (n + 3), 5 * (n - 1) * (n - 2) * (n - 3)),
        ),
        point4(
            s,
            "B",
            cr(-(n + 7), n + 1, n + 1, 5 * (n - 1)),
            cr(-(n - 5), n + 1, (n + 1) * (n + 2), (n - 1) * (n - 2)),
            cr(3, 1, (n + 2) * (n + 3) * (n - 3), 5 * (n - 2) * (n - 1) * (n + 1)),
        ),
        point4(
            s,
            "C",
            cr(n - 7, n + 1, n + 1, 5 * (n - 1)),
            cr(-(n + 5), n - 1, (n - 1) * (n - 2), (n + 1) * (n + 2)),
            cr(-3, 1, (n - 2) * (n - 3) * (n + 3), 5 * (n + 2) * (n - 1) * (n + 1)),
        ),
        point4(
            s,
            "D",
            cr(3, 1, n - 1, 5 * (n + 1)),
            cr(1, 1, (n - 2) * (n - 1), (n + 2) * (n + 1)),
            cr(1, 1, (n - 1) * (n - 2) * (n - 3), 5 * (n + 1) * (n + 2) * (n + 3)),
        ),
    ])
}

/// Points `E, F, G` where the boundaries of `ABCD` and `A'B'C'D'` meet.
pub fn intersection_points_4xn(n: u32) -> Result<Vec<NamedPoint>> {
    let s = require_4xn(n)?;
    let n = i64::from(n);
    let r1 = (n - 1, 5 * (n + 1));
    let r2 = ((n - 1) * (n - 2), (n + 1) * (n + 2));
    let r3 = ((n - 1) * (n - 2) * (n - 3), 5 * (n + 1) * (n + 2) * (n + 3));
    Ok(vec![
        point4(s, "E", cr(-1, 1, r1.0, r1.1), cr(-1, 1, r2.0, r2.1), cr(3, 1, r3.0, r3.1)),
        point4(
            s,
            "F",
            cr(-9 * (n - 4), 7 * n - 20, r1.0, r1.1),
            cr(n + 4, 7 * n - 20, r2.0, r2.1),
            cr(-(13 * n + 28), 7 * n - 20, r3.0, r3.1),
        ),
        point4(
            s,
            "G",
            cr(-3 * (n + 1), n + 5, r1.0, r1.1),
            cr(n + 2, n + 5, (n - 1) * (n + 1), (n - 2) * (n + 2)),
            cr(-(n - 7), n + 5, (n - 1) * (n + 1) * (n + 2), 5 * (n - 3) * (n + 3) * (n - 2)),
        ),
    ])
}

/// `D''`, the midpoint of `DD'`.
pub fn d_double_prime_4xn(n: u32) -> Result<NamedPoint> {
    let d = vertices_4xn(n)?.pop().expect("four vertices");
    let e = d.exact.expect("closed form");
    Ok(point4(d.beta.system(), "D''", ExactRadical::zero(), e[2].clone(), ExactRadical::zero()))
}

/// The hyperplane `Γ` for even `n1 >= 4`:
///
/// `Γ(β) = 1/√(n1 n2) + (−1)^n2 · 2/(n1−2) · Σ_K √(4K+1) {j1 j2 j2−j1; j2 j1 2K} β_{2K}`.
///
/// `Γ < 0` exactly when the Breuer image has `α_{j2−j1} < 0`. On 4⊗N this
/// is the plane `γ`.
pub fn gamma_hyperplane(system: SpinPair) -> Result<Hyperplane> {
    require_even_n1(system)?;
    let (j1, j2) = (system.j1(), system.j2());
    let n1 = i64::from(system.n1());
    let sign = if system.n2().is_multiple_of(2) { 1 } else { -1 };
    let scale = ExactRadical::from_rational(&BigRational::new(BigInt::from(2 * sign), BigInt::from(n1 - 2)));
    let coefficients = (1..=(n1 - 2) / 2)
        .map(|k| {
            let kk = HalfInt::from_int(2 * k as i32);
            let weight = ExactRadical::sqrt_ratio(4 * k + 1, 1);
            &(&scale * &weight) * &six_j(j1, j2, j2 - j1, j2, j1, kk)
        })
        .collect();
    let label = if system.n1() == 4 { "gamma" } else { "Gamma" };
    Ok(Hyperplane::from_exact(
        system,
        label.to_string(),
        ExactRadical::sqrt_ratio(1, system.dim() as i64),
        coefficients,
    ))
}

/// `D̃''`, the symmetrization of the extreme state on `J = j1+j2`:
/// `β_{2K} = √(n1 n2 (4K+1)) (−1)^n2 {j1 j2 j1+j2; j2 j1 2K}`.
pub fn d_tilde_point(system: SpinPair) -> Result<NamedPoint> {
    require_even_n1(system)?;
    let (j1, j2) = (system.j1(), system.j2());
    let sign = if system.n2().is_multiple_of(2) { 1 } else { -1 };
    let mut exact = vec![ExactRadical::zero(); system.len()];
    exact[0] = ExactRadical::one();
    for k in 1..system.len() / 2 {
        let kk = HalfInt::from_int(2 * k as i32);
        let weight = ExactRadical::sqrt_ratio(system.dim() as i64 * (4 * k as i64 + 1), 1);
        exact[2 * k] = &weight * &six_j(j1, j2, j1 + j2, j2, j1, kk) * sign;
    }
    Ok(NamedPoint::from_exact(system, "D~''", exact))
}

/// The `n1` half-spaces `α_J >= 0` over `(β2, β4, …)` bounding the
/// `ϑ₁`-invariant states. Inside means every functional is nonnegative.
pub fn theta1_polytope(system: SpinPair) -> Result<Vec<Hyperplane>> {
    require_even_n1(system)?;
    let l = build_l_matrix(system);
    Ok(system
        .j_values()
        .iter()
        .enumerate()
        .map(|(col, j)| {
            let coefficients = (1..system.len() / 2).map(|k| l.exact(2 * k, col).clone()).collect();
            Hyperplane::from_exact(system, format!("alpha_J={j}"), l.exact(0, col).clone(), coefficients)
        })
        .collect())
}

/// Smallest polytope functional at `even`; nonnegative inside.
pub fn polytope_margin(planes: &[Hyperplane], even: &[f64]) -> f64 {
    planes.iter().map(|h| h.evaluate_even(even)).fold(f64::INFINITY, f64::min)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Vertices of the `ϑ₁`-invariant polytope, as even-coordinate tuples in a
/// fixed order.
pub fn polytope_vertices(system: SpinPair) -> Result<Vec<Vec<f64>>> {
    let planes = theta1_polytope(system)?;
    let d = system.len() / 2 - 1;
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(planes.len(), d) {
        let a = DMatrix::from_fn(d, d, |r, c| planes[subset[r]].coefficients[c]);
        let b = DVector::from_fn(d, |r, _| -planes[subset[r]].constant);
        let Some(x) = a.lu().solve(&b) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        if x.iter().all(|v| v.is_finite())
            && polytope_margin(&planes, &x) >= -1e-9
            && !vertices.iter().any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-9))
        {
            vertices.push(x);
        }
    }
    Ok(vertices)
}

/// `(1−t) E'' + t G''` on 4⊗N with `E'' = symmetrize(E)`, `G'' = symmetrize(G)`.
pub fn segment_state_4xn(n: u32, t: f64) -> Result<BetaVector> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("segment parameter t = {t} outside [0, 1]")));
    }
    let pts = intersection_points_4xn(n)?;
    symmetrize(&pts[0].beta).lerp(&symmetrize(&pts[2].beta), t)
}

/// `t* = (N−2)(N+5) / ((N−1)(N+4))`.
pub fn segment_threshold_closed_form(n: u32) -> f64 {
    let n = f64::from(n);
    (n - 2.0) * (n + 5.0) / ((n - 1.0) * (n + 4.0))
}

/// `α_{j−3/2}` of the unit-trace Breuer image of the segment state:
/// `√((N−3)/N) (1 − t/t*)`.
pub fn segment_min_alpha_closed_form(n: u32, t: f64) -> f64 {
    let nf = f64::from(n);
    ((nf - 3.0) / nf).sqrt() * (1.0 - t / segment_threshold_closed_form(n))
}

/// Detection flag at `samples + 1` evenly spaced `t`, and the number of
/// times it changes.
pub fn segment_detection_flips(n: u32, samples: usize, tol: f64) -> Result<usize> {
    let flags = (0..=samples)
        .map(|i| breuer_detects(&segment_state_4xn(n, i as f64 / samples as f64)?, tol))
        .collect::<Result<Vec<bool>>>()?;
    Ok(flags.windows(2).filter(|w| w[0] != w[1]).count())
}

/// The `t` where detection switches on, by bisection to `resolution`.
pub fn segment_detection_threshold(n: u32, tol: f64, resolution: f64) -> Result<f64> {
    let detected = |t: f64| breuer_detects(&segment_state_4xn(n, t)?, tol);
    let (mut lo, mut hi) = (0.0, 1.0);
    if detected(lo)? || !detected(hi)? {
        return Err(Error::OutOfRange(format!("no detection switch on the segment for N = {n}")));
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if detected(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// True iff β lies in the tetrahedron `DD'EE'` (the known separable set of
/// 4⊗N), allowing barycentric weights down to `−tol`.
pub fn minimal_separable_membership_4xn(beta: &BetaVector, tol: f64) -> Result<bool> {
    let system = beta.system();
    if system.n1() != 4 {
        return Err(Error::invalid_system(system.n1(), system.n2(), "separable tetrahedron is defined for n1 = 4"));
    }
    let d = vertices_4xn(system.n2())?.pop().expect("four vertices");
    let e = intersection_points_4xn(system.n2())?.swap_remove(0);
    let corners = [d.primed(), d, e.primed(), e];
    let m = Matrix4::from_fn(|r, c| if r == 0 { 1.0 } else { corners[c].beta.get(r) });
    let rhs = Vector4::new(1.0, beta.get(1), beta.get(2), beta.get(3));
    let Some(weights) = m.lu().solve(&rhs) else { return Ok(false) };
    Ok(weights.iter().all(|w| *w >= -tol))
}

/// One evaluated grid point of a region sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub even: Vec<f64>,
    pub detected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionSweep {
    pub system: [u32; 2],
    pub grid: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub inside: usize,
    pub detected: usize,
    pub fraction: f64,
    #[serde(skip)]
    pub points: Vec<SweepPoint>,
}

fn require_sweep(system: SpinPair, grid: usize) -> Result<()> {
    if !matches!(system.n1(), 4 | 6) {
        return Err(Error::invalid_system(system.n1(), system.n2(), "region sweeps support n1 in {4, 6}"));
    }
    if grid < 10 {
        return Err(Error::OutOfRange(format!("grid = {grid}, need at least 10")));
    }
    Ok(())
}

/// Cell centres of a `grid^d` lattice over the polytope's bounding box,
/// filtered to the polytope and classified by the Breuer test.
pub fn region_sweep(system: SpinPair, grid: usize, tol: f64) -> Result<RegionSweep> {
    require_sweep(system, grid)?;
    let planes = theta1_polytope(system)?;
    let vertices = polytope_vertices(system)?;
    let d = system.len() / 2 - 1;
    let lower: Vec<f64> = (0..d).map(|i| vertices.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min)).collect();
    let upper: Vec<f64> = (0..d).map(|i| vertices.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let centre = |axis: usize, i: usize| lower[axis] + (i as f64 + 0.5) * (upper[axis] - lower[axis]) / grid as f64;
    let rows: Vec<Vec<SweepPoint>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let tails: Vec<Vec<f64>> = if d == 1 {
                vec![vec![centre(0, i)]]
            } else {
                (0..grid).map(|k| vec![centre(0, i), centre(1, k)]).collect()
            };
            tails
                .into_iter()
                .filter(|even| polytope_margin(&planes, even) >= 0.0)
                .map(|even| {
                    let beta = BetaVector::from_even(system, &even).expect("even length");
                    let detected = breuer_detects(&beta, tol).expect("even n1");
                    SweepPoint { even, detected }
                })
                .collect()
        })
        .collect();
    let points: Vec<SweepPoint> = rows.into_iter().flatten().collect();
    let inside = points.len();
    if inside == 0 {
        return Err(Error::OutOfRange(format!("no grid point inside the polytope for {system}")));
    }
    let detected = points.iter().filter(|p| p.detected).count();
    Ok(RegionSweep {
        system: [system.n1(), system.n2()],
        grid,
        lower,
        upper,
        inside,
        detected,
        fraction: detected as f64 / inside as f64,
        points,
    })
}

/// Fraction of `ϑ₁`-invariant grid states detected by the Breuer map.
pub fn be_region_fraction(system: SpinPair, grid: usize) -> Result<f64> {
    Ok(region_sweep(system, grid, crate::repr::DEFAULT_TOL)?.fraction)
}

/// A `ϑ₁`-invariant state strictly on the detected side of `Γ`, found by
/// moving from `D̃''` along the normal of `Γ` to half the distance to the
/// polytope boundary. `None` if the result fails any check.
pub fn detected_state_beyond_gamma(system: SpinPair, tol: f64) -> Result<Option<BetaVector>> {
    let gamma = gamma_hyperplane(system)?;
    let planes = theta1_polytope(system)?;
    let start = d_tilde_point(system)?.beta.even_coords();
    let norm = gamma.norm();
    let dir: Vec<f64> = gamma.coefficients.iter().map(|c| -c / norm).collect();
    let mut reach = f64::INFINITY;
    for h in &planes {
        let rate: f64 = h.coefficients.iter().zip(&dir).map(|(c, d)| c * d).sum();
        if rate < 0.0 {
            reach = reach.min(h.evaluate_even(&start) / -rate);
        }
    }
    if !reach.is_finite() || reach <= 0.0 {
        return Ok(None);
    }
    let even: Vec<f64> = start.iter().zip(&dir).map(|(s, d)| s + 0.5 * reach * d).collect();
    let beta = BetaVector::from_even(system, &even)?;
    let alpha = beta_to_alpha(&beta);
    let ok = alpha.min() > 0.0
        && crate::maps::is_ppt(&beta, tol)
        && gamma.evaluate(&beta) < 0.0
        && breuer_detects(&beta, tol)?;
    Ok(ok.then_some(beta))
}

/// Named points and hyperplanes for export: the full 4⊗N construction, or
/// the polytope, `Γ` and `D̃''` for larger even `n1`.
#[derive(Clone, Debug)]
pub struct GeometryReport {
    pub system: SpinPair,
    pub points: Vec<NamedPoint>,
    pub hyperplanes: Vec<Hyperplane>,
}

pub fn geometry_report(system: SpinPair) -> Result<GeometryReport> {
    require_even_n1(system)?;
    let mut points = Vec::new();
    let mut hyperplanes = Vec::new();
    if system.n1() == 4 {
        let n = system.n2();
        let vertices = vertices_4xn(n)?;
        let primes: Vec<NamedPoint> = vertices.iter().map(NamedPoint::primed).collect();
        let inter = intersection_points_4xn(n)?;
        let inter_primes: Vec<NamedPoint> = inter.iter().map(NamedPoint::primed).collect();
        points.extend(vertices);
        points.extend(primes);
        points.extend(inter);
        points.extend(inter_primes);
        points.push(d_double_prime_4xn(n)?);
        hyperplanes.push(gamma_hyperplane(system)?);
    } else {
        hyperplanes.extend(theta1_polytope(system)?);
        hyperplanes.push(gamma_hyperplane(system)?);
        points.push(d_tilde_point(system)?);
    }
    Ok(GeometryReport { system, points, hyperplanes })
}

/// `symmetrize(alpha_to_beta(ϱ_max))` computed through the generic pipeline.
pub fn d_tilde_via_pipeline(system: SpinPair) -> BetaVector {
    let max = projector_state(system, system.j_max()).expect("J_max in range");
    symmetrize(&alpha_to_beta(&max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::is_ppt;
    use crate::repr::DEFAULT_TOL;

    fn sys(n1: u32, n2: u32) -> SpinPair {
        SpinPair::new(n1, n2).unwrap()
    }

    #[test]
    fn extreme_points_4x4() {
        let pts = alpha_extreme_points(sys(4, 4));
        let expected = [4.0, (16.0f64 / 3.0).sqrt(), (16.0f64 / 5.0).sqrt(), (16.0f64 / 7.0).sqrt()];
        for (i, (p, e)) in pts.iter().zip(expected).enumerate() {
            assert!((p.get(i) - e).abs() < 1e-14);
            assert!(crate::repr::check_state(p, DEFAULT_TOL).is_state());
        }
    }

    #[test]
    fn vertices_match_pipeline_small() {
        for n in [4, 5, 9] {
            let s = sys(4, n);
            for (v, a) in vertices_4xn(n).unwrap().iter().zip(alpha_extreme_points(s)) {
                assert!(v.beta.max_abs_diff(&alpha_to_beta(&a)) < 1e-12, "N={n} {}", v.label);
            }
        }
    }

    #[test]
    fn closed_form_l_matches_exact_l() {
        for n in 4..=9 {
            let l = build_l_matrix(sys(4, n));
            let closed = l_matrix_4xn(n).unwrap();
            for (k, row) in closed.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    assert_eq!(x, l.exact(k, c), "N={n} K={k} col={c}");
                }
            }
        }
    }

    #[test]
    fn too_small_4xn() {
        assert!(vertices_4xn(3).is_err());
        assert!(segment_state_4xn(6, 1.5).is_err());
    }

    #[test]
    fn d_tilde_is_d_double_prime_on_4xn() {
        for n in 4..=10 {
            let s = sys(4, n);
            let dt = d_tilde_point(s).unwrap();
            let dd = d_double_prime_4xn(n).unwrap();
            assert_eq!(dt.exact, dd.exact);
            assert!(dt.beta.max_abs_diff(&d_tilde_via_pipeline(s)) < 1e-12);
        }
    }

    #[test]
    fn gamma_vanishes_at_d_tilde_exactly() {
        for (n1, n2) in [(4, 4), (6, 6), (6, 9), (8, 11)] {
            let s = sys(n1, n2);
            let g = gamma_hyperplane(s).unwrap();
            let (c, coeffs) = g.exact.clone().unwrap();
            let dt = d_tilde_point(s).unwrap().exact.unwrap();
            let mut sum = crate::radical::RadicalSum::new();
            sum.add_radical(&c);
            for (i, a) in coeffs.iter().enumerate() {
                sum.add_radical(&(a * &dt[2 * (i + 1)]));
            }
            assert!(sum.is_zero(), "{s}");
        }
    }

    #[test]
    fn polytope_contains_maximally_mixed() {
        for (n1, n2) in [(4, 4), (6, 8), (8, 8)] {
            let s = sys(n1, n2);
            let planes = theta1_polytope(s).unwrap();
            let zero = vec![0.0; n1 as usize / 2 - 1];
            assert!(polytope_margin(&planes, &zero) > 0.0);
        }
    }

    #[test]
    fn polytope_vertices_4xn_interval() {
        // ϑ₁-invariant 4⊗N states: β2 between E'' and G''
        let n = 7;
        let v = polytope_vertices(sys(4, n)).unwrap();
        assert_eq!(v.len(), 2);
        let pts = intersection_points_4xn(n).unwrap();
        let (e2, g2) = (pts[0].beta.get(2), pts[2].beta.get(2));
        let (lo, hi) = (v[0][0].min(v[1][0]), v[0][0].max(v[1][0]));
        assert!((lo - e2).abs() < 1e-12 && (hi - g2).abs() < 1e-12, "{v:?} {e2} {g2}");
    }

    #[test]
    fn polygon_6x6_vertices_are_feasible() {
        let s = sys(6, 6);
        let planes = theta1_polytope(s).unwrap();
        let v = polytope_vertices(s).unwrap();
        assert!(v.len() >= 3);
        for x in &v {
            let margin = polytope_margin(&planes, x);
            assert!(margin.abs() < 1e-9, "{x:?} {margin}");
        }
    }

    #[test]
    fn separable_tetrahedron_membership() {
        let n = 6;
        let v = vertices_4xn(n).unwrap();
        let e = intersection_points_4xn(n).unwrap();
        for p in [&v[3], &e[0]] {
            assert!(minimal_separable_membership_4xn(&p.beta, 1e-10).unwrap());
            assert!(minimal_separable_membership_4xn(&p.primed().beta, 1e-10).unwrap());
        }
        assert!(minimal_separable_membership_4xn(&d_double_prime_4xn(n).unwrap().beta, 1e-10).unwrap());
        let g2 = symmetrize(&e[2].beta);
        assert!(!minimal_separable_membership_4xn(&g2, 1e-10).unwrap());
        assert!(minimal_separable_membership_4xn(&BetaVector::identity_state(sys(6, 6)), 1e-10).is_err());
    }

    #[test]
    fn efg_are_ppt() {
        for n in [4, 7] {
            for p in intersection_points_4xn(n).unwrap() {
                assert!(is_ppt(&p.beta, 1e-10), "{}", p.label);
            }
        }
    }

    #[test]
    fn segment_endpoints() {
        let n = 6;
        assert!(!breuer_detects(&segment_state_4xn(n, 0.0).unwrap(), DEFAULT_TOL).unwrap());
        assert!(breuer_detects(&segment_state_4xn(n, 1.0).unwrap(), DEFAULT_TOL).unwrap());
        assert!((segment_threshold_closed_form(4) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sweep_4x4_quarter() {
        let f = be_region_fraction(sys(4, 4), 100).unwrap();
        assert!((f - 0.25).abs() < 0.02, "{f}");
        assert!(be_region_fraction(sys(8, 8), 100).is_err());
        assert!(be_region_fraction(sys(6, 6), 5).is_err());
    }

    #[test]
    fn detected_state_exists_small() {
        for (n1, n2) in [(4, 4), (6, 7), (8, 12)] {
            let b = detected_state_beyond_gamma(sys(n1, n2), DEFAULT_TOL).unwrap();
            assert!(b.is_some(), "{n1}x{n2}");
        }
    }

    #[test]
    fn geometry_report_rows() {
        let r = geometry_report(sys(4, 12)).unwrap();
        let labels: Vec<&str> = r.points.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels, ["A", "B", "C", "D", "A'", "B'", "C'", "D'", "E", "F", "G", "E'", "F'", "G'", "D''"]);
        assert_eq!(r.hyperplanes[0].label, "gamma");
        let r = geometry_report(sys(6, 8)).unwrap();
        assert_eq!(r.hyperplanes.len(), 7);
        assert!(geometry_report(sys(5, 8)).is_err());
    }
}
