//! Coordinates of rotationally invariant states.
//!
//! A state on `C^n1 ⊗ C^n2` commuting with every `D(R)⊗D(R)` is fixed by
//! `n1` real numbers, either in the projector basis (`α_J`, one per total
//! angular momentum `J = j2−j1 … j1+j2`) or in the invariant tensor-operator
//! basis (`β_K`, `K = 0 … n1−1`):
//!
//! ```text
//! ϱ = (n1 n2)^(-1/2) Σ_J α_J (2J+1)^(-1/2) P_J = (n1 n2)^(-1/2) Σ_K β_K (2K+1)^(-1/2) Q_K
//! ```
//!
//! The two are related by the orthogonal matrix `L` built from 6-j symbols,
//! `β = L α`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radical::ExactRadical;
use crate::spin::HalfInt;
use crate::wigner::six_j;

/// Default tolerance for state checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// The bipartite system `C^n1 ⊗ C^n2` with `2 <= n1 <= n2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinPair {
    n1: u32,
    n2: u32,
}

impl SpinPair {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 < 2 {
            return Err(Error::invalid_system(n1, n2, "n1 must be at least 2"));
        }
        if n2 < n1 {
            return Err(Error::invalid_system(n1, n2, "n2 must be >= n1"));
        }
        if n1.checked_mul(n2).is_none_or(|d| d > 1 << 20) {
            return Err(Error::invalid_system(n1, n2, "dimension too large"));
        }
        Ok(SpinPair { n1, n2 })
    }

    #[inline]
    pub fn n1(self) -> u32 {
        self.n1
    }

    #[inline]
    pub fn n2(self) -> u32 {
        self.n2
    }

    #[inline]
    pub fn j1(self) -> HalfInt {
        HalfInt::from_dimension(self.n1)
    }

    #[inline]
    pub fn j2(self) -> HalfInt {
        HalfInt::from_dimension(self.n2)
    }

    /// `n1 · n2`.
    #[inline]
    pub fn dim(self) -> usize {
        self.n1 as usize * self.n2 as usize
    }

    /// Number of coordinates in either basis (`n1`).
    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        self.n1 as usize
    }

    /// True when the Breuer map is positive on the first factor (even `n1 >= 4`).
    #[inline]
    pub fn supports_breuer(self) -> bool {
        self.n1 >= 4 && self.n1.is_multiple_of(2)
    }

    pub fn j_min(self) -> HalfInt {
        self.j2() - self.j1()
    }

    pub fn j_max(self) -> HalfInt {
        self.j1() + self.j2()
    }

    /// Total angular momenta `J`, increasing; position `i` in an
    /// [`AlphaVector`] holds `α_{J_i}`.
    pub fn j_values(self) -> Vec<HalfInt> {
        HalfInt::range_inclusive(self.j_min(), self.j_max()).collect()
    }

    /// Index of `J` in α coordinates.
    pub fn j_index(self, j: HalfInt) -> Option<usize> {
        let offset = (j - self.j_min()).to_int()?;
        (0..self.n1 as i32).contains(&offset).then_some(offset as usize)
    }
}

impl fmt::Display for SpinPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n1, self.n2)
    }
}

/// Basis tag used by the JSON form of coordinate vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Alpha,
    Beta,
}

/// Wire format: `{"system": [n1, n2], "basis": "alpha"|"beta", "coords": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinatesJson {
    pub system: [u32; 2],
    pub basis: Basis,
    pub coords: Vec<f64>,
}

impl CoordinatesJson {
    fn parse(text: &str, expected: Basis) -> Result<(SpinPair, Vec<f64>)> {
        let raw: CoordinatesJson = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if raw.basis != expected {
            return Err(Error::Serialization(format!("expected basis {expected:?}, found {:?}", raw.basis)));
        }
        Ok((SpinPair::new(raw.system[0], raw.system[1])?, raw.coords))
    }
}

fn check_len(system: SpinPair, coords: &[f64]) -> Result<()> {
    if coords.len() != system.len() {
        return Err(Error::DimensionMismatch { expected: system.len(), found: coords.len() });
    }
    Ok(())
}

fn check_same(a: SpinPair, b: SpinPair) -> Result<()> {
    if a != b {
        return Err(Error::SystemMismatch { left: a.to_string(), right: b.to_string() });
    }
    Ok(())
}

/// Coordinates `α_J` in the projector basis, ordered by increasing `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaVector {
    system: SpinPair,
    coords: Vec<f64>,
}

/// Coordinates `β_K` in the tensor-operator basis, `K = 0 … n1−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaVector {
    system: SpinPair,
    coords: Vec<f64>,
}

macro_rules! coordinate_vector {
    ($ty:ident, $basis:expr, $label:literal, $index:ident) => {
        impl $ty {
            pub fn new(system: SpinPair, coords: Vec<f64>) -> Result<Self> {
                check_len(system, &coords)?;
                Ok($ty { system, coords })
            }

            #[inline]
            pub fn system(&self) -> SpinPair {
                self.system
            }

            #[inline]
            pub fn coords(&self) -> &[f64] {
                &self.coords
            }

            pub fn into_coords(self) -> Vec<f64> {
                self.coords
            }

            #[inline]
            pub fn get(&self, i: usize) -> f64 {
                self.coords[i]
            }

            pub fn to_json(&self) -> String {
                let raw = CoordinatesJson {
                    system: [self.system.n1(), self.system.n2()],
                    basis: $basis,
                    coords: self.coords.clone(),
                };
                serde_json::to_string(&raw).expect("plain data serializes")
            }

            pub fn from_json(text: &str) -> Result<Self> {
                let (system, coords) = CoordinatesJson::parse(text, $basis)?;
                Self::new(system, coords)
            }

            /// Componentwise `(1−t)·self + t·other`.
            pub fn lerp(&self, other: &Self, t: f64) -> Result<Self> {
                check_same(self.system, other.system)?;
                let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| (1.0 - t) * a + t * b).collect();
                Ok($ty { system: self.system, coords })
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            }

            /// Labelled `(index, value)` pairs, e.g. `("J=3/2", 0.25)`.
            pub fn labelled(&self) -> Vec<(String, f64)> {
                self.coords
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (format!(concat!($label, "={}"), self.$index(i)), *v))
                    .collect()
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} [", self.system)?;
                for (i, (label, v)) in self.labelled().iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{label}: {v}")?;
                }
                write!(f, "]")
            }
        }
    };
}

coordinate_vector!(AlphaVector, Basis::Alpha, "J", label_at);
coordinate_vector!(BetaVector, Basis::Beta, "K", label_at);

impl AlphaVector {
    fn label_at(&self, i: usize) -> HalfInt {
        self.system.j_min() + HalfInt::from_int(i as i32)
    }

    /// `α_J` by quantum number.
    pub fn at(&self, j: HalfInt) -> Option<f64> {
        self.system.j_index(j).map(|i| self.coords[i])
    }

    pub fn min(&self) -> f64 {
        self.coords.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ_J √((2J+1)/(n1 n2)) α_J`, the trace of the operator.
    pub fn trace(&self) -> f64 {
        let dim = self.system.dim() as f64;
        self.system
            .j_values()
            .iter()
            .zip(&self.coords)
            .map(|(j, a)| (f64::from(j.multiplicity()) / dim).sqrt() * a)
            .sum()
    }
}

impl BetaVector {
    fn label_at(&self, i: usize) -> usize {
        i
    }

    /// Unit-trace state with only `β_0 = 1` (the maximally mixed state).
    pub fn identity_state(system: SpinPair) -> Self {
        let mut coords = vec![0.0; system.len()];
        coords[0] = 1.0;
        BetaVector { system, coords }
    }

    /// `(1, 0, β_2, 0, β_4, …)` from the even coordinates `β_2, β_4, …`.
    pub fn from_even(system: SpinPair, even: &[f64]) -> Result<Self> {
        let expected = (system.len() - 1) / 2;
        if even.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: even.len() });
        }
        let mut coords = vec![0.0; system.len()];
        coords[0] = 1.0;
        for (i, v) in even.iter().enumerate() {
            coords[2 * (i + 1)] = *v;
        }
        Ok(BetaVector { system, coords })
    }

    /// `β_2, β_4, …, β_{2⌊(n1−1)/2⌋}`.
    pub fn even_coords(&self) -> Vec<f64> {
        self.coords.iter().skip(2).step_by(2).copied().collect()
    }
}

/// The orthogonal matrix `L` with `β = L α`:
///
/// `L_{KJ} = √((2K+1)(2J+1)) (−1)^(j1+j2+J) {j1 j2 J; j2 j1 K}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LMatrix {
    system: SpinPair,
    exact: Vec<ExactRadical>,
    entries: Vec<f64>,
}

impl LMatrix {
    #[inline]
    pub fn system(&self) -> SpinPair {
        self.system
    }

    /// Float entry at row `k`, column `col` (column `col` is `J = j_min + col`).
    #[inline]
    pub fn get(&self, k: usize, col: usize) -> f64 {
        self.entries[k * self.system.len() + col]
    }

    pub fn exact(&self, k: usize, col: usize) -> &ExactRadical {
        &self.exact[k * self.system.len() + col]
    }

    /// Row-major float entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `L v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.system.len();
        (0..n).map(|k| (0..n).map(|c| self.get(k, c) * v[c]).sum()).collect()
    }

    /// `Lᵀ v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = self.system.len();
        (0..n).map(|c| (0..n).map(|k| self.get(k, c) * v[k]).sum()).collect()
    }

    /// `max |L Lᵀ − 1|` and `max |Lᵀ L − 1|`, combined.
    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(self.system.len(), &self.entries)
    }

    /// Copy with one float entry shifted; used to check that verification
    /// catches a corrupted matrix.
    pub fn perturbed(&self, k: usize, col: usize, delta: f64) -> LMatrix {
        let mut out = self.clone();
        out.entries[k * self.system.len() + col] += delta;
        out
    }
}

/// Orthogonality residual of a row-major `n×n` matrix.
pub fn orthogonality_residual(n: usize, m: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let target = if a == b { 1.0 } else { 0.0 };
            let rows: f64 = (0..n).map(|i| m[a * n + i] * m[b * n + i]).sum();
            let cols: f64 = (0..n).map(|i| m[i * n + a] * m[i * n + b]).sum();
            worst = worst.max((rows - target).abs()).max((cols - target).abs());
        }
    }
    worst
}

fn compute_l_matrix(system: SpinPair) -> LMatrix {
    let (j1, j2) = (system.j1(), system.j2());
    let n = system.len();
    let js = system.j_values();
    let mut exact = Vec::with_capacity(n * n);
    for k in 0..n {
        let kk = HalfInt::from_int(k as i32);
        for &j in &js {
            let weight = ExactRadical::sqrt_ratio(i64::from(kk.multiplicity()) * i64::from(j.multiplicity()), 1);
            let entry = &weight * &six_j(j1, j2, j, j2, j1, kk) * i64::from((j1 + j2 + j).phase());
            exact.push(entry);
        }
    }
    let entries = exact.iter().map(ExactRadical::to_f64).collect();
    LMatrix { system, exact, entries }
}

/// The coupling matrix for `system`, exact and lowered to floats. Cached.
pub fn build_l_matrix(system: SpinPair) -> Arc<LMatrix> {
    static CACHE: OnceLock<RwLock<HashMap<SpinPair, Arc<LMatrix>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(l) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&system) {
        return Arc::clone(l);
    }
    let l = Arc::new(compute_l_matrix(system));
    let mut guard = cache.write().unwrap_or_else(|e| e.into_inner());
    Arc::clone(guard.entry(system).or_insert(l))
}

pub fn alpha_to_beta(alpha: &AlphaVector) -> BetaVector {
    let l = build_l_matrix(alpha.system);
    BetaVector { system: alpha.system, coords: l.apply(&alpha.coords) }
}

pub fn beta_to_alpha(beta: &BetaVector) -> AlphaVector {
    let l = build_l_matrix(beta.system);
    AlphaVector { system: beta.system, coords: l.apply_transpose(&beta.coords) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StateCheck {
    pub normalized: bool,
    pub positive: bool,
}

impl StateCheck {
    pub fn is_state(self) -> bool {
        self.normalized && self.positive
    }
}

pub fn check_state(alpha: &AlphaVector, tol: f64) -> StateCheck {
    StateCheck {
        normalized: (alpha.trace() - 1.0).abs() <= tol,
        positive: alpha.min() >= -tol,
    }
}

/// One eigenvalue block of an invariant operator: `P_J` contributes
/// `α_J / √(n1 n2 (2J+1))` with multiplicity `2J+1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumBlock {
    pub j: HalfInt,
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

pub fn spectrum_from_alpha(alpha: &AlphaVector) -> Vec<SpectrumBlock> {
    let dim = alpha.system.dim() as f64;
    alpha
        .system
        .j_values()
        .into_iter()
        .zip(&alpha.coords)
        .map(|(j, a)| SpectrumBlock {
            j,
            eigenvalue: a / (dim * f64::from(j.multiplicity())).sqrt(),
            multiplicity: j.multiplicity() as usize,
        })
        .collect()
}

/// `ϱ = 𝟙/(n1 n2)`: `α_J = √((2J+1)/(n1 n2))`.
pub fn maximally_mixed(system: SpinPair) -> AlphaVector {
    let dim = system.dim() as f64;
    let coords = system.j_values().iter().map(|j| (f64::from(j.multiplicity()) / dim).sqrt()).collect();
    AlphaVector { system, coords }
}

/// The state `P_J / (2J+1)`: `α_J = √(n1 n2/(2J+1))`, all other α zero.
pub fn projector_state(system: SpinPair, j: HalfInt) -> Option<AlphaVector> {
    let idx = system.j_index(j)?;
    let mut coords = vec![0.0; system.len()];
    coords[idx] = (system.dim() as f64 / f64::from(j.multiplicity())).sqrt();
    Some(AlphaVector { system, coords })
}

/// A random invariant state: a random convex mixture of the normalized
/// projector states (weights from normalized exponential draws).
pub fn random_state<R: Rng + ?Sized>(system: SpinPair, rng: &mut R) -> AlphaVector {
    let weights: Vec<f64> = (0..system.len()).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = weights.iter().sum();
    let dim = system.dim() as f64;
    let coords = system
        .j_values()
        .iter()
        .zip(&weights)
        .map(|(j, w)| w / total * (dim / f64::from(j.multiplicity())).sqrt())
        .collect();
    AlphaVector { system, coords }
}
