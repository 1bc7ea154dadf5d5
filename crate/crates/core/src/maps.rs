//! Symmetry maps and entanglement tests acting on β coordinates.
//!
//! Partial time reversal `ϑ₁` acts on the invariant operators as
//! `ϑ₁(Q_K) = (−1)^K Q_K`. The Breuer map `Φ₁ = Φ⊗I` with
//! `Φ(B) = (Tr B)𝟙 − B − ϑ(B)` is positive for even `n1`; on an invariant
//! state it gives `(1/n2)𝟙⊗𝟙 − ϱ − ϑ₁(ϱ)`.
//!
//! Tensor operators follow `⟨j,m|T_{K,q}|j,m'⟩ = √(2K+1) (−1)^(j−m) (j K j; −m q m')`,
//! so the selection rule is `q = m − m'` and `Tr(T_{K,q} T†_{K',q'}) = δ_{KK'} δ_{qq'}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry;
use crate::radical::ExactRadical;
use crate::repr::{alpha_to_beta, beta_to_alpha, check_state, AlphaVector, BetaVector, SpinPair};
use crate::spin::HalfInt;
use crate::wigner::three_j;

/// Allowed deviation of `β_0` from 1 for inputs that must be normalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Tolerance on the unit norm of product-state amplitudes.
pub const AMPLITUDE_TOL: f64 = 1e-10;

/// `β_K ↦ (−1)^K β_K`.
pub fn partial_time_reversal(beta: &BetaVector) -> BetaVector {
    let coords = beta.coords().iter().enumerate().map(|(k, b)| if k % 2 == 0 { *b } else { -b }).collect();
    BetaVector::new(beta.system(), coords).expect("same length")
}

/// `½(β + ϑ₁β)`: odd coordinates cleared.
pub fn symmetrize(beta: &BetaVector) -> BetaVector {
    let coords = beta.coords().iter().enumerate().map(|(k, b)| if k % 2 == 0 { *b } else { 0.0 }).collect();
    BetaVector::new(beta.system(), coords).expect("same length")
}

fn require_normalized(beta: &BetaVector) -> Result<()> {
    let b0 = beta.get(0);
    if (b0 - 1.0).abs() > NORMALIZATION_TOL || !b0.is_finite() {
        return Err(Error::NotNormalized(b0));
    }
    Ok(())
}

fn require_breuer(system: SpinPair) -> Result<()> {
    if !system.supports_breuer() {
        return Err(Error::CriterionInapplicable(system.n1()));
    }
    Ok(())
}

/// Coefficients of `Φ₁(ϱ)`: `(n1−2, 0, −2β_2, 0, −2β_4, …)`.
///
/// The identity operator `𝟙⊗𝟙` has `β_0 = n1 n2` in this scale, so the
/// output has trace `n1 − 2`.
pub fn breuer_map(beta: &BetaVector) -> Result<BetaVector> {
    require_normalized(beta)?;
    let n1 = f64::from(beta.system().n1());
    let coords = beta
        .coords()
        .iter()
        .enumerate()
        .map(|(k, b)| match k {
            0 => n1 - 2.0,
            k if k % 2 == 1 => 0.0,
            _ => -2.0 * b,
        })
        .collect();
    Ok(BetaVector::new(beta.system(), coords).expect("same length"))
}

/// [`breuer_map`] scaled to unit trace.
pub fn breuer_map_normalized(beta: &BetaVector) -> Result<BetaVector> {
    let image = breuer_map(beta)?;
    let scale = f64::from(beta.system().n1()) - 2.0;
    if scale <= 0.0 {
        return Err(Error::CriterionInapplicable(beta.system().n1()));
    }
    let coords = image.coords().iter().map(|b| b / scale).collect();
    BetaVector::new(beta.system(), coords)
}

/// Smallest α of the unit-trace Breuer image.
pub fn breuer_min_alpha(beta: &BetaVector) -> Result<f64> {
    require_breuer(beta.system())?;
    Ok(beta_to_alpha(&breuer_map_normalized(beta)?).min())
}

/// True iff the Breuer image has `min α < −tol`. A minimum within `tol` of
/// zero is reported as not detected.
pub fn breuer_detects(beta: &BetaVector, tol: f64) -> Result<bool> {
    Ok(breuer_min_alpha(beta)? < -tol)
}

/// True iff `ϑ₁(ϱ)` has all `α_J >= −tol`.
pub fn is_ppt(beta: &BetaVector, tol: f64) -> bool {
    beta_to_alpha(&partial_time_reversal(beta)).min() >= -tol
}

/// `⟨j,m|T_{K,q}|j,m'⟩`; zero unless `q = m − m'` and `K <= 2j`.
pub fn tensor_matrix_element(j: HalfInt, m: HalfInt, k: HalfInt, q: HalfInt, mp: HalfInt) -> ExactRadical {
    if !m.is_projection_of(j) || !mp.is_projection_of(j) || !q.is_projection_of(k) || q != m - mp {
        return ExactRadical::zero();
    }
    let weight = ExactRadical::sqrt_ratio(i64::from(k.multiplicity()), 1);
    &weight * &three_j(j, k, j, -m, q, mp) * i64::from((j - m).phase())
}

/// Dense `T_{K,q}` for spin `j` in the basis `m = j … −j`, as row-major floats.
pub fn tensor_component_matrix(j: HalfInt, k: HalfInt, q: HalfInt) -> Vec<f64> {
    let n = j.multiplicity() as usize;
    let ms: Vec<HalfInt> = j.projections().collect();
    let mut out = vec![0.0; n * n];
    for (r, &m) in ms.iter().enumerate() {
        let mp = m - q;
        if mp.is_projection_of(j) {
            let c = ((j - mp).twice() / 2) as usize;
            out[r * n + c] = tensor_matrix_element(j, m, k, q, mp).to_f64();
        }
    }
    out
}

/// A pure product state `|φ¹⟩⊗|φ²⟩`, amplitudes over `m = j … −j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureProductState {
    system: SpinPair,
    amps1: Vec<Complex64>,
    amps2: Vec<Complex64>,
}

impl PureProductState {
    pub fn new(system: SpinPair, amps1: Vec<Complex64>, amps2: Vec<Complex64>) -> Result<Self> {
        for (idx, (amps, n)) in [(&amps1, system.n1()), (&amps2, system.n2())].into_iter().enumerate() {
            if amps.len() != n as usize {
                return Err(Error::DimensionMismatch { expected: n as usize, found: amps.len() });
            }
            let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > AMPLITUDE_TOL {
                return Err(Error::AmplitudeNorm { subsystem: idx as u8 + 1, norm });
            }
        }
        Ok(PureProductState { system, amps1, amps2 })
    }

    /// `|j1,m1⟩⊗|j2,m2⟩`.
    pub fn basis(system: SpinPair, m1: HalfInt, m2: HalfInt) -> Result<Self> {
        let amps1 = basis_amplitudes(system.j1(), m1)?;
        let amps2 = basis_amplitudes(system.j2(), m2)?;
        PureProductState::new(system, amps1, amps2)
    }

    pub fn system(&self) -> SpinPair {
        self.system
    }

    pub fn amps1(&self) -> &[Complex64] {
        &self.amps1
    }

    pub fn amps2(&self) -> &[Complex64] {
        &self.amps2
    }

    /// The state after `ϑ` on the first factor: `φ¹ ↦ V φ¹*` with
    /// `V|j,m⟩ = (−1)^(j−m) |j,−m⟩`.
    pub fn time_reversed_first(&self) -> Self {
        let j = self.system.j1();
        let n = self.amps1.len();
        let mut amps1 = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.amps1.iter().enumerate() {
            let m = j - HalfInt::from_int(i as i32);
            amps1[n - 1 - i] = a.conj() * f64::from((j - m).phase());
        }
        PureProductState { system: self.system, amps1, amps2: self.amps2.clone() }
    }
}

fn basis_amplitudes(j: HalfInt, m: HalfInt) -> Result<Vec<Complex64>> {
    if !m.is_projection_of(j) {
        return Err(Error::InvalidSpin(format!("m = {m} is not a projection of j = {j}")));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); j.multiplicity() as usize];
    amps[((j - m).twice() / 2) as usize] = Complex64::new(1.0, 0.0);
    Ok(amps)
}

fn expectation(j: HalfInt, k: HalfInt, q: HalfInt, amps: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, m) in j.projections().enumerate() {
        let mp = m - q;
        if !mp.is_projection_of(j) {
            continue;
        }
        let c = ((j - mp).twice() / 2) as usize;
        let t = tensor_matrix_element(j, m, k, q, mp).to_f64();
        acc += amps[r].conj() * t * amps[c];
    }
    acc
}

/// β of the twirled product state:
/// `β_K = √(n1 n2/(2K+1)) Σ_q ⟨T_{K,q}⟩_{φ¹} ⟨T†_{K,q}⟩_{φ²}`.
pub fn pi_project(product: &PureProductState) -> BetaVector {
    let system = product.system;
    let (j1, j2) = (system.j1(), system.j2());
    let dim = system.dim() as f64;
    let coords = (0..system.len())
        .map(|k| {
            let kk = HalfInt::from_int(k as i32);
            let sum: Complex64 = kk
                .projections()
                .map(|q| expectation(j1, kk, q, &product.amps1) * expectation(j2, kk, q, &product.amps2).conj())
                .sum();
            (dim / f64::from(kk.multiplicity())).sqrt() * sum.re
        })
        .collect();
    BetaVector::new(system, coords).expect("n1 coordinates")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NotAState,
    NptEntangled,
    PptBoundEntangledDetected,
    KnownSeparable,
    PptUndetermined,
}

/// Combined report on one β.
///
/// `breuer_detected` is `None` when the criterion does not apply (odd or
/// small `n1`, or an unnormalized input). `known_separable` is only ever
/// true on 4⊗N.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub system: [u32; 2],
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub tol: f64,
    pub is_state: bool,
    pub normalized: bool,
    pub positive: bool,
    pub is_ppt: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breuer_detected: Option<bool>,
    pub known_separable: bool,
    pub verdict: Verdict,
    pub min_alpha: f64,
    pub min_alpha_theta1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_alpha_breuer: Option<f64>,
    pub min_eigenvalue: f64,
    pub min_eigenvalue_theta1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue_breuer: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn min_eigenvalue(alpha: &AlphaVector) -> f64 {
    crate::repr::spectrum_from_alpha(alpha).iter().map(|b| b.eigenvalue).fold(f64::INFINITY, f64::min)
}

pub fn classify(beta: &BetaVector, tol: f64) -> Classification {
    let system = beta.system();
    let alpha = beta_to_alpha(beta);
    let check = check_state(&alpha, tol);
    let theta = beta_to_alpha(&partial_time_reversal(beta));
    let is_ppt = theta.min() >= -tol;
    let mut notes = Vec::new();

    let breuer_alpha = if !system.supports_breuer() {
        notes.push(format!(
            "Breuer criterion inapplicable for n1 = {}: the map is positive only for even n1 >= 4",
            system.n1()
        ));
        None
    } else {
        match breuer_map_normalized(beta) {
            Ok(image) => Some(beta_to_alpha(&image)),
            Err(e) => {
                notes.push(format!("Breuer criterion skipped: {e}"));
                None
            }
        }
    };
    let breuer_detected = breuer_alpha.as_ref().map(|a| a.min() < -tol);

    let known_separable = system.n1() == 4
        && check.is_state()
        && geometry::minimal_separable_membership_4xn(beta, tol).unwrap_or(false);

    let verdict = if !check.is_state() {
        Verdict::NotAState
    } else if !is_ppt {
        Verdict::NptEntangled
    } else if breuer_detected == Some(true) {
        Verdict::PptBoundEntangledDetected
    } else if known_separable {
        Verdict::KnownSeparable
    } else {
        Verdict::PptUndetermined
    };

    Classification {
        system: [system.n1(), system.n2()],
        beta: beta.coords().to_vec(),
        alpha: alpha.coords().to_vec(),
        tol,
        is_state: check.is_state(),
        normalized: check.normalized,
        positive: check.positive,
        is_ppt,
        breuer_detected,
        known_separable,
        verdict,
        min_alpha: alpha.min(),
        min_alpha_theta1: theta.min(),
        min_alpha_breuer: breuer_alpha.as_ref().map(AlphaVector::min),
        min_eigenvalue: min_eigenvalue(&alpha),
        min_eigenvalue_theta1: min_eigenvalue(&theta),
        min_eigenvalue_breuer: breuer_alpha.as_ref().map(min_eigenvalue),
        notes,
    }
}

/// [`classify`] on α input.
pub fn classify_alpha(alpha: &AlphaVector, tol: f64) -> Classification {
    classify(&alpha_to_beta(alpha), tol)
}
