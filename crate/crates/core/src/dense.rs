//! Full-matrix constructions used to cross-check the parameter-space code.
//!
//! Everything here is built from spin matrices with floating arithmetic:
//! the coupled basis by repeated lowering, tensor operators from powers of
//! `J₊` and commutators with `J₋`, and `V = exp(−iπ J_y)` by
//! diagonalization. No 3-j or 6-j symbol is used. Single-spin bases run
//! `m = j … −j`; product index is `i1 · n2 + i2`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::PureProductState;
use crate::repr::{AlphaVector, BetaVector, SpinPair};
use crate::spin::HalfInt;

pub type CMatrix = DMatrix<Complex64>;

/// Residual above which an operator is not treated as rotationally invariant.
pub const INVARIANCE_TOL: f64 = 1e-9;

const ROTATION_ANGLE: f64 = 0.7;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A dense operator, with factor dimensions when it acts on a bipartite space.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub matrix: CMatrix,
    pub system: Option<SpinPair>,
}

impl DenseOperator {
    pub fn bipartite(system: SpinPair, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), system.dim());
        DenseOperator { matrix, system: Some(system) }
    }

    pub fn single(matrix: CMatrix) -> Self {
        DenseOperator { matrix, system: None }
    }

    fn require_system(&self) -> SpinPair {
        self.system.expect("bipartite operator")
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `max |M − M†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Eigenvalues in increasing order with `max_i ‖M v_i − λ_i v_i‖`.
    pub fn spectrum(&self) -> (Vec<f64>, f64) {
        hermitian_spectrum(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum().0[0]
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix (increasing) and a residual bound.
pub fn hermitian_spectrum(m: &CMatrix) -> (Vec<f64>, f64) {
    let h = (m + m.adjoint()) * c(0.5);
    let eig = h.clone().symmetric_eigen();
    let mut residual = 0.0f64;
    for (i, lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let r = &h * v - v * c(*lambda);
        residual = residual.max(r.norm());
    }
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    (values, residual)
}

/// `(J₊, J_z)` for spin `j`.
fn ladder(j: HalfInt) -> (CMatrix, CMatrix) {
    let n = j.multiplicity() as usize;
    let jf = j.to_f64();
    let mut plus = CMatrix::zeros(n, n);
    let mut z = CMatrix::zeros(n, n);
    for (i, m) in j.projections().enumerate() {
        let mf = m.to_f64();
        z[(i, i)] = c(mf);
        if i > 0 {
            plus[(i - 1, i)] = c((jf * (jf + 1.0) - mf * (mf + 1.0)).sqrt());
        }
    }
    (plus, z)
}

/// `(J_x, J_y, J_z)` for spin `j`.
pub fn spin_matrices(j: HalfInt) -> [CMatrix; 3] {
    let (plus, z) = ladder(j);
    let minus = plus.adjoint();
    let x = (&plus + &minus) * c(0.5);
    let y = (&plus - &minus) * Complex64::new(0.0, -0.5);
    [x, y, z]
}

/// `exp(−iθ H)` for Hermitian `H`.
pub fn unitary_exp(h: &CMatrix, theta: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let u = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -theta * l)));
    u * phases * u.adjoint()
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Columns `|J,M⟩` in the product basis, `J` increasing, `M` decreasing
/// within each `J`. Phases: the component on `|j1,j1⟩⊗|j2,J−j1⟩` is positive.
pub fn coupled_basis(system: SpinPair) -> DenseOperator {
    let (j1, j2) = (system.j1(), system.j2());
    let (n1, n2) = (system.n1() as usize, system.n2() as usize);
    let dim = system.dim();
    let lower = kron(&ladder(j1).0.adjoint(), &identity(n2)) + kron(&identity(n1), &ladder(j2).0.adjoint());
    let index = |m1: HalfInt, m2: HalfInt| ((j1 - m1).twice() / 2) as usize * n2 + ((j2 - m2).twice() / 2) as usize;

    // blocks[J] = columns |J,J⟩, |J,J−1⟩, …
    let mut blocks: Vec<Vec<nalgebra::DVector<Complex64>>> = Vec::new();
    for big_j in system.j_values().into_iter().rev() {
        // removes the components along larger-J states with M = big_j − step
        let orthogonalize = |v: &mut nalgebra::DVector<Complex64>, step: usize| {
            for block in &blocks {
                let prev = &block[(block.len() - big_j.multiplicity() as usize) / 2 + step];
                let overlap = prev.dotc(v);
                *v -= prev * overlap;
            }
            *v /= c(v.norm());
        };
        let mut top = nalgebra::DVector::zeros(dim);
        top[index(j1, big_j - j1)] = c(1.0);
        orthogonalize(&mut top, 0);
        let mut column = vec![top];
        for step in 1..big_j.multiplicity() as usize {
            let mut next = &lower * column.last().expect("nonempty");
            orthogonalize(&mut next, step);
            column.push(next);
        }
        blocks.push(column);
    }
    blocks.reverse();
    let columns: Vec<_> = blocks.into_iter().flatten().collect();
    DenseOperator::bipartite(system, CMatrix::from_columns(&columns))
}

/// Per-system matrices reused across calls: the coupled basis and every `Q_K`.
struct Blocks {
    basis: CMatrix,
    q: Vec<CMatrix>,
}

fn blocks(system: SpinPair) -> Arc<Blocks> {
    static CACHE: OnceLock<RwLock<HashMap<SpinPair, Arc<Blocks>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&system) {
        return Arc::clone(b);
    }
    let built = Arc::new(Blocks {
        basis: coupled_basis(system).matrix,
        q: (0..system.len() as u32).map(|k| invariant_q(system, k).expect("K < n1").matrix).collect(),
    });
    let mut guard = cache.write().unwrap_or_else(|e| e.into_inner());
    Arc::clone(guard.entry(system).or_insert(built))
}

/// `P_J = Σ_M |J,M⟩⟨J,M|`.
pub fn projector(system: SpinPair, j: HalfInt) -> Result<DenseOperator> {
    let idx = system
        .j_index(j)
        .ok_or_else(|| Error::OutOfRange(format!("J = {j} outside {}..{}", system.j_min(), system.j_max())))?;
    let b = blocks(system);
    let u = &b.basis;
    let start: usize = system.j_values()[..idx].iter().map(|x| x.multiplicity() as usize).sum();
    let cols = u.columns(start, j.multiplicity() as usize);
    Ok(DenseOperator::bipartite(system, cols * cols.adjoint()))
}

/// `T_{K,q}` for spin `j` with `Tr(T T†) = 1`, built as `(−1)^K (J₊)^K`
/// normalized, then lowered by `[J₋, T_{K,q}] = √((K+q)(K−q+1)) T_{K,q−1}`.
pub fn tensor_component(j: HalfInt, k: u32, q: i32) -> Result<DenseOperator> {
    if i64::from(k) > i64::from(j.twice()) || q.unsigned_abs() > k {
        return Err(Error::OutOfRange(format!("T_(K={k}, q={q}) for j = {j}")));
    }
    let (plus, _) = ladder(j);
    let minus = plus.adjoint();
    let n = j.multiplicity() as usize;
    let mut t = identity(n);
    for _ in 0..k {
        t = &t * &plus;
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    t *= c(sign / t.norm());
    let k = k as i32;
    let mut cur = k;
    while cur > q {
        let factor = f64::from((k + cur) * (k - cur + 1)).sqrt();
        t = (&minus * &t - &t * &minus) * c(1.0 / factor);
        cur -= 1;
    }
    Ok(DenseOperator::single(t))
}

/// `Q_K = Σ_q T^{(1)}_{K,q} ⊗ T^{(2)†}_{K,q}`.
pub fn invariant_q(system: SpinPair, k: u32) -> Result<DenseOperator> {
    if k as usize >= system.len() {
        return Err(Error::OutOfRange(format!("Q_K needs K < n1 = {}", system.n1())));
    }
    let mut q_op = CMatrix::zeros(system.dim(), system.dim());
    for q in -(k as i32)..=(k as i32) {
        let t1 = tensor_component(system.j1(), k, q)?.matrix;
        let t2 = tensor_component(system.j2(), k, q)?.matrix;
        q_op += kron(&t1, &t2.adjoint());
    }
    Ok(DenseOperator::bipartite(system, q_op))
}

/// `ϱ = (n1 n2)^(−1/2) Σ_J α_J (2J+1)^(−1/2) P_J`.
pub fn assemble_alpha(alpha: &AlphaVector) -> DenseOperator {
    let system = alpha.system();
    let b = blocks(system);
    let u = &b.basis;
    let mut diag = Vec::with_capacity(system.dim());
    for (j, a) in system.j_values().iter().zip(alpha.coords()) {
        let w = a / (system.dim() as f64 * f64::from(j.multiplicity())).sqrt();
        diag.extend(std::iter::repeat_n(c(w), j.multiplicity() as usize));
    }
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    DenseOperator::bipartite(system, u * d * u.adjoint())
}

/// `ϱ = (n1 n2)^(−1/2) Σ_K β_K (2K+1)^(−1/2) Q_K`.
pub fn assemble_beta(beta: &BetaVector) -> DenseOperator {
    let system = beta.system();
    let blk = blocks(system);
    let mut m = CMatrix::zeros(system.dim(), system.dim());
    for (k, b) in beta.coords().iter().enumerate() {
        m += &blk.q[k] * c(b / (system.dim() as f64 * (2 * k + 1) as f64).sqrt());
    }
    DenseOperator::bipartite(system, m)
}

/// `α_J = √(n1 n2/(2J+1)) Tr(P_J ϱ)`: coordinates of the twirled operator.
pub fn dense_pi(rho: &DenseOperator) -> AlphaVector {
    let system = rho.require_system();
    let b = blocks(system);
    let u = &b.basis;
    let in_coupled = u.adjoint() * &rho.matrix * u;
    let mut offset = 0;
    let coords = system
        .j_values()
        .iter()
        .map(|j| {
            let mult = j.multiplicity() as usize;
            let tr: f64 = (offset..offset + mult).map(|i| in_coupled[(i, i)].re).sum();
            offset += mult;
            (system.dim() as f64 / mult as f64).sqrt() * tr
        })
        .collect();
    AlphaVector::new(system, coords).expect("n1 coordinates")
}

/// `β_K = √(n1 n2/(2K+1)) Tr(Q_K ϱ)`, after checking `ϱ` equals its twirl.
/// On failure the error carries the β of the twirled operator.
pub fn extract_beta(rho: &DenseOperator) -> Result<BetaVector> {
    let system = rho.require_system();
    let blk = blocks(system);
    let coords: Vec<f64> = (0..system.len())
        .map(|k| (system.dim() as f64 / (2 * k + 1) as f64).sqrt() * (&blk.q[k] * &rho.matrix).trace().re)
        .collect();
    let beta = BetaVector::new(system, coords)?;
    let twirled = assemble_alpha(&dense_pi(rho));
    let residual = max_abs(&(&rho.matrix - &twirled.matrix));
    if residual > INVARIANCE_TOL {
        return Err(Error::NotInvariant { residual, projected: beta });
    }
    Ok(beta)
}

/// `V = exp(−iπ J_y)`.
pub fn time_reversal(j: HalfInt) -> DenseOperator {
    DenseOperator::single(unitary_exp(&spin_matrices(j)[1], std::f64::consts::PI))
}

/// Transpose on the first factor.
pub fn dense_partial_transpose(rho: &DenseOperator) -> DenseOperator {
    let system = rho.require_system();
    let (n1, n2) = (system.n1() as usize, system.n2() as usize);
    let m = &rho.matrix;
    let out = CMatrix::from_fn(system.dim(), system.dim(), |r, col| {
        let (i1, i2) = (r / n2, r % n2);
        let (k1, k2) = (col / n2, col % n2);
        m[(k1 * n2 + i2, i1 * n2 + k2)]
    });
    debug_assert_eq!(out.nrows(), n1 * n2);
    DenseOperator::bipartite(system, out)
}

/// `ϑ₁(ϱ) = (V⊗𝟙) ϱ^{T₁} (V⊗𝟙)†`.
pub fn dense_theta1(rho: &DenseOperator) -> DenseOperator {
    let system = rho.require_system();
    let v = kron(&time_reversal(system.j1()).matrix, &identity(system.n2() as usize));
    let pt = dense_partial_transpose(rho).matrix;
    DenseOperator::bipartite(system, &v * pt * v.adjoint())
}

/// `Tr₁ ϱ`.
pub fn partial_trace_first(rho: &DenseOperator) -> CMatrix {
    let system = rho.require_system();
    let (n1, n2) = (system.n1() as usize, system.n2() as usize);
    CMatrix::from_fn(n2, n2, |a, b| (0..n1).map(|i| rho.matrix[(i * n2 + a, i * n2 + b)]).sum())
}

/// `Φ₁(ϱ) = 𝟙⊗Tr₁ϱ − ϱ − ϑ₁(ϱ)`.
pub fn dense_breuer(rho: &DenseOperator) -> DenseOperator {
    let system = rho.require_system();
    let reduced = kron(&identity(system.n1() as usize), &partial_trace_first(rho));
    let out = reduced - &rho.matrix - dense_theta1(rho).matrix;
    DenseOperator::bipartite(system, out)
}

/// `|φ¹⟩⟨φ¹| ⊗ |φ²⟩⟨φ²|`.
pub fn product_density(state: &PureProductState) -> DenseOperator {
    let v1 = nalgebra::DVector::from_column_slice(state.amps1());
    let v2 = nalgebra::DVector::from_column_slice(state.amps2());
    let psi = v1.kronecker(&v2);
    DenseOperator::bipartite(state.system(), &psi * psi.adjoint())
}

/// `D(R)⊗D(R)` for rotations by a fixed angle about x, y and z.
pub fn sample_rotations(system: SpinPair) -> Vec<CMatrix> {
    let g1 = spin_matrices(system.j1());
    let g2 = spin_matrices(system.j2());
    g1.iter()
        .zip(&g2)
        .map(|(a, b)| kron(&unitary_exp(a, ROTATION_ANGLE), &unitary_exp(b, ROTATION_ANGLE)))
        .collect()
}

/// `max_R max |[D(R)⊗D(R), M]|` over [`sample_rotations`].
pub fn rotation_commutator(op: &DenseOperator) -> f64 {
    sample_rotations(op.require_system())
        .iter()
        .map(|r| max_abs(&(r * &op.matrix - &op.matrix * r)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::tensor_component_matrix;
    use crate::repr::{alpha_to_beta, maximally_mixed, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sys(n1: u32, n2: u32) -> SpinPair {
        SpinPair::new(n1, n2).unwrap()
    }

    #[test]
    fn coupled_basis_unitary_and_top_column() {
        let s = sys(4, 6);
        let u = coupled_basis(s).matrix;
        assert!(max_abs(&(u.adjoint() * &u - identity(24))) < 1e-12);
        let top = u.column(24 - 9);
        assert!((top[0] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn singlet_column() {
        let u = coupled_basis(sys(2, 2)).matrix;
        let r = 0.5f64.sqrt();
        let expected = [0.0, r, -r, 0.0];
        for (i, e) in expected.iter().enumerate() {
            assert!((u[(i, 0)] - c(*e)).norm() < 1e-12);
        }
    }

    #[test]
    fn projectors_resolve_identity() {
        let s = sys(4, 5);
        let mut total = CMatrix::zeros(20, 20);
        for j in s.j_values() {
            let p = projector(s, j).unwrap().matrix;
            assert!(max_abs(&(&p * &p - &p)) < 1e-12);
            assert!((p.trace().re - f64::from(j.multiplicity())).abs() < 1e-12);
            total += p;
        }
        assert!(max_abs(&(total - identity(20))) < 1e-12);
        assert!(projector(s, HalfInt::from_int(7)).is_err());
    }

    #[test]
    fn tensor_components_match_three_j_form() {
        for twice_j in 0..=5 {
            let j = HalfInt::from_twice(twice_j);
            for k in 0..=twice_j as u32 {
                for q in -(k as i32)..=k as i32 {
                    let dense = tensor_component(j, k, q).unwrap().matrix;
                    let exact = tensor_component_matrix(j, HalfInt::from_int(k as i32), HalfInt::from_int(q));
                    for (z, x) in dense.transpose().iter().zip(&exact) {
                        assert!((z - c(*x)).norm() < 1e-12, "j={j} K={k} q={q}");
                    }
                }
            }
        }
        assert!(tensor_component(HalfInt::ONE, 3, 0).is_err());
    }

    #[test]
    fn q_operators() {
        let s = sys(4, 6);
        let q0 = invariant_q(s, 0).unwrap();
        assert!(max_abs(&(q0.matrix - identity(24) * c(1.0 / 24f64.sqrt()))) < 1e-12);
        for k in 1..4 {
            let q = invariant_q(s, k).unwrap();
            assert!(q.trace().norm() < 1e-12);
            assert!(q.hermiticity_residual() < 1e-12);
            assert!(rotation_commutator(&q) < 1e-9);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!(max_abs(&(dense_theta1(&q).matrix - &q.matrix * c(sign))) < 1e-12);
        }
    }

    #[test]
    fn v_for_spin_half() {
        let v = time_reversal(HalfInt::HALF).matrix;
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(1.0), c(0.0)]);
        assert!(max_abs(&(&v - expected)) < 1e-12);
        assert!(max_abs(&(v.adjoint() * &v - identity(2))) < 1e-12);
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = sys(4, 6);
        for _ in 0..5 {
            let a = random_state(s, &mut rng);
            let rho = assemble_alpha(&a);
            let b = extract_beta(&rho).unwrap();
            assert!(b.max_abs_diff(&alpha_to_beta(&a)) < 1e-10);
            assert!(max_abs(&(assemble_beta(&b).matrix - &rho.matrix)) < 1e-10);
            assert!(dense_pi(&rho).max_abs_diff(&a) < 1e-10);
        }
        let mm = extract_beta(&assemble_alpha(&maximally_mixed(s))).unwrap();
        assert!(mm.max_abs_diff(&BetaVector::identity_state(s)) < 1e-12);
    }

    #[test]
    fn extraction_rejects_non_invariant() {
        let s = sys(2, 3);
        let p = PureProductState::basis(s, HalfInt::HALF, HalfInt::ONE).unwrap();
        match extract_beta(&product_density(&p)) {
            Err(Error::NotInvariant { residual, projected }) => {
                assert!(residual > 1e-3);
                assert!((projected.get(0) - 1.0).abs() < 1e-12);
            }
            other => panic!("expected NotInvariant, got {other:?}"),
        }
    }

    #[test]
    fn breuer_of_identity_is_uniform() {
        let s = sys(6, 8);
        let rho = assemble_alpha(&maximally_mixed(s));
        let (spec, residual) = dense_breuer(&rho).spectrum();
        assert!(residual < 1e-10);
        for x in spec {
            assert!((x - 4.0 / 48.0).abs() < 1e-12);
        }
    }
}
