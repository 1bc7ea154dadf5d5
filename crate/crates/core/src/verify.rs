//! Self-checks run by `rotinv verify`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense;
use crate::error::Result;
use crate::geometry::{
    alpha_extreme_points, d_tilde_point, gamma_hyperplane, intersection_points_4xn, l_matrix_4xn,
    segment_detection_threshold, segment_threshold_closed_form, vertices_4xn,
};
use crate::maps::{breuer_detects, breuer_map, partial_time_reversal, pi_project, PureProductState};
use crate::repr::{alpha_to_beta, beta_to_alpha, build_l_matrix, orthogonality_residual, random_state, SpinPair, DEFAULT_TOL};
use crate::spin::HalfInt;
use crate::wigner::boundary_identity_sums;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn residual(name: &str, max_residual: f64, tolerance: f64) -> Self {
        Check { name: name.to_string(), max_residual, tolerance, pass: max_residual < tolerance }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Adds the randomized dense-matrix comparisons.
    pub deep: bool,
    pub seed: u64,
    /// Random states per system in deep mode.
    pub samples: usize,
    /// Shift applied to `L[0][0]` before the L checks.
    pub perturb_l: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { deep: false, seed: 2024, samples: 100, perturb_l: None }
    }
}

fn even_systems() -> impl Iterator<Item = SpinPair> {
    [4u32, 6, 8, 10].into_iter().flat_map(|n1| (n1..=20).map(move |n2| SpinPair::new(n1, n2).expect("valid")))
}

pub fn run_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let perturb = opts.perturb_l.unwrap_or(0.0);

    let mut worst = 0.0f64;
    for s in even_systems() {
        let l = build_l_matrix(s).perturbed(0, 0, perturb);
        worst = worst.max(orthogonality_residual(s.len(), l.entries()));
    }
    checks.push(Check::residual("L orthogonality", worst, 1e-12));

    let mut worst = 0.0f64;
    for n in 4..=20 {
        let s = SpinPair::new(4, n)?;
        let l = build_l_matrix(s).perturbed(0, 0, perturb);
        for (k, row) in l_matrix_4xn(n)?.iter().enumerate() {
            for (col, x) in row.iter().enumerate() {
                worst = worst.max((x.to_f64() - l.get(k, col)).abs());
            }
        }
    }
    checks.push(Check::residual("4xN closed-form L", worst, 1e-12));

    let mut worst = 0.0f64;
    for s in even_systems() {
        let (s1, s2) = boundary_identity_sums(s.n1(), s.n2());
        worst = worst.max(s1.to_f64().abs()).max((s2.to_f64() + 1.0 / f64::from(s.n2())).abs());
    }
    checks.push(Check::residual("boundary 6-j identity", worst, 1e-12));

    let mut worst = 0.0f64;
    for n in 4..=20 {
        let s = SpinPair::new(4, n)?;
        for (v, a) in vertices_4xn(n)?.iter().zip(alpha_extreme_points(s)) {
            worst = worst.max(v.beta.max_abs_diff(&alpha_to_beta(&a)));
        }
    }
    checks.push(Check::residual("4xN vertices vs pipeline", worst, 1e-12));

    let mut worst = 0.0f64;
    for n in 4..=20 {
        for p in intersection_points_4xn(n)? {
            for b in [p.beta.clone(), partial_time_reversal(&p.beta)] {
                let a = beta_to_alpha(&b);
                worst = worst.max((-a.min()).max(0.0)).max(a.coords().iter().map(|x| x.abs()).fold(f64::MAX, f64::min));
            }
        }
    }
    checks.push(Check::residual("E, F, G on both tetrahedra", worst, 1e-10));

    let (mut on_gamma, mut interior) = (0.0f64, f64::INFINITY);
    for s in even_systems() {
        let d = d_tilde_point(s)?;
        on_gamma = on_gamma.max(gamma_hyperplane(s)?.evaluate(&d.beta).abs());
        interior = interior.min(beta_to_alpha(&d.beta).min());
    }
    checks.push(Check::residual("D~'' on Gamma", on_gamma, 1e-12));
    checks.push(Check {
        name: "D~'' interior (min alpha)".to_string(),
        max_residual: interior,
        tolerance: 0.0,
        pass: interior > 0.0,
    });

    let mut worst = 0.0f64;
    for n in 4..=20 {
        let t = segment_detection_threshold(n, DEFAULT_TOL, 1e-12)?;
        worst = worst.max((t - segment_threshold_closed_form(n)).abs());
    }
    checks.push(Check::residual("segment threshold t*", worst, 1e-9));

    let mut worst = 0.0f64;
    for n in 4..=20 {
        let s = SpinPair::new(4, n)?;
        let p = PureProductState::basis(s, HalfInt::from_twice(-1), s.j2())?;
        worst = worst.max(pi_project(&p).max_abs_diff(&intersection_points_4xn(n)?[0].beta));
    }
    checks.push(Check::residual("projection onto E", worst, 1e-12));

    if opts.deep {
        checks.extend(dense_checks(opts)?);
    }
    Ok(checks)
}

fn dense_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (mut extract, mut breuer, mut spectra, mut sign_mismatch) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for (n1, n2) in [(4, 4), (4, 6), (6, 6), (6, 8)] {
        let s = SpinPair::new(n1, n2)?;
        for _ in 0..opts.samples {
            let alpha = random_state(s, &mut rng);
            let beta = alpha_to_beta(&alpha);
            let rho = dense::assemble_alpha(&alpha);
            extract = extract.max(dense::extract_beta(&rho)?.max_abs_diff(&beta));
            let phi = dense::dense_breuer(&rho);
            breuer = breuer.max(dense::extract_beta(&phi)?.max_abs_diff(&breuer_map(&beta)?));
            let dense_min = phi.min_eigenvalue();
            if dense_min.abs() > 1e-9 && (dense_min < 0.0) != breuer_detects(&beta, DEFAULT_TOL)? {
                sign_mismatch += 1;
            }
            let (a, _) = dense::dense_theta1(&rho).spectrum();
            let (b, _) = dense::dense_partial_transpose(&rho).spectrum();
            spectra = spectra.max(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
        }
    }
    Ok(vec![
        Check::residual("dense extract_beta = L alpha", extract, 1e-10),
        Check::residual("dense Breuer map = parameter map", breuer, 1e-10),
        Check::residual("Breuer sign disagreements", sign_mismatch as f64, 0.5),
        Check::residual("theta1 spectrum = partial transpose spectrum", spectra, 1e-10),
    ])
}

/// Plain-text table of checks.
pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  {:>12}  {:>9}  result\n", "check", "residual", "tol");
    for c in checks {
        out.push_str(&format!(
            "{:<width$}  {:>12.3e}  {:>9.1e}  {}\n",
            c.name,
            c.max_residual,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}
