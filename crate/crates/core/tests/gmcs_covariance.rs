//! GMCS covariance machinery against a generic dense eigensolver, and the
//! convergence of the finite-modulation rates to the closed-form asymptotes.

use nalgebra::{Matrix4, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coexist_core::qkd::{
    bb84_skr, eve_covariances, gmcs_skr_asymptotic_raw, gmcs_skr_finite_raw, Detection,
};
use coexist_core::GaussianCm;

/// Symplectic eigenvalues through a generic dense route (Williamson): with
/// T = Sigma^{1/2} Omega Sigma^{1/2} antisymmetric, the eigenvalues of the
/// symmetric positive matrix -T^2 are the squared symplectic eigenvalues,
/// each doubled.
fn dense_symplectic(cm: &GaussianCm) -> (f64, f64) {
    let m = cm.to_matrix();
    let sigma = Matrix4::from_fn(|r, c| m[r][c]);
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    let eig = SymmetricEigen::new(sigma);
    let sqrt_vals = Matrix4::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    let sigma_half = eig.eigenvectors * sqrt_vals * eig.eigenvectors.transpose();
    let t = sigma_half * omega * sigma_half;
    let m2 = -(t * t);
    // symmetrize against rounding before the symmetric eigensolver
    let m2s = 0.5 * (m2 + m2.transpose());
    let mut vals: Vec<f64> =
        SymmetricEigen::new(m2s).eigenvalues.iter().map(|&v| v.max(0.0).sqrt()).collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    (vals[3], vals[0])
}

fn random_channel(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    (
        rng.gen_range(0.01..0.99),
        rng.gen_range(0.0..0.3),
        10f64.powf(rng.gen_range(-1.0..2.0)),
    )
}

#[test]
fn closed_form_matches_dense_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0;
    for _ in 0..400 {
        let (t, xi, v_a) = random_channel(&mut rng);
        for detection in [Detection::Homodyne, Detection::Heterodyne] {
            let (sigma_e, sigma_cond) = eve_covariances(t, xi, v_a, detection);
            for cm in [sigma_e, sigma_cond] {
                let (lp, lm) = cm.symplectic_eigenvalues();
                let (dp, dm) = dense_symplectic(&cm);
                assert!((lp - dp).abs() / dp < 1e-10, "lp {lp} vs {dp}");
                assert!((lm - dm).abs() / dm < 1e-10, "lm {lm} vs {dm}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 1000);
}

#[test]
fn eve_state_is_physical() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..300 {
        let (t, xi, v_a) = random_channel(&mut rng);
        let (sigma_e, _) = eve_covariances(t, xi, v_a, Detection::Homodyne);
        let (_, lm) = sigma_e.symplectic_eigenvalues();
        assert!(lm >= 1.0 - 1e-9, "lambda_minus = {lm} at T={t}, xi={xi}, V_A={v_a}");
        assert!(sigma_e.is_physical(1e-9));
    }
}

#[test]
fn finite_va_converges_to_asymptotic_on_grid() {
    let mut worst = 0.0f64;
    for i in 0..5 {
        let t = 0.05 + (0.8 - 0.05) * i as f64 / 4.0;
        for j in 0..5 {
            let xi = 0.05 * j as f64 / 4.0;
            for detection in [Detection::Homodyne, Detection::Heterodyne] {
                let ra = gmcs_skr_asymptotic_raw(t, xi, detection).unwrap();
                let rf = gmcs_skr_finite_raw(1e6, t, xi, detection, 1.0, 1.0, 0.0).unwrap();
                worst = worst.max((ra - rf).abs());
            }
        }
    }
    assert!(worst < 1e-3, "worst |finite - asymptotic| = {worst}");
}

#[test]
fn sigma_e_large_va_asymptotics() {
    // lambda_plus grows with phi_1 and lambda_minus tends to omega
    let (t, xi) = (0.5, 0.01);
    let v_a = 1e6;
    let (sigma_e, _) = eve_covariances(t, xi, v_a, Detection::Homodyne);
    let (lp, lm) = sigma_e.symplectic_eigenvalues();
    let omega = xi / (1.0 - t) + 1.0;
    let phi1 = t * omega + (1.0 - t) * (v_a + 1.0);
    assert!((lp / phi1 - 1.0).abs() < 1e-4, "lambda_plus/phi_1 = {}", lp / phi1);
    assert!((lm - omega).abs() < 1e-4 * omega, "lambda_minus = {lm} vs omega = {omega}");
}

#[test]
fn homodyne_conditional_matches_asymptotic_parameters() {
    // the conditional covariance parameters converge to the published
    // V_A -> infinity limits
    let (t, xi) = (0.25, 0.02);
    let v_a = 1e8;
    let omega = xi / (1.0 - t) + 1.0;
    let psi = f64::sqrt((omega * omega - 1.0) / t);
    let psi1 = f64::sqrt(t * (omega * omega - 1.0));
    let mu = 1.0;
    let phi = t * omega + (1.0 - t) * (2.0 * omega - 1.0 + (xi + mu) / t);
    let (_, cond) = eve_covariances(t, xi, v_a, Detection::Homodyne);
    assert!((cond.omega_a - omega).abs() < 1e-6);
    assert!((cond.omega_b - omega).abs() < 1e-12);
    assert!((cond.psi_a - psi).abs() < 1e-6, "psi_a {} vs {psi}", cond.psi_a);
    assert!((cond.psi_b - psi1).abs() < 1e-12);
    assert!((cond.phi_a - phi).abs() / phi < 1e-6, "phi_a {} vs {phi}", cond.phi_a);
    // phi_b diverges like (1 - T) V_A
    assert!((cond.phi_b / ((1.0 - t) * v_a) - 1.0).abs() < 1e-4);

    // heterodyne conditional eigenvalues approach ((xi + 2 - T)/T, 1)
    let (_, het) = eve_covariances(t, xi, v_a, Detection::Heterodyne);
    let (ltp, ltm) = het.symplectic_eigenvalues();
    assert!((ltp - (xi + 2.0 - t) / t).abs() / ltp < 1e-4, "ltp = {ltp}");
    assert!((ltm - 1.0).abs() < 1e-4, "ltm = {ltm}");
}

#[test]
fn rates_monotone_in_channel_quality() {
    for detection in [Detection::Homodyne, Detection::Heterodyne] {
        // non-increasing in xi
        let mut last = f64::INFINITY;
        for j in 0..=12 {
            let xi = 0.3 * j as f64 / 12.0;
            let r = gmcs_skr_asymptotic_raw(0.4, xi, detection).unwrap();
            assert!(r <= last + 1e-12);
            last = r;
        }
        // non-decreasing in T
        let mut last = f64::NEG_INFINITY;
        for j in 0..=12 {
            let t = 0.01 + (0.9 - 0.01) * j as f64 / 12.0;
            let r = gmcs_skr_asymptotic_raw(t, 0.02, detection).unwrap();
            assert!(r >= last - 1e-12);
            last = r;
        }
    }
}

#[test]
fn gmcs_beats_bb84_at_moderate_loss() {
    let r_gmcs = gmcs_skr_asymptotic_raw(0.5, 0.0, Detection::Heterodyne).unwrap();
    let r_bb84 = bb84_skr(0.0, 0.5);
    assert!(r_gmcs > r_bb84, "{r_gmcs} vs {r_bb84}");
}
