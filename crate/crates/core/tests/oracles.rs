//! Cross-checks against independent implementations: Wick moments from the covariance
//! matrix, brute-force Fock propagation and frozen reference values.

use rwa_fidelity::dynamics::{diagonalize, evolution, rwa_evolution, OscillatorParams};
use rwa_fidelity::fockoracle::{
    certified_series, oracle_fidelity, squeezed_amplitudes, InitialState,
};
use rwa_fidelity::matcore::{CMat, C64};
use rwa_fidelity::metrics::{compare, fidelity_eff, gaussian_fidelity, vacuum_moments_from_block};
use rwa_fidelity::perturbation::{
    convergence_order, convergence_order_fixed_gt, exact_fidelity, infidelity_ladder_fixed_tau,
    q_coefficients, q_resonant, PerturbativeRegime,
};
use rwa_fidelity::states::{apply_symplectic, squeezed_pair, vacuum, CovarianceMatrix};

/// `⟨N²⟩` of a zero-mean Gaussian state by Wick's theorem, with `N_jk = ⟨a_j†a_k⟩` and
/// `M_jk = ⟨a_j a_k⟩` read off `σ₁₁ = I + 2Nᵀ` and `σ₁₂ = 2M`.
fn wick_second_moment(cov: &CovarianceMatrix) -> (f64, f64) {
    let s = cov.matrix();
    let mut n = [[C64::new(0.0, 0.0); 2]; 2];
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let delta = if j == k { 1.0 } else { 0.0 };
            n[j][k] = (s[(k, j)] - delta) * 0.5;
            m[j][k] = s[(j, k + 2)] * 0.5;
        }
    }
    let mean = (n[0][0] + n[1][1]).re;
    let mut second = mean * mean;
    for j in 0..2 {
        for k in 0..2 {
            let delta = if j == k { 1.0 } else { 0.0 };
            second += m[j][k].norm_sqr() + (n[j][k] * (n[k][j] + delta)).re;
        }
    }
    (mean, second)
}

#[test]
fn wick_moments_agree_with_trace_formula() {
    for &(g, t) in &[(0.05, 1.0), (0.2, 3.7), (0.35, 12.0)] {
        let p = OscillatorParams::resonant(1.0, g).unwrap();
        let s = evolution(&p, t).unwrap();
        let cov = apply_symplectic(&vacuum().covariance, &s);
        let (mean, second) = wick_second_moment(&cov);
        let m = vacuum_moments_from_block(&s.beta).unwrap();
        assert!((mean - m.delta_n).abs() < 1e-12, "{mean} vs {}", m.delta_n);
        assert!((second - m.number_second_moment).abs() < 1e-11 * (1.0 + second));
    }
}

#[test]
fn wick_moments_agree_with_fock_oracle() {
    let p = OscillatorParams::new(1.0, 1.1, 0.08, 0.03).unwrap();
    let t = 2.5;
    let cov = apply_symplectic(&vacuum().covariance, &evolution(&p, t).unwrap());
    let (mean, second) = wick_second_moment(&cov);
    let o = oracle_fidelity(&p, InitialState::Vacuum, t, 30).unwrap();
    assert!((mean - o.n_full).abs() < 1e-9);
    assert!((second - o.n2_full).abs() < 1e-9);
}

#[test]
fn vacuum_squeezed_overlap_from_fock_amplitudes() {
    let s = 0.4;
    let (c, loss) = squeezed_amplitudes(s, 60);
    assert!(loss < 1e-15);
    let overlap = c[0].powi(4);
    let expected = 1.0 / s.cosh().powi(2);
    assert!((overlap - expected).abs() < 1e-15);
    let f = gaussian_fidelity(&vacuum().covariance, &squeezed_pair(s).unwrap().covariance).unwrap();
    assert!((f - 0.855639).abs() < 5e-7);
    assert!((f - expected).abs() < 1e-12);
}

#[test]
fn oracle_matches_vacuum_fidelity() {
    let p = OscillatorParams::resonant(1.0, 0.05).unwrap();
    let f = fidelity_eff(&vacuum().factor, &p, 1.0).unwrap().fidelity;
    let o = oracle_fidelity(&p, InitialState::Vacuum, 1.0, 30).unwrap();
    assert!((f - o.fidelity).abs() < 1e-6, "{f} vs {}", o.fidelity);
}

#[test]
fn oracle_matches_squeezed_fidelity_and_number_change() {
    let p = OscillatorParams::resonant(1.0, 0.05).unwrap();
    let state = squeezed_pair(0.2).unwrap();
    let times = [0.5, 1.0, 2.0, 5.0];
    let cert = certified_series(&p, InitialState::Squeezed(0.2), &times, 30).unwrap();
    for (o, &t) in cert.results.iter().zip(&times) {
        let c = compare(&state.factor, &p, t).unwrap();
        assert!((c.report.fidelity - o.fidelity).abs() < 1e-5);
        assert!((c.delta_n - o.delta_n).abs() < 1e-5);
    }
}

#[test]
fn oracle_matches_unequal_couplings() {
    let p = OscillatorParams::new(1.0, 0.9, 0.1, 0.04).unwrap();
    let state = squeezed_pair(0.15).unwrap();
    for t in [0.7, 3.0] {
        let c = compare(&state.factor, &p, t).unwrap();
        let o = oracle_fidelity(&p, InitialState::Squeezed(0.15), t, 30).unwrap();
        assert!((c.report.fidelity - o.fidelity).abs() < 1e-6);
        assert!((c.delta_n - o.delta_n).abs() < 1e-6);
    }
}

#[test]
fn recurrence_in_both_routes() {
    let p = OscillatorParams::resonant(1.0, 0.3).unwrap();
    let nm = diagonalize(&p).unwrap();
    assert!((nm.kappa_plus / nm.kappa_minus - 2.0).abs() < 1e-14);
    let t = 2.0 * std::f64::consts::PI / nm.kappa_minus;
    let c = compare(&vacuum().factor, &p, t).unwrap();
    assert!((c.report.fidelity - 1.0).abs() < 1e-8);
    let o = oracle_fidelity(&p, InitialState::Vacuum, t, 40).unwrap();
    assert!((o.fidelity - 1.0).abs() < 1e-6);
    assert!(o.delta_n.abs() < 1e-6);
}

#[test]
fn covariance_fidelity_matches_effective_route() {
    let p = OscillatorParams::equal(1.0, 1.2, 0.15).unwrap();
    let state = squeezed_pair(0.3).unwrap();
    for t in [0.3, 4.0, 11.0] {
        let full = apply_symplectic(&state.covariance, &evolution(&p, t).unwrap());
        let rwa = apply_symplectic(&state.covariance, &rwa_evolution(&p, t));
        let f = gaussian_fidelity(&full, &rwa).unwrap();
        let g = fidelity_eff(&state.factor, &p, t).unwrap().fidelity;
        assert!((f - g).abs() < 1e-9, "{f} vs {g}");
    }
}

#[test]
fn direct_determinant_of_block() {
    let p = OscillatorParams::resonant(1.0, 0.2).unwrap();
    let b = evolution(&p, 3.0).unwrap().beta;
    let x = b.adjoint() * b;
    let det = (CMat::identity(2) + x).det().re;
    let m = vacuum_moments_from_block(&b).unwrap();
    assert!((m.inv_fidelity_sq - det).abs() < 1e-12 * det);
}

#[test]
fn q_coefficients_frozen_value() {
    let q = q_coefficients(&PerturbativeRegime::resonant(0.1, 0.0, 0.0).unwrap()).unwrap();
    assert!((q.q2 - 1.010415).abs() < 5e-7, "{}", q.q2);
    assert!(q.max_abs_diff(&q_resonant(0.1)) <= 0.1f64.powi(3));
}

#[test]
fn fixed_coupling_time_product_slopes_are_frozen() {
    let ladder = [0.1, 0.05, 0.025];
    let vac = convergence_order_fixed_gt(&ladder, 0.5, 0.0).unwrap();
    let sq = convergence_order_fixed_gt(&ladder, 0.5, 0.2).unwrap();
    assert!((vac - 2.1349).abs() < 1e-3, "{vac}");
    assert!((sq - 2.1330).abs() < 1e-3, "{sq}");
}

#[test]
fn fixed_time_slopes_are_quadratic() {
    let ladder = [0.1, 0.05, 0.025];
    for s in [0.0, 0.2] {
        let slope =
            convergence_order(&infidelity_ladder_fixed_tau(&ladder, 2.0, s).unwrap()).unwrap();
        assert!((slope - 2.0).abs() < 0.1, "s = {s}: {slope}");
    }
}

#[test]
fn fixed_coupling_time_product_envelope_is_quadratic() {
    let mut points = Vec::new();
    for g in [0.1, 0.05, 0.025] {
        let end = 0.5 / g;
        let worst = (0..=400)
            .map(|k| {
                let r = PerturbativeRegime::resonant(g, end * k as f64 / 400.0, 0.0).unwrap();
                1.0 - exact_fidelity(&r).unwrap()
            })
            .fold(0.0, f64::max);
        points.push((g, worst));
    }
    let slope = convergence_order(&points).unwrap();
    assert!((slope - 2.0).abs() < 0.1, "{slope}");
}
