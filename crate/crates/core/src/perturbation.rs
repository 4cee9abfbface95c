//! Weak-coupling expansions near resonance: the q-coefficients of the effective determinant,
//! the second-order coefficient `C₂(τ, s)` of `F⁻²`, the vacuum perturbative fidelity,
//! and log-log convergence-order fits against exact results.
//!
//! All quantities are dimensionless: `ω_a = 1`, `ω_b = 1 + ε`, `g̃ = g/ω_a`, `τ = ω_a t`.

use crate::dynamics::{diagonalize, time_from_tau, NormalModes, OscillatorParams};
use crate::error::{Error, Result};
use crate::metrics::{fidelity_eff, FidelityReport};
use crate::states::squeezed_pair;

/// Threshold on `g̃²τ` beyond which the second-order expansion is no longer trusted.
pub const LONG_TIME_THRESHOLD: f64 = 0.1;

/// Dimensionless weak-coupling parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbativeRegime {
    pub g_tilde: f64,
    pub epsilon: f64,
    pub tau: f64,
    pub s: f64,
}

/// Conditions under which the expansions are outside their window of validity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RegimeFlags {
    /// `ε ≠ 0` while the quantity assumes resonance.
    pub off_resonance: bool,
    /// `|ε| ≥ g̃` with `ε ≠ 0`: the detuning is not small compared to the coupling.
    pub large_detuning: bool,
    /// `g̃²τ ≥ 0.1`: secular terms are no longer negligible.
    pub long_time: bool,
}

impl RegimeFlags {
    /// True when no flag is raised.
    pub fn is_clean(&self) -> bool {
        !(self.off_resonance || self.large_detuning || self.long_time)
    }
}

/// A value together with the regime flags of the point where it was evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub flags: RegimeFlags,
}

impl PerturbativeRegime {
    /// Validated regime; `g̃ = 0` is allowed as the uncoupled limit.
    pub fn new(g_tilde: f64, epsilon: f64, tau: f64, s: f64) -> Result<Self> {
        let r = PerturbativeRegime {
            g_tilde,
            epsilon,
            tau,
            s,
        };
        r.validate()?;
        Ok(r)
    }

    /// Resonant regime `ε = 0`.
    pub fn resonant(g_tilde: f64, tau: f64, s: f64) -> Result<Self> {
        Self::new(g_tilde, 0.0, tau, s)
    }

    /// Checks `g̃ ∈ [0, 0.5)`, `1 + ε > 0` and finite inputs.
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.g_tilde, self.epsilon, self.tau, self.s]
            .iter()
            .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::NonFinite);
        }
        if !(0.0..0.5).contains(&self.g_tilde) {
            return Err(Error::InvalidParameter(format!(
                "g̃ = {} outside [0, 0.5)",
                self.g_tilde
            )));
        }
        if 1.0 + self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "detuning ε = {} gives a non-positive frequency",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Regime flags for this point.
    pub fn flags(&self) -> RegimeFlags {
        RegimeFlags {
            off_resonance: self.epsilon != 0.0,
            large_detuning: self.epsilon != 0.0 && self.epsilon.abs() >= self.g_tilde,
            long_time: self.g_tilde * self.g_tilde * self.tau >= LONG_TIME_THRESHOLD,
        }
    }

    /// Oscillator parameters `ω_a = 1`, `ω_b = 1 + ε`, `g_bs = g_sq = g̃`.
    pub fn params(&self) -> Result<OscillatorParams> {
        OscillatorParams::equal(1.0, 1.0 + self.epsilon, self.g_tilde)
    }

    fn wrap<T>(&self, value: T) -> Flagged<T> {
        Flagged {
            value,
            flags: self.flags(),
        }
    }
}

/// The four q-coefficients of the effective determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QCoefficients {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
}

impl QCoefficients {
    /// As an array `[q₁, q₂, q₃, q₄]`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.q1, self.q2, self.q3, self.q4]
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &QCoefficients) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Exact q-coefficients from the entries of the real diagonalizer.
pub fn q_from_normal_modes(nm: &NormalModes) -> QCoefficients {
    let (a, b) = (&nm.diagonalizer.alpha, &nm.diagonalizer.beta);
    let e = |m: &crate::matcore::CMat, i: usize, j: usize| m[(i, j)].re;
    let da = a.det().re;
    let db = b.det().re;
    let m = e(a, 0, 0) * e(b, 1, 1) - e(a, 0, 1) * e(b, 1, 0);
    let n = e(a, 1, 1) * e(b, 0, 0) - e(a, 1, 0) * e(b, 0, 1);
    let (da2, db2, m2, n2) = (da * da, db * db, m * m, n * n);
    QCoefficients {
        q1: da2 + db2 - m2 - n2,
        q2: da2 + db2 + m2 + n2,
        q3: -da2 + db2 + m2 - n2,
        q4: -da2 + db2 - m2 + n2,
    }
}

/// Exact q-coefficients at `ω_a = 1`, `ω_b = 1 + ε`, coupling `g̃`.
pub fn q_coefficients(regime: &PerturbativeRegime) -> Result<QCoefficients> {
    regime.validate()?;
    Ok(q_from_normal_modes(&diagonalize(&regime.params()?)?))
}

/// Resonant closed forms `q₁ = 1`, `q₂ = (1 − g̃²)/√(1 − 4g̃²)`,
/// `q₃ = −(1 + g̃)/√(1 + 2g̃)`, `q₄ = −(1 − g̃)/√(1 − 2g̃)`.
pub fn q_resonant(g_tilde: f64) -> QCoefficients {
    let g = g_tilde;
    QCoefficients {
        q1: 1.0,
        q2: (1.0 - g * g) / (1.0 - 4.0 * g * g).sqrt(),
        q3: -(1.0 + g) / (1.0 + 2.0 * g).sqrt(),
        q4: -(1.0 - g) / (1.0 - 2.0 * g).sqrt(),
    }
}

/// Expansions to first order in the detuning `ε` (second order for `q₁`).
pub fn q_linear_in_detuning(g_tilde: f64, epsilon: f64) -> QCoefficients {
    let (g, e) = (g_tilde, epsilon);
    let g2 = g * g;
    QCoefficients {
        q1: 1.0 + e * e / 8.0,
        q2: (1.0 - g2 - g2 * (1.0 + 2.0 * g2) / (1.0 - 4.0 * g2) * e) / (1.0 - 4.0 * g2).sqrt(),
        q3: -(1.0 + g - g2 * e / (2.0 + 4.0 * g)) / (1.0 + 2.0 * g).sqrt(),
        q4: -(1.0 - g - g2 * e / (2.0 - 4.0 * g)) / (1.0 - 2.0 * g).sqrt(),
    }
}

/// `|det A(t)|²` from the q-coefficients and the normal-mode frequencies.
pub fn det_a_squared(q: &QCoefficients, kappa_plus: f64, kappa_minus: f64, t: f64) -> f64 {
    let (sp, cp) = (kappa_plus * t).sin_cos();
    let (sm, cm) = (kappa_minus * t).sin_cos();
    let re = 1.0 + (cp * cm - 1.0) * q.q1 - sp * sm * q.q2;
    let im = sp * cm * q.q3 + cp * sm * q.q4;
    re * re + im * im
}

/// Dimensionless resonant normal-mode frequencies `κ̃± = √(1 ± 2g̃)`.
pub fn resonant_kappas(g_tilde: f64) -> (f64, f64) {
    ((1.0 + 2.0 * g_tilde).sqrt(), (1.0 - 2.0 * g_tilde).sqrt())
}

fn sine_sum(regime: &PerturbativeRegime) -> f64 {
    let (kp, km) = resonant_kappas(regime.g_tilde);
    (kp * regime.tau).sin().powi(2) + (km * regime.tau).sin().powi(2)
}

/// Lowest-order vacuum fidelity `1 − (g̃²/2)(sin²κ̃₊τ + sin²κ̃₋τ)` at resonance.
pub fn vacuum_perturbative_fidelity(regime: &PerturbativeRegime) -> Flagged<f64> {
    let g2 = regime.g_tilde * regime.g_tilde;
    regime.wrap(1.0 - 0.5 * g2 * sine_sum(regime))
}

/// Lowest-order squared Bures distance `(g̃²/2)(sin²κ̃₊τ + sin²κ̃₋τ)` for the vacuum.
pub fn vacuum_perturbative_bures_sq(regime: &PerturbativeRegime) -> Flagged<f64> {
    let g2 = regime.g_tilde * regime.g_tilde;
    regime.wrap(0.5 * g2 * sine_sum(regime))
}

/// Second-order coefficient `C₂(τ, s)` in `F⁻² ≈ 1 + C₂ g̃²` at resonance.
pub fn c2_coefficient(regime: &PerturbativeRegime) -> Flagged<f64> {
    let (g, tau, s) = (regime.g_tilde, regime.tau, regime.s);
    let sh2 = (2.0 * s).sinh().powi(2);
    let (ch, sh) = (s.cosh(), s.sinh());
    let c2t = (2.0 * tau).cos();
    let c2g = (2.0 * g * tau).cos();
    let value = 0.5 * sh2 * g * g * tau * tau
        - 0.5 * (4.0 * s).sinh() * c2t * (2.0 * g * tau).sin() * g * tau
        + (ch.powi(4) + sh.powi(4)) * (1.0 - c2t * c2g)
        + 0.25 * sh2 * (2.0 * c2t * c2g - (4.0 * tau).cos() * (4.0 * g * tau).cos() - 1.0);
    regime.wrap(value)
}

/// Second-order prediction `1 + C₂ g̃²` for `F⁻²`.
pub fn c2_inverse_fidelity_sq(regime: &PerturbativeRegime) -> Flagged<f64> {
    let c2 = c2_coefficient(regime);
    Flagged {
        value: 1.0 + c2.value * regime.g_tilde * regime.g_tilde,
        flags: c2.flags,
    }
}

/// Exact fidelity report for the squeezed pair `s` at this regime point.
pub fn exact_report(regime: &PerturbativeRegime) -> Result<FidelityReport> {
    regime.validate()?;
    let p = regime.params()?;
    let state = squeezed_pair(regime.s)?;
    fidelity_eff(&state.factor, &p, time_from_tau(regime.tau, 1.0))
}

/// Exact fidelity at this regime point.
pub fn exact_fidelity(regime: &PerturbativeRegime) -> Result<f64> {
    Ok(exact_report(regime)?.fidelity)
}

/// Least-squares slope of `ln y` against `ln x`, skipping points where either is zero.
pub fn convergence_order(points: &[(f64, f64)]) -> Result<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "convergence fit needs at least 2 non-zero points, got {}",
            logs.len()
        )));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "convergence fit needs distinct coupling values".into(),
        ));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

/// Points `(g̃, 1 − F_exact)` along a coupling ladder at fixed `g̃τ`.
pub fn infidelity_ladder_fixed_gt(ladder: &[f64], g_tau: f64, s: f64) -> Result<Vec<(f64, f64)>> {
    ladder
        .iter()
        .map(|&g| {
            if g == 0.0 {
                return Ok((
                    0.0,
                    1.0 - exact_fidelity(&PerturbativeRegime::resonant(0.0, 0.0, s)?)?,
                ));
            }
            let r = PerturbativeRegime::resonant(g, g_tau / g, s)?;
            Ok((g, 1.0 - exact_fidelity(&r)?))
        })
        .collect()
}

/// Fitted order of `1 − F` in `g̃` along a ladder at fixed `g̃τ`.
pub fn convergence_order_fixed_gt(ladder: &[f64], g_tau: f64, s: f64) -> Result<f64> {
    convergence_order(&infidelity_ladder_fixed_gt(ladder, g_tau, s)?)
}

/// Points `(g̃, 1 − F_exact)` along a coupling ladder at fixed `τ`.
pub fn infidelity_ladder_fixed_tau(ladder: &[f64], tau: f64, s: f64) -> Result<Vec<(f64, f64)>> {
    ladder
        .iter()
        .map(|&g| {
            let r = PerturbativeRegime::resonant(g, tau, s)?;
            Ok((g, 1.0 - exact_fidelity(&r)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::full_evolution;

    #[test]
    fn regime_validation_and_flags() {
        assert!(PerturbativeRegime::new(0.5, 0.0, 1.0, 0.0).is_err());
        assert!(PerturbativeRegime::new(-0.1, 0.0, 1.0, 0.0).is_err());
        assert!(PerturbativeRegime::new(0.1, -1.0, 1.0, 0.0).is_err());
        assert!(PerturbativeRegime::new(f64::NAN, 0.0, 1.0, 0.0).is_err());
        let r = PerturbativeRegime::resonant(0.1, 5.0, 0.0).unwrap();
        assert!(r.flags().is_clean());
        let long = PerturbativeRegime::resonant(0.1, 10.0, 0.0).unwrap();
        assert!(long.flags().long_time);
        let det = PerturbativeRegime::new(0.01, 0.02, 1.0, 0.0).unwrap();
        assert!(det.flags().large_detuning && det.flags().off_resonance);
        let small = PerturbativeRegime::new(0.1, 0.001, 1.0, 0.0).unwrap();
        assert!(!small.flags().large_detuning && small.flags().off_resonance);
    }

    #[test]
    fn q_at_zero_coupling() {
        let q = q_coefficients(&PerturbativeRegime::resonant(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(q.to_array(), [1.0, 1.0, -1.0, -1.0]);
        assert_eq!(q_resonant(0.0).to_array(), [1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn q_resonant_closed_form_value() {
        let q = q_resonant(0.1);
        assert!((q.q2 - 0.99 / 0.96f64.sqrt()).abs() < 1e-15);
        assert!((q.q2 - 1.010415).abs() < 1e-6);
    }

    #[test]
    fn exact_q_matches_resonant_forms() {
        for g in [0.025, 0.05, 0.1, 0.2, 0.4] {
            let q = q_coefficients(&PerturbativeRegime::resonant(g, 0.0, 0.0).unwrap()).unwrap();
            assert!(q.max_abs_diff(&q_resonant(g)) < 1e-12, "g̃ = {g}");
        }
    }

    #[test]
    fn detuning_expansion_residual_is_quadratic() {
        let g = 0.1;
        let res: Vec<(f64, f64)> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&e| {
                let q = q_coefficients(&PerturbativeRegime::new(g, e, 0.0, 0.0).unwrap()).unwrap();
                (e, q.max_abs_diff(&q_linear_in_detuning(g, e)))
            })
            .collect();
        let order = convergence_order(&res).unwrap();
        assert!(order > 1.8, "order {order}");
    }

    #[test]
    fn determinant_from_q_matches_evolution() {
        for (eps, g, t) in [(0.0, 0.1, 1.3), (0.2, 0.3, 4.0), (-0.1, 0.05, 17.0)] {
            let p = OscillatorParams::equal(1.0, 1.0 + eps, g).unwrap();
            let nm = diagonalize(&p).unwrap();
            let q = q_from_normal_modes(&nm);
            let a = full_evolution(&nm, t).alpha;
            let direct = a.det().norm_sqr();
            let from_q = det_a_squared(&q, nm.kappa_plus, nm.kappa_minus, t);
            assert!((direct - from_q).abs() < 1e-12 * direct, "{eps} {g} {t}");
        }
    }

    #[test]
    fn vacuum_perturbative_trivial_cases() {
        for tau in [0.0, 1.0, 7.3] {
            let r = PerturbativeRegime::resonant(0.0, tau, 0.0).unwrap();
            assert_eq!(vacuum_perturbative_fidelity(&r).value, 1.0);
        }
        // κ̃₊ = 2κ̃₋ at g̃ = 0.3; τ = π/κ̃₋ zeroes both sines.
        let (_, km) = resonant_kappas(0.3);
        let r = PerturbativeRegime::resonant(0.3, std::f64::consts::PI / km, 0.0).unwrap();
        assert!((vacuum_perturbative_fidelity(&r).value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vacuum_perturbative_matches_exact() {
        let r = PerturbativeRegime::resonant(0.01, 5.0, 0.0).unwrap();
        let approx = vacuum_perturbative_fidelity(&r).value;
        let exact = exact_fidelity(&r).unwrap();
        assert!((approx - exact).abs() < 5e-6);
        let b = vacuum_perturbative_bures_sq(&r).value;
        assert!((b - (1.0 - approx)).abs() < 1e-15);
    }

    #[test]
    fn c2_without_squeezing() {
        for (g, tau) in [(0.01, 3.0), (0.1, 0.7), (0.0, 2.0)] {
            let r = PerturbativeRegime::resonant(g, tau, 0.0).unwrap();
            let expected = 1.0 - (2.0 * tau).cos() * (2.0 * g * tau).cos();
            assert!((c2_coefficient(&r).value - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn c2_predicts_exact_inverse_fidelity() {
        let r = PerturbativeRegime::resonant(0.01, 10.0, 0.1).unwrap();
        let exact = exact_fidelity(&r).unwrap().powi(-2);
        let pred = c2_inverse_fidelity_sq(&r).value;
        assert!(
            (exact - pred).abs() < 20.0 * 0.01f64.powi(3),
            "{exact} {pred}"
        );
    }

    #[test]
    fn convergence_order_fit() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&g| (g, 3.0 * g * g))
            .collect();
        assert!((convergence_order(&pts).unwrap() - 2.0).abs() < 1e-12);
        let with_zero = [(0.0, 0.0), (0.1, 0.01), (0.01, 0.0001)];
        assert!((convergence_order(&with_zero).unwrap() - 2.0).abs() < 1e-12);
        assert!(convergence_order(&[(0.1, 1.0)]).is_err());
        assert!(convergence_order(&[(0.1, 1.0), (0.1, 2.0)]).is_err());
    }

    #[test]
    fn zero_coupling_member_is_exact() {
        let pts = infidelity_ladder_fixed_gt(&[0.0, 0.1, 0.05], 0.5, 0.0).unwrap();
        assert_eq!(pts[0], (0.0, 0.0));
    }

    #[test]
    fn infidelity_order_at_fixed_tau() {
        let pts = infidelity_ladder_fixed_tau(&[0.1, 0.05, 0.025], 2.0, 0.0).unwrap();
        let order = convergence_order(&pts).unwrap();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }
}
