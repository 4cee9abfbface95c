//! Comparison measures between the full and the rotating-wave evolved states:
//! Gaussian fidelity, the effective Bogoliubov matrices, Bures distance, fidelity angle,
//! Bloch–Messiah squeezing parameters and particle-number statistics.

use crate::dynamics::{
    diagonalize, effective_from, evolution, full_evolution, omega_form, rwa_block, rwa_evolution,
    OscillatorParams, SymplecticMatrix,
};
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigvals2, CMat, I};
use crate::states::{CovarianceMatrix, PureStateFactor};

/// Negative radicands down to this size (relative to the scale of the terms) are treated as zero.
pub const RADICAND_TOL: f64 = 1e-9;
/// Radicands whose magnitude is below this fraction of the term scale are rounding noise.
pub const RADICAND_NOISE: f64 = 1e-11;
/// Relative tolerance of the internal cross-checks between equivalent fidelity routes.
pub const ROUTE_TOL: f64 = 1e-9;

/// Fidelity together with the derived distance measures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub bures: f64,
    pub angle: f64,
    pub r_plus: f64,
    pub r_minus: f64,
}

impl FidelityReport {
    /// Report for the pure-state fidelity `1/√det(I + B_f†B_f)` of an effective β-block.
    pub fn from_effective_block(b_f: &CMat) -> Result<Self> {
        let (r_plus, r_minus) = bloch_messiah(b_f)?;
        let fidelity = fidelity_from_block(b_f);
        Ok(FidelityReport {
            fidelity,
            bures: bures_distance(fidelity),
            angle: fidelity_angle(fidelity),
            r_plus,
            r_minus,
        })
    }
}

/// Bures distance `√(2(1 − √F))`.
pub fn bures_distance(fidelity: f64) -> f64 {
    (2.0 * (1.0 - fidelity.clamp(0.0, 1.0).sqrt())).sqrt()
}

/// Fidelity angle `θ_F ∈ [0, π/4]` with `F = cos²(2θ_F)`.
pub fn fidelity_angle(fidelity: f64) -> f64 {
    0.5 * fidelity.clamp(0.0, 1.0).sqrt().acos()
}

/// `1/√det(I + B†B)` for the β-block of an effective evolution.
pub fn fidelity_from_block(b: &CMat) -> f64 {
    let d = (CMat::identity(2) + &b.adjoint() * b).det().re;
    1.0 / d.max(1.0).sqrt()
}

/// The three determinants entering the two-mode Gaussian fidelity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityDeterminants {
    /// `det(I − ΩσΩσ′)`.
    pub gamma: f64,
    /// `det(I + iΩσ)·det(I + iΩσ′)`.
    pub lambda: f64,
    /// `det(σ + σ′)`.
    pub delta: f64,
}

/// Evaluates the determinants `Γ`, `Λ` and `Δ` for two covariance matrices.
pub fn fidelity_determinants(s1: &CovarianceMatrix, s2: &CovarianceMatrix) -> FidelityDeterminants {
    let om = omega_form();
    let id = CMat::identity(4);
    let (a, b) = (s1.matrix(), s2.matrix());
    let gamma = (id - &((&om * a) * om) * b).det().re;
    let l1 = (id + (&om * a).scale(I)).det().re;
    let l2 = (id + (&om * b).scale(I)).det().re;
    let delta = (*a + *b).det().re;
    FidelityDeterminants {
        gamma,
        lambda: l1 * l2,
        delta,
    }
}

fn clamped_sqrt(x: f64, scale: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        if x <= RADICAND_NOISE * scale {
            return Ok(0.0);
        }
        Ok(x.sqrt())
    } else if x >= -RADICAND_TOL * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Unphysical(format!(
            "negative radicand {x:e} in {what}"
        )))
    }
}

/// Fidelity between two zero-mean two-mode Gaussian states,
/// `4/(√Λ + √Γ − √((√Λ + √Γ)² − Δ))`.
pub fn gaussian_fidelity(s1: &CovarianceMatrix, s2: &CovarianceMatrix) -> Result<f64> {
    let d = fidelity_determinants(s1, s2);
    let scale = d.gamma.abs() + d.lambda.abs() + d.delta.abs();
    let sl = clamped_sqrt(d.lambda, scale, "Λ")?;
    let sg = clamped_sqrt(d.gamma, scale, "Γ")?;
    let inner = clamped_sqrt((sl + sg) * (sl + sg) - d.delta, scale, "(√Λ + √Γ)² − Δ")?;
    let denom = sl + sg - inner;
    if denom <= 0.0 {
        return Err(Error::Unphysical(format!(
            "non-positive fidelity denominator {denom:e}"
        )));
    }
    let f = 4.0 / denom;
    if f > 1.0 + 1e-9 {
        return Err(Error::Unphysical(format!("fidelity {f} exceeds 1")));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Singular values of a 2×2 block mapped to squeezing parameters `r = asinh(s)`, `r₊ ≥ r₋`.
pub fn bloch_messiah(block: &CMat) -> Result<(f64, f64)> {
    let (hi, lo) = hermitian_eigvals2(&(&block.adjoint() * block))?;
    Ok((hi.max(0.0).sqrt().asinh(), lo.max(0.0).sqrt().asinh()))
}

/// Effective transformation `s₀⁻¹ S_RWA† S s₀` from two already computed evolutions.
pub fn effective_factor(
    factor: &PureStateFactor,
    full: &SymplecticMatrix,
    rwa: &SymplecticMatrix,
) -> SymplecticMatrix {
    factor
        .s0
        .inverse()
        .compose(&effective_from(full, rwa))
        .compose(&factor.s0)
}

/// Effective Bogoliubov blocks `(A_f, B_f)` for equal couplings, from the four-term expressions
/// in `α₀`, `β₀`, the rotating-wave block `S̃` and the full blocks `A`, `B`.
pub fn effective_bogoliubov(
    factor: &PureStateFactor,
    p: &OscillatorParams,
    t: f64,
) -> Result<(CMat, CMat)> {
    let nm = diagonalize(p)?;
    let s = full_evolution(&nm, t);
    let st = rwa_block(p, t);
    Ok(effective_blocks(factor, &s, &st))
}

fn effective_blocks(factor: &PureStateFactor, s: &SymplecticMatrix, st: &CMat) -> (CMat, CMat) {
    let (a, b) = (&s.alpha, &s.beta);
    let (a0, b0) = (factor.alpha0(), factor.beta0());
    let left = a0.adjoint() * st.adjoint();
    let right = b0.transpose() * st.transpose();
    let a_f = &(&left * a) * a0 + (&left * b) * b0.conj()
        - &(right * b.conj()) * a0
        - (right * a.conj()) * b0.conj();
    let b_f = &(&left * a) * b0 + (&left * b) * a0.conj()
        - &(right * b.conj()) * b0
        - (right * a.conj()) * a0.conj();
    (a_f, b_f)
}

fn check_routes(b_f: &CMat, a_f: &CMat) -> Result<f64> {
    let f_b = fidelity_from_block(b_f);
    let f_a = 1.0 / a_f.det().norm();
    if (f_b - f_a).abs() > ROUTE_TOL * f_b.max(f_a) {
        return Err(Error::Consistency(format!(
            "fidelity from B_f ({f_b}) and from det A_f ({f_a}) disagree"
        )));
    }
    Ok(f_b)
}

/// Fidelity between the full and the rotating-wave evolved states for equal couplings.
pub fn fidelity_eff(
    factor: &PureStateFactor,
    p: &OscillatorParams,
    t: f64,
) -> Result<FidelityReport> {
    let (a_f, b_f) = effective_bogoliubov(factor, p, t)?;
    check_routes(&b_f, &a_f)?;
    FidelityReport::from_effective_block(&b_f)
}

/// Fidelity from two evolutions computed by any route (any couplings).
pub fn fidelity_between(
    factor: &PureStateFactor,
    full: &SymplecticMatrix,
    rwa: &SymplecticMatrix,
) -> Result<FidelityReport> {
    let sf = effective_factor(factor, full, rwa);
    check_routes(&sf.beta, &sf.alpha)?;
    FidelityReport::from_effective_block(&sf.beta)
}

/// Change of the mean total excitation number produced by a full evolution `S = [[A, B], …]`
/// acting on the pure state with factor `s₀`: `Tr(B†B U₀*) + Re Tr(B†A V₀)`.
pub fn delta_n_from(factor: &PureStateFactor, full: &SymplecticMatrix) -> f64 {
    let (a, b) = (&full.alpha, &full.beta);
    let bb = &b.adjoint() * b;
    let passive = (bb * factor.u0().conj()).trace().re;
    let active = ((&b.adjoint() * a) * factor.v0()).trace().re;
    passive + active
}

/// Particle-number variation `⟨N⟩_full(t) − ⟨N⟩_RWA(t)` for equal couplings.
///
/// The rotating-wave evolution conserves the total number, so this is the number
/// change generated by the full evolution alone.
pub fn delta_n(factor: &PureStateFactor, p: &OscillatorParams, t: f64) -> Result<f64> {
    let nm = diagonalize(p)?;
    Ok(delta_n_from(factor, &full_evolution(&nm, t)))
}

/// Number statistics and inverse squared fidelity for an initial vacuum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VacuumMoments {
    /// `F⁻²` from the moment expression.
    pub inv_fidelity_sq: f64,
    /// `⟨N⟩`.
    pub delta_n: f64,
    /// `⟨N²⟩`.
    pub number_second_moment: f64,
    /// `⟨N²⟩ − ⟨N⟩²`.
    pub variance: f64,
}

/// `Tr(B†BB†B)`.
pub fn quartic_trace(b: &CMat) -> f64 {
    let x = &b.adjoint() * b;
    (x * x).trace().re
}

/// `Tr(B†BB†B)` recovered from the number moments, `½[⟨N²⟩ − 2⟨N⟩ − ⟨N⟩²]`.
pub fn quartic_trace_from_moments(delta_n: f64, second_moment: f64) -> f64 {
    0.5 * (second_moment - 2.0 * delta_n - delta_n * delta_n)
}

/// Moments for a full evolution block `B` acting on the vacuum.
pub fn vacuum_moments_from_block(b: &CMat) -> Result<VacuumMoments> {
    let x = &b.adjoint() * b;
    let n = x.trace().re;
    let n2 = 2.0 * n + 2.0 * (x * x).trace().re + n * n;
    let variance = n2 - n * n;
    let inv_fidelity_sq = 1.0 + 1.5 * n + 0.5 * n * n - 0.25 * variance;
    let direct = (CMat::identity(2) + x).det().re;
    if (inv_fidelity_sq - direct).abs() > ROUTE_TOL * direct {
        return Err(Error::Consistency(format!(
            "moment form {inv_fidelity_sq} and determinant {direct} disagree"
        )));
    }
    Ok(VacuumMoments {
        inv_fidelity_sq,
        delta_n: n,
        number_second_moment: n2,
        variance,
    })
}

/// Vacuum moments `(F⁻², ⟨N⟩, ⟨N²⟩, σ²_N)` at time `t` for equal couplings.
pub fn vacuum_fidelity_moments(p: &OscillatorParams, t: f64) -> Result<VacuumMoments> {
    let nm = diagonalize(p)?;
    vacuum_moments_from_block(&full_evolution(&nm, t).beta)
}

/// Fidelity report and number change at one time, for any couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub report: FidelityReport,
    pub delta_n: f64,
}

/// Full comparison at time `t`, using the closed forms for equal couplings and the
/// matrix exponential otherwise.
pub fn compare(factor: &PureStateFactor, p: &OscillatorParams, t: f64) -> Result<Comparison> {
    let full = evolution(p, t)?;
    let rwa = rwa_evolution(p, t);
    let report = if p.has_equal_couplings() {
        let (a_f, b_f) = effective_blocks(factor, &full, &rwa.alpha);
        check_routes(&b_f, &a_f)?;
        FidelityReport::from_effective_block(&b_f)?
    } else {
        fidelity_between(factor, &full, &rwa)?
    };
    Ok(Comparison {
        report,
        delta_n: delta_n_from(factor, &full),
    })
}
