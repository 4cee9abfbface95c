//! Two coupled bosonic modes with beam-splitter and two-mode-squeezing couplings:
//! Hamiltonian matrix, stability, normal modes and the full, rotating-wave and
//! effective symplectic evolutions.
//!
//! Mode-space ordering is `(a, b, a†, b†)` and the symplectic form is
//! `Ω = −i·diag(1, 1, −1, −1)`. A symplectic matrix has the block form
//! `[[α, β], [β*, α*]]`, and the Heisenberg evolution generated by the
//! Hamiltonian matrix `H` is `S(t) = exp(Ω H t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{mat_exp, CMat, C64, I};

/// Relative distance from the critical coupling below which parameters are rejected.
pub const CRITICAL_MARGIN: f64 = 1e-9;

/// `|ω_a² − ω_b²|` below which the resonant mixing angle is used.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Relative tolerance under which two couplings count as equal.
pub const EQUAL_COUPLING_TOL: f64 = 1e-12;

/// Frequencies and couplings of `H = ω_a a†a + ω_b b†b + g_bs(a†b + ab†) + g_sq(a†b† + ab)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub g_bs: f64,
    pub g_sq: f64,
}

impl OscillatorParams {
    /// Builds and validates a parameter set.
    pub fn new(omega_a: f64, omega_b: f64, g_bs: f64, g_sq: f64) -> Result<Self> {
        let p = OscillatorParams {
            omega_a,
            omega_b,
            g_bs,
            g_sq,
        };
        p.validate()?;
        Ok(p)
    }

    /// Equal beam-splitter and squeezing couplings `g`.
    pub fn equal(omega_a: f64, omega_b: f64, g: f64) -> Result<Self> {
        Self::new(omega_a, omega_b, g, g)
    }

    /// Degenerate modes `ω_a = ω_b = ω` with equal couplings `g`.
    pub fn resonant(omega: f64, g: f64) -> Result<Self> {
        Self::new(omega, omega, g, g)
    }

    /// The same frequencies with the squeezing coupling removed.
    pub fn without_squeezing(&self) -> Self {
        OscillatorParams { g_sq: 0.0, ..*self }
    }

    /// Checks positivity of the frequencies, non-negativity of the couplings and stability.
    pub fn validate(&self) -> Result<()> {
        let all = [self.omega_a, self.omega_b, self.g_bs, self.g_sq];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if self.omega_a <= 0.0 || self.omega_b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "frequencies must be positive (omega_a = {}, omega_b = {})",
                self.omega_a, self.omega_b
            )));
        }
        if self.g_bs < 0.0 || self.g_sq < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "couplings must be non-negative (g_bs = {}, g_sq = {})",
                self.g_bs, self.g_sq
            )));
        }
        let critical = critical_coupling(self);
        let coupling = self.g_bs.max(self.g_sq);
        if coupling >= critical * (1.0 - CRITICAL_MARGIN) {
            return Err(Error::Unstable { coupling, critical });
        }
        Ok(())
    }

    /// True when the two couplings are equal within `EQUAL_COUPLING_TOL`.
    pub fn has_equal_couplings(&self) -> bool {
        (self.g_bs - self.g_sq).abs() <= EQUAL_COUPLING_TOL * self.g_bs.max(self.g_sq).max(1e-300)
    }

    /// True when `|ω_a² − ω_b²| < RESONANCE_TOL`.
    pub fn is_resonant(&self) -> bool {
        (self.omega_a * self.omega_a - self.omega_b * self.omega_b).abs() < RESONANCE_TOL
    }

    /// Half detuning `(ω_a − ω_b)/2`.
    pub fn omega_delta(&self) -> f64 {
        0.5 * (self.omega_a - self.omega_b)
    }

    /// Mean frequency `(ω_a + ω_b)/2`.
    pub fn omega_sigma(&self) -> f64 {
        0.5 * (self.omega_a + self.omega_b)
    }

    /// Beam-splitter oscillation frequency `√(ω_Δ² + g_bs²)`.
    pub fn omega_bs(&self) -> f64 {
        self.omega_delta().hypot(self.g_bs)
    }

    /// `ω_a²ω_b² − 2ω_aω_b(g_bs² + g_sq²) + (g_bs² − g_sq²)²`, which equals `κ₊²κ₋²`.
    pub fn stability_margin(&self) -> f64 {
        let p = self.omega_a * self.omega_b;
        let gb2 = self.g_bs * self.g_bs;
        let gs2 = self.g_sq * self.g_sq;
        p * p - 2.0 * p * (gb2 + gs2) + (gb2 - gs2) * (gb2 - gs2)
    }
}

/// Largest coupling of the parameter ray at which the system becomes unstable.
///
/// The ray is fixed by the ratio `g_bs : g_sq` of `p` (equal couplings when both vanish).
/// Stability along the ray holds while `g_bs + g_sq < √(ω_aω_b)`, so equal couplings
/// give `√(ω_aω_b)/2` and a single coupling gives `√(ω_aω_b)`.
pub fn critical_coupling(p: &OscillatorParams) -> f64 {
    critical_coupling_along(p.omega_a, p.omega_b, p.g_bs.abs(), p.g_sq.abs())
}

/// Critical value of the larger coupling along the ray with weights `(bs_weight, sq_weight)`.
pub fn critical_coupling_along(omega_a: f64, omega_b: f64, bs_weight: f64, sq_weight: f64) -> f64 {
    let root = (omega_a * omega_b).sqrt();
    let sum = bs_weight + sq_weight;
    if sum == 0.0 {
        return 0.5 * root;
    }
    root * bs_weight.max(sq_weight) / sum
}

/// The symplectic form `Ω = −i·diag(1, 1, −1, −1)`.
pub fn omega_form() -> CMat {
    CMat::diag(&[-I, -I, I, I])
}

/// The 4×4 Hamiltonian matrix `[[U, V], [V, U]]` with `U = [[ω_a, g_bs], [g_bs, ω_b]]`
/// and `V = g_sq·[[0, 1], [1, 0]]`.
pub fn hamiltonian_matrix(p: &OscillatorParams) -> CMat {
    let (wa, wb, gb, gs) = (p.omega_a, p.omega_b, p.g_bs, p.g_sq);
    #[rustfmt::skip]
    let entries = [
        wa, gb, 0.0, gs,
        gb, wb, gs, 0.0,
        0.0, gs, wa, gb,
        gs, 0.0, gb, wb,
    ];
    CMat::from_real(4, &entries).expect("finite 4x4 entries")
}

/// The generator `Ω H` of the symplectic evolution.
pub fn generator(p: &OscillatorParams) -> CMat {
    omega_form() * hamiltonian_matrix(p)
}

/// A symplectic matrix stored through its Bogoliubov blocks `α` and `β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymplecticMatrix {
    pub alpha: CMat,
    pub beta: CMat,
}

impl SymplecticMatrix {
    /// Builds from 2×2 blocks.
    pub fn new(alpha: CMat, beta: CMat) -> Result<Self> {
        for m in [&alpha, &beta] {
            if m.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: m.dim(),
                });
            }
        }
        Ok(SymplecticMatrix { alpha, beta })
    }

    /// The identity transformation.
    pub fn identity() -> Self {
        SymplecticMatrix {
            alpha: CMat::identity(2),
            beta: CMat::zeros(2),
        }
    }

    /// Reads the blocks of a 4×4 matrix, checking the `[[α, β], [β*, α*]]` structure.
    pub fn from_mat4(m: &CMat) -> Result<Self> {
        let alpha = m.block(0, 0)?;
        let beta = m.block(0, 1)?;
        let defect = m
            .block(1, 0)?
            .max_abs_diff(&beta.conj())
            .max(m.block(1, 1)?.max_abs_diff(&alpha.conj()));
        if defect > 1e-9 * (1.0 + m.norm()) {
            return Err(Error::Unphysical(format!(
                "matrix lacks Bogoliubov block structure (defect {defect:e})"
            )));
        }
        Ok(SymplecticMatrix { alpha, beta })
    }

    /// The assembled 4×4 matrix `[[α, β], [β*, α*]]`.
    pub fn to_mat4(&self) -> CMat {
        CMat::from_blocks(
            &self.alpha,
            &self.beta,
            &self.beta.conj(),
            &self.alpha.conj(),
        )
        .expect("2x2 blocks")
    }

    /// Product `self · other`.
    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            alpha: self.alpha * other.alpha + self.beta * other.beta.conj(),
            beta: self.alpha * other.beta + self.beta * other.alpha.conj(),
        }
    }

    /// Inverse `−Ω S† Ω = [[α†, −βᵀ], [−β†, αᵀ]]`.
    pub fn inverse(&self) -> SymplecticMatrix {
        SymplecticMatrix {
            alpha: self.alpha.adjoint(),
            beta: -self.beta.transpose(),
        }
    }

    /// Conjugate transpose `[[α†, βᵀ], [β†, αᵀ]]`.
    pub fn adjoint(&self) -> SymplecticMatrix {
        SymplecticMatrix {
            alpha: self.alpha.adjoint(),
            beta: self.beta.transpose(),
        }
    }

    /// `max |S Ω S† − Ω|`.
    pub fn symplectic_defect(&self) -> f64 {
        let s = self.to_mat4();
        let om = omega_form();
        ((s * om) * s.adjoint()).max_abs_diff(&om)
    }

    /// Largest violation among the Bogoliubov identities
    /// `αα† − ββ† = I`, `αβᵀ − βαᵀ = 0`, `α†α − βᵀβ* = I` and `α†β − βᵀα* = 0`.
    pub fn bogoliubov_defect(&self) -> f64 {
        let (a, b) = (&self.alpha, &self.beta);
        let id = CMat::identity(2);
        let zero = CMat::zeros(2);
        let d1 = (a * &a.adjoint() - b * &b.adjoint()).max_abs_diff(&id);
        let d2 = (a * &b.transpose() - b * &a.transpose()).max_abs_diff(&zero);
        let d3 = (&a.adjoint() * a - b.transpose() * b.conj()).max_abs_diff(&id);
        let d4 = (&a.adjoint() * b - b.transpose() * a.conj()).max_abs_diff(&zero);
        d1.max(d2).max(d3).max(d4)
    }

    /// Largest entrywise difference between the assembled matrices.
    pub fn max_abs_diff(&self, other: &SymplecticMatrix) -> f64 {
        self.alpha
            .max_abs_diff(&other.alpha)
            .max(self.beta.max_abs_diff(&other.beta))
    }
}

/// Normal-mode frequencies and the real Bogoliubov diagonalizer for equal couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalModes {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub theta: f64,
    pub diagonalizer: SymplecticMatrix,
}

impl NormalModes {
    /// `κ = diag(κ₊, κ₋)`.
    pub fn kappa(&self) -> CMat {
        CMat::diag_real(&[self.kappa_plus, self.kappa_minus])
    }

    /// Largest deviation of `αᵀκα + βᵀκβ` and `αᵀκβ + βᵀκα` from the `U` and `V` blocks of `H`.
    pub fn reconstruction_defect(&self, p: &OscillatorParams) -> f64 {
        let h = hamiltonian_matrix(p);
        let u = h.block(0, 0).expect("4x4");
        let v = h.block(0, 1).expect("4x4");
        let (a, b) = (&self.diagonalizer.alpha, &self.diagonalizer.beta);
        let k = self.kappa();
        let u_rec = &(a.transpose() * k) * a + &(b.transpose() * k) * b;
        let v_rec = &(a.transpose() * k) * b + &(b.transpose() * k) * a;
        u_rec.max_abs_diff(&u).max(v_rec.max_abs_diff(&v))
    }
}

/// Normal-mode frequencies `(κ₊, κ₋)`, the symplectic eigenvalues of `H`, for any couplings.
pub fn normal_mode_frequencies(p: &OscillatorParams) -> Result<(f64, f64)> {
    p.validate()?;
    let (wa2, wb2) = (p.omega_a * p.omega_a, p.omega_b * p.omega_b);
    let (gb2, gs2) = (p.g_bs * p.g_bs, p.g_sq * p.g_sq);
    let discriminant_sq = (wa2 - wb2) * (wa2 - wb2)
        + 8.0 * p.omega_a * p.omega_b * (gb2 + gs2)
        + 4.0 * (wa2 + wb2) * (gb2 - gs2);
    let sum = wa2 + wb2 + 2.0 * (gb2 - gs2);
    let kp2 = 0.5 * (sum + discriminant_sq.max(0.0).sqrt());
    let product = p.stability_margin();
    if kp2 <= 0.0 || product <= 0.0 {
        return Err(Error::Unstable {
            coupling: p.g_bs.max(p.g_sq),
            critical: critical_coupling(p),
        });
    }
    // κ₋² from the product κ₊²κ₋² avoids cancellation near the critical coupling.
    let km2 = product / kp2;
    Ok((kp2.sqrt(), km2.sqrt()))
}

/// Closed-form normal modes for equal couplings `g_bs = g_sq = g`.
///
/// The mixing angle satisfies `tan 2θ = 4g√(ω_aω_b)/(ω_a² − ω_b²)` and takes the value π/4
/// on resonance.
pub fn diagonalize(p: &OscillatorParams) -> Result<NormalModes> {
    p.validate()?;
    if !p.has_equal_couplings() {
        return Err(Error::UnequalCouplings {
            g_bs: p.g_bs,
            g_sq: p.g_sq,
        });
    }
    let (kp, km) = normal_mode_frequencies(p)?;
    let g = p.g_bs;
    let (wa, wb) = (p.omega_a, p.omega_b);
    let theta = if p.is_resonant() {
        std::f64::consts::FRAC_PI_4
    } else {
        0.5 * (4.0 * g * (wa * wb).sqrt()).atan2(wa * wa - wb * wb)
    };
    let (c, s) = (theta.cos(), theta.sin());
    let plus = |k: f64, w: f64| (k + w) / (2.0 * (k * w).sqrt());
    let minus = |k: f64, w: f64| (k - w) / (2.0 * (k * w).sqrt());
    let alpha = CMat::from_real(
        2,
        &[
            plus(kp, wa) * c,
            plus(kp, wb) * s,
            plus(km, wa) * s,
            -plus(km, wb) * c,
        ],
    )?;
    let beta = CMat::from_real(
        2,
        &[
            minus(kp, wa) * c,
            minus(kp, wb) * s,
            minus(km, wa) * s,
            -minus(km, wb) * c,
        ],
    )?;
    Ok(NormalModes {
        kappa_plus: kp,
        kappa_minus: km,
        theta,
        diagonalizer: SymplecticMatrix { alpha, beta },
    })
}

/// Full evolution from the normal modes:
/// `A(t) = αᵀe^{−iκt}α − βᵀe^{iκt}β` and `B(t) = αᵀe^{−iκt}β − βᵀe^{iκt}α`.
pub fn full_evolution(nm: &NormalModes, t: f64) -> SymplecticMatrix {
    let phase = |k: f64, sign: f64| C64::from_polar(1.0, sign * k * t);
    let em = CMat::diag(&[phase(nm.kappa_plus, -1.0), phase(nm.kappa_minus, -1.0)]);
    let ep = CMat::diag(&[phase(nm.kappa_plus, 1.0), phase(nm.kappa_minus, 1.0)]);
    let a = &nm.diagonalizer.alpha;
    let b = &nm.diagonalizer.beta;
    let at = a.transpose();
    let bt = b.transpose();
    SymplecticMatrix {
        alpha: &(at * em) * a - &(bt * ep) * b,
        beta: &(at * em) * b - &(bt * ep) * a,
    }
}

/// Full evolution `exp(Ω H t)` by the matrix exponential, valid for any couplings.
pub fn evolution_exp(p: &OscillatorParams, t: f64) -> Result<SymplecticMatrix> {
    p.validate()?;
    let m = mat_exp(&generator(p), C64::new(t, 0.0))?;
    SymplecticMatrix::from_mat4(&m)
}

/// Full evolution, by the closed form for equal couplings and by the exponential otherwise.
pub fn evolution(p: &OscillatorParams, t: f64) -> Result<SymplecticMatrix> {
    if t == 0.0 {
        p.validate()?;
        return Ok(SymplecticMatrix::identity());
    }
    if p.has_equal_couplings() {
        Ok(full_evolution(&diagonalize(p)?, t))
    } else {
        evolution_exp(p, t)
    }
}

/// The 2×2 unitary block of the rotating-wave evolution,
/// `e^{−iω_Σt}[[χ, −iξ], [−iξ, χ*]]` with `χ = cos(ω_bs t) − i(ω_Δ/ω_bs)sin(ω_bs t)`
/// and `ξ = (g_bs/ω_bs)sin(ω_bs t)`.
pub fn rwa_block(p: &OscillatorParams, t: f64) -> CMat {
    let wbs = p.omega_bs();
    // sin(ω_bs t)/ω_bs, continuous through ω_bs = 0.
    let sinc_t = if wbs * t.abs() < 1e-8 {
        t * (1.0 - (wbs * t) * (wbs * t) / 6.0)
    } else {
        (wbs * t).sin() / wbs
    };
    let chi = C64::new((wbs * t).cos(), -p.omega_delta() * sinc_t);
    let xi = p.g_bs * sinc_t;
    let phase = C64::from_polar(1.0, -p.omega_sigma() * t);
    let m = CMat::new(2, &[chi, -I * xi, -I * xi, chi.conj()]).expect("finite block");
    m.scale(phase)
}

/// Rotating-wave evolution: the squeezing coupling is dropped and the β-block vanishes.
pub fn rwa_evolution(p: &OscillatorParams, t: f64) -> SymplecticMatrix {
    SymplecticMatrix {
        alpha: rwa_block(p, t),
        beta: CMat::zeros(2),
    }
}

/// `S_RWA(t)† · S(t)` for two already computed evolutions.
pub fn effective_from(full: &SymplecticMatrix, rwa: &SymplecticMatrix) -> SymplecticMatrix {
    rwa.adjoint().compose(full)
}

/// Effective evolution `S_eff(t) = S_RWA†(t) S(t)` for equal couplings.
pub fn effective_evolution(p: &OscillatorParams, t: f64) -> Result<SymplecticMatrix> {
    let nm = diagonalize(p)?;
    Ok(effective_from(
        &full_evolution(&nm, t),
        &rwa_evolution(p, t),
    ))
}

/// Converts a dimensionless time `τ = ω t` to absolute time.
pub fn time_from_tau(tau: f64, omega: f64) -> f64 {
    tau / omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{eigvals4, ONE};

    #[test]
    fn free_hamiltonian_is_identity_for_unit_frequencies() {
        let p = OscillatorParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(hamiltonian_matrix(&p).max_abs_diff(&CMat::identity(4)) < 1e-15);
    }

    #[test]
    fn hamiltonian_blocks() {
        let h = hamiltonian_matrix(&OscillatorParams::new(1.0, 2.0, 0.3, 0.0).unwrap());
        let u = CMat::from_real(2, &[1.0, 0.3, 0.3, 2.0]).unwrap();
        assert!(h.block(0, 0).unwrap().max_abs_diff(&u) < 1e-15);
        assert!(h.block(0, 1).unwrap().norm() == 0.0);
        let h = hamiltonian_matrix(&OscillatorParams::resonant(1.0, 0.1).unwrap());
        let v = CMat::from_real(2, &[0.0, 0.1, 0.1, 0.0]).unwrap();
        assert!(h.block(0, 1).unwrap().max_abs_diff(&v) < 1e-15);
        assert!(h.block(1, 0).unwrap().max_abs_diff(&v) < 1e-15);
        assert!(h.hermiticity_defect() == 0.0);
    }

    #[test]
    fn critical_couplings() {
        let eq = OscillatorParams {
            omega_a: 1.0,
            omega_b: 1.0,
            g_bs: 0.1,
            g_sq: 0.1,
        };
        assert!((critical_coupling(&eq) - 0.5).abs() < 1e-15);
        let sq_only = OscillatorParams { g_bs: 0.0, ..eq };
        assert!((critical_coupling(&sq_only) - 1.0).abs() < 1e-15);
        let bs_only = OscillatorParams { g_sq: 0.0, ..eq };
        assert!((critical_coupling(&bs_only) - 1.0).abs() < 1e-15);
        let detuned = OscillatorParams { omega_a: 4.0, ..eq };
        assert!((critical_coupling(&detuned) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn critical_boundary_zeroes_the_stability_margin() {
        for (wa, wb, u, v) in [
            (1.0, 1.0, 1.0, 1.0),
            (4.0, 1.0, 1.0, 0.3),
            (0.7, 2.0, 0.2, 1.0),
        ] {
            let g = critical_coupling_along(wa, wb, u, v);
            let m = u.max(v);
            let p = OscillatorParams {
                omega_a: wa,
                omega_b: wb,
                g_bs: g * u / m,
                g_sq: g * v / m,
            };
            assert!(p.stability_margin().abs() < 1e-12);
            let inside = OscillatorParams {
                g_bs: 0.99 * p.g_bs,
                g_sq: 0.99 * p.g_sq,
                ..p
            };
            assert!(inside.stability_margin() > 0.0);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            OscillatorParams::resonant(1.0, 0.5),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(
            OscillatorParams::resonant(1.0, 0.5 - 1e-12),
            Err(Error::Unstable { .. })
        ));
        assert!(OscillatorParams::resonant(1.0, 0.4999).is_ok());
        assert!(matches!(
            OscillatorParams::new(0.0, 1.0, 0.0, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            OscillatorParams::new(1.0, 1.0, -0.1, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            OscillatorParams::new(1.0, 1.0, 0.6, 0.6),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn normal_modes_free_and_resonant() {
        let (kp, km) =
            normal_mode_frequencies(&OscillatorParams::resonant(1.0, 0.0).unwrap()).unwrap();
        assert!((kp - 1.0).abs() < 1e-15 && (km - 1.0).abs() < 1e-15);
        let (kp, km) =
            normal_mode_frequencies(&OscillatorParams::resonant(1.0, 0.1).unwrap()).unwrap();
        assert!((kp - 1.2f64.sqrt()).abs() < 1e-14);
        assert!((km - 0.8f64.sqrt()).abs() < 1e-14);
        assert!((kp - 1.095445).abs() < 1e-6 && (km - 0.894427).abs() < 1e-6);
    }

    #[test]
    fn normal_modes_match_rwa_frequencies_without_squeezing() {
        let p = OscillatorParams::new(1.0, 2.0, 0.3, 0.0).unwrap();
        let (kp, km) = normal_mode_frequencies(&p).unwrap();
        // Without squeezing the modes are the eigenfrequencies of U.
        let root = (0.25 + 0.09f64).sqrt();
        assert!((kp - (1.5 + root)).abs() < 1e-12);
        assert!((km - (1.5 - root)).abs() < 1e-12);
        assert!((kp - 2.08310).abs() < 1e-4 && (km - 0.91690).abs() < 1e-4);
    }

    #[test]
    fn normal_modes_agree_with_eigenvalues_of_generator() {
        for p in [
            OscillatorParams::new(1.0, 2.0, 0.3, 0.0).unwrap(),
            OscillatorParams::new(1.0, 1.3, 0.2, 0.35).unwrap(),
            OscillatorParams::resonant(2.0, 0.7).unwrap(),
        ] {
            let (kp, km) = normal_mode_frequencies(&p).unwrap();
            let m = (omega_form() * hamiltonian_matrix(&p)).scale(I);
            let mut abs: Vec<f64> = eigvals4(&m).unwrap().iter().map(|z| z.norm()).collect();
            abs.sort_by(f64::total_cmp);
            assert!((abs[0] - km).abs() < 1e-9 && (abs[1] - km).abs() < 1e-9);
            assert!((abs[2] - kp).abs() < 1e-9 && (abs[3] - kp).abs() < 1e-9);
        }
    }

    #[test]
    fn diagonalizer_without_coupling() {
        let nm = diagonalize(&OscillatorParams::resonant(1.0, 0.0).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = CMat::from_real(2, &[h, h, h, -h]).unwrap();
        assert!((nm.theta - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(nm.diagonalizer.alpha.max_abs_diff(&expected) < 1e-15);
        assert!(nm.diagonalizer.beta.norm() < 1e-15);
    }

    #[test]
    fn diagonalizer_resonant_entry() {
        let nm = diagonalize(&OscillatorParams::resonant(1.0, 0.1).unwrap()).unwrap();
        let kp = 1.2f64.sqrt();
        let expected = (kp + 1.0) / (2.0 * kp.sqrt()) * std::f64::consts::FRAC_1_SQRT_2;
        assert!((nm.diagonalizer.alpha[(0, 0)].re - expected).abs() < 1e-15);
        assert!((expected - 0.707841).abs() < 1e-6);
    }

    #[test]
    fn diagonalizer_invariants() {
        for p in [
            OscillatorParams::equal(1.0, 2.0, 0.3).unwrap(),
            OscillatorParams::equal(2.0, 1.0, 0.3).unwrap(),
            OscillatorParams::equal(1.0, 1.0 + 1e-7, 0.2).unwrap(),
            OscillatorParams::equal(0.5, 3.0, 0.0).unwrap(),
        ] {
            let nm = diagonalize(&p).unwrap();
            assert!(nm.kappa_plus >= nm.kappa_minus && nm.kappa_minus > 0.0);
            assert!(nm.theta >= 0.0 && nm.theta <= std::f64::consts::FRAC_PI_2);
            assert!(nm.diagonalizer.bogoliubov_defect() < 1e-9, "{p:?}");
            assert!(nm.reconstruction_defect(&p) < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn diagonalize_rejects_unequal_couplings() {
        let p = OscillatorParams::new(1.0, 1.0, 0.1, 0.2).unwrap();
        assert!(matches!(
            diagonalize(&p),
            Err(Error::UnequalCouplings { .. })
        ));
    }

    #[test]
    fn full_evolution_at_zero_time() {
        let nm = diagonalize(&OscillatorParams::equal(1.0, 1.7, 0.3).unwrap()).unwrap();
        let s = full_evolution(&nm, 0.0);
        assert!(s.max_abs_diff(&SymplecticMatrix::identity()) < 1e-12);
    }

    #[test]
    fn free_evolution_phases() {
        let p = OscillatorParams::equal(1.0, 1.7, 0.0).unwrap();
        let s = full_evolution(&diagonalize(&p).unwrap(), 2.3);
        let expected = CMat::diag(&[C64::from_polar(1.0, -2.3), C64::from_polar(1.0, -1.7 * 2.3)]);
        assert!(s.alpha.max_abs_diff(&expected) < 1e-14);
        assert!(s.beta.norm() < 1e-14);
    }

    #[test]
    fn closed_form_matches_exponential() {
        let p = OscillatorParams::resonant(1.0, 0.1).unwrap();
        let a = full_evolution(&diagonalize(&p).unwrap(), 1.0);
        let b = evolution_exp(&p, 1.0).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
        let p = OscillatorParams::equal(1.0, 2.0, 0.3).unwrap();
        for t in [0.1, 3.0, 25.0] {
            let a = full_evolution(&diagonalize(&p).unwrap(), t);
            let b = evolution_exp(&p, t).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn alpha_block_is_symmetric() {
        let p = OscillatorParams::equal(1.0, 2.0, 0.3).unwrap();
        let s = full_evolution(&diagonalize(&p).unwrap(), 1.7);
        assert!(s.alpha.max_abs_diff(&s.alpha.transpose()) < 1e-12);
    }

    #[test]
    fn recurrence_when_frequencies_are_commensurate() {
        let p = OscillatorParams::resonant(1.0, 0.3).unwrap();
        let nm = diagonalize(&p).unwrap();
        assert!((nm.kappa_plus / nm.kappa_minus - 2.0).abs() < 1e-14);
        let t_star = 2.0 * std::f64::consts::PI / nm.kappa_minus;
        let s = full_evolution(&nm, t_star);
        assert!(s.beta.norm() < 1e-9);
        assert!(s.alpha.max_abs_diff(&CMat::identity(2)) < 1e-9);
    }

    #[test]
    fn rwa_matches_exponential() {
        let p = OscillatorParams::new(1.0, 1.2, 0.05, 0.05).unwrap();
        let closed = rwa_evolution(&p, 3.0);
        let exp = evolution_exp(&p.without_squeezing(), 3.0).unwrap();
        assert!(closed.max_abs_diff(&exp) < 1e-10);
        assert!(rwa_evolution(&p, 0.0).max_abs_diff(&SymplecticMatrix::identity()) < 1e-15);
    }

    #[test]
    fn rwa_full_swap_on_resonance() {
        let g = 0.2;
        let p = OscillatorParams::resonant(1.0, g).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / g;
        let a = rwa_block(&p, t);
        assert!(a[(0, 0)].norm() < 1e-14);
        assert!((a[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rwa_is_unitary_without_coupling_on_resonance() {
        let p = OscillatorParams::resonant(1.3, 0.0).unwrap();
        let a = rwa_block(&p, 4.0);
        assert!((a * a.adjoint()).max_abs_diff(&CMat::identity(2)) < 1e-14);
        let exp = CMat::diag(&[C64::from_polar(1.0, -5.2); 2]);
        assert!(a.max_abs_diff(&exp) < 1e-14);
    }

    #[test]
    fn effective_evolution_trivial_cases() {
        let p = OscillatorParams::equal(1.0, 1.4, 0.2).unwrap();
        let s = effective_evolution(&p, 0.0).unwrap();
        assert!(s.max_abs_diff(&SymplecticMatrix::identity()) < 1e-12);
        let p0 = OscillatorParams::equal(1.0, 1.4, 0.0).unwrap();
        for t in [0.5, 7.0, 30.0] {
            let s = effective_evolution(&p0, t).unwrap();
            assert!(s.max_abs_diff(&SymplecticMatrix::identity()) < 1e-12);
        }
    }

    #[test]
    fn inverse_and_composition() {
        let p = OscillatorParams::equal(1.0, 1.4, 0.2).unwrap();
        let s = evolution(&p, 2.2).unwrap();
        let id = s.compose(&s.inverse());
        assert!(id.max_abs_diff(&SymplecticMatrix::identity()) < 1e-12);
        let m = s.to_mat4();
        assert!(SymplecticMatrix::from_mat4(&m).unwrap().max_abs_diff(&s) == 0.0);
        assert!((m.det() - ONE).norm() < 1e-10);
    }

    #[test]
    fn from_mat4_rejects_unstructured() {
        let mut m = CMat::identity(4);
        m[(2, 0)] = C64::new(0.5, 0.0);
        assert!(SymplecticMatrix::from_mat4(&m).is_err());
    }
}
