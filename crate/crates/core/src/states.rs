//! Zero-mean Gaussian states of two modes as 4×4 covariance matrices.
//!
//! The covariance matrix is `σ_nm = ⟨{X_n, X_m†}⟩` in the ordering `(a, b, a†, b†)`,
//! so the vacuum is the identity. Pure states are carried together with a symplectic
//! factor `s₀` such that `σ = s₀ s₀†`.

use crate::dynamics::{omega_form, SymplecticMatrix};
use crate::error::{Error, Result};
use crate::matcore::{eigvals4, CMat, I};

/// Hermiticity tolerance for covariance matrices, relative to `1 + ‖σ‖`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Symplectic eigenvalues may undershoot 1 by this much.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Pairing tolerance for the doubly degenerate absolute spectrum of `iΩσ`.
pub const PAIRING_TOL: f64 = 1e-8;
/// Largest accepted squeezing parameter.
pub const MAX_SQUEEZING: f64 = 10.0;

/// Mode label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// A physical two-mode covariance matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceMatrix {
    sigma: CMat,
}

impl CovarianceMatrix {
    /// Validates Hermiticity and physicality.
    pub fn new(sigma: CMat) -> Result<Self> {
        if sigma.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: sigma.dim(),
            });
        }
        let defect = sigma.hermiticity_defect();
        if defect > HERMITIAN_TOL * (1.0 + sigma.norm()) {
            return Err(Error::Unphysical(format!(
                "covariance matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let cov = CovarianceMatrix { sigma };
        let (n1, n2) = symplectic_eigenvalues(&cov)?;
        if n1.min(n2) < 1.0 - PHYSICAL_TOL {
            return Err(Error::Unphysical(format!(
                "symplectic eigenvalues ({n1}, {n2}) violate the uncertainty bound"
            )));
        }
        Ok(cov)
    }

    /// Thermal-like state `σ = ν·I` with `ν ≥ 1`.
    pub fn thermal(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 1.0 - PHYSICAL_TOL {
            return Err(Error::Unphysical(format!(
                "thermal symplectic eigenvalue {nu} below 1"
            )));
        }
        Ok(CovarianceMatrix {
            sigma: CMat::identity(4).scale_real(nu),
        })
    }

    /// The 4×4 matrix.
    pub fn matrix(&self) -> &CMat {
        &self.sigma
    }

    /// Mean total excitation number `(Tr σ − 4)/4`.
    pub fn mean_number(&self) -> f64 {
        0.25 * (self.sigma.trace().re - 4.0)
    }

    /// True when both symplectic eigenvalues equal 1 within `PHYSICAL_TOL`.
    pub fn is_pure(&self) -> bool {
        symplectic_eigenvalues(self)
            .map(|(a, b)| (a - 1.0).abs() <= PHYSICAL_TOL && (b - 1.0).abs() <= PHYSICAL_TOL)
            .unwrap_or(false)
    }
}

/// Symplectic factor `s₀` of a pure state, `σ = s₀ s₀†`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureStateFactor {
    pub s0: SymplecticMatrix,
}

impl PureStateFactor {
    /// Wraps a symplectic matrix, rejecting non-symplectic input.
    pub fn new(s0: SymplecticMatrix) -> Result<Self> {
        let defect = s0.symplectic_defect();
        if defect > 1e-9 * (1.0 + s0.to_mat4().norm().powi(2)) {
            return Err(Error::Unphysical(format!(
                "state factor is not symplectic (defect {defect:e})"
            )));
        }
        Ok(PureStateFactor { s0 })
    }

    /// `α₀`.
    pub fn alpha0(&self) -> &CMat {
        &self.s0.alpha
    }

    /// `β₀`.
    pub fn beta0(&self) -> &CMat {
        &self.s0.beta
    }

    /// `U₀ = I + 2β₀β₀†`, the upper-left block of `σ`.
    pub fn u0(&self) -> CMat {
        CMat::identity(2) + (self.beta0() * &self.beta0().adjoint()).scale_real(2.0)
    }

    /// `V₀ = 2α₀β₀ᵀ`, the upper-right block of `σ`.
    pub fn v0(&self) -> CMat {
        (self.alpha0() * &self.beta0().transpose()).scale_real(2.0)
    }

    /// The covariance matrix `s₀ s₀†`.
    pub fn covariance(&self) -> CovarianceMatrix {
        let s = self.s0.to_mat4();
        CovarianceMatrix {
            sigma: s * s.adjoint(),
        }
    }
}

/// A pure Gaussian state with its covariance and symplectic factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState {
    pub covariance: CovarianceMatrix,
    pub factor: PureStateFactor,
}

impl PureState {
    /// Builds both representations from a symplectic factor.
    pub fn from_factor(s0: SymplecticMatrix) -> Result<Self> {
        let factor = PureStateFactor::new(s0)?;
        Ok(PureState {
            covariance: factor.covariance(),
            factor,
        })
    }
}

/// The two-mode vacuum, `σ = I` and `s₀ = I`.
pub fn vacuum() -> PureState {
    let factor = PureStateFactor {
        s0: SymplecticMatrix::identity(),
    };
    PureState {
        covariance: factor.covariance(),
        factor,
    }
}

/// Both modes in single-mode squeezed vacua with equal parameter `s`:
/// `α₀ = cosh(s)·I`, `β₀ = sinh(s)·I`.
pub fn squeezed_pair(s: f64) -> Result<PureState> {
    if !s.is_finite() || s.abs() > MAX_SQUEEZING {
        return Err(Error::InvalidParameter(format!(
            "squeezing {s} outside [-{MAX_SQUEEZING}, {MAX_SQUEEZING}]"
        )));
    }
    let s0 = SymplecticMatrix {
        alpha: CMat::identity(2).scale_real(s.cosh()),
        beta: CMat::identity(2).scale_real(s.sinh()),
    };
    PureState::from_factor(s0)
}

/// The two symplectic eigenvalues `(ν₁, ν₂)`, `ν₁ ≤ ν₂`, from the absolute spectrum of `iΩσ`.
pub fn symplectic_eigenvalues(cov: &CovarianceMatrix) -> Result<(f64, f64)> {
    let m = (omega_form() * cov.sigma).scale(I);
    let mut abs: Vec<f64> = eigvals4(&m)?.iter().map(|z| z.norm()).collect();
    abs.sort_by(f64::total_cmp);
    let scale = 1.0 + abs[3];
    if (abs[1] - abs[0]).abs() > PAIRING_TOL * scale
        || (abs[3] - abs[2]).abs() > PAIRING_TOL * scale
    {
        return Err(Error::Unphysical(format!(
            "symplectic spectrum does not pair: {abs:?}"
        )));
    }
    Ok((0.5 * (abs[0] + abs[1]), 0.5 * (abs[2] + abs[3])))
}

/// `S σ S†`.
pub fn apply_symplectic(cov: &CovarianceMatrix, s: &SymplecticMatrix) -> CovarianceMatrix {
    let m = s.to_mat4();
    let sigma = (m * cov.sigma) * m.adjoint();
    // Re-symmetrize to remove rounding asymmetry.
    CovarianceMatrix {
        sigma: (sigma + sigma.adjoint()).scale_real(0.5),
    }
}

/// Single-mode covariance obtained by deleting the rows and columns of the other mode.
pub fn reduce(cov: &CovarianceMatrix, mode: Mode) -> CMat {
    let k = match mode {
        Mode::A => 0,
        Mode::B => 1,
    };
    let idx = [k, k + 2];
    let mut out = CMat::zeros(2);
    for (i, &r) in idx.iter().enumerate() {
        for (j, &c) in idx.iter().enumerate() {
            out[(i, j)] = cov.sigma[(r, c)];
        }
    }
    out
}

/// Symplectic eigenvalue `ν = √det σ` of a single-mode covariance `[[u, v], [v*, u]]`.
pub fn single_mode_symplectic_eigenvalue(reduced: &CMat) -> Result<f64> {
    if reduced.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: reduced.dim(),
        });
    }
    let d = reduced.det().re;
    if d < 0.0 {
        return Err(Error::Unphysical(format!(
            "single-mode covariance has negative determinant {d}"
        )));
    }
    Ok(d.sqrt())
}
