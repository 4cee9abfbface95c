//! Brute-force reference: propagation of two-mode Fock-space vectors under the full and the
//! rotating-wave Hamiltonians, exact overlaps and number moments, and the Fock-state error bound.
//!
//! The Hamiltonian is applied matrix-free (at most five non-zero entries per row) and the
//! propagator is a stepped Taylor series, so cutoffs of 80 and beyond stay cheap.

use crate::dynamics::OscillatorParams;
use crate::error::{Error, Result};
use crate::matcore::{C64, ONE, ZERO};
use rayon::prelude::*;

/// Cutoff used when none is given.
pub const DEFAULT_CUTOFF: usize = 40;
/// Largest cutoff reached by automatic doubling.
pub const MAX_CUTOFF: usize = 160;
/// Largest admissible truncation estimate.
pub const TAIL_THRESHOLD: f64 = 1e-8;
/// Largest admissible change of a reported quantity when the cutoff is doubled.
pub const DOUBLING_THRESHOLD: f64 = 1e-6;
/// Occupations above this fraction of the cutoff count towards the tail weight.
const EDGE_FRACTION: f64 = 0.9;
/// Largest value of `‖H − c‖·dt` per Taylor step.
const MAX_STEP_NORM: f64 = 4.0;
/// Relative size at which the Taylor series is truncated.
const TAYLOR_TOL: f64 = 1e-18;
const MAX_TAYLOR_TERMS: usize = 120;

/// Two-mode Fock basis `|n_a, n_b⟩` with `0 ≤ n_a, n_b ≤ cutoff`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockBasis {
    cutoff: usize,
}

impl FockBasis {
    /// Basis with the given cutoff per mode (at least 1).
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::InvalidParameter(
                "Fock cutoff must be at least 1".into(),
            ));
        }
        Ok(FockBasis { cutoff })
    }

    /// Maximal occupation per mode.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Number of basis states `(cutoff + 1)²`.
    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    /// Flat index of `|n_a, n_b⟩`, if inside the truncation.
    pub fn index(&self, n_a: usize, n_b: usize) -> Option<usize> {
        (n_a <= self.cutoff && n_b <= self.cutoff).then(|| n_a * (self.cutoff + 1) + n_b)
    }

    /// Occupations `(n_a, n_b)` of a flat index.
    pub fn occupations(&self, index: usize) -> (usize, usize) {
        (index / (self.cutoff + 1), index % (self.cutoff + 1))
    }
}

/// A state vector in a truncated two-mode Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    basis: FockBasis,
    amps: Vec<C64>,
}

impl FockVector {
    /// The zero vector.
    pub fn zeros(basis: FockBasis) -> Self {
        FockVector {
            basis,
            amps: vec![ZERO; basis.dim()],
        }
    }

    /// The basis state `|n_a, n_b⟩`.
    pub fn basis_state(basis: FockBasis, n_a: usize, n_b: usize) -> Result<Self> {
        let idx = basis.index(n_a, n_b).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "Fock state |{n_a}, {n_b}⟩ exceeds cutoff {}",
                basis.cutoff()
            ))
        })?;
        let mut v = Self::zeros(basis);
        v.amps[idx] = ONE;
        Ok(v)
    }

    /// Wraps explicit amplitudes.
    pub fn from_amplitudes(basis: FockBasis, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        Ok(FockVector { basis, amps })
    }

    /// The basis.
    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    /// The amplitudes in flat-index order.
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude of `|n_a, n_b⟩` (zero outside the truncation).
    pub fn amplitude(&self, n_a: usize, n_b: usize) -> C64 {
        self.basis.index(n_a, n_b).map_or(ZERO, |i| self.amps[i])
    }

    /// `⟨ψ|ψ⟩`.
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &FockVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn weighted(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let (na, nb) = self.basis.occupations(i);
                a.norm_sqr() * f(na, nb)
            })
            .sum()
    }

    /// `⟨N̂_ab⟩` with `N̂_ab = a†a + b†b`.
    pub fn mean_number(&self) -> f64 {
        self.weighted(|na, nb| (na + nb) as f64)
    }

    /// `⟨N̂_ab²⟩`.
    pub fn number_second_moment(&self) -> f64 {
        self.weighted(|na, nb| ((na + nb) * (na + nb)) as f64)
    }

    /// Weight on states with an occupation above 90 % of the cutoff.
    pub fn edge_weight(&self) -> f64 {
        let edge = EDGE_FRACTION * self.basis.cutoff() as f64;
        self.weighted(|na, nb| if na.max(nb) as f64 > edge { 1.0 } else { 0.0 })
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Which Hamiltonian to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Beam-splitter and two-mode-squeezing couplings.
    Full,
    /// Beam-splitter coupling only.
    Rwa,
}

/// The normal-ordered Hamiltonian
/// `ω_a a†a + ω_b b†b + g_bs(a†b + ab†) [+ g_sq(a†b† + ab)]` on a truncated basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockHamiltonian {
    basis: FockBasis,
    params: OscillatorParams,
    variant: Variant,
    shift: f64,
    bound: f64,
}

impl FockHamiltonian {
    /// Builds the operator and a Gershgorin bound on `‖H − c‖` for the centring shift `c`.
    pub fn new(p: &OscillatorParams, basis: FockBasis, variant: Variant) -> Result<Self> {
        p.validate()?;
        let shift = 0.5 * (p.omega_a + p.omega_b) * basis.cutoff() as f64;
        let mut h = FockHamiltonian {
            basis,
            params: *p,
            variant,
            shift,
            bound: 0.0,
        };
        h.bound = (0..basis.dim())
            .map(|i| {
                let (na, nb) = basis.occupations(i);
                let (d, off) = h.row(na, nb);
                (d - shift).abs() + off.iter().map(|(_, c)| c.abs()).sum::<f64>()
            })
            .fold(0.0, f64::max);
        Ok(h)
    }

    /// The basis.
    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    /// Constant subtracted during propagation; restored as a global phase.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Upper bound on `‖H − shift‖`.
    pub fn norm_bound(&self) -> f64 {
        self.bound
    }

    /// Diagonal element and off-diagonal entries `(column, value)` of the row `|n_a, n_b⟩`.
    fn row(&self, na: usize, nb: usize) -> (f64, Vec<(usize, f64)>) {
        let p = &self.params;
        let b = &self.basis;
        let c = b.cutoff();
        let diag = p.omega_a * na as f64 + p.omega_b * nb as f64;
        let mut off = Vec::with_capacity(4);
        let sq = |x: usize| (x as f64).sqrt();
        if p.g_bs != 0.0 {
            if na < c && nb > 0 {
                off.push((b.index(na + 1, nb - 1).unwrap(), p.g_bs * sq((na + 1) * nb)));
            }
            if na > 0 && nb < c {
                off.push((b.index(na - 1, nb + 1).unwrap(), p.g_bs * sq(na * (nb + 1))));
            }
        }
        if self.variant == Variant::Full && p.g_sq != 0.0 {
            if na < c && nb < c {
                off.push((
                    b.index(na + 1, nb + 1).unwrap(),
                    p.g_sq * sq((na + 1) * (nb + 1)),
                ));
            }
            if na > 0 && nb > 0 {
                off.push((b.index(na - 1, nb - 1).unwrap(), p.g_sq * sq(na * nb)));
            }
        }
        (diag, off)
    }

    /// `out = (H − shift)·v`.
    fn apply_shifted(&self, v: &[C64], out: &mut [C64]) {
        let p = &self.params;
        let c = self.basis.cutoff();
        let stride = c + 1;
        let sq = |x: usize| (x as f64).sqrt();
        let full = self.variant == Variant::Full;
        for na in 0..=c {
            for nb in 0..=c {
                let i = na * stride + nb;
                let mut acc = v[i] * (p.omega_a * na as f64 + p.omega_b * nb as f64 - self.shift);
                if na < c && nb > 0 {
                    acc += v[i + stride - 1] * (p.g_bs * sq((na + 1) * nb));
                }
                if na > 0 && nb < c {
                    acc += v[i - stride + 1] * (p.g_bs * sq(na * (nb + 1)));
                }
                if full {
                    if na < c && nb < c {
                        acc += v[i + stride + 1] * (p.g_sq * sq((na + 1) * (nb + 1)));
                    }
                    if na > 0 && nb > 0 {
                        acc += v[i - stride - 1] * (p.g_sq * sq(na * nb));
                    }
                }
                out[i] = acc;
            }
        }
    }

    /// `H·ψ`.
    pub fn apply(&self, psi: &FockVector) -> FockVector {
        let mut out = vec![ZERO; self.basis.dim()];
        self.apply_shifted(&psi.amps, &mut out);
        for (o, a) in out.iter_mut().zip(&psi.amps) {
            *o += a * self.shift;
        }
        FockVector {
            basis: self.basis,
            amps: out,
        }
    }

    /// Dense row-major matrix of `H`, for small cutoffs.
    pub fn to_dense(&self) -> Vec<C64> {
        let n = self.basis.dim();
        let mut m = vec![ZERO; n * n];
        for i in 0..n {
            let (na, nb) = self.basis.occupations(i);
            let (d, off) = self.row(na, nb);
            m[i * n + i] = C64::new(d, 0.0);
            for (j, v) in off {
                m[i * n + j] = C64::new(v, 0.0);
            }
        }
        m
    }
}

fn taylor_step(
    h: &FockHamiltonian,
    v: &mut [C64],
    dt: f64,
    term: &mut [C64],
    next: &mut [C64],
) -> Result<()> {
    term.copy_from_slice(v);
    for k in 1..=MAX_TAYLOR_TERMS {
        h.apply_shifted(term, next);
        let factor = C64::new(0.0, -dt / k as f64);
        for (t, n) in term.iter_mut().zip(next.iter()) {
            *t = n * factor;
        }
        for (a, t) in v.iter_mut().zip(term.iter()) {
            *a += t;
        }
        if norm_sqr(term).sqrt() <= TAYLOR_TOL * norm_sqr(v).sqrt() {
            return Ok(());
        }
    }
    Err(Error::NonConvergence(format!(
        "Taylor series did not converge within {MAX_TAYLOR_TERMS} terms"
    )))
}

fn advance(
    h: &FockHamiltonian,
    v: &mut [C64],
    t: f64,
    scratch: &mut (Vec<C64>, Vec<C64>),
) -> Result<()> {
    if t == 0.0 {
        return Ok(());
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let steps = ((t.abs() * h.bound) / MAX_STEP_NORM).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    for _ in 0..steps {
        taylor_step(h, v, dt, &mut scratch.0, &mut scratch.1)?;
    }
    Ok(())
}

/// `exp(−iHt)ψ`.
pub fn propagate(h: &FockHamiltonian, psi: &FockVector, t: f64) -> Result<FockVector> {
    Ok(propagate_grid(h, psi, &[t])?.pop().expect("one time"))
}

/// `exp(−iHt_k)ψ` for each time of the grid, propagating incrementally between grid points.
pub fn propagate_grid(
    h: &FockHamiltonian,
    psi: &FockVector,
    times: &[f64],
) -> Result<Vec<FockVector>> {
    if psi.basis != h.basis {
        return Err(Error::DimensionMismatch {
            expected: h.basis.dim(),
            found: psi.basis.dim(),
        });
    }
    let n = h.basis.dim();
    let mut scratch = (vec![ZERO; n], vec![ZERO; n]);
    let mut v = psi.amps.clone();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        advance(h, &mut v, t - now, &mut scratch)?;
        now = t;
        let phase = C64::from_polar(1.0, -h.shift * t);
        out.push(FockVector {
            basis: h.basis,
            amps: v.iter().map(|a| a * phase).collect(),
        });
    }
    Ok(out)
}

/// Initial states supported by the oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialState {
    Vacuum,
    /// Both modes in single-mode squeezed vacua with parameter `s`.
    Squeezed(f64),
    /// The Fock state `|n_a, n_b⟩`.
    Fock(usize, usize),
}

/// Single-mode squeezed-vacuum amplitudes `c_{2m} = tanh(s)^m √((2m)!)/(2^m m!)/√cosh s`
/// up to occupation `cutoff`, with the weight lost to truncation.
pub fn squeezed_amplitudes(s: f64, cutoff: usize) -> (Vec<f64>, f64) {
    let th = s.tanh();
    let mut c = vec![0.0; cutoff + 1];
    let mut amp = 1.0 / s.cosh().sqrt();
    let mut n = 0;
    while n <= cutoff {
        c[n] = amp;
        let m = (n / 2) as f64;
        amp *= th * ((2.0 * m + 1.0) / (2.0 * m + 2.0)).sqrt();
        n += 2;
    }
    let kept: f64 = c.iter().map(|x| x * x).sum();
    (c, (1.0 - kept).max(0.0))
}

/// The initial vector (renormalized after truncation) and its truncation loss.
pub fn prepare(initial: InitialState, basis: FockBasis) -> Result<(FockVector, f64)> {
    match initial {
        InitialState::Vacuum => Ok((FockVector::basis_state(basis, 0, 0)?, 0.0)),
        InitialState::Fock(na, nb) => Ok((FockVector::basis_state(basis, na, nb)?, 0.0)),
        InitialState::Squeezed(s) => {
            if !s.is_finite() {
                return Err(Error::NonFinite);
            }
            let (c, loss1) = squeezed_amplitudes(s, basis.cutoff());
            let kept = 1.0 - loss1;
            let mut v = FockVector::zeros(basis);
            for (i, a) in v.amps.iter_mut().enumerate() {
                let (na, nb) = basis.occupations(i);
                *a = C64::new(c[na] * c[nb] / kept, 0.0);
            }
            Ok((v, 1.0 - kept * kept))
        }
    }
}

/// Oracle quantities at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub time: f64,
    /// `|⟨ψ_RWA(t)|ψ_full(t)⟩|²`.
    pub fidelity: f64,
    /// `⟨N̂_ab⟩` under the full evolution.
    pub n_full: f64,
    /// `⟨N̂_ab⟩` under the rotating-wave evolution.
    pub n_rwa: f64,
    /// `n_full − n_rwa`.
    pub delta_n: f64,
    /// `⟨N̂_ab²⟩` under the full evolution.
    pub n2_full: f64,
    /// Initial truncation loss plus the largest edge weight of the two evolved vectors.
    pub tail_weight: f64,
    pub cutoff: usize,
}

/// Oracle quantities along a time grid at a fixed cutoff, without truncation checks.
pub fn oracle_series_at_cutoff(
    p: &OscillatorParams,
    initial: InitialState,
    times: &[f64],
    cutoff: usize,
) -> Result<Vec<OracleResult>> {
    let basis = FockBasis::new(cutoff)?;
    let (psi0, loss) = prepare(initial, basis)?;
    let h_full = FockHamiltonian::new(p, basis, Variant::Full)?;
    let h_rwa = FockHamiltonian::new(p, basis, Variant::Rwa)?;
    let (full, rwa) = rayon::join(
        || propagate_grid(&h_full, &psi0, times),
        || propagate_grid(&h_rwa, &psi0, times),
    );
    let (full, rwa) = (full?, rwa?);
    Ok(times
        .iter()
        .zip(full.iter().zip(&rwa))
        .map(|(&time, (f, r))| {
            let n_full = f.mean_number();
            let n_rwa = r.mean_number();
            OracleResult {
                time,
                fidelity: r.inner(f).norm_sqr(),
                n_full,
                n_rwa,
                delta_n: n_full - n_rwa,
                n2_full: f.number_second_moment(),
                tail_weight: loss + f.edge_weight().max(r.edge_weight()),
                cutoff,
            }
        })
        .collect())
}

fn max_tail(results: &[OracleResult]) -> f64 {
    results.iter().map(|r| r.tail_weight).fold(0.0, f64::max)
}

/// Oracle quantities along a time grid, doubling the cutoff while the tail weight exceeds
/// the threshold.
pub fn oracle_series(
    p: &OscillatorParams,
    initial: InitialState,
    times: &[f64],
    cutoff: usize,
) -> Result<Vec<OracleResult>> {
    let mut cutoff = cutoff;
    loop {
        let res = oracle_series_at_cutoff(p, initial, times, cutoff)?;
        let tail = max_tail(&res);
        if tail <= TAIL_THRESHOLD {
            return Ok(res);
        }
        if 2 * cutoff > MAX_CUTOFF {
            return Err(Error::CutoffTooSmall {
                cutoff,
                tail_weight: tail,
                threshold: TAIL_THRESHOLD,
            });
        }
        cutoff *= 2;
    }
}

/// Oracle quantities at a single time.
pub fn oracle_fidelity(
    p: &OscillatorParams,
    initial: InitialState,
    t: f64,
    cutoff: usize,
) -> Result<OracleResult> {
    Ok(oracle_series(p, initial, &[t], cutoff)?[0])
}

/// Oracle series together with the largest change observed when the cutoff is doubled.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedSeries {
    pub results: Vec<OracleResult>,
    pub doubling_change: f64,
}

/// Oracle series certified by re-running at twice the cutoff; fails if fidelity, `⟨N̂_ab⟩`
/// or `ΔN` change by more than the doubling threshold.
pub fn certified_series(
    p: &OscillatorParams,
    initial: InitialState,
    times: &[f64],
    cutoff: usize,
) -> Result<CertifiedSeries> {
    let results = oracle_series(p, initial, times, cutoff)?;
    let used = results.first().map_or(cutoff, |r| r.cutoff);
    let doubled = oracle_series_at_cutoff(p, initial, times, 2 * used)?;
    let change = results
        .iter()
        .zip(&doubled)
        .map(|(a, b)| {
            (a.fidelity - b.fidelity)
                .abs()
                .max((a.n_full - b.n_full).abs())
                .max((a.delta_n - b.delta_n).abs())
        })
        .fold(0.0, f64::max);
    if change > DOUBLING_THRESHOLD {
        return Err(Error::CutoffUnconverged {
            cutoff: used,
            change,
            threshold: DOUBLING_THRESHOLD,
        });
    }
    Ok(CertifiedSeries {
        results,
        doubling_change: change,
    })
}

/// Evaluates independent oracle points in parallel.
pub fn oracle_many(
    points: &[(OscillatorParams, InitialState, f64)],
    cutoff: usize,
) -> Vec<Result<OracleResult>> {
    points
        .par_iter()
        .map(|(p, init, t)| oracle_fidelity(p, *init, *t, cutoff))
        .collect()
}

/// Upper bound `2(g/ω)(N + 4)²(1 + 6gt(N + 4))` on `‖(U(t) − U_RWA(t))|n_a, n_b⟩‖`,
/// `N = n_a + n_b`, at resonance.
pub fn fock_bound(n_a: usize, n_b: usize, g: f64, omega: f64, t: f64) -> f64 {
    let n4 = (n_a + n_b) as f64 + 4.0;
    2.0 * (g / omega) * n4 * n4 * (1.0 + 6.0 * g * t * n4)
}

/// `‖(U(t) − U_RWA(t))|n_a, n_b⟩‖` at a fixed cutoff.
pub fn fock_deviation(
    n_a: usize,
    n_b: usize,
    p: &OscillatorParams,
    t: f64,
    cutoff: usize,
) -> Result<f64> {
    let basis = FockBasis::new(cutoff)?;
    let psi0 = FockVector::basis_state(basis, n_a, n_b)?;
    let h_full = FockHamiltonian::new(p, basis, Variant::Full)?;
    let h_rwa = FockHamiltonian::new(p, basis, Variant::Rwa)?;
    let (f, r) = rayon::join(
        || propagate(&h_full, &psi0, t),
        || propagate(&h_rwa, &psi0, t),
    );
    Ok(f?.distance(&r?))
}

/// Outcome of a bound check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub z_exact: f64,
    pub z_max: f64,
    pub satisfied: bool,
    /// Change of `z_exact` when the cutoff is doubled.
    pub doubling_change: f64,
}

/// Compares the exact Fock-state deviation with the bound, certifying the cutoff by doubling.
pub fn bound_check(
    n_a: usize,
    n_b: usize,
    p: &OscillatorParams,
    t: f64,
    cutoff: usize,
) -> Result<BoundCheck> {
    p.validate()?;
    if !p.is_resonant() {
        return Err(Error::InvalidParameter(format!(
            "the Fock bound assumes resonance (ω_a = {}, ω_b = {})",
            p.omega_a, p.omega_b
        )));
    }
    if !p.has_equal_couplings() {
        return Err(Error::UnequalCouplings {
            g_bs: p.g_bs,
            g_sq: p.g_sq,
        });
    }
    let (z, z2) = rayon::join(
        || fock_deviation(n_a, n_b, p, t, cutoff),
        || fock_deviation(n_a, n_b, p, t, 2 * cutoff),
    );
    let (z, z2) = (z?, z2?);
    let change = (z - z2).abs();
    if change > DOUBLING_THRESHOLD {
        return Err(Error::CutoffUnconverged {
            cutoff,
            change,
            threshold: DOUBLING_THRESHOLD,
        });
    }
    let z_max = fock_bound(n_a, n_b, p.g_bs, p.omega_a, t);
    Ok(BoundCheck {
        z_exact: z,
        z_max,
        satisfied: z <= z_max,
        doubling_change: change,
    })
}

/// Bound checks along a coupling ladder at fixed `ω` and `t`.
pub fn strong_convergence(
    n_a: usize,
    n_b: usize,
    omega: f64,
    ladder: &[f64],
    t: f64,
    cutoff: usize,
) -> Result<Vec<BoundCheck>> {
    ladder
        .par_iter()
        .map(|&g| bound_check(n_a, n_b, &OscillatorParams::resonant(omega, g)?, t, cutoff))
        .collect()
}
