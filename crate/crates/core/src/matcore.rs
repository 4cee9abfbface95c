//! Dense complex linear algebra for the two fixed sizes used throughout the crate:
//! 2×2 blocks and 4×4 mode-space matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used everywhere in the crate.
pub type C64 = Complex64;

/// Zero constant.
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
/// One constant.
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Residual tolerance for eigenvalues, relative to `‖m‖⁴`.
pub const EIG_RESIDUAL_TOL: f64 = 1e-9;

/// Square complex matrix of dimension 2 or 4, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct CMat {
    dim: usize,
    data: [C64; 16],
}

impl CMat {
    /// Builds a matrix from row-major entries, rejecting unsupported sizes and non-finite values.
    pub fn new(dim: usize, entries: &[C64]) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut data = [ZERO; 16];
        data[..entries.len()].copy_from_slice(entries);
        Ok(CMat { dim, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let v: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(dim, &v)
    }

    /// Zero matrix. Panics on an unsupported dimension.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "unsupported dimension {dim}");
        CMat {
            dim,
            data: [ZERO; 16],
        }
    }

    /// Identity matrix. Panics on an unsupported dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Diagonal matrix with the given entries (length 2 or 4).
    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag_real(entries: &[f64]) -> Self {
        let v: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Assembles a 4×4 matrix from four 2×2 blocks `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &CMat, tr: &CMat, bl: &CMat, br: &CMat) -> Result<Self> {
        for b in [tl, tr, bl, br] {
            if b.dim != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: b.dim,
                });
            }
        }
        let mut m = Self::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = tl[(i, j)];
                m[(i, j + 2)] = tr[(i, j)];
                m[(i + 2, j)] = bl[(i, j)];
                m[(i + 2, j + 2)] = br[(i, j)];
            }
        }
        Ok(m)
    }

    /// Extracts the 2×2 block at block-row `bi` and block-column `bj` of a 4×4 matrix.
    pub fn block(&self, bi: usize, bj: usize) -> Result<CMat> {
        if self.dim != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: self.dim,
            });
        }
        let mut b = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                b[(i, j)] = self[(2 * bi + i, 2 * bj + j)];
            }
        }
        Ok(b)
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }

    /// Matrix product, failing on mismatched dimensions.
    pub fn matmul(&self, other: &CMat) -> Result<CMat> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> CMat {
        let mut out = *self;
        for z in out.data[..self.dim * self.dim].iter_mut() {
            *z = f(*z);
        }
        out
    }

    fn zip(&self, other: &CMat, f: impl Fn(C64, C64) -> C64) -> Result<CMat> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = *self;
        for (z, w) in out.data[..self.dim * self.dim]
            .iter_mut()
            .zip(other.entries())
        {
            *z = f(*z, *w);
        }
        Ok(out)
    }

    /// Entrywise sum.
    pub fn try_add(&self, other: &CMat) -> Result<CMat> {
        self.zip(other, |a, b| a + b)
    }

    /// Entrywise difference.
    pub fn try_sub(&self, other: &CMat) -> Result<CMat> {
        self.zip(other, |a, b| a - b)
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, s: C64) -> CMat {
        self.map(|z| z * s)
    }

    /// Multiplication by a real scalar.
    pub fn scale_real(&self, s: f64) -> CMat {
        self.map(|z| z * s)
    }

    /// Transpose.
    pub fn transpose(&self) -> CMat {
        let n = self.dim;
        let mut out = *self;
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i];
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> CMat {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        self.transpose().conj()
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Determinant (closed form for 2×2, pivoted elimination for 4×4).
    pub fn det(&self) -> C64 {
        if self.dim == 2 {
            return self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)];
        }
        let n = self.dim;
        let mut a = self.data;
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap_or(col);
            if a[pivot * n + col] == ZERO {
                return ZERO;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let f = a[row * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Solves `self · X = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &CMat) -> Result<CMat> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.dim;
        let mut a = self.data;
        let mut b = rhs.data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap_or(col);
            if a[pivot * n + col].norm() == 0.0 {
                return Err(Error::Unphysical("singular linear system".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    b.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[col * n + col];
            for row in 0..n {
                if row == col {
                    continue;
                }
                let f = a[row * n + col] / p;
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let av = a[col * n + j];
                    let bv = b[col * n + j];
                    a[row * n + j] -= f * av;
                    b[row * n + j] -= f * bv;
                }
            }
        }
        for row in 0..n {
            let p = a[row * n + row];
            for j in 0..n {
                b[row * n + j] /= p;
            }
        }
        let out = CMat { dim: n, data: b };
        if !out.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(out)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum absolute column sum (the induced 1-norm).
    pub fn norm_one(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference; infinite on a dimension mismatch.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermiticity, `max |m_ij − conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.dim && j < self.dim, "index out of range");
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.dim && j < self.dim, "index out of range");
        &mut self.data[i * self.dim + j]
    }
}

// Operator forms panic on a dimension mismatch; the `try_*` and `matmul` methods return errors.

impl Mul for CMat {
    type Output = CMat;
    fn mul(self, rhs: CMat) -> CMat {
        self.matmul(&rhs).expect("matrix dimensions must agree")
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for CMat {
    type Output = CMat;
    fn add(self, rhs: CMat) -> CMat {
        self.try_add(&rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for CMat {
    type Output = CMat;
    fn sub(self, rhs: CMat) -> CMat {
        self.try_sub(&rhs).expect("matrix dimensions must agree")
    }
}

impl Neg for CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.map(|z| -z)
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6e}{:+.6e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential `exp(scale · m)` by scaling and squaring with a degree-13 Padé approximant.
pub fn mat_exp(m: &CMat, scale: C64) -> Result<CMat> {
    if !m.is_finite() || !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    let a = m.scale(scale);
    let n = a.dim();
    let norm = a.norm_one();
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(squarings));
    let id = CMat::identity(n);
    let b = &PADE13;
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u_inner = a6 * (a6.scale_real(b[13]) + a4.scale_real(b[11]) + a2.scale_real(b[9]))
        + a6.scale_real(b[7])
        + a4.scale_real(b[5])
        + a2.scale_real(b[3])
        + id.scale_real(b[1]);
    let u = a * u_inner;
    let v = a6 * (a6.scale_real(b[12]) + a4.scale_real(b[10]) + a2.scale_real(b[8]))
        + a6.scale_real(b[6])
        + a4.scale_real(b[4])
        + a2.scale_real(b[2])
        + id.scale_real(b[0]);
    let mut r = (v - u).solve(&(v + u))?;
    for _ in 0..squarings {
        r = r * r;
    }
    if !r.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(r)
}

/// Reduces a square matrix to upper Hessenberg form by Householder similarity transforms.
fn hessenberg(m: &CMat) -> CMat {
    let n = m.dim();
    let mut h = *m;
    for k in 0..n.saturating_sub(2) {
        let alpha_norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        // v = x + phase·‖x‖·e₁, reflector P = I − 2vv†/(v†v).
        let mut v = [ZERO; 4];
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in 0..n {
            let dot: C64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            let f = dot * (2.0 / vnorm2);
            for i in k + 1..n {
                h[(i, j)] -= v[i] * f;
            }
        }
        for i in 0..n {
            let dot: C64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum();
            let f = dot * (2.0 / vnorm2);
            for j in k + 1..n {
                h[(i, j)] -= f * v[j].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// Eigenvalues of a 4×4 matrix, with multiplicity and in unspecified order.
///
/// Uses Hessenberg reduction followed by single-shift complex QR iterations with
/// Wilkinson shifts and deflation. Each returned value satisfies
/// `|det(m − λI)| ≤ EIG_RESIDUAL_TOL · ‖m‖⁴`.
pub fn eigvals4(m: &CMat) -> Result<[C64; 4]> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: m.dim(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = 4;
    let mut h = hessenberg(m);
    let mut eig = [ZERO; 4];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let reference = if diag == 0.0 { m.norm() } else { diag };
            if sub <= f64::EPSILON * reference {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 200 {
            return Err(Error::NonConvergence(
                "QR iteration exceeded 200 sweeps".into(),
            ));
        }
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mu = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            d + C64::new(c.norm(), 0.0)
        } else {
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
            let (m1, m2) = (half_tr + disc, half_tr - disc);
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rotations = [(ONE, ZERO); 3];
        for k in l..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = x.norm().hypot(y.norm());
            let (cs, sn) = if r == 0.0 {
                (ONE, ZERO)
            } else {
                (x / r, y / r)
            };
            rotations[k - l] = (cs, sn);
            for j in k..=hi {
                let u = h[(k, j)];
                let v = h[(k + 1, j)];
                h[(k, j)] = cs.conj() * u + sn.conj() * v;
                h[(k + 1, j)] = -sn * u + cs * v;
            }
        }
        for k in l..hi {
            let (cs, sn) = rotations[k - l];
            for i in l..=(k + 1).min(hi) {
                let u = h[(i, k)];
                let v = h[(i, k + 1)];
                h[(i, k)] = u * cs + v * sn;
                h[(i, k + 1)] = -u * sn.conj() + v * cs.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    eig[0] = h[(0, 0)];
    let norm4 = m.norm().powi(4);
    let id = CMat::identity(4);
    for &root in &eig {
        if !root.is_finite() {
            return Err(Error::NonConvergence("non-finite eigenvalue".into()));
        }
        let residual = (*m - id.scale(root)).det().norm();
        if residual > EIG_RESIDUAL_TOL * norm4 {
            return Err(Error::NonConvergence(format!(
                "eigenvalue {root} leaves residual {residual:e}"
            )));
        }
    }
    Ok(eig)
}

/// Real eigenvalues `(λ_max, λ_min)` of a 2×2 Hermitian matrix.
pub fn hermitian_eigvals2(m: &CMat) -> Result<(f64, f64)> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.dim(),
        });
    }
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    Ok((mean + half_gap, mean - half_gap))
}
