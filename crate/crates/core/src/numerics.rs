//! Small fixed-size dense linear algebra, a cyclic Jacobi eigensolver and
//! seeded sampling on the Bloch ball and the unit 3-sphere.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Vec3 = [f64; 3];
pub type Vec4 = [f64; 4];

/// Components with magnitude at or below this are treated as zero when
/// fixing eigenvector signs.
pub const SIGN_EPS: f64 = 1e-12;

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm4(a: &Vec4) -> f64 {
    dot4(a, a).sqrt()
}

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex2x2(pub [[C64; 2]; 2]);

impl Complex2x2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        Self([[C64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    /// Pauli matrix σ₁, σ₂ or σ₃ for `axis` 0, 1, 2.
    pub fn pauli(axis: usize) -> Self {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match axis {
            0 => Self::new(z, one, one, z),
            1 => Self::new(z, -i, i, z),
            2 => Self::new(one, z, z, -one),
            _ => panic!("Pauli axis out of range: {axis}"),
        }
    }

    /// `n · σ` for a real 3-vector `n`.
    pub fn pauli_dot(n: &Vec3) -> Self {
        (0..3).fold(Self::zero(), |acc, k| acc + Self::pauli(k).scale(C64::new(n[k], 0.0)))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Inverse, or `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let m = &self.0;
        let inv = d.inv();
        Some(Self::new(m[1][1] * inv, -m[0][1] * inv, -m[1][0] * inv, m[0][0] * inv))
    }

    /// Frobenius distance after removing the best global phase:
    /// `min_φ ‖self − e^{iφ} other‖_F`.
    pub fn phase_aligned_distance(&self, other: &Self) -> f64 {
        let overlap = (other.adjoint() * *self).trace();
        let n = overlap.norm();
        let phase = if n > 0.0 { overlap / n } else { C64::new(1.0, 0.0) };
        (*self - other.scale(phase)).frobenius_norm()
    }
}

impl Add for Complex2x2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Complex2x2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        Self::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl Mul for Complex2x2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Real 3×3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real3x3(pub [[f64; 3]; 3]);

impl Real3x3 {
    pub fn zero() -> Self {
        Self([[0.0; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag([1.0, 1.0, 1.0])
    }

    pub fn diag(d: Vec3) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Squared Frobenius norm, `Tr(M Mᵀ)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum()
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        [dot3(&m[0], v), dot3(&m[1], v), dot3(&m[2], v)]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|x| *x *= s);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// Symmetric part `(M + Mᵀ)/2`.
    pub fn symmetric_part(&self) -> Self {
        (*self + self.transpose()).scale(0.5)
    }

    /// Axial vector of the antisymmetric part,
    /// `(M₂₃ − M₃₂, M₃₁ − M₁₃, M₁₂ − M₂₁)`.
    pub fn axial(&self) -> Vec3 {
        let m = &self.0;
        [m[1][2] - m[2][1], m[2][0] - m[0][2], m[0][1] - m[1][0]]
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Result<Vec3> {
        let gram = self.transpose() * *self;
        let (values, _) = jacobi_eigen(gram.0)?;
        Ok(values.map(|v| v.max(0.0).sqrt()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Add for Real3x3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Real3x3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Real3x3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

/// Real symmetric 4×4 matrix stored as its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym4x4 {
    upper: [f64; 10],
}

impl Sym4x4 {
    fn slot(i: usize, j: usize) -> usize {
        // row offsets of the packed upper triangle
        const ROW: [usize; 4] = [0, 4, 7, 9];
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        ROW[i] + j - i
    }

    pub fn zero() -> Self {
        Self { upper: [0.0; 10] }
    }

    pub fn diag(d: Vec4) -> Self {
        let mut q = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            q.set(i, i, v);
        }
        q
    }

    /// Builds from a full matrix, using the upper triangle only.
    pub fn from_upper(full: [[f64; 4]; 4]) -> Self {
        let mut q = Self::zero();
        for i in 0..4 {
            for j in i..4 {
                q.set(i, j, full[i][j]);
            }
        }
        q
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[Self::slot(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.upper[Self::slot(i, j)] = value;
    }

    pub fn to_full(&self) -> [[f64; 4]; 4] {
        let mut full = [[0.0; 4]; 4];
        for (i, row) in full.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.get(i, j);
            }
        }
        full
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { upper: self.upper.map(|x| x * s) }
    }

    /// `wᵀ Q w`.
    pub fn quadratic(&self, w: &Vec4) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += w[i] * self.get(i, j) * w[j];
            }
        }
        acc
    }

    pub fn mul_vec(&self, w: &Vec4) -> Vec4 {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.get(i, j) * w[j]).sum();
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.upper.iter().zip(&other.upper).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for Sym4x4 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.upper[Self::slot(i, j)]
    }
}

impl IndexMut<(usize, usize)> for Sym4x4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.upper[Self::slot(i, j)]
    }
}

/// Complex 4×4 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex4x4(pub [[C64; 4]; 4]);

impl Complex4x4 {
    pub fn zero() -> Self {
        Self([[C64::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// Largest entrywise deviation from Hermiticity, `max |H − H†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }
}

/// Eigen-decomposition of a symmetric 4×4 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen4 {
    /// Descending.
    pub values: Vec4,
    /// `vectors[k]` belongs to `values[k]`.
    pub vectors: [Vec4; 4],
}

/// Cyclic Jacobi on a symmetric `N×N` matrix.
///
/// Returns eigenvalues in descending order and the matching unit eigenvectors
/// as rows, each with its first non-negligible component positive. Ties keep
/// the original diagonal order, so an already-diagonal input maps to a
/// permutation of the standard basis.
pub(crate) fn jacobi_eigen<const N: usize>(mut a: [[f64; N]; N]) -> Result<([f64; N], [[f64; N]; N])> {
    // columns of v are the eigenvectors
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let off_norm = |a: &[[f64; N]; N]| -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) < JACOBI_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..N - 1 {
            for q in p + 1..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    if !converged {
        let residual = off_norm(&a);
        if !(residual < JACOBI_TOL * scale) {
            return Err(Error::NonConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
                residual,
            });
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    // stable: equal eigenvalues keep their diagonal order
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.map(|k| a[k][k]);
    let vectors = order.map(|k| {
        let mut col: [f64; N] = std::array::from_fn(|r| v[r][k]);
        fix_sign(&mut col);
        col
    });
    Ok((values, vectors))
}

/// Flips `w` so its first component with magnitude above [`SIGN_EPS`] is
/// positive.
pub fn fix_sign<const N: usize>(w: &mut [f64; N]) {
    if let Some(&lead) = w.iter().find(|x| x.abs() > SIGN_EPS) {
        if lead < 0.0 {
            w.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub fn eig_sym4(q: &Sym4x4) -> Result<SymEigen4> {
    if !q.is_finite() {
        return Err(Error::NonFinite("symmetric 4x4 matrix"));
    }
    let (values, vectors) = jacobi_eigen(q.to_full())?;
    Ok(SymEigen4 { values, vectors })
}

/// Tolerance on `max |H − H†|` accepted by [`eig_herm4`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues of a Hermitian 4×4 matrix, descending.
///
/// Uses the real 8×8 embedding `[[Re H, −Im H], [Im H, Re H]]`, whose spectrum
/// is that of `H` with every value doubled.
pub fn eig_herm4(h: &Complex4x4) -> Result<Vec4> {
    let residual = h.hermiticity_residual();
    if !(residual <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { residual });
    }
    let mut big = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            // symmetrise so the embedding is exactly symmetric
            let z = (h.0[i][j] + h.0[j][i].conj()) * 0.5;
            big[i][j] = z.re;
            big[i + 4][j + 4] = z.re;
            big[i][j + 4] = -z.im;
            big[i + 4][j] = z.im;
        }
    }
    let (values, _) = jacobi_eigen(big)?;
    Ok(std::array::from_fn(|k| values[2 * k]))
}

/// Seeded random stream with an explicit, portable algorithm.
///
/// Backed by ChaCha8 keyed from the seed through `seed_from_u64`; the stream
/// index selects an independent ChaCha stream. Normal deviates come from the
/// `rand_distr` ziggurat sampler. The same `(seed, stream)` pair yields the
/// same sequence on every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent child stream for sub-task `index`. Depends only on this
    /// stream's `(seed, stream)` key, not on how many values were drawn.
    pub fn derive(&self, index: u64) -> Self {
        let child = splitmix64(self.stream ^ splitmix64(index.wrapping_add(1)));
        Self::with_stream(self.seed, child)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on the unit sphere in ℝ³.
    pub fn sample_sphere(&mut self) -> Vec3 {
        loop {
            let g = [self.standard_normal(), self.standard_normal(), self.standard_normal()];
            let n = norm3(&g);
            if n > 1e-300 {
                return g.map(|x| x / n);
            }
        }
    }

    /// Uniform in the unit ball in ℝ³.
    pub fn sample_ball(&mut self) -> Vec3 {
        let dir = self.sample_sphere();
        let radius = self.uniform().cbrt();
        dir.map(|x| x * radius)
    }

    /// Uniform on the unit 3-sphere in ℝ⁴.
    pub fn sample_sphere4(&mut self) -> Vec4 {
        loop {
            let g: Vec4 = std::array::from_fn(|_| self.standard_normal());
            let n = norm4(&g);
            if n > 1e-300 {
                return g.map(|x| x / n);
            }
        }
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.standard_normal(), self.standard_normal())
    }
}

pub fn sample_ball(rng: &mut RngStream) -> Vec3 {
    rng.sample_ball()
}

pub fn sample_sphere4(rng: &mut RngStream) -> Vec4 {
    rng.sample_sphere4()
}
