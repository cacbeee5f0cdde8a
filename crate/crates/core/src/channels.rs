//! Kraus and affine (Bloch-ball) representations of single-qubit channels.
//!
//! Pauli ordering is `(σ₁, σ₂, σ₃) = (X, Y, Z)` with the standard matrices.
//! An affine channel acts on Bloch vectors as `r ↦ M r + c`, where
//! `M_ij = ½ Tr(σ_i E(σ_j))` and `c_i = ½ Tr(σ_i E(I))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    add3, eig_herm4, norm3, C64, Complex2x2, Complex4x4, Real3x3, RngStream, Vec3, Vec4,
};

/// Residual allowed on `Σ E_k† E_k = I` and on `|x₀, x| = 1`.
pub const TP_TOL: f64 = 1e-10;
pub const UNIT_NORM_TOL: f64 = 1e-12;
/// Pass threshold of [`validate_cptp`].
pub const CPTP_TOL: f64 = 1e-9;
/// Longest Kraus list a [`KrausChannel`] accepts; enough for the product of
/// two four-operator channels.
pub const MAX_KRAUS: usize = 16;
/// Largest operator count [`random_channel`] generates (the qubit Choi rank).
pub const MAX_RANDOM_KRAUS: usize = 4;

/// Bloch vector of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState(Vec3);

impl BlochState {
    pub fn new(r: Vec3) -> Result<Self> {
        let norm = norm3(&r);
        if !r.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("Bloch vector"));
        }
        if norm > 1.0 + 1e-12 {
            return Err(Error::OutsideBall { norm });
        }
        Ok(Self(r))
    }

    pub fn maximally_mixed() -> Self {
        Self([0.0; 3])
    }

    pub fn r(&self) -> Vec3 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.0)
    }

    /// `ρ = (I + r·σ)/2`.
    pub fn density_matrix(&self) -> Complex2x2 {
        (Complex2x2::identity() + Complex2x2::pauli_dot(&self.0)).scale(C64::new(0.5, 0.0))
    }

    /// Bloch vector `r_i = Tr(ρ σ_i)` of a density matrix.
    pub fn from_density_matrix(rho: &Complex2x2) -> Result<Self> {
        Self::new(std::array::from_fn(|i| (*rho * Complex2x2::pauli(i)).trace().re))
    }
}

/// Channel given by Kraus operators, `ρ ↦ Σ_k E_k ρ E_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Complex2x2>,
}

impl KrausChannel {
    /// Checked constructor: between one and [`MAX_KRAUS`] finite operators satisfying
    /// `Σ E_k† E_k = I` to [`TP_TOL`].
    pub fn new(operators: Vec<Complex2x2>) -> Result<Self> {
        let channel = Self::new_unvalidated(operators)?;
        let residual = channel.tp_residual();
        if !(residual <= TP_TOL) {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(channel)
    }

    /// Skips the trace-preservation check so that [`validate_cptp`] can
    /// report on arbitrary operator lists.
    pub fn new_unvalidated(operators: Vec<Complex2x2>) -> Result<Self> {
        if operators.is_empty() || operators.len() > MAX_KRAUS {
            return Err(Error::KrausCount {
                got: operators.len(),
                max: MAX_KRAUS,
            });
        }
        if !operators.iter().all(Complex2x2::is_finite) {
            return Err(Error::NonFinite("Kraus operator"));
        }
        Ok(Self { operators })
    }

    pub fn unitary(u: Complex2x2) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn operators(&self) -> &[Complex2x2] {
        &self.operators
    }

    /// Frobenius norm of `Σ E_k† E_k − I`.
    pub fn tp_residual(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(Complex2x2::zero(), |acc, e| acc + e.adjoint() * *e);
        (sum - Complex2x2::identity()).frobenius_norm()
    }

    /// `E(X) = Σ_k E_k X E_k†`.
    pub fn apply_operator(&self, x: &Complex2x2) -> Complex2x2 {
        self.operators
            .iter()
            .fold(Complex2x2::zero(), |acc, e| acc + *e * *x * e.adjoint())
    }

    /// Kraus set of `after ∘ self`: all products `F_j E_k`.
    pub fn then(&self, after: &KrausChannel) -> Result<KrausChannel> {
        let ops = after
            .operators
            .iter()
            .flat_map(|f| self.operators.iter().map(move |e| *f * *e))
            .collect();
        KrausChannel::new(ops)
    }

    /// Choi matrix built directly from the operators,
    /// `C = Σ_k w_k w_k†` with `w_k[2i + a] = (E_k)_{a i}`.
    pub fn choi(&self) -> Complex4x4 {
        let mut c = Complex4x4::zero();
        for e in &self.operators {
            let w: [C64; 4] = std::array::from_fn(|idx| e.0[idx % 2][idx / 2]);
            for r in 0..4 {
                for s in 0..4 {
                    c.0[r][s] += w[r] * w[s].conj();
                }
            }
        }
        c
    }
}

/// Affine action `r ↦ M r + c` on the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineChannel {
    m: Real3x3,
    c: Vec3,
}

impl AffineChannel {
    /// Checked constructor. Rejects non-finite entries, `|c| > 1` and any
    /// singular value of `M` above one; these are necessary for CPTP but not
    /// sufficient (see [`validate_cptp`]).
    pub fn new(m: Real3x3, c: Vec3) -> Result<Self> {
        if !m.is_finite() || !c.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("affine channel"));
        }
        let cn = norm3(&c);
        if cn > 1.0 + 1e-12 {
            return Err(Error::InvalidAffine(format!("|c| = {cn} exceeds 1")));
        }
        let top = m.singular_values()?[0];
        if top > 1.0 + 1e-9 {
            return Err(Error::InvalidAffine(format!("largest singular value of M is {top}")));
        }
        Ok(Self { m, c })
    }

    pub(crate) fn from_parts(m: Real3x3, c: Vec3) -> Self {
        Self { m, c }
    }

    pub fn identity() -> Self {
        Self::from_parts(Real3x3::identity(), [0.0; 3])
    }

    /// `M = 0, c = 0`: every state goes to the maximally mixed state.
    pub fn completely_depolarizing() -> Self {
        Self::from_parts(Real3x3::zero(), [0.0; 3])
    }

    pub fn m(&self) -> &Real3x3 {
        &self.m
    }

    pub fn c(&self) -> &Vec3 {
        &self.c
    }

    pub fn is_unital(&self) -> bool {
        self.c == [0.0; 3]
    }

    pub fn apply_vec(&self, r: &Vec3) -> Vec3 {
        add3(&self.m.mul_vec(r), &self.c)
    }

    /// `z = M r + c`. The output lies in the ball when the map is CPTP; for a
    /// non-physical map it is returned as computed.
    pub fn apply(&self, s: &BlochState) -> BlochState {
        BlochState(self.apply_vec(&s.r()))
    }

    /// `self ∘ first`, i.e. `(M₂M₁, M₂c₁ + c₂)` with `self = (M₂, c₂)`.
    pub fn after(&self, first: &AffineChannel) -> AffineChannel {
        compose(self, first)
    }

    /// `E(X)` reconstructed from `E(I) = I + c·σ` and `E(σ_j) = Σ_i M_ij σ_i`.
    pub fn apply_operator(&self, x: &Complex2x2) -> Complex2x2 {
        let t0 = x.trace();
        let t: [C64; 3] = std::array::from_fn(|j| (Complex2x2::pauli(j) * *x).trace());
        let half = C64::new(0.5, 0.0);
        let mut out = (Complex2x2::identity() + Complex2x2::pauli_dot(&self.c)).scale(t0 * half);
        for j in 0..3 {
            for i in 0..3 {
                out = out + Complex2x2::pauli(i).scale(t[j] * half * self.m.0[i][j]);
            }
        }
        out
    }
}

pub fn kraus_to_affine(k: &KrausChannel) -> Result<AffineChannel> {
    let residual = k.tp_residual();
    if !(residual <= TP_TOL) {
        return Err(Error::NotTracePreserving { residual });
    }
    Ok(kraus_to_affine_unchecked(k))
}

/// [`kraus_to_affine`] without the trace-preservation check.
pub fn kraus_to_affine_unchecked(k: &KrausChannel) -> AffineChannel {
    let images: [Complex2x2; 3] = std::array::from_fn(|j| k.apply_operator(&Complex2x2::pauli(j)));
    let of_identity = k.apply_operator(&Complex2x2::identity());
    let mut m = Real3x3::zero();
    let mut c = [0.0; 3];
    for i in 0..3 {
        let s = Complex2x2::pauli(i);
        for j in 0..3 {
            m.0[i][j] = 0.5 * (s * images[j]).trace().re;
        }
        c[i] = 0.5 * (s * of_identity).trace().re;
    }
    AffineChannel::from_parts(m, c)
}

pub fn apply(e: &AffineChannel, s: &BlochState) -> BlochState {
    e.apply(s)
}

/// `e2 ∘ e1 = (M₂M₁, M₂c₁ + c₂)`.
pub fn compose(e2: &AffineChannel, e1: &AffineChannel) -> AffineChannel {
    AffineChannel::from_parts(e2.m * e1.m, add3(&e2.m.mul_vec(&e1.c), &e2.c))
}

/// Unit 4-vector `(x₀, x)` parametrising `V = x₀ I + i x·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryParams {
    x0: f64,
    x: Vec3,
}

impl UnitaryParams {
    pub fn new(x0: f64, x: Vec3) -> Result<Self> {
        let norm = (x0 * x0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(Self { x0, x })
    }

    pub fn from_vec4(w: &Vec4) -> Result<Self> {
        Self::new(w[0], [w[1], w[2], w[3]])
    }

    pub(crate) fn from_vec4_unchecked(w: &Vec4) -> Self {
        Self {
            x0: w[0],
            x: [w[1], w[2], w[3]],
        }
    }

    pub fn identity() -> Self {
        Self { x0: 1.0, x: [0.0; 3] }
    }

    /// Parameters of `U = exp(−iθ n·σ/2)`, a right-handed rotation by `θ`
    /// about the unit axis `n`.
    pub fn rotation(theta: f64, axis: Vec3) -> Result<Self> {
        let n = norm3(&axis);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidParameter(format!("rotation axis must be a unit vector, |n| = {n}")));
        }
        let (s, c) = (theta / 2.0).sin_cos();
        Ok(Self {
            x0: c,
            x: axis.map(|a| -s * a),
        })
    }

    /// Parameters of `V†`.
    pub fn adjoint(&self) -> Self {
        Self {
            x0: self.x0,
            x: self.x.map(|v| -v),
        }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x(&self) -> Vec3 {
        self.x
    }

    pub fn as_vec4(&self) -> Vec4 {
        [self.x0, self.x[0], self.x[1], self.x[2]]
    }
}

/// Bloch rotation of `ρ ↦ V ρ V†`:
/// `M = (x₀² − |x|²) I + 2 x xᵀ − 2 x₀ K_x` with `(K_x)_ij = −ε_ijk x_k`, `c = 0`.
pub fn unitary_to_affine(u: &UnitaryParams) -> AffineChannel {
    let [x1, x2, x3] = u.x;
    let x0 = u.x0;
    let m = Real3x3([
        [1.0 - 2.0 * (x2 * x2 + x3 * x3), 2.0 * (x0 * x3 + x1 * x2), -2.0 * (x0 * x2 - x1 * x3)],
        [-2.0 * (x0 * x3 - x1 * x2), 1.0 - 2.0 * (x1 * x1 + x3 * x3), 2.0 * (x0 * x1 + x2 * x3)],
        [2.0 * (x0 * x2 + x1 * x3), -2.0 * (x0 * x1 - x2 * x3), 1.0 - 2.0 * (x1 * x1 + x2 * x2)],
    ]);
    AffineChannel::from_parts(m, [0.0; 3])
}

/// `V = x₀ I + i (x₁σ₁ + x₂σ₂ + x₃σ₃)`.
pub fn unitary_matrix(u: &UnitaryParams) -> Complex2x2 {
    Complex2x2::identity().scale(C64::new(u.x0, 0.0)) + Complex2x2::pauli_dot(&u.x).scale(C64::new(0.0, 1.0))
}

/// Choi matrix `C = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)` from the affine data.
pub fn choi(e: &AffineChannel) -> Complex4x4 {
    let mut c = Complex4x4::zero();
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = Complex2x2::zero();
            unit.0[i][j] = C64::new(1.0, 0.0);
            let block = e.apply_operator(&unit);
            for a in 0..2 {
                for b in 0..2 {
                    c.0[2 * i + a][2 * j + b] = block.0[a][b];
                }
            }
        }
    }
    c
}

/// Outcome of [`validate_cptp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CptpReport {
    /// `‖Σ E_k† E_k − I‖_F` for Kraus input; `None` for affine input, which is
    /// trace preserving by construction.
    pub tp_residual: Option<f64>,
    pub min_choi_eigenvalue: f64,
    pub choi_trace: f64,
    pub passed: bool,
}

impl CptpReport {
    pub fn tp_exact(&self) -> bool {
        self.tp_residual.is_none()
    }
}

/// Either channel representation, for [`validate_cptp`].
#[derive(Debug, Clone, Copy)]
pub enum ChannelRef<'a> {
    Affine(&'a AffineChannel),
    Kraus(&'a KrausChannel),
}

impl<'a> From<&'a AffineChannel> for ChannelRef<'a> {
    fn from(e: &'a AffineChannel) -> Self {
        ChannelRef::Affine(e)
    }
}

impl<'a> From<&'a KrausChannel> for ChannelRef<'a> {
    fn from(k: &'a KrausChannel) -> Self {
        ChannelRef::Kraus(k)
    }
}

pub fn validate_cptp<'a>(channel: impl Into<ChannelRef<'a>>) -> Result<CptpReport> {
    let (tp_residual, c) = match channel.into() {
        ChannelRef::Affine(e) => (None, choi(e)),
        ChannelRef::Kraus(k) => (Some(k.tp_residual()), k.choi()),
    };
    let min_choi_eigenvalue = eig_herm4(&c)?[3];
    let tp_ok = tp_residual.is_none_or(|r| r <= CPTP_TOL);
    Ok(CptpReport {
        tp_residual,
        min_choi_eigenvalue,
        choi_trace: c.trace().re,
        passed: tp_ok && min_choi_eigenvalue >= -CPTP_TOL,
    })
}

const RANDOM_RETRIES: usize = 16;

/// Random channel from a Haar-distributed isometry: a `(2n)×2` complex
/// Gaussian `G` is orthonormalised as `K = G (G†G)^{-1/2}` and split into `n`
/// stacked 2×2 Kraus blocks. `n = 1` gives a Haar-random unitary.
pub fn random_channel(rng: &mut RngStream, n_kraus: usize) -> Result<KrausChannel> {
    if n_kraus == 0 || n_kraus > MAX_RANDOM_KRAUS {
        return Err(Error::KrausCount {
            got: n_kraus,
            max: MAX_RANDOM_KRAUS,
        });
    }
    for _ in 0..RANDOM_RETRIES {
        let blocks: Vec<Complex2x2> = (0..n_kraus)
            .map(|_| {
                Complex2x2::new(rng.complex_normal(), rng.complex_normal(), rng.complex_normal(), rng.complex_normal())
            })
            .collect();
        let gram = blocks.iter().fold(Complex2x2::zero(), |acc, g| acc + g.adjoint() * *g);
        let Some(inv_sqrt) = inverse_sqrt_psd(&gram) else {
            continue;
        };
        let ops = blocks.into_iter().map(|g| g * inv_sqrt).collect();
        return KrausChannel::new(ops);
    }
    Err(Error::SingularSample(RANDOM_RETRIES))
}

/// `H^{-1/2}` for a 2×2 Hermitian positive definite `H`, in closed form via
/// `√H = (H + √det H · I) / √(tr H + 2√det H)`. `None` when `H` is close to
/// singular.
fn inverse_sqrt_psd(h: &Complex2x2) -> Option<Complex2x2> {
    let tr = h.trace().re;
    let det = h.det().re;
    if !(tr > 0.0) || det <= 1e-10 * tr * tr {
        return None;
    }
    let s = det.sqrt();
    let t = (tr + 2.0 * s).sqrt();
    let root = (*h + Complex2x2::identity().scale(C64::new(s, 0.0))).scale(C64::new(1.0 / t, 0.0));
    root.inverse()
}
