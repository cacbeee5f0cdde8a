//! Quasi-inverse search: the unitary correction `V = x₀ I + i x·σ` applied
//! after a channel that maximally lowers its MSTD.
//!
//! With `R` the Bloch rotation of `V` and `N = R M`, the unitary leaves
//! `Tr(N Nᵀ)` and `|R c|` unchanged, so the decrease reduces to
//! `ΔD̄² = (s/2) [Tr(R M) − Tr M]` for second moment `s`. Expanding `R` on the
//! unit 3-sphere gives a quadratic form `ΔD̄² = (2/5) x̃ᵀ Q x̃` in
//! `x̃ = (x₀, x)` with
//!
//! ```text
//! Q₀₀ = 0,   Q₀ᵢ = −aᵢ/4,   Qᵢⱼ = ((M_s)ᵢⱼ − Tr M · δᵢⱼ)/2      (ball)
//! ```
//!
//! where `M_s` is the symmetric part of `M` and
//! `a = (M₂₃ − M₃₂, M₃₁ − M₁₃, M₁₂ − M₂₁)`. The surface average scales `Q`
//! by 5/3. The offset `c` never enters. Maximising a quadratic form on the
//! unit sphere is the top eigenpair of `Q`.

use crate::channels::{unitary_matrix, unitary_to_affine, validate_cptp, AffineChannel, UnitaryParams};
use crate::error::{Error, Result};
use crate::metrics::{mstd_analytic, mstd_composed, mstd_surface_analytic, mstd_surface_composed, Region};
use crate::numerics::{eig_sym4, norm4, Complex2x2, Sym4x4, Vec4};

/// `ΔD̄² = DELTA_SCALE · x̃ᵀ Q x̃`.
pub const DELTA_SCALE: f64 = 0.4;
/// `λ_max` at or below this is reported as the trivial correction `V = I`.
pub const TRIVIAL_TOL: f64 = 1e-12;
/// Gap `λ₁ − λ₂` below which the maximiser is flagged as non-unique.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Quadratic form of the MSTD decrease over unit `(x₀, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QForm {
    q: Sym4x4,
}

impl QForm {
    pub fn new(q: Sym4x4) -> Self {
        Self { q }
    }

    pub fn matrix(&self) -> &Sym4x4 {
        &self.q
    }

    /// `(2/5) wᵀ Q w`.
    pub fn delta(&self, w: &Vec4) -> f64 {
        DELTA_SCALE * self.q.quadratic(w)
    }
}

/// Q for the ball-averaged MSTD.
pub fn build_q(e: &AffineChannel) -> QForm {
    build_q_for_region(e, Region::Ball)
}

pub fn build_q_for_region(e: &AffineChannel, region: Region) -> QForm {
    let m = e.m();
    // ΔD̄² = s [xᵀ(M_s − Tr M)x − x₀ x·a]; rescale to the 2/5 convention
    let scale = region.second_moment() / DELTA_SCALE;
    let sym = m.symmetric_part();
    let tr = m.trace();
    let a = m.axial();
    let mut q = Sym4x4::zero();
    for i in 0..3 {
        q.set(0, i + 1, -0.5 * a[i] * scale);
        for j in i..3 {
            let diag = if i == j { tr } else { 0.0 };
            q.set(i + 1, j + 1, (sym.0[i][j] - diag) * scale);
        }
    }
    QForm::new(q)
}

/// Top eigenpair of a [`QForm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximizer {
    pub lambda_max: f64,
    /// Unit maximiser with `x₀ ≥ 0` (or its first non-negligible component
    /// positive when `x₀ ≈ 0`).
    pub x: Vec4,
    /// `λ₁ − λ₂`.
    pub gap: f64,
    pub degenerate: bool,
}

pub fn maximize(qf: &QForm) -> Result<Maximizer> {
    let eig = eig_sym4(qf.matrix())?;
    let v = eig.vectors[0];
    let n = norm4(&v);
    let gap = eig.values[0] - eig.values[1];
    Ok(Maximizer {
        lambda_max: eig.values[0],
        x: v.map(|c| c / n),
        gap,
        degenerate: gap < DEGENERACY_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiInverseResult {
    pub params: UnitaryParams,
    pub unitary: Complex2x2,
    pub q: QForm,
    pub lambda_max: f64,
    /// `(2/5) max(λ_max, 0)`.
    pub delta_mstd: f64,
    pub mstd_before: f64,
    pub mstd_after: f64,
    /// `V = I` because no unitary lowers the MSTD.
    pub trivial: bool,
    pub degenerate: bool,
}

/// Quasi-inverse of a CPTP channel; non-physical input is rejected.
pub fn quasi_inverse(e: &AffineChannel) -> Result<QuasiInverseResult> {
    let report = validate_cptp(e)?;
    if !report.passed {
        return Err(Error::NotCptp {
            min_choi_eigenvalue: report.min_choi_eigenvalue,
        });
    }
    quasi_inverse_unchecked(e)
}

/// [`quasi_inverse`] without the CPTP check.
pub fn quasi_inverse_unchecked(e: &AffineChannel) -> Result<QuasiInverseResult> {
    let q = build_q(e);
    let best = maximize(&q)?;
    let trivial = best.lambda_max <= TRIVIAL_TOL;
    let params = if trivial {
        UnitaryParams::identity()
    } else {
        UnitaryParams::from_vec4(&best.x)?
    };
    let mstd_before = mstd_analytic(e).value;
    let mstd_after = mstd_composed(&unitary_to_affine(&params), e).value;
    Ok(QuasiInverseResult {
        params,
        unitary: unitary_matrix(&params),
        q,
        lambda_max: best.lambda_max,
        delta_mstd: DELTA_SCALE * best.lambda_max.max(0.0),
        mstd_before,
        mstd_after,
        trivial,
        degenerate: best.degenerate,
    })
}

/// `D̄²(E) − D̄²(V ∘ E)` evaluated from the two MSTDs, without `Q`.
pub fn delta_mstd_direct(e: &AffineChannel, u: &UnitaryParams) -> f64 {
    mstd_analytic(e).value - mstd_composed(&unitary_to_affine(u), e).value
}

/// Surface-average counterpart of [`delta_mstd_direct`].
pub fn delta_mstd_direct_surface(e: &AffineChannel, u: &UnitaryParams) -> f64 {
    mstd_surface_analytic(e).value - mstd_surface_composed(&unitary_to_affine(u), e).value
}
