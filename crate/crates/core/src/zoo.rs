//! Parametric channel families with closed-form quasi-inverses.
//!
//! Each constructor returns the Kraus set together with the expected
//! correction unitary, MSTD decrease and `Q` matrix, for golden testing.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::channels::{unitary_matrix, KrausChannel, UnitaryParams};
use crate::error::{Error, Result};
use crate::inverter::{delta_mstd_direct, QuasiInverseResult, DELTA_SCALE, TRIVIAL_TOL};
use crate::channels::AffineChannel;
use crate::numerics::{norm3, C64, Complex2x2, Sym4x4, Vec3};

const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    /// `p₀ρ + Σ pᵢ σᵢ ρ σᵢ`.
    Pauli { p: [f64; 4] },
    /// Generalized amplitude damping with `γ ∈ [−1, 1]` and thermal weight `p`.
    Gad { gamma: f64, p: f64 },
    /// `(1 − 3p)ρ + p Σᵢ Uᵢ ρ Uᵢ†` with `Uᵢ = exp(−iθσᵢ/2)`, `p ∈ [0, 1/3]`.
    MixedUnitary { p: f64, theta: f64 },
    /// Tetrahedron channel with weights `(p′, p, p, p′)` on the four corners.
    Tetrahedron { p: f64, p_prime: f64 },
    /// `U = exp(−iθ n·σ/2)` with unit axis `n`.
    Rotation { theta: f64, axis: Vec3 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenExpectation {
    /// Correction unitaries, any of which is expected (up to global phase).
    /// Empty when no closed form is available.
    pub expected_unitaries: Vec<Complex2x2>,
    pub expected_delta: Option<f64>,
    pub expected_q: Option<Sym4x4>,
    /// The optimum is not unique; any unitary reaching `expected_delta` is
    /// acceptable.
    pub degenerate: bool,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn trivial_expectation(q: Sym4x4) -> GoldenExpectation {
    GoldenExpectation {
        expected_unitaries: vec![Complex2x2::identity()],
        expected_delta: Some(0.0),
        expected_q: Some(q),
        degenerate: false,
    }
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Pauli { .. } => "pauli",
            FamilySpec::Gad { .. } => "gad",
            FamilySpec::MixedUnitary { .. } => "mixed_unitary",
            FamilySpec::Tetrahedron { .. } => "tetrahedron",
            FamilySpec::Rotation { .. } => "rotation",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            FamilySpec::Pauli { p } => {
                if !finite(&p) || p.iter().any(|&x| x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > PROB_TOL {
                    return bad(format!("Pauli probabilities must be non-negative and sum to 1, got {p:?}"));
                }
            }
            FamilySpec::Gad { gamma, p } => {
                if !(-1.0..=1.0).contains(&gamma) || !(0.0..=1.0).contains(&p) {
                    return bad(format!("GAD needs gamma in [-1, 1] and p in [0, 1], got gamma={gamma}, p={p}"));
                }
            }
            FamilySpec::MixedUnitary { p, theta } => {
                if !(0.0..=1.0 / 3.0).contains(&p) || !theta.is_finite() {
                    return bad(format!("mixed unitary needs p in [0, 1/3] and finite theta, got p={p}"));
                }
            }
            FamilySpec::Tetrahedron { p, p_prime } => {
                if !finite(&[p, p_prime]) || p < 0.0 || p_prime < 0.0 || p + p_prime > 0.5 + PROB_TOL {
                    return bad(format!("tetrahedron needs p, p' >= 0 and p + p' <= 0.5, got p={p}, p'={p_prime}"));
                }
            }
            FamilySpec::Rotation { theta, axis } => {
                let n = norm3(&axis);
                if !theta.is_finite() || !n.is_finite() || (n - 1.0).abs() > PROB_TOL {
                    return bad(format!("rotation axis must be a unit vector, |n| = {n}"));
                }
            }
        }
        Ok(())
    }
}

/// Builds the channel of a family point and its closed-form expectation.
pub fn make(spec: &FamilySpec) -> Result<(KrausChannel, GoldenExpectation)> {
    spec.validate()?;
    match *spec {
        FamilySpec::Pauli { p } => Ok(pauli(p)),
        FamilySpec::Gad { gamma, p } => Ok(gad(gamma, p)),
        FamilySpec::MixedUnitary { p, theta } => Ok(mixed_unitary(p, theta)),
        FamilySpec::Tetrahedron { p, p_prime } => Ok(tetrahedron(p, p_prime)),
        FamilySpec::Rotation { theta, axis } => rotation(theta, axis),
    }
}

fn pauli(p: [f64; 4]) -> (KrausChannel, GoldenExpectation) {
    let mut ops = vec![Complex2x2::identity().scale(real(p[0].sqrt()))];
    ops.extend((0..3).map(|i| Complex2x2::pauli(i).scale(real(p[i + 1].sqrt()))));
    let kraus = KrausChannel::new(ops).expect("Pauli Kraus set is trace preserving");

    let q = Sym4x4::diag([0.0, p[1] - p[0], p[2] - p[0], p[3] - p[0]]);
    let p_max = p[1].max(p[2]).max(p[3]);
    if p_max <= p[0] {
        return (kraus, trivial_expectation(q));
    }
    let winners: Vec<usize> = (0..3).filter(|&i| p[i + 1] == p_max).collect();
    let golden = GoldenExpectation {
        expected_unitaries: winners.iter().map(|&i| Complex2x2::pauli(i)).collect(),
        expected_delta: Some(DELTA_SCALE * (p_max - p[0])),
        expected_q: Some(q),
        degenerate: winners.len() > 1,
    };
    (kraus, golden)
}

fn gad(gamma: f64, p: f64) -> (KrausChannel, GoldenExpectation) {
    let z = real(0.0);
    let s = (1.0 - gamma * gamma).max(0.0).sqrt();
    let (a, b) = (real(p.sqrt()), real((1.0 - p).sqrt()));
    let kraus = KrausChannel::new(vec![
        Complex2x2::new(real(1.0), z, z, real(gamma)).scale(a),
        Complex2x2::new(z, real(s), z, z).scale(a),
        Complex2x2::new(real(gamma), z, z, real(1.0)).scale(b),
        Complex2x2::new(z, z, real(s), z).scale(b),
    ])
    .expect("GAD Kraus set is trace preserving");

    let q = Sym4x4::diag([0.0, -gamma * (gamma + 1.0), -gamma * (gamma + 1.0), -2.0 * gamma]).scale(0.5);
    if gamma >= 0.0 {
        return (kraus, trivial_expectation(q));
    }
    let golden = GoldenExpectation {
        expected_unitaries: vec![Complex2x2::pauli(2)],
        expected_delta: Some(-DELTA_SCALE * gamma),
        expected_q: Some(q),
        degenerate: false,
    };
    (kraus, golden)
}

/// `v = p sin θ` and `q = 4p sin²(θ/2) − 1`.
pub fn mixed_unitary_coefficients(p: f64, theta: f64) -> (f64, f64) {
    (p * theta.sin(), 4.0 * p * (theta / 2.0).sin().powi(2) - 1.0)
}

fn mixed_unitary(p: f64, theta: f64) -> (KrausChannel, GoldenExpectation) {
    let (s, c) = (theta / 2.0).sin_cos();
    let mut ops = vec![Complex2x2::identity().scale(real((1.0 - 3.0 * p).max(0.0).sqrt()))];
    for i in 0..3 {
        let u = Complex2x2::identity().scale(real(c)) - Complex2x2::pauli(i).scale(C64::new(0.0, s));
        ops.push(u.scale(real(p.sqrt())));
    }
    let kraus = KrausChannel::new(ops).expect("mixed unitary Kraus set is trace preserving");

    let (v, q) = mixed_unitary_coefficients(p, theta);
    let mut qm = Sym4x4::diag([0.0, q, q, q]);
    for i in 1..4 {
        qm.set(0, i, v / 2.0);
    }
    if q < 0.0 {
        // no closed form for the maximiser here
        return (
            kraus,
            GoldenExpectation {
                expected_unitaries: Vec::new(),
                expected_delta: None,
                expected_q: Some(qm),
                degenerate: false,
            },
        );
    }
    let lambda = 0.5 * (q + (q * q + 3.0 * v * v).sqrt());
    if lambda <= TRIVIAL_TOL {
        return (kraus, trivial_expectation(qm));
    }
    // V = exp(iφ n·σ), cos φ = √3 v / √(3v² + 4λ²), n = (1, 1, 1)/√3
    let norm = (3.0 * v * v + 4.0 * lambda * lambda).sqrt();
    let (cos_phi, sin_phi) = (3f64.sqrt() * v / norm, 2.0 * lambda / norm);
    let n = [1.0 / 3f64.sqrt(); 3];
    let u = UnitaryParams::new(cos_phi, n.map(|k| k * sin_phi)).expect("unit by construction");
    let golden = GoldenExpectation {
        expected_unitaries: vec![unitary_matrix(&u)],
        expected_delta: Some(DELTA_SCALE * lambda),
        expected_q: Some(qm),
        // v = 0 leaves λ_max = q three-fold degenerate
        degenerate: v.abs() < 1e-12,
    };
    (kraus, golden)
}

/// Corners `v₀ … v₃` of the tetrahedron, unit length.
pub fn tetrahedron_vertices() -> [Vec3; 4] {
    let k = 1.0 / 3f64.sqrt();
    [[k, k, k], [k, -k, -k], [-k, k, -k], [-k, -k, k]]
}

fn tetrahedron(p: f64, p_prime: f64) -> (KrausChannel, GoldenExpectation) {
    let weights = [p_prime, p, p, p_prime];
    let rest = (1.0 - 2.0 * p - 2.0 * p_prime).max(0.0);
    let mut ops = vec![Complex2x2::identity().scale(real(rest.sqrt()))];
    for (w, v) in weights.iter().zip(tetrahedron_vertices()) {
        ops.push(Complex2x2::pauli_dot(&v).scale(real(w.sqrt())));
    }
    let kraus = KrausChannel::new(ops).expect("tetrahedron Kraus set is trace preserving");

    let diag = 8.0 * p / 3.0 + 8.0 * p_prime / 3.0 - 1.0;
    let off = -2.0 * p / 3.0 + 2.0 * p_prime / 3.0;
    let mut q = Sym4x4::diag([0.0, diag, diag, diag]);
    q.set(1, 2, off);

    // eigenvalues diag ± off on (0, 1, ±1, 0)/√2, and diag on e₃
    let lambda = diag + off.abs();
    if lambda <= TRIVIAL_TOL {
        return (kraus, trivial_expectation(q));
    }
    let plus = (Complex2x2::pauli(0) + Complex2x2::pauli(1)).scale(real(FRAC_1_SQRT_2));
    let minus = (Complex2x2::pauli(0) - Complex2x2::pauli(1)).scale(real(FRAC_1_SQRT_2));
    let (unitaries, degenerate) = if p > p_prime {
        (vec![minus], false)
    } else if p < p_prime {
        (vec![plus], false)
    } else {
        (vec![plus, minus], true)
    };
    let golden = GoldenExpectation {
        expected_unitaries: unitaries,
        expected_delta: Some(DELTA_SCALE * lambda),
        expected_q: Some(q),
        degenerate,
    };
    (kraus, golden)
}

fn rotation(theta: f64, axis: Vec3) -> Result<(KrausChannel, GoldenExpectation)> {
    let u = UnitaryParams::rotation(theta, axis)?;
    let kraus = KrausChannel::unitary(unitary_matrix(&u))?;

    let half_sin_sq = (theta / 2.0).sin().powi(2);
    let mut q = Sym4x4::zero();
    for i in 0..3 {
        // ε_i, ω_i, μ_ij
        q.set(0, i + 1, 0.5 * axis[i] * theta.sin());
        q.set(i + 1, i + 1, axis[i] * axis[i] * half_sin_sq + half_sin_sq - 1.0);
        for j in i + 1..3 {
            q.set(i + 1, j + 1, axis[i] * axis[j] * half_sin_sq);
        }
    }
    let golden = GoldenExpectation {
        expected_unitaries: vec![unitary_matrix(&u.adjoint())],
        expected_delta: Some(DELTA_SCALE * half_sin_sq),
        expected_q: Some(q),
        degenerate: false,
    };
    Ok((kraus, golden))
}

/// Tolerances for [`GoldenExpectation::check`].
#[derive(Debug, Clone, Copy)]
pub struct GoldenTolerance {
    pub unitary: f64,
    pub delta: f64,
    pub q: f64,
}

impl Default for GoldenTolerance {
    fn default() -> Self {
        Self {
            unitary: 1e-9,
            delta: 1e-10,
            q: 1e-12,
        }
    }
}

impl GoldenExpectation {
    /// Compares a solver result for `e` against the expectation. Degenerate
    /// optima accept any unitary whose direct MSTD decrease reaches the
    /// expected value.
    pub fn check(&self, e: &AffineChannel, result: &QuasiInverseResult, tol: GoldenTolerance) -> std::result::Result<(), String> {
        if let Some(q) = &self.expected_q {
            let diff = q.max_abs_diff(result.q.matrix());
            if !(diff <= tol.q) {
                return Err(format!("Q differs from the closed form by {diff:e}"));
            }
        }
        if let Some(delta) = self.expected_delta {
            let diff = (delta - result.delta_mstd).abs();
            if !(diff <= tol.delta) {
                return Err(format!("delta {} != expected {delta} (diff {diff:e})", result.delta_mstd));
            }
        }
        if self.expected_unitaries.is_empty() {
            return Ok(());
        }
        let closest = self
            .expected_unitaries
            .iter()
            .map(|u| result.unitary.phase_aligned_distance(u))
            .fold(f64::INFINITY, f64::min);
        if closest <= tol.unitary {
            return Ok(());
        }
        if self.degenerate {
            if let Some(delta) = self.expected_delta {
                let achieved = delta_mstd_direct(e, &result.params);
                if (achieved - delta).abs() <= tol.delta {
                    return Ok(());
                }
            }
        }
        Err(format!("unitary is {closest:e} away from every expected correction"))
    }
}
