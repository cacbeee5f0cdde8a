//! Brute-force check of quasi-inverse results by random search over unitaries.

use serde::{Deserialize, Serialize};

use crate::channels::{AffineChannel, UnitaryParams};
use crate::error::{Error, Result};
use crate::inverter::{delta_mstd_direct, QuasiInverseResult};
use crate::metrics::run_chunks;
use crate::numerics::{RngStream, Vec4};

pub const MIN_ORACLE_SAMPLES: usize = 10_000;
/// Allowed excess of a sampled delta over the solver delta.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Relative shortfall of the best sample tolerated by [`verify`].
pub const RELATIVE_SLACK: f64 = 0.01;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceBest {
    pub best_x: Vec4,
    pub best_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_id: Option<String>,
    pub solver_delta: f64,
    pub best_sampled_delta: f64,
    pub best_sampled_x: Vec4,
    pub n_samples: usize,
    /// Largest sampled delta minus the solver delta.
    pub max_violation: f64,
    pub passed: bool,
}

fn canonical_candidates() -> [Vec4; 8] {
    let mut out = [[0.0; 4]; 8];
    for i in 0..4 {
        out[2 * i][i] = 1.0;
        out[2 * i + 1][i] = -1.0;
    }
    out
}

fn eval(e: &AffineChannel, w: &Vec4) -> f64 {
    delta_mstd_direct(e, &UnitaryParams::from_vec4_unchecked(w))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Best `delta_mstd_direct` over the eight `±eᵢ` candidates and `n` uniform
/// samples on the unit 3-sphere.
pub fn brute_force_best(e: &AffineChannel, n: usize, rng: &mut RngStream) -> Result<BruteForceBest> {
    brute_force_best_with_workers(e, n, rng, default_workers())
}

/// [`brute_force_best`] on `workers` threads. The result does not depend on
/// `workers`: ties keep the earliest sample.
pub fn brute_force_best_with_workers(
    e: &AffineChannel,
    n: usize,
    rng: &mut RngStream,
    workers: usize,
) -> Result<BruteForceBest> {
    if n < MIN_ORACLE_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "brute-force search needs at least {MIN_ORACLE_SAMPLES} samples, got {n}"
        )));
    }
    let mut best = BruteForceBest {
        best_x: [1.0, 0.0, 0.0, 0.0],
        best_delta: f64::NEG_INFINITY,
    };
    let mut offer = |cand: BruteForceBest| {
        if cand.best_delta > best.best_delta {
            best = cand;
        }
    };
    for w in canonical_candidates() {
        offer(BruteForceBest {
            best_x: w,
            best_delta: eval(e, &w),
        });
    }

    let key = RngStream::new(rng.next_u64());
    let n_chunks = n.div_ceil(CHUNK);
    let parts = run_chunks(n_chunks, workers, |i| {
        let mut stream = key.derive(i as u64);
        let mut local: Option<BruteForceBest> = None;
        for _ in 0..CHUNK.min(n - i * CHUNK) {
            let w = stream.sample_sphere4();
            let d = eval(e, &w);
            if local.is_none_or(|b| d > b.best_delta) {
                local = Some(BruteForceBest { best_x: w, best_delta: d });
            }
        }
        local
    });
    for cand in parts.into_iter().flatten() {
        offer(cand);
    }
    Ok(best)
}

/// Checks that no sampled unitary beats `result` and that sampling comes
/// close to it.
pub fn verify(e: &AffineChannel, result: &QuasiInverseResult, n: usize, rng: &mut RngStream) -> Result<VerificationReport> {
    let best = brute_force_best(e, n, rng)?;
    let solver_delta = result.delta_mstd;
    let max_violation = best.best_delta - solver_delta;
    let slack = RELATIVE_SLACK * solver_delta.max(0.01);
    let passed = max_violation <= VIOLATION_TOL && best.best_delta >= solver_delta - slack;
    Ok(VerificationReport {
        channel_id: None,
        solver_delta,
        best_sampled_delta: best.best_delta,
        best_sampled_x: best.best_x,
        n_samples: n,
        max_violation,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{kraus_to_affine, random_channel};
    use crate::inverter::quasi_inverse;
    use crate::numerics::Real3x3;
    use crate::zoo::{make, FamilySpec};

    #[test]
    fn identity_channel_best_is_zero_at_e0() {
        let e = AffineChannel::identity();
        let b = brute_force_best(&e, 10_000, &mut RngStream::new(1)).unwrap();
        assert_eq!(b.best_delta, 0.0);
        assert_eq!(b.best_x, [1.0, 0.0, 0.0, 0.0]);
        let r = quasi_inverse(&e).unwrap();
        let rep = verify(&e, &r, 10_000, &mut RngStream::new(1)).unwrap();
        assert!(rep.passed);
        assert!(rep.solver_delta.abs() < 1e-12 && rep.best_sampled_delta.abs() < 1e-12);
    }

    #[test]
    fn pauli_optimum_hit_by_canonical_candidate() {
        let p = [0.1, 0.6, 0.2, 0.1];
        let alpha = |i: usize, j: usize| 1.0 - 2.0 * p[i] - 2.0 * p[j];
        let e = AffineChannel::new(Real3x3::diag([alpha(2, 3), alpha(1, 3), alpha(1, 2)]), [0.0; 3]).unwrap();
        let b = brute_force_best(&e, 100_000, &mut RngStream::new(5)).unwrap();
        assert!(b.best_delta >= 0.2 - 1e-3 && b.best_delta <= 0.2 + 1e-12);
    }

    #[test]
    fn tetrahedron_verifies() {
        let (k, _) = make(&FamilySpec::Tetrahedron { p: 0.3, p_prime: 0.1 }).unwrap();
        let e = kraus_to_affine(&k).unwrap();
        let r = quasi_inverse(&e).unwrap();
        let rep = verify(&e, &r, 100_000, &mut RngStream::new(9)).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.max_violation <= 1e-9);
    }

    #[test]
    fn halved_delta_is_caught() {
        let (k, _) = make(&FamilySpec::Tetrahedron { p: 0.3, p_prime: 0.1 }).unwrap();
        let e = kraus_to_affine(&k).unwrap();
        let mut r = quasi_inverse(&e).unwrap();
        r.delta_mstd *= 0.5;
        let rep = verify(&e, &r, 100_000, &mut RngStream::new(9)).unwrap();
        assert!(!rep.passed);
        assert!(rep.best_sampled_delta > rep.solver_delta);
    }

    #[test]
    fn independent_of_worker_count() {
        let e = kraus_to_affine(&random_channel(&mut RngStream::new(3), 3).unwrap()).unwrap();
        let a = brute_force_best_with_workers(&e, 30_000, &mut RngStream::new(4), 1).unwrap();
        let b = brute_force_best_with_workers(&e, 30_000, &mut RngStream::new(4), 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn never_beats_solver() {
        let mut rng = RngStream::new(77);
        for t in 0..20 {
            let e = kraus_to_affine(&random_channel(&mut rng, 1 + t % 4).unwrap()).unwrap();
            let r = quasi_inverse(&e).unwrap();
            let b = brute_force_best(&e, 10_000, &mut rng).unwrap();
            assert!(b.best_delta <= r.delta_mstd + 1e-10);
        }
    }

    #[test]
    fn too_few_samples() {
        let e = AffineChannel::identity();
        assert!(brute_force_best(&e, 9_999, &mut RngStream::new(0)).is_err());
    }
}
