//! Trace distance and the mean square trace distance (MSTD) of a channel.
//!
//! Averages use the uniform probability measure on the unit Bloch ball
//! (`E r_i = 0`, `E r_i r_j = δ_ij/5`) or, for the pure-state variant, on its
//! surface (`E r_i r_j = δ_ij/3`).

use serde::{Deserialize, Serialize};

use crate::channels::{compose, AffineChannel, BlochState};
use crate::error::{Error, Result};
use crate::numerics::{dot3, norm3, sub3, RngStream, Vec3};

/// Smallest sample count accepted by [`mstd_monte_carlo`].
pub const MIN_MONTE_CARLO_SAMPLES: usize = 1000;

/// Samples per independent sub-stream. Fixed so the result does not depend
/// on the number of workers.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MstdMethod {
    AnalyticBall,
    AnalyticSurface,
    MonteCarloBall,
    MonteCarloSurface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Ball,
    Surface,
}

impl Region {
    /// `E r_i r_i` under the region's uniform measure.
    pub fn second_moment(self) -> f64 {
        match self {
            Region::Ball => 0.2,
            Region::Surface => 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MstdReport {
    pub value: f64,
    pub method: MstdMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
}

impl MstdReport {
    fn analytic(value: f64, method: MstdMethod) -> Self {
        Self {
            value,
            method,
            stderr: None,
            n_samples: None,
        }
    }
}

/// `D(ρ, ζ) = ½ |r − z|`.
pub fn trace_distance(r: &BlochState, z: &BlochState) -> f64 {
    0.5 * norm3(&sub3(&r.r(), &z.r()))
}

fn mstd_formula(e: &AffineChannel, second_moment: f64) -> f64 {
    let m = e.m();
    let c = e.c();
    // ¼ E|r − Mr − c|² = ¼ [s (Tr(MMᵀ) − 2 Tr M + 3) + |c|²]
    0.25 * (second_moment * (m.frobenius_sq() - 2.0 * m.trace() + 3.0) + dot3(c, c))
}

/// `(1/20)(Tr(MMᵀ) − 2 Tr M + 3) + ¼|c|²`.
pub fn mstd_analytic(e: &AffineChannel) -> MstdReport {
    MstdReport::analytic(mstd_formula(e, Region::Ball.second_moment()), MstdMethod::AnalyticBall)
}

/// `(1/12)(Tr(MMᵀ) − 2 Tr M + 3) + ¼|c|²`, the average over pure states.
pub fn mstd_surface_analytic(e: &AffineChannel) -> MstdReport {
    MstdReport::analytic(mstd_formula(e, Region::Surface.second_moment()), MstdMethod::AnalyticSurface)
}

/// MSTD of `ei ∘ e` through `N = M^i M` and `u = M^i c + c^i`.
pub fn mstd_composed(ei: &AffineChannel, e: &AffineChannel) -> MstdReport {
    mstd_analytic(&compose(ei, e))
}

/// Surface-average counterpart of [`mstd_composed`].
pub fn mstd_surface_composed(ei: &AffineChannel, e: &AffineChannel) -> MstdReport {
    mstd_surface_analytic(&compose(ei, e))
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

fn chunk_moments(e: &AffineChannel, mut rng: RngStream, len: usize, region: Region) -> Moments {
    let mut acc = Moments::default();
    for _ in 0..len {
        let r: Vec3 = match region {
            Region::Ball => rng.sample_ball(),
            Region::Surface => rng.sample_sphere(),
        };
        let d = sub3(&r, &e.apply_vec(&r));
        let d2 = 0.25 * dot3(&d, &d);
        acc.sum += d2;
        acc.sum_sq += d2 * d2;
    }
    acc
}

/// Runs `f(chunk_index)` for every chunk on `workers` threads and returns the
/// outputs in chunk order.
pub(crate) fn run_chunks<T, F>(n_chunks: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.clamp(1, n_chunks.max(1));
    let mut out = vec![T::default(); n_chunks];
    if workers == 1 {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f(i);
        }
        return out;
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || (w..n_chunks).step_by(workers).map(|i| (i, f(i))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                out[i] = v;
            }
        }
    });
    out
}

/// Monte Carlo MSTD on a single worker; see [`mstd_monte_carlo_with_workers`].
pub fn mstd_monte_carlo(e: &AffineChannel, n: usize, rng: &mut RngStream, region: Region) -> Result<MstdReport> {
    mstd_monte_carlo_with_workers(e, n, rng, region, 1)
}

/// Mean of `D²(r, Mr + c)` over `n` uniform samples from `region`, with
/// `stderr = sample std / √n`.
///
/// One value is drawn from `rng` to key the run. Samples are split into fixed
/// chunks, each on its own derived stream, and partial sums are reduced in
/// chunk order, so the result is bit-identical for any `workers`.
pub fn mstd_monte_carlo_with_workers(
    e: &AffineChannel,
    n: usize,
    rng: &mut RngStream,
    region: Region,
    workers: usize,
) -> Result<MstdReport> {
    if n < MIN_MONTE_CARLO_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo needs at least {MIN_MONTE_CARLO_SAMPLES} samples, got {n}"
        )));
    }
    let key = RngStream::new(rng.next_u64());
    let n_chunks = n.div_ceil(CHUNK);
    let parts = run_chunks(n_chunks, workers, |i| {
        let len = CHUNK.min(n - i * CHUNK);
        chunk_moments(e, key.derive(i as u64), len, region)
    });
    let total = parts.iter().fold(Moments::default(), |a, b| Moments {
        sum: a.sum + b.sum,
        sum_sq: a.sum_sq + b.sum_sq,
    });
    let nf = n as f64;
    let mean = total.sum / nf;
    let var = ((total.sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok(MstdReport {
        value: mean,
        method: match region {
            Region::Ball => MstdMethod::MonteCarloBall,
            Region::Surface => MstdMethod::MonteCarloSurface,
        },
        stderr: Some(var.sqrt() / nf.sqrt()),
        n_samples: Some(n),
    })
}
