//! Unitary quasi-inverses of single-qubit channels.
//!
//! A channel is stored in Bloch form `r ↦ M r + c`. The quasi-inverse is the
//! unitary `V` whose action after the channel most lowers the mean square
//! trace distance between input and output, averaged uniformly over the
//! Bloch ball.

mod error;
pub mod channels;
pub mod inverter;
pub mod metrics;
pub mod numerics;
pub mod oracle;
pub mod zoo;

pub use channels::{
    apply, choi, compose, kraus_to_affine, random_channel, unitary_matrix, unitary_to_affine, validate_cptp,
    AffineChannel, BlochState, CptpReport, KrausChannel, UnitaryParams,
};
pub use error::{Error, Result};
pub use inverter::{build_q, delta_mstd_direct, maximize, quasi_inverse, QForm, QuasiInverseResult};
pub use metrics::{mstd_analytic, mstd_composed, mstd_monte_carlo, trace_distance, MstdMethod, MstdReport, Region};
pub use numerics::{eig_herm4, eig_sym4, Complex2x2, Real3x3, RngStream, Sym4x4, SymEigen4};
pub use oracle::{brute_force_best, verify, VerificationReport};
pub use zoo::{FamilySpec, GoldenExpectation};
