use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use quasinv::channels::{self, KrausChannel};
use quasinv::inverter::{self, QuasiInverseResult};
use quasinv::metrics::{self, Region};
use quasinv::numerics::{Complex2x2, Real3x3, RngStream};
use quasinv::zoo::{self as family_zoo, FamilySpec};
use quasinv::{oracle, AffineChannel};

create_exception!(quasinv, QuasinvError, PyValueError);

fn err(e: quasinv::Error) -> PyErr {
    QuasinvError::new_err(e.to_string())
}

type PyMatrix = [[Complex64; 2]; 2];

fn to_matrix(m: &Complex2x2) -> PyMatrix {
    m.0
}

fn region(surface: bool) -> Region {
    if surface {
        Region::Surface
    } else {
        Region::Ball
    }
}

/// Qubit channel in Bloch form `r -> M r + c`.
#[pyclass(name = "AffineChannel", module = "quasinv", frozen)]
struct PyAffineChannel {
    inner: AffineChannel,
}

#[pymethods]
impl PyAffineChannel {
    #[new]
    fn new(m: [[f64; 3]; 3], c: [f64; 3]) -> PyResult<Self> {
        Ok(Self {
            inner: AffineChannel::new(Real3x3(m), c).map_err(err)?,
        })
    }

    /// Channel from a list of 2x2 complex Kraus matrices.
    #[staticmethod]
    fn from_kraus(operators: Vec<PyMatrix>) -> PyResult<Self> {
        let ops = operators.into_iter().map(Complex2x2).collect();
        let k = KrausChannel::new(ops).map_err(err)?;
        Ok(Self {
            inner: channels::kraus_to_affine(&k).map_err(err)?,
        })
    }

    #[getter]
    fn m(&self) -> [[f64; 3]; 3] {
        self.inner.m().0
    }

    #[getter]
    fn c(&self) -> [f64; 3] {
        *self.inner.c()
    }

    /// Bloch vector of the output for input Bloch vector `r`.
    fn apply(&self, r: [f64; 3]) -> PyResult<[f64; 3]> {
        let s = channels::BlochState::new(r).map_err(err)?;
        Ok(channels::apply(&self.inner, &s).r())
    }

    /// `self` applied after `first`.
    fn after(&self, first: &PyAffineChannel) -> Self {
        Self {
            inner: channels::compose(&self.inner, &first.inner),
        }
    }

    #[pyo3(signature = (surface = false))]
    fn mstd(&self, surface: bool) -> f64 {
        if surface {
            metrics::mstd_surface_analytic(&self.inner).value
        } else {
            metrics::mstd_analytic(&self.inner).value
        }
    }

    /// Monte Carlo MSTD estimate as `(value, stderr)`.
    #[pyo3(signature = (n, seed = 0, surface = false))]
    fn mstd_monte_carlo(&self, py: Python<'_>, n: usize, seed: u64, surface: bool) -> PyResult<(f64, f64)> {
        let e = self.inner;
        let r = py
            .detach(|| metrics::mstd_monte_carlo(&e, n, &mut RngStream::new(seed), region(surface)))
            .map_err(err)?;
        Ok((r.value, r.stderr.unwrap_or(0.0)))
    }

    /// `(passed, min_choi_eigenvalue)`.
    fn validate_cptp(&self) -> PyResult<(bool, f64)> {
        let r = channels::validate_cptp(&self.inner).map_err(err)?;
        Ok((r.passed, r.min_choi_eigenvalue))
    }

    /// The 4x4 matrix `Q` with MSTD decrease `0.4 w^T Q w`.
    fn q_matrix(&self) -> [[f64; 4]; 4] {
        inverter::build_q(&self.inner).matrix().to_full()
    }

    fn quasi_inverse(&self) -> PyResult<PyQuasiInverse> {
        Ok(PyQuasiInverse {
            inner: inverter::quasi_inverse(&self.inner).map_err(err)?,
        })
    }

    /// Decrease in MSTD from applying `V = x0 I + i x.sigma` after the channel.
    fn delta_mstd(&self, x0: f64, x: [f64; 3]) -> PyResult<f64> {
        let u = channels::UnitaryParams::new(x0, x).map_err(err)?;
        Ok(inverter::delta_mstd_direct(&self.inner, &u))
    }

    /// Brute-force check of the quasi-inverse as `(passed, solver_delta, best_sampled_delta)`.
    #[pyo3(signature = (samples = 100_000, seed = 0))]
    fn verify(&self, py: Python<'_>, samples: usize, seed: u64) -> PyResult<(bool, f64, f64)> {
        let e = self.inner;
        let rep = py
            .detach(|| {
                let r = inverter::quasi_inverse(&e)?;
                oracle::verify(&e, &r, samples, &mut RngStream::new(seed))
            })
            .map_err(err)?;
        Ok((rep.passed, rep.solver_delta, rep.best_sampled_delta))
    }

    fn __repr__(&self) -> String {
        format!("AffineChannel(m={:?}, c={:?})", self.inner.m().0, self.inner.c())
    }
}

#[pyclass(name = "QuasiInverse", module = "quasinv", frozen)]
struct PyQuasiInverse {
    inner: QuasiInverseResult,
}

#[pymethods]
impl PyQuasiInverse {
    #[getter]
    fn x0(&self) -> f64 {
        self.inner.params.x0()
    }

    #[getter]
    fn x(&self) -> [f64; 3] {
        self.inner.params.x()
    }

    #[getter]
    fn unitary(&self) -> PyMatrix {
        to_matrix(&self.inner.unitary)
    }

    #[getter]
    fn lambda_max(&self) -> f64 {
        self.inner.lambda_max
    }

    #[getter]
    fn delta_mstd(&self) -> f64 {
        self.inner.delta_mstd
    }

    #[getter]
    fn mstd_before(&self) -> f64 {
        self.inner.mstd_before
    }

    #[getter]
    fn mstd_after(&self) -> f64 {
        self.inner.mstd_after
    }

    #[getter]
    fn trivial(&self) -> bool {
        self.inner.trivial
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.inner.degenerate
    }

    fn __repr__(&self) -> String {
        format!(
            "QuasiInverse(x0={}, x={:?}, delta_mstd={})",
            self.inner.params.x0(),
            self.inner.params.x(),
            self.inner.delta_mstd
        )
    }
}

/// Channel from a named family: `pauli`, `gad`, `mixed_unitary`,
/// `tetrahedron` or `unitary`.
#[pyfunction]
fn zoo(family: &str, params: Vec<f64>) -> PyResult<PyAffineChannel> {
    let arity = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(QuasinvError::new_err(format!("{family} takes {n} parameters, got {}", params.len())))
        }
    };
    let spec = match family {
        "pauli" => {
            arity(4)?;
            FamilySpec::Pauli {
                p: [params[0], params[1], params[2], params[3]],
            }
        }
        "gad" => {
            arity(2)?;
            FamilySpec::Gad {
                gamma: params[0],
                p: params[1],
            }
        }
        "mixed_unitary" => {
            arity(2)?;
            FamilySpec::MixedUnitary {
                p: params[0],
                theta: params[1],
            }
        }
        "tetrahedron" => {
            arity(2)?;
            FamilySpec::Tetrahedron {
                p: params[0],
                p_prime: params[1],
            }
        }
        "unitary" => {
            arity(4)?;
            FamilySpec::Rotation {
                theta: params[0],
                axis: [params[1], params[2], params[3]],
            }
        }
        other => return Err(QuasinvError::new_err(format!("unknown family {other:?}"))),
    };
    let (k, _) = family_zoo::make(&spec).map_err(err)?;
    Ok(PyAffineChannel {
        inner: channels::kraus_to_affine(&k).map_err(err)?,
    })
}

/// Seeded random CPTP channel with `n_kraus` Kraus operators.
#[pyfunction]
#[pyo3(signature = (seed, n_kraus = 4))]
fn random_channel(seed: u64, n_kraus: usize) -> PyResult<PyAffineChannel> {
    let k = channels::random_channel(&mut RngStream::new(seed), n_kraus).map_err(err)?;
    Ok(PyAffineChannel {
        inner: channels::kraus_to_affine(&k).map_err(err)?,
    })
}

#[pymodule]
#[pyo3(name = "quasinv")]
fn quasinv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAffineChannel>()?;
    m.add_class::<PyQuasiInverse>()?;
    m.add_function(wrap_pyfunction!(zoo, m)?)?;
    m.add_function(wrap_pyfunction!(random_channel, m)?)?;
    m.add("QuasinvError", m.py().get_type::<QuasinvError>())?;
    Ok(())
}
