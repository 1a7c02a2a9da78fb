//! Python module `eyeclone`: photon statistics, threshold-eye detection, the
//! micro-macro witness and CHSH estimates.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use eyeclone::oracle::default_n_trunc;
use eyeclone::{
    ChshSettings, DetectionStats, Error, GainParams, LossChannel, Seed, ThresholdDetector,
    WitnessReport,
};

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn gain(g: f64) -> PyResult<GainParams> {
    GainParams::new(g).map_err(py_err)
}

fn loss(eta: f64) -> PyResult<LossChannel> {
    LossChannel::new(eta).map_err(py_err)
}

fn seed(n: u8) -> PyResult<Seed> {
    Seed::from_index(n).map_err(py_err)
}

/// Photon-number distribution of an amplified seed after loss.
#[pyclass(name = "PhotonDistribution", module = "eyeclone", frozen)]
struct PyPhotonDistribution {
    #[pyo3(get)]
    probs: Vec<f64>,
    #[pyo3(get)]
    tail_bound: f64,
    #[pyo3(get)]
    mean: f64,
    #[pyo3(get)]
    mean_truncated: bool,
    #[pyo3(get)]
    g: f64,
    #[pyo3(get)]
    eta: f64,
    #[pyo3(get)]
    seed: u8,
}

#[pymethods]
impl PyPhotonDistribution {
    #[getter]
    fn m_max(&self) -> usize {
        self.probs.len() - 1
    }

    fn __len__(&self) -> usize {
        self.probs.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PhotonDistribution(seed={}, g={}, eta={}, m_max={}, mean={})",
            self.seed,
            self.g,
            self.eta,
            self.m_max(),
            self.mean
        )
    }
}

/// Joint click statistics of the two eyes.
#[pyclass(name = "DetectionStats", module = "eyeclone", frozen)]
struct PyDetectionStats(DetectionStats);

#[pymethods]
impl PyDetectionStats {
    #[getter]
    fn p_yn(&self) -> f64 {
        self.0.p_yn
    }
    #[getter]
    fn p_ny(&self) -> f64 {
        self.0.p_ny
    }
    #[getter]
    fn p_yy(&self) -> f64 {
        self.0.p_yy
    }
    #[getter]
    fn p_nn(&self) -> f64 {
        self.0.p_nn
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }
    /// `None` when no conclusive event can occur.
    #[getter]
    fn visibility(&self) -> Option<f64> {
        self.0.visibility
    }
    #[getter]
    fn mean_n(&self) -> f64 {
        self.0.mean_n
    }

    fn __repr__(&self) -> String {
        format!(
            "DetectionStats(epsilon={}, visibility={:?}, mean_n={})",
            self.0.epsilon, self.0.visibility, self.0.mean_n
        )
    }
}

#[pyclass(name = "WitnessReport", module = "eyeclone", frozen)]
struct PyWitnessReport(WitnessReport);

#[pymethods]
impl PyWitnessReport {
    #[getter]
    fn jz_sz(&self) -> f64 {
        self.0.jz_sz
    }
    #[getter]
    fn jx_sx(&self) -> f64 {
        self.0.jx_sx
    }
    #[getter]
    fn jy_sy(&self) -> f64 {
        self.0.jy_sy
    }
    #[getter]
    fn n_a(&self) -> f64 {
        self.0.n_a
    }
    #[getter]
    fn lhs(&self) -> f64 {
        self.0.lhs
    }
    #[getter]
    fn rhs(&self) -> f64 {
        self.0.rhs
    }
    #[getter]
    fn margin(&self) -> f64 {
        self.0.margin
    }

    fn violates_separability(&self) -> bool {
        self.0.violates_separability()
    }

    fn __repr__(&self) -> String {
        format!("WitnessReport(lhs={}, rhs={}, margin={})", self.0.lhs, self.0.rhs, self.0.margin)
    }
}

#[pyclass(name = "ChshEstimate", module = "eyeclone", frozen, get_all)]
struct PyChshEstimate {
    s: Option<f64>,
    std_error: Option<f64>,
    conclusive_rate: f64,
    n_trials: u64,
    n_conclusive: u64,
    correlators: [[Option<f64>; 2]; 2],
}

/// Taylor coefficients of `p(z)**alpha` up to `z**order`.
#[pyfunction]
fn poly_power(p: Vec<f64>, alpha: f64, order: usize) -> PyResult<Vec<f64>> {
    Ok(eyeclone::poly_power(&p, alpha, order).map_err(py_err)?.into_coeffs())
}

/// Gain giving a total mean photon number `4 sinh²g + 1`.
#[pyfunction]
fn gain_from_mean_photons(n_mean: f64) -> PyResult<f64> {
    Ok(GainParams::from_total_mean_photons(n_mean).map_err(py_err)?.g())
}

#[pyfunction]
#[pyo3(signature = (g, eta, tail_tol=1e-12))]
fn choose_m_max(g: f64, eta: f64, tail_tol: f64) -> PyResult<usize> {
    eyeclone::choose_m_max(gain(g)?, loss(eta)?, tail_tol).map_err(py_err)
}

/// Distribution for seed 0 (vacuum) or 1 (single photon). Without `m_max` the
/// truncation is chosen for `tail_tol`.
#[pyfunction]
#[pyo3(signature = (seed_photons, g, eta, m_max=None, tail_tol=1e-12))]
fn photon_distribution(
    seed_photons: u8,
    g: f64,
    eta: f64,
    m_max: Option<usize>,
    tail_tol: f64,
) -> PyResult<PyPhotonDistribution> {
    let (s, gp, l) = (seed(seed_photons)?, gain(g)?, loss(eta)?);
    let m = match m_max {
        Some(m) => m,
        None => eyeclone::choose_m_max(gp, l, tail_tol).map_err(py_err)?,
    };
    let d = eyeclone::photon_distribution(s, gp, l, m).map_err(py_err)?;
    Ok(PyPhotonDistribution {
        probs: d.probs(),
        tail_bound: d.tail_bound(),
        mean: d.mean(),
        mean_truncated: d.mean_truncated(),
        g,
        eta,
        seed: seed_photons,
    })
}

#[pyfunction]
fn mean_photons(seed_photons: u8, g: f64, eta: f64) -> PyResult<f64> {
    Ok(eyeclone::mean_photons(seed(seed_photons)?, gain(g)?, loss(eta)?))
}

#[pyfunction]
#[pyo3(signature = (g, theta=7, eta=0.08, extra_transmission=1.0, tail_tol=1e-12))]
fn joint_stats(
    g: f64,
    theta: u32,
    eta: f64,
    extra_transmission: f64,
    tail_tol: f64,
) -> PyResult<PyDetectionStats> {
    let det = ThresholdDetector::new(theta, eta).map_err(py_err)?;
    eyeclone::joint_stats(gain(g)?, &det, extra_transmission, tail_tol)
        .map(PyDetectionStats)
        .map_err(py_err)
}

#[pyfunction]
fn witness(g: f64, eta: f64) -> PyResult<PyWitnessReport> {
    Ok(PyWitnessReport(eyeclone::witness_closed_form(gain(g)?, loss(eta)?)))
}

/// Brute-force Fock-space evaluation of the witness; slow, limited to `g <= 1.25`.
#[pyfunction]
#[pyo3(signature = (g, eta, n_trunc=None))]
fn witness_oracle(g: f64, eta: f64, n_trunc: Option<usize>) -> PyResult<PyWitnessReport> {
    let gp = gain(g)?;
    let n = n_trunc.unwrap_or_else(|| default_n_trunc(gp));
    eyeclone::oracle::witness_oracle(gp, loss(eta)?, n).map(PyWitnessReport).map_err(py_err)
}

#[pyfunction]
fn correlation(delta: f64, visibility: f64) -> PyResult<f64> {
    eyeclone::correlation(delta, visibility).map_err(py_err)
}

#[pyfunction]
fn chsh_value(visibility: f64) -> PyResult<f64> {
    eyeclone::chsh_value(visibility).map_err(py_err)
}

/// Monte Carlo CHSH run with the default settings; deterministic in `seed`.
#[pyfunction]
#[pyo3(signature = (stats, trials=1_000_000, seed=0))]
fn simulate_chsh(
    py: Python<'_>,
    stats: &PyDetectionStats,
    trials: u64,
    seed: u64,
) -> PyResult<PyChshEstimate> {
    let s = stats.0;
    let est = py
        .detach(|| eyeclone::simulate_trials(trials, &s, &ChshSettings::default(), seed))
        .map_err(py_err)?;
    Ok(PyChshEstimate {
        s: est.s,
        std_error: est.std_error,
        conclusive_rate: est.conclusive_rate,
        n_trials: est.n_trials,
        n_conclusive: est.n_conclusive,
        correlators: est.correlators,
    })
}

#[pymodule(name = "eyeclone")]
fn eyeclone_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhotonDistribution>()?;
    m.add_class::<PyDetectionStats>()?;
    m.add_class::<PyWitnessReport>()?;
    m.add_class::<PyChshEstimate>()?;
    m.add_function(wrap_pyfunction!(poly_power, m)?)?;
    m.add_function(wrap_pyfunction!(gain_from_mean_photons, m)?)?;
    m.add_function(wrap_pyfunction!(choose_m_max, m)?)?;
    m.add_function(wrap_pyfunction!(photon_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(mean_photons, m)?)?;
    m.add_function(wrap_pyfunction!(joint_stats, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(witness_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_value, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_chsh, m)?)?;
    Ok(())
}
