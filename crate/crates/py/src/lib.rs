//! Python bindings for `closedloop`.

use closedloop::preset::PRESET_NAMES;
use closedloop::{
    DiamondDrive, DoubleLambdaAltDrive, DriveConfig, HermitianOperator, OrthonormalBasis,
    PhaseFrame, StateVector, TimeGrid, TriangleDrive,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

fn err(e: closedloop::Error) -> PyErr {
    match e {
        closedloop::Error::UnknownPreset { .. } => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rows(h: &HermitianOperator) -> Vec<Vec<Complex64>> {
    let n = h.dim();
    (1..=n)
        .map(|i| (1..=n).map(|j| h.entry(i, j)).collect())
        .collect()
}

fn state(amps: Vec<Complex64>) -> PyResult<StateVector> {
    StateVector::normalized(amps, "natural").map_err(err)
}

fn basis(vectors: Option<Vec<Vec<Complex64>>>, dim: usize) -> PyResult<OrthonormalBasis> {
    match vectors {
        None => Ok(OrthonormalBasis::natural(dim)),
        Some(vs) => {
            let vs = vs
                .into_iter()
                .map(|v| StateVector::new(v, "custom"))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            OrthonormalBasis::unlabeled(vs).map_err(err)
        }
    }
}

fn frame(name: &str) -> PyResult<PhaseFrame> {
    match name {
        "fixed" => Ok(PhaseFrame::Fixed),
        "conjugated" => Ok(PhaseFrame::Conjugated),
        other => Err(PyValueError::new_err(format!(
            "unknown frame '{other}', expected fixed or conjugated"
        ))),
    }
}

/// A phased closed-loop drive.
#[pyclass(name = "Drive", module = "closedloop_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyDrive {
    inner: DriveConfig,
}

#[pymethods]
impl PyDrive {
    #[staticmethod]
    #[pyo3(signature = (omega_12, omega_23, omega_31, delta_1=0.0, delta_3=0.0, phi=0.0))]
    fn triangle(
        omega_12: f64,
        omega_23: f64,
        omega_31: f64,
        delta_1: f64,
        delta_3: f64,
        phi: f64,
    ) -> PyResult<Self> {
        let d =
            TriangleDrive::new(omega_12, omega_23, omega_31, delta_1, delta_3, phi).map_err(err)?;
        Ok(Self { inner: d.into() })
    }

    #[staticmethod]
    #[pyo3(signature = (omega_12, omega_23, omega_34, omega_41, delta_1=0.0, delta_3=0.0, delta_4=0.0, phi=0.0))]
    #[allow(clippy::too_many_arguments)]
    fn diamond(
        omega_12: f64,
        omega_23: f64,
        omega_34: f64,
        omega_41: f64,
        delta_1: f64,
        delta_3: f64,
        delta_4: f64,
        phi: f64,
    ) -> PyResult<Self> {
        let d = DiamondDrive::new(
            omega_12, omega_23, omega_34, omega_41, delta_1, delta_3, delta_4, phi,
        )
        .map_err(err)?;
        Ok(Self { inner: d.into() })
    }

    #[staticmethod]
    #[pyo3(signature = (omega_p, omega_s, delta=0.0, phi_small=0.0))]
    fn double_lambda_alt(omega_p: f64, omega_s: f64, delta: f64, phi_small: f64) -> PyResult<Self> {
        let d = DoubleLambdaAltDrive::new(omega_p, omega_s, delta, phi_small).map_err(err)?;
        Ok(Self { inner: d.into() })
    }

    #[getter]
    fn topology(&self) -> &'static str {
        self.inner.topology().as_str()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn phase(&self) -> f64 {
        self.inner.phase()
    }

    fn hamiltonian(&self) -> Vec<Vec<Complex64>> {
        rows(&self.inner.build())
    }

    /// Same drive with the loop phase negated.
    fn conjugate(&self) -> Self {
        Self {
            inner: closedloop::conjugate_phase(&self.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!("Drive({:?})", self.inner.drive)
    }
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
#[pyfunction]
fn eigh(matrix: Vec<Vec<Complex64>>) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let m = closedloop::ComplexMatrix::from_rows(&matrix).map_err(err)?;
    let h = HermitianOperator::new(m).map_err(err)?;
    let s = closedloop::eig_hermitian(&h).map_err(err)?;
    Ok((
        s.eigenvalues,
        s.eigenvectors.iter().map(|v| v.to_vec()).collect(),
    ))
}

/// Returns `(exists, residual, dark_states, bright_states)`.
#[pyfunction]
#[pyo3(signature = (drive, tol=None))]
#[allow(clippy::type_complexity)]
fn dark_states(
    drive: &PyDrive,
    tol: Option<f64>,
) -> PyResult<(bool, f64, Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let r = closedloop::find_dark_states(&drive.inner.build(), tol).map_err(err)?;
    let v = |s: &[StateVector]| s.iter().map(|x| x.to_vec()).collect();
    Ok((r.exists, r.residual, v(&r.dark_states), v(&r.bright_states)))
}

/// Populations `[t][i]` in `basis` (natural basis when omitted).
#[pyfunction]
#[pyo3(signature = (drive, psi0, t_end=0.5, n_points=1001, basis=None))]
fn evolve(
    drive: &PyDrive,
    psi0: Vec<Complex64>,
    t_end: f64,
    n_points: usize,
    basis: Option<Vec<Vec<Complex64>>>,
) -> PyResult<Vec<Vec<f64>>> {
    let grid = TimeGrid::new(0.0, t_end, n_points).map_err(err)?;
    let b = self::basis(basis, drive.inner.dim())?;
    let traj = closedloop::evolve(&drive.inner.build(), &state(psi0)?, &grid, &b).map_err(err)?;
    Ok(traj.populations)
}

/// Returns `(symmetric, max_deviation, per_state_deviation)`.
#[pyfunction]
#[pyo3(signature = (drive, psi0, t_end=0.5, n_points=1001, threshold=1e-9, frame="fixed", basis=None))]
#[allow(clippy::too_many_arguments)]
fn phase_check(
    drive: &PyDrive,
    psi0: Vec<Complex64>,
    t_end: f64,
    n_points: usize,
    threshold: f64,
    frame: &str,
    basis: Option<Vec<Vec<Complex64>>>,
) -> PyResult<(bool, f64, Vec<f64>)> {
    let grid = TimeGrid::new(0.0, t_end, n_points).map_err(err)?;
    let b = self::basis(basis, drive.inner.dim())?;
    let r = closedloop::phase_symmetry_check(
        &drive.inner,
        &state(psi0)?,
        &grid,
        &b,
        threshold,
        self::frame(frame)?,
    )
    .map_err(err)?;
    Ok((r.symmetric, r.max_pop_deviation, r.per_state_deviation))
}

/// `|<psi(-phi, t)|psi(+phi, t)>|^2` on a uniform grid.
#[pyfunction]
#[pyo3(signature = (drive, psi0, t_end=0.5, n_points=1001))]
fn fidelity(
    drive: &PyDrive,
    psi0: Vec<Complex64>,
    t_end: f64,
    n_points: usize,
) -> PyResult<Vec<f64>> {
    let grid = TimeGrid::new(0.0, t_end, n_points).map_err(err)?;
    Ok(
        closedloop::fidelity_series(&drive.inner, &state(psi0)?, &grid)
            .map_err(err)?
            .values,
    )
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    PRESET_NAMES.to_vec()
}

/// Returns `(drive, initial_state, frame)` for a named preset.
#[pyfunction]
fn preset(name: &str) -> PyResult<(PyDrive, Vec<Complex64>, &'static str)> {
    let p = closedloop::preset(name).map_err(err)?;
    Ok((
        PyDrive {
            inner: p.config.clone(),
        },
        p.initial_state().to_vec(),
        p.frame.as_str(),
    ))
}

#[pymodule]
fn closedloop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDrive>()?;
    m.add_function(wrap_pyfunction!(eigh, m)?)?;
    m.add_function(wrap_pyfunction!(dark_states, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(phase_check, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    Ok(())
}
