//! Python bindings for `spinbridge`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spinbridge::dynamics::{self, EvolutionConfig, Method};
use spinbridge::hilbert::named_initial_state;
use spinbridge::mapping::{self, DesignAnchors, DesignTarget, ParameterSheet};
use spinbridge::operators::{self, JjaVariant, ObservableKind};
use spinbridge::verify::{self, EquivalenceReport};
use spinbridge::{BoundaryLinks, CircuitSpec, InitialState, Sector, SparseOperator, SpinModelSpec, StateVector};

fn err(e: spinbridge::Error) -> PyErr {
    match e {
        spinbridge::Error::Numerical(_) | spinbridge::Error::NonHermitian { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = spinbridge::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn boundary(s: &str) -> PyResult<BoundaryLinks> {
    match s {
        "grounded" => Ok(BoundaryLinks::Grounded),
        "matched" => Ok(BoundaryLinks::Matched),
        _ => Err(PyValueError::new_err(format!("unknown boundary `{s}`"))),
    }
}

fn variant(s: &str) -> PyResult<JjaVariant> {
    match s {
        "simplified" => Ok(JjaVariant::Simplified),
        "full" => Ok(JjaVariant::Full),
        _ => Err(PyValueError::new_err(format!("unknown variant `{s}`"))),
    }
}

/// Heisenberg chain with per-bond couplings and per-site fields, MHz.
#[pyclass(name = "SpinModel", module = "pyspinbridge", frozen, skip_from_py_object)]
struct PySpinModel {
    inner: SpinModelSpec,
}

#[pymethods]
impl PySpinModel {
    #[new]
    #[pyo3(signature = (n_sites, coupling, field = 0.0))]
    fn new(n_sites: usize, coupling: f64, field: f64) -> PyResult<Self> {
        SpinModelSpec::chain(n_sites, coupling, field).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn chain_with(couplings: Vec<f64>, fields: Vec<f64>) -> PyResult<Self> {
        SpinModelSpec::chain_with(&couplings, &fields).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites
    }

    #[getter]
    fn couplings(&self) -> Option<Vec<f64>> {
        self.inner.chain_couplings()
    }

    #[getter]
    fn fields(&self) -> Vec<f64> {
        self.inner.fields.clone()
    }

    fn __repr__(&self) -> String {
        format!("SpinModel(n_sites={}, fields={:?})", self.inner.n_sites, self.inner.fields)
    }
}

/// Josephson junction array, energies in MHz.
#[pyclass(name = "Circuit", module = "pyspinbridge", frozen, skip_from_py_object)]
struct PyCircuit {
    inner: CircuitSpec,
}

#[pymethods]
impl PyCircuit {
    #[new]
    fn new(e_c: Vec<f64>, e_j: Vec<f64>, e_prime_j: Vec<f64>, e_coup: Vec<f64>) -> PyResult<Self> {
        let inner = CircuitSpec { e_c, e_j, e_prime_j, e_coup };
        inner.ensure_valid().map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n_sites, e_c, e_j, e_prime_j, e_coup, boundary = "grounded"))]
    fn homogeneous(n_sites: usize, e_c: f64, e_j: f64, e_prime_j: f64, e_coup: f64, boundary: &str) -> PyResult<Self> {
        let b = self::boundary(boundary)?;
        CircuitSpec::homogeneous(n_sites, e_c, e_j, e_prime_j, e_coup, b).map(|inner| Self { inner }).map_err(err)
    }

    /// Circuit realizing a homogeneous chain with the given coupling and,
    /// optionally, bulk field.
    #[staticmethod]
    #[pyo3(signature = (n_sites, coupling, e_c, e_j, field = None, boundary = "matched"))]
    fn design(n_sites: usize, coupling: f64, e_c: f64, e_j: f64, field: Option<f64>, boundary: &str) -> PyResult<Self> {
        let target = DesignTarget { n_sites, coupling, field };
        let anchors = DesignAnchors { e_c, e_j };
        mapping::design_circuit(&target, &anchors, self::boundary(boundary)?).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    #[getter]
    fn e_c(&self) -> Vec<f64> {
        self.inner.e_c.clone()
    }

    #[getter]
    fn e_j(&self) -> Vec<f64> {
        self.inner.e_j.clone()
    }

    #[getter]
    fn e_prime_j(&self) -> Vec<f64> {
        self.inner.e_prime_j.clone()
    }

    #[getter]
    fn e_coup(&self) -> Vec<f64> {
        self.inner.e_coup.clone()
    }

    fn to_spin(&self) -> PyResult<PySpinModel> {
        mapping::circuit_to_spin(&self.inner).map(|inner| PySpinModel { inner }).map_err(err)
    }

    fn jja_params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = mapping::derive_jja_params(&self.inner).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("omega", p.omega)?;
        d.set_item("delta_omega", p.delta_omega)?;
        d.set_item("e_l", p.e_l)?;
        d.set_item("delta_tilde", p.delta_tilde)?;
        d.set_item("hopping", p.hopping)?;
        d.set_item("cross_kerr", p.cross_kerr)?;
        d.set_item("corr_hopping", p.corr_hopping)?;
        d.set_item("corr_hopping_prime", p.corr_hopping_prime)?;
        Ok(d)
    }

    fn constraint_residual(&self) -> PyResult<Vec<f64>> {
        mapping::constraint_residual(&self.inner).map_err(err)
    }

    fn parameter_sheet<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s: ParameterSheet = ParameterSheet::from_circuit(&self.inner).map_err(err)?;
        let d = PyDict::new(py);
        for (k, v) in [
            ("e_c", s.e_c),
            ("e_j", s.e_j),
            ("e_l", s.e_l),
            ("e_coup", s.e_coup),
            ("e_coup_simplified", s.e_coup_simplified),
            ("e_prime_j", s.e_prime_j),
            ("omega", s.omega),
            ("corr_hopping", s.corr_hopping),
            ("delta_omega", s.delta_omega),
            ("cross_kerr", s.cross_kerr),
            ("hopping", s.hopping),
            ("constraint_residual", s.constraint_residual),
            ("coupling", s.coupling),
            ("field_bulk", s.field_bulk),
            ("field_edge", s.field_edge),
        ] {
            d.set_item(k, v)?;
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Circuit(n_sites={})", self.inner.n_sites())
    }
}

/// Tensor-product Fock basis with `local_dim` levels per site.
#[pyclass(name = "FockBasis", module = "pyspinbridge", frozen, skip_from_py_object)]
struct PyFockBasis {
    inner: spinbridge::FockBasis,
}

#[pymethods]
impl PyFockBasis {
    #[new]
    fn new(n_sites: usize, local_dim: usize) -> PyResult<Self> {
        spinbridge::FockBasis::new(n_sites, local_dim).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    #[getter]
    fn local_dim(&self) -> usize {
        self.inner.local_dim()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn index_of(&self, occupations: Vec<usize>) -> PyResult<usize> {
        self.inner.index_of(&occupations).map_err(err)
    }

    fn occupations_of(&self, index: usize) -> PyResult<Vec<usize>> {
        if index >= self.inner.dim() {
            return Err(PyValueError::new_err(format!("index {index} outside a basis of {}", self.inner.dim())));
        }
        Ok(self.inner.occupations_of(index))
    }

    /// Indices of the states with at most one boson per site.
    fn physical_mask(&self) -> Vec<usize> {
        self.inner.physical_mask()
    }

    fn __repr__(&self) -> String {
        format!("FockBasis(n_sites={}, local_dim={})", self.inner.n_sites(), self.inner.local_dim())
    }
}

/// Sparse complex square matrix.
#[pyclass(name = "Operator", module = "pyspinbridge", frozen, skip_from_py_object)]
struct PyOperator {
    inner: SparseOperator,
}

#[pymethods]
impl PyOperator {
    #[staticmethod]
    fn from_triplets(dim: usize, triplets: Vec<(usize, usize, Complex64)>) -> PyResult<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(PyValueError::new_err(format!("entry ({r}, {c}) outside dimension {dim}")));
        }
        Ok(Self { inner: SparseOperator::from_triplets(dim, triplets) })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn is_hermitian(&self) -> bool {
        self.inner.is_hermitian()
    }

    fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        self.inner.iter().collect()
    }

    fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let m = self.inner.to_dense();
        (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
    }

    fn matvec(&self, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.inner.matvec(&x).map_err(err)
    }

    fn restrict(&self, indices: Vec<usize>) -> PyResult<Self> {
        self.inner.restrict(&indices).map(|inner| Self { inner }).map_err(err)
    }

    fn max_abs_diff(&self, other: &PyOperator) -> PyResult<f64> {
        self.inner.max_abs_diff(&other.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Operator(dim={}, nnz={})", self.inner.dim(), self.inner.nnz())
    }
}

fn wrap(r: spinbridge::Result<SparseOperator>) -> PyResult<PyOperator> {
    r.map(|inner| PyOperator { inner }).map_err(err)
}

#[pyfunction]
fn build_h_spin(model: &PySpinModel) -> PyResult<PyOperator> {
    wrap(operators::build_h_spin(&model.inner))
}

#[pyfunction]
fn build_h_ebh(model: &PySpinModel, basis: &PyFockBasis) -> PyResult<PyOperator> {
    wrap(operators::build_h_ebh(&model.inner, &basis.inner))
}

#[pyfunction]
fn build_h_dm(model: &PySpinModel, basis: &PyFockBasis) -> PyResult<PyOperator> {
    wrap(operators::build_h_dm(&model.inner, &basis.inner))
}

#[pyfunction]
#[pyo3(signature = (circuit, basis, variant = "simplified"))]
fn build_h_jja(circuit: &PyCircuit, basis: &PyFockBasis, variant: &str) -> PyResult<PyOperator> {
    let params = mapping::derive_jja_params(&circuit.inner).map_err(err)?;
    wrap(operators::build_h_jja(&params, &basis.inner, self::variant(variant)?))
}

#[pyfunction]
fn observable(kind: &str, sector: &str, basis: &PyFockBasis) -> PyResult<PyOperator> {
    wrap(operators::observable(parse::<ObservableKind>(kind)?, parse::<Sector>(sector)?, &basis.inner))
}

/// Amplitudes of a named product state in the given sector.
#[pyfunction]
fn initial_state(basis: &PyFockBasis, name: &str, sector: &str) -> PyResult<Vec<Complex64>> {
    named_initial_state(basis.inner, parse::<InitialState>(name)?, parse::<Sector>(sector)?)
        .map(StateVector::into_amplitudes)
        .map_err(err)
}

/// Propagates `psi0` and records each observable on a uniform grid.
#[pyfunction]
#[pyo3(signature = (h, basis, psi0, observables, t_max, n_steps, method = "auto", leakage_mask = None))]
#[allow(clippy::too_many_arguments)]
fn evolve<'py>(
    py: Python<'py>,
    h: &PyOperator,
    basis: &PyFockBasis,
    psi0: Vec<Complex64>,
    observables: Vec<(String, PyRef<'py, PyOperator>)>,
    t_max: f64,
    n_steps: usize,
    method: &str,
    leakage_mask: Option<Vec<usize>>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = EvolutionConfig { t_max, n_steps, method: parse::<Method>(method)?, ..EvolutionConfig::default() };
    let psi = StateVector::from_amplitudes(basis.inner, psi0).map_err(err)?;
    let named: Vec<(&str, &SparseOperator)> = observables.iter().map(|(n, o)| (n.as_str(), &o.inner)).collect();
    let traj = py
        .detach(|| dynamics::evolve_tracked(&h.inner, &psi, &cfg, &named, leakage_mask.as_deref()))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("times", traj.times)?;
    let series = PyDict::new(py);
    for s in traj.series {
        series.set_item(s.name, s.values)?;
    }
    d.set_item("series", series)?;
    d.set_item("leakage", traj.leakage)?;
    d.set_item("norms", traj.norms)?;
    d.set_item("max_imaginary", traj.max_imaginary)?;
    Ok(d)
}

fn report_dict<'py>(py: Python<'py>, r: &EquivalenceReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("offset", r.offset)?;
    d.set_item("residual_max", r.residual_max)?;
    d.set_item("residual_frobenius", r.residual_frobenius)?;
    d.set_item("relative_residual", r.relative_residual())?;
    d.set_item("coupling_norm", r.coupling_norm)?;
    d.set_item("reverse_coupling_norm", r.reverse_coupling_norm)?;
    d.set_item("boson_hermiticity", r.boson_hermiticity)?;
    d.set_item("spin_hermiticity", r.spin_hermiticity)?;
    d.set_item("spin_max_abs", r.spin_max_abs)?;
    d.set_item("boson_dim", r.boson_dim)?;
    d.set_item("spin_dim", r.spin_dim)?;
    Ok(d)
}

/// Compares the boson Hamiltonian on `mask` with the spin Hamiltonian up to
/// a constant offset.
#[pyfunction]
fn compare_projected<'py>(
    py: Python<'py>,
    h_boson: &PyOperator,
    h_spin: &PyOperator,
    mask: Vec<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let report = verify::compare_projected(&h_boson.inner, &h_spin.inner, &mask).map_err(err)?;
    report_dict(py, &report)
}

#[pymodule]
pub fn pyspinbridge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpinModel>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyFockBasis>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(build_h_spin, m)?)?;
    m.add_function(wrap_pyfunction!(build_h_ebh, m)?)?;
    m.add_function(wrap_pyfunction!(build_h_dm, m)?)?;
    m.add_function(wrap_pyfunction!(build_h_jja, m)?)?;
    m.add_function(wrap_pyfunction!(observable, m)?)?;
    m.add_function(wrap_pyfunction!(initial_state, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(compare_projected, m)?)?;
    Ok(())
}
