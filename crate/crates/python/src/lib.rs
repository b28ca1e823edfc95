//! Python bindings. Column and row indices are 0-based throughout.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sqgt_core::campaign::{run_campaign, CampaignConfig, CampaignErrors, DEFAULT_CASE_BUDGET};
use sqgt_core::channel::{inject_explicit, inject_random, syndrome};
use sqgt_core::codebook::{build, feasibility_report, verify_sq_separable};
use sqgt_core::decoders::decode;
use sqgt_core::disjunct::{identity_code, kautz_singleton, random_code, verify_disjunct, DEFAULT_ATTEMPTS};
use sqgt_core::sequences;
use sqgt_core::{DefectiveSet, Error, HeadroomMode, Matrix, SequenceKind, TestOutcome};

create_exception!(sqgt, SqgtError, PyValueError, "Invalid input or violated invariant.");
create_exception!(sqgt, DecodingFailure, SqgtError, "The result vector is inconsistent with the code contract.");

fn err(e: Error) -> PyErr {
    match e {
        Error::DecodingFailure(_) => DecodingFailure::new_err(e.to_string()),
        other => SqgtError::new_err(other.to_string()),
    }
}

fn kind(name: &str) -> PyResult<SequenceKind> {
    name.parse().map_err(err)
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "Thresholds", module = "sqgt", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyThresholds(sqgt_core::Thresholds);

#[pymethods]
impl PyThresholds {
    #[new]
    fn new(eta: Vec<u64>) -> PyResult<Self> {
        sqgt_core::Thresholds::new(eta).map(Self).map_err(err)
    }

    /// `0, step, 2 step, ..., bins * step`.
    #[staticmethod]
    fn uniform(step: u64, bins: usize) -> PyResult<Self> {
        sqgt_core::Thresholds::uniform(step, bins).map(Self).map_err(err)
    }

    fn quantize(&self, value: u64) -> PyResult<usize> {
        self.0.quantize(value).map_err(err)
    }

    #[getter]
    fn bins(&self) -> usize {
        self.0.bins()
    }

    #[getter]
    fn eta(&self) -> Vec<u64> {
        self.0.as_slice().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Thresholds({:?})", self.0.as_slice())
    }
}

#[pyclass(name = "Sequence", module = "sqgt", frozen)]
struct PySequence(sqgt_core::MultiplierSequence);

#[pymethods]
impl PySequence {
    /// Verifies `values` as a `kind` sequence (`quantized-bh`, `sqlo-s`,
    /// `sqlo-l`) for subsets of up to `h` elements.
    #[new]
    fn new(values: Vec<u64>, kind_name: &str, h: usize, thresholds: &PyThresholds) -> PyResult<Self> {
        sqgt_core::MultiplierSequence::new(values, kind(kind_name)?, h, thresholds.0.clone())
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn values(&self) -> Vec<u64> {
        self.0.values().to_vec()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    #[getter]
    fn h(&self) -> usize {
        self.0.h()
    }

    #[getter]
    fn thresholds(&self) -> PyThresholds {
        PyThresholds(self.0.thresholds().clone())
    }

    /// Indices of the unique subset of at most `d` elements summing to `beta`.
    fn solve(&self, d: usize, beta: u64) -> PyResult<Option<Vec<usize>>> {
        sequences::knapsack_solve(&self.0, d, beta).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        sqgt_core::MultiplierSequence::from_json(text).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Sequence({:?}, kind={}, h={})", self.0.values(), self.0.kind(), self.0.h())
    }
}

#[pyclass(name = "BaseCode", module = "sqgt", frozen)]
struct PyBaseCode(sqgt_core::BinaryDisjunctCode);

#[pymethods]
impl PyBaseCode {
    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        identity_code(n, 0).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (q_field, k, d=None))]
    fn kautz_singleton(q_field: u64, k: usize, d: Option<usize>) -> PyResult<Self> {
        kautz_singleton(q_field, k, d).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (m, n, d, e, seed, density=None))]
    fn random(m: usize, n: usize, d: usize, e: usize, seed: u64, density: Option<f64>) -> PyResult<Self> {
        random_code(m, n, d, e, density, seed, DEFAULT_ATTEMPTS).map(Self).map_err(err)
    }

    /// A user matrix, accepted only if it is `d`-disjunct with `e` errors.
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<u64>>, d: usize, e: usize) -> PyResult<Self> {
        let matrix = Matrix::from_rows(&rows, 2).map_err(err)?;
        sqgt_core::BinaryDisjunctCode::from_matrix(matrix, d, e).map(Self).map_err(err)
    }

    fn verify(&self, d: usize, e: usize) -> bool {
        verify_disjunct(self.0.matrix(), d, e)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn e(&self) -> usize {
        self.0.e()
    }

    fn __repr__(&self) -> String {
        format!("BaseCode(m={}, n={}, d={}, e={})", self.0.m(), self.0.n(), self.0.d(), self.0.e())
    }
}

#[pyclass(name = "Code", module = "sqgt", frozen)]
struct PyCode(sqgt_core::SqgtCode);

impl PyCode {
    fn outcome(&self, y: Vec<usize>) -> PyResult<TestOutcome> {
        if y.len() != self.0.m() {
            return Err(SqgtError::new_err(format!("result has {} entries, code has {} rows", y.len(), self.0.m())));
        }
        Ok(TestOutcome::clean(y))
    }
}

#[pymethods]
impl PyCode {
    /// Concatenates `sequence[i] * base` for each multiplier.
    #[staticmethod]
    #[pyo3(signature = (base, sequence, d, mode="strict"))]
    fn build(base: &PyBaseCode, sequence: &PySequence, d: usize, mode: &str) -> PyResult<Self> {
        let mode: HeadroomMode = mode.parse().map_err(err)?;
        build(&base.0, &sequence.0, sequence.0.thresholds(), d, mode).map(Self).map_err(err)
    }

    /// Reloads a code from the matrix text and sidecar JSON the CLI writes.
    #[staticmethod]
    fn from_parts(matrix_text: &str, sidecar_json: &str) -> PyResult<Self> {
        sqgt_core::SqgtCode::from_parts(matrix_text, sidecar_json).map(Self).map_err(err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn q(&self) -> u64 {
        self.0.q()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn e(&self) -> usize {
        self.0.e()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.0.m()).map(|r| self.0.matrix().row(r).to_vec()).collect()
    }

    fn matrix_text(&self) -> String {
        self.0.matrix().to_text()
    }

    fn sidecar_json(&self) -> String {
        self.0.sidecar_json()
    }

    fn syndrome(&self, defectives: Vec<usize>) -> PyResult<Vec<usize>> {
        let set = DefectiveSet::new(defectives, &self.0).map_err(err)?;
        syndrome(&self.0, &set).map(|o| o.y).map_err(err)
    }

    /// Changes `e` random entries, or the given `(row, bin)` pairs.
    #[pyo3(signature = (y, e=0, seed=0, changes=None))]
    fn inject(&self, y: Vec<usize>, e: usize, seed: u64, changes: Option<Vec<(usize, usize)>>) -> PyResult<Vec<usize>> {
        let clean = self.outcome(y)?;
        let bins = self.0.thresholds().bins();
        let out = match changes {
            Some(list) => inject_explicit(&clean, &list, bins).map_err(err)?,
            None => inject_random(&clean, e, bins, seed),
        };
        Ok(out.y)
    }

    /// Recovered defective columns, ascending.
    fn decode(&self, y: Vec<usize>) -> PyResult<Vec<usize>> {
        decode(&self.outcome(y)?, &self.0).map(|r| r.defectives).map_err(err)
    }

    #[pyo3(signature = (l=1, u=None, e=None))]
    fn verify_separable(&self, l: usize, u: Option<usize>, e: Option<usize>) -> PyResult<bool> {
        verify_sq_separable(&self.0, l, u.unwrap_or(self.0.d()), e.unwrap_or(self.0.e())).map_err(err)
    }

    /// Exhaustive round trip, or `samples` random patterns per set when `seed` is given.
    #[pyo3(signature = (injected=None, seed=None, samples=16, budget=DEFAULT_CASE_BUDGET))]
    fn simulate(
        &self,
        py: Python<'_>,
        injected: Option<usize>,
        seed: Option<u64>,
        samples: usize,
        budget: u128,
    ) -> PyResult<Py<PyAny>> {
        let config = CampaignConfig {
            injected: injected.unwrap_or(self.0.e()),
            errors: match seed {
                Some(seed) => CampaignErrors::Random { seed, samples },
                None => CampaignErrors::Exhaustive,
            },
            budget,
            timing: false,
        };
        let summary = py.detach(|| run_campaign(&self.0, &config)).map_err(err)?;
        json_to_py(py, &serde_json::to_string(&summary).expect("summary serializes"))
    }

    fn __repr__(&self) -> String {
        format!(
            "Code(m={}, n={}, kind={}, d={}, e={})",
            self.0.m(),
            self.0.n(),
            self.0.kind(),
            self.0.d(),
            self.0.e()
        )
    }
}

#[pyfunction]
fn greedy_generate(thresholds: &PyThresholds, h: usize, k: usize, kind_name: &str) -> PyResult<PySequence> {
    sequences::greedy_generate(&thresholds.0, h, k, kind(kind_name)?).map(PySequence).map_err(err)
}

/// `(passed, first violation or None)`.
#[pyfunction]
fn check_sequence(values: Vec<u64>, thresholds: &PyThresholds, h: usize, kind_name: &str) -> PyResult<(bool, Option<String>)> {
    let report = sequences::check_sequence(&values, &thresholds.0, h, kind(kind_name)?).map_err(err)?;
    Ok((report.pass, report.first_violation))
}

#[pyfunction]
fn gamma_bound(h: usize) -> PyResult<f64> {
    sequences::gamma_bound(h).map_err(err)
}

#[pyfunction]
fn feasibility(py: Python<'_>, n: u64, d: usize, k: usize, h: usize, q: u64, thresholds: &PyThresholds) -> PyResult<Py<PyAny>> {
    let report = feasibility_report(n, d, k, h, q, &thresholds.0);
    json_to_py(py, &serde_json::to_string(&report).expect("report serializes"))
}

#[pymodule]
fn sqgt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SqgtError", m.py().get_type::<SqgtError>())?;
    m.add("DecodingFailure", m.py().get_type::<DecodingFailure>())?;
    m.add_class::<PyThresholds>()?;
    m.add_class::<PySequence>()?;
    m.add_class::<PyBaseCode>()?;
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(greedy_generate, m)?)?;
    m.add_function(wrap_pyfunction!(check_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_bound, m)?)?;
    m.add_function(wrap_pyfunction!(feasibility, m)?)?;
    Ok(())
}
