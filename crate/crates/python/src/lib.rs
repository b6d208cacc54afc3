//! Python bindings.

use std::path::PathBuf;

use num_bigint::BigInt;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyTuple};

use boundex_core::detection::{detect as run_detect, Budget, DetectionConfig, Strategy};
use boundex_core::distance::{self, OutputDistanceKind};
use boundex_core::io;
use boundex_core::oracle::{oracle_scan, OracleWindow};
use boundex_core::rank::rank as run_rank;
use boundex_core::summarize::{summarize_seeded, SummaryConfig};
use boundex_core::sut::{ExecutionOutcome, SutDescriptor};
use boundex_core::{BoundaryCandidate, Error, InputTuple, SutValue};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn value_from(obj: &Bound<'_, PyAny>) -> PyResult<SutValue> {
    if obj.is_instance_of::<PyBool>() {
        Ok(SutValue::Bool(obj.extract()?))
    } else {
        Ok(SutValue::Int(obj.extract::<BigInt>()?))
    }
}

fn tuple_from(values: &Bound<'_, PyAny>) -> PyResult<InputTuple> {
    if let Ok(s) = values.extract::<String>() {
        return InputTuple::parse(&s).map_err(to_py);
    }
    let vs = values
        .try_iter()?
        .map(|v| value_from(&v?))
        .collect::<PyResult<Vec<_>>>()?;
    Ok(InputTuple::new(vs))
}

fn tuple_to<'py>(py: Python<'py>, t: &InputTuple) -> PyResult<Bound<'py, PyTuple>> {
    let items = t
        .values()
        .iter()
        .map(|v| match v {
            SutValue::Bool(b) => Ok(PyBool::new(py, *b).to_owned().into_any()),
            SutValue::Int(n) => Ok(n.into_pyobject(py)?.into_any()),
        })
        .collect::<PyResult<Vec<_>>>()?;
    PyTuple::new(py, items)
}

fn distance_kind(name: &str) -> PyResult<OutputDistanceKind> {
    name.parse().map_err(to_py)
}

/// Outcome of one execution: rendered text plus status.
#[pyclass(name = "Outcome", frozen, skip_from_py_object, module = "boundex")]
#[derive(Clone)]
pub struct PyOutcome(ExecutionOutcome);

#[pymethods]
impl PyOutcome {
    #[getter]
    fn text(&self) -> &str {
        self.0.text()
    }

    #[getter]
    fn valid(&self) -> bool {
        self.0.is_valid()
    }

    /// Error type name, or None for a valid outcome.
    #[getter]
    fn error_kind(&self) -> Option<&'static str> {
        self.0.error_kind().map(|k| k.type_name())
    }

    fn __repr__(&self) -> String {
        match self.0.error_kind() {
            None => format!("Outcome({:?})", self.0.text()),
            Some(_) => format!("Outcome(error={:?})", self.0.text()),
        }
    }
}

/// A built-in program under test, or an external command.
#[pyclass(name = "Sut", frozen, module = "boundex")]
pub struct PySut(SutDescriptor);

#[pymethods]
impl PySut {
    /// `name` is bytecount, bmi, bmi-class, date or `external:<cmd>`;
    /// `arity` only matters for external commands.
    #[new]
    #[pyo3(signature = (name, arity = 1))]
    fn new(name: &str, arity: usize) -> PyResult<Self> {
        SutDescriptor::from_name(name, arity).map(PySut).map_err(to_py)
    }

    #[getter]
    fn name(&self) -> &str {
        self.0.name()
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    #[getter]
    fn argument_types(&self) -> Vec<String> {
        self.0.argument_types().to_vec()
    }

    /// Runs the program on a sequence of ints/bools or a `a;b` string.
    fn execute(&self, inputs: &Bound<'_, PyAny>) -> PyResult<PyOutcome> {
        let t = tuple_from(inputs)?;
        if t.arity() != self.0.arity() {
            return Err(PyValueError::new_err(format!(
                "{} takes {} arguments, got {}",
                self.0.name(),
                self.0.arity(),
                t.arity()
            )));
        }
        Ok(PyOutcome(self.0.execute(&t)))
    }

    fn __call__(&self, inputs: &Bound<'_, PyAny>) -> PyResult<PyOutcome> {
        self.execute(inputs)
    }

    fn __repr__(&self) -> String {
        format!("Sut({:?})", self.0.name())
    }
}

#[pyclass(name = "Candidate", frozen, skip_from_py_object, module = "boundex")]
#[derive(Clone)]
pub struct PyCandidate(BoundaryCandidate);

#[pymethods]
impl PyCandidate {
    #[getter]
    fn i1<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyTuple>> {
        tuple_to(py, &self.0.i1)
    }

    #[getter]
    fn i2<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyTuple>> {
        tuple_to(py, &self.0.i2)
    }

    #[getter]
    fn o1(&self) -> PyOutcome {
        PyOutcome(self.0.o1.clone())
    }

    #[getter]
    fn o2(&self) -> PyOutcome {
        PyOutcome(self.0.o2.clone())
    }

    #[getter]
    fn validity(&self) -> &'static str {
        self.0.validity().as_str()
    }

    #[getter]
    fn key(&self) -> String {
        self.0.key()
    }

    /// Exact score as `(numerator, denominator)`.
    #[getter]
    fn score(&self) -> (BigInt, BigInt) {
        (self.0.score.numer().clone(), self.0.score.denom().clone())
    }

    #[getter]
    fn score_float(&self) -> f64 {
        self.0.score.to_f64()
    }

    fn __repr__(&self) -> String {
        format!(
            "Candidate({} -> {:?}, {} -> {:?}, {})",
            self.0.i1.render(),
            self.0.o1.text(),
            self.0.i2.render(),
            self.0.o2.text(),
            self.0.validity()
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.key().hash(&mut h);
        h.finish()
    }
}

fn unwrap_all(cs: Vec<PyRef<'_, PyCandidate>>) -> Vec<BoundaryCandidate> {
    cs.iter().map(|c| c.0.clone()).collect()
}

fn wrap_all(cs: Vec<BoundaryCandidate>) -> Vec<PyCandidate> {
    cs.into_iter().map(PyCandidate).collect()
}

#[pyfunction]
fn strlendist(a: &str, b: &str) -> usize {
    distance::strlendist(a, b)
}

#[pyfunction]
#[pyo3(signature = (a, b, n = 2))]
fn jaccard(a: &str, b: &str, n: usize) -> PyResult<f64> {
    if n == 0 {
        return Err(PyValueError::new_err("n-gram length must be positive"));
    }
    Ok(distance::jaccard_ngram(n, a, b))
}

#[pyfunction]
fn levenshtein(a: &str, b: &str) -> usize {
    distance::levenshtein(a, b)
}

/// Output distance over input distance for two executions of `sut`.
#[pyfunction]
#[pyo3(signature = (sut, a, b, distance = "strlen"))]
fn pdq(
    sut: &PySut,
    a: &Bound<'_, PyAny>,
    b: &Bound<'_, PyAny>,
    distance: &str,
) -> PyResult<f64> {
    let (ia, ib) = (tuple_from(a)?, tuple_from(b)?);
    let (oa, ob) = (sut.0.execute(&ia), sut.0.execute(&ib));
    distance::pdq(&ia, &oa, &ib, &ob, distance_kind(distance)?)
        .map(|s| s.to_f64())
        .map_err(to_py)
}

/// Searches for boundary candidates; give exactly one of `iterations` or
/// `seconds`.
#[pyfunction]
#[pyo3(signature = (sut, strategy = "bcs", iterations = None, seconds = None, seed = 0, distance = "strlen"))]
fn detect(
    py: Python<'_>,
    sut: &PySut,
    strategy: &str,
    iterations: Option<u64>,
    seconds: Option<f64>,
    seed: u64,
    distance: &str,
) -> PyResult<Vec<PyCandidate>> {
    let budget = match (iterations, seconds) {
        (Some(n), None) => Budget::Iterations(n),
        (None, Some(s)) => Budget::Seconds(s),
        _ => {
            return Err(PyValueError::new_err(
                "give exactly one of iterations or seconds",
            ))
        }
    };
    let strategy: Strategy = strategy.parse().map_err(to_py)?;
    let mut cfg = DetectionConfig::new(strategy, budget).with_seed(seed);
    cfg.output_distance = distance_kind(distance)?;
    let run = py
        .detach(|| run_detect(&sut.0, &cfg))
        .map_err(to_py)?;
    Ok(wrap_all(run.archive.into_entries()))
}

/// Adjacent pairs `(x, x + 1)` over `[start, stop]` with differing outputs.
#[pyfunction]
#[pyo3(signature = (sut, start, stop, distance = "strlen", force = false))]
fn oracle(
    py: Python<'_>,
    sut: &PySut,
    start: BigInt,
    stop: BigInt,
    distance: &str,
    force: bool,
) -> PyResult<Vec<PyCandidate>> {
    if sut.0.arity() != 1 {
        return Err(PyValueError::new_err("oracle scans one-argument programs"));
    }
    let d = distance_kind(distance)?;
    let window = OracleWindow::single(start, stop);
    py.detach(|| oracle_scan(&sut.0, &window, d, force))
        .map(wrap_all)
        .map_err(to_py)
}

/// Clusters candidates; returns the report as plain dicts and lists.
#[pyfunction]
#[pyo3(signature = (candidates, seed = 0, restarts = 100, max_k = 10))]
fn summarize<'py>(
    py: Python<'py>,
    candidates: Vec<PyRef<'py, PyCandidate>>,
    seed: u64,
    restarts: usize,
    max_k: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cs = unwrap_all(candidates);
    let cfg = SummaryConfig {
        restarts,
        max_k,
        ..SummaryConfig::default()
    };
    let report = py
        .detach(|| summarize_seeded(&cs, &[], &cfg, seed))
        .map_err(to_py)?;
    let text = serde_json::to_string(&report).map_err(|e| to_py(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Candidates sorted by descending score under `distance`, with the score.
#[pyfunction]
#[pyo3(signature = (candidates, distance = "jaccard2"))]
fn rank(
    candidates: Vec<PyRef<'_, PyCandidate>>,
    distance: &str,
) -> PyResult<Vec<(f64, PyCandidate)>> {
    let cs = unwrap_all(candidates);
    let ranked = run_rank(&cs, distance_kind(distance)?).map_err(to_py)?;
    Ok(ranked
        .into_iter()
        .map(|r| (r.pdq.to_f64(), PyCandidate(r.candidate)))
        .collect())
}

/// Reads a CSV or JSON archive.
#[pyfunction]
fn load_archive(path: PathBuf) -> PyResult<Vec<PyCandidate>> {
    io::load_archive(&path).map(wrap_all).map_err(to_py)
}

#[pyfunction]
fn save_csv(path: PathBuf, candidates: Vec<PyRef<'_, PyCandidate>>) -> PyResult<()> {
    io::save_csv(&path, &unwrap_all(candidates)).map_err(to_py)
}

#[pymodule]
fn boundex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySut>()?;
    m.add_class::<PyOutcome>()?;
    m.add_class::<PyCandidate>()?;
    m.add_function(wrap_pyfunction!(strlendist, m)?)?;
    m.add_function(wrap_pyfunction!(jaccard, m)?)?;
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(pdq, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(load_archive, m)?)?;
    m.add_function(wrap_pyfunction!(save_csv, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
