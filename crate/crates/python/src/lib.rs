//! Python bindings: permutations of the 2k symbols, exact Weingarten values and
//! moments, the graph-model index count, the class census and the sampler.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use twisted_coe::classify::{census, regular_identity_check, verify_lemmas, DEFAULT_SAMPLE_CAP};
use twisted_coe::graphmodel::{self, DEFAULT_ORACLE_BUDGET};
use twisted_coe::moments::{coe_moment, tail_check, EnumOptions, MomentReport};
use twisted_coe::montecarlo::{empirical_moment, SampleConfig};
use twisted_coe::twist::Twist;
use twisted_coe::weingarten::{tables_up_to, Ensemble};
use twisted_coe::{Partition, Permutation, RationalFunction};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, num: &BigInt, den: &BigInt) -> PyResult<Bound<'py, PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    let parse = |x: &BigInt| -> PyResult<Bound<'py, PyAny>> { py.get_type::<pyo3::types::PyInt>().call1((x.to_string(),)) };
    cls.call1((parse(num)?, parse(den)?))
}

/// A permutation of the symbols `1..k, ~1..~k`.
#[pyclass(name = "Permutation", module = "twisted_coe", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyPermutation(Permutation);

#[pymethods]
impl PyPermutation {
    /// Parse cycle notation such as `"(1 ~1)(2 3)"`; `"()"` is the identity.
    #[new]
    fn new(cycles: &str, k: usize) -> PyResult<Self> {
        Permutation::parse_cycles(cycles, k).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn identity(k: usize) -> PyResult<Self> {
        Permutation::from_images(k, &(0..2 * k).collect::<Vec<_>>()).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn from_images(k: usize, images: Vec<usize>) -> PyResult<Self> {
        Permutation::from_images(k, &images).map(Self).map_err(value_err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    /// Images of slots `0..2k`, where symbol `b` is slot `2(b-1)` and `~b` is `2(b-1)+1`.
    fn images(&self) -> Vec<usize> {
        (0..self.0.slots()).map(|i| self.0.apply(i)).collect()
    }

    /// `self ∘ other` (apply `other` first).
    fn compose(&self, other: &Self) -> PyResult<Self> {
        self.0.compose(&other.0).map(Self).map_err(value_err)
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn commutator(&self, other: &Self) -> PyResult<Self> {
        self.0.commutator(&other.0).map(Self).map_err(value_err)
    }

    fn is_regular(&self) -> bool {
        self.0.is_regular()
    }

    /// Half-types of `[ω, T]` and `[ω, Q]` as lists of parts.
    fn half_types(&self) -> (Vec<usize>, Vec<usize>) {
        let report = graphmodel::cycle_report(&self.0);
        (report.alpha().parts().to_vec(), report.beta().parts().to_vec())
    }

    fn __str__(&self) -> String {
        self.0.render_cycles()
    }

    fn __repr__(&self) -> String {
        format!("Permutation({:?}, k={})", self.0.render_cycles(), self.0.k())
    }
}

/// An exact rational function of `N`.
#[pyclass(name = "RationalFunction", module = "twisted_coe", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyRationalFunction(RationalFunction);

#[pymethods]
impl PyRationalFunction {
    /// Exact value at integer `N` as a `fractions.Fraction`.
    fn eval<'py>(&self, py: Python<'py>, n: i64) -> PyResult<Bound<'py, PyAny>> {
        let v = self.0.eval(&BigInt::from(n)).map_err(value_err)?;
        fraction(py, v.numer(), v.denom())
    }

    fn eval_float(&self, n: f64) -> f64 {
        self.0.eval_f64(n)
    }

    /// Coefficients of `N^-p` for `p = start, start+1, …` as `(start, [Fraction, …])`.
    fn series<'py>(&self, py: Python<'py>, order: usize) -> PyResult<(i64, Vec<Bound<'py, PyAny>>)> {
        let s = twisted_coe::exactalg::series_in_inverse_n(&self.0, order).map_err(value_err)?;
        let coeffs = s.coeffs.iter().map(|c| fraction(py, c.numer(), c.denom())).collect::<PyResult<_>>()?;
        Ok((s.start_power, coeffs))
    }

    /// Numerator and denominator coefficients, ascending in `N`.
    fn coefficients(&self) -> (Vec<String>, Vec<String>) {
        let show = |p: &twisted_coe::Polynomial| p.coeffs().iter().map(|c| c.to_string()).collect();
        (show(self.0.numer()), show(self.0.denom()))
    }

    fn __str__(&self) -> String {
        self.0.render_factored()
    }

    fn __repr__(&self) -> String {
        format!("RationalFunction({})", self.0.render_factored())
    }
}

/// Result of an exact moment computation.
#[pyclass(name = "MomentReport", module = "twisted_coe", frozen)]
struct PyMomentReport(MomentReport);

#[pymethods]
impl PyMomentReport {
    #[getter]
    fn k(&self) -> usize {
        self.0.k
    }

    #[getter]
    fn moment(&self) -> PyRationalFunction {
        PyRationalFunction(self.0.moment.clone())
    }

    /// `{(alpha_parts, m): count}` over contributing permutations.
    #[getter]
    fn counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        for ((a, m), c) in &self.0.counts {
            out.set_item((PyTuple::new(py, a.parts())?, *m), *c)?;
        }
        Ok(out)
    }

    /// The `1/N`, `1/N^2`, `1/N^3` coefficients of `M_k(N) - k`.
    fn tail<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let t = tail_check(&self.0).map_err(runtime_err)?;
        [t.c1, t.c2, t.c3].iter().map(|c| fraction(py, c.numer(), c.denom())).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(runtime_err)
    }

    fn __repr__(&self) -> String {
        format!("MomentReport(k={}, moment={})", self.0.k, self.0.moment)
    }
}

fn parse_ensemble(s: &str) -> PyResult<Ensemble> {
    s.parse().map_err(value_err)
}

/// Weingarten value for the given ensemble (`"cue"` or `"coe"`) and cycle type.
#[pyfunction]
fn weingarten(ensemble: &str, partition: Vec<usize>) -> PyResult<PyRationalFunction> {
    let ensemble = parse_ensemble(ensemble)?;
    let lambda = Partition::new(partition).map_err(value_err)?;
    if lambda.weight() == 0 {
        return Err(PyValueError::new_err("empty partition"));
    }
    let tables = tables_up_to(ensemble, lambda.weight()).map_err(value_err)?;
    let value = tables[lambda.weight() - 1].get(&lambda).map_err(value_err)?;
    Ok(PyRationalFunction(value.clone()))
}

/// Exact `M_k(N)` by enumeration of `S_2k`.
#[pyfunction]
#[pyo3(signature = (k, coset_speedup = true, series_order = 4))]
fn moment(py: Python<'_>, k: usize, coset_speedup: bool, series_order: usize) -> PyResult<PyMomentReport> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be at least 1"));
    }
    py.detach(|| {
        let tables = tables_up_to(Ensemble::Coe, k).map_err(value_err)?;
        let opts = EnumOptions { coset_speedup, ..Default::default() };
        coe_moment(k, &tables[k - 1], series_order, &opts).map(PyMomentReport).map_err(value_err)
    })
}

/// `(chi, m)` with `Φ(ω) = chi · N^m`.
#[pyfunction]
fn phi(omega: &PyPermutation) -> (bool, usize) {
    let p = graphmodel::phi(&omega.0);
    (p.chi, p.half_ell_q)
}

/// Brute-force count of admissible index assignments for the given twist.
#[pyfunction]
#[pyo3(signature = (omega, n, twist = "grand", budget = DEFAULT_ORACLE_BUDGET))]
fn phi_oracle(omega: &PyPermutation, n: usize, twist: &str, budget: u64) -> PyResult<u64> {
    let twist: Twist = twist.parse().map_err(value_err)?;
    let p = twist.permutation(n).map_err(value_err)?;
    graphmodel::phi_oracle(&omega.0, &p, budget).map_err(value_err)
}

/// Graphviz text for the graph model of `omega`.
#[pyfunction]
fn graph_dot(omega: &PyPermutation) -> String {
    graphmodel::build_graph(&omega.0).export_dot()
}

/// Class sizes `{(regular, alpha, beta): count}` over contributing permutations of `S_2k`.
#[pyfunction]
fn class_census(py: Python<'_>, k: usize) -> PyResult<Bound<'_, PyDict>> {
    let c = py.detach(|| census(k, 1, false, None)).map_err(value_err)?;
    let out = PyDict::new(py);
    for (key, e) in &c.table {
        let alpha = PyTuple::new(py, key.alpha.parts())?;
        let beta = PyTuple::new(py, key.beta.parts())?;
        out.set_item((key.regular, alpha, beta), e.count)?;
    }
    Ok(out)
}

/// Runs the classification checks; returns `(all_pass, failing clause names, identity total)`.
#[pyfunction]
fn verify_classification(py: Python<'_>, k: usize) -> PyResult<(bool, Vec<String>, i64)> {
    let c = py.detach(|| census(k, DEFAULT_SAMPLE_CAP, false, None)).map_err(value_err)?;
    let report = verify_lemmas(&c);
    let failing = report.clauses.iter().filter(|cl| !cl.passed).map(|cl| cl.clause.clone()).collect();
    Ok((report.all_pass(), failing, regular_identity_check(&c).total))
}

/// Monte Carlo estimate of `<|Tr(P U)^k|^2>`; returns a dict with mean, std_error,
/// samples, reference and z_score.
#[pyfunction]
#[pyo3(signature = (k, n, samples = 20_000, seed = 7, twist = "grand", ensemble = "coe"))]
fn estimate<'py>(
    py: Python<'py>,
    k: usize,
    n: usize,
    samples: u64,
    seed: u64,
    twist: &str,
    ensemble: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = SampleConfig {
        k,
        n,
        samples,
        seed,
        twist: twist.parse().map_err(value_err)?,
        ensemble: parse_ensemble(ensemble)?,
    };
    let r = py.detach(|| empirical_moment(&cfg)).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("mean", r.mean)?;
    d.set_item("std_error", r.std_error)?;
    d.set_item("samples", r.samples)?;
    d.set_item("reference", r.reference)?;
    d.set_item("z_score", r.z_score)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "twisted_coe")]
fn twisted_coe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPermutation>()?;
    m.add_class::<PyRationalFunction>()?;
    m.add_class::<PyMomentReport>()?;
    m.add_function(wrap_pyfunction!(weingarten, m)?)?;
    m.add_function(wrap_pyfunction!(moment, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(phi_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(graph_dot, m)?)?;
    m.add_function(wrap_pyfunction!(class_census, m)?)?;
    m.add_function(wrap_pyfunction!(verify_classification, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    Ok(())
}
