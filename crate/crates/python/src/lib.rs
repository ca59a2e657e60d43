//! Python bindings for the `qtbinom` core.
//!
//! Polynomials are exposed as `Poly` (coefficients become Python ints),
//! paths as `Path`, scramblers as `Scrambler`. Reports and traces cross the
//! boundary as plain dicts decoded from the core's JSON.

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;

use qtbinom::biject;
use qtbinom::identities::{self, RangeSpec, ReducedForm};
use qtbinom::lattice::{self, Gap, PathWord, Sweep, DEFAULT_LIMIT};
use qtbinom::{scramble, BiPoly};

fn err(e: qtbinom::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py_json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Poly", module = "pyqtbinom", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct Poly(BiPoly);

#[pymethods]
impl Poly {
    /// Builds a polynomial from `(q_exp, t_exp, coeff)` triples.
    #[new]
    #[pyo3(signature = (terms = Vec::new()))]
    fn new(terms: Vec<(u32, u32, BigInt)>) -> Self {
        let mut p = BiPoly::zero();
        for (q, t, c) in terms {
            p.add_term(q, t, c);
        }
        Poly(p)
    }

    /// `(q_exp, t_exp, coeff)` in ascending `(t, q)` order.
    fn terms(&self) -> Vec<(u32, u32, BigInt)> {
        self.0.terms().map(|(q, t, c)| (q, t, c.clone())).collect()
    }

    #[pyo3(signature = (q, t = 0))]
    fn coeff(&self, q: u32, t: u32) -> BigInt {
        self.0.coeff(q, t)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Coefficients of `t^k` as a dense list indexed by the power of `q`.
    #[pyo3(signature = (k = 0))]
    fn q_coeffs(&self, k: u32) -> Vec<BigInt> {
        self.0.t_coeff(k).to_dense()
    }

    #[pyo3(signature = (dq, dt = 0))]
    fn shift(&self, dq: u32, dt: u32) -> Poly {
        Poly(self.0.shift(dq, dt))
    }

    #[pyo3(signature = (q = false, t = false))]
    fn specialize(&self, q: bool, t: bool) -> Poly {
        Poly(self.0.specialize(q, t))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Poly> {
        BiPoly::from_json(text)
            .map(Poly)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_latex(&self) -> String {
        self.0.to_latex()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __add__(&self, other: &Poly) -> Poly {
        Poly(self.0.add(&other.0))
    }

    fn __sub__(&self, other: &Poly) -> Poly {
        Poly(self.0.sub(&other.0))
    }

    fn __mul__(&self, other: &Poly) -> Poly {
        Poly(self.0.mul(&other.0))
    }

    fn __neg__(&self) -> Poly {
        Poly(self.0.neg())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly('{}')", self.0)
    }
}

#[pyclass(name = "Scrambler", module = "pyqtbinom", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyScrambler(scramble::Scrambler);

#[pymethods]
impl PyScrambler {
    #[new]
    #[pyo3(signature = (h = Vec::new(), v = Vec::new()))]
    fn new(h: Vec<usize>, v: Vec<usize>) -> Self {
        PyScrambler(scramble::Scrambler::new(h, v))
    }

    /// Parses `"H=0,1;V=1,3"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyScrambler).map_err(err)
    }

    #[getter]
    fn h(&self) -> Vec<usize> {
        self.0.h().iter().copied().collect()
    }

    #[getter]
    fn v(&self) -> Vec<usize> {
        self.0.v().iter().copied().collect()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn r(&self) -> usize {
        self.0.r()
    }

    #[getter]
    fn s(&self) -> usize {
        self.0.s()
    }

    fn reduced(&self) -> Self {
        PyScrambler(self.0.reduced())
    }

    fn mirror(&self, m: usize, n: usize) -> Self {
        PyScrambler(self.0.mirror(m, n))
    }

    fn validate(&self, m: usize, n: usize) -> PyResult<()> {
        self.0.validate(m, n).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scrambler.parse('{}')", self.0)
    }
}

#[pyclass(name = "Path", module = "pyqtbinom", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyPath(PathWord);

fn scrambler_or_empty(o: Option<&PyScrambler>) -> scramble::Scrambler {
    o.map(|s| s.0.clone()).unwrap_or_default()
}

#[pymethods]
impl PyPath {
    #[new]
    fn new(word: &str) -> PyResult<Self> {
        word.parse().map(PyPath).map_err(err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn dees(&self) -> u32 {
        self.0.dees()
    }

    fn area(&self) -> u32 {
        self.0.area()
    }

    fn corners(&self) -> u32 {
        self.0.corners()
    }

    fn cindex(&self) -> u32 {
        self.0.cindex()
    }

    fn square_side(&self) -> u32 {
        self.0.square_side()
    }

    fn greedy_descent(&self) -> u32 {
        self.0.greedy_descent()
    }

    fn swap(&self, gap: usize) -> PyResult<Self> {
        self.0.swap(Gap(gap)).map(PyPath).map_err(err)
    }

    fn mirror(&self) -> Self {
        PyPath(self.0.mirror())
    }

    /// `(cindex, corners)` under the scrambler (empty if omitted).
    #[pyo3(signature = (scrambler = None))]
    fn scrambled(&self, scrambler: Option<&PyScrambler>) -> PyResult<(u32, u32)> {
        let o = scrambler_or_empty(scrambler);
        Ok((
            scramble::scrambled_cindex(&self.0, &o).map_err(err)?,
            scramble::scrambled_corners(&self.0, &o).map_err(err)?,
        ))
    }

    #[pyo3(signature = (scrambler = None))]
    fn marked_gaps(&self, scrambler: Option<&PyScrambler>) -> PyResult<Vec<usize>> {
        let o = scrambler_or_empty(scrambler);
        let gaps = scramble::marked_gaps(&self.0, &o).map_err(err)?;
        Ok(gaps.into_iter().map(|g| g.0).collect())
    }

    #[pyo3(signature = (scrambler = None))]
    fn render(&self, scrambler: Option<&PyScrambler>) -> PyResult<String> {
        match scrambler {
            Some(o) => o.0.render_ascii(&self.0).map_err(err),
            None => Ok(self.0.render_ascii()),
        }
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Path('{}')", self.0)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }
}

#[pyfunction]
fn qbinom(n: u32, k: i64) -> Poly {
    Poly(qtbinom::qbinom(n, k).into())
}

/// Every path of the `m x n` grid in lexicographic order.
#[pyfunction]
fn enumerate(m: usize, n: usize) -> PyResult<Vec<PyPath>> {
    Ok(lattice::enumerate(m, n).map_err(err)?.map(PyPath).collect())
}

/// `Σ q^{scrambled cindex} t^{scrambled corners}` by enumeration.
#[pyfunction]
#[pyo3(signature = (m, n, scrambler = None, jobs = 1))]
fn gf_scrambled(py: Python<'_>, m: usize, n: usize, scrambler: Option<&PyScrambler>, jobs: usize) -> PyResult<Poly> {
    let o = scrambler_or_empty(scrambler);
    let sweep = Sweep { limit: DEFAULT_LIMIT, jobs };
    py.detach(|| scramble::gf_scrambled(m, n, &o, sweep)).map(Poly).map_err(err)
}

#[pyfunction]
fn area_gf(m: usize, n: usize) -> PyResult<Poly> {
    lattice::area_gf(m, n, Sweep::serial()).map(Poly).map_err(err)
}

#[pyfunction]
fn qt_binomial(m: usize, n: usize) -> Poly {
    Poly(identities::qt_binomial(m, n))
}

#[pyfunction]
fn theorem_formula(m: usize, n: usize, scrambler: &PyScrambler) -> PyResult<Poly> {
    identities::theorem_formula(m, n, &scrambler.0).map(Poly).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, n, r, literal = false))]
fn reduced_formula(m: usize, n: usize, r: usize, literal: bool) -> PyResult<Poly> {
    let form = if literal { ReducedForm::Literal } else { ReducedForm::Corrected };
    identities::reduced_formula(m, n, r, form).map(Poly).map_err(err)
}

#[pyfunction]
fn vandermonde_standard(x: u32, y: u32, m: u32) -> Poly {
    Poly(identities::vandermonde_standard(x, y, m).into())
}

#[pyfunction]
fn vandermonde_symmetric(m: i64, n: i64, d: i64, r: i64) -> Poly {
    Poly(identities::vandermonde_symmetric(m, n, d, r).into())
}

#[pyfunction]
fn corner_restricted_gf(m: usize, n: usize, c: u32) -> Poly {
    Poly(identities::corner_restricted_gf(m, n, c).into())
}

/// Runs one identity sweep and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (identity, max_sum, min_side = 0, max_side = None, sample = None, seed = 0, jobs = 1))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    identity: &str,
    max_sum: usize,
    min_side: usize,
    max_side: Option<usize>,
    sample: Option<usize>,
    seed: u64,
    jobs: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let mut range = RangeSpec::new(max_sum).sides(min_side, max_side).jobs(jobs);
    if let Some(k) = sample {
        range = range.sample(k, seed);
    }
    let report = py
        .detach(|| identities::verify_identity(identity, &range))
        .map_err(err)?;
    to_py_json(py, &report.to_json())
}

/// Traces one lemma map; `lemma` is `lemma2`, `lemma2v` or `lemma2h`.
#[pyfunction]
#[pyo3(signature = (lemma, word, scrambler, ornament = None))]
fn bijection<'py>(
    py: Python<'py>,
    lemma: &str,
    word: &PyPath,
    scrambler: &PyScrambler,
    ornament: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let need = || ornament.ok_or_else(|| PyValueError::new_err(format!("{lemma} needs an ornament")));
    let t = match lemma {
        "lemma2" => biject::lemma2_trace(&word.0, &scrambler.0),
        "lemma2v" => biject::lemma2v_trace(&word.0, &scrambler.0, need()?),
        "lemma2h" => biject::lemma2h_trace(&word.0, &scrambler.0, need()?),
        other => return Err(PyValueError::new_err(format!("unknown lemma {other:?}"))),
    }
    .map_err(err)?;
    to_py_json(py, &serde_json::to_string(&t).expect("trace serializes"))
}

/// Image of `word` under the full unscrambling chain, with the reduced
/// scrambler.
#[pyfunction]
fn unscramble(word: &PyPath, scrambler: &PyScrambler) -> PyResult<(PyPath, PyScrambler)> {
    let (w, o) = biject::unscramble(&word.0, &scrambler.0).map_err(err)?;
    Ok((PyPath(w), PyScrambler(o)))
}

#[pyfunction]
fn prop3_construct(m: usize, n: usize, r: usize, c: usize) -> PyResult<Vec<PyPath>> {
    Ok(biject::prop3_construct(m, n, r, c)
        .map_err(err)?
        .into_iter()
        .map(PyPath)
        .collect())
}

#[pyfunction]
fn probe<'py>(py: Python<'py>, m: usize, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let report = identities::final_section_probe(m, n).map_err(err)?;
    to_py_json(py, &serde_json::to_string(&report).expect("report serializes"))
}

#[pymodule]
fn pyqtbinom(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Poly>()?;
    m.add_class::<PyScrambler>()?;
    m.add_class::<PyPath>()?;
    m.add_function(wrap_pyfunction!(qbinom, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(gf_scrambled, m)?)?;
    m.add_function(wrap_pyfunction!(area_gf, m)?)?;
    m.add_function(wrap_pyfunction!(qt_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_formula, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_formula, m)?)?;
    m.add_function(wrap_pyfunction!(vandermonde_standard, m)?)?;
    m.add_function(wrap_pyfunction!(vandermonde_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(corner_restricted_gf, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(bijection, m)?)?;
    m.add_function(wrap_pyfunction!(unscramble, m)?)?;
    m.add_function(wrap_pyfunction!(prop3_construct, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    Ok(())
}
