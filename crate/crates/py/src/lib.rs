//! Python bindings. Coefficients cross the boundary as `fractions.Fraction`,
//! trees as their bracket strings and matrices as nested lists.

use std::collections::BTreeMap;
use std::fmt::Display;

use premagnus::freelie::{self, ExpansionPoint, LieElement};
use premagnus::numeric::{self, IntegratorConfig, Problem};
use premagnus::{gl, magnus, prelie, trees, Error, LinComb};
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, q: &premagnus::Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((q.to_string(),))
}

fn comb_dict<'py, K: Ord + Clone + Display>(py: Python<'py>, x: &LinComb<K>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (k, c) in x.iter() {
        d.set_item(k.to_string(), fraction(py, c)?)?;
    }
    Ok(d)
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

#[pyclass(module = "premagnus_py", frozen, eq, ord, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Rational(premagnus::Rational);

#[pymethods]
impl Rational {
    #[new]
    #[pyo3(signature = (value, denom=1))]
    fn new(value: &Bound<'_, PyAny>, denom: i64) -> PyResult<Self> {
        if denom == 0 {
            return Err(PyZeroDivisionError::new_err("zero denominator"));
        }
        let q = if let Ok(n) = value.extract::<i64>() {
            premagnus::Rational::new(n, denom)
        } else {
            let s: String = value.str()?.extract()?;
            let q: premagnus::Rational = parse(&s)?;
            q / premagnus::Rational::from_integer(denom)
        };
        Ok(Rational(q))
    }

    fn __add__(&self, o: &Self) -> Self {
        Rational(self.0.clone() + o.0.clone())
    }

    fn __sub__(&self, o: &Self) -> Self {
        Rational(self.0.clone() - o.0.clone())
    }

    fn __mul__(&self, o: &Self) -> Self {
        Rational(self.0.clone() * o.0.clone())
    }

    fn __truediv__(&self, o: &Self) -> PyResult<Self> {
        if o.0.is_zero() {
            return Err(PyZeroDivisionError::new_err("division by zero"));
        }
        Ok(Rational(self.0.clone() / o.0.clone()))
    }

    fn __neg__(&self) -> Self {
        Rational(-self.0.clone())
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Rational('{}')", self.0)
    }

    fn to_fraction<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0)
    }
}

/// A non-planar rooted tree in canonical form.
#[pyclass(module = "premagnus_py", frozen, eq, ord, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Tree(trees::Tree);

#[pymethods]
impl Tree {
    #[new]
    fn new(s: &str) -> PyResult<Self> {
        Ok(Tree(parse(s)?))
    }

    #[staticmethod]
    fn ladder(n: usize) -> Self {
        Tree(trees::Tree::ladder(n))
    }

    #[staticmethod]
    fn star(k: usize) -> Self {
        Tree(trees::Tree::star(k))
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    /// Sum of the decorations, undecorated vertices counting one.
    #[getter]
    fn decorated_degree(&self) -> usize {
        self.0.decorated_degree()
    }

    fn children(&self) -> Vec<Tree> {
        self.0.children().iter().cloned().map(Tree).collect()
    }

    /// `self → other` as a dict of tree strings to coefficients.
    fn graft<'py>(&self, py: Python<'py>, other: &Tree) -> PyResult<Bound<'py, PyDict>> {
        comb_dict(py, &prelie::graft(&self.0, &other.0))
    }

    fn phi(&self) -> PyResult<String> {
        Ok(freelie::lie_to_text(&freelie::phi(&self.0).map_err(err)?, "a"))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Tree('{}')", self.0)
    }
}

#[pyfunction]
fn bernoulli(m: usize) -> Rational {
    Rational(premagnus::bernoulli(m))
}

/// `γ` of a planar tree given as a bracket string.
#[pyfunction]
fn gamma(tree: &str) -> PyResult<Rational> {
    Ok(Rational(magnus::gamma(&parse(tree)?)))
}

#[pyfunction]
#[pyo3(signature = (n, e1=false))]
fn enumerate_planar(n: usize, e1: bool) -> PyResult<Vec<String>> {
    let ts = if e1 { trees::enumerate_e1(n) } else { trees::enumerate_planar(n) }.map_err(err)?;
    Ok(ts.iter().map(|t| t.to_string()).collect())
}

#[pyfunction]
fn enumerate_nonplanar(n: usize) -> PyResult<Vec<Tree>> {
    let mut v: Vec<trees::Tree> = trees::enumerate_planar(n).map_err(err)?.iter().map(trees::canonicalize).collect();
    v.sort();
    v.dedup();
    Ok(v.into_iter().map(Tree).collect())
}

/// Planar e1-tree coefficients of the degree-`n` component.
#[pyfunction]
fn magnus_planar<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let table = magnus::magnus_theorem4(n).map_err(err)?;
    let d = PyDict::new(py);
    for (t, c) in &table.planar_terms {
        d.set_item(t.to_string(), fraction(py, c)?)?;
    }
    Ok(d)
}

/// Degree-`n` component in the non-planar basis via `method` in
/// `{"nonplanar", "recursion", "gl-log"}`.
#[pyfunction]
#[pyo3(signature = (n, method="recursion"))]
fn magnus_component<'py>(py: Python<'py>, n: usize, method: &str) -> PyResult<Bound<'py, PyDict>> {
    let x = match method {
        "nonplanar" => magnus::magnus_theorem4(n).map(|t| t.nonplanar),
        "recursion" => magnus::magnus_recursion(n),
        "gl-log" => gl::log_star_component(n),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(err)?;
    comb_dict(py, &x)
}

#[pyfunction]
fn term_counts(n: usize) -> PyResult<(usize, usize, Option<usize>)> {
    let c = magnus::term_counts(n).map_err(err)?;
    Ok((c.e1_count, c.nonplanar_support, c.reduced_count))
}

fn lie_dict<'py>(py: Python<'py>, x: &LieElement, letter: &str) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (w, c) in x.iter() {
        let key: Vec<String> = w.letters().iter().map(|i| format!("{letter}{i}")).collect();
        d.set_item(key.join("."), fraction(py, c)?)?;
    }
    Ok(d)
}

/// Degree-`n` Lie component over letters `a_i`, keyed by Lyndon word.
/// Indices absent from `lambdas` are set to zero.
#[pyfunction]
#[pyo3(signature = (n, lambdas=None))]
fn magnus_lie<'py>(
    py: Python<'py>,
    n: usize,
    lambdas: Option<BTreeMap<u32, Rational>>,
) -> PyResult<Bound<'py, PyDict>> {
    let lambdas = lambdas.map(|m| m.into_iter().map(|(k, v)| (k, v.0)).collect::<BTreeMap<_, _>>());
    lie_dict(py, &freelie::magnus_lie(n, lambdas.as_ref()).map_err(err)?, "a")
}

/// `[Ω_1, ..., Ω_k]` over letters `q_i`, truncated at total weight `cap`.
#[pyfunction]
#[pyo3(signature = (k, cap, point="midpoint"))]
fn classical_magnus<'py>(py: Python<'py>, k: usize, cap: usize, point: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let point = match point {
        "midpoint" => ExpansionPoint::Midpoint,
        "left" => ExpansionPoint::Left,
        other => return Err(PyValueError::new_err(format!("unknown expansion point {other:?}"))),
    };
    freelie::classical_magnus_all(k, cap, point).map_err(err)?.iter().map(|x| lie_dict(py, x, "q")).collect()
}

/// Lyndon basis sizes per degree up to `n`.
#[pyfunction]
fn graded_dimension(n: usize) -> Vec<usize> {
    freelie::graded_dimension(n).by_degree
}

fn problem(name: &str) -> PyResult<Problem> {
    Problem::from_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown problem {name:?}")))
}

fn rows(m: &numeric::Matrix) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

type Rows = Vec<Vec<f64>>;

/// Times and states of the Magnus integrator on a built-in problem.
#[pyfunction]
#[pyo3(signature = (problem_name, order, steps, t_end=1.0))]
fn integrate(problem_name: &str, order: usize, steps: usize, t_end: f64) -> PyResult<(Vec<f64>, Vec<Rows>)> {
    let p = problem(problem_name)?;
    let cfg = IntegratorConfig { order, steps, t0: 0.0, t1: t_end };
    let traj = numeric::integrate(&|t| p.matrix(t), &cfg).map_err(err)?;
    Ok((traj.times.clone(), traj.states.iter().map(rows).collect()))
}

#[pyfunction]
#[pyo3(signature = (problem_name, order, steps, halvings=3, t_end=1.0))]
fn convergence_slopes(
    problem_name: &str,
    order: usize,
    steps: usize,
    halvings: usize,
    t_end: f64,
) -> PyResult<Vec<f64>> {
    numeric::convergence_slopes(problem(problem_name)?, order, steps, halvings, t_end).map_err(err)
}

#[pymodule]
fn premagnus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Rational>()?;
    m.add_class::<Tree>()?;
    m.add_function(wrap_pyfunction!(bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_planar, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_nonplanar, m)?)?;
    m.add_function(wrap_pyfunction!(magnus_planar, m)?)?;
    m.add_function(wrap_pyfunction!(magnus_component, m)?)?;
    m.add_function(wrap_pyfunction!(term_counts, m)?)?;
    m.add_function(wrap_pyfunction!(magnus_lie, m)?)?;
    m.add_function(wrap_pyfunction!(classical_magnus, m)?)?;
    m.add_function(wrap_pyfunction!(graded_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_slopes, m)?)?;
    Ok(())
}
