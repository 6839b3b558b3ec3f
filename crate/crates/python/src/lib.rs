//! Python bindings for `triangle_map`.
//!
//! Points are sequences whose entries are `float` (float mode) or `int`,
//! `fractions.Fraction` or `"p/q"` strings (exact mode). Exact results come
//! back as `Fraction`s. Structured reports come back as plain dicts with the
//! same keys as the `trimap` JSON payloads.

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat, PyList};
use serde::Serialize;

use triangle_map::cells::{self, Cell as CoreCell};
use triangle_map::combinatorics;
use triangle_map::mcf::{self, Flavor, SimplexPoint};
use triangle_map::measure::{self, ConstantMethod, Parallelism, SurveyParams};
use triangle_map::scalar::parse_rational;

fn err(e: triangle_map::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

enum Point {
    Float(SimplexPoint<f64>),
    Exact(SimplexPoint<BigRational>),
}

fn fraction(py: Python<'_>, q: &BigRational) -> PyResult<PyObject> {
    let cls = py.import_bound("fractions")?.getattr("Fraction")?;
    Ok(cls.call1((q.numer().clone(), q.denom().clone()))?.unbind())
}

fn parse_point(coords: &Bound<'_, PyAny>, exact: Option<bool>) -> PyResult<Point> {
    let items: Vec<Bound<'_, PyAny>> = coords.iter()?.collect::<PyResult<_>>()?;
    let exact = exact.unwrap_or_else(|| items.iter().any(|o| !o.is_instance_of::<PyFloat>()));
    if exact {
        let qs = items
            .iter()
            .map(|o| {
                let s = o.str()?.to_string();
                parse_rational(&s)
                    .ok_or_else(|| PyValueError::new_err(format!("not a rational: {s}")))
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Point::Exact(SimplexPoint::new(qs).map_err(err)?))
    } else {
        let fs = items
            .iter()
            .map(|o| o.extract::<f64>())
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Point::Float(SimplexPoint::new(fs).map_err(err)?))
    }
}

fn point_out(py: Python<'_>, p: &Point) -> PyResult<PyObject> {
    Ok(match p {
        Point::Float(x) => PyList::new_bound(py, x.coords()).into_any().unbind(),
        Point::Exact(x) => {
            let items = x
                .coords()
                .iter()
                .map(|q| fraction(py, q))
                .collect::<PyResult<Vec<_>>>()?;
            PyList::new_bound(py, items).into_any().unbind()
        }
    })
}

fn to_dict<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn flavor(name: &str) -> PyResult<Flavor> {
    match name {
        "fast" => Ok(Flavor::Fast),
        "slow" => Ok(Flavor::Slow),
        other => Err(PyValueError::new_err(format!("unknown flavor {other:?}"))),
    }
}

/// One step of the fast map: `(image, digit)`.
#[pyfunction]
#[pyo3(signature = (point, exact=None))]
fn fast_step(py: Python<'_>, point: &Bound<'_, PyAny>, exact: Option<bool>) -> PyResult<(PyObject, u64)> {
    let (image, b) = match parse_point(point, exact)? {
        Point::Float(x) => mcf::fast_step(&x).map(|(y, b)| (Point::Float(y), b)),
        Point::Exact(x) => mcf::fast_step(&x).map(|(y, b)| (Point::Exact(y), b)),
    }
    .map_err(err)?;
    Ok((point_out(py, &image)?, b))
}

/// One step of the slow map: `(image, bit)`.
#[pyfunction]
#[pyo3(signature = (point, exact=None))]
fn slow_step(py: Python<'_>, point: &Bound<'_, PyAny>, exact: Option<bool>) -> PyResult<(PyObject, u8)> {
    let (image, b) = match parse_point(point, exact)? {
        Point::Float(x) => mcf::slow_step(&x).map(|(y, b)| (Point::Float(y), b)),
        Point::Exact(x) => mcf::slow_step(&x).map(|(y, b)| (Point::Exact(y), b)),
    }
    .map_err(err)?;
    Ok((point_out(py, &image)?, b))
}

/// `{"symbols", "points", "terminated"}` for `steps` iterations.
#[pyfunction]
#[pyo3(signature = (point, steps, flavor="fast", exact=None))]
fn orbit(
    py: Python<'_>,
    point: &Bound<'_, PyAny>,
    steps: usize,
    flavor: &str,
    exact: Option<bool>,
) -> PyResult<PyObject> {
    let fl = self::flavor(flavor)?;
    let (symbols, points, terminated) = match parse_point(point, exact)? {
        Point::Float(x) => {
            let o = mcf::orbit(&x, steps, fl);
            (o.symbols, o.points.into_iter().map(Point::Float).collect::<Vec<_>>(), o.terminated)
        }
        Point::Exact(x) => {
            let o = mcf::orbit(&x, steps, fl);
            (o.symbols, o.points.into_iter().map(Point::Exact).collect(), o.terminated)
        }
    };
    let d = PyDict::new_bound(py);
    d.set_item("symbols", symbols)?;
    let pts = points.iter().map(|p| point_out(py, p)).collect::<PyResult<Vec<_>>>()?;
    d.set_item("points", pts)?;
    d.set_item("terminated", terminated)?;
    Ok(d.into_any().unbind())
}

/// First `steps` fast digits.
#[pyfunction]
#[pyo3(signature = (point, steps, exact=None))]
fn fast_digits(point: &Bound<'_, PyAny>, steps: usize, exact: Option<bool>) -> PyResult<Vec<u64>> {
    Ok(match parse_point(point, exact)? {
        Point::Float(x) => mcf::fast_digits(&x, steps).digits,
        Point::Exact(x) => mcf::fast_digits(&x, steps).digits,
    })
}

#[pyfunction]
fn fast_to_slow(digits: Vec<u64>) -> Vec<u8> {
    mcf::fast_to_slow(&mcf::DigitSequence::new(digits)).bits().to_vec()
}

#[pyfunction]
fn slow_to_fast(bits: Vec<u8>) -> PyResult<Vec<u64>> {
    let bits = mcf::BitSequence::new(bits).map_err(err)?;
    Ok(mcf::slow_to_fast(&bits).map_err(err)?.digits)
}

/// Exact cylinder cell of a fast digit prefix.
#[pyclass(name = "Cell", module = "triangle_map_py")]
#[derive(Clone)]
struct Cell {
    inner: CoreCell,
}

#[pymethods]
impl Cell {
    #[new]
    #[pyo3(signature = (n, digits=Vec::new()))]
    fn new(n: usize, digits: Vec<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: CoreCell::from_digits(n, &digits).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn digits(&self) -> Vec<u64> {
        self.inner.digits().to_vec()
    }

    /// Vertex columns `A_0, ..., A_n` as lists of ints.
    #[getter]
    fn vertices(&self) -> Vec<Vec<BigInt>> {
        self.inner.vertices().to_vec()
    }

    #[getter]
    fn norms(&self) -> Vec<BigInt> {
        self.inner.norms()
    }

    #[getter]
    fn determinant(&self) -> BigInt {
        self.inner.determinant()
    }

    #[getter]
    fn volume_weight(&self, py: Python<'_>) -> PyResult<PyObject> {
        fraction(py, &cells::volume_weight(&self.inner))
    }

    #[getter]
    fn slice_volume(&self) -> f64 {
        cells::slice_volume(&self.inner)
    }

    #[getter]
    fn diameter(&self) -> f64 {
        cells::cell_diameter(&self.inner)
    }

    fn is_unimodular(&self) -> bool {
        self.inner.is_unimodular()
    }

    fn extend(&self, digit: u64) -> Self {
        Self {
            inner: self.inner.extend(digit),
        }
    }

    #[pyo3(signature = (point, exact=None))]
    fn contains(&self, point: &Bound<'_, PyAny>, exact: Option<bool>) -> PyResult<bool> {
        match parse_point(point, exact)? {
            Point::Float(x) => cells::contains(&self.inner, &x),
            Point::Exact(x) => cells::contains(&self.inner, &x),
        }
        .map_err(err)
    }

    /// Exact zero-tail weight against its closed-form bound.
    #[pyo3(signature = (truncation=2000))]
    fn zero_tail_bound(&self, py: Python<'_>, truncation: u64) -> PyResult<PyObject> {
        to_dict(py, &cells::zero_tail_weight_bound(&self.inner, truncation).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Cell(n={}, digits={:?})", self.inner.n(), self.inner.digits())
    }
}

fn rational_arg(o: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    let s = o.str()?.to_string();
    parse_rational(&s).ok_or_else(|| PyValueError::new_err(format!("not a rational: {s}")))
}

/// Both sides of the partial-fraction identity as `Fraction`s.
#[pyfunction]
fn partial_fraction_sides(
    py: Python<'_>,
    n: u32,
    x: &Bound<'_, PyAny>,
    y: &Bound<'_, PyAny>,
) -> PyResult<(PyObject, PyObject)> {
    let (l, r) = combinatorics::partial_fraction_sides(n, &rational_arg(x)?, &rational_arg(y)?)
        .map_err(err)?;
    Ok((fraction(py, &l)?, fraction(py, &r)?))
}

/// Both sides of the signed multinomial-tree identity: `(tree sum, C(n,k)(-1)^k)`.
#[pyfunction]
fn tree_identity(n: u32, k: u32) -> PyResult<(BigInt, BigInt)> {
    Ok((
        combinatorics::tree_prefix_sum(n, k).map_err(err)?,
        combinatorics::signed_binomial(n, k),
    ))
}

#[pyfunction]
fn compositions(n: u32) -> PyResult<Vec<Vec<u32>>> {
    Ok(combinatorics::compositions_standard_order(n)
        .map_err(err)?
        .into_iter()
        .map(|c| c.parts)
        .collect())
}

#[pyfunction]
fn signed_row(n: u32) -> PyResult<Vec<BigInt>> {
    combinatorics::signed_row(n).map_err(err)
}

/// Normalizing constant `C_n` by `"series"` or `"quadrature"`.
#[pyfunction]
#[pyo3(signature = (n, method="series", budget=None, seed=measure::DEFAULT_SEED, workers=measure::DEFAULT_WORKERS))]
fn normalizing_constant(
    py: Python<'_>,
    n: usize,
    method: &str,
    budget: Option<u64>,
    seed: u64,
    workers: usize,
) -> PyResult<PyObject> {
    let m: ConstantMethod = method.parse().map_err(err)?;
    let budget = budget.unwrap_or(match m {
        ConstantMethod::Series => 1 << 30,
        ConstantMethod::Quadrature => 1_000_000,
    });
    let est = py
        .allow_threads(|| measure::normalizing_constant(n, m, budget, Parallelism::new(seed, workers)))
        .map_err(err)?;
    to_dict(py, &est)
}

#[pyfunction]
fn closed_form_constant(n: usize) -> PyResult<f64> {
    measure::closed_form_constant(n).map_err(err)
}

/// Invariant density of the fast (or slow) map at a float point.
#[pyfunction]
#[pyo3(signature = (point, flavor="fast"))]
fn density(point: Vec<f64>, flavor: &str) -> PyResult<f64> {
    let n = point.len();
    let kind = match self::flavor(flavor)? {
        Flavor::Fast => measure::DensityKind::fast(n),
        Flavor::Slow => measure::DensityKind::slow(n),
    };
    let x = SimplexPoint::new(point).map_err(err)?;
    measure::density(kind, &x).map_err(err)
}

/// Algebraic certificate for a purely periodic digit sequence.
#[pyfunction]
fn certify_periodic(py: Python<'_>, n: usize, period: Vec<u64>) -> PyResult<PyObject> {
    let cert = py.allow_threads(|| cells::certify_periodic(n, &period)).map_err(err)?;
    to_dict(py, &cert)
}

/// Zero-block survey over uniform random orbits.
#[pyfunction]
#[pyo3(signature = (n, samples=1000, orbit_length=1000, bound=0, block_length=None, seed=measure::DEFAULT_SEED, workers=measure::DEFAULT_WORKERS))]
#[allow(clippy::too_many_arguments)]
fn zero_block_survey(
    py: Python<'_>,
    n: usize,
    samples: usize,
    orbit_length: usize,
    bound: u64,
    block_length: Option<usize>,
    seed: u64,
    workers: usize,
) -> PyResult<PyObject> {
    let mut p = SurveyParams::new(n, samples, orbit_length, bound);
    if let Some(l) = block_length {
        p.block_length = l;
    }
    p.parallelism = Parallelism::new(seed, workers);
    let report = py.allow_threads(|| measure::zero_block_survey(&p)).map_err(err)?;
    to_dict(py, &report)
}

#[pymodule]
fn triangle_map_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Cell>()?;
    m.add_function(wrap_pyfunction!(fast_step, m)?)?;
    m.add_function(wrap_pyfunction!(slow_step, m)?)?;
    m.add_function(wrap_pyfunction!(orbit, m)?)?;
    m.add_function(wrap_pyfunction!(fast_digits, m)?)?;
    m.add_function(wrap_pyfunction!(fast_to_slow, m)?)?;
    m.add_function(wrap_pyfunction!(slow_to_fast, m)?)?;
    m.add_function(wrap_pyfunction!(partial_fraction_sides, m)?)?;
    m.add_function(wrap_pyfunction!(tree_identity, m)?)?;
    m.add_function(wrap_pyfunction!(compositions, m)?)?;
    m.add_function(wrap_pyfunction!(signed_row, m)?)?;
    m.add_function(wrap_pyfunction!(normalizing_constant, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_constant, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(certify_periodic, m)?)?;
    m.add_function(wrap_pyfunction!(zero_block_survey, m)?)?;
    m.add("DEFAULT_SEED", measure::DEFAULT_SEED)?;
    m.add("DEFAULT_WORKERS", measure::DEFAULT_WORKERS)?;
    Ok(())
}
