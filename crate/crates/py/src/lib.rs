//! Python bindings for weightfn-core.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use weightfn_core::blocks::{build_block, build_tilde_block, ArgList, BlockKind};
use weightfn_core::io::{latex_factored, latex_nc, latex_tensor, latex_weight_structure, to_json, WeightDoc};
use weightfn_core::ncalg::{nc_equal, NcExpr};
use weightfn_core::projection::{
    admissible_pairs as core_pairs, mode_expand, tau_ij, weight_minus_closed, weight_plus_closed,
    weight_plus_recursive, AdmissiblePair, Orientation, WeightExpr,
};
use weightfn_core::rmatrix::{assemble_r, cartan_coeff as core_cartan, pair_degree, RFactor};
use weightfn_core::series::FactoredRational;
use weightfn_core::verify::{run_suite, Params, Suite, SuiteReport};

fn err(e: weightfn_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn orientation(s: &str) -> PyResult<Orientation> {
    match s {
        "plus" => Ok(Orientation::Plus),
        "minus" => Ok(Orientation::Minus),
        _ => Err(PyValueError::new_err(format!("orientation must be 'plus' or 'minus', got {s:?}"))),
    }
}

/// A weight expression, either over projected currents or expanded into modes.
#[pyclass(name = "Weight", module = "weightfn", frozen)]
#[derive(Clone)]
pub struct PyWeight {
    expr: NcExpr,
    n: usize,
    depth: i64,
    orientation: Orientation,
    window: Option<i64>,
}

impl PyWeight {
    fn from_expr(w: WeightExpr) -> Self {
        PyWeight { n: w.n, depth: w.depth, orientation: w.orientation, window: None, expr: w.expr }
    }
}

#[pymethods]
impl PyWeight {
    #[getter]
    fn n(&self) -> usize {
        self.n
    }

    #[getter]
    fn depth(&self) -> i64 {
        self.depth
    }

    #[getter]
    fn orientation(&self) -> &'static str {
        match self.orientation {
            Orientation::Plus => "plus",
            Orientation::Minus => "minus",
        }
    }

    #[getter]
    fn window(&self) -> Option<i64> {
        self.window
    }

    #[getter]
    fn validity(&self) -> String {
        self.expr.validity().to_string()
    }

    /// (word, coefficient) pairs in canonical order.
    fn terms(&self) -> Vec<(String, String)> {
        self.expr.terms().iter().map(|(w, c)| (w.to_string(), c.to_string())).collect()
    }

    fn __len__(&self) -> usize {
        self.expr.len()
    }

    fn __str__(&self) -> String {
        self.expr.to_string()
    }

    fn __repr__(&self) -> String {
        format!("<Weight {} n={} depth={} terms={}>", self.orientation(), self.n, self.depth, self.expr.len())
    }

    /// Expand the projected currents into modes with window K.
    fn modes(&self, window: i64) -> PyResult<PyWeight> {
        if self.window.is_some() {
            return Err(PyValueError::new_err("already expanded into modes"));
        }
        let w = WeightExpr { expr: self.expr.clone(), n: self.n, depth: self.depth, orientation: self.orientation };
        let expr = mode_expand(&w, window).map_err(err)?;
        Ok(PyWeight { expr, window: Some(window), ..self.clone() })
    }

    /// Coefficientwise agreement on all grades up to `bound`.
    #[pyo3(signature = (other, bound=None))]
    fn equals(&self, other: &PyWeight, bound: Option<i64>) -> PyResult<bool> {
        nc_equal(&self.expr, &other.expr, bound.unwrap_or(self.depth.min(other.depth))).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&WeightDoc::new(self.orientation, self.n, self.depth, self.window, self.expr.clone())).map_err(err)
    }

    fn latex(&self) -> String {
        latex_nc(&self.expr)
    }
}

/// Closed form of the projection of f(z_1)…f(z_n).
#[pyfunction]
#[pyo3(signature = (sign, n, depth=4))]
fn weight(sign: &str, n: usize, depth: i64) -> PyResult<PyWeight> {
    let w = match orientation(sign)? {
        Orientation::Plus => weight_plus_closed(n, depth),
        Orientation::Minus => weight_minus_closed(n, depth),
    };
    Ok(PyWeight::from_expr(w.map_err(err)?))
}

/// The same projection computed by the commutation-relation recursion.
#[pyfunction]
#[pyo3(signature = (n, depth=4))]
fn weight_recursive(n: usize, depth: i64) -> PyResult<PyWeight> {
    Ok(PyWeight::from_expr(weight_plus_recursive(n, depth).map_err(err)?))
}

#[pyfunction]
fn latex_structure(n: usize, sign: &str) -> PyResult<String> {
    latex_weight_structure(n, orientation(sign)?).map_err(err)
}

#[pyfunction]
fn admissible_pairs(n: usize, r: usize, sign: &str) -> PyResult<Vec<(Vec<usize>, Vec<usize>)>> {
    Ok(core_pairs(n, r, orientation(sign)?).map_err(err)?.into_iter().map(|p| (p.i, p.j)).collect())
}

/// A rational coefficient in factored form.
#[pyclass(name = "Rational", module = "weightfn", frozen)]
pub struct PyRational {
    inner: FactoredRational,
}

#[pymethods]
impl PyRational {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn expand(&self, depth: i64) -> PyResult<Vec<(Vec<i32>, String)>> {
        let s = self.inner.expand(depth).map_err(err)?;
        Ok(s.terms().iter().map(|(a, c)| (a.to_vec(), c.to_string())).collect())
    }

    fn latex(&self) -> String {
        latex_factored(&self.inner)
    }

    fn __str__(&self) -> String {
        self.latex()
    }
}

/// One of the ρ, λ, μ, ν blocks; `tilde` selects the P⁻ variant.
#[pyfunction]
#[pyo3(signature = (kind, n, prefix, target, k, tilde=false))]
fn block(kind: &str, n: usize, prefix: Vec<usize>, target: usize, k: usize, tilde: bool) -> PyResult<PyRational> {
    let kind = match kind {
        "rho" => BlockKind::Rho,
        "lambda" => BlockKind::Lambda,
        "mu" => BlockKind::Mu,
        "nu" => BlockKind::Nu,
        _ => return Err(PyValueError::new_err(format!("unknown block {kind:?}"))),
    };
    let args = ArgList::new(prefix, target).map_err(err)?;
    let fr = if tilde { build_tilde_block(kind, &args, k, n) } else { build_block(kind, &args, k, n) };
    Ok(PyRational { inner: fr.map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (i, j, k, n, sign="plus"))]
fn tau(i: Vec<usize>, j: Vec<usize>, k: usize, n: usize, sign: &str) -> PyResult<PyRational> {
    let pair = AdmissiblePair::new(i, j, orientation(sign)?, n).map_err(err)?;
    Ok(PyRational { inner: tau_ij(&pair, k).map_err(err)? })
}

#[pyfunction]
fn cartan_coeff(n: i64) -> PyResult<String> {
    Ok(core_cartan(n).map_err(err)?.value.to_string())
}

/// Evaluate a Cartan coefficient at a rational q given as (num, den).
#[pyfunction]
fn cartan_coeff_at(n: i64, num: i64, den: i64) -> PyResult<String> {
    if den == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    let c = core_cartan(n).map_err(err)?.value;
    Ok(c.eval(&weightfn_core::qfield::rat(num, den)).map_err(err)?.to_string())
}

type Row = (i64, String, String, String);

/// The R-matrix factors as (label, rows); rows are (degree, left, right, coefficient).
#[pyfunction]
#[pyo3(signature = (order=1, depth=4, window=4))]
fn rmatrix(order: usize, depth: i64, window: i64) -> PyResult<Vec<(String, Vec<Row>)>> {
    let factors = assemble_r(order, depth, window).map_err(err)?;
    Ok(factors
        .iter()
        .map(|f| match f {
            RFactor::QHH => (f.label().to_string(), Vec::new()),
            RFactor::Tensor { label, tensor } => {
                let mut rows: Vec<Row> = tensor
                    .terms
                    .iter()
                    .map(|((l, r), c)| (pair_degree(l, r), l.to_string(), r.to_string(), c.to_string()))
                    .collect();
                rows.sort();
                (label.clone(), rows)
            }
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (order=1, depth=4, window=4))]
fn rmatrix_latex(order: usize, depth: i64, window: i64) -> PyResult<Vec<String>> {
    let factors = assemble_r(order, depth, window).map_err(err)?;
    Ok(factors
        .iter()
        .filter_map(|f| match f {
            RFactor::Tensor { tensor, .. } => Some(latex_tensor(tensor)),
            RFactor::QHH => None,
        })
        .collect())
}

/// Result of a verification suite.
#[pyclass(name = "Report", module = "weightfn", frozen)]
pub struct PyReport {
    inner: SuiteReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn suite(&self) -> String {
        self.inner.suite.to_string()
    }

    #[getter]
    fn cases(&self) -> usize {
        self.inner.cases
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    #[getter]
    fn failures(&self) -> Vec<(String, String)> {
        self.inner.failures.iter().map(|f| (f.case.clone(), f.detail.clone())).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("<Report {} cases={} failures={}>", self.suite(), self.inner.cases, self.inner.failures.len())
    }
}

#[pyfunction]
#[pyo3(signature = (suite, n=None, depth=None, window=None, seed=0, trials=None))]
fn verify(
    py: Python<'_>,
    suite: &str,
    n: Option<usize>,
    depth: Option<i64>,
    window: Option<i64>,
    seed: u64,
    trials: Option<usize>,
) -> PyResult<PyReport> {
    let suite: Suite = suite.parse().map_err(err)?;
    let params = Params { n, depth, window, seed, trials };
    let inner = py.allow_threads(|| run_suite(suite, &params));
    Ok(PyReport { inner })
}

#[pymodule]
fn weightfn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeight>()?;
    m.add_class::<PyRational>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(weight, m)?)?;
    m.add_function(wrap_pyfunction!(weight_recursive, m)?)?;
    m.add_function(wrap_pyfunction!(latex_structure, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(block, m)?)?;
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(cartan_coeff, m)?)?;
    m.add_function(wrap_pyfunction!(cartan_coeff_at, m)?)?;
    m.add_function(wrap_pyfunction!(rmatrix, m)?)?;
    m.add_function(wrap_pyfunction!(rmatrix_latex, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
