//! Python module `moment_decomp`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use moment_decomp::bridge::GroupDescriptor;
use moment_decomp::decomp::RowKind;
use moment_decomp::{self as md, GroupRef, StatType};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Size, mean and central power sums of orders 2 to 4.
#[pyclass(
    name = "PowerSums",
    module = "moment_decomp",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyPowerSums {
    inner: md::PowerSums,
}

#[pymethods]
impl PyPowerSums {
    #[new]
    #[pyo3(signature = (n=0, mean=0.0, ss=0.0, sc=0.0, sq=0.0))]
    fn new(n: u64, mean: f64, ss: f64, sc: f64, sq: f64) -> PyResult<Self> {
        let inner = if n == 0 {
            md::PowerSums::empty()
        } else {
            md::PowerSums::from_parts(n, mean, ss, sc, sq).map_err(value_error)?
        };
        Ok(PyPowerSums { inner })
    }

    #[staticmethod]
    fn from_sequence(xs: Vec<f64>) -> PyResult<Self> {
        md::PowerSums::from_sequence(&xs)
            .map(|inner| PyPowerSums { inner })
            .map_err(value_error)
    }

    /// Pools any number of groups.
    #[staticmethod]
    fn pool(groups: Vec<PyRef<'_, PyPowerSums>>) -> Self {
        PyPowerSums {
            inner: md::PowerSums::pool(groups.iter().map(|g| &g.inner)),
        }
    }

    #[getter]
    fn n(&self) -> u64 {
        self.inner.n()
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    #[getter]
    fn ss(&self) -> f64 {
        self.inner.ss()
    }

    #[getter]
    fn sc(&self) -> f64 {
        self.inner.sc()
    }

    #[getter]
    fn sq(&self) -> f64 {
        self.inner.sq()
    }

    fn push(&self, x: f64) -> PyResult<Self> {
        self.inner
            .push(x)
            .map(|inner| PyPowerSums { inner })
            .map_err(value_error)
    }

    fn merge(&self, other: &PyPowerSums) -> Self {
        PyPowerSums {
            inner: self.inner.merge(&other.inner),
        }
    }

    /// Removes a known subgroup, leaving the remainder.
    fn subtract(&self, known: &PyPowerSums) -> PyResult<Self> {
        self.inner
            .subtract(&known.inner)
            .map(|inner| PyPowerSums { inner })
            .map_err(value_error)
    }

    fn translate(&self, c: f64) -> Self {
        PyPowerSums {
            inner: self.inner.translate(c),
        }
    }

    fn __eq__(&self, other: &PyPowerSums) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "PowerSums(n={}, mean={:?}, ss={:?}, sc={:?}, sq={:?})",
            s.n(),
            s.mean(),
            s.ss(),
            s.sc(),
            s.sq()
        )
    }
}

/// Size, mean and central power sums of orders 2 to `max_order`.
#[pyclass(
    name = "PowerSumsN",
    module = "moment_decomp",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyPowerSumsN {
    inner: md::PowerSumsN,
}

fn wrap_n(r: md::Result<md::PowerSumsN>) -> PyResult<PyPowerSumsN> {
    r.map(|inner| PyPowerSumsN { inner }).map_err(value_error)
}

#[pymethods]
impl PyPowerSumsN {
    /// `sums` lists the central sums of orders 2, 3, ... in turn.
    #[new]
    fn new(n: u64, mean: f64, sums: Vec<f64>) -> PyResult<Self> {
        wrap_n(md::PowerSumsN::from_parts(n, mean, sums))
    }

    #[staticmethod]
    #[pyo3(signature = (xs, max_order=4))]
    fn from_sequence(xs: Vec<f64>, max_order: usize) -> PyResult<Self> {
        wrap_n(md::PowerSumsN::from_sequence(&xs, max_order))
    }

    #[staticmethod]
    fn merge(groups: Vec<PyRef<'_, PyPowerSumsN>>) -> PyResult<Self> {
        let groups: Vec<md::PowerSumsN> = groups.iter().map(|g| g.inner.clone()).collect();
        wrap_n(md::PowerSumsN::merge(&groups))
    }

    fn subtract(&self, known: Vec<PyRef<'_, PyPowerSumsN>>) -> PyResult<Self> {
        let known: Vec<md::PowerSumsN> = known.iter().map(|g| g.inner.clone()).collect();
        wrap_n(self.inner.subtract(&known))
    }

    fn push(&self, x: f64) -> PyResult<Self> {
        wrap_n(self.inner.push(x))
    }

    #[getter]
    fn n(&self) -> u64 {
        self.inner.n()
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    #[getter]
    fn max_order(&self) -> usize {
        self.inner.max_order()
    }

    #[getter]
    fn sums(&self) -> Vec<f64> {
        self.inner.sums().to_vec()
    }

    /// Central sum of order `p`; order 0 is n and order 1 is zero.
    fn sp(&self, p: usize) -> PyResult<f64> {
        if p > self.inner.max_order() {
            return Err(value_error(format!(
                "order {p} above the maximum {}",
                self.inner.max_order()
            )));
        }
        Ok(self.inner.sp(p))
    }

    fn __repr__(&self) -> String {
        format!(
            "PowerSumsN(n={}, mean={:?}, sums={:?})",
            self.inner.n(),
            self.inner.mean(),
            self.inner.sums()
        )
    }
}

/// Skewness and kurtosis definitions used to read and write group statistics.
#[pyclass(
    name = "MomentConventions",
    module = "moment_decomp",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyConventions {
    inner: md::MomentConventions,
}

#[pymethods]
impl PyConventions {
    #[new]
    #[pyo3(signature = (skew_type="fisher-pearson", kurt_type="fisher-pearson", kurt_excess=false))]
    fn new(skew_type: &str, kurt_type: &str, kurt_excess: bool) -> PyResult<Self> {
        let skew: StatType = skew_type.parse().map_err(value_error)?;
        let kurt: StatType = kurt_type.parse().map_err(value_error)?;
        Ok(PyConventions {
            inner: md::MomentConventions::new(skew, kurt, kurt_excess),
        })
    }

    #[staticmethod]
    fn for_software(name: &str) -> PyResult<Self> {
        md::MomentConventions::for_software(name)
            .map(|inner| PyConventions { inner })
            .map_err(value_error)
    }

    #[getter]
    fn skew_type(&self) -> &'static str {
        self.inner.skew_type.name()
    }

    #[getter]
    fn kurt_type(&self) -> &'static str {
        self.inner.kurt_type.name()
    }

    #[getter]
    fn kurt_excess(&self) -> bool {
        self.inner.kurt_excess
    }

    fn __repr__(&self) -> String {
        format!(
            "MomentConventions(skew_type={:?}, kurt_type={:?}, kurt_excess={})",
            self.skew_type(),
            self.kurt_type(),
            if self.inner.kurt_excess {
                "True"
            } else {
                "False"
            }
        )
    }
}

fn opt_f64(d: &Bound<'_, PyDict>, keys: &[&str]) -> PyResult<Option<f64>> {
    for key in keys {
        if let Some(v) = d.get_item(key)? {
            if v.is_none() {
                return Ok(None);
            }
            return v.extract::<f64>().map(Some);
        }
    }
    Ok(None)
}

fn descriptor(d: &Bound<'_, PyDict>) -> PyResult<GroupDescriptor> {
    let n: u64 = d
        .get_item("n")?
        .ok_or_else(|| value_error("group without n"))?
        .extract()?;
    let mut g = GroupDescriptor::new(n);
    if let Some(name) = d.get_item("name")? {
        if !name.is_none() {
            g.name = Some(name.extract()?);
        }
    }
    g.mean = opt_f64(d, &["mean"])?;
    g.sd = opt_f64(d, &["sd"])?;
    g.variance = opt_f64(d, &["var", "variance"])?;
    g.skewness = opt_f64(d, &["skew", "skewness"])?;
    g.kurtosis = opt_f64(d, &["kurt", "kurtosis"])?;
    Ok(g)
}

/// Pools the groups, or recovers the missing subgroup when `pooled` names
/// the group holding the pooled sample (1-based position or name). Groups
/// are dicts with keys `n`, `mean`, `var` (or `sd`), `skew`, `kurt` and an
/// optional `name`. Returns `{"order", "warnings", "rows"}`.
#[pyfunction]
#[pyo3(signature = (groups, pooled=None, conventions=None, include_sd=false))]
fn sample_decomp<'py>(
    py: Python<'py>,
    groups: Vec<Bound<'py, PyDict>>,
    pooled: Option<Bound<'py, PyAny>>,
    conventions: Option<PyRef<'py, PyConventions>>,
    include_sd: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let groups = groups
        .iter()
        .map(descriptor)
        .collect::<PyResult<Vec<_>>>()?;
    let pooled = match pooled {
        None => None,
        Some(p) if p.is_none() => None,
        Some(p) => Some(match p.extract::<usize>() {
            Ok(i) => GroupRef::Index(i),
            Err(_) => GroupRef::Name(p.extract::<String>()?),
        }),
    };
    let req = md::DecompRequest {
        groups,
        conventions: conventions.map(|c| c.inner).unwrap_or_default(),
        pooled,
        include_sd,
    };
    let table = md::sample_decomp(&req).map_err(value_error)?;

    let rows = PyList::empty(py);
    for row in &table.rows {
        let r = PyDict::new(py);
        let s = &row.stats;
        r.set_item("label", &row.label)?;
        r.set_item(
            "kind",
            match row.kind {
                RowKind::Input => "input",
                RowKind::Other => "other",
                RowKind::Pooled => "pooled",
            },
        )?;
        r.set_item("n", s.n)?;
        r.set_item("mean", s.mean)?;
        if include_sd {
            r.set_item("sd", s.sd)?;
        }
        r.set_item("var", s.variance)?;
        r.set_item("skew", s.skewness)?;
        r.set_item("kurt", s.kurtosis)?;
        rows.append(r)?;
    }
    let out = PyDict::new(py);
    out.set_item("order", table.order)?;
    out.set_item("warnings", table.warnings.clone())?;
    out.set_item("rows", rows)?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "moment_decomp")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPowerSums>()?;
    m.add_class::<PyPowerSumsN>()?;
    m.add_class::<PyConventions>()?;
    m.add_function(wrap_pyfunction!(sample_decomp, m)?)?;
    Ok(())
}
