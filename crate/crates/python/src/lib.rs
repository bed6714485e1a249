//! Python bindings. Exact results come back as `fractions.Fraction`, structured
//! reports as plain dictionaries.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use pauli_volume::channel::{self, ChannelSpec};
use pauli_volume::geometry;
use pauli_volume::mub;
use pauli_volume::rational::{format_rational, parse_rational, Rational};
use pauli_volume::regions::ClassTag;
use pauli_volume::volume::{self, Limits, NMode};

fn py_err(e: pauli_volume::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, value: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((format_rational(value),))
}

/// Serializes through JSON so every report keeps its documented field names.
fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accepts ints, `Fraction`s, decimal floats or strings such as `"1/3"`.
fn rationals(values: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    values
        .iter()
        .map(|v| parse_rational(&v.str()?.to_cow()?).map_err(py_err))
        .collect()
}

fn class_tag(name: &str) -> PyResult<ClassTag> {
    name.parse().map_err(py_err)
}

fn limits() -> PyResult<Limits> {
    Limits::from_env().map_err(py_err)
}

/// A generalized Pauli map in eigenvalue coordinates.
#[pyclass(name = "ChannelSpec", frozen)]
pub struct PyChannelSpec {
    inner: ChannelSpec,
}

#[pymethods]
impl PyChannelSpec {
    /// `lambdas` holds all `N + 1` eigenvalues, or only the `N` free ones when `N = d + 1`.
    #[new]
    #[pyo3(signature = (d, n, lambdas))]
    fn new(d: usize, n: usize, lambdas: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let values = rationals(&lambdas)?;
        let inner = if n == d + 1 && values.len() == n {
            ChannelSpec::from_free(d, n, values)
        } else {
            ChannelSpec::new(d, n, values)
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn lambdas<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.lambdas().iter().map(|l| fraction(py, l)).collect()
    }

    fn is_cp(&self) -> bool {
        channel::is_cp(&self.inner)
    }

    fn is_positive_necessary(&self) -> bool {
        channel::is_positive_necessary(&self.inner)
    }

    fn is_generator_achievable(&self) -> bool {
        channel::is_generator_achievable(&self.inner)
    }

    /// `(holds, known_sufficient)` for the entanglement-breaking condition.
    fn is_eb_necessary(&self) -> (bool, bool) {
        let v = channel::is_eb_necessary(&self.inner);
        (v.holds, v.known_sufficient)
    }

    fn min_output_overlap<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &channel::min_output_overlap(&self.inner))
    }

    /// Smallest eigenvalue of the Choi state, using the Weyl bases (prime `d`).
    fn choi_min_eigenvalue(&self) -> PyResult<f64> {
        let m = mub::build_weyl_mubs(self.inner.d()).map_err(py_err)?;
        channel::choi_min_eigenvalue(&self.inner, &m).map_err(py_err)
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &channel::classify(&self.inner))
    }

    fn __repr__(&self) -> String {
        let lambdas: Vec<String> = self.inner.lambdas().iter().map(format_rational).collect();
        format!(
            "ChannelSpec(d={}, n={}, lambdas=[{}])",
            self.inner.d(),
            self.inner.n(),
            lambdas.join(", ")
        )
    }
}

#[pyfunction]
#[pyo3(signature = (d, lambdas, n = None))]
fn classify<'py>(
    py: Python<'py>,
    d: usize,
    lambdas: Vec<Bound<'py, PyAny>>,
    n: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    PyChannelSpec::new(d, n.unwrap_or(d + 1), lambdas)?.classify(py)
}

#[pyfunction]
fn class_volume<'py>(py: Python<'py>, d: usize, n: usize, class_tag_name: &str) -> PyResult<Bound<'py, PyAny>> {
    let v = volume::class_volume_with(&limits()?, d, n, class_tag(class_tag_name)?).map_err(py_err)?;
    to_dict(py, &v)
}

#[pyfunction]
fn volume_ratio<'py>(py: Python<'py>, d: usize, n: usize, num: &str, den: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = volume::volume_ratio_with(&limits()?, d, n, class_tag(num)?, class_tag(den)?)
        .map_err(py_err)?;
    fraction(py, &r)
}

/// `(coefficient, radicand)` with value `coefficient * sqrt(radicand)`.
#[pyfunction]
fn vp_volume<'py>(py: Python<'py>, d: usize, n: usize) -> PyResult<(Bound<'py, PyAny>, u64)> {
    let v = geometry::vp_volume(d, n).map_err(py_err)?;
    Ok((fraction(py, v.coeff())?, v.radicand()))
}

/// `(estimate, stderr)`; identical for a fixed seed.
#[pyfunction]
#[pyo3(signature = (d, n, class_tag_name, samples = 1_000_000, seed = 42))]
fn mc_volume(d: usize, n: usize, class_tag_name: &str, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
    let m = volume::mc_volume(d, n, class_tag(class_tag_name)?, samples, seed).map_err(py_err)?;
    Ok((m.estimate, m.stderr))
}

#[pyfunction]
#[pyo3(signature = (d, tolerance = 1e-10))]
fn verify_mubs<'py>(py: Python<'py>, d: usize, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    let m = mub::build_weyl_mubs(d).map_err(py_err)?;
    to_dict(py, &mub::verify_unbiased(&m, tolerance).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (d_min, d_max, n_mode = "max"))]
fn check_conjectures<'py>(
    py: Python<'py>,
    d_min: usize,
    d_max: usize,
    n_mode: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let mode: NMode = n_mode.parse().map_err(py_err)?;
    let report = volume::check_conjectures(&limits()?, d_min..=d_max, mode).map_err(py_err)?;
    to_dict(py, &report)
}

#[pymodule]
mod _core {
    #[pymodule_export]
    use super::{
        check_conjectures, class_volume, classify, mc_volume, verify_mubs, volume_ratio, vp_volume,
        PyChannelSpec,
    };
}

#[cfg(test)]
mod tests {
    use super::_core;
    use pyo3::ffi::c_str;
    use pyo3::prelude::*;

    #[test]
    fn module_from_python() {
        pyo3::append_to_inittab!(_core);
        Python::initialize();
        Python::attach(|py| {
            py.run(
                c_str!(
                    r#"
from fractions import Fraction
import _core
assert _core.volume_ratio(3, 4, "cp", "p") == Fraction(1, 8)
assert _core.vp_volume(5, 3) == (Fraction(1, 16), 3)
c = _core.ChannelSpec(2, 3, ["1/3", "1/3", "1/3"])
assert c.is_cp() and c.is_eb_necessary() == (True, True)
assert c.min_output_overlap() == Fraction(1, 3)
r = _core.classify(2, [1, 1, 1])
assert r["completely_positive"] and not r["entanglement_breaking"]["holds"]
try:
    _core.volume_ratio(5, 4, "cp", "p")
    raise SystemExit("unsupported pair accepted")
except ValueError as e:
    assert "unsupported" in str(e)
"#
                ),
                None,
                None,
            )
            .unwrap();
        });
    }
}
