//! Python bindings. Series travel as dense coefficient lists (index 0 is
//! the coefficient of 1^-s on the Dirichlet side, of z^0 on the Taylor
//! side), scalars as Python complex, and structured reports as plain dicts
//! mirroring the CLI's JSON output.

use pyo3::conversion::IntoPyObjectExt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyTuple};
use serde_json::Value;

use koenigslab_core::disc::{self, TaylorSeries};
use koenigslab_core::koenigs::{self, spectral};
use koenigslab_core::series::DirichletSeries;
use koenigslab_core::shifts::{self, ClassMode, WeightFamily};
use koenigslab_core::symbols::{self, Symbol};
use koenigslab_core::{criteria, selftest, Cplx};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dirichlet(coeffs: Vec<Cplx>) -> PyResult<DirichletSeries> {
    if coeffs.is_empty() {
        return Err(PyValueError::new_err("series needs at least one coefficient"));
    }
    Ok(DirichletSeries::from_coeffs(coeffs))
}

fn symbol(c0: u64, psi: Vec<Cplx>) -> PyResult<Symbol> {
    Ok(Symbol::new(c0, dirichlet(psi)?))
}

fn taylor(coeffs: Vec<Cplx>) -> PyResult<TaylorSeries> {
    if coeffs.is_empty() {
        return Err(PyValueError::new_err("series needs at least one coefficient"));
    }
    Ok(TaylorSeries::from_coeffs(coeffs))
}

fn value_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, value_to_py(py, val)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn py_to_value(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_none() {
        return Ok(Value::Null);
    }
    if let Ok(b) = obj.cast::<PyBool>() {
        return Ok(Value::Bool(b.is_true()));
    }
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(Value::from(i));
    }
    if let Ok(f) = obj.extract::<f64>() {
        return Ok(Value::from(f));
    }
    if let Ok(s) = obj.extract::<String>() {
        return Ok(Value::from(s));
    }
    if let Ok(list) = obj.cast::<PyList>() {
        let items: PyResult<Vec<Value>> = list.iter().map(|it| py_to_value(&it)).collect();
        return Ok(Value::Array(items?));
    }
    if let Ok(tuple) = obj.cast::<PyTuple>() {
        let items: PyResult<Vec<Value>> = tuple.iter().map(|it| py_to_value(&it)).collect();
        return Ok(Value::Array(items?));
    }
    if let Ok(dict) = obj.cast::<PyDict>() {
        let mut map = serde_json::Map::new();
        for (k, v) in dict.iter() {
            let key = match k.extract::<String>() {
                Ok(s) => s,
                Err(_) => k.str()?.to_string(),
            };
            map.insert(key, py_to_value(&v)?);
        }
        return Ok(Value::Object(map));
    }
    Err(PyValueError::new_err(format!(
        "cannot convert {} to a report value",
        obj.get_type().name()?
    )))
}

fn report<T: serde::Serialize>(py: Python<'_>, t: &T) -> PyResult<Py<PyAny>> {
    value_to_py(py, &serde_json::to_value(t).map_err(err)?)
}

fn family_from_py(obj: &Bound<'_, PyAny>) -> PyResult<WeightFamily> {
    serde_json::from_value(py_to_value(obj)?).map_err(err)
}

/// Dirichlet (divisor) convolution of two coefficient lists.
#[pyfunction]
fn dmul(f: Vec<Cplx>, g: Vec<Cplx>) -> PyResult<Vec<Cplx>> {
    let out = dirichlet(f)?.dmul(&dirichlet(g)?).map_err(err)?;
    Ok(out.coeffs().to_vec())
}

/// Exponential in the Dirichlet convolution algebra.
#[pyfunction]
fn dexp(f: Vec<Cplx>) -> PyResult<Vec<Cplx>> {
    Ok(dirichlet(f)?.dexp().coeffs().to_vec())
}

/// Conjugacy map of the symbol c0·s + psi, solved by the direct recurrence.
#[pyfunction]
fn koenigs_map(py: Python<'_>, c0: u64, psi: Vec<Cplx>) -> PyResult<Py<PyAny>> {
    let result = koenigs::koenigs_recurrence(&symbol(c0, psi)?).map_err(err)?;
    report(py, &result)
}

/// Commuting companion symbol with the given characteristic.
#[pyfunction]
fn companion(py: Python<'_>, c0: u64, psi: Vec<Cplx>, c: u64) -> PyResult<Py<PyAny>> {
    let comp = koenigs::companion_symbol(&symbol(c0, psi)?, c).map_err(err)?;
    report(py, &comp)
}

/// Expansion of k^(-phi) as a dense coefficient list.
#[pyfunction]
fn power_term(k: u64, c0: u64, psi: Vec<Cplx>) -> PyResult<Vec<Cplx>> {
    let pt = symbols::power_term(k, &symbol(c0, psi)?).map_err(err)?;
    Ok(pt.series.coeffs().to_vec())
}

/// Spectrum of the composition operator, with points enumerated to m_max.
#[pyfunction]
#[pyo3(signature = (c0, psi, m_max = 64))]
fn spectrum(py: Python<'_>, c0: u64, psi: Vec<Cplx>, m_max: u64) -> PyResult<Py<PyAny>> {
    let result = spectral::spectrum_points(&symbol(c0, psi)?, m_max).map_err(err)?;
    report(py, &result)
}

/// Apply the resolvent (C_phi - lambda)^-1 to the series g.
#[pyfunction]
#[pyo3(signature = (c0, psi, lam, g, tol = 1e-9))]
fn resolvent(c0: u64, psi: Vec<Cplx>, lam: Cplx, g: Vec<Cplx>, tol: f64) -> PyResult<Vec<Cplx>> {
    let out = spectral::resolvent_apply(&symbol(c0, psi)?, lam, &dirichlet(g)?, tol)
        .map_err(err)?;
    Ok(out.coeffs().to_vec())
}

/// Eigenfunction m^(-u) of the symbol's conjugacy map, as a dense list.
#[pyfunction]
fn eigenfunction(c0: u64, psi: Vec<Cplx>, m: u64) -> PyResult<Vec<Cplx>> {
    let solved = koenigs::koenigs_recurrence(&symbol(c0, psi)?).map_err(err)?;
    let series = koenigs::eigenfunction(m, &solved.u).map_err(err)?;
    Ok(series.coeffs().to_vec())
}

/// Cyclicity gate verdict for the symbol.
#[pyfunction]
fn cyclicity(py: Python<'_>, c0: u64, psi: Vec<Cplx>) -> PyResult<Py<PyAny>> {
    report(py, &criteria::cyclicity_gate(&symbol(c0, psi)?))
}

/// Two-term cyclicity bound verdict.
#[pyfunction]
fn example48(py: Python<'_>, c1: f64, c2: Cplx) -> PyResult<Py<PyAny>> {
    report(py, &criteria::example48_check(c1, c2))
}

/// Two-block commutant gate verdict.
#[pyfunction]
fn example76(py: Python<'_>, a: f64, b: f64) -> PyResult<Py<PyAny>> {
    report(py, &criteria::example76_check(a, b))
}

/// Commutant verdict for a characteristic-2 symbol.
#[pyfunction]
fn char2_commutant(py: Python<'_>, c0: u64, psi: Vec<Cplx>) -> PyResult<Py<PyAny>> {
    let v = criteria::char2_commutant_verdict(&symbol(c0, psi)?).map_err(err)?;
    report(py, &v)
}

/// Sufficient condition for a minimal commutant.
#[pyfunction]
#[pyo3(signature = (c0, psi, n_terms = 16))]
fn minimal_commutant(py: Python<'_>, c0: u64, psi: Vec<Cplx>, n_terms: usize) -> PyResult<Py<PyAny>> {
    report(py, &criteria::minimal_commutant_sufficient(&symbol(c0, psi)?, n_terms))
}

/// Superattracting conjugacy u with u(phi(z)) = lambda u(z)^p.
#[pyfunction]
#[pyo3(signature = (phi, p, lam, tol = 1e-12, max_iter = 200))]
fn boettcher(phi: Vec<Cplx>, p: u32, lam: Cplx, tol: f64, max_iter: usize) -> PyResult<Vec<Cplx>> {
    let u = disc::boettcher(&taylor(phi)?, p, lam, tol, max_iter).map_err(err)?;
    Ok(u.coeffs().to_vec())
}

/// Norm certificate for the conjugacy of lambda z^p (1 + tail).
#[pyfunction]
fn boettcher_norm(py: Python<'_>, phi: Vec<Cplx>, p: u32, lam: Cplx) -> PyResult<Py<PyAny>> {
    let v = disc::boettcher_norm_check(&taylor(phi)?, p, lam).map_err(err)?;
    report(py, &v)
}

/// Attracting conjugacy u with u(phi(z)) = phi'(0) u(z).
#[pyfunction]
#[pyo3(signature = (phi, tol = 1e-12, max_iter = 10_000))]
fn koenigs_disc(phi: Vec<Cplx>, tol: f64, max_iter: usize) -> PyResult<Vec<Cplx>> {
    let u = disc::koenigs_disc(&taylor(phi)?, tol, max_iter).map_err(err)?;
    Ok(u.coeffs().to_vec())
}

/// Starlikeness certificate for a conjugacy map.
#[pyfunction]
#[pyo3(signature = (u, samples = 256))]
fn starlike(py: Python<'_>, u: Vec<Cplx>, samples: usize) -> PyResult<Py<PyAny>> {
    let v = disc::starlike_check(&taylor(u)?, samples).map_err(err)?;
    report(py, &v)
}

/// Self-map certificate for phi(z) = lambda z (1 + psi(z)).
#[pyfunction]
fn disc_check(py: Python<'_>, lam: Cplx, psi: Vec<Cplx>) -> PyResult<Py<PyAny>> {
    let v = disc::cor89_check(lam, &taylor(psi)?).map_err(err)?;
    report(py, &v)
}

/// Weight family of the affine symbol c0·s + c1 over admissible labels.
#[pyfunction]
fn canonical_family(py: Python<'_>, c0: u64, c1: Cplx, m_max: u64, k: usize) -> PyResult<Py<PyAny>> {
    report(py, &shifts::canonical_family(c0, c1, m_max, k).map_err(err)?)
}

/// Two-block family whose partial-product ratio drifts both ways.
#[pyfunction]
fn alternating_family(py: Python<'_>, k: usize) -> PyResult<Py<PyAny>> {
    report(py, &shifts::alternating_example(k))
}

/// Brute-force commutant report for a weight family dict.
#[pyfunction]
fn commutant_blocks(py: Python<'_>, family: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let rep = shifts::commutant_blocks(&family_from_py(family)?).map_err(err)?;
    report(py, &rep)
}

/// Stability-filtered double commutant structure of a weight family dict.
#[pyfunction]
#[pyo3(signature = (family, growth_window = 5))]
fn double_commutant(py: Python<'_>, family: &Bound<'_, PyAny>, growth_window: usize) -> PyResult<Py<PyAny>> {
    let rep = shifts::double_commutant_structure(&family_from_py(family)?, growth_window)
        .map_err(err)?;
    report(py, &rep)
}

/// Equivalence classes of block labels; mode is "closed-form" or
/// "finite-horizon".
#[pyfunction]
#[pyo3(signature = (family, mode = "closed-form"))]
fn equivalence_classes(py: Python<'_>, family: &Bound<'_, PyAny>, mode: &str) -> PyResult<Py<PyAny>> {
    let mode = match mode {
        "closed-form" => ClassMode::ClosedForm,
        "finite-horizon" => ClassMode::FiniteHorizon,
        other => {
            return Err(PyValueError::new_err(format!(
                "mode must be 'closed-form' or 'finite-horizon', got '{other}'"
            )))
        }
    };
    let rep = shifts::equivalence_classes(&family_from_py(family)?, mode).map_err(err)?;
    report(py, &rep)
}

/// Cesaro means of the shift polynomial against the pattern operator.
#[pyfunction]
#[pyo3(signature = (family, a, l_max = 200, tol = 1e-6))]
fn cesaro(py: Python<'_>, family: &Bound<'_, PyAny>, a: Vec<Cplx>, l_max: usize, tol: f64) -> PyResult<Py<PyAny>> {
    let rep = shifts::cesaro_approximation(&family_from_py(family)?, &a, l_max, tol)
        .map_err(err)?;
    report(py, &rep)
}

/// Run the deterministic acceptance criteria and return the full report.
#[pyfunction]
fn run_selftest(py: Python<'_>) -> PyResult<Py<PyAny>> {
    report(py, &selftest::run_selftest())
}

#[pymodule]
fn koenigslab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(dmul, m)?)?;
    m.add_function(wrap_pyfunction!(dexp, m)?)?;
    m.add_function(wrap_pyfunction!(koenigs_map, m)?)?;
    m.add_function(wrap_pyfunction!(companion, m)?)?;
    m.add_function(wrap_pyfunction!(power_term, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent, m)?)?;
    m.add_function(wrap_pyfunction!(eigenfunction, m)?)?;
    m.add_function(wrap_pyfunction!(cyclicity, m)?)?;
    m.add_function(wrap_pyfunction!(example48, m)?)?;
    m.add_function(wrap_pyfunction!(example76, m)?)?;
    m.add_function(wrap_pyfunction!(char2_commutant, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_commutant, m)?)?;
    m.add_function(wrap_pyfunction!(boettcher, m)?)?;
    m.add_function(wrap_pyfunction!(boettcher_norm, m)?)?;
    m.add_function(wrap_pyfunction!(koenigs_disc, m)?)?;
    m.add_function(wrap_pyfunction!(starlike, m)?)?;
    m.add_function(wrap_pyfunction!(disc_check, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_family, m)?)?;
    m.add_function(wrap_pyfunction!(alternating_family, m)?)?;
    m.add_function(wrap_pyfunction!(commutant_blocks, m)?)?;
    m.add_function(wrap_pyfunction!(double_commutant, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence_classes, m)?)?;
    m.add_function(wrap_pyfunction!(cesaro, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
