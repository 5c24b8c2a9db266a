//! Python bindings. Exact values cross the boundary as Python ints and
//! `(numerator, denominator)` tuples; enclosures as decimal strings.

use num_bigint::{BigInt, BigUint};
use omegalab::artin_hasse::{ah_exp_form, ah_product_form};
use omegalab::cli;
use omegalab::diophantine;
use omegalab::exact;
use omegalab::lambert;
use omegalab::omega_real;
use omegalab::padic_omega;
use omegalab::Rational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: omegalab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn pairs(c: &[Rational]) -> Vec<(BigInt, BigInt)> {
    c.iter().map(|r| (r.numer().clone(), r.denom().clone())).collect()
}

/// Ω to `digits` certified decimals.
#[pyfunction]
#[pyo3(signature = (digits, method = "newton"))]
fn omega(digits: u32, method: &str) -> PyResult<String> {
    let r = match method {
        "newton" => omega_real::omega_newton(digits, None),
        "iterate" => omega_real::omega_iterate(digits, None),
        _ => return Err(PyValueError::new_err("method must be 'newton' or 'iterate'")),
    }
    .map_err(err)?;
    Ok(r.value.to_decimal_string(digits))
}

/// Coefficients of `W(x)^k`; entry n belongs to `x^(n+k)`.
#[pyfunction]
fn lambert_coeffs(k: u32, terms: usize) -> PyResult<Vec<(BigInt, BigInt)>> {
    Ok(pairs(&lambert::w_series_coeffs(k, terms).map_err(err)?.coeffs))
}

/// Artin-Hasse coefficients up to `x^order`.
#[pyfunction]
#[pyo3(signature = (p, order, form = "exp-sum"))]
fn artin_hasse(p: u64, order: usize, form: &str) -> PyResult<Vec<(BigInt, BigInt)>> {
    let s = match form {
        "exp-sum" => ah_exp_form(p, order),
        "product" => ah_product_form(p, order),
        _ => return Err(PyValueError::new_err("form must be 'exp-sum' or 'product'")),
    }
    .map_err(err)?;
    Ok(pairs(s.series.coeffs()))
}

/// Residue of Ω_p modulo `p^prec`.
#[pyfunction]
#[pyo3(signature = (p, prec, method = "hensel"))]
fn omega_p(p: u64, prec: u32, method: &str) -> PyResult<BigUint> {
    let r = match method {
        "hensel" => padic_omega::omega_p_hensel(p, prec),
        "series" => padic_omega::omega_p_series(p, prec),
        _ => return Err(PyValueError::new_err("method must be 'hensel' or 'series'")),
    }
    .map_err(err)?;
    Ok(r.value.residue().clone())
}

/// Certified partial quotients of Ω from a `digits`-digit enclosure.
#[pyfunction]
#[pyo3(signature = (digits, max_terms = 1000))]
fn cf(digits: u32, max_terms: usize) -> PyResult<Vec<BigInt>> {
    let om = omega_real::omega_newton(digits, None).map_err(err)?.value;
    Ok(diophantine::cf_expand(&om, max_terms).partial_quotients)
}

#[pyfunction]
fn mobius(n: u64) -> i8 {
    exact::mobius(n)
}

/// Runs the command-line front end on `args` (without the program name)
/// and returns `(exit_code, report)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    let o = cli::run_captured(std::iter::once("omegalab".to_string()).chain(args));
    (o.code, o.text)
}

#[pymodule]
fn pyomegalab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(lambert_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(artin_hasse, m)?)?;
    m.add_function(wrap_pyfunction!(omega_p, m)?)?;
    m.add_function(wrap_pyfunction!(cf, m)?)?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
