//! Python bindings: thin wrappers over the melcert library.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use melcert::certificate::{certify_family, certify_system, check_a1};
use melcert::elliptic::{
    complete_elliptic_e, complete_elliptic_k, jacobi_sn_cn_dn, EllipticModulus,
};
use melcert::melnikov::{
    closed_form_j, duffing_forcing, melnikov_quadrature, solve_resonance,
};
use melcert::model::catalog::{
    coupled_oscillators, duffing, pendulum_torque, DuffingVariant,
};

fn err(e: melcert::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn variant(name: &str) -> PyResult<DuffingVariant> {
    match name {
        "hardening" | "a=1" => Ok(DuffingVariant::Hardening),
        "cubic" | "a=0" => Ok(DuffingVariant::PureCubic),
        "inner+" => Ok(DuffingVariant::InnerPlus),
        "inner-" => Ok(DuffingVariant::InnerMinus),
        "outer" => Ok(DuffingVariant::Outer),
        other => Err(PyValueError::new_err(format!(
            "unknown family {other:?}; use hardening, cubic, inner+, inner-, outer"
        ))),
    }
}

/// Complete elliptic integrals (K(k), E(k)).
#[pyfunction]
fn complete_integrals(k: f64) -> PyResult<(f64, f64)> {
    let m = EllipticModulus::new(k).map_err(err)?;
    Ok((complete_elliptic_k(&m), complete_elliptic_e(&m)))
}

/// Jacobi elliptic functions sn, cn, dn at complex argument, returned as
/// (re, im) pairs.
#[pyfunction]
fn jacobi(u_re: f64, u_im: f64, k: f64) -> PyResult<((f64, f64), (f64, f64), (f64, f64))> {
    let m = EllipticModulus::new(k).map_err(err)?;
    let p = jacobi_sn_cn_dn(num_complex::Complex64::new(u_re, u_im), &m).map_err(err)?;
    Ok((
        (p.sn.re, p.sn.im),
        (p.cn.re, p.cn.im),
        (p.dn.re, p.dn.im),
    ))
}

/// Solves the l/n resonance of a Duffing family; returns
/// (param_star, omega_star, t_star).
#[pyfunction]
fn resonance(family: &str, l: u32, n: u32, nu: f64) -> PyResult<(f64, f64, f64)> {
    let b = duffing(variant(family)?).map_err(err)?;
    let r = solve_resonance(&b.family, l, n, nu).map_err(err)?;
    Ok((r.param_star, r.omega_star, r.t_star))
}

/// Subharmonic Melnikov function at phase phi, by quadrature.
#[pyfunction]
fn melnikov(family: &str, l: u32, n: u32, nu: f64, beta: f64, delta: f64, phi: f64) -> PyResult<f64> {
    let b = duffing(variant(family)?).map_err(err)?;
    let r = solve_resonance(&b.family, l, n, nu).map_err(err)?;
    melnikov_quadrature(&b.family, &r, duffing_forcing(beta, delta), phi).map_err(err)
}

/// Closed-form Melnikov coefficients (j1, j2, branch_sign).
#[pyfunction]
fn melnikov_coefficients(family: &str, l: u32, n: u32, nu: f64) -> PyResult<(f64, f64, f64)> {
    let b = duffing(variant(family)?).map_err(err)?;
    let r = solve_resonance(&b.family, l, n, nu).map_err(err)?;
    let cf = closed_form_j(&b, &r).map_err(err)?;
    Ok((cf.j1, cf.j2, cf.branch_sign))
}

/// Certifies a Duffing family at an l/n resonance; returns the certificate
/// as a JSON string.
#[pyfunction]
fn certify_duffing(family: &str, l: u32, n: u32, nu: f64, beta: f64, delta: f64) -> PyResult<String> {
    let b = duffing(variant(family)?).map_err(err)?;
    let cert = certify_family(&b, l, n, nu, beta, delta).map_err(err)?;
    serde_json::to_string_pretty(&cert).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Certifies the pendulum with constant torque at action I; JSON certificate.
#[pyfunction]
fn certify_pendulum(kappa: f64, action: f64, theta: f64) -> PyResult<String> {
    let sys = pendulum_torque(kappa).map_err(err)?;
    let cert = certify_system(&sys, &[action], &[theta]).map_err(err)?;
    serde_json::to_string_pretty(&cert).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Certifies the coupled oscillator chain at a resonant action vector.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn certify_coupled(
    delta: f64,
    beta: f64,
    kappa: f64,
    natural_frequencies: Vec<f64>,
    action: Vec<f64>,
    theta: Vec<f64>,
) -> PyResult<String> {
    let sys = coupled_oscillators(delta, beta, kappa, &natural_frequencies).map_err(err)?;
    let cert = certify_system(&sys, &action, &theta).map_err(err)?;
    serde_json::to_string_pretty(&cert).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Loop integral of the perturbation around the principal complex-time pole
/// at phase phi; returns ((re, im), est_error).
#[pyfunction]
fn loop_integral(
    family: &str,
    l: u32,
    n: u32,
    nu: f64,
    beta: f64,
    delta: f64,
    phi: f64,
) -> PyResult<((f64, f64), f64)> {
    let b = duffing(variant(family)?).map_err(err)?;
    let r = solve_resonance(&b.family, l, n, nu).map_err(err)?;
    let lv = melcert::certificate::compute_i_hat(&b, &r, beta, delta, phi).map_err(err)?;
    Ok(((lv.value.re, lv.value.im), lv.est_error))
}

/// Locates the subharmonic periodic orbit predicted near phase phi; returns
/// the orbit record as a JSON string.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn find_orbit(
    family: &str,
    l: u32,
    n: u32,
    nu: f64,
    delta: f64,
    beta: f64,
    eps: f64,
    phi: f64,
) -> PyResult<String> {
    let b = duffing(variant(family)?).map_err(err)?;
    let r = solve_resonance(&b.family, l, n, nu).map_err(err)?;
    let orbit = melcert::orbits::find_subharmonic(&b, &r, delta, beta, eps, phi).map_err(err)?;
    serde_json::to_string_pretty(&orbit).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Rationality check on a frequency vector; returns (ok, residual).
#[pyfunction]
fn a1_check(omega: Vec<f64>) -> PyResult<(bool, f64)> {
    let r = check_a1(
        &omega,
        melcert::certificate::A1_DENOMINATOR_BOUND,
        melcert::certificate::A1_TOL,
    )
    .map_err(err)?;
    Ok((r.ok, r.residual))
}

#[pymodule]
fn melcert_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(complete_integrals, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(resonance, m)?)?;
    m.add_function(wrap_pyfunction!(melnikov, m)?)?;
    m.add_function(wrap_pyfunction!(melnikov_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(certify_duffing, m)?)?;
    m.add_function(wrap_pyfunction!(certify_pendulum, m)?)?;
    m.add_function(wrap_pyfunction!(certify_coupled, m)?)?;
    m.add_function(wrap_pyfunction!(loop_integral, m)?)?;
    m.add_function(wrap_pyfunction!(find_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(a1_check, m)?)?;
    Ok(())
}
