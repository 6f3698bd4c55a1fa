//! Python bindings: the main types and operations of the toolkit exposed as
//! plain functions. Report-shaped results come back as JSON strings.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lacunary_core::charfn::{self, families, LimitingKind, ZoneFamily, ZoneParams};
use lacunary_core::diophantine;
use lacunary_core::experiment;
use lacunary_core::limits;
use lacunary_core::martingale;
use lacunary_core::series::{CoefficientTriangle, LacunarySequence, NormConvention};

fn pyerr(e: lacunary_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyfunction]
fn rademacher(n: u32, x: f64) -> PyResult<f64> {
    lacunary_core::series::rademacher(n, x).map_err(pyerr)
}

#[pyfunction]
fn walsh(m: u64, x: f64) -> PyResult<f64> {
    lacunary_core::series::walsh(m, x).map_err(pyerr)
}

#[pyfunction]
fn dyadic_xor(k: u64, l: u64) -> u64 {
    lacunary_core::series::dyadic_xor(k, l)
}

#[pyfunction]
fn bernoulli1(x: f64) -> f64 {
    lacunary_core::series::bernoulli1(x)
}

#[pyfunction]
fn trig_partial_sum(seq_spec: &str, coeff_spec: &str, n: usize, x: f64) -> PyResult<f64> {
    let seq = LacunarySequence::parse_spec(seq_spec, n).map_err(pyerr)?;
    let coeffs = CoefficientTriangle::parse_spec(coeff_spec, NormConvention::Trig).map_err(pyerr)?;
    lacunary_core::series::trig_partial_sum(&seq, &coeffs, n, x).map_err(pyerr)
}

/// Atoms `(value, mass)` of the exact law of the Walsh partial sum.
#[pyfunction]
fn walsh_partial_sum_law(seq_spec: &str, coeff_spec: &str, n: usize) -> PyResult<Vec<(f64, f64)>> {
    let seq = LacunarySequence::parse_spec(seq_spec, n).map_err(pyerr)?;
    let coeffs =
        CoefficientTriangle::parse_spec(coeff_spec, NormConvention::Walsh).map_err(pyerr)?;
    let step = lacunary_core::series::walsh_partial_sum(&seq, &coeffs, n).map_err(pyerr)?;
    let law = limits::exact_law(&step).map_err(pyerr)?;
    Ok(law.values().iter().copied().zip(law.masses().iter().copied()).collect())
}

/// Rademacher weights `(p, w_p)` of the Bernoulli shift expansion.
#[pyfunction]
fn bernoulli_expansion_weights(n: usize, tail: usize) -> Vec<(usize, f64)> {
    lacunary_core::series::bernoulli_expansion_weights(n, tail)
        .into_iter()
        .map(|w| (w.index, w.weight))
        .collect()
}

#[pyfunction]
fn mgf_walsh_exact(
    seq_spec: &str,
    coeff_spec: &str,
    n: usize,
    z_re: f64,
    z_im: f64,
) -> PyResult<(f64, f64)> {
    let seq = LacunarySequence::parse_spec(seq_spec, n).map_err(pyerr)?;
    let coeffs =
        CoefficientTriangle::parse_spec(coeff_spec, NormConvention::Walsh).map_err(pyerr)?;
    let v = charfn::mgf_walsh_exact(&seq, &coeffs, n, Complex64::new(z_re, z_im)).map_err(pyerr)?;
    Ok((v.re, v.im))
}

#[pyfunction]
#[pyo3(signature = (n, z_re, z_im, tail = 64))]
fn mgf_bernoulli_exact(n: usize, z_re: f64, z_im: f64, tail: usize) -> PyResult<(f64, f64)> {
    let v = charfn::mgf_bernoulli_exact(n, Complex64::new(z_re, z_im), tail).map_err(pyerr)?;
    Ok((v.re, v.im))
}

/// Limiting function psi(z); kind is "walsh", "bernoulli" or "trivial".
#[pyfunction]
#[pyo3(signature = (kind, z_re, z_im, kappa4 = 1.0))]
fn limiting_function(kind: &str, z_re: f64, z_im: f64, kappa4: f64) -> PyResult<(f64, f64)> {
    let kind = match kind {
        "walsh" => LimitingKind::Walsh { kappa4 },
        "bernoulli" => LimitingKind::Bernoulli,
        "trivial" => LimitingKind::Trivial,
        other => return Err(PyValueError::new_err(format!("unknown kind {other:?}"))),
    };
    let v = charfn::limiting_function(kind, Complex64::new(z_re, z_im)).map_err(pyerr)?;
    Ok((v.re, v.im))
}

#[pyfunction]
fn signed_count_bound_low_ratio(l: usize, p: usize, q: f64, n: usize, r: u32) -> PyResult<f64> {
    diophantine::signed_count_bound_low_ratio(l, p, q, n, r).map_err(pyerr)
}

#[pyfunction]
#[pyo3(signature = (l, p2, p3, q, n, r, proof_form = false))]
fn signed_count_bound_high_ratio(
    l: usize,
    p2: usize,
    p3: usize,
    q: f64,
    n: usize,
    r: u32,
    proof_form: bool,
) -> PyResult<f64> {
    let form = if proof_form {
        diophantine::HighRatioBoundForm::RSquared
    } else {
        diophantine::HighRatioBoundForm::RCubed
    };
    diophantine::signed_count_bound_high_ratio(l, p2, p3, q, n, r, form).map_err(pyerr)
}

#[pyfunction]
fn xor_count_bound(l: usize, q: f64, n: usize) -> PyResult<f64> {
    diophantine::xor_count_bound(l, q, n).map_err(pyerr)
}

/// Exhaustive signed counts; JSON report string (classes, bounds, verdicts).
#[pyfunction]
#[pyo3(signature = (seq_spec, n, l, r, budget = diophantine::DEFAULT_BUDGET as u64))]
fn count_signed_solutions(seq_spec: &str, n: usize, l: usize, r: u32, budget: u64) -> PyResult<String> {
    let seq = LacunarySequence::parse_spec(seq_spec, n).map_err(pyerr)?;
    let reports =
        diophantine::count_signed_solutions(&seq, n, l, r, budget as u128).map_err(pyerr)?;
    let body: Vec<serde_json::Value> = reports
        .iter()
        .map(|rep| {
            serde_json::json!({
                "class": rep.class,
                "max_count": rep.max_count,
                "bound": rep.bound,
                "verdict": rep.verdict(),
                "top_buckets": rep.top_buckets(10)
                    .iter().map(|(a, c)| serde_json::json!([a.to_string(), c])).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(serde_json::json!({"classes": body}).to_string())
}

/// Exhaustive xor counts; JSON report string.
#[pyfunction]
#[pyo3(signature = (seq_spec, n, l, budget = diophantine::DEFAULT_BUDGET as u64))]
fn count_xor_solutions(seq_spec: &str, n: usize, l: usize, budget: u64) -> PyResult<String> {
    let seq = LacunarySequence::parse_spec(seq_spec, n).map_err(pyerr)?;
    let rep = diophantine::count_xor_solutions(&seq, n, l, budget as u128).map_err(pyerr)?;
    Ok(serde_json::json!({
        "max_count": rep.max_count,
        "zero_count": rep.zero_count,
        "bound": rep.bound,
        "verdict": rep.verdict(),
    })
    .to_string())
}

/// Kolmogorov distance of the normalized flat Walsh sum from N(0,1).
#[pyfunction]
fn kolmogorov_walsh_flat(alpha: f64, n: usize) -> PyResult<f64> {
    let a_n = families::walsh_flat_a_n(alpha, n);
    let law = experiment::walsh_flat_law(n, alpha)
        .and_then(|l| l.scale_values(1.0 / a_n))
        .map_err(pyerr)?;
    Ok(limits::kolmogorov_distance(&law))
}

/// Kolmogorov distance of the normalized Bernoulli shift sum from N(0,1).
#[pyfunction]
fn kolmogorov_bernoulli(n: usize) -> PyResult<f64> {
    let law = limits::SignSumLaw::bernoulli_sum(n, 64);
    law.kolmogorov_vs_normal(2.0 / (n as f64).sqrt()).map_err(pyerr)
}

/// Weak local-limit statistic `A_n P[S in [lo, hi))` for the flat Walsh sum.
#[pyfunction]
fn llt_weak_walsh_flat(alpha: f64, n: usize, lo: f64, hi: f64) -> PyResult<f64> {
    let law = experiment::walsh_flat_law(n, alpha).map_err(pyerr)?;
    let window = limits::JordanWindow::interval(lo, hi).map_err(pyerr)?;
    limits::llt_weak_statistic(&law, families::walsh_flat_a_n(alpha, n), &window).map_err(pyerr)
}

#[pyfunction]
fn tail_ratio_walsh_flat(alpha: f64, n: usize, y: f64) -> PyResult<f64> {
    let law = experiment::walsh_flat_law(n, alpha).map_err(pyerr)?;
    limits::tail_ratio_extended_clt(&law, families::walsh_flat_a_n(alpha, n), y).map_err(pyerr)
}

/// Zone-of-control certification; JSON report string.
#[pyfunction]
#[pyo3(signature = (kind, n_grid, v, w, gamma, d, alpha = 0.25))]
fn zone_check(
    kind: &str,
    n_grid: Vec<usize>,
    v: f64,
    w: f64,
    gamma: f64,
    d: f64,
    alpha: f64,
) -> PyResult<String> {
    let family = match kind {
        "walsh" => ZoneFamily {
            label: format!("walsh-flat({alpha})"),
            t_n: Box::new(move |n| families::walsh_flat_a_n(alpha, n).powi(2)),
            residual: Box::new(move |n, lam| families::walsh_flat_zone_residual(alpha, n, lam)),
        },
        "bernoulli" => ZoneFamily {
            label: "bernoulli".into(),
            t_n: Box::new(families::bernoulli_t_n),
            residual: Box::new(|n, lam| families::bernoulli_zone_residual(n, lam, 64)),
        },
        other => return Err(PyValueError::new_err(format!("unknown kind {other:?}"))),
    };
    let report = charfn::zone_of_control_check(&family, &ZoneParams { v, w, gamma, d }, &n_grid)
        .map_err(pyerr)?;
    Ok(serde_json::json!({"zone": report, "pass": report.pass()}).to_string())
}

/// Remainder-inequality check; JSON report string.
#[pyfunction]
#[pyo3(signature = (f, r, n, depth = 20))]
fn martingale_check(f: &str, r: u32, n: usize, depth: u32) -> PyResult<String> {
    let f = experiment::parse_function_spec(f).map_err(pyerr)?;
    let chk = martingale::martingale_inequality_check(f.as_ref(), r, n, depth).map_err(pyerr)?;
    Ok(serde_json::json!({
        "lhs": chk.lhs, "rhs": chk.rhs, "margin": chk.margin,
        "tail_bound": chk.tail_bound,
        "pass": chk.lhs <= chk.rhs + chk.tail_bound,
    })
    .to_string())
}

/// Variance-per-term sequence of the doubling-map Birkhoff sums.
#[pyfunction]
fn sigma_estimate(f: &str, n_list: Vec<usize>) -> PyResult<Vec<(usize, f64)>> {
    let f = experiment::parse_function_spec(f).map_err(pyerr)?;
    let pts = martingale::sigma_estimate(f.as_ref(), &n_list).map_err(pyerr)?;
    Ok(pts.into_iter().map(|p| (p.n, p.value)).collect())
}

#[pyfunction]
fn schema_version() -> &'static str {
    experiment::report_schema_version()
}

#[pymodule]
fn lacunary_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(rademacher, m)?)?;
    m.add_function(wrap_pyfunction!(walsh, m)?)?;
    m.add_function(wrap_pyfunction!(dyadic_xor, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli1, m)?)?;
    m.add_function(wrap_pyfunction!(trig_partial_sum, m)?)?;
    m.add_function(wrap_pyfunction!(walsh_partial_sum_law, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_expansion_weights, m)?)?;
    m.add_function(wrap_pyfunction!(mgf_walsh_exact, m)?)?;
    m.add_function(wrap_pyfunction!(mgf_bernoulli_exact, m)?)?;
    m.add_function(wrap_pyfunction!(limiting_function, m)?)?;
    m.add_function(wrap_pyfunction!(signed_count_bound_low_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(signed_count_bound_high_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(xor_count_bound, m)?)?;
    m.add_function(wrap_pyfunction!(count_signed_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(count_xor_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_walsh_flat, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(llt_weak_walsh_flat, m)?)?;
    m.add_function(wrap_pyfunction!(tail_ratio_walsh_flat, m)?)?;
    m.add_function(wrap_pyfunction!(zone_check, m)?)?;
    m.add_function(wrap_pyfunction!(martingale_check, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(schema_version, m)?)?;
    m.add("SCHEMA_VERSION", experiment::report_schema_version())?;
    Ok(())
}
