//! Fixed registry of identity checks.

use crate::output::{Cell, Table};
use anyhow::Result;
use nls_lab::{nystrom, specfun, spectral, wienerhopf};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    pub fn new(name: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        // NaN fails
        let passed = (measured - expected).abs() <= tolerance;
        Self {
            check_name: name.to_string(),
            measured,
            expected,
            tolerance,
            passed,
        }
    }
}

type CheckFn = fn(f64) -> Result<CheckReport>;

/// Name and runner for every check; the argument scales the tolerance.
pub const REGISTRY: &[(&str, CheckFn)] = &[
    ("energy_identity", energy_identity),
    ("love_peak_identity", love_peak),
    ("love_duality", love_duality),
    ("digamma_identity", digamma_identity),
    ("profile_integral", profile_integral),
    ("stirling_im_log_gamma", stirling),
    ("wh_factorisation_residual", wh_residual),
    ("wh_conjugate_symmetry", wh_conjugate),
    ("trace_identity", trace_identity),
    ("instanton_zero", instanton),
    ("wh_peak_prediction", wh_peak),
];

fn max_over<F: Fn(f64) -> Result<f64>>(qs: &[f64], f: F) -> Result<f64> {
    qs.iter().try_fold(0.0_f64, |m, &q| Ok(m.max(f(q)?)))
}

fn energy_identity(s: f64) -> Result<CheckReport> {
    let r = max_over(&[0.001, 1.0, 50.0, 200.0], |q| {
        Ok(nystrom::energy_identity_residual(&nystrom::solve_rescaled(
            q, None,
        )?))
    })?;
    Ok(CheckReport::new("energy_identity", r, 0.0, 1e-12 * s))
}

fn love_peak(s: f64) -> Result<CheckReport> {
    let r = max_over(&[20.0, 100.0], |q| {
        let f = nystrom::solve_love(q, None)?;
        let d = nystrom::solve_rescaled(q, None)?.total_density;
        Ok((f.f0 - 1.0 - d).abs())
    })?;
    Ok(CheckReport::new("love_peak_identity", r, 0.0, 1e-10 * s))
}

fn love_duality(s: f64) -> Result<CheckReport> {
    let r = max_over(&[20.0, 100.0], |q| {
        let f = nystrom::solve_love(q, None)?;
        let d = nystrom::solve_rescaled(q, None)?.total_density;
        Ok((f.duality_integral() - d).abs())
    })?;
    Ok(CheckReport::new("love_duality", r, 0.0, 1e-10 * s))
}

fn digamma_identity(s: f64) -> Result<CheckReport> {
    let v = specfun::digamma_identity_integral()?;
    Ok(CheckReport::new("digamma_identity", v, PI / 2.0, 1e-8 * s))
}

fn profile_integral(s: f64) -> Result<CheckReport> {
    let v = specfun::profile_integral()?;
    Ok(CheckReport::new("profile_integral", v, -PI / 4.0, 1e-6 * s))
}

fn stirling(s: f64) -> Result<CheckReport> {
    let (_, rhs) = specfun::im_log_gamma_integral_check(100.0)?;
    Ok(CheckReport::new(
        "stirling_im_log_gamma",
        rhs,
        specfun::stirling_im_log_gamma(100.0),
        1e-3 * s,
    ))
}

fn wh_residual(s: f64) -> Result<CheckReport> {
    let r = wienerhopf::factorisation_residual()?;
    Ok(CheckReport::new(
        "wh_factorisation_residual",
        r,
        0.0,
        1e-10 * s,
    ))
}

fn wh_conjugate(s: f64) -> Result<CheckReport> {
    let rows = wienerhopf::grid_evaluation(&wienerhopf::real_grid(400, 20.0, 1e-3))?;
    let r = rows
        .iter()
        .map(|r| r.conjugate_residual)
        .fold(0.0, f64::max);
    Ok(CheckReport::new("wh_conjugate_symmetry", r, 0.0, 1e-12 * s))
}

fn trace_identity(s: f64) -> Result<CheckReport> {
    let r = max_over(&[5.0, 50.0], |q| {
        Ok(spectral::trace_check(&spectral::eigen_spectrum(
            q, None, 1,
        )?))
    })?;
    Ok(CheckReport::new("trace_identity", r, 0.0, 1e-10 * s))
}

fn instanton(s: f64) -> Result<CheckReport> {
    let c = wienerhopf::instanton_zero_check();
    Ok(CheckReport::new(
        "instanton_zero",
        c.residual,
        0.0,
        1e-14 * s,
    ))
}

/// Largest `Q·|prediction − ρ̃(0)|`, bounded by 10.
fn wh_peak(s: f64) -> Result<CheckReport> {
    let r = max_over(&[50.0, 100.0, 300.0], |q| {
        let pred = wienerhopf::wh_peak_density(q)?;
        Ok(q * (pred - nystrom::solve_rescaled(q, None)?.rho0).abs())
    })?;
    Ok(CheckReport::new("wh_peak_prediction", r, 0.0, 10.0 * s))
}

/// Run every check. A check that errors is reported as failed with NaN.
pub fn run_all(scale: f64) -> Vec<(CheckReport, Option<String>)> {
    REGISTRY
        .iter()
        .map(|(name, f)| match f(scale) {
            Ok(r) => (r, None),
            Err(e) => (
                CheckReport::new(name, f64::NAN, 0.0, f64::NAN),
                Some(format!("{e:#}")),
            ),
        })
        .collect()
}

pub fn to_table(results: &[(CheckReport, Option<String>)]) -> Table {
    let mut t = Table::new(&[
        "check_name",
        "measured",
        "expected",
        "tolerance",
        "passed",
        "error",
    ]);
    for (r, err) in results {
        t.push(vec![
            Cell::from(r.check_name.as_str()),
            r.measured.into(),
            r.expected.into(),
            r.tolerance.into(),
            r.passed.into(),
            Cell::from(err.clone().unwrap_or_default()),
        ]);
    }
    let passed = results.iter().filter(|(r, _)| r.passed).count();
    t.meta("checks_total", results.len().into());
    t.meta("checks_passed", passed.into());
    t
}
