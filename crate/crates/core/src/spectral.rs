//! Spectrum of the truncated Lorentzian kernel `K(x) = 2/(1+x²)` on `[−Q, Q]`.
//!
//! The symmetrised Nyström matrix `K̃_ij = √ω_i K(ξ_i−ξ_j) √ω_j` commutes with
//! node reflection, so its spectrum is the union of an even sector
//! (`K(x_i−x_j) + K(x_i+x_j)`) and an odd sector (`K(x_i−x_j) − K(x_i+x_j)`)
//! on the nonnegative nodes. Each sector is a quarter of the full dense cost.

use crate::asymptotics::{fit_basis, with_nested_stability, FitResult};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::nystrom::{lorentzian, solve_rescaled};
use crate::quadrature::{default_n, rule_on_interval, QuadratureRule};
use faer::Mat;
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};

/// Refuse a Fredholm fit whose design condition exceeds this.
pub const MAX_FIT_CONDITION: f64 = 1e10;

/// Eigen-analysis of the kernel at one `Q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumOutput {
    pub q_half_width: f64,
    pub n_points: usize,
    /// The `top_k` largest eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `Δ_n = 2π − λ_n` for the same modes.
    pub gaps: Vec<f64>,
    /// `Σ_n log(1 − λ_n/2π)` over the full spectrum.
    pub log_fredholm: f64,
    /// Full computed spectrum, descending.
    pub all_eigenvalues: Vec<f64>,
}

impl SpectrumOutput {
    /// `Δ₁/Δ₀`.
    pub fn gap_ratio(&self) -> Option<f64> {
        (self.gaps.len() >= 2).then(|| self.gaps[1] / self.gaps[0])
    }

    /// Roundoff floor `N·ε·λ_max`; eigenvalues below it carry no information.
    pub fn roundoff_floor(&self) -> f64 {
        let lmax = self.all_eigenvalues.first().copied().unwrap_or(0.0);
        self.n_points as f64 * f64::EPSILON * lmax
    }
}

/// `(count, prediction)` of the eigenvalue counting law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountingCheck {
    pub count: usize,
    pub prediction: f64,
    pub relative_deviation: f64,
}

/// Fit of `log F(Q)` against `{Q, log Q, 1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FredholmAnalysis {
    pub fit: FitResult,
    /// `−(coefficient of Q)/2`, to be compared with `π/6`.
    pub szego_slope: f64,
    /// Coefficient of `log Q`.
    pub alpha_fh: f64,
    /// Constant term; reported only.
    pub beta_fh: f64,
}

/// `(Q, Δ₀)` pairs and the fit of `Q·Δ₀` against `{1, log Q}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapFit {
    pub fit: FitResult,
    pub q_values: Vec<f64>,
    pub gap0: Vec<f64>,
    pub gap1: Vec<f64>,
}

/// `K̃_ij = √ω_i K(ξ_i−ξ_j) √ω_j`, bit-exactly symmetric.
pub fn symmetrized_kernel(rule: &QuadratureRule) -> Mat<f64> {
    let x = &rule.nodes;
    let s: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let n = x.len();
    Mat::from_fn(n, n, |i, j| (s[i] * s[j]) * lorentzian(x[i] - x[j]))
}

/// Unsymmetrised Nyström matrix `K(ξ_i−ξ_j) ω_j`.
pub fn weighted_kernel(rule: &QuadratureRule) -> Mat<f64> {
    let x = &rule.nodes;
    let w = &rule.weights;
    let n = x.len();
    Mat::from_fn(n, n, |i, j| lorentzian(x[i] - x[j]) * w[j])
}

// Even and odd parity blocks of the symmetrised kernel.
fn parity_blocks(rule: &QuadratureRule) -> (Mat<f64>, Mat<f64>) {
    let x = &rule.nodes;
    let n = x.len();
    let h = n / 2;
    let centre = n % 2 == 1;
    let s: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    // positive nodes are n-h..n; the centre (odd n) is index h
    let p0 = n - h;
    let even_dim = h + usize::from(centre);
    let even = Mat::from_fn(even_dim, even_dim, |r, c| {
        let (ci, cj) = (centre && r == 0, centre && c == 0);
        let off = usize::from(centre);
        match (ci, cj) {
            (true, true) => s[h] * s[h] * lorentzian(0.0),
            (true, false) | (false, true) => {
                let j = p0 + if ci { c - off } else { r - off };
                SQRT_2 * (s[h] * s[j]) * lorentzian(x[j])
            }
            (false, false) => {
                let (i, j) = (p0 + r - off, p0 + c - off);
                (s[i] * s[j]) * (lorentzian(x[i] - x[j]) + lorentzian(x[i] + x[j]))
            }
        }
    });
    let odd = Mat::from_fn(h, h, |r, c| {
        let (i, j) = (p0 + r, p0 + c);
        (s[i] * s[j]) * (lorentzian(x[i] - x[j]) - lorentzian(x[i] + x[j]))
    });
    (even, odd)
}

/// Full spectrum of the symmetrised kernel, descending, via the parity split.
pub fn kernel_spectrum(rule: &QuadratureRule) -> Result<Vec<f64>> {
    let (even, odd) = parity_blocks(rule);
    let mut all = symmetric_eigenvalues(&even)?;
    if odd.nrows() > 0 {
        all.extend(symmetric_eigenvalues(&odd)?);
    }
    all.sort_by(|a, b| b.total_cmp(a));
    Ok(all)
}

/// Full spectrum from the unsplit symmetric matrix, descending.
pub fn kernel_spectrum_full(rule: &QuadratureRule) -> Result<Vec<f64>> {
    let mut all = symmetric_eigenvalues(&symmetrized_kernel(rule))?;
    all.reverse();
    Ok(all)
}

/// Eigenvalues, gaps and log Fredholm determinant at `Q`.
///
/// `n_points` defaults to the solver's rule size.
pub fn eigen_spectrum(
    q_half_width: f64,
    n_points: Option<usize>,
    top_k: usize,
) -> Result<SpectrumOutput> {
    if !(q_half_width > 0.0) || !q_half_width.is_finite() {
        return Err(Error::Argument(format!(
            "Q must be positive and finite, got {q_half_width}"
        )));
    }
    let n = n_points.unwrap_or_else(|| default_n(q_half_width));
    if top_k > n {
        return Err(Error::Argument(format!("top_k = {top_k} exceeds N = {n}")));
    }
    let rule = rule_on_interval(q_half_width, n)?;
    spectrum_on_rule(&rule, top_k)
}

pub fn spectrum_on_rule(rule: &QuadratureRule, top_k: usize) -> Result<SpectrumOutput> {
    let all = kernel_spectrum(rule)?;
    let log_fredholm = all.iter().map(|l| (-l / (2.0 * PI)).ln_1p()).sum();
    let eigenvalues: Vec<f64> = all.iter().take(top_k).copied().collect();
    Ok(SpectrumOutput {
        q_half_width: rule.q_half_width,
        n_points: rule.n_points(),
        gaps: eigenvalues.iter().map(|l| 2.0 * PI - l).collect(),
        eigenvalues,
        log_fredholm,
        all_eigenvalues: all,
    })
}

/// `|Σ λ_n − 4Q| / 4Q` over the full spectrum.
pub fn trace_check(spec: &SpectrumOutput) -> f64 {
    let total: f64 = spec.all_eigenvalues.iter().sum();
    let target = 4.0 * spec.q_half_width;
    (total - target).abs() / target
}

/// Count `#{λ_n/2π > μ}` against `(2Q/π) log(1/μ)`.
pub fn counting_check(spec: &SpectrumOutput, mu: f64) -> Result<CountingCheck> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::Argument(format!("mu must lie in (0, 1), got {mu}")));
    }
    if spec.q_half_width < 50.0 {
        return Err(Error::Argument(format!(
            "counting law needs Q >= 50, got {}",
            spec.q_half_width
        )));
    }
    let count = spec
        .all_eigenvalues
        .iter()
        .filter(|&&l| l / (2.0 * PI) > mu)
        .count();
    let prediction = 2.0 * spec.q_half_width / PI * (1.0 / mu).ln();
    Ok(CountingCheck {
        count,
        prediction,
        relative_deviation: (count as f64 - prediction).abs() / prediction,
    })
}

fn check_q_span(q_values: &[f64], min_len: usize) -> Result<()> {
    if q_values.len() < min_len {
        return Err(Error::Argument(format!(
            "need at least {min_len} Q values, got {}",
            q_values.len()
        )));
    }
    if q_values.iter().any(|&q| !(q > 0.0)) {
        return Err(Error::Argument("Q values must be positive".into()));
    }
    Ok(())
}

/// Fit `Q·Δ₀(Q)` against `{1, log Q}` from precomputed gaps.
pub fn gap_fit_from(q_values: &[f64], gap0: &[f64]) -> Result<FitResult> {
    check_q_span(q_values, 4)?;
    let (lo, hi) = min_max(q_values);
    if hi / lo < 10.0 {
        return Err(Error::Argument(format!(
            "Q values must span a factor of 10, got [{lo}, {hi}]"
        )));
    }
    let y: Vec<f64> = q_values.iter().zip(gap0).map(|(q, d)| q * d).collect();
    let basis = |q: f64| vec![1.0, q.ln()];
    let labels = ["1", "log Q"];
    let fit = fit_basis(q_values, &y, &labels, basis, 0.0)?;
    with_nested_stability(fit, q_values, &y, &labels, basis, 0.0)
}

/// Eigen-solve at each `Q` and fit the compensated gap.
pub fn compensated_gap_fit(q_values: &[f64]) -> Result<GapFit> {
    check_q_span(q_values, 4)?;
    let mut qs = q_values.to_vec();
    qs.sort_by(f64::total_cmp);
    let mut gap0 = Vec::with_capacity(qs.len());
    let mut gap1 = Vec::with_capacity(qs.len());
    for &q in &qs {
        let s = eigen_spectrum(q, None, 2)?;
        gap0.push(s.gaps[0]);
        gap1.push(s.gaps[1]);
    }
    let fit = gap_fit_from(&qs, &gap0)?;
    Ok(GapFit {
        fit,
        q_values: qs,
        gap0,
        gap1,
    })
}

/// Fit `log F` against `{Q, log Q, 1}` from precomputed values.
pub fn fredholm_fit_from(q_values: &[f64], log_f: &[f64]) -> Result<FredholmAnalysis> {
    check_q_span(q_values, 5)?;
    let basis = |q: f64| vec![q, q.ln(), 1.0];
    let labels = ["Q", "log Q", "1"];
    let fit = fit_basis(q_values, log_f, &labels, basis, 0.0)?;
    if fit.condition_estimate > MAX_FIT_CONDITION {
        return Err(Error::IllConditioned {
            context: "Fredholm determinant fit".into(),
            condition: fit.condition_estimate,
            limit: MAX_FIT_CONDITION,
        });
    }
    let fit = with_nested_stability(fit, q_values, log_f, &labels, basis, 0.0)?;
    Ok(FredholmAnalysis {
        szego_slope: -fit.coefficients[0] / 2.0,
        alpha_fh: fit.coefficients[1],
        beta_fh: fit.coefficients[2],
        fit,
    })
}

/// Eigen-solve at each `Q` and fit `log F(Q)`.
pub fn fredholm_analysis(q_values: &[f64]) -> Result<FredholmAnalysis> {
    check_q_span(q_values, 5)?;
    let mut qs = q_values.to_vec();
    qs.sort_by(f64::total_cmp);
    let log_f = qs
        .iter()
        .map(|&q| eigen_spectrum(q, None, 0).map(|s| s.log_fredholm))
        .collect::<Result<Vec<_>>>()?;
    fredholm_fit_from(&qs, &log_f)
}

/// `(Δ₀ measured, π/(Q·ρ̃(0;Q)))`.
pub fn gap_density_link(q_half_width: f64) -> Result<(f64, f64)> {
    if !(q_half_width >= 50.0) {
        return Err(Error::Argument(format!(
            "gap-density link needs Q >= 50, got {q_half_width}"
        )));
    }
    let measured = eigen_spectrum(q_half_width, None, 1)?.gaps[0];
    let rho0 = solve_rescaled(q_half_width, None)?.rho0;
    Ok((measured, PI / (q_half_width * rho0)))
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        })
}
