//! Wiener-Hopf factorisation of the symbol `Σ(p) = 1 − e^{−|p|}`.
//!
//! `K₊(z) = √(−iz) exp[−(iz/2π) log(−iz)] / Γ(1 − iz/2π)` is analytic off the
//! negative imaginary axis, `K₋` is its mirror, and `K₊K₋ = Σ` on the real
//! line. `G± = K±/√(∓iz)` are the regularised factors with `G±(0) = 1`.

use crate::error::{Error, Result};
use crate::specfun::{adaptive::integrate, digamma, log_gamma_complex, ComplexValue, EULER_GAMMA};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Factor values at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WhFactorValue {
    pub z: ComplexValue,
    pub k_plus: ComplexValue,
    pub k_minus: ComplexValue,
    pub g_plus: ComplexValue,
    pub g_minus: ComplexValue,
}

/// One row of a real-axis grid evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WhGridRow {
    pub p: f64,
    pub sigma: f64,
    pub k_plus: ComplexValue,
    pub k_minus: ComplexValue,
    pub g_plus: ComplexValue,
    pub g_minus: ComplexValue,
    /// `|K₊K₋ − Σ|`.
    pub factor_residual: f64,
    /// `|K₋ − conj K₊|`.
    pub conjugate_residual: f64,
}

/// Zero of `1 − e^{−p}` nearest the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstantonCheck {
    /// `|1 − e^{−2πi}|`.
    pub residual: f64,
    /// Implied action `2π`.
    pub action: f64,
}

/// `Σ(p) = 1 − e^{−|p|}` without cancellation near 0.
pub fn symbol_sigma(p: f64) -> f64 {
    -(-p.abs()).exp_m1()
}

/// `1 − e^{−p}` for complex `p`, continued from `p > 0`.
pub fn symbol_sigma_complex(p: ComplexValue) -> ComplexValue {
    // 1 − e^{−p} = −expm1(−p); for |p| small use the series
    if p.norm() < 1e-5 {
        return p - p * p / 2.0 + p * p * p / 6.0;
    }
    Complex64::new(1.0, 0.0) - (-p).exp()
}

/// `log(−iz)` and `log(iz)` with the hard-coded real-axis values.
fn logs(z: ComplexValue) -> (ComplexValue, ComplexValue) {
    if z.im == 0.0 {
        let l = z.re.abs().ln();
        let s = z.re.signum();
        (
            Complex64::new(l, -FRAC_PI_2 * s),
            Complex64::new(l, FRAC_PI_2 * s),
        )
    } else {
        let i = Complex64::i();
        ((-i * z).ln(), (i * z).ln())
    }
}

/// `K±` and `G±` at `z`.
///
/// # Errors
/// [`Error::Domain`] at `z = 0` or on either branch cut (negative imaginary
/// axis for `K₊`, positive imaginary axis for `K₋`).
pub fn wh_factors(z: ComplexValue) -> Result<WhFactorValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.re == 0.0 {
        if z.im == 0.0 {
            return Err(Error::Domain(
                "z = 0 is the common branch point of K+ and K-".into(),
            ));
        }
        return Err(Error::Domain(if z.im < 0.0 {
            format!("z = {z} lies on the K+ branch cut (negative imaginary axis)")
        } else {
            format!("z = {z} lies on the K- branch cut (positive imaginary axis)")
        }));
    }
    let i = Complex64::i();
    let iz = i * z;
    let (lp, lm) = logs(z);
    let two_pi = 2.0 * PI;
    let log_g_plus = -(iz / two_pi) * lp - log_gamma_complex(1.0 - iz / two_pi)?;
    let log_g_minus = (iz / two_pi) * lm - log_gamma_complex(1.0 + iz / two_pi)?;
    let g_plus = log_g_plus.exp();
    let g_minus = log_g_minus.exp();
    Ok(WhFactorValue {
        z,
        k_plus: (0.5 * lp + log_g_plus).exp(),
        k_minus: (0.5 * lm + log_g_minus).exp(),
        g_plus,
        g_minus,
    })
}

/// Real-axis factors.
pub fn wh_factors_real(p: f64) -> Result<WhFactorValue> {
    wh_factors(Complex64::new(p, 0.0))
}

/// `|p| e^{−|p|/2} / [Γ(1+ip/2π) Γ(1−ip/2π)]`, which equals `Σ(p)`.
pub fn three_factor_symbol(p: f64) -> Result<f64> {
    let x = p / (2.0 * PI);
    let lg =
        log_gamma_complex(Complex64::new(1.0, x))? + log_gamma_complex(Complex64::new(1.0, -x))?;
    Ok(p.abs() * (-0.5 * p.abs() - lg.re).exp())
}

/// Evaluate factors and residuals on the given real points.
pub fn grid_evaluation(p_values: &[f64]) -> Result<Vec<WhGridRow>> {
    p_values
        .iter()
        .map(|&p| {
            let f = wh_factors_real(p)?;
            let sigma = symbol_sigma(p);
            Ok(WhGridRow {
                p,
                sigma,
                k_plus: f.k_plus,
                k_minus: f.k_minus,
                g_plus: f.g_plus,
                g_minus: f.g_minus,
                factor_residual: (f.k_plus * f.k_minus - sigma).norm(),
                conjugate_residual: (f.k_minus - f.k_plus.conj()).norm(),
            })
        })
        .collect()
}

/// `n` equispaced points on `[−p_max, p_max]` with `|p| < exclude` dropped.
pub fn real_grid(n: usize, p_max: f64, exclude: f64) -> Vec<f64> {
    (0..n)
        .map(|k| -p_max + 2.0 * p_max * k as f64 / (n - 1).max(1) as f64)
        .filter(|p| p.abs() >= exclude)
        .collect()
}

/// Largest `|K₊K₋ − Σ|` over [`real_grid`]`(400, 20, 1e−3)`.
pub fn factorisation_residual() -> Result<f64> {
    let rows = grid_evaluation(&real_grid(400, 20.0, 1e-3))?;
    Ok(rows.iter().map(|r| r.factor_residual).fold(0.0, f64::max))
}

/// Closed-form peak prediction `(1/π)[ψ(1+2Q) + γ_E]`.
pub fn wh_peak_density(q_half_width: f64) -> Result<f64> {
    if !(q_half_width > 0.0) || !q_half_width.is_finite() {
        return Err(Error::Argument(format!(
            "Q must be positive and finite, got {q_half_width}"
        )));
    }
    Ok((digamma(1.0 + 2.0 * q_half_width) + EULER_GAMMA) / PI)
}

/// `|1 − e^{−p}|` at `p = 2πi`, and the action `2π`.
pub fn instanton_zero_check() -> InstantonCheck {
    InstantonCheck {
        residual: symbol_sigma_complex(Complex64::new(0.0, 2.0 * PI)).norm(),
        action: 2.0 * PI,
    }
}

/// Leading spectral response `R(p; Q) = 1 − e^{−2pQ}`.
pub fn spectral_response_model(p: f64, q_half_width: f64) -> Result<f64> {
    if !(p >= 0.0) || !(q_half_width > 0.0) {
        return Err(Error::Argument(format!(
            "need p >= 0 and Q > 0, got p = {p}, Q = {q_half_width}"
        )));
    }
    Ok(-(-2.0 * p * q_half_width).exp_m1())
}

/// `(1/π) ∫₀^∞ R(p;Q)/(e^p − 1) dp` by adaptive quadrature on `[0, 80]`.
pub fn response_model_peak_integral(q_half_width: f64) -> Result<f64> {
    let q = q_half_width;
    spectral_response_model(0.0, q)?;
    let f = |p: f64| {
        if p == 0.0 {
            2.0 * q
        } else {
            -(-2.0 * p * q).exp_m1() / p.exp_m1()
        }
    };
    Ok(integrate(f, 0.0, 80.0, 1e-13, 1e-14)?.value / PI)
}
