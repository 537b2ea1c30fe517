//! Special functions on the lines the solver needs: complex log-gamma, the
//! digamma function (in particular on `1 + iξ`), harmonic numbers, the
//! universal profile `Φ`, and the subtracted Bose mode sum `S`.
//!
//! Everything here is a pure function. The adaptive integrator in
//! [`adaptive`] exists only for identity checks.

pub mod adaptive;

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

pub use adaptive::{integrate, Integral};

/// Complex number used by the special-function and Wiener-Hopf evaluators.
pub type ComplexValue = Complex64;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// B_{2k} / (2k), k = 1..7
const DIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

/// Shift applied before the asymptotic digamma series.
const DIGAMMA_SHIFT: usize = 10;

/// Principal branch of `log Γ(z)`.
///
/// Uses a 9-term Lanczos approximation with `g = 7` for `Re z ≥ 1/2` and the
/// reflection formula `log Γ(z) = log π − log sin(πz) − log Γ(1−z)` otherwise.
///
/// # Errors
/// Returns [`Error::Domain`] at the poles `z = 0, −1, −2, …`.
pub fn log_gamma_complex(z: ComplexValue) -> Result<ComplexValue> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!(
            "log_gamma of non-finite argument {z}"
        )));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Domain(format!(
            "log_gamma has a pole at z = {}",
            z.re
        )));
    }
    if z.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        let s = (pi * z).sin();
        return Ok(pi.ln() - s.ln() - log_gamma_complex(1.0 - z)?);
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (zm1 + 0.5) * t.ln() - t + acc.ln())
}

/// Complex digamma `ψ(z)`.
///
/// Shifts the argument by +10 with the recurrence `ψ(z) = ψ(z+1) − 1/z` and
/// finishes with the Bernoulli asymptotic series; reflection handles
/// `Re z < 1/2`. Poles produce non-finite output.
pub fn digamma_complex(z: ComplexValue) -> ComplexValue {
    if z.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return digamma_complex(1.0 - z) - pi / (pi * z).tan();
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    for _ in 0..DIGAMMA_SHIFT {
        shift += w.inv();
        w += 1.0;
    }
    digamma_asymptotic(w) - shift
}

fn digamma_asymptotic(w: ComplexValue) -> ComplexValue {
    let inv2 = (w * w).inv();
    let mut pow = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for &c in DIGAMMA_ASYMP.iter() {
        series += c * pow;
        pow *= inv2;
    }
    w.ln() - 0.5 * w.inv() - series
}

/// Real digamma `ψ(x)`; non-finite at the poles `x = 0, −1, …`.
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return f64::NAN;
    }
    if x < 0.5 {
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut shift = 0.0;
    let mut w = x;
    while w < 10.0 {
        shift += 1.0 / w;
        w += 1.0;
    }
    let inv2 = 1.0 / (w * w);
    let mut pow = inv2;
    let mut series = 0.0;
    for &c in DIGAMMA_ASYMP.iter() {
        series += c * pow;
        pow *= inv2;
    }
    w.ln() - 0.5 / w - series - shift
}

/// `Re ψ(1 + iξ)`, even in `ξ`.
pub fn re_digamma_one_plus_i(xi: f64) -> f64 {
    digamma_complex(Complex64::new(1.0, xi.abs())).re
}

/// Profile function `Φ(ξ) = log|ξ| − Re ψ(1+iξ)`.
///
/// # Errors
/// `ξ = 0` is a logarithmic singularity.
pub fn profile_phi(xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::Domain(
            "profile_phi is logarithmically singular at xi = 0".into(),
        ));
    }
    Ok(xi.abs().ln() - re_digamma_one_plus_i(xi))
}

/// Closed form of the subtracted mode sum, `S(ξ) = −Re ψ(1+iξ) − γ_E`.
pub fn mode_sum_closed(xi: f64) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    -re_digamma_one_plus_i(xi) - EULER_GAMMA
}

/// One sample of `Φ` and `S` at `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub xi: f64,
    /// `NaN` at `ξ = 0`.
    pub phi: f64,
    pub s: f64,
}

pub fn profile_sample(xi: f64) -> ProfileSample {
    ProfileSample {
        xi,
        phi: profile_phi(xi).unwrap_or(f64::NAN),
        s: mode_sum_closed(xi),
    }
}

/// Partial sum `Σ_{n=1}^{n_max} [n/(n²+ξ²) − 1/n]`.
///
/// Each term is evaluated as `−ξ²/(n(n²+ξ²))` and the sum runs from the
/// smallest terms up.
pub fn subtracted_mode_sum(xi: f64, n_max: usize) -> f64 {
    let x2 = xi * xi;
    (1..=n_max)
        .rev()
        .map(|n| {
            let n = n as f64;
            -x2 / (n * (n * n + x2))
        })
        .sum()
}

/// Harmonic number `H_n`, summed from the smallest term.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// Both sides of `∫₀^L Re ψ(1+iξ) dξ = Im log Γ(1+iL)`.
///
/// Returns `(lhs, rhs)`: adaptive quadrature and the log-gamma value.
pub fn im_log_gamma_integral_check(l: f64) -> Result<(f64, f64)> {
    if !(l > 0.0) {
        return Err(Error::Argument(format!("L must be positive, got {l}")));
    }
    let lhs = integrate(re_digamma_one_plus_i, 0.0, l, 1e-13, 1e-14)?.value;
    let rhs = log_gamma_complex(Complex64::new(1.0, l))?.im;
    Ok((lhs, rhs))
}

/// Stirling form `L log L − L + π/4` of `Im log Γ(1+iL)`.
pub fn stirling_im_log_gamma(l: f64) -> f64 {
    l * l.ln() - l + PI / 4.0
}

/// Cut-off used for the improper identity integrals.
pub const IDENTITY_CUTOFF: f64 = 1.0e4;

/// `∫₀^∞ [Re ψ(1+iξ) + γ_E]/(1+ξ²) dξ`, expected `π/2`.
///
/// Quadrature on `[0, L]` with `L = 10⁴`. The tail uses
/// `Re ψ(1+iξ) ≈ log ξ` and `1/(1+ξ²) ≈ 1/ξ²`, giving `(log L + 1 + γ_E)/L`
/// with remainder `O(log L / L³)`.
pub fn digamma_identity_integral() -> Result<f64> {
    let l = IDENTITY_CUTOFF;
    let body = integrate(
        |x| (re_digamma_one_plus_i(x) + EULER_GAMMA) / (1.0 + x * x),
        0.0,
        l,
        1e-13,
        1e-14,
    )?
    .value;
    let tail = (l.ln() + 1.0 + EULER_GAMMA) / l;
    Ok(body + tail)
}

/// `∫₀^∞ Φ(ξ) dξ`, expected `−π/4`.
///
/// Quadrature on `[0, L]` with `L = 10⁴` plus the tail `∫_L^∞ c/ξ² = c/L`,
/// where `c = L²·Φ(L)` is read off at the cut (asymptotically `c → −1/12`).
pub fn profile_integral() -> Result<f64> {
    let l = IDENTITY_CUTOFF;
    let body = integrate(
        |x| {
            if x == 0.0 {
                0.0
            } else {
                x.ln() - re_digamma_one_plus_i(x)
            }
        },
        0.0,
        l,
        1e-10,
        1e-12,
    )?
    .value;
    let c = l * l * profile_phi(l)?;
    Ok(body + c / l)
}
