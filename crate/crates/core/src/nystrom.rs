//! Nyström solution of the rescaled ground-state equation
//!
//! `2π ρ̃(ξ) = 2/(1+ξ²) + ∫_{−Q}^{Q} 2/(1+(ξ−η)²) ρ̃(η) dη`
//!
//! and of its Love dual `f = 1 + (1/π)∫ f(η)/(1+(ξ−η)²) dη`, plus the
//! observables and identities derived from them.
//!
//! Both equations have even solutions on a symmetric rule, so by default
//! the system is folded onto the nonnegative nodes (kernel
//! `K(x_i−x_j) + K(x_i+x_j)`), which cuts the LU cost by a factor of eight.
//! [`Discretisation::Full`] keeps the unfolded system for cross-checks.

use crate::error::{Error, Result};
use crate::linalg::Factored;
use crate::quadrature::{default_n, rule_on_interval, uncapped_n, QuadratureRule, N_CAP};
use crate::specfun::{harmonic, re_digamma_one_plus_i, EULER_GAMMA};
use faer::Mat;
use serde::Serialize;
use std::f64::consts::PI;

/// Refuse solves whose condition estimate exceeds this.
pub const MAX_CONDITION: f64 = 1e12;

/// Lorentzian kernel `K(x) = 2/(1+x²)`; also the driving term.
#[inline]
pub fn lorentzian(x: f64) -> f64 {
    2.0 / (1.0 + x * x)
}

/// How the linear system is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Discretisation {
    /// Half-size system on `ξ ≥ 0` using the parity of the solution.
    #[default]
    ParityFolded,
    /// The full `N × N` Nyström matrix.
    Full,
}

/// Rescaled density on the nodes plus derived observables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutput {
    pub q_half_width: f64,
    pub n_points: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub rho_at_nodes: Vec<f64>,
    /// `ρ̃(0; Q)` from the integral equation evaluated at `ξ = 0`.
    pub rho0: f64,
    /// `D(Q) = Σ ρ_j ω_j`.
    pub total_density: f64,
    /// `E_inner(Q) = Σ 2ρ_j ω_j/(1+ξ_j²)`.
    pub inner_energy: f64,
    pub condition_estimate: f64,
    pub refinement_correction: f64,
    pub discretisation: Discretisation,
    pub warnings: Vec<String>,
}

impl SolveOutput {
    /// `ρ̃(0) − log Q / π`.
    pub fn c_eff(&self) -> f64 {
        self.rho0 - self.q_half_width.ln() / PI
    }

    /// Nyström interpolant `[g(ξ) + Σ K(ξ−ξ_j) ρ_j ω_j] / 2π`.
    pub fn density_at(&self, xi: f64) -> f64 {
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.rho_at_nodes)
            .map(|((&x, &w), &r)| lorentzian(xi - x) * r * w)
            .sum();
        (lorentzian(xi) + s) / (2.0 * PI)
    }
}

/// Solution of the Love equation on the nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoveOutput {
    pub q_half_width: f64,
    pub n_points: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub f_at_nodes: Vec<f64>,
    /// `f(0) = 1 + (1/π) Σ f_j ω_j/(1+ξ_j²)`.
    pub f0: f64,
    pub condition_estimate: f64,
}

impl LoveOutput {
    /// `⟨f, g/2π⟩ = (1/π) Σ f_j ω_j/(1+ξ_j²)`, equal to `D(Q)`.
    pub fn duality_integral(&self) -> f64 {
        weighted_lorentz_sum(&self.nodes, &self.weights, &self.f_at_nodes) / (2.0 * PI)
    }
}

/// Physical-variable observables obtained by undoing `ξ = λ/κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalObservables {
    pub kappa: f64,
    /// `q = κ Q`.
    pub fermi_q: f64,
    /// `ρ(0; κ) = ρ̃(0)/κ`.
    pub peak_density_physical: f64,
    /// `e(κ) = −E_inner/κ` (integral term only).
    pub energy_per_site: f64,
    pub density: f64,
}

/// `(r_value, constraint_residual)` of the R-integral check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RIntegralCheck {
    pub r_value: f64,
    pub constraint_residual: f64,
    pub total_density: f64,
}

fn weighted_lorentz_sum(nodes: &[f64], weights: &[f64], values: &[f64]) -> f64 {
    nodes
        .iter()
        .zip(weights)
        .zip(values)
        .map(|((&x, &w), &v)| lorentzian(x) * v * w)
        .sum()
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "Q must be positive and finite, got {q}"
        )))
    }
}

/// Build the rescaled system `A = 2πI − K W`, `d_i = 2/(1+ξ_i²)`.
pub fn assemble_system(rule: &QuadratureRule) -> (Mat<f64>, Vec<f64>) {
    let x = &rule.nodes;
    let w = &rule.weights;
    let n = x.len();
    let a = Mat::from_fn(n, n, |i, j| {
        let k = w[j] * lorentzian(x[i] - x[j]);
        if i == j {
            2.0 * PI - k
        } else {
            -k
        }
    });
    (a, x.iter().map(|&xi| lorentzian(xi)).collect())
}

// Even second-kind problem `diag·u − Σ_j scale·K(ξ_i−ξ_j) ω_j u_j = rhs(ξ_i)`.
struct EvenProblem {
    diag: f64,
    kernel_scale: f64,
    rhs: fn(f64) -> f64,
}

struct EvenSolution {
    values: Vec<f64>,
    condition: f64,
    correction: f64,
}

fn solve_even(
    rule: &QuadratureRule,
    p: &EvenProblem,
    mode: Discretisation,
) -> Result<EvenSolution> {
    let x = &rule.nodes;
    let w = &rule.weights;
    let n = x.len();
    let kern = |a: f64| p.kernel_scale * lorentzian(a);
    let (matrix, rhs, offset) = match mode {
        Discretisation::Full => {
            let m = Mat::from_fn(n, n, |i, j| {
                let k = w[j] * kern(x[i] - x[j]);
                if i == j {
                    p.diag - k
                } else {
                    -k
                }
            });
            (m, x.iter().map(|&v| (p.rhs)(v)).collect::<Vec<_>>(), 0)
        }
        Discretisation::ParityFolded => {
            // reduced unknowns are the nodes n/2..n; for odd n the first is ξ = 0
            let h = n / 2;
            let m = n - h;
            let centre = n % 2 == 1;
            let mat = Mat::from_fn(m, m, |r, s| {
                let (xi, xj) = (x[h + r], x[h + s]);
                let mut k = kern(xi - xj);
                if !(centre && s == 0) {
                    k += kern(xi + xj);
                }
                let k = k * w[h + s];
                if r == s {
                    p.diag - k
                } else {
                    -k
                }
            });
            (mat, (h..n).map(|i| (p.rhs)(x[i])).collect(), h)
        }
    };
    let f = Factored::new(matrix);
    let condition = f.condition_estimate();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned {
            context: format!("Nystrom system at Q = {}, N = {n}", rule.q_half_width),
            condition,
            limit: MAX_CONDITION,
        });
    }
    let sol = f.solve_refined(&rhs)?;
    let values = match mode {
        Discretisation::Full => sol.x,
        Discretisation::ParityFolded => {
            let mut full = vec![0.0; n];
            for (r, &v) in sol.x.iter().enumerate() {
                full[offset + r] = v;
                full[n - 1 - (offset + r)] = v;
            }
            full
        }
    };
    Ok(EvenSolution {
        values,
        condition,
        correction: sol.correction,
    })
}

fn size_warnings(q: f64, n: usize, explicit: bool) -> Vec<String> {
    let mut w = Vec::new();
    if !explicit && uncapped_n(q) > N_CAP {
        w.push(format!(
            "N capped at {N_CAP}; round(10Q)+400 = {} would be needed for the reference resolution",
            uncapped_n(q)
        ));
    }
    if (n as f64) < 10.0 * q {
        w.push(format!(
            "N = {n} is below 10Q = {}; convergence not assured",
            10.0 * q
        ));
    }
    w
}

/// Solve the rescaled equation with the folded discretisation.
///
/// `n_points` defaults to [`default_n`].
pub fn solve_rescaled(q_half_width: f64, n_points: Option<usize>) -> Result<SolveOutput> {
    solve_rescaled_with(q_half_width, n_points, Discretisation::ParityFolded)
}

pub fn solve_rescaled_with(
    q_half_width: f64,
    n_points: Option<usize>,
    mode: Discretisation,
) -> Result<SolveOutput> {
    check_q(q_half_width)?;
    let n = n_points.unwrap_or_else(|| default_n(q_half_width));
    let rule = rule_on_interval(q_half_width, n)?;
    solve_on_rule(
        rule,
        mode,
        size_warnings(q_half_width, n, n_points.is_some()),
    )
}

/// Solve on a caller-supplied symmetric rule.
pub fn solve_on_rule(
    rule: QuadratureRule,
    mode: Discretisation,
    warnings: Vec<String>,
) -> Result<SolveOutput> {
    let problem = EvenProblem {
        diag: 2.0 * PI,
        kernel_scale: 1.0,
        rhs: lorentzian,
    };
    let sol = solve_even(&rule, &problem, mode)?;
    let rho = sol.values;
    let inner_energy = weighted_lorentz_sum(&rule.nodes, &rule.weights, &rho);
    let rho0 = (2.0 + inner_energy) / (2.0 * PI);
    let total_density = rho.iter().zip(&rule.weights).map(|(r, w)| r * w).sum();
    Ok(SolveOutput {
        q_half_width: rule.q_half_width,
        n_points: rule.n_points(),
        nodes: rule.nodes,
        weights: rule.weights,
        rho_at_nodes: rho,
        rho0,
        total_density,
        inner_energy,
        condition_estimate: sol.condition,
        refinement_correction: sol.correction,
        discretisation: mode,
        warnings,
    })
}

/// Solve the Love equation with the folded discretisation.
pub fn solve_love(q_half_width: f64, n_points: Option<usize>) -> Result<LoveOutput> {
    solve_love_with(q_half_width, n_points, Discretisation::ParityFolded)
}

pub fn solve_love_with(
    q_half_width: f64,
    n_points: Option<usize>,
    mode: Discretisation,
) -> Result<LoveOutput> {
    check_q(q_half_width)?;
    let n = n_points.unwrap_or_else(|| default_n(q_half_width));
    let rule = rule_on_interval(q_half_width, n)?;
    let problem = EvenProblem {
        diag: 1.0,
        kernel_scale: 0.5 / PI,
        rhs: |_| 1.0,
    };
    let sol = solve_even(&rule, &problem, mode)?;
    let f = sol.values;
    let f0 = 1.0 + weighted_lorentz_sum(&rule.nodes, &rule.weights, &f) / (2.0 * PI);
    Ok(LoveOutput {
        q_half_width,
        n_points: n,
        nodes: rule.nodes,
        weights: rule.weights,
        f_at_nodes: f,
        f0,
        condition_estimate: sol.condition,
    })
}

/// `|E_inner − (2π ρ̃(0) − 2)|`.
pub fn energy_identity_residual(out: &SolveOutput) -> f64 {
    (out.inner_energy - (2.0 * PI * out.rho0 - 2.0)).abs()
}

/// Mode-sum estimate `2(H_{⌊2Q⌋+1} − 1)` of `E_inner`.
pub fn mode_sum_energy(q_half_width: f64) -> Result<f64> {
    check_q(q_half_width)?;
    let m = (2.0 * q_half_width).floor() as usize + 1;
    Ok(2.0 * (harmonic(m) - 1.0))
}

/// Inner approximation `(1/π)[log 2Q − Re ψ(1+iξ)]`.
pub fn inner_profile_approx(xi: f64, q_half_width: f64) -> Result<f64> {
    if !(q_half_width > 1.0) {
        return Err(Error::Argument(format!(
            "inner profile needs Q > 1, got {q_half_width}"
        )));
    }
    Ok(((2.0 * q_half_width).ln() - re_digamma_one_plus_i(xi)) / PI)
}

/// Mean of `ρ̃` over nodes with `5 ≤ |ξ| ≤ Q − 5`.
pub fn bulk_sample(out: &SolveOutput) -> Result<f64> {
    if out.q_half_width < 20.0 {
        return Err(Error::Argument(format!(
            "bulk sample needs Q >= 20, got {}",
            out.q_half_width
        )));
    }
    let hi = out.q_half_width - 5.0;
    let (s, c) = out
        .nodes
        .iter()
        .zip(&out.rho_at_nodes)
        .filter(|(x, _)| (5.0..=hi).contains(&x.abs()))
        .fold((0.0, 0usize), |(s, c), (_, &r)| (s + r, c + 1));
    Ok(s / c as f64)
}

/// `R(Q) = Σ (f_j − f0) ω_j/(1+ξ_j²)` against `−π + 2(1+D)/Q`.
pub fn r_integral_check(q_half_width: f64) -> Result<RIntegralCheck> {
    if !(q_half_width >= 10.0) {
        return Err(Error::Argument(format!(
            "R-integral check needs Q >= 10, got {q_half_width}"
        )));
    }
    let love = solve_love(q_half_width, None)?;
    let rho = solve_rescaled(q_half_width, None)?;
    let r_value: f64 = love
        .nodes
        .iter()
        .zip(&love.weights)
        .zip(&love.f_at_nodes)
        .map(|((&x, &w), &f)| (f - love.f0) * w / (1.0 + x * x))
        .sum();
    let d = rho.total_density;
    let predicted = -PI + 2.0 * (1.0 + d) / q_half_width;
    Ok(RIntegralCheck {
        r_value,
        constraint_residual: (r_value - predicted).abs(),
        total_density: d,
    })
}

/// Undo the rescaling `ξ = λ/κ`.
pub fn to_physical(out: &SolveOutput, kappa: f64) -> Result<PhysicalObservables> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Argument(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    Ok(PhysicalObservables {
        kappa,
        fermi_q: kappa * out.q_half_width,
        peak_density_physical: out.rho0 / kappa,
        energy_per_site: -out.inner_energy / kappa,
        density: out.total_density,
    })
}

/// Leading weak-coupling energy `−(2/κ)[log(2q/κ) + γ_E − 1]`.
pub fn leading_energy_per_site(kappa: f64, fermi_q: f64) -> f64 {
    -(2.0 / kappa) * ((2.0 * fermi_q / kappa).ln() + EULER_GAMMA - 1.0)
}

/// Edge profile `ρ̃(Q − s)/ρ̃(Q − s_ref)` at the given depths `s`.
pub fn edge_profile(out: &SolveOutput, s_ref: f64, depths: &[f64]) -> Vec<f64> {
    let q = out.q_half_width;
    let norm = out.density_at(q - s_ref);
    depths
        .iter()
        .map(|&s| out.density_at(q - s) / norm)
        .collect()
}
