//! Asymptotic constants from sweep data: `C_eff`, Richardson extrapolation,
//! the density expansion `D = Q + a log Q + b + …`, and the perturbative
//! coefficients of `ρ̃(0) − log Q/π − C*`.

use crate::error::{Error, Result};
use crate::linalg::lstsq_svd;
use crate::nystrom::{solve_rescaled, SolveOutput};
use crate::quadrature::uncapped_n;
use crate::specfun::EULER_GAMMA;
use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

/// `C* = (γ_E + log 2)/π`.
pub const C_STAR: f64 = (EULER_GAMMA + LN_2) / PI;

/// Coefficients count as stable below this relative spread.
pub const STABLE_SPREAD: f64 = 0.5;
/// ... and as unstable above this one; in between they are marginal.
pub const UNSTABLE_SPREAD: f64 = 1.0;

/// Default relative SVD truncation for [`resurgence_fit`].
pub const DEFAULT_SVD_THRESHOLD: f64 = 1e-7;

/// Design condition above which density fits are refused.
pub const MAX_FIT_CONDITION: f64 = 1e10;

/// One solved point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepRecord {
    pub q_half_width: f64,
    pub n_points: usize,
    pub rho0: f64,
    pub total_density: f64,
    pub inner_energy: f64,
    /// `rho0 − log Q/π`.
    pub c_eff: f64,
}

impl SweepRecord {
    pub fn from_solve(out: &SolveOutput) -> Self {
        Self {
            q_half_width: out.q_half_width,
            n_points: out.n_points,
            rho0: out.rho0,
            total_density: out.total_density,
            inner_energy: out.inner_energy,
            c_eff: out.c_eff(),
        }
    }
}

/// Rule size used for each `Q` of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SizePolicy {
    /// `round(10Q)+400`, capped at 3000.
    #[default]
    Default,
    /// `round(10Q)+400` with no cap.
    Uncapped,
    Fixed(usize),
}

impl SizePolicy {
    pub fn n_for(self, q: f64) -> Option<usize> {
        match self {
            SizePolicy::Default => None,
            SizePolicy::Uncapped => Some(uncapped_n(q)),
            SizePolicy::Fixed(n) => Some(n),
        }
    }
}

/// Solve each `Q` in order and collect sorted, deduplicated records.
pub fn sweep(q_values: &[f64], policy: SizePolicy) -> Result<Vec<SweepRecord>> {
    let mut out = q_values
        .iter()
        .map(|&q| solve_rescaled(q, policy.n_for(q)).map(|s| SweepRecord::from_solve(&s)))
        .collect::<Result<Vec<_>>>()?;
    sort_records(&mut out);
    Ok(out)
}

/// Sort ascending in `Q` and drop duplicate `Q` values.
pub fn sort_records(records: &mut Vec<SweepRecord>) {
    records.sort_by(|a, b| a.q_half_width.total_cmp(&b.q_half_width));
    records.dedup_by(|a, b| a.q_half_width == b.q_half_width);
}

/// `n` log-spaced values on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Range-stability class of a fitted coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

impl Stability {
    pub fn from_spread(spread: f64) -> Self {
        if spread < STABLE_SPREAD {
            Stability::Stable
        } else if spread <= UNSTABLE_SPREAD {
            Stability::Marginal
        } else {
            Stability::Unstable
        }
    }
}

/// Spread of one coefficient across the nested refits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientStability {
    /// `max |c_sub − c_full| / |c_full|`.
    pub spread: f64,
    pub class: Stability,
}

/// Least-squares fit of sweep data onto a named basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub basis_labels: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residual_max: f64,
    /// `σ_max/σ_min` of the retained modes of the column-normalised design.
    pub condition_estimate: f64,
    pub fit_range: (f64, f64),
    /// Retained SVD modes.
    pub rank: usize,
    /// Normalised singular values, descending.
    pub singular_values: Vec<f64>,
    /// One entry per coefficient; empty when no nested refit was made.
    pub stability: Vec<CoefficientStability>,
    /// `Q` ranges of the nested refits.
    pub nested_ranges: Vec<(f64, f64)>,
}

impl FitResult {
    pub fn coefficient(&self, label: &str) -> Option<f64> {
        self.basis_labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.coefficients[i])
    }
}

/// Fit `y ≈ Σ c_k φ_k(Q)` by truncated SVD (threshold relative to `σ_max`).
pub fn fit_basis<F: Fn(f64) -> Vec<f64>>(
    q: &[f64],
    y: &[f64],
    labels: &[&str],
    basis: F,
    rel_threshold: f64,
) -> Result<FitResult> {
    if q.len() != y.len() || q.is_empty() {
        return Err(Error::Argument(
            "Q and data lengths differ or are empty".into(),
        ));
    }
    let design: Vec<Vec<f64>> = q.iter().map(|&x| basis(x)).collect();
    if design[0].len() != labels.len() {
        return Err(Error::Argument("basis length does not match labels".into()));
    }
    if q.len() < labels.len() {
        return Err(Error::Argument(format!(
            "{} data points cannot determine {} coefficients",
            q.len(),
            labels.len()
        )));
    }
    let ls = lstsq_svd(&design, y, rel_threshold)?;
    let residual_max = design
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let m: f64 = row.iter().zip(&ls.coefficients).map(|(a, c)| a * c).sum();
            (m - yi).abs()
        })
        .fold(0.0, f64::max);
    let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        basis_labels: labels.iter().map(|s| s.to_string()).collect(),
        coefficients: ls.coefficients,
        residual_max,
        condition_estimate: ls.condition.max(1.0),
        fit_range: (lo, hi),
        rank: ls.rank,
        singular_values: ls.singular_values,
        stability: Vec::new(),
        nested_ranges: Vec::new(),
    })
}

/// Refit on two nested sub-ranges and attach per-coefficient spreads.
///
/// The sub-ranges drop the lowest and, separately, the highest `⌈m/8⌉`
/// points (by `Q`). If too few points would remain the fit is returned
/// unchanged.
pub fn with_nested_stability<F: Fn(f64) -> Vec<f64>>(
    mut fit: FitResult,
    q: &[f64],
    y: &[f64],
    labels: &[&str],
    basis: F,
    rel_threshold: f64,
) -> Result<FitResult> {
    let mut idx: Vec<usize> = (0..q.len()).collect();
    idx.sort_by(|&a, &b| q[a].total_cmp(&q[b]));
    let m = idx.len();
    let trim = m.div_ceil(8);
    if m - trim < labels.len() {
        return Ok(fit);
    }
    let subsets = [&idx[trim..], &idx[..m - trim]];
    let mut spreads = vec![0.0_f64; labels.len()];
    for sub in subsets {
        let qs: Vec<f64> = sub.iter().map(|&i| q[i]).collect();
        let ys: Vec<f64> = sub.iter().map(|&i| y[i]).collect();
        let f = fit_basis(&qs, &ys, labels, &basis, rel_threshold)?;
        for (k, s) in spreads.iter_mut().enumerate() {
            let c = fit.coefficients[k];
            let d = (f.coefficients[k] - c).abs();
            *s = s.max(if c == 0.0 {
                if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                d / c.abs()
            });
        }
        fit.nested_ranges.push(f.fit_range);
    }
    fit.stability = spreads
        .into_iter()
        .map(|spread| CoefficientStability {
            spread,
            class: Stability::from_spread(spread),
        })
        .collect();
    Ok(fit)
}

/// Exact three-point extrapolation in the basis `{1, log Q/Q, 1/Q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RichardsonResult {
    pub c_extrapolated: f64,
    /// Coefficient of `log Q/Q`.
    pub a1: f64,
    /// Coefficient of `1/Q`.
    pub a0: f64,
    pub q_triple: (f64, f64, f64),
}

impl RichardsonResult {
    pub fn model(&self, q: f64) -> f64 {
        self.c_extrapolated + self.a1 * q.ln() / q + self.a0 / q
    }
}

/// Solve the 3×3 system `C + a₁ log Q_i/Q_i + a₀/Q_i = c_i`.
///
/// # Errors
/// [`Error::Argument`] unless the `Q` values are positive, distinct and
/// ascending, or if the system is numerically singular.
pub fn richardson3(samples: [(f64, f64); 3]) -> Result<RichardsonResult> {
    let q = [samples[0].0, samples[1].0, samples[2].0];
    if !(q[0] > 0.0 && q[0] < q[1] && q[1] < q[2]) {
        return Err(Error::Argument(format!(
            "Richardson needs three positive ascending Q values, got {q:?}"
        )));
    }
    let a = Mat::from_fn(3, 3, |i, j| match j {
        0 => 1.0,
        1 => q[i].ln() / q[i],
        _ => 1.0 / q[i],
    });
    let lu = a.partial_piv_lu();
    let mut b = Mat::from_fn(3, 1, |i, _| samples[i].1);
    lu.solve_in_place(b.as_mut());
    let sol = [b[(0, 0)], b[(1, 0)], b[(2, 0)]];
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument(format!(
            "degenerate Richardson triple {q:?}"
        )));
    }
    Ok(RichardsonResult {
        c_extrapolated: sol[0],
        a1: sol[1],
        a0: sol[2],
        q_triple: (q[0], q[1], q[2]),
    })
}

/// Richardson on the records whose `Q` match the triple.
pub fn richardson_from_records(
    records: &[SweepRecord],
    triple: [f64; 3],
) -> Result<RichardsonResult> {
    let find = |q: f64| {
        records
            .iter()
            .find(|r| r.q_half_width == q)
            .map(|r| (q, r.c_eff))
            .ok_or_else(|| Error::Argument(format!("no sweep record at Q = {q}")))
    };
    richardson3([find(triple[0])?, find(triple[1])?, find(triple[2])?])
}

/// One row of the `C_eff` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CRow {
    pub q_half_width: f64,
    pub n_points: usize,
    pub c_eff: f64,
    pub deviation: f64,
}

/// `C_eff` table, Richardson triples and the constrained fit with `C = C*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantReport {
    pub c_star: f64,
    pub rows: Vec<CRow>,
    /// All ascending triples, ordered by `|C − C*|`.
    pub best_triples: Vec<RichardsonResult>,
    /// `C_eff − C*` against `{log Q/Q, 1/Q}`.
    pub constrained: FitResult,
}

pub fn constant_c_report(records: &[SweepRecord]) -> Result<ConstantReport> {
    if records.len() < 3 {
        return Err(Error::Argument("need at least three sweep records".into()));
    }
    let mut recs = records.to_vec();
    sort_records(&mut recs);
    let rows = recs
        .iter()
        .map(|r| CRow {
            q_half_width: r.q_half_width,
            n_points: r.n_points,
            c_eff: r.c_eff,
            deviation: r.c_eff - C_STAR,
        })
        .collect();
    let mut triples = Vec::new();
    for i in 0..recs.len() {
        for j in i + 1..recs.len() {
            for k in j + 1..recs.len() {
                let s = [
                    (recs[i].q_half_width, recs[i].c_eff),
                    (recs[j].q_half_width, recs[j].c_eff),
                    (recs[k].q_half_width, recs[k].c_eff),
                ];
                triples.push(richardson3(s)?);
            }
        }
    }
    triples.sort_by(|a, b| {
        (a.c_extrapolated - C_STAR)
            .abs()
            .total_cmp(&(b.c_extrapolated - C_STAR).abs())
    });
    let q: Vec<f64> = recs.iter().map(|r| r.q_half_width).collect();
    let y: Vec<f64> = recs.iter().map(|r| r.c_eff - C_STAR).collect();
    let constrained = fit_basis(
        &q,
        &y,
        &["log Q/Q", "1/Q"],
        |q| vec![q.ln() / q, 1.0 / q],
        0.0,
    )?;
    Ok(ConstantReport {
        c_star: C_STAR,
        rows,
        best_triples: triples,
        constrained,
    })
}

/// Fit of the density excess `D − Q`.
///
/// Without `fix_a`: `D − Q` against `{log Q, 1}`. With `fix_a = a`:
/// `D − Q − a log Q` against `{1, log Q/Q, 1/Q}`.
pub fn density_fit(records: &[SweepRecord], fix_a: Option<f64>) -> Result<FitResult> {
    if records.len() < 6 {
        return Err(Error::Argument(format!(
            "density fit needs at least 6 records, got {}",
            records.len()
        )));
    }
    let q: Vec<f64> = records.iter().map(|r| r.q_half_width).collect();
    let (lo, hi) = q
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    if hi / lo < 10.0 {
        return Err(Error::Argument(format!(
            "density fit needs Q spanning a factor of 10, got [{lo}, {hi}]"
        )));
    }
    let fit = match fix_a {
        None => {
            let y: Vec<f64> = records
                .iter()
                .map(|r| r.total_density - r.q_half_width)
                .collect();
            let labels = ["log Q", "1"];
            let basis = |q: f64| vec![q.ln(), 1.0];
            let f = fit_basis(&q, &y, &labels, basis, 0.0)?;
            with_nested_stability(f, &q, &y, &labels, basis, 0.0)?
        }
        Some(a) => {
            let y: Vec<f64> = records
                .iter()
                .map(|r| r.total_density - r.q_half_width - a * r.q_half_width.ln())
                .collect();
            let labels = ["1", "log Q/Q", "1/Q"];
            let basis = |q: f64| vec![1.0, q.ln() / q, 1.0 / q];
            let f = fit_basis(&q, &y, &labels, basis, 0.0)?;
            with_nested_stability(f, &q, &y, &labels, basis, 0.0)?
        }
    };
    if fit.condition_estimate > MAX_FIT_CONDITION {
        return Err(Error::IllConditioned {
            context: "density fit".into(),
            condition: fit.condition_estimate,
            limit: MAX_FIT_CONDITION,
        });
    }
    Ok(fit)
}

/// `(Q, D − Q, (D − Q)/log Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub q_half_width: f64,
    pub excess: f64,
    pub ratio: f64,
}

pub fn density_table(records: &[SweepRecord]) -> Vec<DensityRow> {
    records
        .iter()
        .map(|r| {
            let excess = r.total_density - r.q_half_width;
            DensityRow {
                q_half_width: r.q_half_width,
                excess,
                ratio: excess / r.q_half_width.ln(),
            }
        })
        .collect()
}

/// Perturbative coefficients of `ρ̃(0) − log Q/π − C*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResurgenceFit {
    pub fit: FitResult,
    /// `a_{n0}`, `n = 1..n_max`.
    pub a_n0: Vec<f64>,
    /// `a_{n1}`, coefficients of `log Q/Qⁿ`.
    pub a_n1: Vec<f64>,
    /// Stability of each `a_{n0}`.
    pub stability_n0: Vec<CoefficientStability>,
}

/// Minimum record count for [`resurgence_fit`].
pub const MIN_RESURGENCE_RECORDS: usize = 40;

/// Basis `{Q⁻ⁿ, log Q·Q⁻ⁿ}` for `n = 1..n_max`, in that interleaved order.
pub fn resurgence_basis(q: f64, n_max: usize) -> Vec<f64> {
    let l = q.ln();
    (1..=n_max)
        .flat_map(|n| {
            let p = q.powi(-(n as i32));
            [p, l * p]
        })
        .collect()
}

/// Fit `y = Σ (a_{n0} + a_{n1} log Q)/Qⁿ` to arbitrary `(Q, y)` data.
pub fn resurgence_fit_data(
    q: &[f64],
    y: &[f64],
    n_max: usize,
    svd_threshold: f64,
) -> Result<ResurgenceFit> {
    if n_max == 0 {
        return Err(Error::Argument("n_max must be at least 1".into()));
    }
    if q.len() < MIN_RESURGENCE_RECORDS {
        return Err(Error::Argument(format!(
            "resurgence fit needs at least {MIN_RESURGENCE_RECORDS} records, got {}",
            q.len()
        )));
    }
    let labels: Vec<String> = (1..=n_max)
        .flat_map(|n| [format!("Q^-{n}"), format!("log Q*Q^-{n}")])
        .collect();
    let lref: Vec<&str> = labels.iter().map(String::as_str).collect();
    let basis = |x: f64| resurgence_basis(x, n_max);
    let fit = fit_basis(q, y, &lref, basis, svd_threshold)?;
    let fit = with_nested_stability(fit, q, y, &lref, basis, svd_threshold)?;
    let a_n0 = fit.coefficients.iter().step_by(2).copied().collect();
    let a_n1 = fit
        .coefficients
        .iter()
        .skip(1)
        .step_by(2)
        .copied()
        .collect();
    let stability_n0 = fit.stability.iter().step_by(2).copied().collect();
    Ok(ResurgenceFit {
        fit,
        a_n0,
        a_n1,
        stability_n0,
    })
}

/// Fit the residual `rho0 − log Q/π − C*` of sweep records.
pub fn resurgence_fit(
    records: &[SweepRecord],
    n_max: usize,
    svd_threshold: f64,
) -> Result<ResurgenceFit> {
    let q: Vec<f64> = records.iter().map(|r| r.q_half_width).collect();
    let y: Vec<f64> = records.iter().map(|r| r.c_eff - C_STAR).collect();
    resurgence_fit_data(&q, &y, n_max, svd_threshold)
}

/// `−a_{(n+1)0}/(n·a_{n0})` for `n = 1..len−1`.
pub fn ratio_test(coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.len() < 3 {
        return Err(Error::Argument(format!(
            "ratio test needs at least 3 coefficients, got {}",
            coeffs.len()
        )));
    }
    Ok(coeffs
        .windows(2)
        .enumerate()
        .map(|(k, w)| -w[1] / ((k + 1) as f64 * w[0]))
        .collect())
}
