//! Subcommand bodies. Each returns a table plus an exit status.

use crate::checks;
use crate::config::{PlotKind, RunConfig, TableName};
use crate::golden::Golden;
use crate::output::{Cell, Table};
use crate::pool::map_sorted;
use crate::tables;
use anyhow::{bail, Result};
use nls_lab::asymptotics::{self, SizePolicy, SweepRecord};
use nls_lab::{nystrom, spectral, wienerhopf};
use serde_json::json;
use std::path::Path;

pub const DEFAULT_SOLVE_Q: &[f64] = &[10.0];
pub const DEFAULT_SWEEP_Q: &[f64] = &[10.0, 50.0, 100.0, 200.0, 300.0];
pub const DEFAULT_SPECTRUM_Q: &[f64] = &[5.0, 10.0, 20.0, 50.0];
pub const DEFAULT_PROFILE_Q: &[f64] = &[20.0, 50.0, 100.0, 200.0];
pub const DEFAULT_EDGE_Q: &[f64] = &[100.0, 200.0];
pub const DEFAULT_GAP_Q: &[f64] = &[20.0, 50.0, 100.0, 200.0, 300.0];

/// Edge profiles are normalised at this depth.
pub const EDGE_S_REF: f64 = 10.0;

pub struct Outcome {
    pub table: Table,
    /// Problems that make the run fail (exit 1) after output is written.
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self {
            table,
            failures: Vec::new(),
        }
    }
}

pub fn solve(cfg: &RunConfig) -> Result<Outcome> {
    let outs = map_sorted(&cfg.q_values, cfg.parallel_workers, |q| {
        Ok(nystrom::solve_rescaled(q, cfg.n_override)?)
    })?;
    let mut t = Table::new(&[
        "q",
        "n_points",
        "rho0",
        "c_eff",
        "total_density",
        "inner_energy",
        "energy_identity_residual",
        "condition_estimate",
        "refinement_correction",
    ]);
    let mut warnings = Vec::new();
    for (q, o) in &outs {
        t.push(vec![
            (*q).into(),
            o.n_points.into(),
            o.rho0.into(),
            o.c_eff().into(),
            o.total_density.into(),
            o.inner_energy.into(),
            nystrom::energy_identity_residual(o).into(),
            o.condition_estimate.into(),
            o.refinement_correction.into(),
        ]);
        for w in &o.warnings {
            warnings.push(format!("Q = {q}: {w}"));
        }
    }
    t.meta(
        "n_points",
        json!(outs.iter().map(|p| p.1.n_points).collect::<Vec<_>>()),
    );
    t.meta(
        "condition_estimate",
        json!(outs
            .iter()
            .map(|p| p.1.condition_estimate)
            .collect::<Vec<_>>()),
    );
    t.meta("warnings", json!(warnings));
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(Outcome::ok(t))
}

fn policy(cfg: &RunConfig) -> SizePolicy {
    cfg.n_override
        .map_or(SizePolicy::Default, SizePolicy::Fixed)
}

fn records(cfg: &RunConfig, policy: SizePolicy) -> Result<Vec<SweepRecord>> {
    Ok(map_sorted(&cfg.q_values, cfg.parallel_workers, |q| {
        Ok(SweepRecord::from_solve(&nystrom::solve_rescaled(
            q,
            policy.n_for(q),
        )?))
    })?
    .into_iter()
    .map(|p| p.1)
    .collect())
}

pub fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let recs = records(cfg, policy(cfg))?;
    let mut t = Table::new(&[
        "q",
        "n_points",
        "rho0",
        "c_eff",
        "c_eff_minus_c_star",
        "total_density",
        "density_excess",
        "inner_energy",
    ]);
    for r in &recs {
        t.push(vec![
            r.q_half_width.into(),
            r.n_points.into(),
            r.rho0.into(),
            r.c_eff.into(),
            (r.c_eff - asymptotics::C_STAR).into(),
            r.total_density.into(),
            (r.total_density - r.q_half_width).into(),
            r.inner_energy.into(),
        ]);
    }
    t.meta("c_star", json!(asymptotics::C_STAR));
    t.meta(
        "n_points",
        json!(recs.iter().map(|r| r.n_points).collect::<Vec<_>>()),
    );
    Ok(Outcome::ok(t))
}

pub fn spectrum(cfg: &RunConfig, top_k: usize) -> Result<Outcome> {
    if top_k == 0 {
        bail!(crate::config::ArgError("--top-k must be at least 1".into()));
    }
    let specs = map_sorted(&cfg.q_values, cfg.parallel_workers, |q| {
        Ok(spectral::eigen_spectrum(q, cfg.n_override, top_k)?)
    })?;
    let mut cols: Vec<String> = vec!["q".into(), "n_points".into()];
    cols.extend((0..top_k).map(|k| format!("lambda_{k}")));
    cols.extend((0..top_k).map(|k| format!("gap_{k}")));
    cols.extend(["gap_ratio", "log_fredholm", "trace_residual"].map(String::from));
    let colref: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&colref);
    for (q, s) in &specs {
        let mut row: Vec<Cell> = vec![(*q).into(), s.n_points.into()];
        row.extend(s.eigenvalues.iter().map(|&l| Cell::from(l)));
        row.extend(s.gaps.iter().map(|&l| Cell::from(l)));
        row.push(s.gap_ratio().unwrap_or(f64::NAN).into());
        row.push(s.log_fredholm.into());
        row.push(spectral::trace_check(s).into());
        t.push(row);
    }
    t.meta(
        "n_points",
        json!(specs.iter().map(|p| p.1.n_points).collect::<Vec<_>>()),
    );
    Ok(Outcome::ok(t))
}

pub fn tables(cfg: &RunConfig, name: TableName, golden: Option<&Path>) -> Result<Outcome> {
    let g = Golden::load(golden)?;
    let rep = tables::run(name, &g, cfg)?;
    let failures = rep
        .failures()
        .iter()
        .map(|c| {
            format!(
                "{} {}: computed {} reference {} ({} tolerance {})",
                c.key, c.quantity, c.computed, c.reference, c.rule, c.tolerance
            )
        })
        .collect();
    let mut table = rep.table;
    table.meta("table", json!(format!("{name:?}").to_lowercase()));
    table.meta("golden_schema_version", json!(g.schema_version));
    Ok(Outcome { table, failures })
}

pub fn checks(cfg: &RunConfig) -> Result<Outcome> {
    let scale = cfg.tolerance_profile.tolerance_scale();
    let results = checks::run_all(scale);
    let mut table = checks::to_table(&results);
    table.meta("tolerance_scale", json!(scale));
    let failures = results
        .iter()
        .filter(|(r, _)| !r.passed)
        .map(|(r, e)| match e {
            Some(e) => format!("{}: {e}", r.check_name),
            None => format!(
                "{}: measured {} expected {} tolerance {}",
                r.check_name, r.measured, r.expected, r.tolerance
            ),
        })
        .collect();
    Ok(Outcome { table, failures })
}

/// Number of evenly spaced samples per profile curve.
const PROFILE_SAMPLES: usize = 401;

pub fn plotdata(cfg: &RunConfig, kind: PlotKind) -> Result<Outcome> {
    match kind {
        PlotKind::Profile => plot_profile(cfg),
        PlotKind::Edge => plot_edge(cfg),
        PlotKind::Spectrum => plot_gaps(cfg),
        PlotKind::Sweep => sweep(cfg),
        PlotKind::Wh => plot_wh(),
    }
}

fn plot_profile(cfg: &RunConfig) -> Result<Outcome> {
    let outs = map_sorted(&cfg.q_values, cfg.parallel_workers, |q| {
        Ok(nystrom::solve_rescaled(q, cfg.n_override)?)
    })?;
    let mut t = Table::new(&["q", "xi", "xi_over_q", "rho", "inner_approx"]);
    for (q, o) in &outs {
        for i in 0..PROFILE_SAMPLES {
            let xi = q * (2.0 * i as f64 / (PROFILE_SAMPLES - 1) as f64 - 1.0);
            let inner = nystrom::inner_profile_approx(xi, *q).unwrap_or(f64::NAN);
            t.push(vec![
                (*q).into(),
                xi.into(),
                (xi / q).into(),
                o.density_at(xi).into(),
                inner.into(),
            ]);
        }
    }
    Ok(Outcome::ok(t))
}

fn plot_edge(cfg: &RunConfig) -> Result<Outcome> {
    let depths: Vec<f64> = (0..=80).map(|k| 0.25 * k as f64).collect();
    let outs = map_sorted(&cfg.q_values, cfg.parallel_workers, |q| {
        if q <= EDGE_S_REF {
            bail!(crate::config::ArgError(format!(
                "edge profile needs Q > {EDGE_S_REF}, got {q}"
            )));
        }
        let o = nystrom::solve_rescaled(q, cfg.n_override)?;
        Ok(nystrom::edge_profile(&o, EDGE_S_REF, &depths))
    })?;
    let mut t = Table::new(&["q", "s", "edge_profile"]);
    for (q, prof) in &outs {
        for (&s, &v) in depths.iter().zip(prof) {
            t.push(vec![(*q).into(), s.into(), v.into()]);
        }
    }
    t.meta("s_ref", json!(EDGE_S_REF));
    Ok(Outcome::ok(t))
}

fn plot_gaps(cfg: &RunConfig) -> Result<Outcome> {
    let specs = map_sorted(&cfg.q_values, cfg.parallel_workers, |q| {
        Ok(spectral::eigen_spectrum(q, cfg.n_override, 2)?)
    })?;
    let mut t = Table::new(&["q", "gap_0", "gap_1", "q_gap_0"]);
    for (q, s) in &specs {
        t.push(vec![
            (*q).into(),
            s.gaps[0].into(),
            s.gaps[1].into(),
            (q * s.gaps[0]).into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

fn plot_wh() -> Result<Outcome> {
    let rows = wienerhopf::grid_evaluation(&wienerhopf::real_grid(400, 20.0, 1e-3))?;
    let mut t = Table::new(&[
        "p",
        "sigma",
        "k_plus_re",
        "k_plus_im",
        "g_plus_re",
        "g_plus_im",
        "g_plus_abs2",
        "factor_residual",
        "conjugate_residual",
    ]);
    for r in rows {
        t.push(vec![
            r.p.into(),
            r.sigma.into(),
            r.k_plus.re.into(),
            r.k_plus.im.into(),
            r.g_plus.re.into(),
            r.g_plus.im.into(),
            r.g_plus.norm_sqr().into(),
            r.factor_residual.into(),
            r.conjugate_residual.into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

/// Extra thresholds, relative to the requested one, for the sensitivity rows.
const SENSITIVITY_FACTORS: [f64; 2] = [1e-3, 1e-5];

pub fn resurgence(cfg: &RunConfig, n_max: usize, svd_threshold: f64) -> Result<Outcome> {
    if !(svd_threshold > 0.0 && svd_threshold < 1.0) {
        bail!(crate::config::ArgError(format!(
            "--svd-threshold must lie in (0, 1), got {svd_threshold}"
        )));
    }
    let pol = cfg
        .n_override
        .map_or(SizePolicy::Uncapped, SizePolicy::Fixed);
    let recs = records(cfg, pol)?;
    let mut t = Table::new(&[
        "svd_threshold",
        "rank",
        "n",
        "a_n0",
        "a_n1",
        "spread",
        "stability",
    ]);
    let thresholds =
        std::iter::once(svd_threshold).chain(SENSITIVITY_FACTORS.iter().map(|f| svd_threshold * f));
    let mut ratios = None;
    for thr in thresholds {
        let fit = asymptotics::resurgence_fit(&recs, n_max, thr)?;
        if ratios.is_none() && n_max >= 3 {
            ratios = Some(asymptotics::ratio_test(&fit.a_n0)?);
        }
        for n in 0..n_max {
            let st = fit.stability_n0.get(n);
            t.push(vec![
                thr.into(),
                fit.fit.rank.into(),
                (n + 1).into(),
                fit.a_n0[n].into(),
                fit.a_n1[n].into(),
                st.map_or(f64::NAN, |s| s.spread).into(),
                Cell::from(st.map_or("n/a".to_string(), |s| {
                    format!("{:?}", s.class).to_lowercase()
                })),
            ]);
        }
    }
    t.meta("c_star", json!(asymptotics::C_STAR));
    t.meta("ratio_test", json!(ratios));
    t.meta(
        "n_points",
        json!(recs.iter().map(|r| r.n_points).collect::<Vec<_>>()),
    );
    Ok(Outcome::ok(t))
}
