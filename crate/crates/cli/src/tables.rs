//! Reference-table reproduction with per-cell verdicts.

use crate::config::{RunConfig, TableName};
use crate::golden::Golden;
use crate::output::{Cell, Table};
use crate::pool::map_sorted;
use anyhow::Result;
use nls_lab::asymptotics::{self, SizePolicy, Stability, SweepRecord};
use nls_lab::{nystrom, spectral};
use serde_json::json;

/// One compared cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub key: String,
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
    /// How `tolerance` is applied.
    pub rule: &'static str,
    pub passed: bool,
}

impl Comparison {
    fn absolute(key: String, quantity: String, computed: f64, reference: f64, tol: f64) -> Self {
        Self {
            passed: (computed - reference).abs() <= tol,
            key,
            quantity,
            computed,
            reference,
            tolerance: tol,
            rule: "abs",
        }
    }

    fn relative(key: String, quantity: String, computed: f64, reference: f64, tol: f64) -> Self {
        Self {
            passed: ((computed - reference) / reference).abs() <= tol,
            key,
            quantity,
            computed,
            reference,
            tolerance: tol,
            rule: "rel",
        }
    }
}

pub struct TableReport {
    pub cells: Vec<Comparison>,
    pub table: Table,
}

impl TableReport {
    pub fn failures(&self) -> Vec<&Comparison> {
        self.cells.iter().filter(|c| !c.passed).collect()
    }

    fn from_cells(cells: Vec<Comparison>) -> Self {
        let mut t = Table::new(&[
            "key",
            "quantity",
            "computed",
            "reference",
            "deviation",
            "tolerance",
            "rule",
            "pass",
        ]);
        for c in &cells {
            t.push(vec![
                Cell::from(c.key.as_str()),
                Cell::from(c.quantity.as_str()),
                c.computed.into(),
                c.reference.into(),
                (c.computed - c.reference).into(),
                c.tolerance.into(),
                Cell::from(c.rule),
                c.passed.into(),
            ]);
        }
        let failed = cells.iter().filter(|c| !c.passed).count();
        t.meta("cells_total", cells.len().into());
        t.meta("cells_failed", failed.into());
        Self { cells, table: t }
    }
}

fn key(q: f64) -> String {
    format!("Q={q}")
}

fn sweep_records(qs: &[f64], policy: SizePolicy, workers: usize) -> Result<Vec<SweepRecord>> {
    let out = map_sorted(qs, workers, |q| {
        Ok(SweepRecord::from_solve(&nystrom::solve_rescaled(
            q,
            policy.n_for(q),
        )?))
    })?;
    Ok(out.into_iter().map(|p| p.1).collect())
}

pub fn ceff(g: &Golden, workers: usize) -> Result<TableReport> {
    let t = &g.ceff;
    let recs = sweep_records(&t.q, SizePolicy::Default, workers)?;
    let mut cells = Vec::new();
    for (i, &q) in t.q.iter().enumerate() {
        let r = recs
            .iter()
            .find(|r| r.q_half_width == q)
            .expect("sweep covers table");
        cells.push(Comparison::absolute(
            key(q),
            "n_points".into(),
            r.n_points as f64,
            t.n[i] as f64,
            0.0,
        ));
        cells.push(Comparison::absolute(
            key(q),
            "c_eff".into(),
            r.c_eff,
            t.c_eff[i],
            t.tolerance,
        ));
    }
    let mut rep = TableReport::from_cells(cells);
    rep.table.meta("c_star", json!(asymptotics::C_STAR));
    Ok(rep)
}

pub fn richardson(g: &Golden, workers: usize) -> Result<TableReport> {
    let t = &g.richardson;
    let mut qs: Vec<f64> = t.triples.iter().flatten().copied().collect();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    let recs = sweep_records(&qs, SizePolicy::Default, workers)?;
    let mut cells = Vec::new();
    for (tr, &c_ref) in t.triples.iter().zip(&t.c) {
        let r = asymptotics::richardson_from_records(&recs, *tr)?;
        let k = format!("{}-{}-{}", tr[0], tr[1], tr[2]);
        cells.push(Comparison::absolute(
            k,
            "C".into(),
            r.c_extrapolated,
            c_ref,
            t.tolerance,
        ));
    }
    let mut rep = TableReport::from_cells(cells);
    rep.table.meta("c_star", json!(asymptotics::C_STAR));
    Ok(rep)
}

pub fn eigenvalues(g: &Golden, workers: usize) -> Result<TableReport> {
    let t = &g.eigenvalues;
    let k = t.lambda.iter().map(Vec::len).max().unwrap_or(0);
    let specs = map_sorted(&t.q, workers, |q| Ok(spectral::eigen_spectrum(q, None, k)?))?;
    let mut cells = Vec::new();
    for (i, &q) in t.q.iter().enumerate() {
        let s = &specs
            .iter()
            .find(|p| p.0 == q)
            .expect("spectrum covers table")
            .1;
        for (n, &l_ref) in t.lambda[i].iter().enumerate() {
            cells.push(Comparison::absolute(
                key(q),
                format!("lambda_{n}"),
                s.eigenvalues[n],
                l_ref,
                t.tolerance,
            ));
        }
        cells.push(Comparison::relative(
            key(q),
            "gap_0".into(),
            s.gaps[0],
            t.gap0[i],
            t.gap_relative_tolerance,
        ));
    }
    Ok(TableReport::from_cells(cells))
}

pub fn density(g: &Golden, workers: usize) -> Result<TableReport> {
    let t = &g.density;
    let recs = sweep_records(&t.q, SizePolicy::Default, workers)?;
    let rows = asymptotics::density_table(&recs);
    let mut cells = Vec::new();
    for (i, &q) in t.q.iter().enumerate() {
        let r = rows
            .iter()
            .find(|r| r.q_half_width == q)
            .expect("sweep covers table");
        cells.push(Comparison::absolute(
            key(q),
            "D-Q".into(),
            r.excess,
            t.excess[i],
            t.tolerance,
        ));
        cells.push(Comparison::absolute(
            key(q),
            "(D-Q)/log Q".into(),
            r.ratio,
            t.ratio[i],
            t.tolerance,
        ));
    }
    Ok(TableReport::from_cells(cells))
}

fn is_stable_label(s: &str) -> bool {
    s.eq_ignore_ascii_case("stable")
}

pub fn coefficients(g: &Golden, workers: usize, svd_threshold: f64) -> Result<TableReport> {
    let t = &g.coefficients;
    let qs = asymptotics::log_grid(t.q_min, t.q_max, t.q_count);
    let recs = sweep_records(&qs, SizePolicy::Uncapped, workers)?;
    let fit = asymptotics::resurgence_fit(&recs, t.n_max, svd_threshold)?;
    let mut cells = Vec::new();
    for (i, (&a_ref, label)) in t.a_n0.iter().zip(&t.status).enumerate() {
        let n = i + 1;
        let k = format!("n={n}");
        let a = fit.a_n0[i];
        if n <= t.sign_orders {
            cells.push(Comparison {
                key: k.clone(),
                quantity: format!("sign a_{n}0"),
                computed: a.signum(),
                reference: a_ref.signum(),
                tolerance: 0.0,
                rule: "sign",
                passed: a.signum() == a_ref.signum(),
            });
        }
        if n == 1 {
            let ratio = a.abs() / a_ref.abs();
            cells.push(Comparison {
                key: k.clone(),
                quantity: "|a_10|/|ref|".into(),
                computed: ratio,
                reference: 1.0,
                tolerance: t.magnitude_factor,
                rule: "factor",
                passed: ratio <= t.magnitude_factor && ratio >= 1.0 / t.magnitude_factor,
            });
        }
        let st = fit.stability_n0[i];
        let want_stable = is_stable_label(label);
        cells.push(Comparison {
            key: k,
            quantity: format!("spread a_{n}0 ({label})"),
            computed: st.spread,
            reference: asymptotics::STABLE_SPREAD,
            tolerance: 0.0,
            rule: if want_stable {
                "spread<0.5"
            } else {
                "spread>=0.5"
            },
            passed: (st.class == Stability::Stable) == want_stable,
        });
    }
    let mut rep = TableReport::from_cells(cells);
    rep.table.meta("svd_threshold", json!(svd_threshold));
    rep.table.meta("rank", json!(fit.fit.rank));
    rep.table.meta("a_n0", json!(fit.a_n0));
    rep.table.meta(
        "n_points",
        json!(recs.iter().map(|r| r.n_points).collect::<Vec<_>>()),
    );
    Ok(rep)
}

pub fn run(name: TableName, g: &Golden, cfg: &RunConfig) -> Result<TableReport> {
    let w = cfg.parallel_workers;
    match name {
        TableName::Ceff => ceff(g, w),
        TableName::Richardson => richardson(g, w),
        TableName::Eigenvalues => eigenvalues(g, w),
        TableName::Density => density(g, w),
        TableName::Coefficients => coefficients(g, w, asymptotics::DEFAULT_SVD_THRESHOLD),
    }
}
