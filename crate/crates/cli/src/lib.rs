//! `nls-lab` command-line orchestration.
//!
//! Exit codes: 0 success, 1 solver error or failed comparison, 2 bad arguments.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod commands;
pub mod config;
pub mod golden;
pub mod output;
pub mod pool;
pub mod tables;

use anyhow::Result;
use config::{ArgError, Cli, Command, RunConfig};
use std::time::Instant;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn dispatch(cli: &Cli) -> Result<(RunConfig, commands::Outcome)> {
    use commands::*;
    let (name, common, default_q): (&str, _, Vec<f64>) = match &cli.command {
        Command::Solve(c) => ("solve", c, DEFAULT_SOLVE_Q.to_vec()),
        Command::Sweep(c) => ("sweep", c, DEFAULT_SWEEP_Q.to_vec()),
        Command::Spectrum { common, .. } => ("spectrum", common, DEFAULT_SPECTRUM_Q.to_vec()),
        // tables and checks carry their own Q values
        Command::Tables { common, .. } => ("tables", common, vec![1.0]),
        Command::Checks(c) => ("checks", c, vec![1.0]),
        Command::Plotdata { kind, common } => (
            "plotdata",
            common,
            match kind {
                config::PlotKind::Profile => DEFAULT_PROFILE_Q.to_vec(),
                config::PlotKind::Edge => DEFAULT_EDGE_Q.to_vec(),
                config::PlotKind::Spectrum => DEFAULT_GAP_Q.to_vec(),
                config::PlotKind::Sweep => DEFAULT_SWEEP_Q.to_vec(),
                config::PlotKind::Wh => vec![1.0],
            },
        ),
        Command::Resurgence { common, .. } => ("resurgence", common, default_resurgence_q()),
    };
    let cfg = RunConfig::from_args(name, common, &default_q)?;
    let outcome = match &cli.command {
        Command::Solve(_) => solve(&cfg)?,
        Command::Sweep(_) => sweep(&cfg)?,
        Command::Spectrum { top_k, .. } => spectrum(&cfg, *top_k)?,
        Command::Tables { name, golden, .. } => tables(&cfg, *name, golden.as_deref())?,
        Command::Checks(_) => checks(&cfg)?,
        Command::Plotdata { kind, .. } => plotdata(&cfg, *kind)?,
        Command::Resurgence {
            n_max,
            svd_threshold,
            ..
        } => resurgence(&cfg, *n_max, *svd_threshold)?,
    };
    Ok((cfg, outcome))
}

/// 60 log-spaced points on `[20, 500]`.
pub fn default_resurgence_q() -> Vec<f64> {
    nls_lab::asymptotics::log_grid(20.0, 500.0, 60)
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let start = Instant::now();
    let (cfg, outcome) = match dispatch(cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return exit_code_for(&e);
        }
    };
    let wall = start.elapsed().as_secs_f64();
    let written = outcome
        .table
        .render(cfg.format, &cfg.command, wall)
        .and_then(|text| output::emit(&text, cfg.output_path.as_deref()));
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return EXIT_FAILURE;
    }
    if outcome.failures.is_empty() {
        0
    } else {
        eprintln!("{} failing item(s):", outcome.failures.len());
        for f in &outcome.failures {
            eprintln!("  {f}");
        }
        EXIT_FAILURE
    }
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    let usage = e.chain().any(|c| {
        c.downcast_ref::<ArgError>().is_some()
            || matches!(
                c.downcast_ref::<nls_lab::Error>(),
                Some(nls_lab::Error::Argument(_))
            )
    });
    if usage {
        EXIT_USAGE
    } else {
        EXIT_FAILURE
    }
}
