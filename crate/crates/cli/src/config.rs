//! Command-line definition and the validated run configuration.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "nls-lab",
    version,
    about = "Rescaled lattice NLS ground state: solves, spectra, tables and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the rescaled equation at each Q.
    Solve(CommonArgs),
    /// Solve over a grid of Q and emit sweep records with C_eff.
    Sweep(CommonArgs),
    /// Leading eigenvalues, gaps and log Fredholm determinant at each Q.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of leading eigenvalues to report.
        #[arg(long, default_value_t = 4)]
        top_k: usize,
    },
    /// Reproduce a reference table and compare cell by cell.
    Tables {
        #[arg(value_enum)]
        name: TableName,
        #[command(flatten)]
        common: CommonArgs,
        /// Alternative golden-table manifest.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Run the identity checks.
    Checks(CommonArgs),
    /// Columnar data for plotting.
    Plotdata {
        #[arg(value_enum)]
        kind: PlotKind,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fit the perturbative coefficients of rho0 - log Q/pi - C*.
    Resurgence {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Relative singular-value cut.
        #[arg(long, default_value_t = nls_lab::asymptotics::DEFAULT_SVD_THRESHOLD)]
        svd_threshold: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Q values (repeatable or comma separated).
    #[arg(long = "q", value_delimiter = ',', allow_negative_numbers = true)]
    pub q: Vec<f64>,
    /// Log-spaced grid `min:max:count`.
    #[arg(long = "q-grid", conflicts_with = "q")]
    pub q_grid: Option<String>,
    /// Rule size override (may exceed the default cap).
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    pub profile: Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Strict,
    Default,
}

impl Profile {
    /// Multiplier applied to every check tolerance.
    pub fn tolerance_scale(self) -> f64 {
        match self {
            Profile::Strict => 0.1,
            Profile::Default => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableName {
    Ceff,
    Richardson,
    Eigenvalues,
    Density,
    Coefficients,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Profile,
    Edge,
    Spectrum,
    Sweep,
    /// Wiener-Hopf factors on a real grid.
    Wh,
}

/// Validated configuration shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub q_values: Vec<f64>,
    pub n_override: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub parallel_workers: usize,
    pub tolerance_profile: Profile,
}

/// Argument error, reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgError(pub String);

impl std::fmt::Display for ArgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ArgError {}

/// Parse `min:max:count` into log-spaced values.
pub fn parse_q_grid(spec: &str) -> Result<Vec<f64>, ArgError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(ArgError(format!(
            "--q-grid expects min:max:count, got '{spec}'"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| ArgError(format!("bad grid minimum '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| ArgError(format!("bad grid maximum '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| ArgError(format!("bad grid count '{}'", parts[2])))?;
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() || n == 0 {
        return Err(ArgError(format!(
            "--q-grid needs 0 < min <= max and count >= 1, got '{spec}'"
        )));
    }
    if n > 1 && hi == lo {
        return Err(ArgError("--q-grid with count > 1 needs min < max".into()));
    }
    Ok(nls_lab::asymptotics::log_grid(lo, hi, n))
}

impl RunConfig {
    /// Validate `args`; `default_q` is used when neither `--q` nor `--q-grid` is given.
    pub fn from_args(
        command: &str,
        args: &CommonArgs,
        default_q: &[f64],
    ) -> Result<Self, ArgError> {
        let q_values = match (&args.q_grid, args.q.is_empty()) {
            (Some(g), _) => parse_q_grid(g)?,
            (None, false) => args.q.clone(),
            (None, true) => default_q.to_vec(),
        };
        if q_values.is_empty() {
            return Err(ArgError(format!(
                "{command}: no Q values given (use --q or --q-grid)"
            )));
        }
        if let Some(q) = q_values.iter().find(|q| !(**q > 0.0) || !q.is_finite()) {
            return Err(ArgError(format!("Q must be positive and finite, got {q}")));
        }
        if args.workers == 0 {
            return Err(ArgError("--workers must be at least 1".into()));
        }
        if let Some(n) = args.n {
            if n == 0 || n > nls_lab::quadrature::MAX_POINTS {
                return Err(ArgError(format!(
                    "--n must be in 1..={}, got {n}",
                    nls_lab::quadrature::MAX_POINTS
                )));
            }
        }
        Ok(Self {
            command: command.to_string(),
            q_values,
            n_override: args.n,
            output_path: args.out.clone(),
            format: args.format,
            parallel_workers: args.workers,
            tolerance_profile: args.profile,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn common() -> CommonArgs {
        CommonArgs {
            q: vec![],
            q_grid: None,
            n: None,
            format: Format::Csv,
            out: None,
            workers: 1,
            profile: Profile::Default,
        }
    }

    #[test]
    fn grid_parsing() {
        let g = parse_q_grid("10:1000:3").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 100.0).abs() < 1e-10);
        assert!(parse_q_grid("10:1000").is_err());
        assert!(parse_q_grid("-1:10:3").is_err());
        assert!(parse_q_grid("10:5:3").is_err());
        assert!(parse_q_grid("10:10:1").is_ok());
    }

    #[test]
    fn rejects_nonpositive_q() {
        let mut a = common();
        a.q = vec![-1.0];
        assert!(RunConfig::from_args("solve", &a, &[]).is_err());
        a.q = vec![];
        assert!(RunConfig::from_args("solve", &a, &[]).is_err());
        assert_eq!(
            RunConfig::from_args("solve", &a, &[3.0]).unwrap().q_values,
            vec![3.0]
        );
    }

    #[test]
    fn rejects_zero_workers() {
        let mut a = common();
        a.q = vec![1.0];
        a.workers = 0;
        assert!(RunConfig::from_args("solve", &a, &[]).is_err());
    }

    #[test]
    fn strict_profile_scale() {
        assert_eq!(Profile::Strict.tolerance_scale(), 0.1);
        assert_eq!(Profile::Default.tolerance_scale(), 1.0);
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
