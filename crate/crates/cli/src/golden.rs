//! Versioned golden-table manifest.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::Path;

/// Manifest shipped with the binary.
pub const BUILTIN: &str = include_str!("../data/golden_tables.toml");

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
pub struct Golden {
    pub schema_version: u32,
    pub ceff: CeffTable,
    pub richardson: RichardsonTable,
    pub eigenvalues: EigenTable,
    pub density: DensityTable,
    pub coefficients: CoefficientTable,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CeffTable {
    pub tolerance: f64,
    pub q: Vec<f64>,
    pub n: Vec<usize>,
    pub c_eff: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RichardsonTable {
    pub tolerance: f64,
    pub triples: Vec<[f64; 3]>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EigenTable {
    pub tolerance: f64,
    pub gap_relative_tolerance: f64,
    pub q: Vec<f64>,
    pub lambda: Vec<Vec<f64>>,
    pub gap0: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DensityTable {
    pub tolerance: f64,
    pub q: Vec<f64>,
    pub excess: Vec<f64>,
    pub ratio: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CoefficientTable {
    pub q_min: f64,
    pub q_max: f64,
    pub q_count: usize,
    pub n_max: usize,
    pub sign_orders: usize,
    pub magnitude_factor: f64,
    pub a_n0: Vec<f64>,
    pub status: Vec<String>,
}

impl Golden {
    pub fn parse(text: &str) -> Result<Self> {
        let g: Golden = toml::from_str(text).context("parsing golden-table manifest")?;
        if g.schema_version != SCHEMA_VERSION {
            bail!(
                "golden manifest schema {} is not supported (expected {SCHEMA_VERSION})",
                g.schema_version
            );
        }
        g.validate()?;
        Ok(g)
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Self::parse(BUILTIN),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading {}", p.display()))?;
                Self::parse(&text)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let c = &self.ceff;
        if c.q.len() != c.c_eff.len() || c.q.len() != c.n.len() {
            bail!("ceff: column lengths differ");
        }
        if self.richardson.triples.len() != self.richardson.c.len() {
            bail!("richardson: column lengths differ");
        }
        let e = &self.eigenvalues;
        if e.q.len() != e.lambda.len() || e.q.len() != e.gap0.len() {
            bail!("eigenvalues: column lengths differ");
        }
        let d = &self.density;
        if d.q.len() != d.excess.len() || d.q.len() != d.ratio.len() {
            bail!("density: column lengths differ");
        }
        let k = &self.coefficients;
        if k.a_n0.len() != k.status.len() || k.a_n0.len() > k.n_max {
            bail!("coefficients: column lengths differ");
        }
        Ok(())
    }
}
