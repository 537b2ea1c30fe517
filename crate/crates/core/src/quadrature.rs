//! Gauss-Legendre rules on `[−1, 1]` and their affine images on `[−Q, Q]`.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

/// Largest supported rule size.
pub const MAX_POINTS: usize = 20_000;

/// Cap applied by [`default_n`].
pub const N_CAP: usize = 3000;

const MAX_NEWTON: usize = 100;

/// `N`-point rule on the symmetric interval `[−q_half_width, q_half_width]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub q_half_width: f64,
    /// Ascending, symmetric about 0.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    // (1 − x²) P_n' = n (P_{n−1} − x P_n)
    let dp = n * (p0 - x * p1) / ((1.0 - x) * (1.0 + x));
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule on `[−1, 1]`.
///
/// Roots come from Newton iteration started at Tricomi's asymptotic guesses;
/// weights are `2/[(1−x²) P_n'(x)²]`. Only the nonnegative half is computed,
/// the rest is mirrored, so symmetry is exact.
///
/// # Errors
/// [`Error::Argument`] outside `1 ≤ n ≤ 20000`; [`Error::Numerical`] if
/// Newton fails to converge within 100 steps.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_POINTS {
        return Err(Error::Argument(format!(
            "rule size must be in 1..={MAX_POINTS}, got {n}"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let tricomi = 1.0 - 1.0 / (8.0 * nf * nf) + 1.0 / (8.0 * nf * nf * nf);
    for k in 0..n / 2 {
        // k-th root counted from +1
        let theta = PI * (4.0 * k as f64 + 3.0) / (4.0 * nf + 2.0);
        let mut x = tricomi * theta.cos();
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "Newton iteration for Legendre root {k} of degree {n} did not converge"
            )));
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x) * (1.0 + x) * dp * dp);
        nodes[n - 1 - k] = x;
        nodes[k] = -x;
        weights[n - 1 - k] = w;
        weights[k] = w;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (dp * dp);
    }
    Ok(QuadratureRule {
        q_half_width: 1.0,
        nodes,
        weights,
    })
}

/// Rescale a rule to `[−q, q]`, relative to its current half-width.
///
/// # Errors
/// Non-positive or non-finite `q`.
pub fn map_to_interval(rule: &QuadratureRule, q_half_width: f64) -> Result<QuadratureRule> {
    if !(q_half_width > 0.0) || !q_half_width.is_finite() {
        return Err(Error::Argument(format!(
            "half-width must be positive and finite, got {q_half_width}"
        )));
    }
    let s = q_half_width / rule.q_half_width;
    Ok(QuadratureRule {
        q_half_width,
        nodes: rule.nodes.iter().map(|x| x * s).collect(),
        weights: rule.weights.iter().map(|w| w * s).collect(),
    })
}

/// `round(10Q) + 400` with halves rounded up, before any cap.
pub fn uncapped_n(q_half_width: f64) -> usize {
    (10.0 * q_half_width + 0.5).floor().max(0.0) as usize + 400
}

/// Default rule size `round(10Q) + 400`, capped at 3000.
pub fn default_n(q_half_width: f64) -> usize {
    uncapped_n(q_half_width).min(N_CAP)
}

/// Base rules on `[−1, 1]` keyed by size.
///
/// Reads take a shared lock; a miss builds the rule outside the lock and
/// inserts it under the write lock, keeping the first insertion.
#[derive(Debug, Default)]
pub struct RuleCache {
    rules: RwLock<HashMap<usize, Arc<QuadratureRule>>>,
}

impl RuleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, n: usize) -> Result<Arc<QuadratureRule>> {
        if let Some(r) = self.rules.read().expect("rule cache poisoned").get(&n) {
            return Ok(Arc::clone(r));
        }
        let built = Arc::new(gauss_legendre(n)?);
        let mut map = self.rules.write().expect("rule cache poisoned");
        Ok(Arc::clone(map.entry(n).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.rules.read().expect("rule cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Process-wide rule cache.
pub fn shared_cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(RuleCache::new)
}

/// Cached base rule of size `n` mapped to `[−q, q]`.
pub fn rule_on_interval(q_half_width: f64, n: usize) -> Result<QuadratureRule> {
    let base = shared_cache().get(n)?;
    map_to_interval(&base, q_half_width)
}
