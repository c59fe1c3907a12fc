//! The restricted master problem.
//!
//! ```text
//! max k
//! s.t.  sum_M w(M, l) * lambda_M >= k    for every link l   (dual mu_l >= 0)
//!       sum_M lambda_M = 1                                  (dual gamma)
//!       lambda >= 0, k free
//! ```

use std::collections::HashMap;

use serde::Serialize;

use crate::config::{config_key, ConfigKey, Configuration};
use crate::error::{Error, Result};
use crate::model::LinkSet;
use crate::simplex::{Tableau, DEFAULT_PIVOT_TOL};

/// Accepted gap between the primal objective and `gamma`.
pub const DUALITY_GAP_TOL: f64 = 1e-7;

/// A configuration together with its weight on every link.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    config: Configuration,
    weights: Vec<f64>,
}

impl Column {
    pub fn new(config: Configuration, links: &LinkSet) -> Result<Self> {
        let weights = config.link_weights(links)?;
        Ok(Column { config, weights })
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    /// Weight per link, aligned with the link set the column was built for.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_l w(M, l) * mu_l`.
    pub fn priced_value(&self, mu: &[f64]) -> f64 {
        self.weights.iter().zip(mu).map(|(w, m)| w * m).sum()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ColumnPool {
    columns: Vec<Column>,
    keys: HashMap<ConfigKey, usize>,
}

impl ColumnPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pool holding only the empty configuration.
    pub fn with_empty(links: &LinkSet) -> Self {
        let mut pool = Self::new();
        pool.insert(Column::new(Configuration::empty(), links).expect("empty column"));
        pool
    }

    /// Adds a column unless an equal configuration is already present.
    /// Returns the index of the new column.
    pub fn insert(&mut self, column: Column) -> Option<usize> {
        let key = config_key(&column.config);
        if self.keys.contains_key(&key) {
            return None;
        }
        self.keys.insert(key, self.columns.len());
        self.columns.push(column);
        Some(self.columns.len() - 1)
    }

    pub fn contains(&self, config: &Configuration) -> bool {
        self.keys.contains_key(&config_key(config))
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// Time fractions per pool column, the guaranteed rate `k` and the per-link
/// rates they produce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub fractions: Vec<f64>,
    pub objective: f64,
    pub per_link_rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPrices {
    pub mu: Vec<f64>,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub rates: Vec<f64>,
    pub min_rate: f64,
}

/// Recomputes `b_l = sum_M lambda_M * w(M, l)` from the pool weights.
pub fn evaluate_schedule(pool: &ColumnPool, fractions: &[f64]) -> RateReport {
    let link_count = pool.columns.first().map_or(0, |c| c.weights.len());
    let mut rates = vec![0.0; link_count];
    for (column, &lambda) in pool.columns.iter().zip(fractions) {
        for (b, w) in rates.iter_mut().zip(&column.weights) {
            *b += lambda * w;
        }
    }
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    RateReport { rates, min_rate }
}

pub fn solve_rmp(pool: &ColumnPool, links: &LinkSet) -> Result<(Schedule, DualPrices)> {
    solve_rmp_with_tol(pool, links, DEFAULT_PIVOT_TOL)
}

pub fn solve_rmp_with_tol(
    pool: &ColumnPool,
    links: &LinkSet,
    tol: f64,
) -> Result<(Schedule, DualPrices)> {
    if pool.is_empty() {
        return Err(Error::Precondition("column pool is empty".into()));
    }
    if links.is_empty() {
        return Err(Error::Precondition("link set is empty".into()));
    }
    let n = pool.len();
    let m = links.len();
    if let Some(c) = pool.columns.iter().find(|c| c.weights.len() != m) {
        return Err(Error::Precondition(format!(
            "column has {} weights for {m} links",
            c.weights.len()
        )));
    }

    // Columns: lambda_0..n, k+, k-, slack_0..m, artificial.
    let k_plus = n;
    let k_minus = n + 1;
    let slack = |l: usize| n + 2 + l;
    let artificial = n + 2 + m;
    let cols = n + 3 + m;
    let rows = m + 1;

    let mut a = vec![0.0; rows * cols];
    for l in 0..m {
        let row = &mut a[l * cols..(l + 1) * cols];
        for (j, column) in pool.columns.iter().enumerate() {
            row[j] = -column.weights[l];
        }
        row[k_plus] = 1.0;
        row[k_minus] = -1.0;
        row[slack(l)] = 1.0;
    }
    let conv = &mut a[m * cols..];
    conv[..n].fill(1.0);
    conv[artificial] = 1.0;

    let mut b = vec![0.0; rows];
    b[m] = 1.0;
    let mut cost = vec![0.0; cols];
    cost[k_plus] = 1.0;
    cost[k_minus] = -1.0;
    let basis: Vec<usize> = (0..m).map(slack).chain([artificial]).collect();
    let mut frozen = vec![false; cols];
    frozen[artificial] = true;

    let mut tableau = Tableau::new(a, &b, &cost, basis, frozen, tol);
    // Any single column with lambda = 1 and k = 0 is feasible because every
    // weight is non-negative.
    tableau.pivot(m, 0);
    let result = tableau.solve()?;

    let fractions: Vec<f64> = result.values[..n]
        .iter()
        .map(|&x| if x < 0.0 { 0.0 } else { x })
        .collect();
    let objective = result.values[k_plus] - result.values[k_minus];
    let mu: Vec<f64> = result.duals[..m]
        .iter()
        .map(|&y| if y < 0.0 { 0.0 } else { y })
        .collect();
    let gamma = result.duals[m];

    if (objective - gamma).abs() > DUALITY_GAP_TOL * objective.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "duality gap: primal {objective} vs dual {gamma}"
        )));
    }
    log::trace!(
        "rmp: {n} columns, {m} links, {} pivots, k = {objective}, tableau objective {}",
        result.pivots,
        result.objective
    );

    let per_link_rates = evaluate_schedule(pool, &fractions).rates;
    Ok((
        Schedule {
            fractions,
            objective,
            per_link_rates,
        },
        DualPrices { mu, gamma },
    ))
}
