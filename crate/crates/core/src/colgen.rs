//! Column generation: alternate master solves and pricing until pricing
//! certifies that no configuration outside the pool improves the schedule.

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::master::{solve_rmp_with_tol, Column, ColumnPool, DualPrices, Schedule};
use crate::model::{enumerate_paths, LinkSet, NetworkGraph, PathCatalog, DEFAULT_PATH_CAP};
use crate::pricing::{
    assignment_to_configuration, solve_pricing, PricingInstance, PricingOptions, PricingOutcome,
    DEFAULT_NODE_BUDGET, DEFAULT_TERMINATION_REL,
};
use crate::simplex::DEFAULT_PIVOT_TOL;

pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub path_cap: usize,
    pub pricing_node_budget: u64,
    /// Relative tolerance of the pricing termination test.
    pub termination_rel: f64,
    pub pivot_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            path_cap: DEFAULT_PATH_CAP,
            pricing_node_budget: DEFAULT_NODE_BUDGET,
            termination_rel: DEFAULT_TERMINATION_REL,
            pivot_tol: DEFAULT_PIVOT_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Pricing rounds, including the final one that certified optimality.
    pub iterations: usize,
    /// Master objective at each iteration.
    pub objective_trace: Vec<f64>,
    pub final_schedule: Schedule,
    pub final_duals: DualPrices,
    pub pool: ColumnPool,
    pub pricing_node_counts: Vec<u64>,
    pub path_count: usize,
}

impl SolveReport {
    pub fn pool_size(&self) -> usize {
        self.pool.len()
    }

    pub fn objective(&self) -> f64 {
        self.final_schedule.objective
    }
}

/// Empty configuration plus, per link, the single-path configuration on its
/// least-attenuated path (first in catalog order on ties).
pub fn initialize_pool(catalog: &PathCatalog, links: &LinkSet) -> Result<ColumnPool> {
    let mut pool = ColumnPool::with_empty(links);
    for link in links.iter() {
        let best = catalog
            .paths_for(link.transmitter, link.receiver)
            .iter()
            .copied()
            .reduce(|a, b| {
                if catalog.path(b).total_attenuation_db() < catalog.path(a).total_attenuation_db() {
                    b
                } else {
                    a
                }
            })
            .ok_or(Error::UnrealizableLink {
                transmitter: link.transmitter,
                receiver: link.receiver,
            })?;
        let config = Configuration::new(vec![catalog.path(best).clone()])?;
        pool.insert(Column::new(config, links)?);
    }
    Ok(pool)
}

/// Enumerates the paths of `graph` and runs column generation.
pub fn solve(graph: &NetworkGraph, links: &LinkSet, options: &SolveOptions) -> Result<SolveReport> {
    let catalog = enumerate_paths(graph, options.path_cap)?;
    solve_with_catalog(&catalog, links, options)
}

pub fn solve_with_catalog(
    catalog: &PathCatalog,
    links: &LinkSet,
    options: &SolveOptions,
) -> Result<SolveReport> {
    if links.is_empty() {
        return Err(Error::Precondition("no links to schedule".into()));
    }
    if options.max_iterations == 0 {
        return Err(Error::Precondition("max_iterations must be at least 1".into()));
    }
    let pricing_options = PricingOptions {
        node_budget: options.pricing_node_budget,
        termination_rel: options.termination_rel,
    };
    let mut pool = initialize_pool(catalog, links)?;
    let mut objective_trace = Vec::new();
    let mut pricing_node_counts = Vec::new();
    let mut best: Option<Schedule> = None;

    for iteration in 1..=options.max_iterations {
        let (schedule, duals) = solve_rmp_with_tol(&pool, links, options.pivot_tol)?;
        objective_trace.push(schedule.objective);

        let instance = PricingInstance::new(catalog, links, &duals)?;
        let run = solve_pricing(&instance, &pricing_options)?;
        pricing_node_counts.push(run.nodes);
        log::debug!(
            "iteration {iteration}: k = {}, gamma = {}, pool = {}, pricing nodes = {}",
            schedule.objective,
            duals.gamma,
            pool.len(),
            run.nodes
        );

        match run.outcome {
            PricingOutcome::Optimal(_) => {
                return Ok(SolveReport {
                    iterations: iteration,
                    objective_trace,
                    final_schedule: schedule,
                    final_duals: duals,
                    pool,
                    pricing_node_counts,
                    path_count: catalog.len(),
                });
            }
            PricingOutcome::Improving(assignment) => {
                let config = assignment_to_configuration(&assignment, catalog)?;
                let column = Column::new(config, links)?;
                if pool.insert(column).is_none() {
                    return Err(Error::Stall {
                        value: assignment.objective,
                        threshold: duals.gamma,
                    });
                }
            }
        }
        best = Some(schedule);
    }
    Err(Error::IterationCap {
        cap: options.max_iterations,
        best: Box::new(best.expect("at least one iteration ran")),
    })
}
