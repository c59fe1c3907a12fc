//! Pricing: the edge-disjoint path packing with the largest dual value.
//!
//! Given link duals `mu`, every catalog path `p` of link `l` is worth
//! `w_p * mu_l`. A feasible selection uses every transmitter, receiver and
//! edge at most once. If the best selection is worth no more than `gamma`
//! (plus a small relative tolerance) the current master solution is optimal.

use fixedbitset::FixedBitSet;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::master::DualPrices;
use crate::model::{LinkSet, PathCatalog};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
/// Relative termination tolerance: a column must beat `gamma` by
/// `rel * max(1, |gamma|)`.
pub const DEFAULT_TERMINATION_REL: f64 = 1e-7;
/// Largest catalog the exhaustive oracle accepts.
pub const ORACLE_PATH_CAP: usize = 20;

pub fn termination_epsilon(gamma: f64, rel: f64) -> f64 {
    rel * gamma.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
struct PathUse {
    transmitter: usize,
    receiver: usize,
    edges: Vec<usize>,
}

/// Per-path coefficients `w_p * mu_p` plus the usage structure of the paths.
#[derive(Debug, Clone)]
pub struct PricingInstance {
    coefficients: Vec<f64>,
    uses: Vec<PathUse>,
    threshold: f64,
}

impl PricingInstance {
    /// Coefficients from link duals. Paths of pairs outside `links` get 0.
    pub fn new(catalog: &PathCatalog, links: &LinkSet, duals: &DualPrices) -> Result<Self> {
        if duals.mu.len() != links.len() {
            return Err(Error::Precondition(format!(
                "{} duals for {} links",
                duals.mu.len(),
                links.len()
            )));
        }
        let coefficients = catalog
            .paths()
            .iter()
            .map(|p| {
                let (t, r) = p.pair();
                match links.index_of(t, r) {
                    Some(l) => Ok(p.weight(links.get(l).priority)? * duals.mu[l].max(0.0)),
                    None => Ok(0.0),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coefficients(catalog, coefficients, duals.gamma)
    }

    /// Coefficients given directly, one per catalog path.
    pub fn from_coefficients(
        catalog: &PathCatalog,
        coefficients: Vec<f64>,
        threshold: f64,
    ) -> Result<Self> {
        if coefficients.len() != catalog.len() {
            return Err(Error::Precondition(format!(
                "{} coefficients for {} paths",
                coefficients.len(),
                catalog.len()
            )));
        }
        if let Some(c) = coefficients.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
            return Err(Error::Precondition(format!(
                "pricing coefficient {c} is not finite and non-negative"
            )));
        }
        let uses = catalog
            .paths()
            .iter()
            .map(|p| PathUse {
                transmitter: p.transmitter().0,
                receiver: p.receiver().0,
                edges: p.edges().iter().map(|e| e.0).collect(),
            })
            .collect();
        Ok(PricingInstance {
            coefficients,
            uses,
            threshold,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Checks the transmitter, receiver and edge usage limits for a set of
    /// path indices.
    pub fn is_feasible(&self, selected: &[usize]) -> bool {
        let mut seen_t = std::collections::HashSet::new();
        let mut seen_r = std::collections::HashSet::new();
        let mut seen_e = std::collections::HashSet::new();
        selected.iter().all(|&i| {
            let u = &self.uses[i];
            seen_t.insert(u.transmitter)
                && seen_r.insert(u.receiver)
                && u.edges.iter().all(|&e| seen_e.insert(e))
        })
    }

    /// Sum of coefficients over `selected`, accumulated in ascending index
    /// order.
    pub fn value_of(&self, selected: &[usize]) -> f64 {
        let mut sorted = selected.to_vec();
        sorted.sort_unstable();
        sorted
            .iter()
            .fold(0.0, |acc, &i| acc + self.coefficients[i])
    }
}

/// Selected catalog path indices (ascending) and their total coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingAssignment {
    pub selected: Vec<usize>,
    pub objective: f64,
}

/// Proof that no configuration beats `threshold + epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminationCertificate {
    pub threshold: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PricingOutcome {
    Improving(PricingAssignment),
    Optimal(TerminationCertificate),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingRun {
    pub outcome: PricingOutcome,
    /// Branch-and-bound nodes visited.
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricingOptions {
    pub node_budget: u64,
    pub termination_rel: f64,
}

impl Default for PricingOptions {
    fn default() -> Self {
        PricingOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            termination_rel: DEFAULT_TERMINATION_REL,
        }
    }
}

/// Finds the most valuable configuration, or certifies that none beats the
/// instance threshold.
pub fn solve_pricing(instance: &PricingInstance, options: &PricingOptions) -> Result<PricingRun> {
    let epsilon = termination_epsilon(instance.threshold, options.termination_rel);
    let floor = instance.threshold + epsilon;
    let (best, nodes) = branch_and_bound(instance, floor, options.node_budget)?;
    let outcome = if best.objective > floor {
        PricingOutcome::Improving(best)
    } else {
        PricingOutcome::Optimal(TerminationCertificate {
            threshold: instance.threshold,
            epsilon,
        })
    };
    Ok(PricingRun { outcome, nodes })
}

/// The exact maximum with no threshold, by branch and bound.
pub fn maximize(instance: &PricingInstance, node_budget: u64) -> Result<(PricingAssignment, u64)> {
    branch_and_bound(instance, f64::NEG_INFINITY, node_budget)
}

struct Search<'a> {
    coefficients: &'a [f64],
    // Positive-coefficient paths in catalog order.
    order: Vec<usize>,
    resources: Vec<FixedBitSet>,
    transmitter: Vec<usize>,
    receiver: Vec<usize>,
    used: FixedBitSet,
    current: Vec<usize>,
    best: Vec<usize>,
    best_value: f64,
    floor: f64,
    nodes: u64,
    budget: u64,
    // Scratch space for the bound, indexed by node.
    best_by_t: Vec<f64>,
    best_by_r: Vec<f64>,
    touched: Vec<usize>,
}

impl Search<'_> {
    fn compatible(&self, k: usize) -> bool {
        self.used.is_disjoint(&self.resources[k])
    }

    // Upper bound on what the undecided paths from position `pos` on can
    // add: each transmitter (and each receiver) contributes at most once, so
    // summing the best compatible coefficient per transmitter or per
    // receiver both bound the remainder.
    fn remaining_bound(&mut self, pos: usize) -> f64 {
        for k in pos..self.order.len() {
            if !self.compatible(k) {
                continue;
            }
            let c = self.coefficients[self.order[k]];
            let (t, r) = (self.transmitter[k], self.receiver[k]);
            // Coefficients here are positive, so zero marks an untouched slot.
            // A node is either a transmitter or a receiver, never both.
            if self.best_by_t[t] == 0.0 {
                self.touched.push(t);
            }
            if self.best_by_r[r] == 0.0 {
                self.touched.push(r);
            }
            self.best_by_t[t] = self.best_by_t[t].max(c);
            self.best_by_r[r] = self.best_by_r[r].max(c);
        }
        let mut by_t = 0.0;
        let mut by_r = 0.0;
        for &n in &self.touched {
            by_t += self.best_by_t[n];
            by_r += self.best_by_r[n];
            self.best_by_t[n] = 0.0;
            self.best_by_r[n] = 0.0;
        }
        self.touched.clear();
        f64::min(by_t, by_r)
    }

    fn visit(&mut self, pos: usize, value: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::PricingBudget {
                budget: self.budget,
            });
        }
        let Some(k) = (pos..self.order.len()).find(|&k| self.compatible(k)) else {
            if value > self.best_value {
                self.best_value = value;
                self.best.clone_from(&self.current);
            }
            return Ok(());
        };
        let bound = value + self.remaining_bound(k);
        // The slack keeps rounding in the bound from pruning an equal-valued
        // leaf that would win on exact arithmetic.
        let slack = 1e-12 * bound.abs().max(1.0);
        if bound + slack <= self.best_value || bound <= self.floor {
            return Ok(());
        }
        let path = self.order[k];
        self.used.union_with(&self.resources[k]);
        self.current.push(path);
        self.visit(k + 1, value + self.coefficients[path])?;
        self.current.pop();
        self.used.difference_with(&self.resources[k]);
        self.visit(k + 1, value)
    }
}

fn branch_and_bound(
    instance: &PricingInstance,
    floor: f64,
    budget: u64,
) -> Result<(PricingAssignment, u64)> {
    let order: Vec<usize> = (0..instance.len())
        .filter(|&i| instance.coefficients[i] > 0.0)
        .collect();
    let max_edge = instance
        .uses
        .iter()
        .flat_map(|u| u.edges.iter().copied())
        .max()
        .map_or(0, |e| e + 1);
    let max_node = instance
        .uses
        .iter()
        .map(|u| u.transmitter.max(u.receiver))
        .max()
        .map_or(0, |n| n + 1);
    // Resource bits: nodes first, then edges.
    let width = max_node + max_edge;
    let resources = order
        .iter()
        .map(|&i| {
            let u = &instance.uses[i];
            let mut bits = FixedBitSet::with_capacity(width);
            bits.insert(u.transmitter);
            bits.insert(u.receiver);
            for &e in &u.edges {
                bits.insert(max_node + e);
            }
            bits
        })
        .collect();
    let mut search = Search {
        coefficients: &instance.coefficients,
        transmitter: order.iter().map(|&i| instance.uses[i].transmitter).collect(),
        receiver: order.iter().map(|&i| instance.uses[i].receiver).collect(),
        order,
        resources,
        used: FixedBitSet::with_capacity(width),
        current: Vec::new(),
        best: Vec::new(),
        best_value: 0.0,
        floor,
        nodes: 0,
        budget,
        best_by_t: vec![0.0; max_node],
        best_by_r: vec![0.0; max_node],
        touched: Vec::new(),
    };
    search.visit(0, 0.0)?;
    Ok((
        PricingAssignment {
            selected: search.best,
            objective: search.best_value,
        },
        search.nodes,
    ))
}

/// Exhaustive maximization over every feasible subset of paths. Ties go to
/// the lexicographically smallest index set.
///
/// Subsets are enumerated by include/exclude recursion in index order; an
/// include that breaks a usage limit is skipped, since every superset of an
/// infeasible set is infeasible too.
pub fn pricing_oracle(instance: &PricingInstance) -> Result<PricingAssignment> {
    if instance.len() > ORACLE_PATH_CAP {
        return Err(Error::SizeCap {
            what: "pricing oracle catalog",
            limit: ORACLE_PATH_CAP,
            actual: instance.len(),
        });
    }

    fn enumerate(
        instance: &PricingInstance,
        i: usize,
        selected: &mut Vec<usize>,
        best: &mut PricingAssignment,
    ) {
        if i == instance.len() {
            let objective = instance.value_of(selected);
            if objective > best.objective
                || (objective == best.objective && *selected < best.selected)
            {
                best.objective = objective;
                best.selected.clone_from(selected);
            }
            return;
        }
        selected.push(i);
        if instance.is_feasible(selected) {
            enumerate(instance, i + 1, selected, best);
        }
        selected.pop();
        enumerate(instance, i + 1, selected, best);
    }

    let mut best = PricingAssignment {
        selected: Vec::new(),
        objective: 0.0,
    };
    enumerate(instance, 0, &mut Vec::new(), &mut best);
    Ok(best)
}

pub fn assignment_to_configuration(
    assignment: &PricingAssignment,
    catalog: &PathCatalog,
) -> Result<Configuration> {
    Configuration::new(
        assignment
            .selected
            .iter()
            .map(|&i| catalog.path(i).clone())
            .collect(),
    )
}
