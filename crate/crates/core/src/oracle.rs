//! Brute-force references for small graphs: every configuration, the
//! unrestricted master LP over all of them, and an exhaustive comparison of
//! the flow test against the path-set definition.

use std::collections::HashSet;

use crate::config::{check_flow, flow_to_paths, Configuration, FlowMapping};
use crate::error::{Error, Result};
use crate::master::{solve_rmp, Column, ColumnPool, Schedule};
use crate::model::{enumerate_paths, LinkSet, NetworkGraph, PathCatalog, DEFAULT_PATH_CAP};

/// Largest catalog [`enumerate_configurations`] accepts.
pub const UNIVERSE_PATH_CAP: usize = 20;
/// Largest edge count [`exhaustive_flow_scan`] accepts.
pub const FLOW_SCAN_EDGE_CAP: usize = 10;

/// Every configuration of a graph, as ascending catalog index sets.
#[derive(Debug, Clone)]
pub struct ConfigurationUniverse {
    pub path_sets: Vec<Vec<usize>>,
    pub configs: Vec<Configuration>,
}

impl ConfigurationUniverse {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}

// Index sets of catalog paths that use every transmitter, receiver and edge at
// most once, in lexicographic order (the empty set first).
fn feasible_path_sets(catalog: &PathCatalog) -> Vec<Vec<usize>> {
    struct State<'a> {
        catalog: &'a PathCatalog,
        transmitters: HashSet<usize>,
        receivers: HashSet<usize>,
        edges: HashSet<usize>,
        current: Vec<usize>,
        out: Vec<Vec<usize>>,
    }

    impl State<'_> {
        fn extend(&mut self, from: usize) {
            self.out.push(self.current.clone());
            for i in from..self.catalog.len() {
                let p = self.catalog.path(i);
                let t = p.transmitter().0;
                let r = p.receiver().0;
                if self.transmitters.contains(&t)
                    || self.receivers.contains(&r)
                    || p.edges().iter().any(|e| self.edges.contains(&e.0))
                {
                    continue;
                }
                self.transmitters.insert(t);
                self.receivers.insert(r);
                self.edges.extend(p.edges().iter().map(|e| e.0));
                self.current.push(i);
                self.extend(i + 1);
                self.current.pop();
                for e in p.edges() {
                    self.edges.remove(&e.0);
                }
                self.receivers.remove(&r);
                self.transmitters.remove(&t);
            }
        }
    }

    let mut state = State {
        catalog,
        transmitters: HashSet::new(),
        receivers: HashSet::new(),
        edges: HashSet::new(),
        current: Vec::new(),
        out: Vec::new(),
    };
    state.extend(0);
    state.out
}

pub fn enumerate_configurations(catalog: &PathCatalog) -> Result<ConfigurationUniverse> {
    if catalog.len() > UNIVERSE_PATH_CAP {
        return Err(Error::SizeCap {
            what: "configuration universe catalog",
            limit: UNIVERSE_PATH_CAP,
            actual: catalog.len(),
        });
    }
    let path_sets = feasible_path_sets(catalog);
    let configs = path_sets
        .iter()
        .map(|set| Configuration::new(set.iter().map(|&i| catalog.path(i).clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConfigurationUniverse { path_sets, configs })
}

/// Solves the master LP with every configuration as a column. Paths of pairs
/// outside `links` are dropped from each configuration first.
pub fn solve_full_lp(universe: &ConfigurationUniverse, links: &LinkSet) -> Result<Schedule> {
    let mut pool = ColumnPool::with_empty(links);
    for config in &universe.configs {
        let kept = config
            .paths()
            .iter()
            .filter(|p| links.index_of(p.transmitter(), p.receiver()).is_some())
            .cloned()
            .collect();
        pool.insert(Column::new(Configuration::new(kept)?, links)?);
    }
    Ok(solve_rmp(&pool, links)?.0)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowScanReport {
    pub mappings: u64,
    /// Mappings passing every balance constraint.
    pub balanced: u64,
    /// Balanced mappings that also decompose into TR-paths.
    pub configurations: u64,
    /// Balanced mappings rejected by the cycle rule.
    pub cycle_flagged: u64,
    /// Edge masks where the flow test and the path-set definition disagree.
    pub disagreements: Vec<u64>,
}

/// Runs every 0/1 mapping of a graph with at most [`FLOW_SCAN_EDGE_CAP`]
/// edges through the flow test and compares the verdict with membership in
/// the set of edge unions of feasible path sets.
pub fn exhaustive_flow_scan(graph: &NetworkGraph) -> Result<FlowScanReport> {
    let m = graph.edge_count();
    if m > FLOW_SCAN_EDGE_CAP {
        return Err(Error::SizeCap {
            what: "flow scan edge set",
            limit: FLOW_SCAN_EDGE_CAP,
            actual: m,
        });
    }
    let catalog = enumerate_paths(graph, DEFAULT_PATH_CAP)?;
    let by_definition: HashSet<u64> = feasible_path_sets(&catalog)
        .iter()
        .map(|set| {
            set.iter()
                .flat_map(|&i| catalog.path(i).edges())
                .fold(0u64, |mask, e| mask | 1 << e.0)
        })
        .collect();

    let mut report = FlowScanReport::default();
    for mask in 0u64..(1u64 << m) {
        report.mappings += 1;
        let flow = FlowMapping::from_mask(m, mask);
        let check = check_flow(graph, &flow);
        if check.is_balanced() {
            report.balanced += 1;
        }
        let mut by_flow = check.is_configuration();
        if by_flow {
            report.configurations += 1;
            // The decomposition must cover exactly the selected edges.
            by_flow = match flow_to_paths(graph, &flow) {
                Ok(c) => c.edge_ids().iter().fold(0u64, |acc, e| acc | 1 << e.0) == mask,
                Err(_) => false,
            };
        } else if check.is_balanced() {
            report.cycle_flagged += 1;
        }
        if by_flow != by_definition.contains(&mask) {
            report.disagreements.push(mask);
        }
    }
    Ok(report)
}
