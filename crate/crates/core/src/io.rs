//! JSON documents read and written by the CLI and the C bindings.
//!
//! Every document carries `"format_version": 1`. Node ids are strings in
//! files and dense indices in memory.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::colgen::SolveReport;
use crate::config::{check_flow, flow_to_paths, paths_to_flow, Configuration};
use crate::error::{Error, Result};
use crate::master::DUALITY_GAP_TOL;
use crate::model::{
    derive_links, enumerate_paths, validate_graph, Edge, Link, LinkSet, NetworkGraph, Node,
    NodeId, NodeKind, PathCatalog, TrPath,
};
use crate::oracle::ConfigurationUniverse;

pub const FORMAT_VERSION: u32 = 1;

/// Tolerance on `sum(lambda) = 1` in schedule files.
pub const FRACTION_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub source: String,
    pub target: String,
    pub attenuation_db: f64,
}

fn default_priority() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub transmitter: String,
    pub receiver: String,
    #[serde(default = "default_priority")]
    pub priority_weight: f64,
}

/// A raw network graph, optionally with the links to schedule. Without a
/// `links` section every realizable pair is scheduled with priority 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub format_version: u32,
    pub nodes: Vec<NodeEntry>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub links: Option<Vec<LinkEntry>>,
}

fn check_version(version: u32) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported format_version {version}, expected {FORMAT_VERSION}"
        )));
    }
    Ok(())
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        check_version(file.format_version)?;
        Ok(file)
    }

    pub fn from_graph(graph: &NetworkGraph) -> Self {
        NetworkFile {
            format_version: FORMAT_VERSION,
            nodes: graph
                .nodes()
                .iter()
                .map(|n| NodeEntry {
                    id: n.name.clone(),
                    kind: n.kind,
                })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    source: graph.node(e.source).name.clone(),
                    target: graph.node(e.target).name.clone(),
                    attenuation_db: e.attenuation_db,
                })
                .collect(),
            links: None,
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }

    /// Builds the graph and checks its invariants.
    pub fn to_graph(&self) -> Result<NetworkGraph> {
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|n| Node {
                name: n.id.clone(),
                kind: n.kind,
            })
            .collect();
        let ids: HashMap<&str, NodeId> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), NodeId(i)))
            .collect();
        let lookup = |name: &str| {
            ids.get(name)
                .copied()
                .ok_or_else(|| Error::UnknownNode(name.to_string()))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    source: lookup(&e.source)?,
                    target: lookup(&e.target)?,
                    attenuation_db: e.attenuation_db,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let graph = NetworkGraph::new(nodes, edges);
        let violations = validate_graph(&graph);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }
        Ok(graph)
    }
}

/// A validated graph with its path catalog and link set.
#[derive(Debug, Clone)]
pub struct LoadedNetwork {
    pub graph: NetworkGraph,
    pub catalog: PathCatalog,
    pub links: LinkSet,
}

impl LoadedNetwork {
    pub fn load(file: &NetworkFile, path_cap: usize) -> Result<Self> {
        let graph = file.to_graph()?;
        let catalog = enumerate_paths(&graph, path_cap)?;
        let links = match &file.links {
            None => derive_links(&catalog, None)?,
            Some(entries) => {
                let links = entries
                    .iter()
                    .map(|l| {
                        Ok(Link {
                            transmitter: node_by_name(&graph, &l.transmitter)?,
                            receiver: node_by_name(&graph, &l.receiver)?,
                            priority: l.priority_weight,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                LinkSet::new(&catalog, links)?
            }
        };
        Ok(LoadedNetwork {
            graph,
            catalog,
            links,
        })
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.graph.node(id).name
    }

    fn path_names(&self, path: &TrPath) -> Vec<String> {
        path.nodes()
            .iter()
            .map(|&n| self.node_name(n).to_string())
            .collect()
    }
}

fn node_by_name(graph: &NetworkGraph, name: &str) -> Result<NodeId> {
    graph
        .find_node(name)
        .ok_or_else(|| Error::UnknownNode(name.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkRate {
    pub transmitter: String,
    pub receiver: String,
    pub priority_weight: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulePath {
    pub nodes: Vec<String>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleColumn {
    pub fraction: f64,
    pub paths: Vec<SchedulePath>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSummary {
    pub iterations: usize,
    pub pool_size: usize,
    pub path_count: usize,
    pub objective_trace: Vec<f64>,
    pub pricing_node_counts: Vec<u64>,
}

/// A solved schedule: the configurations in use, their time fractions, the
/// per-link rates and a summary of the solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub format_version: u32,
    pub objective: f64,
    pub links: Vec<LinkRate>,
    pub columns: Vec<ScheduleColumn>,
    pub report: ReportSummary,
}

impl ScheduleFile {
    /// Lists the pool columns with a positive time fraction.
    pub fn from_report(network: &LoadedNetwork, report: &SolveReport) -> Self {
        let schedule = &report.final_schedule;
        let columns = report
            .pool
            .columns()
            .iter()
            .zip(&schedule.fractions)
            .filter(|(_, &f)| f > 0.0)
            .map(|(column, &fraction)| ScheduleColumn {
                fraction,
                paths: column
                    .config()
                    .paths()
                    .iter()
                    .map(|p| {
                        let l = network
                            .links
                            .index_of(p.transmitter(), p.receiver())
                            .expect("pool columns only realize links");
                        SchedulePath {
                            nodes: network.path_names(p),
                            weight: column.weights()[l],
                        }
                    })
                    .collect(),
            })
            .collect();
        ScheduleFile {
            format_version: FORMAT_VERSION,
            objective: schedule.objective,
            links: network
                .links
                .iter()
                .zip(&schedule.per_link_rates)
                .map(|(l, &rate)| LinkRate {
                    transmitter: network.node_name(l.transmitter).to_string(),
                    receiver: network.node_name(l.receiver).to_string(),
                    priority_weight: l.priority,
                    rate,
                })
                .collect(),
            columns,
            report: ReportSummary {
                iterations: report.iterations,
                pool_size: report.pool_size(),
                path_count: report.path_count,
                objective_trace: report.objective_trace.clone(),
                pricing_node_counts: report.pricing_node_counts.clone(),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScheduleFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        check_version(file.format_version)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Checks a schedule file against its network: every path is a TR-path of
/// the graph for a scheduled link, every column is a configuration whose flow
/// passes the flow test and decomposes back to the same edges, fractions form
/// a distribution, and the stated rates and objective are consistent.
/// Returns the list of problems found.
pub fn validate_schedule(network: &LoadedNetwork, schedule: &ScheduleFile) -> Vec<String> {
    let mut problems = Vec::new();
    let graph = &network.graph;
    let links = &network.links;
    let mut rates = vec![0.0; links.len()];
    let mut fraction_sum = 0.0;

    for (ci, column) in schedule.columns.iter().enumerate() {
        if !(column.fraction >= 0.0 && column.fraction.is_finite()) {
            problems.push(format!("column {ci}: fraction {} is not >= 0", column.fraction));
        }
        fraction_sum += column.fraction;
        let mut paths = Vec::new();
        for (pi, sp) in column.paths.iter().enumerate() {
            let ids: Result<Vec<NodeId>> =
                sp.nodes.iter().map(|n| node_by_name(graph, n)).collect();
            let path = match ids.and_then(|ids| TrPath::from_nodes(graph, &ids)) {
                Ok(p) => p,
                Err(e) => {
                    problems.push(format!("column {ci} path {pi}: {e}"));
                    continue;
                }
            };
            match links.index_of(path.transmitter(), path.receiver()) {
                None => problems.push(format!(
                    "column {ci} path {pi}: ({}, {}) is not a scheduled link",
                    sp.nodes[0],
                    sp.nodes[sp.nodes.len() - 1]
                )),
                Some(l) => match path.weight(links.get(l).priority) {
                    Ok(w) => {
                        if !close(w, sp.weight, 1e-9) {
                            problems.push(format!(
                                "column {ci} path {pi}: weight {} but the path weighs {w}",
                                sp.weight
                            ));
                        }
                        rates[l] += column.fraction * w;
                    }
                    Err(e) => problems.push(format!("column {ci} path {pi}: {e}")),
                },
            }
            paths.push(path);
        }
        let config = match Configuration::new(paths) {
            Ok(c) => c,
            Err(e) => {
                problems.push(format!("column {ci}: {e}"));
                continue;
            }
        };
        let flow = paths_to_flow(graph, &config);
        let report = check_flow(graph, &flow);
        if !report.is_configuration() {
            problems.push(format!("column {ci}: flow test failed: {report:?}"));
            continue;
        }
        match flow_to_paths(graph, &flow) {
            Ok(back) if paths_to_flow(graph, &back) == flow => {}
            Ok(_) => problems.push(format!("column {ci}: flow round trip changed the edge set")),
            Err(e) => problems.push(format!("column {ci}: flow round trip failed: {e}")),
        }
    }

    if (fraction_sum - 1.0).abs() > FRACTION_SUM_TOL {
        problems.push(format!("fractions sum to {fraction_sum}, not 1"));
    }

    if schedule.links.len() != links.len() {
        problems.push(format!(
            "schedule lists {} links, network has {}",
            schedule.links.len(),
            links.len()
        ));
    } else {
        for (l, (entry, link)) in schedule.links.iter().zip(links.iter()).enumerate() {
            if entry.transmitter != network.node_name(link.transmitter)
                || entry.receiver != network.node_name(link.receiver)
            {
                problems.push(format!(
                    "link {l}: ({}, {}) does not match the network's link order",
                    entry.transmitter, entry.receiver
                ));
                continue;
            }
            if !close(entry.rate, rates[l], 1e-9) {
                problems.push(format!(
                    "link {l}: stated rate {} but columns give {}",
                    entry.rate, rates[l]
                ));
            }
        }
    }

    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    if !links.is_empty() && schedule.objective > min_rate + DUALITY_GAP_TOL {
        problems.push(format!(
            "objective {} exceeds the smallest link rate {min_rate}",
            schedule.objective
        ));
    }
    problems
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationListing {
    pub format_version: u32,
    pub path_count: usize,
    pub link_count: usize,
    pub configuration_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<Vec<Vec<String>>>,
    /// Each configuration as a list of catalog path indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configurations: Option<Vec<Vec<usize>>>,
}

impl EnumerationListing {
    pub fn new(network: &LoadedNetwork, universe: &ConfigurationUniverse, list: bool) -> Self {
        EnumerationListing {
            format_version: FORMAT_VERSION,
            path_count: network.catalog.len(),
            link_count: network.links.len(),
            configuration_count: universe.len(),
            paths: list.then(|| {
                network
                    .catalog
                    .paths()
                    .iter()
                    .map(|p| network.path_names(p))
                    .collect()
            }),
            configurations: list.then(|| universe.path_sets.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

pub(crate) fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
