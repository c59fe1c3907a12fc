//! Network configurations and their unit-capacity flow encoding.
//!
//! A configuration is a set of pairwise edge-disjoint TR-paths in which each
//! transmitter and each receiver is used at most once. Its indicator on the
//! edge set is a 0/1 flow that balances at every switch, leaves each
//! transmitter at most once and enters each receiver at most once.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{EdgeId, LinkSet, NetworkGraph, NodeId, NodeKind, TrPath};

/// 0/1 value per edge, indexed like the owning graph's edge list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlowMapping(Vec<bool>);

impl FlowMapping {
    pub fn zeros(edge_count: usize) -> Self {
        FlowMapping(vec![false; edge_count])
    }

    pub fn from_edges(edge_count: usize, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut flow = Self::zeros(edge_count);
        for e in edges {
            flow.0[e.0] = true;
        }
        flow
    }

    /// Mapping whose bit `i` is bit `i` of `mask`.
    pub fn from_mask(edge_count: usize, mask: u64) -> Self {
        FlowMapping((0..edge_count).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, edge: EdgeId) -> bool {
        self.0[edge.0]
    }

    pub fn set(&mut self, edge: EdgeId, value: bool) {
        self.0[edge.0] = value;
    }

    pub fn selected(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(i, _)| EdgeId(i))
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

/// Pairwise edge-disjoint TR-paths using every transmitter and receiver at
/// most once. Paths are kept sorted by vertex sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Configuration {
    paths: Vec<TrPath>,
}

impl Configuration {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(mut paths: Vec<TrPath>) -> Result<Self> {
        let mut edges = HashSet::new();
        let mut transmitters = HashSet::new();
        let mut receivers = HashSet::new();
        for p in &paths {
            if !transmitters.insert(p.transmitter()) {
                return Err(Error::InvalidConfiguration(format!(
                    "transmitter {} used by two paths",
                    p.transmitter()
                )));
            }
            if !receivers.insert(p.receiver()) {
                return Err(Error::InvalidConfiguration(format!(
                    "receiver {} used by two paths",
                    p.receiver()
                )));
            }
            for &e in p.edges() {
                if !edges.insert(e) {
                    return Err(Error::InvalidConfiguration(format!(
                        "edge {e} used by two paths"
                    )));
                }
            }
        }
        paths.sort_by(|a, b| a.nodes().cmp(b.nodes()));
        Ok(Configuration { paths })
    }

    pub fn paths(&self) -> &[TrPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// The path realizing the pair, if any.
    pub fn path_for(&self, transmitter: NodeId, receiver: NodeId) -> Option<&TrPath> {
        self.paths
            .iter()
            .find(|p| p.pair() == (transmitter, receiver))
    }

    /// All selected edges in ascending order.
    pub fn edge_ids(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self.paths.iter().flat_map(|p| p.edges()).copied().collect();
        out.sort();
        out
    }

    /// Weight of the realizing path for every link, 0 for links this
    /// configuration does not realize. Fails if a path connects a pair that
    /// is not in `links`.
    pub fn link_weights(&self, links: &LinkSet) -> Result<Vec<f64>> {
        let mut weights = vec![0.0; links.len()];
        for p in &self.paths {
            let (t, r) = p.pair();
            let idx = links.index_of(t, r).ok_or_else(|| {
                Error::Precondition(format!("configuration realizes ({t}, {r}), which is not a link"))
            })?;
            weights[idx] = p.weight(links.get(idx).priority)?;
        }
        Ok(weights)
    }
}

/// Canonical identity of a configuration: its sorted path edge sequences.
/// The empty configuration maps to the empty key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigKey(Vec<Vec<EdgeId>>);

impl ConfigKey {
    pub fn is_empty_config(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn config_key(config: &Configuration) -> ConfigKey {
    let mut key: Vec<Vec<EdgeId>> = config.paths.iter().map(|p| p.edges().to_vec()).collect();
    key.sort();
    ConfigKey(key)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowViolation {
    /// The mapping is not indexed over the graph's edges.
    LengthMismatch { expected: usize, actual: usize },
    /// Net inflow (in minus out) outside the range allowed for the node kind.
    Imbalance {
        node: NodeId,
        kind: NodeKind,
        balance: i64,
    },
}

/// Outcome of [`check_flow`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlowReport {
    pub violations: Vec<FlowViolation>,
    /// Selected edges that sit on directed cycles and keep the balanced flow
    /// from decomposing into TR-paths. Only filled when `violations` is empty.
    pub cyclic_residual: Vec<EdgeId>,
}

impl FlowReport {
    /// Every balance constraint holds.
    pub fn is_balanced(&self) -> bool {
        self.violations.is_empty()
    }

    /// Balanced and free of undecomposable cycles, i.e. a configuration.
    pub fn is_configuration(&self) -> bool {
        self.violations.is_empty() && self.cyclic_residual.is_empty()
    }
}

fn balance_violations(graph: &NetworkGraph, flow: &FlowMapping) -> Vec<FlowViolation> {
    if flow.len() != graph.edge_count() {
        return vec![FlowViolation::LengthMismatch {
            expected: graph.edge_count(),
            actual: flow.len(),
        }];
    }
    let mut balance = vec![0i64; graph.node_count()];
    for e in flow.selected() {
        let edge = graph.edge(e);
        balance[edge.target.0] += 1;
        balance[edge.source.0] -= 1;
    }
    graph
        .node_ids()
        .filter_map(|n| {
            let kind = graph.kind(n);
            let b = balance[n.0];
            let ok = match kind {
                NodeKind::Transmitter => (-1..=0).contains(&b),
                NodeKind::Receiver => (0..=1).contains(&b),
                NodeKind::Switch => b == 0,
            };
            (!ok).then_some(FlowViolation::Imbalance {
                node: n,
                kind,
                balance: b,
            })
        })
        .collect()
}

/// Checks the transmitter, receiver and switch balance constraints and, when
/// they hold, whether the selected edges decompose into TR-paths.
pub fn check_flow(graph: &NetworkGraph, flow: &FlowMapping) -> FlowReport {
    let violations = balance_violations(graph, flow);
    let cyclic_residual = if violations.is_empty() {
        match decompose(graph, flow) {
            Ok(_) => Vec::new(),
            Err(leftover) => leftover,
        }
    } else {
        Vec::new()
    };
    FlowReport {
        violations,
        cyclic_residual,
    }
}

/// Decomposes a balanced flow into edge-disjoint simple TR-paths covering
/// every selected edge.
///
/// Walks start at transmitters in index order and try outgoing edges in
/// target order, backtracking when a walk would revisit a vertex or strand
/// edges. The first complete decomposition found is returned. When a switch
/// carries several paths the pairing of its in- and out-edges is not
/// determined by the flow, so this picks one canonical decomposition.
pub fn flow_to_paths(graph: &NetworkGraph, flow: &FlowMapping) -> Result<Configuration> {
    let violations = balance_violations(graph, flow);
    if !violations.is_empty() {
        return Err(Error::Precondition(format!(
            "flow violates {} balance constraint(s)",
            violations.len()
        )));
    }
    let walks = decompose(graph, flow).map_err(|leftover| Error::Decomposition {
        leftover: leftover.into_iter().map(|e| e.0).collect(),
    })?;
    let paths = walks
        .iter()
        .map(|w| TrPath::from_nodes(graph, w))
        .collect::<Result<Vec<_>>>()?;
    Configuration::new(paths)
}

/// Indicator mapping of the configuration's edges.
pub fn paths_to_flow(graph: &NetworkGraph, config: &Configuration) -> FlowMapping {
    FlowMapping::from_edges(graph.edge_count(), config.edge_ids())
}

struct Decomposer<'a> {
    graph: &'a NetworkGraph,
    out: Vec<Vec<EdgeId>>,
    used: Vec<bool>,
    on_path: Vec<bool>,
    sources: Vec<NodeId>,
    remaining: usize,
    current: Vec<NodeId>,
    done: Vec<Vec<NodeId>>,
}

impl Decomposer<'_> {
    fn route(&mut self, k: usize) -> bool {
        if k == self.sources.len() {
            return self.remaining == 0;
        }
        let t = self.sources[k];
        self.on_path[t.0] = true;
        self.current.push(t);
        let ok = self.walk(t, k);
        self.current.pop();
        self.on_path[t.0] = false;
        ok
    }

    fn walk(&mut self, at: NodeId, k: usize) -> bool {
        for i in 0..self.out[at.0].len() {
            let e = self.out[at.0][i];
            if self.used[e.0] {
                continue;
            }
            let next = self.graph.edge(e).target;
            if self.on_path[next.0] {
                continue;
            }
            self.used[e.0] = true;
            self.remaining -= 1;
            self.on_path[next.0] = true;
            self.current.push(next);
            let ok = match self.graph.kind(next) {
                NodeKind::Receiver => {
                    self.done.push(self.current.clone());
                    let saved = std::mem::take(&mut self.current);
                    for n in &saved {
                        self.on_path[n.0] = false;
                    }
                    let ok = self.route(k + 1);
                    for n in &saved {
                        self.on_path[n.0] = true;
                    }
                    self.current = saved;
                    if !ok {
                        self.done.pop();
                    }
                    ok
                }
                _ => self.walk(next, k),
            };
            if ok {
                return true;
            }
            self.current.pop();
            self.on_path[next.0] = false;
            self.remaining += 1;
            self.used[e.0] = false;
        }
        false
    }
}

// Returns the vertex sequences of a covering decomposition, or the selected
// edges lying on directed cycles of the selected subgraph.
fn decompose(
    graph: &NetworkGraph,
    flow: &FlowMapping,
) -> std::result::Result<Vec<Vec<NodeId>>, Vec<EdgeId>> {
    let mut out = vec![Vec::new(); graph.node_count()];
    for n in graph.node_ids() {
        out[n.0] = graph
            .out_edges(n)
            .iter()
            .copied()
            .filter(|&e| flow.get(e))
            .collect();
    }
    let sources: Vec<NodeId> = graph
        .nodes_of_kind(NodeKind::Transmitter)
        .filter(|t| !out[t.0].is_empty())
        .collect();
    let remaining = flow.selected().count();
    let mut d = Decomposer {
        graph,
        out,
        used: vec![false; graph.edge_count()],
        on_path: vec![false; graph.node_count()],
        sources,
        remaining,
        current: Vec::new(),
        done: Vec::new(),
    };
    if d.route(0) {
        Ok(d.done)
    } else {
        Err(cyclic_edges(graph, &d.out))
    }
}

// Edges (u, v) of the selected subgraph where v reaches u.
fn cyclic_edges(graph: &NetworkGraph, out: &[Vec<EdgeId>]) -> Vec<EdgeId> {
    let reaches = |from: NodeId, to: NodeId| {
        let mut seen = vec![false; graph.node_count()];
        let mut stack = vec![from];
        seen[from.0] = true;
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            for &e in &out[n.0] {
                let m = graph.edge(e).target;
                if !seen[m.0] {
                    seen[m.0] = true;
                    stack.push(m);
                }
            }
        }
        false
    };
    let mut cyclic: Vec<EdgeId> = out
        .iter()
        .flatten()
        .copied()
        .filter(|&e| {
            let edge = graph.edge(e);
            reaches(edge.target, edge.source)
        })
        .collect();
    cyclic.sort();
    cyclic
}
