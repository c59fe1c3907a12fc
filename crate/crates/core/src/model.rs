//! Raw network graphs, TR-paths, links and path weights.
//!
//! A raw network graph is a digraph over transmitters, switches and
//! receivers. Transmitters only have outgoing edges and receivers only have
//! incoming ones. Every edge carries an attenuation in dB.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of enumerated TR-paths.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Transmitter,
    Receiver,
    Switch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub attenuation_db: f64,
}

/// A broken graph invariant. Validation reports these as data.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UnknownNode { edge: EdgeId, node: NodeId },
    EdgeIntoTransmitter { edge: EdgeId, node: NodeId },
    EdgeOutOfReceiver { edge: EdgeId, node: NodeId },
    NonPositiveAttenuation { edge: EdgeId, attenuation_db: f64 },
    DuplicateEdge { edge: EdgeId, first: EdgeId },
    DuplicateNodeName { node: NodeId, name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownNode { edge, node } => {
                write!(f, "edge {edge} references unknown node {node}")
            }
            Violation::EdgeIntoTransmitter { edge, node } => {
                write!(f, "edge {edge} enters transmitter {node}")
            }
            Violation::EdgeOutOfReceiver { edge, node } => {
                write!(f, "edge {edge} leaves receiver {node}")
            }
            Violation::NonPositiveAttenuation {
                edge,
                attenuation_db,
            } => write!(
                f,
                "edge {edge} has attenuation {attenuation_db} dB, must be strictly positive"
            ),
            Violation::DuplicateEdge { edge, first } => {
                write!(f, "edge {edge} duplicates edge {first}")
            }
            Violation::DuplicateNodeName { node, name } => {
                write!(f, "node {node} reuses name {name:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NetworkGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    // Outgoing edges per node, sorted by target index. Edges with unknown
    // endpoints are left out.
    out_edges: Vec<Vec<EdgeId>>,
    edge_index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl NetworkGraph {
    /// Builds a graph without checking it. Use [`validate_graph`] to list
    /// invariant breaches.
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Self {
        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut edge_index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.source.0 < nodes.len() && e.target.0 < nodes.len() {
                out_edges[e.source.0].push(EdgeId(i));
                edge_index.entry((e.source, e.target)).or_insert(EdgeId(i));
            }
        }
        for list in &mut out_edges {
            list.sort_by_key(|&id| (edges[id.0].target, id));
        }
        NetworkGraph {
            nodes,
            edges,
            out_edges,
            edge_index,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id.0].kind
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_edges(&self, id: NodeId) -> &[EdgeId] {
        &self.out_edges[id.0]
    }

    pub fn find_edge(&self, source: NodeId, target: NodeId) -> Option<EdgeId> {
        self.edge_index.get(&(source, target)).copied()
    }

    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name).map(NodeId)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(move |&id| self.kind(id) == kind)
    }
}

/// Incremental construction helper for hand-written graphs and tests.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, name: impl Into<String>, kind: NodeKind) -> NodeId {
        self.nodes.push(Node {
            name: name.into(),
            kind,
        });
        NodeId(self.nodes.len() - 1)
    }

    pub fn transmitter(&mut self, name: impl Into<String>) -> NodeId {
        self.node(name, NodeKind::Transmitter)
    }

    pub fn receiver(&mut self, name: impl Into<String>) -> NodeId {
        self.node(name, NodeKind::Receiver)
    }

    pub fn switch(&mut self, name: impl Into<String>) -> NodeId {
        self.node(name, NodeKind::Switch)
    }

    pub fn edge(&mut self, source: NodeId, target: NodeId, attenuation_db: f64) -> EdgeId {
        self.edges.push(Edge {
            source,
            target,
            attenuation_db,
        });
        EdgeId(self.edges.len() - 1)
    }

    pub fn build(self) -> NetworkGraph {
        NetworkGraph::new(self.nodes, self.edges)
    }
}

/// Lists every breached graph invariant. An empty list means the graph is
/// valid.
pub fn validate_graph(graph: &NetworkGraph) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut names: HashMap<&str, NodeId> = HashMap::new();
    for (i, node) in graph.nodes.iter().enumerate() {
        if names.insert(node.name.as_str(), NodeId(i)).is_some() {
            violations.push(Violation::DuplicateNodeName {
                node: NodeId(i),
                name: node.name.clone(),
            });
        }
    }

    let mut seen: HashMap<(NodeId, NodeId), EdgeId> = HashMap::new();
    for (i, e) in graph.edges.iter().enumerate() {
        let id = EdgeId(i);
        let mut endpoints_known = true;
        for node in [e.source, e.target] {
            if node.0 >= graph.nodes.len() {
                violations.push(Violation::UnknownNode { edge: id, node });
                endpoints_known = false;
            }
        }
        if endpoints_known {
            if graph.kind(e.source) == NodeKind::Receiver {
                violations.push(Violation::EdgeOutOfReceiver {
                    edge: id,
                    node: e.source,
                });
            }
            if graph.kind(e.target) == NodeKind::Transmitter {
                violations.push(Violation::EdgeIntoTransmitter {
                    edge: id,
                    node: e.target,
                });
            }
        }
        // Written so that NaN is rejected too.
        if !(e.attenuation_db > 0.0 && e.attenuation_db.is_finite()) {
            violations.push(Violation::NonPositiveAttenuation {
                edge: id,
                attenuation_db: e.attenuation_db,
            });
        }
        if let Some(&first) = seen.get(&(e.source, e.target)) {
            violations.push(Violation::DuplicateEdge { edge: id, first });
        } else {
            seen.insert((e.source, e.target), id);
        }
    }
    violations
}

/// A simple transmitter-to-receiver path.
#[derive(Debug, Clone, PartialEq)]
pub struct TrPath {
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
    total_attenuation_db: f64,
}

impl TrPath {
    /// Builds a path from its vertex sequence, checking that every hop is an
    /// edge of `graph`, the walk is simple, starts at a transmitter, ends at
    /// a receiver and only passes through switches.
    pub fn from_nodes(graph: &NetworkGraph, nodes: &[NodeId]) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "needs at least two vertices, got {}",
                nodes.len()
            )));
        }
        if let Some(bad) = nodes.iter().find(|n| n.0 >= graph.node_count()) {
            return Err(Error::InvalidPath(format!("unknown node {bad}")));
        }
        let last = nodes.len() - 1;
        for (i, &n) in nodes.iter().enumerate() {
            let expected = match i {
                0 => NodeKind::Transmitter,
                i if i == last => NodeKind::Receiver,
                _ => NodeKind::Switch,
            };
            if graph.kind(n) != expected {
                return Err(Error::InvalidPath(format!(
                    "vertex {} at position {i} is a {:?}, expected {:?}",
                    graph.node(n).name,
                    graph.kind(n),
                    expected
                )));
            }
        }
        let mut sorted = nodes.to_vec();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPath("vertex repeated".into()));
        }
        let mut edges = Vec::with_capacity(last);
        let mut total = 0.0;
        for w in nodes.windows(2) {
            let id = graph.find_edge(w[0], w[1]).ok_or_else(|| {
                Error::InvalidPath(format!(
                    "no edge {} -> {}",
                    graph.node(w[0]).name,
                    graph.node(w[1]).name
                ))
            })?;
            total += graph.edge(id).attenuation_db;
            edges.push(id);
        }
        Ok(TrPath {
            nodes: nodes.to_vec(),
            edges,
            total_attenuation_db: total,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn transmitter(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn receiver(&self) -> NodeId {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn pair(&self) -> (NodeId, NodeId) {
        (self.transmitter(), self.receiver())
    }

    pub fn total_attenuation_db(&self) -> f64 {
        self.total_attenuation_db
    }

    /// Weighted key capacity of this path for a link with priority `priority`.
    pub fn weight(&self, priority: f64) -> Result<f64> {
        path_weight(Some(self.total_attenuation_db), priority)
    }
}

/// Weighted repeaterless key capacity `-c * log2(1 - 10^(-alpha/10))`.
///
/// `None` stands for an absent path and weighs 0.
pub fn path_weight(total_attenuation_db: Option<f64>, priority: f64) -> Result<f64> {
    if !(priority >= 0.0 && priority.is_finite()) {
        return Err(Error::Domain(format!(
            "priority weight must be finite and non-negative, got {priority}"
        )));
    }
    let Some(alpha) = total_attenuation_db else {
        return Ok(0.0);
    };
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "attenuation must be finite and strictly positive, got {alpha} dB"
        )));
    }
    let transmittance = 10f64.powf(-alpha / 10.0);
    // log2(1 - x)
    let capacity = -(-transmittance).ln_1p() / std::f64::consts::LN_2;
    Ok(priority * capacity)
}

/// Every simple TR-path of a graph, in lexicographic order of node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCatalog {
    paths: Vec<TrPath>,
    by_pair: BTreeMap<(NodeId, NodeId), Vec<usize>>,
}

impl PathCatalog {
    pub fn paths(&self) -> &[TrPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn path(&self, index: usize) -> &TrPath {
        &self.paths[index]
    }

    /// Indices of the paths connecting `transmitter` to `receiver`.
    pub fn paths_for(&self, transmitter: NodeId, receiver: NodeId) -> &[usize] {
        self.by_pair
            .get(&(transmitter, receiver))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Realizable pairs in ascending order.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.by_pair.keys().copied()
    }

    /// Index of `path` in the catalog, if present.
    pub fn position(&self, path: &TrPath) -> Option<usize> {
        self.paths_for(path.transmitter(), path.receiver())
            .iter()
            .copied()
            .find(|&i| self.paths[i].nodes == path.nodes)
    }
}

/// Enumerates all simple TR-paths by depth-first search.
///
/// Fails with [`Error::PathCap`] once more than `cap` paths are found.
pub fn enumerate_paths(graph: &NetworkGraph, cap: usize) -> Result<PathCatalog> {
    let violations = validate_graph(graph);
    if !violations.is_empty() {
        return Err(Error::InvalidGraph(violations));
    }

    struct Dfs<'a> {
        graph: &'a NetworkGraph,
        cap: usize,
        on_path: Vec<bool>,
        nodes: Vec<NodeId>,
        edges: Vec<EdgeId>,
        out: Vec<TrPath>,
    }

    impl Dfs<'_> {
        fn visit(&mut self, at: NodeId, attenuation: f64) -> Result<()> {
            for &eid in self.graph.out_edges(at) {
                let edge = self.graph.edge(eid);
                let next = edge.target;
                if self.on_path[next.0] {
                    continue;
                }
                let total = attenuation + edge.attenuation_db;
                match self.graph.kind(next) {
                    NodeKind::Receiver => {
                        if self.out.len() == self.cap {
                            return Err(Error::PathCap { cap: self.cap });
                        }
                        let mut nodes = self.nodes.clone();
                        nodes.push(next);
                        let mut edges = self.edges.clone();
                        edges.push(eid);
                        self.out.push(TrPath {
                            nodes,
                            edges,
                            total_attenuation_db: total,
                        });
                    }
                    NodeKind::Switch => {
                        self.on_path[next.0] = true;
                        self.nodes.push(next);
                        self.edges.push(eid);
                        self.visit(next, total)?;
                        self.edges.pop();
                        self.nodes.pop();
                        self.on_path[next.0] = false;
                    }
                    NodeKind::Transmitter => {}
                }
            }
            Ok(())
        }
    }

    let mut dfs = Dfs {
        graph,
        cap,
        on_path: vec![false; graph.node_count()],
        nodes: Vec::new(),
        edges: Vec::new(),
        out: Vec::new(),
    };
    for t in graph.nodes_of_kind(NodeKind::Transmitter) {
        dfs.on_path[t.0] = true;
        dfs.nodes.push(t);
        dfs.visit(t, 0.0)?;
        dfs.nodes.pop();
        dfs.on_path[t.0] = false;
    }

    let paths = dfs.out;
    let mut by_pair: BTreeMap<(NodeId, NodeId), Vec<usize>> = BTreeMap::new();
    for (i, p) in paths.iter().enumerate() {
        by_pair.entry(p.pair()).or_default().push(i);
    }
    Ok(PathCatalog { paths, by_pair })
}

/// A realizable transmitter-receiver pair with its priority weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub transmitter: NodeId,
    pub receiver: NodeId,
    pub priority: f64,
}

impl Link {
    pub fn pair(&self) -> (NodeId, NodeId) {
        (self.transmitter, self.receiver)
    }
}

/// Links ordered by (transmitter, receiver) index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkSet {
    links: Vec<Link>,
    index: HashMap<(NodeId, NodeId), usize>,
}

impl LinkSet {
    /// Builds a link set after checking that every pair is realizable in
    /// `catalog` and every priority is a valid weight.
    pub fn new(catalog: &PathCatalog, mut links: Vec<Link>) -> Result<Self> {
        links.sort_by_key(|l| l.pair());
        if let Some(w) = links.windows(2).find(|w| w[0].pair() == w[1].pair()) {
            return Err(Error::Precondition(format!(
                "link ({}, {}) listed twice",
                w[0].transmitter, w[0].receiver
            )));
        }
        for l in &links {
            if catalog.paths_for(l.transmitter, l.receiver).is_empty() {
                return Err(Error::UnrealizableLink {
                    transmitter: l.transmitter,
                    receiver: l.receiver,
                });
            }
            path_weight(None, l.priority)?;
        }
        let index = links
            .iter()
            .enumerate()
            .map(|(i, l)| (l.pair(), i))
            .collect();
        Ok(LinkSet { links, index })
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn get(&self, index: usize) -> &Link {
        &self.links[index]
    }

    pub fn index_of(&self, transmitter: NodeId, receiver: NodeId) -> Option<usize> {
        self.index.get(&(transmitter, receiver)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Link> {
        self.links.iter()
    }
}

/// All realizable pairs of the catalog as links. Pairs missing from
/// `priorities` get weight 1.
pub fn derive_links(
    catalog: &PathCatalog,
    priorities: Option<&BTreeMap<(NodeId, NodeId), f64>>,
) -> Result<LinkSet> {
    if let Some(p) = priorities {
        if let Some((&(t, r), _)) = p
            .iter()
            .find(|(&(t, r), _)| catalog.paths_for(t, r).is_empty())
        {
            return Err(Error::UnrealizableLink {
                transmitter: t,
                receiver: r,
            });
        }
    }
    let links = catalog
        .pairs()
        .map(|(t, r)| Link {
            transmitter: t,
            receiver: r,
            priority: priorities
                .and_then(|p| p.get(&(t, r)).copied())
                .unwrap_or(1.0),
        })
        .collect();
    LinkSet::new(catalog, links)
}
