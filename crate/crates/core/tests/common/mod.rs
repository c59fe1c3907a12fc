//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the solver code it is used to check.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::path::PathBuf;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use qnet_core::model::{GraphBuilder, NetworkGraph, NodeId, NodeKind};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Small random graph that may contain direct transmitter-receiver edges and
/// switch cycles. Never more than `max_edges` edges.
pub fn random_graph(rng: &mut ChaCha8Rng, max_edges: usize) -> NetworkGraph {
    let nt = 1 + below(rng, 3) as usize;
    let nr = 1 + below(rng, 3) as usize;
    let ns = below(rng, 5) as usize;
    let mut b = GraphBuilder::new();
    let tx: Vec<NodeId> = (0..nt).map(|i| b.transmitter(format!("t{i}"))).collect();
    let sw: Vec<NodeId> = (0..ns).map(|i| b.switch(format!("s{i}"))).collect();
    let rx: Vec<NodeId> = (0..nr).map(|i| b.receiver(format!("r{i}"))).collect();
    let mut candidates = Vec::new();
    for &t in &tx {
        for &s in &sw {
            candidates.push((t, s));
        }
        for &r in &rx {
            candidates.push((t, r));
        }
    }
    for &s in &sw {
        for &s2 in &sw {
            if s != s2 {
                candidates.push((s, s2));
            }
        }
        for &r in &rx {
            candidates.push((s, r));
        }
    }
    // Partial Fisher-Yates to pick a random subset of candidate edges.
    let want = (1 + below(rng, max_edges as u64) as usize).min(candidates.len());
    for i in 0..want {
        let j = i + below(rng, (candidates.len() - i) as u64) as usize;
        candidates.swap(i, j);
    }
    for &(u, v) in &candidates[..want] {
        b.edge(u, v, 0.5 + 11.5 * unit(rng));
    }
    b.build()
}

/// All simple transmitter-to-receiver paths as edge index sequences, by an
/// explicit-stack search over (vertex, visited set) states.
pub fn brute_paths(graph: &NetworkGraph) -> BTreeSet<Vec<usize>> {
    let n = graph.node_count();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, e) in graph.edges().iter().enumerate() {
        adjacency[e.source.0].push((e.target.0, i));
    }
    let kinds: Vec<NodeKind> = graph.nodes().iter().map(|x| x.kind).collect();
    let mut out = BTreeSet::new();
    let mut stack: Vec<(usize, Vec<bool>, Vec<usize>)> = Vec::new();
    for t in 0..n {
        if kinds[t] == NodeKind::Transmitter {
            let mut seen = vec![false; n];
            seen[t] = true;
            stack.push((t, seen, Vec::new()));
        }
    }
    while let Some((at, seen, edges)) = stack.pop() {
        for &(next, e) in &adjacency[at] {
            if seen[next] {
                continue;
            }
            let mut edges2 = edges.clone();
            edges2.push(e);
            match kinds[next] {
                NodeKind::Receiver => {
                    out.insert(edges2);
                }
                NodeKind::Switch => {
                    let mut seen2 = seen.clone();
                    seen2[next] = true;
                    stack.push((next, seen2, edges2));
                }
                NodeKind::Transmitter => {}
            }
        }
    }
    out
}

/// (transmitter, receiver) index pairs joined by a directed path through
/// switches, by breadth-first search.
pub fn reachable_pairs(graph: &NetworkGraph) -> BTreeSet<(usize, usize)> {
    let n = graph.node_count();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in graph.edges() {
        adjacency[e.source.0].push(e.target.0);
    }
    let kinds: Vec<NodeKind> = graph.nodes().iter().map(|x| x.kind).collect();
    let mut pairs = BTreeSet::new();
    for t in (0..n).filter(|&t| kinds[t] == NodeKind::Transmitter) {
        let mut seen = vec![false; n];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                match kinds[v] {
                    NodeKind::Receiver => {
                        pairs.insert((t, v));
                    }
                    NodeKind::Switch => queue.push_back(v),
                    NodeKind::Transmitter => {}
                }
            }
        }
    }
    pairs
}

/// Edge masks of every union of paths that pairwise share no edge, no
/// transmitter and no receiver.
pub fn configuration_masks(graph: &NetworkGraph) -> HashSet<u64> {
    let paths: Vec<Vec<usize>> = brute_paths(graph).into_iter().collect();
    let ends: Vec<(usize, usize, u64)> = paths
        .iter()
        .map(|p| {
            let t = graph.edges()[p[0]].source.0;
            let r = graph.edges()[*p.last().unwrap()].target.0;
            let mask = p.iter().fold(0u64, |m, &e| m | 1 << e);
            (t, r, mask)
        })
        .collect();
    let mut masks = HashSet::new();
    fn grow(
        ends: &[(usize, usize, u64)],
        from: usize,
        chosen: &mut Vec<usize>,
        masks: &mut HashSet<u64>,
    ) {
        masks.insert(chosen.iter().fold(0u64, |m, &i| m | ends[i].2));
        for i in from..ends.len() {
            let ok = chosen.iter().all(|&j| {
                ends[i].0 != ends[j].0 && ends[i].1 != ends[j].1 && ends[i].2 & ends[j].2 == 0
            });
            if ok {
                chosen.push(i);
                grow(ends, i + 1, chosen, masks);
                chosen.pop();
            }
        }
    }
    grow(&ends, 0, &mut Vec::new(), &mut masks);
    masks
}

/// Max-min value of a column pool: max k subject to sum_j w[j][l] x_j >= k
/// for every link l, sum x = 1, x >= 0. `w` is indexed column then link.
/// Solved by enumerating every vertex of the feasible region.
pub fn lp_vertex_oracle(w: &[Vec<f64>]) -> f64 {
    let n = w.len();
    let m = w[0].len();
    // Unknowns x_0..x_{n-1}, k. Inequalities written as a.z >= b.
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for l in 0..m {
        let mut a: Vec<f64> = (0..n).map(|j| w[j][l]).collect();
        a.push(-1.0);
        rows.push((a, 0.0));
    }
    for j in 0..n {
        let mut a = vec![0.0; n + 1];
        a[j] = 1.0;
        rows.push((a, 0.0));
    }
    let mut eq = vec![1.0; n + 1];
    eq[n] = 0.0;

    let mut best = f64::NEG_INFINITY;
    let mut pick = Vec::new();
    subsets(rows.len(), n, 0, &mut pick, &mut |active| {
        let mut a: Vec<Vec<f64>> = active.iter().map(|&i| rows[i].0.clone()).collect();
        let mut b: Vec<f64> = active.iter().map(|&i| rows[i].1).collect();
        a.push(eq.clone());
        b.push(1.0);
        if let Some(z) = gauss(a, b) {
            let feasible = rows.iter().all(|(r, rhs)| {
                r.iter().zip(&z).map(|(x, y)| x * y).sum::<f64>() >= rhs - 1e-9
            });
            if feasible && z[n] > best {
                best = z[n];
            }
        }
    });
    best
}

fn subsets(total: usize, k: usize, from: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in from..total {
        pick.push(i);
        subsets(total, k, i + 1, pick, f);
        pick.pop();
    }
}

// Gaussian elimination with partial pivoting; None when singular.
fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for k in c..n {
                        a[r][k] -= f * a[c][k];
                    }
                    b[r] -= f * b[c];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Post-hoc check that a set of paths (edge sequences) uses each
/// transmitter, receiver and edge at most once.
pub fn paths_compatible(graph: &NetworkGraph, paths: &[Vec<usize>]) -> bool {
    let mut t = HashSet::new();
    let mut r = HashSet::new();
    let mut e = HashSet::new();
    for p in paths {
        if !t.insert(graph.edges()[p[0]].source.0) {
            return false;
        }
        if !r.insert(graph.edges()[*p.last().unwrap()].target.0) {
            return false;
        }
        for &x in p {
            if !e.insert(x) {
                return false;
            }
        }
    }
    true
}

/// Paths and links of a network document, read straight from the JSON
/// without the library's parser: a depth-first count of simple
/// transmitter-receiver paths and a reachability count of linked pairs.
pub fn json_path_and_link_counts(text: &str) -> (usize, usize) {
    let doc: serde_json::Value = serde_json::from_str(text).unwrap();
    let kind: HashMap<String, String> = doc["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| {
            (
                n["id"].as_str().unwrap().to_string(),
                n["kind"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let mut adjacency: HashMap<String, Vec<String>> = HashMap::new();
    for e in doc["edges"].as_array().unwrap() {
        adjacency
            .entry(e["source"].as_str().unwrap().to_string())
            .or_default()
            .push(e["target"].as_str().unwrap().to_string());
    }
    fn dfs(
        at: &str,
        kind: &HashMap<String, String>,
        adjacency: &HashMap<String, Vec<String>>,
        visited: &mut Vec<String>,
        reached: &mut BTreeSet<String>,
    ) -> usize {
        let mut count = 0;
        for next in adjacency.get(at).into_iter().flatten() {
            if visited.contains(next) {
                continue;
            }
            match kind[next].as_str() {
                "receiver" => {
                    reached.insert(next.clone());
                    count += 1;
                }
                "switch" => {
                    visited.push(next.clone());
                    count += dfs(next, kind, adjacency, visited, reached);
                    visited.pop();
                }
                _ => {}
            }
        }
        count
    }
    let mut paths = 0;
    let mut links = 0;
    let mut transmitters: Vec<&String> = kind
        .iter()
        .filter(|(_, k)| k.as_str() == "transmitter")
        .map(|(n, _)| n)
        .collect();
    transmitters.sort();
    for t in transmitters {
        let mut reached = BTreeSet::new();
        paths += dfs(t, &kind, &adjacency, &mut vec![t.clone()], &mut reached);
        links += reached.len();
    }
    (paths, links)
}
