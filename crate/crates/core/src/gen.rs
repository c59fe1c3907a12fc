//! Seeded random raw network graphs.
//!
//! Graphs are layered: transmitters feed switches, switches feed later
//! switches in a fixed order (so the switch subgraph is acyclic) and
//! switches feed receivers.
//!
//! # Bit-stream contract
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::from_seed`) keyed with
//! the 64-bit seed in little-endian order in the first 8 key bytes, the other
//! 24 bytes zero. A uniform draw is `(next_u64 >> 11) * 2^-53`. Candidate
//! edges are visited in this order, each drawing one uniform `u` and keeping
//! the edge iff `u < p`, followed by one more uniform `v` for a kept edge
//! whose attenuation is `lo + (hi - lo) * v`:
//!
//! 1. transmitter `i` to switch `j`, `i` outer, `j` inner, with `p_ts`;
//! 2. switch `i` to switch `j` for `i < j`, `i` outer, with `p_ss`;
//! 3. switch `i` to receiver `j`, `i` outer, `j` inner, with `p_sr`.
//!
//! Nodes are named `t<i>`, `s<i>`, `r<i>` and indexed transmitters first,
//! then switches, then receivers.
//!
//! A batch draws its instance seeds as consecutive `next_u64` outputs of a
//! generator keyed with the batch seed.

use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GraphBuilder, NetworkGraph, NodeId, NodeKind};

/// Sliding window over which a batch's rejection rate is judged.
pub const REJECTION_WINDOW: usize = 1000;
/// Rejections within the window above which a spec is called degenerate.
pub const REJECTION_LIMIT: usize = 990;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub transmitters: usize,
    pub receivers: usize,
    pub switches: usize,
    pub p_ts: f64,
    pub p_ss: f64,
    pub p_sr: f64,
    pub attenuation_lo_db: f64,
    pub attenuation_hi_db: f64,
    pub seed: u64,
}

impl Default for GenSpec {
    /// The benchmark defaults, with three nodes of each kind.
    fn default() -> Self {
        GenSpec {
            transmitters: 3,
            receivers: 3,
            switches: 3,
            p_ts: 0.5,
            p_ss: 0.3,
            p_sr: 0.5,
            attenuation_lo_db: 1.0,
            attenuation_hi_db: 10.0,
            seed: 0,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_ts", self.p_ts), ("p_ss", self.p_ss), ("p_sr", self.p_sr)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidSpec(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        let (lo, hi) = (self.attenuation_lo_db, self.attenuation_hi_db);
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "attenuation range [{lo}, {hi}] dB must satisfy 0 < lo <= hi"
            )));
        }
        Ok(())
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn generate(spec: &GenSpec) -> Result<NetworkGraph> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed);
    let mut b = GraphBuilder::new();
    let tx: Vec<NodeId> = (0..spec.transmitters).map(|i| b.transmitter(format!("t{i}"))).collect();
    let sw: Vec<NodeId> = (0..spec.switches).map(|i| b.switch(format!("s{i}"))).collect();
    let rx: Vec<NodeId> = (0..spec.receivers).map(|i| b.receiver(format!("r{i}"))).collect();

    let (lo, hi) = (spec.attenuation_lo_db, spec.attenuation_hi_db);
    let mut maybe_edge = |b: &mut GraphBuilder, u: NodeId, v: NodeId, p: f64| {
        if uniform(&mut rng) < p {
            let att = lo + (hi - lo) * uniform(&mut rng);
            b.edge(u, v, att);
        }
    };
    for &t in &tx {
        for &s in &sw {
            maybe_edge(&mut b, t, s, spec.p_ts);
        }
    }
    for (i, &s) in sw.iter().enumerate() {
        for &s2 in &sw[i + 1..] {
            maybe_edge(&mut b, s, s2, spec.p_ss);
        }
    }
    for &s in &sw {
        for &r in &rx {
            maybe_edge(&mut b, s, r, spec.p_sr);
        }
    }
    Ok(b.build())
}

/// True if some transmitter reaches some receiver.
pub fn has_realizable_link(graph: &NetworkGraph) -> bool {
    let mut seen = vec![false; graph.node_count()];
    let mut stack: Vec<NodeId> = graph.nodes_of_kind(NodeKind::Transmitter).collect();
    for t in &stack {
        seen[t.0] = true;
    }
    while let Some(n) = stack.pop() {
        for &e in graph.out_edges(n) {
            let m = graph.edge(e).target;
            match graph.kind(m) {
                NodeKind::Receiver => return true,
                NodeKind::Switch if !seen[m.0] => {
                    seen[m.0] = true;
                    stack.push(m);
                }
                _ => {}
            }
        }
    }
    false
}

#[derive(Debug, Clone)]
pub struct Instance {
    /// Seed that regenerates this graph through [`generate`].
    pub seed: u64,
    pub graph: NetworkGraph,
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub instances: Vec<Instance>,
    pub rejected: usize,
}

/// Draws graphs until `count` of them have at least one realizable link.
pub fn generate_batch(spec: &GenSpec, count: usize) -> Result<Batch> {
    if count == 0 {
        return Err(Error::InvalidSpec("batch size must be at least 1".into()));
    }
    spec.validate()?;
    let mut seeds = rng_for(spec.seed);
    let mut instances = Vec::with_capacity(count);
    let mut rejected = 0;
    let mut window: VecDeque<bool> = VecDeque::with_capacity(REJECTION_WINDOW);
    let mut window_rejections = 0;
    while instances.len() < count {
        let seed = seeds.next_u64();
        let graph = generate(&GenSpec { seed, ..*spec })?;
        let accepted = has_realizable_link(&graph);
        if accepted {
            instances.push(Instance { seed, graph });
        } else {
            rejected += 1;
        }
        window.push_back(!accepted);
        window_rejections += usize::from(!accepted);
        if window.len() > REJECTION_WINDOW && window.pop_front() == Some(true) {
            window_rejections -= 1;
        }
        if window.len() == REJECTION_WINDOW && window_rejections > REJECTION_LIMIT {
            return Err(Error::DegenerateSpec {
                rejected: window_rejections,
                window: REJECTION_WINDOW,
            });
        }
    }
    Ok(Batch {
        instances,
        rejected,
    })
}
