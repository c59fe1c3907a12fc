//! Entanglement-distribution scheduling on quantum networks.
//!
//! A network is a directed graph of transmitters, switches and receivers with
//! per-edge attenuation. A configuration is a set of transmitter-to-receiver
//! paths sharing no transmitter, receiver or edge. The scheduler finds time
//! fractions over configurations that maximize the smallest weighted link
//! rate, by column generation over a restricted master LP with a
//! branch-and-bound pricing step.
//!
//! ```
//! use qnet_core::{derive_links, enumerate_paths, solve, GraphBuilder, SolveOptions};
//!
//! let mut b = GraphBuilder::new();
//! let t = b.transmitter("t");
//! let s = b.switch("s");
//! let r = b.receiver("r");
//! b.edge(t, s, 1.0);
//! b.edge(s, r, 2.0);
//! let graph = b.build();
//! let catalog = enumerate_paths(&graph, 1000).unwrap();
//! let links = derive_links(&catalog, None).unwrap();
//! let report = solve(&graph, &links, &SolveOptions::default()).unwrap();
//! assert!(report.objective() > 0.0);
//! ```

pub mod bench;
pub mod colgen;
pub mod config;
pub mod error;
pub mod gen;
pub mod io;
pub mod master;
pub mod model;
pub mod oracle;
pub mod pricing;
mod simplex;

pub use colgen::{initialize_pool, solve, solve_with_catalog, SolveOptions, SolveReport};
pub use config::{
    check_flow, config_key, flow_to_paths, paths_to_flow, Configuration, FlowMapping, FlowReport,
};
pub use error::{Error, ErrorClass, Result};
pub use gen::{generate, generate_batch, GenSpec};
pub use io::{LoadedNetwork, NetworkFile, ScheduleFile};
pub use master::{solve_rmp, Column, ColumnPool, DualPrices, Schedule};
pub use model::{
    derive_links, enumerate_paths, path_weight, validate_graph, GraphBuilder, Link, LinkSet,
    NetworkGraph, NodeId, NodeKind, PathCatalog, TrPath, DEFAULT_PATH_CAP,
};
pub use pricing::{solve_pricing, PricingInstance, PricingOptions, PricingOutcome};
