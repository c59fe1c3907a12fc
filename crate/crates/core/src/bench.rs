//! Scaling benchmark: column generation over seeded random batches, one batch
//! per scenario and size.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colgen::{solve_with_catalog, SolveOptions};
use crate::error::{Error, Result};
use crate::gen::{generate_batch, GenSpec, Instance};
use crate::model::{derive_links, enumerate_paths};

/// Size of the fixed node class in the fixed-receivers and fixed-switches
/// scenarios.
pub const FIXED_CLASS_SIZE: usize = 5;
pub const DEFAULT_INSTANCES: usize = 15;
pub const DEFAULT_SIZES: [usize; 5] = [2, 3, 4, 5, 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Transmitters, receivers and switches all equal to the size.
    FullGrowth,
    /// Transmitters and switches grow, receivers fixed.
    FixedReceivers,
    /// Transmitters and receivers grow, switches fixed.
    FixedSwitches,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::FullGrowth,
        Scenario::FixedReceivers,
        Scenario::FixedSwitches,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::FullGrowth => "full-growth",
            Scenario::FixedReceivers => "fixed-receivers",
            Scenario::FixedSwitches => "fixed-switches",
        }
    }

    /// (transmitters, receivers, switches) at size `n`.
    pub fn counts(self, n: usize) -> (usize, usize, usize) {
        match self {
            Scenario::FullGrowth => (n, n, n),
            Scenario::FixedReceivers => (n, FIXED_CLASS_SIZE, n),
            Scenario::FixedSwitches => (n, n, FIXED_CLASS_SIZE),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scenario {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub scenarios: Vec<Scenario>,
    pub sizes: Vec<usize>,
    pub instances: usize,
    /// Base seed; the batch at size `n` is seeded with `seed + n`.
    pub seed: u64,
    /// Generator probabilities and attenuation range. Counts and seed are
    /// overwritten per batch.
    pub spec: GenSpec,
    pub solve: SolveOptions,
    /// Write 0 for every wall time so that runs compare byte for byte.
    pub omit_timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            scenarios: Scenario::ALL.to_vec(),
            sizes: DEFAULT_SIZES.to_vec(),
            instances: DEFAULT_INSTANCES,
            seed: 0,
            spec: GenSpec::default(),
            solve: SolveOptions::default(),
            omit_timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scenario: Scenario,
    pub transmitters: usize,
    pub receivers: usize,
    pub switches: usize,
    pub instance_seed: u64,
    pub edges: usize,
    pub links: usize,
    pub paths: usize,
    pub iterations: usize,
    pub wall_time_ms: f64,
    pub objective: Option<f64>,
    pub error: Option<String>,
}

pub const CSV_HEADER: [&str; 12] = [
    "scenario",
    "transmitters",
    "receivers",
    "switches",
    "instance_seed",
    "edges",
    "links",
    "paths",
    "iterations",
    "wall_time_ms",
    "objective",
    "error",
];

fn run_instance(
    scenario: Scenario,
    spec: &GenSpec,
    instance: &Instance,
    options: &SolveOptions,
    omit_timing: bool,
) -> BenchRow {
    let start = Instant::now();
    let mut row = BenchRow {
        scenario,
        transmitters: spec.transmitters,
        receivers: spec.receivers,
        switches: spec.switches,
        instance_seed: instance.seed,
        edges: instance.graph.edge_count(),
        links: 0,
        paths: 0,
        iterations: 0,
        wall_time_ms: 0.0,
        objective: None,
        error: None,
    };
    let outcome = enumerate_paths(&instance.graph, options.path_cap).and_then(|catalog| {
        row.paths = catalog.len();
        let links = derive_links(&catalog, None)?;
        row.links = links.len();
        solve_with_catalog(&catalog, &links, options)
    });
    match outcome {
        Ok(report) => {
            row.iterations = report.iterations;
            row.objective = Some(report.objective());
        }
        Err(e) => {
            if let Error::IterationCap { cap, .. } = &e {
                row.iterations = *cap;
            }
            row.error = Some(e.to_string());
        }
    }
    if !omit_timing {
        row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    row
}

/// Runs every (scenario, size) batch. Rows come back in scenario, size,
/// instance order whatever the thread count. A failed instance is recorded
/// in its row; a batch that cannot be generated aborts the run.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if config.instances == 0 {
        return Err(Error::InvalidSpec("instances must be at least 1".into()));
    }
    let mut jobs = Vec::new();
    for &scenario in &config.scenarios {
        for &n in &config.sizes {
            let (transmitters, receivers, switches) = scenario.counts(n);
            let spec = GenSpec {
                transmitters,
                receivers,
                switches,
                seed: config.seed.wrapping_add(n as u64),
                ..config.spec
            };
            let batch = generate_batch(&spec, config.instances)?;
            log::info!(
                "{scenario} n={n}: {} instances, {} rejected",
                batch.instances.len(),
                batch.rejected
            );
            jobs.extend(batch.instances.into_iter().map(|inst| (scenario, spec, inst)));
        }
    }
    Ok(jobs
        .par_iter()
        .map(|(scenario, spec, inst)| {
            run_instance(*scenario, spec, inst, &config.solve, config.omit_timing)
        })
        .collect())
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(format!("csv write failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.scenario.name().to_string(),
            r.transmitters.to_string(),
            r.receivers.to_string(),
            r.switches.to_string(),
            r.instance_seed.to_string(),
            r.edges.to_string(),
            r.links.to_string(),
            r.paths.to_string(),
            r.iterations.to_string(),
            format!("{:.3}", r.wall_time_ms),
            r.objective.map(|k| format!("{k:.12e}")).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Parse(format!("csv write failed: {e}")))?;
    Ok(())
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub size: usize,
    pub instances: usize,
    pub failures: usize,
    /// Mean iterations over instances that solved.
    pub mean_iterations: f64,
    pub mean_paths: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario: Scenario,
    pub sizes: Vec<SizeSummary>,
    /// Least-squares slope of log(mean iterations) against log(size).
    pub iteration_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub format_version: u32,
    pub scenarios: Vec<ScenarioSummary>,
}

pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn size_of(scenario: Scenario, row: &BenchRow) -> usize {
    match scenario {
        Scenario::FullGrowth | Scenario::FixedReceivers => row.transmitters,
        Scenario::FixedSwitches => row.receivers,
    }
}

pub fn summarize(rows: &[BenchRow]) -> BenchSummary {
    let mut scenarios = Vec::new();
    for scenario in Scenario::ALL {
        let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.scenario == scenario).collect();
        if mine.is_empty() {
            continue;
        }
        let mut sizes: Vec<usize> = mine.iter().map(|r| size_of(scenario, r)).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let sizes: Vec<SizeSummary> = sizes
            .into_iter()
            .map(|n| {
                let at: Vec<&&BenchRow> =
                    mine.iter().filter(|r| size_of(scenario, r) == n).collect();
                let ok: Vec<&&BenchRow> = at.iter().copied().filter(|r| r.error.is_none()).collect();
                let mean = |f: &dyn Fn(&BenchRow) -> f64| {
                    if ok.is_empty() {
                        0.0
                    } else {
                        ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
                    }
                };
                SizeSummary {
                    size: n,
                    instances: at.len(),
                    failures: at.len() - ok.len(),
                    mean_iterations: mean(&|r| r.iterations as f64),
                    mean_paths: mean(&|r| r.paths as f64),
                }
            })
            .collect();
        let points: Vec<(f64, f64)> = sizes
            .iter()
            .map(|s| (s.size as f64, s.mean_iterations))
            .collect();
        scenarios.push(ScenarioSummary {
            scenario,
            iteration_exponent: log_log_slope(&points),
            sizes,
        });
    }
    BenchSummary {
        format_version: crate::io::FORMAT_VERSION,
        scenarios,
    }
}

impl BenchSummary {
    pub fn to_json(&self) -> String {
        crate::io::to_pretty_json(self)
    }

    pub fn scenario(&self, scenario: Scenario) -> Option<&ScenarioSummary> {
        self.scenarios.iter().find(|s| s.scenario == scenario)
    }
}
