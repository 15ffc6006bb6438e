//! Benchmark runner: generated instance families against a list of solvers,
//! one CSV row per (instance, solver).
//!
//! ```toml
//! solvers = ["spdp", "bruteforce"]
//! epsilon = "0.1"          # used by fptas / ptas / auto
//!
//! [[family]]
//! name = "small-sp"
//! generator = "random-sp"  # random-sp | random-single-node | random-general | 3part | part | unitcap
//! count = 3
//! seed = 1
//! arcs = 6
//! horizon = 3
//! limit = 2
//! ```

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::approx::Epsilon;
use crate::dispatch::{solve, Algorithm, DispatchConfig};
use crate::generators::{
    gen_3partition, gen_partition, gen_random_general, gen_random_single_node, gen_random_sp, gen_unitcap,
    RandomGeneralParams, RandomSpParams,
};
use crate::model::{Capacity, Instance};
use crate::oracle::{search_space_size, solve_bruteforce_with, OracleOptions};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub solvers: Vec<String>,
    pub epsilon: Option<String>,
    /// Instances above this assignment count get no oracle reference.
    #[serde(default = "default_oracle_cap")]
    pub oracle_cap: u64,
    #[serde(rename = "family", default)]
    pub families: Vec<FamilyConfig>,
}

fn default_oracle_cap() -> u64 {
    100_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub name: String,
    pub generator: String,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_arcs")]
    pub arcs: usize,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_limit")]
    pub limit: usize,
    #[serde(default = "default_capacity")]
    pub capacity: (Capacity, Capacity),
    #[serde(default = "default_job_probability")]
    pub job_probability: f64,
    #[serde(default)]
    pub balanced: bool,
    #[serde(default = "default_side")]
    pub in_arcs: usize,
    #[serde(default = "default_side")]
    pub out_arcs: usize,
    /// Gadget target sum.
    pub b: Option<Capacity>,
    /// Gadget values.
    pub values: Option<Vec<Capacity>>,
}

fn one() -> usize {
    1
}
fn default_arcs() -> usize {
    6
}
fn default_nodes() -> usize {
    5
}
fn default_horizon() -> usize {
    3
}
fn default_limit() -> usize {
    2
}
fn default_capacity() -> (Capacity, Capacity) {
    (1, 20)
}
fn default_job_probability() -> f64 {
    0.6
}
fn default_side() -> usize {
    3
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let config: BenchConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        for s in &config.solvers {
            s.parse::<Algorithm>()?;
        }
        if let Some(e) = &config.epsilon {
            e.parse::<Epsilon>().map_err(|e| e.to_string())?;
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub family: String,
    pub instance: usize,
    pub solver: String,
    pub total: Option<Capacity>,
    pub wall_ms: f64,
    /// `(OPT - total) / OPT` when an oracle optimum is available.
    pub gap: Option<f64>,
    pub status: String,
}

/// Instances of one family; `seed_override` replaces the configured seed.
pub fn family_instances(family: &FamilyConfig, seed_override: Option<u64>) -> Result<Vec<Instance>, String> {
    let base = seed_override.unwrap_or(family.seed);
    let gadget = |f: fn(Capacity, &[Capacity]) -> crate::Result<crate::generators::Generated>| {
        let (Some(b), Some(values)) = (family.b, family.values.as_ref()) else {
            return Err(format!("family {:?}: gadget needs `b` and `values`", family.name));
        };
        f(b, values).map(|g| vec![g.instance]).map_err(|e| e.to_string())
    };
    let seeds = (0..family.count as u64).map(|k| base.wrapping_add(k));
    match family.generator.as_str() {
        "random-sp" => Ok(seeds
            .map(|seed| {
                gen_random_sp(&RandomSpParams {
                    arc_count: family.arcs,
                    capacities: family.capacity,
                    job_probability: family.job_probability,
                    horizon: family.horizon,
                    limit: family.limit,
                    balanced: family.balanced,
                    seed,
                })
            })
            .collect()),
        "random-single-node" => Ok(seeds
            .map(|seed| gen_random_single_node(family.in_arcs, family.out_arcs, family.capacity, family.horizon, seed))
            .collect()),
        "random-general" => Ok(seeds
            .map(|seed| {
                gen_random_general(&RandomGeneralParams {
                    node_count: family.nodes,
                    arc_count: family.arcs,
                    capacities: family.capacity,
                    job_probability: family.job_probability,
                    horizon: family.horizon,
                    limit: family.limit,
                    seed,
                })
            })
            .collect()),
        "3part" => gadget(gen_3partition),
        "part" => gadget(gen_partition),
        "unitcap" => gadget(gen_unitcap),
        other => Err(format!("family {:?}: unknown generator {other:?}", family.name)),
    }
}

pub fn run_bench(config: &BenchConfig, seed_override: Option<u64>) -> Vec<BenchRow> {
    let epsilon = config.epsilon.as_deref().and_then(|e| e.parse::<Epsilon>().ok());
    let dispatch = DispatchConfig::default();
    let mut rows = Vec::new();
    for family in &config.families {
        let instances = match family_instances(family, seed_override) {
            Ok(list) => list,
            Err(message) => {
                rows.push(BenchRow {
                    family: family.name.clone(),
                    instance: 0,
                    solver: String::new(),
                    total: None,
                    wall_ms: 0.0,
                    gap: None,
                    status: format!("error: {message}"),
                });
                continue;
            }
        };
        for (k, instance) in instances.iter().enumerate() {
            let optimum = (search_space_size(instance) <= config.oracle_cap as u128)
                .then(|| {
                    solve_bruteforce_with(
                        instance,
                        &OracleOptions {
                            cap: config.oracle_cap as u128,
                        },
                    )
                    .ok()
                })
                .flatten()
                .map(|s| s.report.total);
            for name in &config.solvers {
                let algorithm: Algorithm = name.parse().expect("validated when the config was read");
                let start = Instant::now();
                let outcome = solve(instance, algorithm, epsilon, &dispatch);
                let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
                let (total, status) = match &outcome {
                    Ok(sol) => (Some(sol.report.total), "ok".to_string()),
                    Err(e) => (None, format!("error: {e}")),
                };
                let gap = match (total, optimum) {
                    (Some(t), Some(opt)) if opt > 0 => Some((opt - t) as f64 / opt as f64),
                    (Some(_), Some(_)) => Some(0.0),
                    _ => None,
                };
                rows.push(BenchRow {
                    family: family.name.clone(),
                    instance: k,
                    solver: name.clone(),
                    total,
                    wall_ms,
                    gap,
                    status,
                });
            }
        }
    }
    rows
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("rows serialize to CSV");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("CSV is UTF-8")
}
