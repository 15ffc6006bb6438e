//! Instance generators: the three reduction gadgets, each with a bound it
//! meets exactly on YES inputs, and seeded random families.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::max_flow;
use crate::model::{Capacity, FlowNetwork, Instance, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ThreePartition,
    Partition,
    UnitCapacity,
    Random,
}

impl Decision {
    fn as_str(self) -> &'static str {
        match self {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::Unknown => "unknown",
        }
    }
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::ThreePartition => "3part",
            Family::Partition => "part",
            Family::UnitCapacity => "unitcap",
            Family::Random => "random",
        }
    }
}

/// What is known about a generated instance's optimum.
///
/// For the gadgets, `bound` is an upper bound on the optimum that is met
/// exactly iff `decision` is `Yes`. For random instances it is the trivial
/// bound `T * F_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceCertificate {
    pub bound: Capacity,
    pub decision: Decision,
    pub family: Family,
}

impl fmt::Display for InstanceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bound {}", self.bound)?;
        writeln!(f, "decision {}", self.decision.as_str())?;
        writeln!(f, "family {}", self.family.as_str())
    }
}

impl FromStr for InstanceCertificate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut bound = None;
        let mut decision = None;
        let mut family = None;
        for (no, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once(' ').ok_or_else(|| format!("line {}: expected `key value`", no + 1))?;
            let value = value.trim();
            match key {
                "bound" => bound = Some(value.parse().map_err(|_| format!("line {}: bad bound {value:?}", no + 1))?),
                "decision" => {
                    decision = Some(match value {
                        "yes" => Decision::Yes,
                        "no" => Decision::No,
                        "unknown" => Decision::Unknown,
                        _ => return Err(format!("line {}: bad decision {value:?}", no + 1)),
                    })
                }
                "family" => {
                    family = Some(match value {
                        "3part" => Family::ThreePartition,
                        "part" => Family::Partition,
                        "unitcap" => Family::UnitCapacity,
                        "random" => Family::Random,
                        _ => return Err(format!("line {}: bad family {value:?}", no + 1)),
                    })
                }
                _ => return Err(format!("line {}: unknown key {key:?}", no + 1)),
            }
        }
        Ok(InstanceCertificate {
            bound: bound.ok_or("missing bound")?,
            decision: decision.ok_or("missing decision")?,
            family: family.ok_or("missing family")?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub certificate: InstanceCertificate,
}

fn decided(yes: bool) -> Decision {
    if yes {
        Decision::Yes
    } else {
        Decision::No
    }
}

/// Whether some subset of `values` sums to `target`.
pub fn subset_sum_exists(values: &[Capacity], target: Capacity) -> bool {
    if target < 0 || values.iter().any(|&v| v < 0) {
        return false;
    }
    let target = target as usize;
    let mut reachable = vec![false; target + 1];
    reachable[0] = true;
    for &v in values {
        let v = v as usize;
        for s in (v..=target).rev() {
            reachable[s] |= reachable[s - v];
        }
    }
    reachable[target]
}

/// Whether `values` split into triples that each sum to `b`.
pub fn three_partition_exists(values: &[Capacity], b: Capacity) -> bool {
    if !values.len().is_multiple_of(3) {
        return false;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    let bins = values.len() / 3;
    let mut room = vec![b; bins];
    let mut count = vec![0usize; bins];
    fn place(i: usize, items: &[Capacity], room: &mut [Capacity], count: &mut [usize]) -> bool {
        if i == items.len() {
            return room.iter().all(|&r| r == 0);
        }
        for k in 0..room.len() {
            // empty bins are interchangeable
            if count[k] == 0 && count[..k].contains(&0) {
                continue;
            }
            if count[k] < 3 && room[k] >= items[i] {
                room[k] -= items[i];
                count[k] += 1;
                if place(i + 1, items, room, count) {
                    return true;
                }
                room[k] += items[i];
                count[k] -= 1;
            }
        }
        false
    }
    place(0, &sorted, &mut room, &mut count)
}

fn check_three_partition_input(b: Capacity, values: &[Capacity]) -> Result<usize> {
    if values.is_empty() || !values.len().is_multiple_of(3) {
        return Err(Error::PreconditionViolated(format!(
            "3-partition needs a positive multiple of three values, got {}",
            values.len()
        )));
    }
    let n = values.len() / 3;
    if let Some(&u) = values.iter().find(|&&u| 4 * u <= b || 2 * u >= b) {
        return Err(Error::PreconditionViolated(format!("value {u} is not strictly between B/4 and B/2 for B = {b}")));
    }
    let sum: Capacity = values.iter().sum();
    if sum != n as Capacity * b {
        return Err(Error::PreconditionViolated(format!("values sum to {sum}, expected n*B = {}", n as Capacity * b)));
    }
    Ok(n)
}

/// Single transshipment node `v = 1` between `s = 0` and `t = 2`. Value `u_i`
/// becomes arc `i`: `s -> v` with capacity `3 u_i - B` if that is
/// nonnegative, else `v -> t` with capacity `B - 3 u_i`. `T = n`, `K = 3`,
/// every arc a job; the optimum is `(n - 1) X` (X the total inflow capacity)
/// iff the values 3-partition.
pub fn gen_3partition(b: Capacity, values: &[Capacity]) -> Result<Generated> {
    let n = check_three_partition_input(b, values)?;
    let mut g = FlowNetwork::new(3, 0, 2);
    let mut inflow = 0;
    for &u in values {
        let w = 3 * u - b;
        if w >= 0 {
            g.add_arc(0, 1, w);
            inflow += w;
        } else {
            g.add_arc(1, 2, -w);
        }
    }
    let m = g.arc_count();
    Ok(Generated {
        instance: Instance::uniform(g, 0..m, n, 3),
        certificate: InstanceCertificate {
            bound: (n as Capacity - 1) * inflow,
            decision: decided(three_partition_exists(values, b)),
            family: Family::ThreePartition,
        },
    })
}

/// Arcs `s -> v` with capacities `u_i`, then two arcs `v -> t` of capacity
/// `B`; `T = 2`, `K = |J| - 1`, every arc a job. The optimum is `2B` iff
/// some subset sums to `B`.
pub fn gen_partition(b: Capacity, values: &[Capacity]) -> Result<Generated> {
    if values.is_empty() || values.iter().any(|&u| u < 0) {
        return Err(Error::PreconditionViolated("partition needs nonnegative values".into()));
    }
    let sum: Capacity = values.iter().sum();
    if sum != 2 * b {
        return Err(Error::PreconditionViolated(format!("values sum to {sum}, expected 2B = {}", 2 * b)));
    }
    let mut g = FlowNetwork::new(3, 0, 2);
    for &u in values {
        g.add_arc(0, 1, u);
    }
    g.add_arc(1, 2, b);
    g.add_arc(1, 2, b);
    let m = g.arc_count();
    Ok(Generated {
        instance: Instance::uniform(g, 0..m, 2, m - 1),
        certificate: InstanceCertificate {
            bound: 2 * b,
            decision: decided(subset_sum_exists(values, b)),
            family: Family::Partition,
        },
    })
}

/// `3n` disjoint paths from `s = 0` to `v = 1`, path `i` a chain of `u_i`
/// unit job arcs, followed by `3(n - 1)` unit non-job arcs `v -> t = 2`.
/// `T = n`, `K = B`; the optimum is `3n(n - 1)` iff the values 3-partition.
pub fn gen_unitcap(b: Capacity, values: &[Capacity]) -> Result<Generated> {
    let n = check_three_partition_input(b, values)?;
    let inner: usize = values.iter().map(|&u| u as usize - 1).sum();
    let mut g = FlowNetwork::new(3 + inner, 0, 2);
    let mut next: NodeId = 3;
    for &u in values {
        let mut at = 0;
        for _ in 1..u {
            g.add_arc(at, next, 1);
            at = next;
            next += 1;
        }
        g.add_arc(at, 1, 1);
    }
    let jobs = g.arc_count();
    for _ in 0..3 * (n - 1) {
        g.add_arc(1, 2, 1);
    }
    Ok(Generated {
        instance: Instance::uniform(g, 0..jobs, n, b as usize),
        certificate: InstanceCertificate {
            bound: 3 * n as Capacity * (n as Capacity - 1),
            decision: decided(three_partition_exists(values, b)),
            family: Family::UnitCapacity,
        },
    })
}

/// Certificate for a random instance: the trivial bound `T * F_0`.
pub fn random_certificate(instance: &Instance) -> InstanceCertificate {
    InstanceCertificate {
        bound: instance.horizon() as Capacity * max_flow(instance.network(), &[]),
        decision: Decision::Unknown,
        family: Family::Random,
    }
}

#[derive(Debug, Clone)]
pub struct RandomSpParams {
    pub arc_count: usize,
    /// Inclusive capacity range.
    pub capacities: (Capacity, Capacity),
    pub job_probability: f64,
    pub horizon: usize,
    pub limit: usize,
    /// Capacities chosen so every interior node is balanced.
    pub balanced: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Arc,
    Series(usize, usize),
    Parallel(usize, usize),
}

fn draw(rng: &mut ChaCha8Rng, range: (Capacity, Capacity)) -> Capacity {
    let (lo, hi) = (range.0.min(range.1), range.0.max(range.1));
    rng.gen_range(lo..=hi)
}

/// Keeps at most `slots` jobs, the lowest arc ids first.
fn pick_jobs(rng: &mut ChaCha8Rng, arc_count: usize, probability: f64, slots: usize) -> Vec<usize> {
    let p = probability.clamp(0.0, 1.0);
    let mut jobs: Vec<usize> = (0..arc_count).filter(|_| rng.gen_bool(p)).collect();
    jobs.truncate(slots);
    jobs
}

/// Random SP network built by repeatedly joining two random components in
/// series or in parallel. Source is node 0, sink node 1.
pub fn gen_random_sp(params: &RandomSpParams) -> Instance {
    let m = params.arc_count.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut shapes: Vec<Shape> = vec![Shape::Arc; m];
    let mut pool: Vec<usize> = (0..m).collect();
    while pool.len() > 1 {
        let i = rng.gen_range(0..pool.len());
        let a = pool.swap_remove(i);
        let j = rng.gen_range(0..pool.len());
        let b = pool.swap_remove(j);
        shapes.push(if rng.gen_bool(0.5) { Shape::Series(a, b) } else { Shape::Parallel(a, b) });
        pool.push(shapes.len() - 1);
    }
    let root = pool[0];

    // depth-first layout; each stack item carries its terminals and, in
    // balanced mode, the flow value it must carry
    let mut arcs: Vec<(NodeId, NodeId, Capacity)> = Vec::with_capacity(m);
    let mut next_node = 2;
    let top = draw(&mut rng, params.capacities);
    let mut stack = vec![(root, 0, 1, top)];
    while let Some((k, s, t, value)) = stack.pop() {
        match shapes[k] {
            Shape::Arc => {
                let c = if params.balanced { value } else { draw(&mut rng, params.capacities) };
                arcs.push((s, t, c));
            }
            Shape::Series(a, b) => {
                let mid = next_node;
                next_node += 1;
                stack.push((b, mid, t, value));
                stack.push((a, s, mid, value));
            }
            Shape::Parallel(a, b) => {
                let x = if value > 0 { rng.gen_range(0..=value) } else { 0 };
                stack.push((b, s, t, value - x));
                stack.push((a, s, t, x));
            }
        }
    }
    let mut g = FlowNetwork::new(next_node, 0, 1);
    for (u, v, c) in arcs {
        g.add_arc(u, v, c);
    }
    let jobs = pick_jobs(&mut rng, m, params.job_probability, params.limit * params.horizon);
    Instance::uniform(g, jobs, params.horizon, params.limit)
}

/// `s = 0 -> v = 1 -> t = 2` with every arc a job, `K = 2`. Jobs beyond the
/// `2T` slots are dropped, highest arc ids first.
pub fn gen_random_single_node(
    in_arcs: usize,
    out_arcs: usize,
    capacities: (Capacity, Capacity),
    horizon: usize,
    seed: u64,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = FlowNetwork::new(3, 0, 2);
    for _ in 0..in_arcs {
        g.add_arc(0, 1, draw(&mut rng, capacities));
    }
    for _ in 0..out_arcs {
        g.add_arc(1, 2, draw(&mut rng, capacities));
    }
    let m = g.arc_count().min(2 * horizon);
    Instance::uniform(g, 0..m, horizon, 2)
}

#[derive(Debug, Clone)]
pub struct RandomGeneralParams {
    pub node_count: usize,
    pub arc_count: usize,
    pub capacities: (Capacity, Capacity),
    pub job_probability: f64,
    pub horizon: usize,
    pub limit: usize,
    pub seed: u64,
}

/// Arbitrary topology on `node_count >= 2` nodes, `s = 0`, `t = n - 1`.
/// A spine `0 -> 1 -> ... -> n-1` keeps the sink reachable; the remaining
/// arcs are mostly forward with an occasional backward arc.
pub fn gen_random_general(params: &RandomGeneralParams) -> Instance {
    let n = params.node_count.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut g = FlowNetwork::new(n, 0, n - 1);
    let spine = (n - 1).min(params.arc_count);
    for v in 0..spine {
        g.add_arc(v, v + 1, draw(&mut rng, params.capacities));
    }
    while g.arc_count() < params.arc_count {
        let mut u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        if u > v && rng.gen_bool(0.85) {
            std::mem::swap(&mut u, &mut v);
        }
        g.add_arc(u, v, draw(&mut rng, params.capacities));
    }
    let m = g.arc_count();
    let mut ids: Vec<usize> = (0..m).collect();
    ids.shuffle(&mut rng);
    let p = params.job_probability.clamp(0.0, 1.0);
    let mut jobs: Vec<usize> = ids.into_iter().filter(|_| rng.gen_bool(p)).collect();
    jobs.truncate(params.limit * params.horizon);
    Instance::uniform(g, jobs, params.horizon, params.limit)
}
