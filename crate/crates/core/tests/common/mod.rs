//! Reference computations that share no code with the library: an
//! Edmonds-Karp max flow on an adjacency matrix and a plain enumeration of
//! every job-to-period assignment.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use mfass_core::generators::{gen_random_general, gen_random_sp, RandomGeneralParams, RandomSpParams};
use mfass_core::model::{Capacity, Instance, Schedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Max flow with the arcs in `shut` removed.
pub fn ek_max_flow(instance: &Instance, shut: &[bool]) -> Capacity {
    let net = instance.network();
    let n = net.node_count();
    let mut residual = vec![vec![0 as Capacity; n]; n];
    for arc in net.arcs() {
        if !shut[arc.id] && arc.tail != arc.head {
            residual[arc.tail][arc.head] += arc.capacity;
        }
    }
    let (s, t) = (net.source(), net.sink());
    let mut total = 0;
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if parent[v] == usize::MAX && residual[u][v] > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[t] == usize::MAX {
            return total;
        }
        let mut push = Capacity::MAX;
        let mut v = t;
        while v != s {
            push = push.min(residual[parent[v]][v]);
            v = parent[v];
        }
        let mut v = t;
        while v != s {
            residual[parent[v]][v] -= push;
            residual[v][parent[v]] += push;
            v = parent[v];
        }
        total += push;
    }
}

/// Max flow with the given job arcs shut.
pub fn ek_shut(instance: &Instance, arcs: &[usize]) -> Capacity {
    let mut mask = vec![false; instance.network().arc_count()];
    for &a in arcs {
        mask[a] = true;
    }
    ek_max_flow(instance, &mask)
}

/// Optimum over all `T^|J|` assignments respecting the per-period limits.
pub fn naive_optimum(instance: &Instance) -> Option<Capacity> {
    let jobs = instance.jobs();
    let horizon = instance.horizon();
    let mut memo: HashMap<Vec<usize>, Capacity> = HashMap::new();
    let mut assign = vec![0usize; jobs.len()];
    let mut best = None;
    loop {
        let mut periods = vec![Vec::new(); horizon];
        for (k, &p) in assign.iter().enumerate() {
            periods[p].push(jobs[k]);
        }
        if periods.iter().zip(instance.limits()).all(|(p, &k)| p.len() <= k) {
            let total: Capacity = periods
                .into_iter()
                .map(|p| *memo.entry(p.clone()).or_insert_with(|| ek_shut(instance, &p)))
                .sum();
            best = Some(best.map_or(total, |b: Capacity| b.max(total)));
        }
        // odometer
        let mut k = 0;
        loop {
            if k == assign.len() {
                return best;
            }
            assign[k] += 1;
            if assign[k] < horizon {
                break;
            }
            assign[k] = 0;
            k += 1;
        }
    }
}

/// Throughput of a schedule, scored with the reference max flow.
pub fn ek_score(instance: &Instance, schedule: &Schedule) -> Capacity {
    schedule
        .periods(instance.horizon())
        .iter()
        .map(|p| ek_shut(instance, p))
        .sum()
}

pub fn all_at_once(instance: &Instance) -> Schedule {
    Schedule::from_periods([instance.jobs().to_vec()])
}

/// Random SP instance with every knob drawn from `seed`.
pub fn random_sp(seed: u64, max_arcs: usize, max_horizon: usize, max_limit: usize, max_cap: Capacity) -> Instance {
    let mut r = rng(seed);
    gen_random_sp(&RandomSpParams {
        arc_count: r.gen_range(1..=max_arcs),
        capacities: (1, max_cap),
        job_probability: r.gen_range(0.3..=1.0),
        horizon: r.gen_range(1..=max_horizon),
        limit: r.gen_range(1..=max_limit),
        balanced: false,
        seed: r.gen(),
    })
}

/// Random general-topology instance with a uniform limit.
pub fn random_general(seed: u64, max_arcs: usize, max_horizon: usize, limit: usize, max_cap: Capacity) -> Instance {
    let mut r = rng(seed);
    let node_count = r.gen_range(2..=5);
    gen_random_general(&RandomGeneralParams {
        node_count,
        arc_count: r.gen_range(node_count - 1..=max_arcs.max(node_count - 1)),
        capacities: (1, max_cap),
        job_probability: r.gen_range(0.4..=1.0),
        horizon: r.gen_range(1..=max_horizon),
        limit,
        seed: r.gen(),
    })
}
