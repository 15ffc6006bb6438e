//! Exhaustive solver for desk-scale instances.
//!
//! Every feasible assignment of jobs to periods is enumerated in
//! lexicographic order (jobs by arc id, periods ascending), keeping the
//! first assignment of maximum throughput. With a uniform limit, periods
//! are interchangeable, so only restricted-growth assignments are visited
//! (a job may open at most one new period); this keeps exactly the
//! lexicographically smallest member of each period-relabeling class.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::flow::FlowEvaluator;
use crate::model::{evaluate, Capacity, Instance, Schedule, ThroughputReport};

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Largest search space (in assignments) the oracle will accept.
    pub cap: u128,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub schedule: Schedule,
    pub report: ThroughputReport,
    /// Number of assignments visited.
    pub explored: u128,
}

pub fn solve_bruteforce(instance: &Instance) -> Result<OracleSolution> {
    solve_bruteforce_with(instance, &OracleOptions::default())
}

pub fn solve_bruteforce_with(instance: &Instance, options: &OracleOptions) -> Result<OracleSolution> {
    instance.check()?;
    let size = search_space_size(instance);
    if size > options.cap || instance.jobs().len() > 128 {
        return Err(Error::TooLarge {
            size,
            cap: options.cap,
        });
    }

    let mut search = Search {
        instance,
        symmetric: instance.uniform_limit().is_some(),
        flows: FlowEvaluator::new(instance.network()),
        memo: HashMap::new(),
        arc_mask: vec![false; instance.network().arc_count()],
        assignment: vec![0; instance.jobs().len()],
        period_masks: vec![0; instance.horizon()],
        load: vec![0; instance.horizon()],
        best: None,
        explored: 0,
    };
    search.descend(0, 0);

    let (_, best) = search.best.expect("a feasible instance has at least one assignment");
    let mut schedule = Schedule::new();
    for (k, &arc) in instance.jobs().iter().enumerate() {
        schedule.assign(arc, best[k]);
    }
    let report = evaluate(instance, &schedule)?;
    Ok(OracleSolution {
        schedule,
        report,
        explored: search.explored,
    })
}

struct Search<'a> {
    instance: &'a Instance,
    symmetric: bool,
    flows: FlowEvaluator<'a>,
    memo: HashMap<u128, Capacity>,
    arc_mask: Vec<bool>,
    assignment: Vec<usize>,
    period_masks: Vec<u128>,
    load: Vec<usize>,
    best: Option<(Capacity, Vec<usize>)>,
    explored: u128,
}

impl Search<'_> {
    fn descend(&mut self, job: usize, used: usize) {
        if job == self.assignment.len() {
            self.explored += 1;
            let total = self.score();
            if self.best.as_ref().is_none_or(|(b, _)| total > *b) {
                self.best = Some((total, self.assignment.clone()));
            }
            return;
        }
        let horizon = self.instance.horizon();
        let last = if self.symmetric { (used + 1).min(horizon) } else { horizon };
        for p in 0..last {
            if self.load[p] >= self.instance.limits()[p] {
                continue;
            }
            self.assignment[job] = p;
            self.load[p] += 1;
            self.period_masks[p] |= 1 << job;
            self.descend(job + 1, used.max(p + 1));
            self.period_masks[p] &= !(1 << job);
            self.load[p] -= 1;
        }
    }

    fn score(&mut self) -> Capacity {
        let mut total: Capacity = 0;
        for p in 0..self.period_masks.len() {
            total += self.flow_for(self.period_masks[p]);
        }
        total
    }

    fn flow_for(&mut self, mask: u128) -> Capacity {
        if let Some(&f) = self.memo.get(&mask) {
            return f;
        }
        self.arc_mask.iter_mut().for_each(|m| *m = false);
        for (k, &arc) in self.instance.jobs().iter().enumerate() {
            if mask >> k & 1 == 1 {
                self.arc_mask[arc] = true;
            }
        }
        let f = self.flows.max_flow_masked(&self.arc_mask);
        self.memo.insert(mask, f);
        f
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Ordered assignments of `jobs` labeled jobs to periods with per-period limits.
pub fn count_feasible_assignments(jobs: usize, limits: &[usize]) -> u128 {
    // ways[r] = ways to place r remaining jobs into the periods not yet processed
    let mut ways = vec![0u128; jobs + 1];
    ways[0] = 1;
    for &k in limits.iter().rev() {
        let mut next = vec![0u128; jobs + 1];
        for (r, slot) in next.iter_mut().enumerate() {
            for c in 0..=k.min(r) {
                *slot = slot.saturating_add(binomial(r, c).saturating_mul(ways[r - c]));
            }
        }
        ways = next;
    }
    ways[jobs]
}

/// Set partitions of `jobs` items into at most `blocks` blocks of size at most `limit`.
pub fn count_canonical_assignments(jobs: usize, blocks: usize, limit: usize) -> u128 {
    // p[n][b]: partitions of n items into exactly b blocks
    let mut p = vec![vec![0u128; blocks + 1]; jobs + 1];
    p[0][0] = 1;
    for n in 1..=jobs {
        for b in 1..=blocks {
            let mut acc = 0u128;
            for size in 1..=limit.min(n) {
                acc = acc.saturating_add(binomial(n - 1, size - 1).saturating_mul(p[n - size][b - 1]));
            }
            p[n][b] = acc;
        }
    }
    p[jobs].iter().fold(0u128, |a, &x| a.saturating_add(x))
}

/// Assignments the oracle would visit for this instance.
pub fn search_space_size(instance: &Instance) -> u128 {
    let n = instance.jobs().len();
    match instance.uniform_limit() {
        Some(k) => count_canonical_assignments(n, instance.horizon(), k),
        None => count_feasible_assignments(n, instance.limits()),
    }
}
