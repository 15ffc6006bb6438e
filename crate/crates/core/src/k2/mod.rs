//! Exact solver for a uniform limit of two outages per period.
//!
//! Schedules correspond to perfect matchings of an auxiliary graph on the
//! jobs, their twins `a'` and two dummy sets `W`, `W'`. A job matched to
//! another job shares a period with it, a job matched to its twin is alone
//! in its period, and the dummies absorb the twins of paired jobs. The
//! `2p` vertices of `W` force at least `p = |J| - T` pairs, which keeps the
//! number of busy periods within the horizon.

mod matching;
mod single_node;

use std::fmt::Write as _;

pub use matching::{brute_force_perfect_matching, max_weight_perfect_matching, Edge, Matching, Weight};
pub use single_node::{is_single_node, lemma1_check, single_node_schedule, SingleNodeSolution};

use crate::error::{Error, Result};
use crate::flow::FlowEvaluator;
use crate::model::{evaluate, ArcId, Capacity, Instance, Schedule, ThroughputReport};

/// Which role a vertex of the auxiliary graph plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxVertex {
    /// Position of the job in `Instance::jobs`.
    Job(usize),
    Twin(usize),
    Forcing(usize),
    Filler(usize),
}

#[derive(Debug, Clone)]
pub struct AuxGraph {
    pub jobs: Vec<ArcId>,
    pub f0: Capacity,
    /// `f_single[k]`: max flow with job `k` shut.
    pub f_single: Vec<Capacity>,
    /// `f_pair[k][l]`: max flow with jobs `k` and `l` shut (symmetric, diagonal unused).
    pub f_pair: Vec<Vec<Capacity>>,
    /// Minimum number of two-job periods, `max(0, |J| - T)`.
    pub p: usize,
    pub edges: Vec<Edge>,
}

impl AuxGraph {
    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    /// Size of `W`.
    pub fn forcing_count(&self) -> usize {
        2 * self.p
    }

    /// Size of `W'`.
    pub fn filler_count(&self) -> usize {
        2 * (self.jobs.len() / 2 - self.p)
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.jobs.len() + self.forcing_count() + self.filler_count()
    }

    pub fn job_vertex(&self, k: usize) -> usize {
        k
    }

    pub fn twin_vertex(&self, k: usize) -> usize {
        self.jobs.len() + k
    }

    pub fn vertex(&self, v: usize) -> AuxVertex {
        let n = self.jobs.len();
        let w = self.forcing_count();
        if v < n {
            AuxVertex::Job(v)
        } else if v < 2 * n {
            AuxVertex::Twin(v - n)
        } else if v < 2 * n + w {
            AuxVertex::Forcing(v - 2 * n)
        } else {
            AuxVertex::Filler(v - 2 * n - w)
        }
    }

    /// Weight of edge `{u, v}`, or `None` if the graph has no such edge.
    pub fn weight(&self, u: usize, v: usize) -> Option<Weight> {
        use AuxVertex::*;
        match (self.vertex(u), self.vertex(v)) {
            (Job(a), Job(b)) if a != b => Some(self.f_pair[a][b] + self.f0),
            (Job(a), Twin(b)) | (Twin(b), Job(a)) if a == b => Some(self.f_single[a]),
            (Twin(_), Forcing(_) | Filler(_)) | (Forcing(_) | Filler(_), Twin(_)) => Some(0),
            (Filler(x), Filler(y)) if x / 2 == y / 2 && x != y => Some(0),
            _ => None,
        }
    }

    /// Edge-list dump, one `u v weight` line per edge, headed by the vertex count.
    pub fn dump(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertex_count());
        for &(u, v, w) in &self.edges {
            let _ = writeln!(out, "{} {} {}", self.label(u), self.label(v), w);
        }
        out
    }

    fn label(&self, v: usize) -> String {
        match self.vertex(v) {
            AuxVertex::Job(k) => format!("a{}", self.jobs[k]),
            AuxVertex::Twin(k) => format!("a{}'", self.jobs[k]),
            AuxVertex::Forcing(i) => format!("w{i}"),
            AuxVertex::Filler(i) => format!("w{i}'"),
        }
    }
}

fn require_k2(instance: &Instance) -> Result<()> {
    if instance.uniform_limit() != Some(2) {
        return Err(Error::WrongLimits("a uniform limit of 2 outages per period"));
    }
    Ok(())
}

pub fn build_aux_graph(instance: &Instance) -> Result<AuxGraph> {
    require_k2(instance)?;
    instance.check()?;
    let jobs = instance.jobs().to_vec();
    let n = jobs.len();
    let p = n.saturating_sub(instance.horizon());

    let mut flows = FlowEvaluator::new(instance.network());
    let f0 = flows.max_flow(&[]);
    let f_single: Vec<Capacity> = jobs.iter().map(|&a| flows.max_flow(&[a])).collect();
    let mut f_pair = vec![vec![0; n]; n];
    for k in 0..n {
        for l in k + 1..n {
            let f = flows.max_flow(&[jobs[k], jobs[l]]);
            f_pair[k][l] = f;
            f_pair[l][k] = f;
        }
    }

    let mut edges = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            let w = f_pair[k][l].checked_add(f0).ok_or(Error::Overflow)?;
            edges.push((k, l, w));
        }
    }
    for (k, &f) in f_single.iter().enumerate() {
        edges.push((k, n + k, f));
    }
    let dummies = 2 * (n / 2);
    for k in 0..n {
        for d in 0..dummies {
            edges.push((n + k, 2 * n + d, 0));
        }
    }
    let filler_start = 2 * n + 2 * p;
    for d in (filler_start..2 * n + dummies).step_by(2) {
        edges.push((d, d + 1, 0));
    }

    Ok(AuxGraph {
        jobs,
        f0,
        f_single,
        f_pair,
        p,
        edges,
    })
}

/// Sum of the weights of the matched edges.
pub fn matching_weight(aux: &AuxGraph, mate: &[usize]) -> Result<Weight> {
    let mut total: Weight = 0;
    for (u, &v) in mate.iter().enumerate() {
        if u < v {
            let w = aux
                .weight(u, v)
                .ok_or_else(|| Error::PreconditionViolated(format!("{{{u}, {v}}} is not an edge")))?;
            total += w;
        }
    }
    Ok(total)
}

/// Reads the schedule off a perfect matching: job pairs first (ordered by
/// their smaller arc id), then single jobs, then idle periods.
pub fn schedule_from_matching(instance: &Instance, aux: &AuxGraph, mate: &[usize]) -> Result<Schedule> {
    if mate.len() != aux.vertex_count() || (0..mate.len()).any(|v| mate[v] >= mate.len() || mate[mate[v]] != v) {
        return Err(Error::PreconditionViolated("not a perfect matching of the auxiliary graph".into()));
    }
    let mut pairs = Vec::new();
    let mut singles = Vec::new();
    for k in 0..aux.job_count() {
        match aux.vertex(mate[k]) {
            AuxVertex::Job(l) if k < l => pairs.push((aux.jobs[k], aux.jobs[l])),
            AuxVertex::Job(_) => {}
            AuxVertex::Twin(l) if l == k => singles.push(aux.jobs[k]),
            _ => {
                return Err(Error::PreconditionViolated(format!(
                    "job vertex {k} matched along a non-edge"
                )))
            }
        }
    }
    if pairs.len() + singles.len() > instance.horizon() {
        return Err(Error::PreconditionViolated(format!(
            "matching needs {} busy periods but the horizon is {}",
            pairs.len() + singles.len(),
            instance.horizon()
        )));
    }
    pairs.sort_unstable();
    let mut schedule = Schedule::new();
    let mut period = 0;
    for (a, b) in pairs {
        schedule.assign(a, period);
        schedule.assign(b, period);
        period += 1;
    }
    for a in singles {
        schedule.assign(a, period);
        period += 1;
    }
    Ok(schedule)
}

#[derive(Debug, Clone)]
pub struct K2Solution {
    pub schedule: Schedule,
    pub report: ThroughputReport,
    pub aux: AuxGraph,
    pub matching: Matching,
}

pub fn solve_k2(instance: &Instance) -> Result<K2Solution> {
    let aux = build_aux_graph(instance)?;
    let matching = max_weight_perfect_matching(aux.vertex_count(), &aux.edges)?;
    let schedule = schedule_from_matching(instance, &aux, &matching.mate)?;
    let report = evaluate(instance, &schedule)?;
    let idle = (instance.horizon() as i64 - aux.job_count() as i64) * aux.f0;
    assert_eq!(
        report.total,
        matching.weight + idle,
        "schedule throughput must equal matching weight plus idle correction"
    );
    Ok(K2Solution {
        schedule,
        report,
        aux,
        matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FlowNetwork;

    fn parallel(caps: &[Capacity]) -> FlowNetwork {
        let mut g = FlowNetwork::new(2, 0, 1);
        for &c in caps {
            g.add_arc(0, 1, c);
        }
        g
    }

    #[test]
    fn vertex_counts_follow_job_and_horizon_sizes() {
        let inst = Instance::uniform(parallel(&[1; 8]), 0..8, 6, 2);
        let aux = build_aux_graph(&inst).unwrap();
        assert_eq!(aux.p, 2);
        assert_eq!(aux.forcing_count(), 4);
        assert_eq!(aux.filler_count(), 4);
        assert_eq!(aux.vertex_count(), 24);
    }

    #[test]
    fn empty_job_set_gives_empty_graph() {
        let inst = Instance::uniform(parallel(&[3, 4]), [], 3, 2);
        let aux = build_aux_graph(&inst).unwrap();
        assert_eq!(aux.vertex_count(), 0);
        assert!(aux.edges.is_empty());
        let sol = solve_k2(&inst).unwrap();
        assert_eq!(sol.report.total, 21);
    }

    #[test]
    fn two_jobs_one_period_must_pair() {
        let inst = Instance::uniform(parallel(&[3, 4, 5]), [0, 1], 1, 2);
        let aux = build_aux_graph(&inst).unwrap();
        assert_eq!((aux.p, aux.forcing_count(), aux.filler_count()), (1, 2, 0));
        assert_eq!(aux.vertex_count(), 6);
        // a-a' forces b-b' and leaves w0, w1 with no partner
        let mut perfect = Vec::new();
        let edges = &aux.edges;
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                for k in j + 1..edges.len() {
                    let mut seen = [false; 6];
                    let mut ok = true;
                    for &(u, v, _) in [edges[i], edges[j], edges[k]].iter() {
                        ok &= !seen[u] && !seen[v];
                        seen[u] = true;
                        seen[v] = true;
                    }
                    if ok {
                        perfect.push([edges[i], edges[j], edges[k]]);
                    }
                }
            }
        }
        assert!(!perfect.is_empty());
        assert!(perfect.iter().all(|m| m.iter().any(|&(u, v, _)| (u, v) == (0, 1))));
        let sol = solve_k2(&inst).unwrap();
        assert_eq!(sol.schedule.periods(1), vec![vec![0, 1]]);
        assert_eq!(sol.report.total, 5);
    }

    #[test]
    fn rejects_other_limits_and_overfull_horizons() {
        let inst = Instance::uniform(parallel(&[1, 2]), [0, 1], 2, 3);
        assert!(matches!(solve_k2(&inst), Err(Error::WrongLimits(_))));
        let inst = Instance::uniform(parallel(&[1, 2, 3]), [0, 1, 2], 1, 2);
        assert!(matches!(solve_k2(&inst), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn mixed_matching_reads_back_in_order() {
        // jobs a..h = arcs 0..7, T = 6
        let inst = Instance::uniform(parallel(&[1; 8]), 0..8, 6, 2);
        let aux = build_aux_graph(&inst).unwrap();
        let n = 8;
        let mut mate = vec![usize::MAX; aux.vertex_count()];
        let mut link = |u: usize, v: usize| {
            mate[u] = v;
            mate[v] = u;
        };
        // {a,d}, {c,f}, {g,h}, {b,b'}, {e,e'}
        for (x, y) in [(0, 3), (2, 5), (6, 7)] {
            link(x, y);
        }
        link(1, n + 1);
        link(4, n + 4);
        // twins of paired jobs go to W (4) then to the first W' pair
        for (i, k) in [0, 3, 2, 5, 6, 7].into_iter().enumerate() {
            link(n + k, 2 * n + i);
        }
        link(2 * n + 6, 2 * n + 7);
        let schedule = schedule_from_matching(&inst, &aux, &mate).unwrap();
        assert_eq!(
            schedule.periods(6),
            vec![vec![0, 3], vec![2, 5], vec![6, 7], vec![1], vec![4], vec![]]
        );
        let w = matching_weight(&aux, &mate).unwrap();
        let total = evaluate(&inst, &schedule).unwrap().total;
        assert_eq!(total, w + (6 - 8) * aux.f0);
    }

    #[test]
    fn dump_lists_every_edge() {
        let inst = Instance::uniform(parallel(&[2, 3]), [0, 1], 2, 2);
        let aux = build_aux_graph(&inst).unwrap();
        let dump = aux.dump();
        assert!(dump.starts_with("vertices 6\n"));
        assert!(dump.contains("a0 a1 5\n"));
        assert!(dump.contains("a0 a0' 3\n"));
        assert_eq!(dump.lines().count(), 1 + aux.edges.len());
    }
}
