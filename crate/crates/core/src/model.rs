//! Networks, instances, schedules and schedule scoring.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::flow::FlowEvaluator;
use crate::sptree;

pub type NodeId = usize;
pub type ArcId = usize;
/// Flow units per period.
pub type Capacity = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub id: ArcId,
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: Capacity,
}

/// Directed multigraph with a source, a sink and integral capacities.
///
/// Arcs get dense ids in insertion order. Nothing is checked on
/// construction; see [`Instance::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlowNetwork {
    node_count: usize,
    source: NodeId,
    sink: NodeId,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: NodeId, sink: NodeId) -> Self {
        FlowNetwork {
            node_count,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, tail: NodeId, head: NodeId, capacity: Capacity) -> ArcId {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            id,
            tail,
            head,
            capacity,
        });
        id
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn capacities(&self) -> Vec<Capacity> {
        self.arcs.iter().map(|a| a.capacity).collect()
    }

    /// Same topology with capacities replaced.
    pub fn with_capacities(&self, capacities: &[Capacity]) -> FlowNetwork {
        assert_eq!(capacities.len(), self.arcs.len());
        let mut copy = self.clone();
        for (arc, &c) in copy.arcs.iter_mut().zip(capacities) {
            arc.capacity = c;
        }
        copy
    }

    /// Ids of arcs entering `v` (δ⁻).
    pub fn incoming(&self, v: NodeId) -> impl Iterator<Item = ArcId> + '_ {
        self.arcs.iter().filter(move |a| a.head == v).map(|a| a.id)
    }

    /// Ids of arcs leaving `v` (δ⁺).
    pub fn outgoing(&self, v: NodeId) -> impl Iterator<Item = ArcId> + '_ {
        self.arcs.iter().filter(move |a| a.tail == v).map(|a| a.id)
    }
}

/// A network, the job arc set, and per-period outage limits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    network: FlowNetwork,
    jobs: Vec<ArcId>,
    limits: Vec<usize>,
}

impl Instance {
    /// `jobs` is sorted and deduplicated; `limits` has one entry per period.
    pub fn new(network: FlowNetwork, jobs: impl IntoIterator<Item = ArcId>, limits: Vec<usize>) -> Self {
        let mut jobs: Vec<ArcId> = jobs.into_iter().collect();
        jobs.sort_unstable();
        jobs.dedup();
        Instance {
            network,
            jobs,
            limits,
        }
    }

    pub fn uniform(network: FlowNetwork, jobs: impl IntoIterator<Item = ArcId>, horizon: usize, limit: usize) -> Self {
        Self::new(network, jobs, vec![limit; horizon])
    }

    pub fn network(&self) -> &FlowNetwork {
        &self.network
    }

    /// Sorted job arc ids.
    pub fn jobs(&self) -> &[ArcId] {
        &self.jobs
    }

    pub fn horizon(&self) -> usize {
        self.limits.len()
    }

    pub fn limits(&self) -> &[usize] {
        &self.limits
    }

    /// The common limit if every period has the same one.
    pub fn uniform_limit(&self) -> Option<usize> {
        let first = *self.limits.first()?;
        self.limits.iter().all(|&k| k == first).then_some(first)
    }

    pub fn total_slots(&self) -> usize {
        self.limits.iter().sum()
    }

    pub fn is_job(&self, arc: ArcId) -> bool {
        self.jobs.binary_search(&arc).is_ok()
    }

    pub fn job_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.network.arc_count()];
        for &a in &self.jobs {
            if a < mask.len() {
                mask[a] = true;
            }
        }
        mask
    }

    pub fn with_capacities(&self, capacities: &[Capacity]) -> Instance {
        Instance {
            network: self.network.with_capacities(capacities),
            jobs: self.jobs.clone(),
            limits: self.limits.clone(),
        }
    }

    pub fn with_limits(&self, limits: Vec<usize>) -> Instance {
        Instance {
            network: self.network.clone(),
            jobs: self.jobs.clone(),
            limits,
        }
    }

    /// Every structural problem plus infeasibility (`|J| > ΣK_i`).
    pub fn validate(&self) -> std::result::Result<(), Vec<InstanceIssue>> {
        let mut issues = Vec::new();
        let net = &self.network;
        let n = net.node_count;
        if n == 0 {
            issues.push(InstanceIssue::NoNodes);
        }
        if net.source >= n {
            issues.push(InstanceIssue::TerminalOutOfRange { terminal: "source", node: net.source });
        }
        if net.sink >= n {
            issues.push(InstanceIssue::TerminalOutOfRange { terminal: "sink", node: net.sink });
        }
        if net.source == net.sink {
            issues.push(InstanceIssue::SourceIsSink);
        }
        let mut capacity_sum: Capacity = 0;
        for arc in &net.arcs {
            for node in [arc.tail, arc.head] {
                if node >= n {
                    issues.push(InstanceIssue::NodeOutOfRange { arc: arc.id, node });
                }
            }
            if arc.capacity < 0 {
                issues.push(InstanceIssue::NegativeCapacity { arc: arc.id, capacity: arc.capacity });
            } else {
                match capacity_sum.checked_add(arc.capacity) {
                    Some(s) => capacity_sum = s,
                    None => {
                        if !issues.contains(&InstanceIssue::CapacityOverflow) {
                            issues.push(InstanceIssue::CapacityOverflow);
                        }
                    }
                }
            }
        }
        for &a in &self.jobs {
            if a >= net.arcs.len() {
                issues.push(InstanceIssue::UnknownJobArc { arc: a });
            }
        }
        if self.limits.is_empty() {
            issues.push(InstanceIssue::EmptyHorizon);
        }
        if self.jobs.len() > self.total_slots() {
            issues.push(InstanceIssue::TooManyJobs {
                jobs: self.jobs.len(),
                slots: self.total_slots(),
            });
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    /// [`validate`](Self::validate) mapped onto solver errors.
    pub fn check(&self) -> Result<()> {
        self.check_structure()?;
        if self.jobs.len() > self.total_slots() {
            return Err(Error::Infeasible {
                jobs: self.jobs.len(),
                slots: self.total_slots(),
            });
        }
        Ok(())
    }

    /// Structural validity only; infeasible job counts pass.
    pub fn check_structure(&self) -> Result<()> {
        match self.validate() {
            Ok(()) => Ok(()),
            Err(issues) => {
                let structural: Vec<_> = issues
                    .into_iter()
                    .filter(|i| !matches!(i, InstanceIssue::TooManyJobs { .. }))
                    .collect();
                if structural.is_empty() {
                    Ok(())
                } else {
                    Err(Error::InvalidInstance(structural))
                }
            }
        }
    }
}

/// Free-function form of [`Instance::validate`].
pub fn validate_instance(instance: &Instance) -> std::result::Result<(), Vec<InstanceIssue>> {
    instance.validate()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceIssue {
    NoNodes,
    TerminalOutOfRange { terminal: &'static str, node: NodeId },
    SourceIsSink,
    NodeOutOfRange { arc: ArcId, node: NodeId },
    NegativeCapacity { arc: ArcId, capacity: Capacity },
    CapacityOverflow,
    UnknownJobArc { arc: ArcId },
    EmptyHorizon,
    TooManyJobs { jobs: usize, slots: usize },
}

impl fmt::Display for InstanceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceIssue::NoNodes => write!(f, "network has no nodes"),
            InstanceIssue::TerminalOutOfRange { terminal, node } => {
                write!(f, "{terminal} {node} is not a node of the network")
            }
            InstanceIssue::SourceIsSink => write!(f, "source and sink coincide"),
            InstanceIssue::NodeOutOfRange { arc, node } => {
                write!(f, "arc {arc} references missing node {node}")
            }
            InstanceIssue::NegativeCapacity { arc, capacity } => {
                write!(f, "arc {arc} has negative capacity {capacity}")
            }
            InstanceIssue::CapacityOverflow => write!(f, "sum of capacities overflows 64 bits"),
            InstanceIssue::UnknownJobArc { arc } => write!(f, "job arc {arc} does not exist"),
            InstanceIssue::EmptyHorizon => write!(f, "horizon must be at least one period"),
            InstanceIssue::TooManyJobs { jobs, slots } => {
                write!(f, "{jobs} jobs exceed the {slots} outage slots of the horizon")
            }
        }
    }
}

/// Outage period (0-based) of every job arc.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Schedule {
    assignment: BTreeMap<ArcId, usize>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Period `i` of the result shuts the arcs in `periods[i]`.
    pub fn from_periods<I, P>(periods: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: IntoIterator<Item = ArcId>,
    {
        let mut s = Schedule::new();
        for (i, arcs) in periods.into_iter().enumerate() {
            for a in arcs {
                s.assign(a, i);
            }
        }
        s
    }

    /// Returns the previous period of `arc`, if it had one.
    pub fn assign(&mut self, arc: ArcId, period: usize) -> Option<usize> {
        self.assignment.insert(arc, period)
    }

    pub fn period_of(&self, arc: ArcId) -> Option<usize> {
        self.assignment.get(&arc).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ArcId, usize)> + '_ {
        self.assignment.iter().map(|(&a, &p)| (a, p))
    }

    /// Arcs shut in each of `horizon` periods; out-of-range periods are dropped.
    pub fn periods(&self, horizon: usize) -> Vec<Vec<ArcId>> {
        let mut out = vec![Vec::new(); horizon];
        for (&a, &p) in &self.assignment {
            if p < horizon {
                out[p].push(a);
            }
        }
        out
    }

    /// Availability indicators: `y[k][i]` is false iff job `jobs[k]` is out in period `i`.
    pub fn availability(&self, instance: &Instance) -> Vec<Vec<bool>> {
        instance
            .jobs()
            .iter()
            .map(|&a| {
                (0..instance.horizon())
                    .map(|i| self.period_of(a) != Some(i))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    /// A scheduled arc is not in the job set.
    NotAJob { arc: ArcId },
    /// A job arc is never shut (job-duration constraint).
    MissingJob { arc: ArcId },
    PeriodOutOfRange { arc: ArcId, period: usize, horizon: usize },
    /// More outages than the period allows (period-limit constraint).
    LimitExceeded { period: usize, scheduled: usize, limit: usize },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // periods are reported 1-based, as in schedule files
        match self {
            ScheduleViolation::NotAJob { arc } => {
                write!(f, "arc {arc} is scheduled but has no maintenance job")
            }
            ScheduleViolation::MissingJob { arc } => write!(
                f,
                "job-duration constraint violated: job arc {arc} is never shut down"
            ),
            ScheduleViolation::PeriodOutOfRange { arc, period, horizon } => write!(
                f,
                "arc {arc} is scheduled in period {} outside the horizon 1..={horizon}",
                period + 1
            ),
            ScheduleViolation::LimitExceeded { period, scheduled, limit } => write!(
                f,
                "period-limit constraint violated: period {} shuts {scheduled} arcs, limit {limit}",
                period + 1
            ),
        }
    }
}

pub fn validate_schedule(instance: &Instance, schedule: &Schedule) -> std::result::Result<(), Vec<ScheduleViolation>> {
    let horizon = instance.horizon();
    let mut violations = Vec::new();
    let mut load = vec![0usize; horizon];
    for (arc, period) in schedule.iter() {
        if !instance.is_job(arc) {
            violations.push(ScheduleViolation::NotAJob { arc });
        }
        if period >= horizon {
            violations.push(ScheduleViolation::PeriodOutOfRange { arc, period, horizon });
        } else {
            load[period] += 1;
        }
    }
    for &arc in instance.jobs() {
        if schedule.period_of(arc).is_none() {
            violations.push(ScheduleViolation::MissingJob { arc });
        }
    }
    for (period, (&scheduled, &limit)) in load.iter().zip(instance.limits()).enumerate() {
        if scheduled > limit {
            violations.push(ScheduleViolation::LimitExceeded { period, scheduled, limit });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThroughputReport {
    pub per_period_flow: Vec<Capacity>,
    pub total: Capacity,
}

impl ThroughputReport {
    pub fn from_periods(per_period_flow: Vec<Capacity>) -> Result<Self> {
        let total = per_period_flow
            .iter()
            .try_fold(0 as Capacity, |acc, &f| acc.checked_add(f))
            .ok_or(Error::Overflow)?;
        Ok(ThroughputReport {
            per_period_flow,
            total,
        })
    }
}

impl fmt::Display for ThroughputReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, flow) in self.per_period_flow.iter().enumerate() {
            writeln!(f, "period {}: flow {flow}", i + 1)?;
        }
        write!(f, "total {}", self.total)
    }
}

/// Scores a schedule: one max-flow per period with that period's jobs shut.
pub fn evaluate(instance: &Instance, schedule: &Schedule) -> Result<ThroughputReport> {
    instance.check_structure()?;
    validate_schedule(instance, schedule).map_err(Error::InfeasibleSchedule)?;
    let mut flows = FlowEvaluator::new(instance.network());
    let per_period = schedule
        .periods(instance.horizon())
        .iter()
        .map(|shut| flows.max_flow(shut))
        .collect();
    ThroughputReport::from_periods(per_period)
}

/// Membership flags for the instance classes of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InstanceClassTags {
    pub is_series_parallel: bool,
    pub is_balanced: bool,
    pub is_unit_capacity: bool,
    pub all_arcs_jobbed: bool,
}

pub fn classify(instance: &Instance) -> InstanceClassTags {
    let net = instance.network();
    InstanceClassTags {
        is_series_parallel: net.arc_count() > 0 && sptree::decompose(net).is_ok(),
        is_balanced: is_balanced(net),
        is_unit_capacity: net.arcs().iter().all(|a| a.capacity == 1),
        all_arcs_jobbed: instance.jobs().len() == net.arc_count(),
    }
}

/// In-capacity equals out-capacity at every transshipment node.
pub fn is_balanced(network: &FlowNetwork) -> bool {
    let mut excess = vec![0i128; network.node_count()];
    for arc in network.arcs() {
        if arc.tail < excess.len() {
            excess[arc.tail] -= arc.capacity as i128;
        }
        if arc.head < excess.len() {
            excess[arc.head] += arc.capacity as i128;
        }
    }
    excess
        .iter()
        .enumerate()
        .all(|(v, &e)| v == network.source() || v == network.sink() || e == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_network() -> FlowNetwork {
        // s=0 -> 1 -> t=2 with a parallel pair on the first leg
        let mut g = FlowNetwork::new(3, 0, 2);
        g.add_arc(0, 1, 3);
        g.add_arc(0, 1, 4);
        g.add_arc(1, 2, 7);
        g
    }

    #[test]
    fn idle_horizon_total() {
        let inst = Instance::uniform(path_network(), [], 3, 2);
        let report = evaluate(&inst, &Schedule::new()).unwrap();
        assert_eq!(report.per_period_flow, vec![7, 7, 7]);
        assert_eq!(report.total, 21);
    }

    #[test]
    fn evaluate_sums_period_flows() {
        let inst = Instance::uniform(path_network(), [0, 1, 2], 3, 2);
        let s = Schedule::from_periods([vec![0], vec![1], vec![2]]);
        let r = evaluate(&inst, &s).unwrap();
        assert_eq!(r.per_period_flow, vec![4, 3, 0]);
        assert_eq!(r.total, 7);
    }

    #[test]
    fn validate_instance_cases() {
        let g = path_network();
        let five = {
            let mut g = g.clone();
            g.add_arc(0, 2, 1);
            g.add_arc(0, 2, 1);
            g
        };
        let bad = Instance::new(five.clone(), 0..5, vec![2, 2]);
        assert_eq!(
            bad.validate(),
            Err(vec![InstanceIssue::TooManyJobs { jobs: 5, slots: 4 }])
        );
        assert!(matches!(bad.check(), Err(Error::Infeasible { jobs: 5, slots: 4 })));
        assert!(Instance::new(five, 0..4, vec![2, 2]).validate().is_ok());
        for t in 1..4 {
            assert!(Instance::uniform(g.clone(), [], t, 0).validate().is_ok());
        }
    }

    #[test]
    fn validate_reports_malformed_arcs() {
        let mut g = FlowNetwork::new(2, 0, 0);
        g.add_arc(0, 5, -1);
        let inst = Instance::uniform(g, [3], 1, 1);
        let issues = inst.validate().unwrap_err();
        assert!(issues.contains(&InstanceIssue::SourceIsSink));
        assert!(issues.contains(&InstanceIssue::NodeOutOfRange { arc: 0, node: 5 }));
        assert!(issues.contains(&InstanceIssue::NegativeCapacity { arc: 0, capacity: -1 }));
        assert!(issues.contains(&InstanceIssue::UnknownJobArc { arc: 3 }));
        assert!(matches!(inst.check(), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn schedule_violations_are_reported() {
        let inst = Instance::uniform(path_network(), [0, 1, 2], 2, 1);
        let s = Schedule::from_periods([vec![0, 1], vec![], vec![5]]);
        let v = validate_schedule(&inst, &s).unwrap_err();
        assert!(v.contains(&ScheduleViolation::MissingJob { arc: 2 }));
        assert!(v.contains(&ScheduleViolation::LimitExceeded { period: 0, scheduled: 2, limit: 1 }));
        assert!(v.contains(&ScheduleViolation::NotAJob { arc: 5 }));
        assert!(v.contains(&ScheduleViolation::PeriodOutOfRange { arc: 5, period: 2, horizon: 2 }));
        assert!(matches!(evaluate(&inst, &s), Err(Error::InfeasibleSchedule(_))));
        let msg = ScheduleViolation::LimitExceeded { period: 0, scheduled: 2, limit: 1 }.to_string();
        assert!(msg.contains("period-limit"));
        assert!(ScheduleViolation::MissingJob { arc: 2 }.to_string().contains("job-duration"));
    }

    #[test]
    fn classify_single_arc() {
        let mut g = FlowNetwork::new(2, 0, 1);
        g.add_arc(0, 1, 1);
        let tags = classify(&Instance::uniform(g, [0], 1, 1));
        assert_eq!(
            tags,
            InstanceClassTags {
                is_series_parallel: true,
                is_balanced: true,
                is_unit_capacity: true,
                all_arcs_jobbed: true,
            }
        );
    }

    #[test]
    fn balance_detects_surplus() {
        let g = path_network();
        assert!(is_balanced(&g));
        let g2 = g.with_capacities(&[3, 4, 6]);
        assert!(!is_balanced(&g2));
    }

    #[test]
    fn availability_matrix_marks_outages() {
        let inst = Instance::uniform(path_network(), [0, 2], 2, 2);
        let s = Schedule::from_periods([vec![2], vec![0]]);
        assert_eq!(s.availability(&inst), vec![vec![true, false], vec![false, true]]);
    }
}
