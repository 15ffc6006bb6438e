//! Dynamic programs over the SP-tree.
//!
//! Each tree node keeps the set of job-capacity vectors its subnetwork can
//! realize: entry `i` says how many of the subnetwork's jobs are down in
//! some period and what capacity the subnetwork still has then. Children
//! combine position by position (sum for parallel, min for series) under
//! every alignment of their periods, and combinations breaking a period
//! limit are dropped.
//!
//! Periods with equal limits are interchangeable, so positions are grouped
//! by limit and vectors are kept sorted inside each group (capacity
//! descending, then job count descending). With a uniform limit there is a
//! single group and this is the usual standard form.

mod outages;

use std::collections::HashMap;
use std::fmt;

pub use outages::{max_flow_with_outages, outage_profile};

use crate::error::{Error, Result};
use crate::model::{evaluate, Capacity, Instance, Schedule, ThroughputReport};
use crate::sptree::{decompose, SpNode, SpTree};

pub const DEFAULT_LIST_CAP: usize = 1_000_000;

/// Per-period `(jobs down, remaining capacity)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JobCapacityVector(pub Vec<(usize, Capacity)>);

impl JobCapacityVector {
    pub fn total_capacity(&self) -> Capacity {
        self.0.iter().map(|e| e.1).sum()
    }

    pub fn is_standard(&self) -> bool {
        self.0.windows(2).all(|w| rank(w[0]) <= rank(w[1]))
    }
}

impl fmt::Display for JobCapacityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (j, z)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({j},{z})")?;
        }
        write!(f, ")")
    }
}

fn rank(e: (usize, Capacity)) -> (std::cmp::Reverse<Capacity>, std::cmp::Reverse<usize>) {
    (std::cmp::Reverse(e.1), std::cmp::Reverse(e.0))
}

/// Standard form: capacities non-increasing, ties by job count non-increasing.
pub fn canonicalize(vector: &JobCapacityVector) -> JobCapacityVector {
    let mut entries = vector.0.clone();
    entries.sort_by_key(|&e| rank(e));
    JobCapacityVector(entries)
}

#[derive(Debug, Clone, Copy)]
pub struct SpDpOptions {
    /// Largest list any tree node may hold.
    pub list_cap: usize,
}

impl Default for SpDpOptions {
    fn default() -> Self {
        SpDpOptions {
            list_cap: DEFAULT_LIST_CAP,
        }
    }
}

/// Positions of a vector grouped by period limit.
#[derive(Debug, Clone)]
struct Layout {
    /// `(start, end, limit)` ranges of positions.
    groups: Vec<(usize, usize, usize)>,
    /// Period that position `q` stands for at the root.
    period: Vec<usize>,
    limit: Vec<usize>,
}

impl Layout {
    fn new(limits: &[usize]) -> Self {
        let mut distinct: Vec<usize> = Vec::new();
        for &k in limits {
            if !distinct.contains(&k) {
                distinct.push(k);
            }
        }
        let mut groups = Vec::new();
        let mut period = Vec::new();
        let mut limit = Vec::new();
        for k in distinct {
            let start = period.len();
            for (i, &ki) in limits.iter().enumerate() {
                if ki == k {
                    period.push(i);
                    limit.push(k);
                }
            }
            groups.push((start, period.len(), k));
        }
        Layout { groups, period, limit }
    }

    fn width(&self) -> usize {
        self.period.len()
    }

    /// Sorts each group; returns the new vector and, for every new
    /// position, the position it came from.
    fn canonical(&self, entries: &[(usize, Capacity)]) -> (JobCapacityVector, Vec<usize>) {
        let mut order: Vec<usize> = (0..entries.len()).collect();
        for &(start, end, _) in &self.groups {
            order[start..end].sort_by_key(|&q| rank(entries[q]));
        }
        let sorted = order.iter().map(|&q| entries[q]).collect();
        (JobCapacityVector(sorted), order)
    }

    /// Every distinct rearrangement of `v` that keeps entries inside their group.
    fn alignments(&self, v: &JobCapacityVector) -> Vec<Vec<usize>> {
        let mut per_group: Vec<Vec<Vec<usize>>> = Vec::new();
        for &(start, end, _) in &self.groups {
            let mut found = Vec::new();
            let mut used = vec![false; end - start];
            let mut current = Vec::with_capacity(end - start);
            distinct_permutations(&v.0[start..end], start, &mut used, &mut current, &mut found);
            per_group.push(found);
        }
        let mut out = vec![Vec::with_capacity(self.width())];
        for options in per_group {
            let mut next = Vec::with_capacity(out.len() * options.len());
            for prefix in &out {
                for tail in &options {
                    let mut p = prefix.clone();
                    p.extend_from_slice(tail);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }
}

/// Permutations of `items` (sorted so equal items are adjacent) without repeats.
fn distinct_permutations(
    items: &[(usize, Capacity)],
    offset: usize,
    used: &mut [bool],
    current: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if current.len() == items.len() {
        found.push(current.clone());
        return;
    }
    for i in 0..items.len() {
        if used[i] || (i > 0 && items[i] == items[i - 1] && !used[i - 1]) {
            continue;
        }
        used[i] = true;
        current.push(offset + i);
        distinct_permutations(items, offset, used, current, found);
        current.pop();
        used[i] = false;
    }
}

#[derive(Debug, Clone)]
struct Origin {
    left: usize,
    right: usize,
    /// `(left position, right position)` feeding each position.
    pairs: Vec<(u8, u8)>,
}

#[derive(Debug, Clone)]
struct Entry {
    vector: JobCapacityVector,
    origin: Option<Origin>,
}

/// All vector lists of one instance, bottom-up over its SP-tree.
#[derive(Debug, Clone)]
pub struct DpTables<'a> {
    instance: &'a Instance,
    tree: SpTree,
    layout: Layout,
    lists: Vec<Vec<Entry>>,
}

impl<'a> DpTables<'a> {
    pub fn build(instance: &'a Instance, tree: SpTree, options: &SpDpOptions) -> Result<Self> {
        let layout = Layout::new(instance.limits());
        if layout.width() > u8::MAX as usize {
            return Err(Error::PreconditionViolated("horizon too long for the vector program".into()));
        }
        let mut tables = DpTables {
            instance,
            tree,
            layout,
            lists: Vec::new(),
        };
        for idx in 0..tables.tree.nodes().len() {
            let list = match tables.tree.nodes()[idx] {
                SpNode::Leaf(a) => tables.leaf(a),
                SpNode::Series(l, r) => tables.merge(l, r, true)?,
                SpNode::Parallel(l, r) => tables.merge(l, r, false)?,
            };
            if list.len() > options.list_cap {
                return Err(Error::BudgetExceeded {
                    len: list.len(),
                    cap: options.list_cap,
                });
            }
            tables.lists.push(list);
        }
        Ok(tables)
    }

    fn leaf(&self, arc: usize) -> Vec<Entry> {
        let u = self.instance.network().arc(arc).capacity.max(0);
        let open = vec![(0, u); self.layout.width()];
        if !self.instance.is_job(arc) {
            return vec![Entry {
                vector: JobCapacityVector(open),
                origin: None,
            }];
        }
        self.layout
            .groups
            .iter()
            .filter(|g| g.2 >= 1)
            .map(|&(start, _, _)| {
                let mut entries = open.clone();
                entries[start] = (1, 0);
                Entry {
                    vector: self.layout.canonical(&entries).0,
                    origin: None,
                }
            })
            .collect()
    }

    fn merge(&self, l: usize, r: usize, series: bool) -> Result<Vec<Entry>> {
        let width = self.layout.width();
        let left = &self.lists[l];
        let right = &self.lists[r];
        let mut seen: HashMap<JobCapacityVector, ()> = HashMap::new();
        let mut out = Vec::new();
        let mut combined = vec![(0, 0); width];
        for (ri, re) in right.iter().enumerate() {
            let alignments = self.layout.alignments(&re.vector);
            for (li, le) in left.iter().enumerate() {
                'align: for perm in &alignments {
                    for q in 0..width {
                        let (j1, z1) = le.vector.0[q];
                        let (j2, z2) = re.vector.0[perm[q]];
                        let j = j1 + j2;
                        if j > self.layout.limit[q] {
                            continue 'align;
                        }
                        let z = if series { z1.min(z2) } else { z1.checked_add(z2).ok_or(Error::Overflow)? };
                        combined[q] = (j, z);
                    }
                    let (vector, order) = self.layout.canonical(&combined);
                    if seen.contains_key(&vector) {
                        continue;
                    }
                    seen.insert(vector.clone(), ());
                    let pairs = order.iter().map(|&q| (q as u8, perm[q] as u8)).collect();
                    out.push(Entry {
                        vector,
                        origin: Some(Origin {
                            left: li,
                            right: ri,
                            pairs,
                        }),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn tree(&self) -> &SpTree {
        &self.tree
    }

    /// Vectors kept at tree node `node`, positions in root period order
    /// within each limit group.
    pub fn list(&self, node: usize) -> Vec<JobCapacityVector> {
        self.lists[node].iter().map(|e| e.vector.clone()).collect()
    }

    pub fn root_list(&self) -> Vec<JobCapacityVector> {
        self.list(self.tree.root())
    }

    /// List size at every tree node, in arena order.
    pub fn list_sizes(&self) -> Vec<usize> {
        self.lists.iter().map(Vec::len).collect()
    }

    /// Index of the first root vector with the largest total capacity.
    pub fn best_root(&self) -> Option<usize> {
        let root = &self.lists[self.tree.root()];
        let mut best: Option<(usize, Capacity)> = None;
        for (i, e) in root.iter().enumerate() {
            let total = e.vector.total_capacity();
            if best.is_none_or(|(_, b)| total > b) {
                best = Some((i, total));
            }
        }
        best.map(|b| b.0)
    }

    /// Schedule realizing vector `index` of the root list: position `q`
    /// becomes the `q`-th period of its limit group.
    pub fn reconstruct(&self, index: usize) -> Schedule {
        self.reconstruct_at(self.tree.root(), index, &self.layout.period.clone())
    }

    /// Partial schedule for the jobs below `node` realizing its vector
    /// `index`, with position `q` placed in period `periods[q]`.
    pub fn reconstruct_at(&self, node: usize, index: usize, periods: &[usize]) -> Schedule {
        let mut schedule = Schedule::new();
        let mut stack = vec![(node, index, periods.to_vec())];
        while let Some((node, index, periods)) = stack.pop() {
            let entry = &self.lists[node][index];
            match self.tree.nodes()[node] {
                SpNode::Leaf(a) => {
                    if let Some(q) = entry.vector.0.iter().position(|e| e.0 == 1) {
                        schedule.assign(a, periods[q]);
                    }
                }
                SpNode::Series(l, r) | SpNode::Parallel(l, r) => {
                    let origin = entry.origin.as_ref().expect("merged entries record their origin");
                    let mut lp = vec![0; periods.len()];
                    let mut rp = vec![0; periods.len()];
                    for (q, &(a, b)) in origin.pairs.iter().enumerate() {
                        lp[a as usize] = periods[q];
                        rp[b as usize] = periods[q];
                    }
                    stack.push((r, origin.right, rp));
                    stack.push((l, origin.left, lp));
                }
            }
        }
        schedule
    }
}

#[derive(Debug, Clone)]
pub struct SpDpSolution {
    pub schedule: Schedule,
    pub report: ThroughputReport,
    /// Chosen root vector, or `None` when the single-period shortcut applied.
    pub root_vector: Option<JobCapacityVector>,
    /// List size per tree node (empty for the single-period shortcut).
    pub list_sizes: Vec<usize>,
}

pub fn solve_sp_dp(instance: &Instance) -> Result<SpDpSolution> {
    solve_sp_dp_with(instance, &SpDpOptions::default())
}

pub fn solve_sp_dp_with(instance: &Instance, options: &SpDpOptions) -> Result<SpDpSolution> {
    instance.check()?;
    let tree = decompose(instance.network())?;
    if instance.horizon() == 1 {
        let schedule = Schedule::from_periods([instance.jobs().to_vec()]);
        let report = evaluate(instance, &schedule)?;
        return Ok(SpDpSolution {
            schedule,
            report,
            root_vector: None,
            list_sizes: Vec::new(),
        });
    }
    let tables = DpTables::build(instance, tree, options)?;
    let best = tables
        .best_root()
        .ok_or_else(|| Error::PreconditionViolated("no feasible vector at the root".into()))?;
    let schedule = tables.reconstruct(best);
    let report = evaluate(instance, &schedule)?;
    Ok(SpDpSolution {
        schedule,
        report,
        root_vector: Some(tables.lists[tables.tree.root()][best].vector.clone()),
        list_sizes: tables.list_sizes(),
    })
}
