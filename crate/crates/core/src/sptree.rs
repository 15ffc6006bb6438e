//! Recognition of two-terminal series-parallel networks and their SP-trees.
//!
//! Recognition works by local reductions on a working copy of the arc set:
//! a bundle of parallel arcs collapses into one arc, and an interior node
//! with exactly one incoming and one outgoing arc collapses its two arcs
//! into one. The network is series-parallel (with respect to its own source
//! and sink) iff this ends in a single source-to-sink arc. The reduction
//! order is fixed (parallel pairs first, lowest slot first; then the
//! lowest-numbered series node), so the tree is deterministic.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{ArcId, Capacity, FlowNetwork, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpNode {
    Leaf(ArcId),
    /// Left child's sink is identified with the right child's source.
    Series(usize, usize),
    /// Sources and sinks of both children are identified.
    Parallel(usize, usize),
}

/// Binary decomposition tree stored as an arena.
///
/// Children always precede their parent, so iterating `nodes()` in order is
/// a valid bottom-up traversal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpTree {
    nodes: Vec<SpNode>,
    root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("network is not two-terminal series-parallel; irreducible remainder {}", fmt_remainder(.remainder))]
pub struct NotSeriesParallel {
    /// `(tail, head)` of each arc left after all reductions.
    pub remainder: Vec<(NodeId, NodeId)>,
}

fn fmt_remainder(arcs: &[(NodeId, NodeId)]) -> String {
    if arcs.is_empty() {
        return "(no arcs)".into();
    }
    arcs.iter()
        .map(|(u, v)| format!("{u}->{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy)]
struct WorkArc {
    tail: NodeId,
    head: NodeId,
    tree_node: usize,
    alive: bool,
}

/// Builds the SP-tree of `network` or returns the irreducible remainder.
pub fn decompose(network: &FlowNetwork) -> Result<SpTree, NotSeriesParallel> {
    let mut nodes: Vec<SpNode> = network.arcs().iter().map(|a| SpNode::Leaf(a.id)).collect();
    let mut work: Vec<WorkArc> = network
        .arcs()
        .iter()
        .map(|a| WorkArc {
            tail: a.tail,
            head: a.head,
            tree_node: a.id,
            alive: true,
        })
        .collect();
    let (s, t) = (network.source(), network.sink());
    let mut alive = work.len();

    while alive > 1 {
        if let Some((keep, drop)) = parallel_pair(&work) {
            nodes.push(SpNode::Parallel(work[keep].tree_node, work[drop].tree_node));
            work[keep].tree_node = nodes.len() - 1;
            work[drop].alive = false;
        } else if let Some((first, second)) = series_pair(&work, network.node_count(), s, t) {
            nodes.push(SpNode::Series(work[first].tree_node, work[second].tree_node));
            let (keep, drop) = (first.min(second), first.max(second));
            let merged = WorkArc {
                tail: work[first].tail,
                head: work[second].head,
                tree_node: nodes.len() - 1,
                alive: true,
            };
            work[keep] = merged;
            work[drop].alive = false;
        } else {
            break;
        }
        alive -= 1;
    }

    let remaining: Vec<&WorkArc> = work.iter().filter(|w| w.alive).collect();
    match remaining.as_slice() {
        [only] if only.tail == s && only.head == t => Ok(SpTree {
            root: only.tree_node,
            nodes,
        }),
        _ => Err(NotSeriesParallel {
            remainder: remaining.iter().map(|w| (w.tail, w.head)).collect(),
        }),
    }
}

fn parallel_pair(work: &[WorkArc]) -> Option<(usize, usize)> {
    let mut seen: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
    for (slot, w) in work.iter().enumerate().filter(|(_, w)| w.alive) {
        if let Some(&first) = seen.get(&(w.tail, w.head)) {
            return Some((first, slot));
        }
        seen.insert((w.tail, w.head), slot);
    }
    None
}

/// `(incoming slot, outgoing slot)` at the lowest-numbered reducible node.
fn series_pair(work: &[WorkArc], node_count: usize, s: NodeId, t: NodeId) -> Option<(usize, usize)> {
    let n = node_count.max(
        work.iter()
            .filter(|w| w.alive)
            .map(|w| w.tail.max(w.head) + 1)
            .max()
            .unwrap_or(0),
    );
    let mut in_deg = vec![0usize; n];
    let mut out_deg = vec![0usize; n];
    let mut in_slot = vec![usize::MAX; n];
    let mut out_slot = vec![usize::MAX; n];
    for (slot, w) in work.iter().enumerate().filter(|(_, w)| w.alive) {
        out_deg[w.tail] += 1;
        out_slot[w.tail] = slot;
        in_deg[w.head] += 1;
        in_slot[w.head] = slot;
    }
    (0..n)
        .filter(|&v| v != s && v != t)
        .find(|&v| in_deg[v] == 1 && out_deg[v] == 1 && in_slot[v] != out_slot[v])
        .map(|v| (in_slot[v], out_slot[v]))
}

impl SpTree {
    pub fn nodes(&self) -> &[SpNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn leaves(&self) -> Vec<ArcId> {
        let mut out = Vec::new();
        self.collect_leaves(self.root, &mut out);
        out
    }

    fn collect_leaves(&self, node: usize, out: &mut Vec<ArcId>) {
        match self.nodes[node] {
            SpNode::Leaf(a) => out.push(a),
            SpNode::Series(l, r) | SpNode::Parallel(l, r) => {
                self.collect_leaves(l, out);
                self.collect_leaves(r, out);
            }
        }
    }

    /// Same tree with the children of every internal node swapped.
    pub fn mirrored(&self) -> SpTree {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                SpNode::Leaf(a) => SpNode::Leaf(a),
                SpNode::Series(l, r) => SpNode::Series(r, l),
                SpNode::Parallel(l, r) => SpNode::Parallel(r, l),
            })
            .collect();
        SpTree {
            nodes,
            root: self.root,
        }
    }

    /// Rebuilds a network by performing the recorded compositions.
    ///
    /// Returns `(node_count, source, sink, arcs)` where `arcs[i]` is
    /// `(arc id, tail, head)` in leaf order. Source is node 0, sink node 1.
    pub fn recompose(&self) -> (usize, NodeId, NodeId, Vec<(ArcId, NodeId, NodeId)>) {
        let mut next_node = 2;
        let mut arcs = Vec::new();
        let mut stack = vec![(self.root, 0usize, 1usize)];
        while let Some((node, s, t)) = stack.pop() {
            match self.nodes[node] {
                SpNode::Leaf(a) => arcs.push((a, s, t)),
                SpNode::Parallel(l, r) => {
                    stack.push((r, s, t));
                    stack.push((l, s, t));
                }
                SpNode::Series(l, r) => {
                    let mid = next_node;
                    next_node += 1;
                    stack.push((r, mid, t));
                    stack.push((l, s, mid));
                }
            }
        }
        (next_node, 0, 1, arcs)
    }

    /// Subnetwork capacity: series takes the minimum, parallel the sum.
    /// `shut[a]` closes arc `a`.
    pub fn capacity(&self, capacities: &[Capacity], shut: &[bool]) -> Capacity {
        self.node_capacity(self.root, capacities, shut)
    }

    /// Capacity of the subnetwork below tree node `at`.
    pub fn node_capacity(&self, at: usize, capacities: &[Capacity], shut: &[bool]) -> Capacity {
        let mut value = vec![0 as Capacity; at + 1];
        for (i, node) in self.nodes[..=at].iter().enumerate() {
            value[i] = match *node {
                SpNode::Leaf(a) => {
                    if shut.get(a).copied().unwrap_or(false) {
                        0
                    } else {
                        capacities[a].max(0)
                    }
                }
                SpNode::Series(l, r) => value[l].min(value[r]),
                SpNode::Parallel(l, r) => value[l] + value[r],
            };
        }
        value[at]
    }
}

/// Max flow of an SP network evaluated on its tree, with `shut` arcs closed.
pub fn sp_capacity(tree: &SpTree, capacities: &[Capacity], shut: &[ArcId]) -> Capacity {
    let mut mask = vec![false; capacities.len()];
    for &a in shut {
        mask[a] = true;
    }
    tree.capacity(capacities, &mask)
}

impl fmt::Display for SpTree {
    /// Nested `S(..)` / `P(..)` text with arc ids at the leaves.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(tree: &SpTree, node: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match tree.nodes[node] {
                SpNode::Leaf(a) => write!(f, "{a}"),
                SpNode::Series(l, r) | SpNode::Parallel(l, r) => {
                    let tag = if matches!(tree.nodes[node], SpNode::Series(..)) { 'S' } else { 'P' };
                    write!(f, "{tag}(")?;
                    go(tree, l, f)?;
                    write!(f, ",")?;
                    go(tree, r, f)?;
                    write!(f, ")")
                }
            }
        }
        go(self, self.root, f)
    }
}
