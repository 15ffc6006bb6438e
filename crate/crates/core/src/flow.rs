//! Exact integral s-t maximum flow (Dinic's blocking-flow algorithm).
//!
//! Shut arcs are handled by masking their capacity to zero when the residual
//! graph is reset, so a single [`FlowEvaluator`] serves any number of
//! outage patterns on the same network.

use std::collections::VecDeque;

use crate::model::{ArcId, Capacity, FlowNetwork, NodeId};

const UNSEEN: usize = usize::MAX;

/// Reusable max-flow engine bound to one network.
#[derive(Debug, Clone)]
pub struct FlowEvaluator<'a> {
    network: &'a FlowNetwork,
    // residual edge 2a is arc a, 2a + 1 its reverse
    head: Vec<NodeId>,
    residual: Vec<Capacity>,
    adjacency: Vec<Vec<usize>>,
    level: Vec<usize>,
    cursor: Vec<usize>,
}

impl<'a> FlowEvaluator<'a> {
    pub fn new(network: &'a FlowNetwork) -> Self {
        let n = network.node_count();
        let mut head = Vec::with_capacity(2 * network.arc_count());
        let mut adjacency = vec![Vec::new(); n];
        for arc in network.arcs() {
            adjacency[arc.tail].push(head.len());
            head.push(arc.head);
            adjacency[arc.head].push(head.len());
            head.push(arc.tail);
        }
        FlowEvaluator {
            network,
            residual: vec![0; head.len()],
            head,
            adjacency,
            level: vec![UNSEEN; n],
            cursor: vec![0; n],
        }
    }

    pub fn network(&self) -> &'a FlowNetwork {
        self.network
    }

    /// Max flow with the listed arcs shut.
    pub fn max_flow(&mut self, shut: &[ArcId]) -> Capacity {
        let mut mask = vec![false; self.network.arc_count()];
        for &a in shut {
            mask[a] = true;
        }
        self.max_flow_masked(&mask)
    }

    /// Max flow where `shut[a]` marks arc `a` as closed.
    pub fn max_flow_masked(&mut self, shut: &[bool]) -> Capacity {
        for (a, arc) in self.network.arcs().iter().enumerate() {
            let open = !shut.get(a).copied().unwrap_or(false);
            self.residual[2 * a] = if open { arc.capacity.max(0) } else { 0 };
            self.residual[2 * a + 1] = 0;
        }
        self.run()
    }

    /// Max flow under an explicit per-arc capacity vector (shut arcs given as 0).
    pub fn max_flow_with_capacities(&mut self, capacities: &[Capacity]) -> Capacity {
        for (a, &c) in capacities.iter().enumerate() {
            self.residual[2 * a] = c.max(0);
            self.residual[2 * a + 1] = 0;
        }
        self.run()
    }

    fn run(&mut self) -> Capacity {
        let (s, t) = (self.network.source(), self.network.sink());
        if s == t {
            return 0;
        }
        let mut total: Capacity = 0;
        while self.build_levels(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.augment(s, t, Capacity::MAX);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    fn build_levels(&mut self, s: NodeId, t: NodeId) -> bool {
        self.level.iter_mut().for_each(|l| *l = UNSEEN);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adjacency[u] {
                let v = self.head[e];
                if self.residual[e] > 0 && self.level[v] == UNSEEN {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] != UNSEEN
    }

    fn augment(&mut self, u: NodeId, t: NodeId, limit: Capacity) -> Capacity {
        if u == t {
            return limit;
        }
        while self.cursor[u] < self.adjacency[u].len() {
            let e = self.adjacency[u][self.cursor[u]];
            let v = self.head[e];
            if self.residual[e] > 0 && self.level[v] == self.level[u] + 1 {
                let pushed = self.augment(v, t, limit.min(self.residual[e]));
                if pushed > 0 {
                    self.residual[e] -= pushed;
                    self.residual[e ^ 1] += pushed;
                    return pushed;
                }
            }
            self.cursor[u] += 1;
        }
        0
    }
}

/// Max s-t flow with every arc in `shut` treated as capacity zero.
pub fn max_flow(network: &FlowNetwork, shut: &[ArcId]) -> Capacity {
    FlowEvaluator::new(network).max_flow(shut)
}
