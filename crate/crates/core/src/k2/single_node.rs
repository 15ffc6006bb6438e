//! Closed-form schedule for networks with one transshipment node.
//!
//! Jobs on the side with fewer jobs (`a_1..a_r`) pair with the strongest
//! jobs of the other side (`b_1..b_s`), the next `b_i` run alone while
//! periods remain, and the weakest `b_i` are paired strongest-with-weakest
//! in the final periods. Apart from sorting both sides the work is linear.

use std::cell::Cell;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{evaluate, ArcId, Instance, Schedule, ThroughputReport};

#[derive(Debug, Clone)]
pub struct SingleNodeSolution {
    pub schedule: Schedule,
    pub report: ThroughputReport,
    /// Capacity comparisons made while sorting.
    pub comparisons: usize,
    /// Job placements made after sorting.
    pub placements: usize,
}

/// Splits the jobs into those entering and leaving the single transshipment node.
fn sides(instance: &Instance) -> Result<(Vec<ArcId>, Vec<ArcId>)> {
    let net = instance.network();
    let (s, t) = (net.source(), net.sink());
    let mut hub = None;
    for arc in net.arcs() {
        let v = if arc.tail == s && arc.head != t && arc.head != s {
            arc.head
        } else if arc.head == t && arc.tail != s && arc.tail != t {
            arc.tail
        } else {
            return Err(Error::WrongTopology(format!(
                "arc {} ({} -> {}) is not of the form s -> v or v -> t",
                arc.id, arc.tail, arc.head
            )));
        };
        match hub {
            None => hub = Some(v),
            Some(h) if h != v => {
                return Err(Error::WrongTopology(format!(
                    "nodes {h} and {v} are both transshipment nodes"
                )))
            }
            _ => {}
        }
    }
    let (mut into, mut out) = (Vec::new(), Vec::new());
    for &a in instance.jobs() {
        if net.arc(a).tail == s {
            into.push(a);
        } else {
            out.push(a);
        }
    }
    Ok((into, out))
}

/// Whether every arc runs `s -> v` or `v -> t` for one node `v`.
pub fn is_single_node(instance: &Instance) -> bool {
    sides(instance).is_ok()
}

pub fn single_node_schedule(instance: &Instance) -> Result<SingleNodeSolution> {
    if instance.uniform_limit() != Some(2) {
        return Err(Error::WrongLimits("a uniform limit of 2 outages per period"));
    }
    instance.check_structure()?;
    let (into, out) = sides(instance)?;
    let (mut a, mut b) = if into.len() <= out.len() { (into, out) } else { (out, into) };
    let (r, s, horizon) = (a.len(), b.len(), instance.horizon());
    if r + s > 2 * horizon {
        return Err(Error::Infeasible {
            jobs: r + s,
            slots: 2 * horizon,
        });
    }

    let comparisons = Cell::new(0usize);
    let net = instance.network();
    let by_capacity = |x: &ArcId, y: &ArcId| -> Ordering {
        comparisons.set(comparisons.get() + 1);
        net.arc(*y).capacity.cmp(&net.arc(*x).capacity).then(x.cmp(y))
    };
    a.sort_by(by_capacity);
    b.sort_by(by_capacity);

    // 1-based indices below mirror the usual a_i, b_i numbering
    let mut schedule = Schedule::new();
    let mut placements = 0;
    let mut place = |arc: ArcId, period: usize| {
        schedule.assign(arc, period - 1);
        placements += 1;
    };
    for i in 1..=r {
        place(a[i - 1], i);
        place(b[i - 1], i);
    }
    for i in r + 1..=horizon.min(2 * horizon - s) {
        if i <= s {
            place(b[i - 1], i);
        }
    }
    if s > horizon {
        for i in 2 * horizon - s + 1..=horizon {
            place(b[i - 1], i);
            place(b[2 * horizon - i], i);
        }
    }

    let report = evaluate(instance, &schedule)?;
    Ok(SingleNodeSolution {
        schedule,
        report,
        comparisons: comparisons.get(),
        placements,
    })
}

/// Checks `min(x3, x6) + min(x4, x5) >= min(x1, x6) + min(x2, x5)` for
/// inputs with `x3, x4` in `[x1, x2]`, `x3 + x4 = x1 + x2` and `x5 <= x6`.
pub fn lemma1_check(x: [f64; 6]) -> Result<bool> {
    let [x1, x2, x3, x4, x5, x6] = x;
    let tol = 1e-9 * (1.0 + x1.abs() + x2.abs());
    let inside = |v: f64| v >= x1 - tol && v <= x2 + tol;
    if !(inside(x3) && inside(x4)) || (x3 + x4 - x1 - x2).abs() > tol || x5 > x6 {
        return Err(Error::PreconditionViolated(format!("{x:?} outside the lemma's domain")));
    }
    let lhs = x3.min(x6) + x4.min(x5);
    let rhs = x1.min(x6) + x2.min(x5);
    Ok(lhs >= rhs - tol)
}
