//! Mixed binary program in CPLEX LP format.
//!
//! Variables: `x_<arc>_<period>` for the flow on each arc in each period,
//! `y_<arc>_<period>` (binary, job arcs only) for arc availability. Periods
//! are numbered from 1. The objective is the net flow out of the source.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::flow::FlowEvaluator;
use crate::model::{ArcId, Capacity, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Flow on arc in 0-based period.
    X(ArcId, usize),
    /// Availability of job arc in 0-based period.
    Y(ArcId, usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::X(a, i) => write!(f, "x_{}_{}", a, i + 1),
            Var::Y(a, i) => write!(f, "y_{}_{}", a, i + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `x - u y <= 0` for a job arc.
    JobCapacity,
    /// `x <= u` for a non-job arc.
    Capacity,
    /// `sum_i y = T - 1`.
    Duration,
    /// Flow conservation at an interior node.
    Conservation,
    /// `sum_a y >= |J| - K_i`.
    Limit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub kind: RowKind,
    pub terms: Vec<(i64, Var)>,
    pub sense: Sense,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    pub objective: Vec<(i64, Var)>,
    pub rows: Vec<Row>,
    pub flow_vars: Vec<Var>,
    pub binaries: Vec<Var>,
}

impl LpModel {
    pub fn count(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }
}

pub fn build_lp(instance: &Instance) -> LpModel {
    let net = instance.network();
    let horizon = instance.horizon();
    let jobs = instance.jobs();
    let s = net.source();

    let mut objective = Vec::new();
    for i in 0..horizon {
        for a in net.outgoing(s) {
            objective.push((1, Var::X(a, i)));
        }
        for a in net.incoming(s) {
            objective.push((-1, Var::X(a, i)));
        }
    }

    let mut rows = Vec::new();
    for i in 0..horizon {
        for arc in net.arcs() {
            let (a, u) = (arc.id, arc.capacity);
            if instance.is_job(a) {
                rows.push(Row {
                    name: format!("cap_{}_{}", a, i + 1),
                    kind: RowKind::JobCapacity,
                    terms: vec![(1, Var::X(a, i)), (-u, Var::Y(a, i))],
                    sense: Sense::Le,
                    rhs: 0,
                });
            } else {
                rows.push(Row {
                    name: format!("cap_{}_{}", a, i + 1),
                    kind: RowKind::Capacity,
                    terms: vec![(1, Var::X(a, i))],
                    sense: Sense::Le,
                    rhs: u,
                });
            }
        }
    }
    for &a in jobs {
        rows.push(Row {
            name: format!("dur_{a}"),
            kind: RowKind::Duration,
            terms: (0..horizon).map(|i| (1, Var::Y(a, i))).collect(),
            sense: Sense::Eq,
            rhs: horizon as i64 - 1,
        });
    }
    for i in 0..horizon {
        for v in 0..net.node_count() {
            if v == s || v == net.sink() {
                continue;
            }
            let mut terms: Vec<(i64, Var)> = net.incoming(v).map(|a| (1, Var::X(a, i))).collect();
            terms.extend(net.outgoing(v).map(|a| (-1, Var::X(a, i))));
            if terms.is_empty() {
                continue;
            }
            rows.push(Row {
                name: format!("flow_{}_{}", v, i + 1),
                kind: RowKind::Conservation,
                terms,
                sense: Sense::Eq,
                rhs: 0,
            });
        }
    }
    if !jobs.is_empty() {
        for (i, &k) in instance.limits().iter().enumerate() {
            rows.push(Row {
                name: format!("lim_{}", i + 1),
                kind: RowKind::Limit,
                terms: jobs.iter().map(|&a| (1, Var::Y(a, i))).collect(),
                sense: Sense::Ge,
                rhs: jobs.len() as i64 - k as i64,
            });
        }
    }

    let flow_vars = (0..horizon)
        .flat_map(|i| (0..net.arc_count()).map(move |a| Var::X(a, i)))
        .collect();
    let binaries = jobs
        .iter()
        .flat_map(|&a| (0..horizon).map(move |i| Var::Y(a, i)))
        .collect();
    LpModel {
        objective,
        rows,
        flow_vars,
        binaries,
    }
}

fn write_terms(out: &mut String, terms: &[(i64, Var)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(c, v)) in terms.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0 { "-" } else if k == 0 { "" } else { "+" };
        let mag = c.unsigned_abs();
        let _ = match (k == 0 && c >= 0, mag) {
            (true, 1) => write!(out, " {v}"),
            (true, _) => write!(out, " {mag} {v}"),
            (false, 1) => write!(out, " {sign} {v}"),
            (false, _) => write!(out, " {sign} {mag} {v}"),
        };
    }
}

pub fn write_lp(model: &LpModel) -> String {
    let mut out = String::from("Maximize\n obj:");
    write_terms(&mut out, &model.objective);
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name);
        write_terms(&mut out, &row.terms);
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.flow_vars {
        let _ = writeln!(out, " {v} >= 0");
    }
    if !model.binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in model.binaries.chunks(8) {
            let names: Vec<String> = chunk.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, " {}", names.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

pub fn export_lp(instance: &Instance) -> String {
    write_lp(&build_lp(instance))
}

/// Value of the model for a fixed `y`: `None` if `y` violates a row that
/// involves only `y`, otherwise the best objective over `x`, obtained as a
/// max flow per period with arc bounds read off the capacity rows.
///
/// `y(arc, period)` is consulted only for job arcs.
pub fn evaluate_fixed_y(model: &LpModel, instance: &Instance, y: impl Fn(ArcId, usize) -> bool) -> Option<Capacity> {
    let value = |v: Var| match v {
        Var::Y(a, i) => i64::from(y(a, i)),
        Var::X(..) => unreachable!("only y rows are evaluated directly"),
    };
    let horizon = instance.horizon();
    let m = instance.network().arc_count();
    let mut bound = vec![vec![0 as Capacity; m]; horizon];
    for row in &model.rows {
        match row.kind {
            RowKind::Duration | RowKind::Limit => {
                let lhs: i64 = row.terms.iter().map(|&(c, v)| c * value(v)).sum();
                let ok = match row.sense {
                    Sense::Le => lhs <= row.rhs,
                    Sense::Ge => lhs >= row.rhs,
                    Sense::Eq => lhs == row.rhs,
                };
                if !ok {
                    return None;
                }
            }
            RowKind::Capacity | RowKind::JobCapacity => {
                // x + sum (c * y) <= rhs  =>  x <= rhs - sum (c * y)
                let mut cap = row.rhs;
                let mut target = None;
                for &(c, v) in &row.terms {
                    match v {
                        Var::X(a, i) => target = Some((a, i)),
                        Var::Y(..) => cap -= c * value(v),
                    }
                }
                let (a, i) = target.expect("capacity rows bound one flow variable");
                bound[i][a] = cap;
            }
            RowKind::Conservation => {}
        }
    }
    let mut flows = FlowEvaluator::new(instance.network());
    Some(bound.iter().map(|caps| flows.max_flow_with_capacities(caps)).sum())
}

/// Largest model value over every binary `y` pattern, or `None` if no
/// pattern is feasible. Refuses models with more than `max_binaries` binaries.
pub fn enumerate_y_optimum(model: &LpModel, instance: &Instance, max_binaries: usize) -> Result<Option<Capacity>> {
    let k = model.binaries.len();
    if k > max_binaries || k >= 64 {
        return Err(Error::TooLarge {
            size: 1u128 << k.min(127),
            cap: 1u128 << max_binaries.min(127),
        });
    }
    let index: std::collections::HashMap<Var, usize> = model.binaries.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut best = None;
    for pattern in 0u64..(1u64 << k) {
        let y = |a: ArcId, i: usize| pattern >> index[&Var::Y(a, i)] & 1 == 1;
        if let Some(v) = evaluate_fixed_y(model, instance, y) {
            if best.is_none_or(|b| v > b) {
                best = Some(v);
            }
        }
    }
    Ok(best)
}
