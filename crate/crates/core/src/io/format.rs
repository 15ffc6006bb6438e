//! Text formats for instances (`.mfass`) and schedules.
//!
//! Instance files are line oriented; `#` starts a comment:
//!
//! ```text
//! nodes 3
//! source 0
//! sink 2
//! horizon 2
//! limit 2            # or: limits 2 1
//! arc 0 0 1 5 1      # arc <id> <tail> <head> <capacity> <job 0|1>
//! ```
//!
//! Schedule files list one period per line, `period <i>: <arc ids>`, with
//! periods numbered from 1.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::model::{ArcId, Capacity, FlowNetwork, Instance, NodeId, Schedule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number; 0 when the problem is not tied to one line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

fn number<T: std::str::FromStr>(line: usize, what: &str, token: Option<&str>) -> Result<T, ParseError> {
    match token {
        None => err(line, format!("missing {what}")),
        Some(t) => t.parse().or_else(|_| err(line, format!("invalid {what} {t:?}"))),
    }
}

fn no_more<'a>(line: usize, mut tokens: impl Iterator<Item = &'a str>) -> Result<(), ParseError> {
    match tokens.next() {
        Some(t) => err(line, format!("unexpected token {t:?}")),
        None => Ok(()),
    }
}

enum Limits {
    Uniform(usize),
    PerPeriod(Vec<usize>),
}

struct ArcLine {
    line: usize,
    tail: NodeId,
    head: NodeId,
    capacity: Capacity,
    job: bool,
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut nodes: Option<(usize, usize)> = None;
    let mut source: Option<(usize, NodeId)> = None;
    let mut sink: Option<(usize, NodeId)> = None;
    let mut horizon: Option<(usize, usize)> = None;
    let mut limits: Option<(usize, Limits)> = None;
    let mut arcs: BTreeMap<ArcId, ArcLine> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let key = tokens.next().unwrap_or_default();
        let once = |seen: bool| if seen { err(line, format!("`{key}` given twice")) } else { Ok(()) };
        match key {
            "nodes" => {
                once(nodes.is_some())?;
                nodes = Some((line, number(line, "node count", tokens.next())?));
            }
            "source" => {
                once(source.is_some())?;
                source = Some((line, number(line, "source node", tokens.next())?));
            }
            "sink" => {
                once(sink.is_some())?;
                sink = Some((line, number(line, "sink node", tokens.next())?));
            }
            "horizon" => {
                once(horizon.is_some())?;
                horizon = Some((line, number(line, "horizon", tokens.next())?));
            }
            "limit" => {
                once(limits.is_some())?;
                limits = Some((line, Limits::Uniform(number(line, "limit", tokens.next())?)));
            }
            "limits" => {
                once(limits.is_some())?;
                let values = tokens
                    .by_ref()
                    .map(|t| t.parse::<usize>().or_else(|_| err(line, format!("invalid limit {t:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if values.is_empty() {
                    return err(line, "`limits` needs at least one value");
                }
                limits = Some((line, Limits::PerPeriod(values)));
            }
            "arc" => {
                let id: ArcId = number(line, "arc id", tokens.next())?;
                let tail = number(line, "tail node", tokens.next())?;
                let head = number(line, "head node", tokens.next())?;
                let capacity: Capacity = number(line, "capacity", tokens.next())?;
                let job = match tokens.next() {
                    Some("0") => false,
                    Some("1") => true,
                    Some(t) => return err(line, format!("job flag must be 0 or 1, got {t:?}")),
                    None => return err(line, "missing job flag"),
                };
                if capacity < 0 {
                    return err(line, format!("negative capacity {capacity}"));
                }
                if let Some(prev) = arcs.get(&id) {
                    return err(line, format!("arc {id} already defined on line {}", prev.line));
                }
                arcs.insert(
                    id,
                    ArcLine {
                        line,
                        tail,
                        head,
                        capacity,
                        job,
                    },
                );
            }
            other => return err(line, format!("unknown keyword {other:?}")),
        }
        no_more(line, tokens)?;
    }

    let Some((nodes_line, n)) = nodes else { return err(0, "missing `nodes` line") };
    let Some((source_line, s)) = source else { return err(0, "missing `source` line") };
    let Some((sink_line, t)) = sink else { return err(0, "missing `sink` line") };
    let Some((horizon_line, horizon)) = horizon else { return err(0, "missing `horizon` line") };
    let Some((limits_line, limits)) = limits else { return err(0, "missing `limit` or `limits` line") };

    if n == 0 {
        return err(nodes_line, "network needs at least one node");
    }
    if s >= n {
        return err(source_line, format!("source {s} out of range for {n} nodes"));
    }
    if t >= n {
        return err(sink_line, format!("sink {t} out of range for {n} nodes"));
    }
    if s == t {
        return err(sink_line, "source and sink coincide");
    }
    if horizon == 0 {
        return err(horizon_line, "horizon must be at least 1");
    }
    let limits = match limits {
        Limits::Uniform(k) => vec![k; horizon],
        Limits::PerPeriod(list) if list.len() == horizon => list,
        Limits::PerPeriod(list) => {
            return err(limits_line, format!("{} limits given for a horizon of {horizon}", list.len()))
        }
    };

    let mut network = FlowNetwork::new(n, s, t);
    let mut jobs = Vec::new();
    for (expected, (&id, arc)) in arcs.iter().enumerate() {
        if id != expected {
            return err(arc.line, format!("arc ids must be 0..m-1 without gaps; arc {expected} is missing"));
        }
        for (end, v) in [("tail", arc.tail), ("head", arc.head)] {
            if v >= n {
                return err(arc.line, format!("{end} {v} out of range for {n} nodes"));
            }
        }
        network.add_arc(arc.tail, arc.head, arc.capacity);
        if arc.job {
            jobs.push(id);
        }
    }
    Ok(Instance::new(network, jobs, limits))
}

pub fn print_instance(instance: &Instance) -> String {
    let net = instance.network();
    let mut out = String::new();
    let _ = writeln!(out, "nodes {}", net.node_count());
    let _ = writeln!(out, "source {}", net.source());
    let _ = writeln!(out, "sink {}", net.sink());
    let _ = writeln!(out, "horizon {}", instance.horizon());
    match instance.uniform_limit() {
        Some(k) => {
            let _ = writeln!(out, "limit {k}");
        }
        None => {
            let list: Vec<String> = instance.limits().iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "limits {}", list.join(" "));
        }
    }
    for arc in net.arcs() {
        let _ = writeln!(
            out,
            "arc {} {} {} {} {}",
            arc.id,
            arc.tail,
            arc.head,
            arc.capacity,
            u8::from(instance.is_job(arc.id))
        );
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule, ParseError> {
    let mut schedule = Schedule::new();
    let mut first_seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut arc_line: BTreeMap<ArcId, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let Some(rest) = body.strip_prefix("period") else {
            return err(line, "expected `period <i>: <arc ids>`");
        };
        let Some((label, ids)) = rest.split_once(':') else {
            return err(line, "missing `:` after the period number");
        };
        let period: usize = number(line, "period number", Some(label.trim()))?;
        if period == 0 {
            return err(line, "periods are numbered from 1");
        }
        if let Some(prev) = first_seen.insert(period, line) {
            return err(line, format!("period {period} already listed on line {prev}"));
        }
        for token in ids.split_whitespace() {
            let arc: ArcId = number(line, "arc id", Some(token))?;
            if let Some(prev) = arc_line.insert(arc, line) {
                return err(line, format!("arc {arc} already scheduled on line {prev}"));
            }
            schedule.assign(arc, period - 1);
        }
    }
    Ok(schedule)
}

/// Every period `1..=horizon` gets a line, idle ones included.
pub fn print_schedule(schedule: &Schedule, horizon: usize) -> String {
    let last = schedule.iter().map(|(_, p)| p + 1).max().unwrap_or(0).max(horizon);
    let mut out = String::new();
    for (i, arcs) in schedule.periods(last).iter().enumerate() {
        let _ = write!(out, "period {}:", i + 1);
        for a in arcs {
            let _ = write!(out, " {a}");
        }
        out.push('\n');
    }
    out
}
