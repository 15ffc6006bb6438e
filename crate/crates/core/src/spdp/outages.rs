//! Largest s-t flow of an SP network when exactly `rho` job arcs are down.

use crate::error::Result;
use crate::model::{Capacity, Instance};
use crate::sptree::{decompose, SpNode, SpTree};

/// `profile[j]` is the best subnetwork capacity with exactly `j` jobs shut,
/// for `j = 0..=rho`; `None` when fewer than `j` jobs exist below.
pub fn outage_profile(tree: &SpTree, capacities: &[Capacity], is_job: &[bool], rho: usize) -> Vec<Option<Capacity>> {
    let mut values: Vec<Vec<Option<Capacity>>> = Vec::with_capacity(tree.nodes().len());
    for node in tree.nodes() {
        let z = match *node {
            SpNode::Leaf(a) => {
                let mut z = vec![None; rho + 1];
                z[0] = Some(capacities[a].max(0));
                if rho >= 1 && is_job[a] {
                    z[1] = Some(0);
                }
                z
            }
            SpNode::Series(l, r) => combine(&values[l], &values[r], rho, |x, y| x.min(y)),
            SpNode::Parallel(l, r) => combine(&values[l], &values[r], rho, |x, y| x + y),
        };
        values.push(z);
    }
    values.swap_remove(tree.root())
}

fn combine(
    left: &[Option<Capacity>],
    right: &[Option<Capacity>],
    rho: usize,
    op: impl Fn(Capacity, Capacity) -> Capacity,
) -> Vec<Option<Capacity>> {
    let mut z: Vec<Option<Capacity>> = vec![None; rho + 1];
    for (j, &x) in left.iter().enumerate() {
        let Some(x) = x else { continue };
        for (k, &y) in right.iter().enumerate().take(rho + 1 - j) {
            let Some(y) = y else { continue };
            let v = op(x, y);
            if z[j + k].is_none_or(|cur| v > cur) {
                z[j + k] = Some(v);
            }
        }
    }
    z
}

/// Maximum flow with exactly `rho` job arcs shut, `None` if `rho > |J|`.
pub fn max_flow_with_outages(instance: &Instance, rho: usize) -> Result<Option<Capacity>> {
    let tree = decompose(instance.network())?;
    let caps = instance.network().capacities();
    Ok(outage_profile(&tree, &caps, &instance.job_mask(), rho)[rho])
}
