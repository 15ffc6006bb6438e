//! Capacity scaling for SP networks.
//!
//! Capacities are first clamped to `M`, the best flow any period can reach
//! once the unavoidable `rho` outages of the busiest period are in place.
//! They are then divided by `L = max(1, eps * B / (m T))` and rounded down,
//! and the vector program solves the scaled instance exactly. The schedule
//! is finally scored on the original capacities. All scaling arithmetic is
//! exact rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::flow::max_flow;
use crate::model::{evaluate, Capacity, Instance, Schedule, ThroughputReport};
use crate::spdp::{outage_profile, solve_sp_dp_with, SpDpOptions};
use crate::sptree::decompose;

pub type Rational = Ratio<i128>;

/// Accuracy parameter, an exact rational strictly between 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Epsilon(Rational);

impl Epsilon {
    pub fn new(value: Rational) -> Result<Self> {
        if value <= Rational::from_integer(0) || value >= Rational::from_integer(1) {
            return Err(Error::PreconditionViolated(format!("epsilon {value} must lie strictly between 0 and 1")));
        }
        Ok(Epsilon(value))
    }

    pub fn value(&self) -> Rational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// Accepts decimals (`0.1`, `.25`) and fractions (`1/8`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::PreconditionViolated(format!("cannot read epsilon from {s:?}"));
        let value = if let Some((n, d)) = s.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Rational::new(n, d)
        } else {
            let (int, frac) = s.split_once('.').unwrap_or((s, ""));
            if frac.len() > 30 || (int.is_empty() && frac.is_empty()) {
                return Err(bad());
            }
            let digits = format!("{int}{frac}");
            if !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let n: i128 = digits.parse().map_err(|_| bad())?;
            Rational::new(n, 10i128.pow(frac.len() as u32))
        };
        Epsilon::new(value)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingParams {
    /// Outages the busiest period must take.
    pub rho: usize,
    /// Best flow with `rho` job arcs shut.
    pub max_flow_bound: Capacity,
    /// Largest capacity after clamping to `max_flow_bound`.
    pub largest: Capacity,
    pub scale: Rational,
    pub epsilon: Epsilon,
    pub arc_count: usize,
    pub horizon: usize,
}

impl ScalingParams {
    /// Clamped, divided by the scale and rounded down.
    pub fn scaled_capacity(&self, capacity: Capacity) -> Capacity {
        let clamped = capacity.min(self.max_flow_bound).max(0);
        let q = Rational::from_integer(clamped as i128) / self.scale;
        q.floor().to_integer() as Capacity
    }
}

/// `max(0, |J| - sum K + min K)`: the job count left for one period after
/// every other period is filled to its limit.
pub fn forced_outages(instance: &Instance) -> usize {
    let sum: usize = instance.total_slots();
    let min = instance.limits().iter().copied().min().unwrap_or(0);
    (instance.jobs().len() + min).saturating_sub(sum)
}

/// `L = max(1, eps * B / (m T))`.
pub fn scale_factor(largest: Capacity, arc_count: usize, horizon: usize, epsilon: Epsilon) -> Rational {
    let one = Rational::from_integer(1);
    if arc_count == 0 || horizon == 0 {
        return one;
    }
    let l = epsilon.value() * Rational::from_integer(largest as i128) / Rational::from_integer((arc_count * horizon) as i128);
    l.max(one)
}

pub fn compute_scaling(instance: &Instance, epsilon: Epsilon) -> Result<ScalingParams> {
    instance.check()?;
    let tree = decompose(instance.network())?;
    let rho = forced_outages(instance);
    let caps = instance.network().capacities();
    let bound = if rho == 0 {
        max_flow(instance.network(), &[])
    } else {
        outage_profile(&tree, &caps, &instance.job_mask(), rho)[rho]
            .expect("rho never exceeds the job count")
    };
    let largest = caps.iter().map(|&u| u.min(bound)).max().unwrap_or(0).max(0);
    let arc_count = instance.network().arc_count();
    let horizon = instance.horizon();
    Ok(ScalingParams {
        rho,
        max_flow_bound: bound,
        largest,
        scale: scale_factor(largest, arc_count, horizon, epsilon),
        epsilon,
        arc_count,
        horizon,
    })
}

/// Evidence for the quality of a scaled solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub scale: Rational,
    /// Throughput of the returned schedule under scaled capacities.
    pub scaled_total: Capacity,
    /// Throughput of the returned schedule under original capacities.
    pub total: Capacity,
    pub epsilon: Epsilon,
}

impl Certificate {
    /// `F >= L * F'`, exactly.
    pub fn rounding_bound_holds(&self) -> bool {
        Rational::from_integer(self.total as i128) >= self.scale * Rational::from_integer(self.scaled_total as i128)
    }

    /// `L * F' / (1 - eps)`, an upper bound on the optimum.
    pub fn optimum_upper_bound(&self) -> Rational {
        self.scale * Rational::from_integer(self.scaled_total as i128) / (Rational::from_integer(1) - self.epsilon.value())
    }

    /// Whether `total >= (1 - eps) * optimum`.
    pub fn guarantees(&self, optimum: Capacity) -> bool {
        Rational::from_integer(self.total as i128)
            >= (Rational::from_integer(1) - self.epsilon.value()) * Rational::from_integer(optimum as i128)
    }
}

fn approx(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lf = self.scale * Rational::from_integer(self.scaled_total as i128);
        writeln!(
            f,
            "rounding:     F(y) >= L*F'(y)           {} >= {} * {} = {}",
            self.total,
            self.scale,
            self.scaled_total,
            lf
        )?;
        writeln!(
            f,
            "scaled opt:   L*F'(y) >= (1-eps)*OPT    OPT <= {:.3}",
            approx(self.optimum_upper_bound())
        )?;
        write!(
            f,
            "guarantee:    F(y) >= (1-eps)*OPT       eps = {}, F(y) = {}",
            self.epsilon, self.total
        )
    }
}

#[derive(Debug, Clone)]
pub struct FptasSolution {
    pub schedule: Schedule,
    pub report: ThroughputReport,
    pub params: ScalingParams,
    pub certificate: Certificate,
}

pub fn solve_fptas(instance: &Instance, epsilon: Epsilon) -> Result<FptasSolution> {
    solve_fptas_with(instance, epsilon, &SpDpOptions::default())
}

pub fn solve_fptas_with(instance: &Instance, epsilon: Epsilon, options: &SpDpOptions) -> Result<FptasSolution> {
    let params = compute_scaling(instance, epsilon)?;
    let (schedule, scaled_total) = if params.scale == Rational::from_integer(1) {
        let sol = solve_sp_dp_with(instance, options)?;
        let total = sol.report.total;
        (sol.schedule, total)
    } else {
        let caps: Vec<Capacity> = instance
            .network()
            .capacities()
            .into_iter()
            .map(|u| params.scaled_capacity(u))
            .collect();
        let sol = solve_sp_dp_with(&instance.with_capacities(&caps), options)?;
        (sol.schedule, sol.report.total)
    };
    let report = evaluate(instance, &schedule)?;
    let certificate = Certificate {
        scale: params.scale,
        scaled_total,
        total: report.total,
        epsilon,
    };
    Ok(FptasSolution {
        schedule,
        report,
        params,
        certificate,
    })
}

#[derive(Debug, Clone)]
pub enum PtasBranch {
    /// Every job in the first period.
    AllAtOnce,
    Scaled(Box<Certificate>),
}

#[derive(Debug, Clone)]
pub struct PtasSolution {
    pub schedule: Schedule,
    pub report: ThroughputReport,
    pub branch: PtasBranch,
}

/// For limits that never bind. With `eps * T >= 1` all jobs go down in the
/// first period, losing at most one period in `T`; otherwise scaling.
pub fn solve_ptas_kall(instance: &Instance, epsilon: Epsilon) -> Result<PtasSolution> {
    let jobs = instance.jobs().len();
    if instance.limits().iter().any(|&k| k < jobs) {
        return Err(Error::WrongLimits("every period limit to be at least the number of jobs"));
    }
    instance.check()?;
    if epsilon.value() * Rational::from_integer(instance.horizon() as i128) >= Rational::from_integer(1) {
        let schedule = Schedule::from_periods([instance.jobs().to_vec()]);
        let report = evaluate(instance, &schedule)?;
        return Ok(PtasSolution {
            schedule,
            report,
            branch: PtasBranch::AllAtOnce,
        });
    }
    let sol = solve_fptas(instance, epsilon)?;
    Ok(PtasSolution {
        schedule: sol.schedule,
        report: sol.report,
        branch: PtasBranch::Scaled(Box::new(sol.certificate)),
    })
}
