//! Picks a solver for an instance and runs it.

use std::fmt;
use std::str::FromStr;

use crate::approx::{solve_fptas_with, solve_ptas_kall, Certificate, Epsilon, PtasBranch};
use crate::error::{Error, Result};
use crate::k2::{is_single_node, single_node_schedule, solve_k2};
use crate::model::{Instance, Schedule, ThroughputReport};
use crate::oracle::{search_space_size, solve_bruteforce_with, OracleOptions, DEFAULT_ENUMERATION_CAP};
use crate::spdp::{solve_sp_dp_with, SpDpOptions, DEFAULT_LIST_CAP};
use crate::sptree::decompose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Auto,
    K2,
    SingleNode,
    SpDp,
    Fptas,
    Ptas,
    Bruteforce,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Auto,
        Algorithm::K2,
        Algorithm::SingleNode,
        Algorithm::SpDp,
        Algorithm::Fptas,
        Algorithm::Ptas,
        Algorithm::Bruteforce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::K2 => "k2",
            Algorithm::SingleNode => "single-node",
            Algorithm::SpDp => "spdp",
            Algorithm::Fptas => "fptas",
            Algorithm::Ptas => "ptas",
            Algorithm::Bruteforce => "bruteforce",
        }
    }

    /// Whether the solver is guaranteed to return an optimum.
    pub fn is_exact(self) -> bool {
        !matches!(self, Algorithm::Fptas | Algorithm::Ptas | Algorithm::Auto)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DispatchConfig {
    /// Longest horizon the vector program is tried on.
    pub dp_horizon_max: usize,
    pub oracle_cap: u128,
    pub list_cap: usize,
}

impl Default for DispatchConfig {
    fn default() -> Self {
        DispatchConfig {
            dp_horizon_max: 4,
            oracle_cap: DEFAULT_ENUMERATION_CAP,
            list_cap: DEFAULT_LIST_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solved {
    /// Solver that actually ran.
    pub algorithm: Algorithm,
    pub schedule: Schedule,
    pub report: ThroughputReport,
    pub certificate: Option<Certificate>,
}

/// The automatic policy, most specific solver first.
pub fn choose(instance: &Instance, epsilon: Option<Epsilon>, config: &DispatchConfig) -> Result<Algorithm> {
    instance.check()?;
    if instance.uniform_limit() == Some(2) {
        return Ok(if is_single_node(instance) { Algorithm::SingleNode } else { Algorithm::K2 });
    }
    let sp = decompose(instance.network()).is_ok();
    if sp && instance.horizon() <= config.dp_horizon_max {
        return Ok(if epsilon.is_some() { Algorithm::Fptas } else { Algorithm::SpDp });
    }
    let jobs = instance.jobs().len();
    if sp && epsilon.is_some() && instance.limits().iter().all(|&k| k >= jobs) {
        return Ok(Algorithm::Ptas);
    }
    let size = search_space_size(instance);
    if size <= config.oracle_cap {
        return Ok(Algorithm::Bruteforce);
    }
    let shape = if sp { "series-parallel" } else { "not series-parallel" };
    Err(Error::Unsupported(format!(
        "limits are not uniformly 2, the network is {shape} with horizon {} (vector program limit {}), \
         and exhaustive search would visit {size} assignments (cap {})",
        instance.horizon(),
        config.dp_horizon_max,
        config.oracle_cap
    )))
}

fn need_epsilon(epsilon: Option<Epsilon>, algorithm: Algorithm) -> Result<Epsilon> {
    epsilon.ok_or_else(|| Error::PreconditionViolated(format!("{algorithm} needs an epsilon")))
}

pub fn solve(
    instance: &Instance,
    algorithm: Algorithm,
    epsilon: Option<Epsilon>,
    config: &DispatchConfig,
) -> Result<Solved> {
    let algorithm = match algorithm {
        Algorithm::Auto => choose(instance, epsilon, config)?,
        other => other,
    };
    let dp = SpDpOptions {
        list_cap: config.list_cap,
    };
    let plain = |schedule, report| Solved {
        algorithm,
        schedule,
        report,
        certificate: None,
    };
    Ok(match algorithm {
        Algorithm::Auto => unreachable!("resolved above"),
        Algorithm::K2 => {
            let sol = solve_k2(instance)?;
            plain(sol.schedule, sol.report)
        }
        Algorithm::SingleNode => {
            let sol = single_node_schedule(instance)?;
            plain(sol.schedule, sol.report)
        }
        Algorithm::SpDp => {
            let sol = solve_sp_dp_with(instance, &dp)?;
            plain(sol.schedule, sol.report)
        }
        Algorithm::Fptas => {
            let sol = solve_fptas_with(instance, need_epsilon(epsilon, algorithm)?, &dp)?;
            Solved {
                algorithm,
                schedule: sol.schedule,
                report: sol.report,
                certificate: Some(sol.certificate),
            }
        }
        Algorithm::Ptas => {
            let sol = solve_ptas_kall(instance, need_epsilon(epsilon, algorithm)?)?;
            Solved {
                algorithm,
                schedule: sol.schedule,
                report: sol.report,
                certificate: match sol.branch {
                    PtasBranch::AllAtOnce => None,
                    PtasBranch::Scaled(c) => Some(*c),
                },
            }
        }
        Algorithm::Bruteforce => {
            let sol = solve_bruteforce_with(
                instance,
                &OracleOptions {
                    cap: config.oracle_cap,
                },
            )?;
            plain(sol.schedule, sol.report)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FlowNetwork;

    fn diamond(horizon: usize, limit: usize) -> Instance {
        let mut g = FlowNetwork::new(4, 0, 3);
        for (u, v) in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)] {
            g.add_arc(u, v, 3);
        }
        Instance::uniform(g, 0..5, horizon, limit)
    }

    fn chain(horizon: usize, limit: usize) -> Instance {
        let mut g = FlowNetwork::new(3, 0, 2);
        g.add_arc(0, 1, 3);
        g.add_arc(1, 2, 4);
        g.add_arc(0, 2, 2);
        Instance::uniform(g, 0..3, horizon, limit)
    }

    #[test]
    fn policy_order() {
        let cfg = DispatchConfig::default();
        let eps: Epsilon = "0.2".parse().unwrap();
        assert_eq!(choose(&diamond(3, 2), None, &cfg).unwrap(), Algorithm::K2);
        let mut star = FlowNetwork::new(3, 0, 2);
        star.add_arc(0, 1, 1);
        star.add_arc(1, 2, 1);
        let star = Instance::uniform(star, [0, 1], 1, 2);
        assert_eq!(choose(&star, None, &cfg).unwrap(), Algorithm::SingleNode);
        assert_eq!(choose(&chain(3, 1), None, &cfg).unwrap(), Algorithm::SpDp);
        assert_eq!(choose(&chain(3, 1), Some(eps), &cfg).unwrap(), Algorithm::Fptas);
        assert_eq!(choose(&chain(10, 3), Some(eps), &cfg).unwrap(), Algorithm::Ptas);
        assert_eq!(choose(&chain(10, 3), None, &cfg).unwrap(), Algorithm::Bruteforce);
        assert_eq!(choose(&diamond(3, 3), None, &cfg).unwrap(), Algorithm::Bruteforce);
        let tiny = DispatchConfig {
            oracle_cap: 1,
            ..cfg
        };
        assert!(matches!(choose(&diamond(3, 3), None, &tiny), Err(Error::Unsupported(_))));
        assert!(matches!(choose(&diamond(2, 1), None, &cfg), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn auto_reports_the_solver_used() {
        let cfg = DispatchConfig::default();
        let sol = solve(&diamond(3, 2), Algorithm::Auto, None, &cfg).unwrap();
        assert_eq!(sol.algorithm, Algorithm::K2);
        let brute = solve(&diamond(3, 2), Algorithm::Bruteforce, None, &cfg).unwrap();
        assert_eq!(sol.report.total, brute.report.total);
    }

    #[test]
    fn approximation_needs_epsilon() {
        let cfg = DispatchConfig::default();
        assert!(matches!(
            solve(&chain(3, 1), Algorithm::Fptas, None, &cfg),
            Err(Error::PreconditionViolated(_))
        ));
        let sol = solve(&chain(3, 1), Algorithm::Fptas, Some("0.1".parse().unwrap()), &cfg).unwrap();
        assert!(sol.certificate.is_some());
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("simplex".parse::<Algorithm>().is_err());
    }
}
