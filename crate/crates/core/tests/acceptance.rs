//! One PASS/FAIL line per acceptance criterion. Every comparison is exact
//! integer (or exact rational) equality unless a tolerance is stated.
//!
//! Run with `cargo test -p mfass-core --test acceptance -- --nocapture`.

mod common;

use std::time::{Duration, Instant};

use common::*;
use mfass_core::approx::{solve_fptas, solve_ptas_kall, Epsilon, PtasBranch, Rational};
use mfass_core::generators::{
    gen_3partition, gen_partition, gen_random_general, gen_random_single_node, gen_random_sp, gen_unitcap, Decision,
    Generated, RandomGeneralParams, RandomSpParams,
};
use mfass_core::io::{build_lp, enumerate_y_optimum, parse_instance, print_instance, RowKind};
use mfass_core::k2::{build_aux_graph, lemma1_check, matching_weight, schedule_from_matching, single_node_schedule, solve_k2};
use mfass_core::model::{classify, evaluate, is_balanced, Capacity, Instance};
use mfass_core::oracle::solve_bruteforce;
use mfass_core::spdp::{max_flow_with_outages, solve_sp_dp};
use rand::seq::SliceRandom;
use rand::Rng;

/// Wall-clock budget for criterion 1.
const K2_BUDGET: Duration = Duration::from_secs(60);
/// Relative tolerance of the floating-point lemma check.
const LEMMA_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle(inst: &Instance) -> Capacity {
    solve_bruteforce(inst).expect("desk-scale instance").report.total
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut max_jobs = 0;
    for seed in 0..200 {
        let inst = random_general(1_000 + seed, 8, 5, 2, 20);
        max_jobs = max_jobs.max(inst.jobs().len());
        let got = solve_k2(&inst).map_err(|e| format!("seed {seed}: {e}"))?.report.total;
        let want = oracle(&inst);
        ensure(got == want, || format!("seed {seed}: k2 {got} != oracle {want}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < K2_BUDGET, || format!("took {elapsed:?}, budget {K2_BUDGET:?}"))?;
    Ok(format!("200/200 equal, |J| <= {max_jobs}, {:.2?}", elapsed))
}

/// A uniformly shaped random perfect matching of the auxiliary graph:
/// `q >= p` job pairs, the other jobs on their twins, the twins of paired
/// jobs on all of `W` plus `q - p` whole filler pairs, the remaining filler
/// pairs matched inside.
fn random_perfect_matching(n: usize, p: usize, r: &mut impl Rng) -> Vec<usize> {
    let w_start = 2 * n;
    let f_start = w_start + 2 * p;
    let filler_pairs = n / 2 - p;
    let total = f_start + 2 * filler_pairs;
    let mut mate = vec![usize::MAX; total];
    let link = |mate: &mut Vec<usize>, u: usize, v: usize| {
        mate[u] = v;
        mate[v] = u;
    };

    let q = r.gen_range(p..=n / 2);
    let mut jobs: Vec<usize> = (0..n).collect();
    jobs.shuffle(r);
    let mut absorbed_twins = Vec::new();
    for pair in jobs[..2 * q].chunks(2) {
        link(&mut mate, pair[0], pair[1]);
        absorbed_twins.extend([n + pair[0], n + pair[1]]);
    }
    for &k in &jobs[2 * q..] {
        link(&mut mate, k, n + k);
    }
    let mut pairs: Vec<usize> = (0..filler_pairs).collect();
    pairs.shuffle(r);
    let mut dummies: Vec<usize> = (w_start..f_start).collect();
    for &i in &pairs[..q - p] {
        dummies.extend([f_start + 2 * i, f_start + 2 * i + 1]);
    }
    for &i in &pairs[q - p..] {
        link(&mut mate, f_start + 2 * i, f_start + 2 * i + 1);
    }
    dummies.shuffle(r);
    for (&t, &d) in absorbed_twins.iter().zip(&dummies) {
        link(&mut mate, t, d);
    }
    mate
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut instances = 0;
    let mut samples = 0;
    let mut seed = 2_000;
    while instances < 20 {
        seed += 1;
        let inst = random_general(seed, 8, 5, 2, 20);
        let n = inst.jobs().len();
        if n < 3 {
            continue;
        }
        instances += 1;
        let aux = build_aux_graph(&inst).map_err(|e| e.to_string())?;
        let f0 = ek_shut(&inst, &[]);
        for _ in 0..60 {
            let mate = random_perfect_matching(n, aux.p, &mut r);
            ensure(mate.len() == aux.vertex_count(), || "sampler size mismatch".into())?;
            // weight from reference flows
            let mut omega: Capacity = 0;
            for k in 0..n {
                let (a, m) = (inst.jobs()[k], mate[k]);
                if m < n && k < m {
                    omega += ek_shut(&inst, &[a, inst.jobs()[m]]) + f0;
                } else if m == n + k {
                    omega += ek_shut(&inst, &[a]);
                }
            }
            let listed = matching_weight(&aux, &mate).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure(listed == omega, || format!("seed {seed}: graph weight {listed} != {omega}"))?;
            let schedule = schedule_from_matching(&inst, &aux, &mate).map_err(|e| e.to_string())?;
            let total = evaluate(&inst, &schedule).map_err(|e| e.to_string())?.total;
            let expect = omega + (inst.horizon() as Capacity - n as Capacity) * f0;
            ensure(total == expect, || format!("seed {seed}: total {total} != {expect}"))?;
            samples += 1;
        }
    }
    Ok(format!("{samples} matchings over {instances} instances satisfy the identity"))
}

fn ceil_log2(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Comparison budget of one sort of `k` items.
fn sort_budget(k: usize) -> usize {
    2 * k * ceil_log2(k) + k
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    for seed in 0..200u64 {
        let horizon = r.gen_range(1..=5);
        let inst = gen_random_single_node(r.gen_range(0..=6), r.gen_range(0..=6), (1, 50), horizon, seed);
        let fast = single_node_schedule(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let exact = solve_k2(&inst).map_err(|e| format!("seed {seed}: {e}"))?.report.total;
        ensure(fast.report.total == exact, || format!("seed {seed}: {} != {exact}", fast.report.total))?;
    }
    let mut worst: f64 = 0.0;
    for (ins, outs) in [(10, 30), (100, 150), (1000, 1500), (1500, 2500)] {
        let jobs = ins + outs;
        let inst = gen_random_single_node(ins, outs, (1, 1_000_000), jobs.div_ceil(2), 7);
        let sol = single_node_schedule(&inst).map_err(|e| e.to_string())?;
        let budget = sort_budget(ins) + sort_budget(outs);
        ensure(sol.comparisons <= budget, || format!("{jobs} jobs: {} comparisons > {budget}", sol.comparisons))?;
        ensure(sol.placements == jobs, || format!("{jobs} jobs: {} placements", sol.placements))?;
        worst = worst.max(sol.comparisons as f64 / (jobs as f64 * (jobs as f64).log2()));
    }
    Ok(format!("200/200 equal; comparisons <= {worst:.2} n log2 n, placements = n"))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut violations = 0;
    for k in 0..100_000 {
        let x = if k % 2 == 0 {
            let (a, b): (i64, i64) = (r.gen_range(0..100), r.gen_range(0..100));
            let (x1, x2) = (a.min(b), a.max(b));
            let x3 = r.gen_range(x1..=x2);
            let (c, d): (i64, i64) = (r.gen_range(0..100), r.gen_range(0..100));
            [x1, x2, x3, x1 + x2 - x3, c.min(d), c.max(d)].map(|v| v as f64)
        } else {
            let (a, b): (f64, f64) = (r.gen_range(0.0..1e3), r.gen_range(0.0..1e3));
            let (x1, x2) = (a.min(b), a.max(b));
            let x3 = x1 + r.gen_range(0.0..=1.0) * (x2 - x1);
            let (c, d): (f64, f64) = (r.gen_range(0.0..1e3), r.gen_range(0.0..1e3));
            [x1, x2, x3, x1 + x2 - x3, c.min(d), c.max(d)]
        };
        if lemma1_check(x) != Ok(true) {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("100000 sextuples, 0 violations (tol {LEMMA_TOL:e})"))
}

fn criterion_5() -> Outcome {
    for seed in 0..200 {
        let inst = random_sp(5_000 + seed, 8, 3, 3, 20);
        let got = solve_sp_dp(&inst).map_err(|e| format!("seed {seed}: {e}"))?.report.total;
        let want = oracle(&inst);
        ensure(got == want, || format!("seed {seed}: spdp {got} != oracle {want}"))?;
    }
    Ok("200/200 equal".into())
}

fn best_subset_flow(inst: &Instance, rho: usize) -> Option<Capacity> {
    let jobs = inst.jobs();
    (0u32..1 << jobs.len())
        .filter(|m| m.count_ones() as usize == rho)
        .map(|m| {
            let shut: Vec<usize> = (0..jobs.len()).filter(|k| m >> k & 1 == 1).map(|k| jobs[k]).collect();
            ek_shut(inst, &shut)
        })
        .max()
}

fn criterion_6() -> Outcome {
    let mut checks = 0;
    for seed in 0..100 {
        let inst = random_sp(6_000 + seed, 10, 1, 1, 30);
        for rho in 0..=3 {
            let got = max_flow_with_outages(&inst, rho).map_err(|e| e.to_string())?;
            let want = best_subset_flow(&inst, rho);
            ensure(got == want, || format!("seed {seed}, rho {rho}: {got:?} != {want:?}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} (instance, rho) pairs equal"))
}

fn criterion_7() -> Outcome {
    let run = |name: &str, g: Generated, use_oracle: bool| -> Result<String, String> {
        let bound = g.certificate.bound;
        let mut totals = vec![];
        if use_oracle {
            totals.push(("oracle", oracle(&g.instance)));
        }
        totals.push(("spdp", solve_sp_dp(&g.instance).map_err(|e| e.to_string())?.report.total));
        for (solver, total) in totals {
            match g.certificate.decision {
                Decision::Yes => ensure(total == bound, || format!("{name} {solver}: {total} != {bound}"))?,
                Decision::No => ensure(total < bound, || format!("{name} {solver}: {total} not < {bound}"))?,
                Decision::Unknown => return Err(format!("{name}: undecided certificate")),
            }
        }
        let rel = if g.certificate.decision == Decision::Yes { "=" } else { "<" };
        Ok(format!("{name}{rel}{bound}"))
    };
    let gen = |r: mfass_core::Result<Generated>| r.map_err(|e| e.to_string());
    let yes3 = gen(gen_3partition(10, &[3, 3, 3, 3, 4, 4]))?;
    ensure(yes3.certificate.bound == 4, || "3-partition bound is not 4".into())?;
    let mut parts = vec![
        run("3part-yes", yes3, true)?,
        run("3part-no", gen(gen_3partition(13, &[4, 4, 4, 4, 4, 6]))?, true)?,
        run("part-yes", gen(gen_partition(4, &[2, 2, 3, 1]))?, true)?,
        run("part-no", gen(gen_partition(4, &[3, 5]))?, true)?,
    ];
    let unit = gen(gen_unitcap(10, &[3, 3, 3, 3, 4, 4]))?;
    ensure(unit.certificate.bound == 6, || "unit-capacity bound is not 6".into())?;
    parts.push(run("unitcap-yes", unit, true)?);
    // 26 jobs in 2 periods is beyond the oracle's reach
    parts.push(run("unitcap-no", gen(gen_unitcap(13, &[4, 4, 4, 4, 4, 6]))?, false)?);
    Ok(parts.join(", "))
}

fn criterion_8() -> Outcome {
    let mut runs = 0;
    let mut scaled = 0;
    for seed in 0..100 {
        let inst = random_sp(8_000 + seed, 7, 3, 3, 1000);
        let opt = oracle(&inst);
        for eps in ["0.1", "0.25", "0.5"] {
            let e: Epsilon = eps.parse().unwrap();
            let sol = solve_fptas(&inst, e).map_err(|err| format!("seed {seed}: {err}"))?;
            let cert = &sol.certificate;
            ensure(cert.rounding_bound_holds(), || format!("seed {seed}, eps {eps}: F < L F'"))?;
            ensure(cert.guarantees(opt), || {
                format!("seed {seed}, eps {eps}: {} < (1-eps) {opt}", sol.report.total)
            })?;
            ensure(sol.report.total == ek_score(&inst, &sol.schedule), || "report disagrees with rescoring".into())?;
            if cert.scale > Rational::from_integer(1) {
                scaled += 1;
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, 0 violations, {scaled} with L > 1"))
}

fn criterion_9() -> Outcome {
    let eps: Epsilon = "0.2".parse().unwrap();
    let horizon = 10;
    let mut r = rng(9);
    for seed in 0..30u64 {
        let m = r.gen_range(1..=8);
        let inst = gen_random_sp(&RandomSpParams {
            arc_count: m,
            capacities: (1, 50),
            job_probability: r.gen_range(0.3..=1.0),
            horizon,
            limit: m,
            balanced: false,
            seed,
        });
        let sol = solve_ptas_kall(&inst, eps).map_err(|e| e.to_string())?;
        ensure(matches!(sol.branch, PtasBranch::AllAtOnce), || format!("seed {seed}: scaled branch taken"))?;
        let floor = (horizon as Capacity - 1) * ek_shut(&inst, &[]);
        ensure(sol.report.total >= floor, || format!("seed {seed}: {} < {floor}", sol.report.total))?;
    }
    let mut balanced = 0;
    for seed in 0..30u64 {
        let m = r.gen_range(1..=7);
        let inst = gen_random_sp(&RandomSpParams {
            arc_count: m,
            capacities: (1, 50),
            job_probability: 1.0,
            horizon,
            limit: m,
            balanced: true,
            seed: 900 + seed,
        });
        ensure(is_balanced(inst.network()) && inst.jobs().len() == m, || format!("seed {seed}: not balanced J=A"))?;
        let got = solve_ptas_kall(&inst, eps).map_err(|e| e.to_string())?.report.total;
        let want = oracle(&inst);
        ensure(got == want, || format!("balanced seed {seed}: {got} != {want}"))?;
        balanced += 1;
    }
    Ok(format!("30 all-at-once runs >= (T-1) F0; {balanced} balanced J=A runs optimal"))
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    for seed in 0..50u64 {
        let nodes = r.gen_range(2..=5);
        let arcs = r.gen_range(nodes - 1..=7);
        let inst = gen_random_general(&RandomGeneralParams {
            node_count: nodes,
            arc_count: arcs,
            capacities: (1, 30),
            job_probability: 1.0,
            horizon: r.gen_range(1..=3),
            limit: arcs,
            seed,
        });
        ensure(classify(&inst).all_arcs_jobbed, || format!("seed {seed}: not every arc is a job"))?;
        let got = ek_score(&inst, &all_at_once(&inst));
        let want = oracle(&inst);
        ensure(got == want, || format!("all-arcs seed {seed}: {got} != {want}"))?;
    }
    for seed in 0..50u64 {
        let m = r.gen_range(1..=7);
        let base = gen_random_sp(&RandomSpParams {
            arc_count: m,
            capacities: (1, 30),
            job_probability: 1.0,
            horizon: r.gen_range(1..=3),
            limit: m,
            balanced: true,
            seed: 500 + seed,
        });
        let tags = classify(&base);
        ensure(tags.is_series_parallel && tags.is_balanced, || format!("seed {seed}: not SP and balanced"))?;
        let inst = base.with_limits(vec![base.jobs().len(); base.horizon()]);
        let got = ek_score(&inst, &all_at_once(&inst));
        let want = oracle(&inst);
        ensure(got == want, || format!("balanced SP seed {seed}: {got} != {want}"))?;
    }
    Ok("50 all-arcs-jobs + 50 balanced SP instances: all-at-once optimal".into())
}

fn criterion_11() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-roundtrip");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    for k in 0..100u64 {
        let inst = match k % 4 {
            0 => random_sp(k, 12, 5, 3, 100),
            1 => random_general(k, 12, 5, 2, 100),
            2 => gen_random_single_node(3, 4, (1, 9), 4, k),
            _ => gen_unitcap(10, &[3, 3, 3, 3, 4, 4]).unwrap().instance,
        };
        let path = dir.join(format!("{k}.mfass"));
        let text = print_instance(&inst);
        std::fs::write(&path, &text).map_err(|e| e.to_string())?;
        let read = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let back = parse_instance(&read).map_err(|e| format!("file {k}: {e}"))?;
        ensure(back == inst && print_instance(&back) == text, || format!("file {k}: round trip differs"))?;
    }

    for seed in 0..20 {
        let inst = random_general(11_000 + seed, 10, 4, 2, 50);
        let net = inst.network();
        let (m, j, t) = (net.arc_count(), inst.jobs().len(), inst.horizon());
        let interior = (0..net.node_count())
            .filter(|&v| v != net.source() && v != net.sink())
            .filter(|&v| net.incoming(v).next().is_some() || net.outgoing(v).next().is_some())
            .count();
        let model = build_lp(&inst);
        let counts = [
            (model.flow_vars.len(), m * t),
            (model.binaries.len(), j * t),
            (model.count(RowKind::JobCapacity), j * t),
            (model.count(RowKind::Capacity), (m - j) * t),
            (model.count(RowKind::Duration), j),
            (model.count(RowKind::Conservation), interior * t),
            (model.count(RowKind::Limit), if j == 0 { 0 } else { t }),
        ];
        for (i, (got, want)) in counts.iter().enumerate() {
            ensure(got == want, || format!("seed {seed}, count #{i}: {got} != {want}"))?;
        }
    }

    let mut compared = 0;
    let mut seed = 12_000;
    while compared < 20 {
        seed += 1;
        let inst = random_general(seed, 6, 3, 2, 20);
        if inst.jobs().len() * inst.horizon() > 12 {
            continue;
        }
        let lp = enumerate_y_optimum(&build_lp(&inst), &inst, 12).map_err(|e| e.to_string())?;
        let want = oracle(&inst);
        ensure(lp == Some(want), || format!("seed {seed}: LP {lp:?} != oracle {want}"))?;
        compared += 1;
    }
    Ok("100 files round-trip, 20 LP count checks, 20 LP enumerations equal the oracle".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oracle agreement, K=2", criterion_1),
        ("matching weight identity", criterion_2),
        ("single-node optimality and sort cost", criterion_3),
        ("exchange lemma fuzz", criterion_4),
        ("oracle agreement, SP dynamic program", criterion_5),
        ("best flow with forced outages", criterion_6),
        ("gadget certificates", criterion_7),
        ("FPTAS guarantee", criterion_8),
        ("PTAS for non-binding limits", criterion_9),
        ("trivial classes", criterion_10),
        ("round trip and LP export", criterion_11),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", k + 1, start.elapsed()),
            Err(detail) => {
                println!("FAIL {:>2} {name}: {detail}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
