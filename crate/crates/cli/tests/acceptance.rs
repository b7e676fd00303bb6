//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;

use cpl_core::benchmarks::{analyzer_benchmark, nmse_cpl, ReferenceSource, Region};
use cpl_core::calibration::{calibrate, calibrate_bisection, CalibrationEngine};
use cpl_core::fixtures::{
    chain, mixed_correlation, saturating_dataset, saturating_joint, weak_correlation,
    SATURATING_SAMPLES,
};
use cpl_core::rng::{stream, ChaCha8Rng};
use cpl_core::{
    conditional_from_joint, cpl_bound, cpl_bound_bruteforce, cpl_exact, cpl_limit,
    empirical_conditional, is_max_attainable, metrics, nmi_variants, release, statistical_cpl,
    statistical_leakage, statistical_tpl, tpl_upper_bound, transition_matrix, BudgetParams,
    Condition, ConditionalDistribution, EstimationConfig, LeakagePair, MechanismKind,
    MechanismSpec, PairwiseConditionals,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(
        elapsed < limit,
        format!(
            "{detail}; {:.1}s of {:.0}s",
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        ),
    )
}

fn rng(unit: u64) -> ChaCha8Rng {
    stream(0xacce, 0, unit)
}

/// Row-stochastic table with `rows` rows over `t` outputs; each entry is zero
/// with probability `zeros`.
fn random_conditional(
    r: &mut ChaCha8Rng,
    rows: usize,
    t: usize,
    zeros: f64,
) -> ConditionalDistribution {
    let weights = (0..rows)
        .map(|_| loop {
            let row: Vec<f64> = (0..t)
                .map(|_| {
                    if r.gen::<f64>() < zeros {
                        0.0
                    } else {
                        r.gen::<f64>()
                    }
                })
                .collect();
            if row.iter().sum::<f64>() > 0.0 {
                break row;
            }
        })
        .collect();
    ConditionalDistribution::from_weights(weights).expect("valid weights")
}

const LEAKAGE_TABLE_EPS: [f64; 3] = [0.5, 1.0, 2.0];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let joint = saturating_joint();
    let to_row = conditional_from_joint(&joint, Condition::OnRows);
    let to_col = conditional_from_joint(&joint, Condition::OnCols);
    let expect_row = [0.5, 1.0, 2.0];
    let expect_col = [0.2810, 0.6203, 1.4340];
    let mut worst: f64 = 0.0;
    let mut got = Vec::new();
    for (k, &eps) in LEAKAGE_TABLE_EPS.iter().enumerate() {
        let b = BudgetParams::pure(eps).unwrap();
        let a = cpl_bound(&to_row, &b).unwrap().leakage_nats;
        let c = cpl_bound(&to_col, &b).unwrap().leakage_nats;
        worst = worst
            .max((a - expect_row[k]).abs())
            .max((c - expect_col[k]).abs());
        got.push(format!("{a:.4}/{c:.4}"));
    }
    let detail = format!("bound {} max err {worst:.2e}", got.join(", "));
    check(worst <= 1e-3, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(1), detail)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let d = saturating_dataset(SATURATING_SAMPLES, 0).unwrap();
    let expect_row = [0.5007, 0.9985, 2.0020];
    let expect_col = [0.2833, 0.6222, 1.4369];
    let mut ok = true;
    let mut got = Vec::new();
    for (k, &eps) in LEAKAGE_TABLE_EPS.iter().enumerate() {
        let cfg = EstimationConfig {
            seed: k as u64,
            ..Default::default()
        };
        let specs = vec![
            MechanismSpec::new(MechanismKind::Grr, eps, 4).unwrap(),
            MechanismSpec::new(MechanismKind::Grr, eps, 4).unwrap(),
        ];
        let rel = release(&d, &specs, &cfg).unwrap();
        let a = statistical_cpl(&rel.perturbed, &rel.original, 0, &[1], &cfg).unwrap();
        let c = statistical_cpl(&rel.perturbed, &rel.original, 1, &[0], &cfg).unwrap();
        ok &= (a.leakage_nats - expect_row[k]).abs() <= 0.05 && a.p_value < 0.05;
        ok &= (c.leakage_nats - expect_col[k]).abs() <= 0.05 && c.p_value < 0.05;
        got.push(format!(
            "{:.4}(p={:.3})/{:.4}(p={:.3})",
            a.leakage_nats, a.p_value, c.leakage_nats, c.p_value
        ));
    }
    let detail = format!("statistical {}", got.join(", "));
    check(ok, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(120), detail)
}

fn criterion_3() -> Outcome {
    let j = saturating_joint();
    let r = metrics(&j, None).unwrap();
    let pcc = r.pcc.unwrap_or(f64::NAN);
    let v = nmi_variants(&j).unwrap();
    let rejected = [v.sqrt, v.min, v.max];
    let separated = rejected.iter().all(|x| (x - v.joint).abs() > 0.05);
    check(
        (r.nmi - 0.164).abs() <= 1e-3 && (pcc - 0.357).abs() <= 1e-3 && separated,
        format!(
            "NMI {:.4} PCC {:.4}; sqrt {:.4} min {:.4} max {:.4}",
            r.nmi, pcc, v.sqrt, v.min, v.max
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    let instances = 240;
    for _ in 0..instances {
        let t = r.gen_range(1..=12);
        let cond = random_conditional(&mut r, 2, t, 0.25);
        let eps = r.gen_range(0.0..6.0);
        let delta = if r.gen_bool(0.5) {
            0.0
        } else {
            r.gen_range(0.0..0.3)
        };
        let b = BudgetParams::new(eps, delta).unwrap();
        let g = cpl_bound(&cond, &b).unwrap().leakage_nats;
        let brute = cpl_bound_bruteforce(&cond, &b).unwrap().leakage_nats;
        worst = worst.max((g - brute).abs());
    }
    let detail = format!("{instances} instances, max |greedy - exhaustive| {worst:.1e}");
    check(worst <= 1e-12, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(30), detail)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let datasets = [
        chain(20_000, &[3, 2, 4, 2, 3], 0.6, 51).unwrap(),
        chain(20_000, &[2, 3, 3, 2, 4], 0.4, 52).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    let mut got = Vec::new();
    for (di, d) in datasets.iter().enumerate() {
        for kind in [MechanismKind::Grr, MechanismKind::Exp] {
            for eps in [1.0, 3.0] {
                let cfg = EstimationConfig {
                    expansion: 50,
                    surrogates: 1,
                    seed: di as u64,
                    ..Default::default()
                };
                let specs = (0..d.n_attributes())
                    .map(|a| MechanismSpec::new(kind, eps, d.alphabet_size(a)))
                    .collect::<cpl_core::Result<Vec<_>>>()
                    .unwrap();
                let rel = release(d, &specs, &cfg).unwrap();
                let (mut est, mut reference) = (Vec::new(), Vec::new());
                for i in 0..d.n_attributes() {
                    for j in (0..d.n_attributes()).filter(|&j| j != i) {
                        let cond = empirical_conditional(d, i, j).unwrap();
                        reference.push(
                            cpl_exact(&cond, &transition_matrix(&specs[j]).unwrap())
                                .unwrap()
                                .value(),
                        );
                        est.push(
                            statistical_leakage(&rel.perturbed, &rel.original, i, &[j]).unwrap(),
                        );
                    }
                }
                let e = nmse_cpl(&reference, &est).unwrap();
                worst = worst.max(e);
                got.push(format!("d{di}/{kind}/{eps}:{e:.1e}"));
            }
        }
    }
    let detail = format!("NMSE-CPL {} (max {worst:.2e})", got.join(" "));
    check(worst < 1e-2, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(300), detail)
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let grid = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let mut failures = Vec::new();
    let (mut attainable, mut finite_limits) = (0, 0);
    for case in 0..100 {
        let rows = r.gen_range(2..=4);
        let t = r.gen_range(2..=6);
        let cond = random_conditional(&mut r, rows, t, [0.0, 0.25, 0.6][case % 3]);
        let ls: Vec<f64> = grid
            .iter()
            .map(|&e| {
                cpl_bound(&cond, &BudgetParams::pure(e).unwrap())
                    .unwrap()
                    .leakage_nats
            })
            .collect();
        if ls.windows(2).any(|w| w[1] < w[0] - 1e-12) {
            failures.push(format!("#{case} not monotone"));
        }
        if ls.iter().zip(grid).any(|(l, e)| *l > e + 1e-9) {
            failures.push(format!("#{case} exceeds epsilon"));
        }
        if ls[0] != 0.0 {
            failures.push(format!("#{case} nonzero at epsilon 0"));
        }
        let limit = cpl_limit(&cond).unwrap();
        if limit.is_finite() {
            finite_limits += 1;
            if (ls[7] - limit).abs() > 1e-3 {
                failures.push(format!("#{case} l(16)={} limit={limit}", ls[7]));
            }
        }
        let max = is_max_attainable(&cond).is_some();
        attainable += max as usize;
        for (l, e) in ls.iter().zip(grid).filter(|(_, e)| (0.5..=4.0).contains(e)) {
            if ((l - e).abs() <= 1e-12) != max {
                failures.push(format!("#{case} l={l} at {e}, attainable={max}"));
            }
        }
        let mut same = cond.clone();
        for row in same.matrix.iter_mut() {
            row.clone_from(&cond.matrix[0]);
        }
        if grid.iter().any(|&e| {
            cpl_bound(&same, &BudgetParams::pure(e).unwrap())
                .unwrap()
                .leakage_nats
                != 0.0
        }) {
            failures.push(format!("#{case} independent rows leak"));
        }
    }
    check(
        failures.is_empty(),
        format!(
            "100 conditionals ({attainable} attainable, {finite_limits} finite limits); {} violations {}",
            failures.len(),
            failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let d = saturating_dataset(SATURATING_SAMPLES, 0).unwrap();
    let conds = PairwiseConditionals::from_dataset(&d).unwrap();
    let mut ok = true;
    let mut got = Vec::new();
    for (k, &eps) in LEAKAGE_TABLE_EPS.iter().enumerate() {
        let cfg = EstimationConfig {
            expansion: 50,
            surrogates: 1,
            seed: 70 + k as u64,
            ..Default::default()
        };
        let specs = vec![MechanismSpec::new(MechanismKind::Grr, eps, 4).unwrap(); 2];
        let rel = release(&d, &specs, &cfg).unwrap();
        let budget = BudgetParams::pure(eps).unwrap();
        for target in 0..2 {
            let neighbor = 1 - target;
            let l = cpl_bound(conds.get(target, neighbor).unwrap(), &budget).unwrap();
            let bound = tpl_upper_bound(LeakagePair::pure(eps), &[LeakagePair::from(&l)]).leakage;
            let stat = statistical_tpl(&rel.perturbed, &rel.original, target, &cfg)
                .unwrap()
                .leakage_nats;
            ok &= stat <= bound + 0.05;
            if eps == 1.0 {
                ok &= bound - stat < 0.3;
            }
            got.push(format!(
                "{eps}/{}: {stat:.3} vs {bound:.3}",
                d.names()[target]
            ));
        }
    }
    check(
        ok,
        format!("TPL statistical vs bound (slack 0.05) {}", got.join(", ")),
    )
}

fn criterion_8() -> Outcome {
    let d = mixed_correlation(50_000, 8).unwrap();
    let cfg = EstimationConfig {
        expansion: 1,
        surrogates: 1,
        seed: 8,
        ..Default::default()
    };
    let points = analyzer_benchmark(&d, &[1.0], ReferenceSource::Bound, &cfg).unwrap();
    let find = |name: &str| {
        points
            .iter()
            .find(|p| p.analyzer == name)
            .expect("analyzer present")
    };
    let spl = find("SPL-ANL");
    let grf: Vec<_> = ["GRF-0.2", "GRF-0.4"].iter().map(|n| find(n)).collect();
    let grr = find("GRR-ANL");
    let ok = spl.point.region == Region::R2
        && grf
            .iter()
            .all(|p| matches!(p.point.region, Region::R2 | Region::R3))
        && matches!(grr.point.region, Region::P1 | Region::R1)
        && grr.distance < 0.05;
    check(
        ok,
        format!(
            "SPL-ANL {:?}, GRF-0.2 {:?}, GRF-0.4 {:?}, GRR-ANL {:?} at distance {:.4}",
            spl.point.region,
            grf[0].point.region,
            grf[1].point.region,
            grr.point.region,
            grr.distance
        ),
    )
}

fn criterion_9() -> Outcome {
    let d = weak_correlation(20_000, 9).unwrap();
    let n = d.n_attributes();
    let conds = PairwiseConditionals::from_dataset(&d).unwrap();
    let max_limit = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| cpl_limit(conds.get(i, j).unwrap()).unwrap())
        .fold(0.0, f64::max);
    let target = n as f64;
    let step = calibrate(&conds, target, 0.01, CalibrationEngine::Bound).unwrap();
    let bis = calibrate_bisection(&conds, target, 0.01, CalibrationEngine::Bound).unwrap();
    let gap = (step.epsilon_star - bis.epsilon_star).abs();
    check(
        max_limit < 0.1 && step.epsilon_star >= 3.0 * target / n as f64 && gap <= 0.01,
        format!(
            "max limit {max_limit:.4}; eps* {:.2} vs equal split {:.2}; bisection {:.4} (gap {gap:.4})",
            step.epsilon_star,
            target / n as f64,
            bis.epsilon_star
        ),
    )
}

fn cli(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_cpl-kit"))
        .args(args)
        .env_remove("CPL_KIT_SEED")
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    v["manifest"]
        .as_object_mut()
        .unwrap()
        .remove("wall_time_ms");
    v
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let fixture_args = ["--seed", "5", "fixtures", "--out", dir, "--rows", "3000"];
    let first = cli(&fixture_args);
    let files = dir_bytes(tmp.path());
    let mut mismatched = Vec::new();
    if cli(&fixture_args) != first || dir_bytes(tmp.path()) != files {
        mismatched.push("fixtures".to_string());
    }
    let saturating = format!("{dir}/saturating.csv");
    let saturating_schema = format!("{dir}/saturating.schema.json");
    let weak = format!("{dir}/weak.csv");
    let chain = format!("{dir}/chain.csv");
    let data = |p: &str, s: &str| {
        vec![
            "--data".to_string(),
            p.to_string(),
            "--schema".into(),
            s.to_string(),
        ]
    };
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "analyze matrix",
            [
                vec![
                    "analyze".into(),
                    "matrix".into(),
                    "--epsilon".into(),
                    "1".into(),
                ],
                data(&saturating, &saturating_schema),
            ]
            .concat(),
        ),
        (
            "analyze exact",
            [
                vec![
                    "analyze".into(),
                    "exact".into(),
                    "--epsilon".into(),
                    "1".into(),
                ],
                data(&saturating, &saturating_schema),
            ]
            .concat(),
        ),
        (
            "analyze bound",
            [
                vec![
                    "analyze".into(),
                    "bound".into(),
                    "--epsilon".into(),
                    "1".into(),
                ],
                data(&saturating, &saturating_schema),
            ]
            .concat(),
        ),
        (
            "estimate",
            [
                vec![
                    "estimate".into(),
                    "--epsilon".into(),
                    "1".into(),
                    "--expansion".into(),
                    "5".into(),
                    "--surrogates".into(),
                    "20".into(),
                    "--tpl".into(),
                ],
                data(&saturating, &saturating_schema),
            ]
            .concat(),
        ),
        (
            "benchmark analyzers",
            vec![
                "benchmark".into(),
                "analyzers".into(),
                "--data".into(),
                chain.clone(),
                "--epsilons".into(),
                "0.5,1".into(),
                "--reference".into(),
                "statistical".into(),
                "--expansion".into(),
                "5".into(),
            ],
        ),
        (
            "benchmark utility",
            vec![
                "benchmark".into(),
                "utility".into(),
                "--data".into(),
                saturating.clone(),
                "--epsilons".into(),
                "1,2".into(),
                "--expansion".into(),
                "3".into(),
            ],
        ),
        (
            "calibrate",
            vec![
                "calibrate".into(),
                "--data".into(),
                weak.clone(),
                "--budget".into(),
                "10".into(),
            ],
        ),
    ];
    for (name, args) in &runs {
        let mut full = vec!["--seed".to_string(), "11".into()];
        full.extend(args.iter().cloned());
        let full: Vec<&str> = full.iter().map(String::as_str).collect();
        let a = cli(&full);
        let b = cli(&full);
        let mut one_thread = vec!["--threads", "1"];
        one_thread.extend(full.iter());
        let c = cli(&one_thread);
        if a != b || a["result"] != c["result"] {
            mismatched.push(name.to_string());
        }
    }
    check(
        mismatched.is_empty(),
        format!(
            "{} subcommands rerun; mismatched: {mismatched:?}",
            runs.len() + 1
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "bound reproduces the two-attribute leakage table",
            criterion_1,
        ),
        (
            "statistical estimate reproduces the experimental table",
            criterion_2,
        ),
        ("NMI and PCC of the two-attribute example", criterion_3),
        ("greedy bound equals exhaustive search", criterion_4),
        ("statistical vs exact NMSE on chain datasets", criterion_5),
        ("bound corollaries on random conditionals", criterion_6),
        ("total leakage bound is tight", criterion_7),
        ("benchmark region signatures", criterion_8),
        ("calibration gain on weak correlation", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
