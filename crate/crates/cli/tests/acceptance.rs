//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! fails at the end if any criterion failed.
//!
//! `cargo test -p recourse-cost-cli --test acceptance -- --nocapture`

use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recourse_cost::{
    compare_recourses, map_estimate, pairwise_prob, recourse_prob, recourse_prob_mc,
    run_pairwise_experiment, run_recourse_experiment, ComparisonDataset, CostVector, Easier,
    EstimatorConfig, ExperimentReport, FeatureCatalog, PairwiseSimConfig, Recourse,
    RecourseSimConfig, StrengthVector,
};
use tempfile::TempDir;

const SEED: u64 = 2024;
const PER_FEATURE: [usize; 4] = [50, 100, 200, 500];
const TRIALS: usize = 10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn mean_curve(
    report: &ExperimentReport,
    num_features: usize,
    size: usize,
    schedule: &[usize],
) -> Vec<f64> {
    schedule
        .iter()
        .map(|&t| {
            let rows: Vec<_> = report
                .rows
                .iter()
                .filter(|r| {
                    r.num_features == num_features
                        && r.recourse_size == size
                        && r.total_comparisons == t
                })
                .collect();
            rows.iter().map(|r| r.mse).sum::<f64>() / rows.len() as f64
        })
        .collect()
}

fn median_runtimes(
    report: &ExperimentReport,
    num_features: usize,
    size: usize,
    schedule: &[usize],
) -> Vec<f64> {
    schedule
        .iter()
        .map(|&t| {
            let mut v: Vec<f64> = report
                .rows
                .iter()
                .filter(|r| {
                    r.num_features == num_features
                        && r.recourse_size == size
                        && r.total_comparisons == t
                })
                .map(|r| r.runtime_ms)
                .collect();
            v.sort_by(f64::total_cmp);
            let m = v.len() / 2;
            if v.len() % 2 == 1 {
                v[m]
            } else {
                (v[m - 1] + v[m]) / 2.0
            }
        })
        .collect()
}

fn counterexamples() -> Outcome {
    let start = Instant::now();
    let cat = Arc::new(FeatureCatalog::new(["amt", "add", "inc", "age"]).unwrap());
    let r = cat.recourse(&["amt", "age"]).unwrap();
    let r_alt = cat.recourse(&["add", "inc"]).unwrap();
    let ln = f64::ln;
    let c1 = CostVector::new(cat.clone(), vec![-ln(10.0), -ln(3.0), -ln(2.0), 0.0]).unwrap();
    let c2 = CostVector::new(cat.clone(), vec![-ln(10.0), -ln(9.0), -ln(8.0), 0.0]).unwrap();
    let a = compare_recourses(&r, &r_alt, &c1, None).unwrap();
    let b = compare_recourses(&r, &r_alt, &c2, None).unwrap();
    let elapsed = start.elapsed();
    let close = |x: f64, y: f64| (x - y).abs() <= 0.005;
    let ok = close(a.rho_12, 0.55)
        && close(a.rho_21, 0.45)
        && a.easier == Easier::First
        && close(b.rho_12, 0.32)
        && close(b.rho_21, 0.68)
        && b.easier == Easier::Second
        && elapsed < Duration::from_secs(1);
    outcome(
        ok,
        format!(
            "C1 {:.4}/{:.4}, C2 {:.4}/{:.4}, {:?}",
            a.rho_12, a.rho_21, b.rho_12, b.rho_21, elapsed
        ),
    )
}

fn invariants() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = 0usize;
    let mut check = |ok: bool| violations += usize::from(!ok);
    const TOL: f64 = 1e-12;
    const N: usize = 8;
    let cat = Arc::new(FeatureCatalog::numbered(N).unwrap());

    for _ in 0..10_000 {
        let (a, b, c): (f64, f64, f64) = (
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        );
        let p = |x, y| pairwise_prob(x, y).unwrap();
        check((p(a, b) + p(b, a) - 1.0).abs() <= TOL);
        let shift = rng.gen_range(-100.0..100.0);
        check((p(a, b) - p(a + shift, b + shift)).abs() <= TOL);
        if p(a, b) > 0.5 && p(b, c) > 0.5 {
            check(p(a, c) > 0.5);
        }
    }

    for _ in 0..2_000 {
        let beta = StrengthVector::new(
            cat.clone(),
            (0..N).map(|_| rng.gen_range(-5.0..5.0)).collect(),
        )
        .unwrap();
        let tags: Vec<u8> = (0..N).map(|_| rng.gen_range(0..3)).collect();
        let pick = |t| (0..N).filter(|&i| tags[i] == t).collect::<Vec<_>>();
        let (one, two, rest) = (pick(1), pick(2), pick(0));
        if one.is_empty() || two.is_empty() {
            continue;
        }
        let r1 = Recourse::from_indices(one.clone(), N).unwrap();
        let r2 = Recourse::from_indices(two.clone(), N).unwrap();
        let fwd = recourse_prob(&r1, &r2, &beta).unwrap();
        check((fwd + recourse_prob(&r2, &r1, &beta).unwrap() - 1.0).abs() <= TOL);
        check(
            (fwd - recourse_prob(&r1, &r2, &beta.shifted(rng.gen_range(-100.0..100.0))).unwrap())
                .abs()
                <= TOL,
        );
        let (f, g) = (one[0], two[0]);
        let single = recourse_prob(
            &Recourse::from_indices([f], N).unwrap(),
            &Recourse::from_indices([g], N).unwrap(),
            &beta,
        )
        .unwrap();
        check((single - pairwise_prob(beta.values()[f], beta.values()[g]).unwrap()).abs() <= TOL);
        if !rest.is_empty() {
            let with = |r: &[usize]| {
                Recourse::from_indices(r.iter().copied().chain(rest.iter().copied()), N).unwrap()
            };
            check((recourse_prob(&with(&one), &with(&two), &beta).unwrap() - fwd).abs() <= TOL);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < Duration::from_secs(10),
        format!("{violations} violations, {elapsed:?}"),
    )
}

fn closed_form() -> Outcome {
    let cfg = EstimatorConfig {
        pseudo_count: 0.0,
        ..Default::default()
    };
    let mut worst = 0f64;
    for r in [2.0f64, 3.0, 10.0] {
        let mut ds = ComparisonDataset::new(Arc::new(FeatureCatalog::new(["f", "g"]).unwrap()));
        ds.push_named("f", "g", r).unwrap();
        ds.push_named("g", "f", 1.0).unwrap();
        let b = map_estimate(&ds, &cfg).unwrap().strengths;
        worst = worst.max((b.values()[0] - b.values()[1] - r.ln()).abs());
    }
    outcome(worst <= 1e-6, format!("max error {worst:e}"))
}

fn pairwise_report() -> (ExperimentReport, Duration) {
    let start = Instant::now();
    let mut report = ExperimentReport::default();
    for nf in [5, 10, 15, 20] {
        report.extend(
            run_pairwise_experiment(&PairwiseSimConfig {
                num_features: nf,
                comparisons_schedule: PER_FEATURE.iter().map(|c| c * nf).collect(),
                trials: TRIALS,
                seed: SEED,
                estimator: EstimatorConfig::default(),
            })
            .unwrap(),
        );
    }
    (report, start.elapsed())
}

fn pairwise_curves(report: &ExperimentReport, elapsed: Duration) -> Outcome {
    let mut ok = elapsed < Duration::from_secs(120);
    let mut detail = Vec::new();
    for nf in [5, 10, 15, 20] {
        let schedule: Vec<usize> = PER_FEATURE.iter().map(|c| c * nf).collect();
        let m = mean_curve(report, nf, 1, &schedule);
        ok &= m[3] < m[0] && m[3] < 0.02;
        detail.push(format!("|F|={nf} {:.4}->{:.4}", m[0], m[3]));
    }
    outcome(ok, format!("{}, {elapsed:.1?}", detail.join(", ")))
}

fn recourse_report() -> (ExperimentReport, Duration) {
    let start = Instant::now();
    let schedule: Vec<usize> = PER_FEATURE.iter().map(|c| c * 20).collect();
    let mut report = ExperimentReport::default();
    for size in 1..=6 {
        report.extend(
            run_recourse_experiment(&RecourseSimConfig::new(
                size,
                schedule.clone(),
                TRIALS,
                SEED,
            ))
            .unwrap(),
        );
    }
    (report, start.elapsed())
}

fn recourse_curves(
    pairwise: &ExperimentReport,
    report: &ExperimentReport,
    elapsed: Duration,
) -> Outcome {
    let schedule: Vec<usize> = PER_FEATURE.iter().map(|c| c * 20).collect();
    let size_one: Vec<_> = report
        .rows
        .iter()
        .filter(|r| r.recourse_size == 1)
        .collect();
    let pair_20: Vec<_> = pairwise
        .rows
        .iter()
        .filter(|r| r.num_features == 20)
        .collect();
    let identical = size_one.len() == pair_20.len()
        && size_one.iter().zip(&pair_20).all(|(a, b)| {
            a.mse.to_bits() == b.mse.to_bits() && a.total_comparisons == b.total_comparisons
        });
    let mut ok = identical && elapsed < Duration::from_secs(300);
    let mut detail = vec![format!("size 1 bit-identical: {identical}")];
    for size in 2..=6 {
        let m = mean_curve(report, 20, size, &schedule);
        ok &= m[3] < m[0];
        detail.push(format!("size {size} {:.4}->{:.4}", m[0], m[3]));
    }
    outcome(ok, format!("{}, {elapsed:.1?}", detail.join(", ")))
}

fn monte_carlo() -> Outcome {
    const N: usize = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cat = Arc::new(FeatureCatalog::numbered(N).unwrap());
    let mut worst = 0f64;
    for i in 0..100 {
        let beta = StrengthVector::new(
            cat.clone(),
            (0..N).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        )
        .unwrap();
        let mut order: Vec<usize> = (0..N).collect();
        for k in (1..N).rev() {
            order.swap(k, rng.gen_range(0..=k));
        }
        let (s1, s2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let r1 = Recourse::from_indices(order[..s1].to_vec(), N).unwrap();
        let r2 = Recourse::from_indices(order[s1..s1 + s2].to_vec(), N).unwrap();
        let exact = recourse_prob(&r1, &r2, &beta).unwrap();
        let mc = recourse_prob_mc(&r1, &r2, &beta, 100_000, SEED + i).unwrap();
        worst = worst.max((exact - mc).abs());
    }
    outcome(worst <= 0.01, format!("max |mc - exact| {worst:.4}"))
}

fn cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_recourse-cost"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn cli_stdout(args: &[&str]) -> Vec<u8> {
    Command::new(env!("CARGO_BIN_EXE_recourse-cost"))
        .args(args)
        .output()
        .unwrap()
        .stdout
}

/// Experiment files with the runtime column dropped.
fn without_runtime(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap_or("").split(',').collect();
    let col = header
        .iter()
        .position(|h| *h == "runtime_ms")
        .expect("runtime column");
    text.lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| *i != col)
                .map(|(_, c)| c)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let dir = TempDir::new().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let mut failures = Vec::new();
    let same = |a: &str, b: &str| fs::read(a).unwrap() == fs::read(b).unwrap();

    for run in ["1", "2"] {
        assert!(cli(&[
            "simulate-pairwise",
            "--num-features",
            "8",
            "--comparisons",
            "500",
            "--seed",
            "7",
            "--beta-out",
            &path(&format!("pb{run}.csv")),
            "--out",
            &path(&format!("p{run}.csv"))
        ]));
        assert!(cli(&[
            "simulate-recourse",
            "--recourse-size",
            "3",
            "--comparisons",
            "500",
            "--seed",
            "7",
            "--beta-out",
            &path(&format!("rb{run}.csv")),
            "--out",
            &path(&format!("r{run}.csv"))
        ]));
        assert!(cli(&[
            "estimate",
            "--input",
            &path("p1.csv"),
            "--input-kind",
            "pairwise",
            "--out",
            &path(&format!("e{run}.csv")),
            "--costs-out",
            &path(&format!("c{run}.csv"))
        ]));
        assert!(cli(&[
            "experiment",
            "--kind",
            "recourse",
            "--recourse-size",
            "1,2",
            "--num-features",
            "10",
            "--schedule",
            "20,40",
            "--trials",
            "3",
            "--seed",
            "7",
            "--out",
            &path(&format!("x{run}.csv"))
        ]));
    }
    for (a, b) in [
        ("pb1.csv", "pb2.csv"),
        ("p1.csv", "p2.csv"),
        ("rb1.csv", "rb2.csv"),
        ("r1.csv", "r2.csv"),
        ("e1.csv", "e2.csv"),
        ("c1.csv", "c2.csv"),
    ] {
        if !same(&path(a), &path(b)) {
            failures.push(a.to_owned());
        }
    }
    if without_runtime(&dir.path().join("x1.csv")) != without_runtime(&dir.path().join("x2.csv")) {
        failures.push("experiment".into());
    }
    let compare = [
        "compare",
        "--costs",
        &path("c1.csv"),
        "--recourse-a",
        "f0;f1",
        "--recourse-b",
        "f2;f3",
        "--mc-samples",
        "20000",
        "--seed",
        "7",
    ];
    let first = cli_stdout(&compare);
    if first.is_empty() || first != cli_stdout(&compare) {
        failures.push("compare".into());
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "7 commands".into()
        } else {
            format!("differs: {failures:?}")
        },
    )
}

fn runtime_trend(pairwise: &ExperimentReport, recourse: &ExperimentReport) -> Outcome {
    let mut curves = Vec::new();
    for nf in [5, 10, 15, 20] {
        let schedule: Vec<usize> = PER_FEATURE.iter().map(|c| c * nf).collect();
        curves.push((
            format!("pairwise |F|={nf}"),
            median_runtimes(pairwise, nf, 1, &schedule),
        ));
    }
    let schedule: Vec<usize> = PER_FEATURE.iter().map(|c| c * 20).collect();
    for size in 1..=6 {
        curves.push((
            format!("size {size}"),
            median_runtimes(recourse, 20, size, &schedule),
        ));
    }
    let bad: Vec<String> = curves
        .iter()
        .filter(|(_, m)| m.windows(2).any(|w| w[1] < w[0]))
        .map(|(name, m)| format!("{name} {m:.2?}"))
        .collect();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} curves non-decreasing", curves.len())
        } else {
            bad.join("; ")
        },
    )
}

#[test]
fn acceptance() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    println!();
    let mut report = |name, o: Outcome| {
        println!(
            "[{}] {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((name, o));
    };

    report("counterexample reproduction", counterexamples());
    report("probability invariants", invariants());
    report("closed-form estimator oracle", closed_form());
    let (pairwise, pairwise_time) = pairwise_report();
    report(
        "pairwise recovery curves",
        pairwise_curves(&pairwise, pairwise_time),
    );
    let (recourse, recourse_time) = recourse_report();
    report(
        "recourse recovery curves",
        recourse_curves(&pairwise, &recourse, recourse_time),
    );
    report("monte carlo convergence", monte_carlo());
    report("determinism", determinism());
    report("runtime trend", runtime_trend(&pairwise, &recourse));

    let failed: Vec<_> = results
        .iter()
        .filter(|(_, o)| !o.passed)
        .map(|(n, _)| *n)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
