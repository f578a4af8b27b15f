//! Re-derives the thresholds frozen in the test suites from independent seeds.
//!
//! `cargo run --release -p recourse-cost --example calibrate`

use recourse_cost::{
    run_pairwise_experiment, run_recourse_experiment, EstimatorConfig, ExperimentReport,
    PairwiseSimConfig, RecourseSimConfig,
};

const PER_FEATURE: [usize; 4] = [50, 100, 200, 500];

fn means(report: &ExperimentReport, schedule: &[usize]) -> Vec<f64> {
    schedule
        .iter()
        .map(|&t| {
            let rows: Vec<_> = report
                .rows
                .iter()
                .filter(|r| r.total_comparisons == t)
                .collect();
            rows.iter().map(|r| r.mse).sum::<f64>() / rows.len() as f64
        })
        .collect()
}

fn main() {
    let (mut worst_final, mut worst_pairwise_ratio, mut worst_recourse_ratio) = (0f64, 0f64, 0f64);
    let mut non_monotone = 0;
    for seed in 1000..1010u64 {
        for nf in [5, 10, 15, 20] {
            let schedule: Vec<usize> = PER_FEATURE.iter().map(|c| c * nf).collect();
            let report = run_pairwise_experiment(&PairwiseSimConfig {
                num_features: nf,
                comparisons_schedule: schedule.clone(),
                trials: 10,
                seed,
                estimator: EstimatorConfig::default(),
            })
            .unwrap();
            let m = means(&report, &schedule);
            worst_final = worst_final.max(m[3]);
            worst_pairwise_ratio = worst_pairwise_ratio.max(m[3] / m[0]);
        }
        let schedule: Vec<usize> = PER_FEATURE.iter().map(|c| c * 20).collect();
        for size in 1..=6 {
            let report =
                run_recourse_experiment(&RecourseSimConfig::new(size, schedule.clone(), 10, seed))
                    .unwrap();
            let m = means(&report, &schedule);
            worst_recourse_ratio = worst_recourse_ratio.max(m[3] / m[0]);
            if m.windows(2).any(|w| w[1] > w[0]) {
                non_monotone += 1;
            }
        }
    }
    println!(
        "pairwise: worst final mse {worst_final:.5}, worst last/first {worst_pairwise_ratio:.3}"
    );
    println!("recourse: worst last/first {worst_recourse_ratio:.3}, non-monotone curves {non_monotone}/60");

    let mut worst_size3 = 0f64;
    for seed in 1000..1010u64 {
        let report =
            run_recourse_experiment(&RecourseSimConfig::new(3, vec![10_000], 10, seed)).unwrap();
        worst_size3 = worst_size3.max(means(&report, &[10_000])[0]);
    }
    println!("size 3 at 10000 comparisons: worst mean mse {worst_size3:.4}");
}
