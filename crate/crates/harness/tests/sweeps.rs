use rigalign::{ModelParams, NoiseParams};
use rigalign_harness::output::{csv_string, mean_se, summarize};
use rigalign_harness::{phase_diagram, run_sweep, Axis, Method, PlotMetric, SwapCounting, SweepSpec, TrialSpec};

fn base(sigma: f64) -> TrialSpec {
    let params = ModelParams::from_sparsity(200, 100, 6.0, 2).unwrap();
    TrialSpec::new(params, NoiseParams::new(sigma, 0.8).unwrap(), vec![Method::Gnn, Method::Linear], 31).unwrap()
}

fn without_runtime(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn sweep_csv_is_independent_of_thread_count() {
    let mut spec = base(0.3);
    spec.swaps = SwapCounting::Sampled(500);
    let sweep = SweepSpec {
        base: spec,
        axis: Axis::Q,
        grid: vec![0.5, 1.0],
        replicates: 2,
    };
    let run = |k: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
        without_runtime(&csv_string(&pool.install(|| run_sweep(&sweep)).unwrap()))
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn plot_summary_matches_hand_computed_means() {
    let sweep = SweepSpec {
        base: base(0.5),
        axis: Axis::Sigma,
        grid: vec![0.1, 0.9],
        replicates: 2,
    };
    let records = run_sweep(&sweep).unwrap();
    assert_eq!(records.len(), 4);
    let points = summarize(&records, Axis::Sigma, PlotMetric::AlignError);
    assert_eq!(points.len(), 2);
    for (k, p) in points.iter().enumerate() {
        assert_eq!(p.axis_value, sweep.grid[k]);
        for (col, method) in [Method::Gnn, Method::Linear].into_iter().enumerate() {
            let xs: Vec<f64> = records[2 * k..2 * k + 2]
                .iter()
                .map(|r| r.outcome(method).unwrap().align_error)
                .collect();
            let mean = (xs[0] + xs[1]) / 2.0;
            // Two samples: SE = |a - b| / 2.
            let se = (xs[0] - xs[1]).abs() / 2.0;
            assert_eq!(p.series[col].0, method);
            assert!((p.series[col].1 - mean).abs() < 1e-15);
            assert!((p.series[col].2 - se).abs() < 1e-15);
        }
    }
    assert_eq!(mean_se(&[1.0, 3.0]), (2.0, 1.0));
}

#[test]
fn phase_cells_separate_easy_and_hard_regimes() {
    let params = ModelParams::from_density(200, 200, 1.0, 1).unwrap();
    let spec = TrialSpec::new(params, NoiseParams::exact(), vec![Method::Linear], 3).unwrap();
    // m = n^alpha, d = n^beta. Large s: rows are distinct and linear matching is exact.
    // s below one: most rows are empty and cannot be told apart.
    let cells = phase_diagram(&[0.2], &[0.5, 2.0], &spec, 4, 1.0);
    assert_eq!(cells.len(), 2);
    let rate = |c: &rigalign_harness::PhaseCell| c.recovery_rate[0].1;
    let easy = cells.iter().find(|c| c.beta == 2.0).unwrap();
    let hard = cells.iter().find(|c| c.beta == 0.5).unwrap();
    assert!(easy.s > 20.0 && hard.s < 1.0, "{} {}", easy.s, hard.s);
    assert_eq!(rate(easy), 1.0);
    assert_eq!(rate(hard), 0.0);
}

#[test]
fn invalid_phase_cells_are_skipped() {
    let params = ModelParams::from_density(100, 50, 1.0, 1).unwrap();
    let spec = TrialSpec::new(params, NoiseParams::exact(), vec![Method::Linear], 3).unwrap();
    // alpha = 1.5 puts m above n.
    let cells = phase_diagram(&[1.5], &[1.0], &spec, 2, 1.0);
    assert!(cells[0].skipped.is_some());
    assert!(cells[0].recovery_rate.iter().all(|r| r.1 == 0.0) || cells[0].recovery_rate.is_empty());
}
