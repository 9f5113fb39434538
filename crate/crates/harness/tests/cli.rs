use std::path::Path;
use std::process::{Command, Output};

use rigalign::io;
use rigalign_harness::output::parse_csv;
use rigalign_harness::CSV_HEADER;

fn rigalign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigalign")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_align_recovers_noiseless_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    let out = rigalign(&[
        "generate", "--n", "150", "--d", "400", "--s", "12", "--t", "1", "--seed", "5", "--out", path(&inst),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["truth.rig", "g.obs", "g_prime.obs", "hidden_perm.txt", "g.edges", "g_prime.edges"] {
        assert!(inst.join(f).exists(), "{f}");
    }

    let aligned = dir.path().join("aligned.txt");
    let out = rigalign(&[
        "align",
        "--g",
        path(&inst.join("g.obs")),
        "--g-prime",
        path(&inst.join("g_prime.obs")),
        "--method",
        "linear",
        "--truth",
        path(&inst.join("hidden_perm.txt")),
        "--out",
        path(&aligned),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("align_error=0 perfect=true"), "{stdout}");
    assert_eq!(
        io::load_permutation(&aligned).unwrap(),
        io::load_permutation(&inst.join("hidden_perm.txt")).unwrap()
    );
}

#[test]
fn gnn_align_requires_sparsity() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    assert!(rigalign(&["generate", "--n", "30", "--d", "50", "--s", "4", "--out", path(&inst)]).status.success());
    let out = rigalign(&[
        "align",
        "--g",
        path(&inst.join("g.obs")),
        "--g-prime",
        path(&inst.join("g_prime.obs")),
        "--out",
        path(&dir.path().join("a.txt")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_with_code_2() {
    for args in [
        vec!["check", "--n", "100", "--d", "50", "--s", "0"],
        vec!["check", "--n", "100", "--d", "50", "--s", "60"],
        vec!["check", "--n", "100", "--d", "50", "--s", "5", "--q", "0"],
        vec!["check", "--n", "100", "--d", "50", "--s", "5", "--sigma", "-1"],
        vec!["check", "--n", "100", "--d", "50"],
        vec!["sweep", "--n", "50", "--d", "50", "--s", "5", "--axis", "sigma", "--grid", "1:0:0.5"],
        vec!["sweep", "--n", "50", "--d", "50", "--s", "5", "--axis", "bogus", "--grid", "0:1:0.5"],
    ] {
        let out = rigalign(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn missing_input_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.obs");
    let out = rigalign(&[
        "align",
        "--g",
        path(&missing),
        "--g-prime",
        path(&missing),
        "--method",
        "linear",
        "--out",
        path(&dir.path().join("a.txt")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.obs"));
}

#[test]
fn sweep_writes_csv_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out/sweep.csv");
    let out = rigalign(&[
        "sweep", "--n", "120", "--d", "100", "--s", "6", "--t", "2", "--q", "0.8", "--axis", "sigma", "--grid",
        "0.2:0.6:0.4", "--replicates", "2", "--swap-pairs", "0", "--threads", "2", "--out", path(&csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    assert!(rows.iter().all(|r| r.swap_events.is_some()));
    let plot = std::fs::read_to_string(csv.with_extension("dat")).unwrap();
    let lines: Vec<&str> = plot.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("# sigma gnn_align_error_mean gnn_align_error_se"));
    assert!(lines[1].starts_with("0.2 ") && lines[2].starts_with("0.6 "));
}

#[test]
fn check_prints_report_rows() {
    let out = rigalign(&["check", "--n", "4000", "--d", "200", "--s", "10", "--sigma", "0.4", "--q", "0.8"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "name,value,components,verdict");
    assert_eq!(lines.len(), 4);
}
