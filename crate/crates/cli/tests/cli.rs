//! End-to-end tests of the binary: pipelines, determinism, exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn diffnet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffnet"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn full_pipeline_runs_and_leaves_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    // 2^8 = 256-node core-periphery truth, 200 recorded cascades
    assert_ok(&diffnet(
        d,
        &[
            "generate", "--model", "kronecker", "--seed-matrix", "0.9,0.5,0.5,0.3",
            "--power", "8", "--rng", "7", "--out", "net.edges",
        ],
    ));
    assert!(d.join("net.edges").exists());
    assert!(d.join("net.edges.manifest").exists());
    let net = fs::read_to_string(d.join("net.edges")).unwrap();
    assert!(net.starts_with("# nodes: 256\n"));

    assert_ok(&diffnet(
        d,
        &[
            "simulate", "--network", "net.edges", "--likelihood", "exp", "--beta", "0.5",
            "--horizon", "10", "--cascades", "200", "--rng", "3", "--out", "casc.txt",
        ],
    ));
    assert!(d.join("casc.txt.manifest").exists());

    let infer = diffnet(
        d,
        &[
            "infer", "--cascades", "casc.txt", "--k", "64", "--likelihood", "exp",
            "--out", "inferred.csv",
        ],
    );
    assert_ok(&infer);
    let stdout = String::from_utf8_lossy(&infer.stdout);
    assert!(stdout.contains("exhausted:"), "stdout: {stdout}");
    assert!(stdout.contains("online bound:"), "stdout: {stdout}");
    let inferred = fs::read_to_string(d.join("inferred.csv")).unwrap();
    assert!(inferred.contains("src,dst,gain,objective"));

    assert_ok(&diffnet(
        d,
        &[
            "evaluate", "--inferred", "inferred.csv", "--truth", "net.edges",
            "--out", "eval.csv",
        ],
    ));
    let eval = fs::read_to_string(d.join("eval.csv")).unwrap();
    assert!(eval.starts_with("n_inferred,n_truth,n_common,precision,recall,accuracy\n"));

    assert_ok(&diffnet(
        d,
        &[
            "sweep", "--cascades", "casc.txt", "--truth", "net.edges", "--k-max", "10",
            "--likelihood", "exp", "--out", "sweep.csv",
        ],
    ));
    let sweep = fs::read_to_string(d.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "k,precision,recall,accuracy,objective,elapsed_ms_per_edge");
    assert_eq!(lines.len(), 11, "one row per selected edge plus header");
}

#[test]
fn identical_flags_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a.edges", "b.edges"] {
        assert_ok(&diffnet(
            d,
            &[
                "generate", "--model", "scalefree", "--nodes", "64", "--out-degree", "2",
                "--rng", "11", "--out", out,
            ],
        ));
    }
    assert_eq!(
        fs::read(d.join("a.edges")).unwrap(),
        fs::read(d.join("b.edges")).unwrap()
    );

    for out in ["a.txt", "b.txt"] {
        assert_ok(&diffnet(
            d,
            &[
                "simulate", "--network", "a.edges", "--likelihood", "ray",
                "--cascades", "20", "--rng", "5", "--out", out,
            ],
        ));
    }
    assert_eq!(
        fs::read(d.join("a.txt")).unwrap(),
        fs::read(d.join("b.txt")).unwrap()
    );
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    // probability out of range, named field in the message
    let out = diffnet(
        d,
        &[
            "generate", "--model", "kronecker", "--seed-matrix", "1.5,0.5,0.5,0.3",
            "--power", "4", "--out", "net.edges",
        ],
    );
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed-matrix"));

    // malformed matrix
    let out = diffnet(
        d,
        &[
            "generate", "--model", "kronecker", "--seed-matrix", "0.9,0.5,x,0.3",
            "--power", "4", "--out", "net.edges",
        ],
    );
    assert_eq!(exit_code(&out), 1);

    // k = 0
    fs::write(d.join("c.txt"), "0,0\n1,1\n\n0,0;1,1\n").unwrap();
    let out = diffnet(
        d,
        &["infer", "--cascades", "c.txt", "--k", "0", "--likelihood", "exp", "--out", "i.csv"],
    );
    assert_eq!(exit_code(&out), 1);

    // unknown flag goes through clap, still exit 1
    let out = diffnet(d, &["generate", "--bogus"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    // missing input file
    let out = diffnet(
        d,
        &[
            "simulate", "--network", "absent.edges", "--likelihood", "exp",
            "--cascades", "5", "--out", "c.txt",
        ],
    );
    assert_eq!(exit_code(&out), 2);

    // node-count mismatch between inferred and truth
    fs::write(d.join("inferred.csv"), "# nodes: 4\nsrc,dst,gain,objective\n0,1,1,1\n").unwrap();
    fs::write(d.join("truth.edges"), "# nodes: 5\n0,1\n").unwrap();
    let out = diffnet(
        d,
        &["evaluate", "--inferred", "inferred.csv", "--truth", "truth.edges", "--out", "e.csv"],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("node-count mismatch"));

    // cascades with no time-ordered pair: empty candidate set
    fs::write(d.join("tied.txt"), "0,0\n1,1\n\n0,0;1,0\n").unwrap();
    let out = diffnet(
        d,
        &["infer", "--cascades", "tied.txt", "--k", "1", "--likelihood", "exp", "--out", "i.csv"],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn zero_cascades_writes_header_only_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("net.edges"), "# nodes: 3\n0,1,1.0\n1,2,1.0\n").unwrap();
    assert_ok(&diffnet(
        d,
        &[
            "simulate", "--network", "net.edges", "--likelihood", "exp",
            "--cascades", "0", "--out", "c.txt",
        ],
    ));
    assert_eq!(fs::read_to_string(d.join("c.txt")).unwrap(), "0,0\n1,1\n2,2\n\n");
}

#[test]
fn perfect_inference_evaluates_to_unit_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("truth.edges"), "# nodes: 3\n0,1\n1,2\n").unwrap();
    fs::write(
        d.join("inferred.csv"),
        "# nodes: 3\nsrc,dst,gain,objective\n0,1,2,2\n1,2,1,3\n",
    )
    .unwrap();
    assert_ok(&diffnet(
        d,
        &["evaluate", "--inferred", "inferred.csv", "--truth", "truth.edges", "--out", "e.csv"],
    ));
    let csv = fs::read_to_string(d.join("e.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with("1,1,1"), "csv: {csv}");
}

#[test]
fn best_tree_mode_produces_a_baseline_ranking() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("net.edges"), "# nodes: 4\n0,1,1.0\n1,2,1.0\n2,3,1.0\n").unwrap();
    assert_ok(&diffnet(
        d,
        &[
            "simulate", "--network", "net.edges", "--likelihood", "exp", "--beta", "1",
            "--cascades", "10", "--rng", "2", "--out", "c.txt",
        ],
    ));
    assert_ok(&diffnet(
        d,
        &[
            "infer", "--cascades", "c.txt", "--k", "50", "--likelihood", "exp",
            "--mode", "best-tree", "--out", "bt.csv",
        ],
    ));
    let csv = fs::read_to_string(d.join("bt.csv")).unwrap();
    assert!(csv.lines().count() > 2, "baseline selected nothing: {csv}");
}

#[test]
fn aucgain_emits_one_row_per_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_ok(&diffnet(
        d,
        &[
            "generate", "--model", "kronecker", "--seed-matrix", "0.9,0.5,0.5,0.3",
            "--power", "5", "--rng", "1", "--out", "net.edges",
        ],
    ));
    assert_ok(&diffnet(
        d,
        &[
            "aucgain", "--truth", "net.edges", "--likelihood", "exp",
            "--counts", "25,50,100,200", "--rng", "4", "--out", "gain.csv",
        ],
    ));
    let csv = fs::read_to_string(d.join("gain.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n_cascades,auc_all_trees,auc_best_tree,relative_gain");
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let gain: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(gain.is_finite());
    }
}

#[test]
fn no_lazy_flag_gives_identical_inference() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("net.edges"), "# nodes: 8\n0,1,1.0\n0,2,1.0\n1,3,0.8\n2,4,1.2\n3,5,1.0\n4,6,0.9\n5,7,1.1\n").unwrap();
    assert_ok(&diffnet(
        d,
        &[
            "simulate", "--network", "net.edges", "--likelihood", "pow",
            "--cascades", "15", "--rng", "9", "--out", "c.txt",
        ],
    ));
    for (flag, out) in [(None, "lazy.csv"), (Some("--no-lazy"), "naive.csv")] {
        let mut args = vec![
            "infer", "--cascades", "c.txt", "--k", "30", "--likelihood", "pow", "--out", out,
        ];
        if let Some(f) = flag {
            args.push(f);
        }
        assert_ok(&diffnet(d, &args));
    }
    assert_eq!(
        fs::read(d.join("lazy.csv")).unwrap(),
        fs::read(d.join("naive.csv")).unwrap()
    );
}
