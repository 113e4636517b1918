use std::path::Path;
use std::process::{Command, Output};

use qframe_cli::config::{parse, EstimateConfig, MomentsConfig, OrientSweepConfig, QdocConfig};
use qframe_cli::output::{extract_config, strip_wall_clock, table_lines};

fn qframe(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qframe"))
        .args(args)
        .current_dir(dir)
        .env("QFRAME_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn column(doc: &str, name: &str) -> Vec<String> {
    let lines = table_lines(doc);
    let idx = lines[0]
        .split(',')
        .position(|c| c == name)
        .expect("column exists");
    lines[1..]
        .iter()
        .map(|l| l.split(',').nth(idx).unwrap().to_string())
        .collect()
}

#[test]
fn verify_reports_tight_tetrahedron() {
    let dir = tempfile::tempdir().unwrap();
    let o = qframe(&["verify", "--solid", "tetrahedron"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("tight Q-frame:            yes"));
    assert!(text.contains("frame bound C:            3.33333333333e-1"));
}

#[test]
fn verify_rotation_keeps_frame_bound() {
    let dir = tempfile::tempdir().unwrap();
    let c = |args: &[&str]| {
        let t = stdout(&qframe(args, dir.path()));
        t.lines()
            .find(|l| l.starts_with("frame_bound"))
            .unwrap()
            .to_string()
    };
    let plain = c(&["verify", "--solid", "octahedron", "--format", "toml"]);
    let rotated = c(&[
        "verify",
        "--solid",
        "octahedron",
        "--rotate",
        "0.3,-0.2,0.7,0.1",
        "--format",
        "toml",
    ]);
    let value = |l: &str| l.split('=').nth(1).unwrap().trim().parse::<f64>().unwrap();
    assert!((value(&plain) - value(&rotated)).abs() <= 1e-12);
}

#[test]
fn verify_rejects_incomplete_element_list() {
    let dir = tempfile::tempdir().unwrap();
    let export = dir.path().join("cube.toml");
    let o = qframe(
        &[
            "verify",
            "--solid",
            "cube",
            "--export",
            export.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let doc = std::fs::read_to_string(&export).unwrap();
    let back = qframe(
        &["verify", "--povm-file", export.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(back.status.code(), Some(0));
    // Drop the last element: the remainder no longer sums to the identity.
    let cut = doc.rfind("[[elements]]").unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, &doc[..cut]).unwrap();
    let o = qframe(
        &["verify", "--povm-file", bad.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("completeness residual"));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "trails = 5\n").unwrap();
    let o = qframe(&["estimate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trails"));
    assert_eq!(
        qframe(&["estimate", "--trials", "many"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qframe(&["verify"], dir.path()).status.code(), Some(2));
}

#[test]
fn estimate_default_grid_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("est.csv");
    let run = || {
        let o = qframe(
            &[
                "estimate",
                "--trials",
                "2",
                "--seed",
                "7",
                "--output",
                out.to_str().unwrap(),
            ],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        std::fs::read_to_string(&out).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(strip_wall_clock(&a), strip_wall_clock(&b));
    assert_eq!(table_lines(&a).len(), 13);
    let cfg: EstimateConfig = parse(&extract_config(&a).unwrap()).unwrap();
    assert_eq!(cfg.trials, 2);
    assert_eq!(cfg.seed, 7);
}

#[test]
fn estimate_forced_frequencies_have_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = qframe(
        &["estimate", "--trials", "3", "--force-exact-frequencies"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    for m in column(&stdout(&o), "mean_error_sq") {
        assert!(m.parse::<f64>().unwrap() <= 1e-24, "{m}");
    }
}

#[test]
fn estimate_self_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = qframe(
        &[
            "estimate",
            "--trials",
            "400",
            "--shots",
            "10",
            "--self-check",
        ],
        dir.path(),
    );
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains(": pass"));
    let strict = qframe(
        &[
            "estimate",
            "--trials",
            "50",
            "--self-check",
            "--self-check-sigma",
            "1e-6",
        ],
        dir.path(),
    );
    assert_eq!(strict.status.code(), Some(4));
    assert_eq!(table_lines(&stdout(&strict)).len(), 13);
}

#[test]
fn echoed_configs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "estimate",
            "--trials",
            "2",
            "--bloch",
            "0.1,-0.2,0.3",
            "--euler",
            "0.1,0.2,-0.3",
        ],
        vec![
            "qdoc",
            "--solids",
            "4",
            "--shots",
            "3",
            "--rho1-bloch",
            "0,0,-0.5",
            "--q0",
            "0.3",
        ],
        vec![
            "orient-sweep",
            "--solids",
            "tetrahedron",
            "--shots",
            "3",
            "--axes",
            "2",
            "--angles",
            "2",
        ],
        vec![
            "moments", "--p", "0.2,0.8", "--draws", "100", "--traces", "1,1",
        ],
    ];
    for args in cases {
        let first = stdout(&qframe(&args, dir.path()));
        let cfg_text = extract_config(&first).unwrap();
        let cfg_path = dir.path().join("echo.toml");
        std::fs::write(&cfg_path, &cfg_text).unwrap();
        let again = stdout(&qframe(
            &[args[0], "--config", cfg_path.to_str().unwrap()],
            dir.path(),
        ));
        assert_eq!(
            strip_wall_clock(&first),
            strip_wall_clock(&again),
            "{args:?}"
        );
        match args[0] {
            "estimate" => assert_eq!(parse::<EstimateConfig>(&cfg_text).unwrap().trials, 2),
            "qdoc" => assert_eq!(parse::<QdocConfig>(&cfg_text).unwrap().q0, 0.3),
            "orient-sweep" => assert_eq!(parse::<OrientSweepConfig>(&cfg_text).unwrap().axes, 2),
            _ => assert_eq!(parse::<MomentsConfig>(&cfg_text).unwrap().p, vec![0.2, 0.8]),
        }
    }
}

#[test]
fn qdoc_defaults_give_six_curves_and_a_plot() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("q.svg");
    let o = qframe(&["qdoc", "--plot", svg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut cells: Vec<(String, String)> = table_lines(&text)[1..]
        .iter()
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[1].to_string(), c[2].to_string())
        })
        .collect();
    cells.dedup();
    assert_eq!(cells.len(), 6);
    assert!(column(&text, "method").iter().all(|m| m == "exact"));
    let plot = std::fs::read_to_string(svg).unwrap();
    assert_eq!(plot.matches("<polyline").count(), 6);
}

#[test]
fn qdoc_identical_states_give_the_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let o = qframe(
        &["qdoc", "--rho1-angles", "0,0", "--shots", "4"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for (pf, pd) in column(&text, "pf").iter().zip(column(&text, "pd")) {
        assert!((pf.parse::<f64>().unwrap() - pd.parse::<f64>().unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn qdoc_cap_and_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let capped = qframe(&["qdoc", "--solids", "12", "--shots", "30"], dir.path());
    assert_eq!(capped.status.code(), Some(5));
    assert!(stdout(&capped).is_empty());
    let fb = qframe(
        &[
            "qdoc",
            "--solids",
            "12",
            "--shots",
            "30",
            "--monte-carlo-fallback",
            "--monte-carlo-samples",
            "2000",
        ],
        dir.path(),
    );
    assert_eq!(fb.status.code(), Some(0));
    assert!(column(&stdout(&fb), "method")
        .iter()
        .all(|m| m == "monte-carlo"));
}

#[test]
fn orient_sweep_reports_four_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let o = qframe(
        &[
            "orient-sweep",
            "--shots",
            "4",
            "--axes",
            "10",
            "--angles",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("# summary")).count(),
        4
    );
    assert!(text.contains("# reproduction spread non-increasing in M:"));
    // 30 grid rotations per solid, plus identity and the aligned axis for the pair.
    assert_eq!(table_lines(&text).len(), 1 + 30 * 4 + 2);
}

#[test]
fn moments_prints_both_offdiagonal_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = qframe(
        &[
            "moments", "--p", "0.5,0.5", "--shots", "4", "--draws", "5000",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = table_lines(&text)
        .into_iter()
        .find(|l| l.starts_with("0,1,"))
        .unwrap();
    assert!(row.contains("-6.25000000000e-2"));
    assert!(row.contains("-1.87500000000e-1"));
    let bad = qframe(&["moments", "--p", "0.5,0.6"], dir.path());
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn invalid_thread_override_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qframe"))
        .args(["moments", "--draws", "10"])
        .current_dir(dir.path())
        .env("QFRAME_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
