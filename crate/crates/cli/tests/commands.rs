use std::path::Path;
use std::process::{Command, Output};

use linfb_cli::parse_region;
use linfb_core::mimo::{random_design, ChannelSpec, DesignForm, Direction};
use linfb_core::siso::{mac_siso_sum_capacity, rho_star};

fn linfb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linfb")).args(args).env_remove("LINFB_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .and_then(|v| v.split_whitespace().next())
        .unwrap_or_else(|| panic!("{key} missing in {text}"))
        .parse()
        .unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn rho_star_examples() {
    let o = linfb(&["rho-star", "--h1", "1", "--h2", "1", "--p1", "0", "--p2", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "rho"), 0.0);

    let o = linfb(&["rho-star", "--h1", "1", "--h2", "1", "--p1", "5", "--p2", "5"]);
    let out = stdout(&o);
    assert!((value(&out, "rho") - rho_star(1.0, 1.0, 5.0, 5.0)).abs() < 1e-15);
    assert!(value(&out, "residual") < 1e-12);

    let o = linfb(&["rho-star", "--h1", "1", "--h2", "1", "--p1", "5", "--p2", "-5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--p2"), "{}", stderr(&o));
}

#[test]
fn validation_errors_name_the_flag() {
    for (args, flag) in [
        (vec!["region", "--h1", "1", "--h2", "1", "--power", "0"], "--power"),
        (vec!["region", "--h1", "1", "--h2", "1", "--power", "1", "--alpha-grid", "1"], "--alpha-grid"),
        (vec!["region", "--model", "simo", "--h1", "1,2", "--h2", "1", "--power", "1"], "--h2"),
        (vec!["search", "--h1", "1", "--h2", "x", "--power", "1", "--eta", "2"], "--h2"),
        (vec!["search", "--h1", "1", "--h2", "1", "--power", "1", "--eta", "7"], "--eta"),
        (vec!["sum-capacity", "--model", "k-user", "--variant", "other", "--power", "1"], "--variant"),
        (vec!["duality-check", "--dims", "2y2"], "--dims"),
    ] {
        let o = linfb(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_linfb"))
        .args(["rho-star", "--h1", "1", "--h2", "1", "--p1", "1", "--p2", "1"])
        .env("LINFB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("LINFB_THREADS"));
}

#[test]
fn sum_capacity_examples() {
    let o = linfb(&["sum-capacity", "--model", "siso", "--h1", "0", "--h2", "1", "--power", "10"]);
    assert!((value(&stdout(&o), "sum_capacity") - 0.5 * 11f64.log2()).abs() < 1e-12);

    let siso = value(&stdout(&linfb(&["sum-capacity", "--h1", "1", "--h2", "1", "--power", "10"])), "sum_capacity");
    let o = linfb(&["sum-capacity", "--model", "k-user", "--k", "2", "--variant", "exponent-K", "--power", "10"]);
    assert!((value(&stdout(&o), "sum_capacity") - siso).abs() < 1e-8);

    let o = linfb(&["sum-capacity", "--model", "k-user", "--k", "2", "--variant", "printed", "--power", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("residual_at_1") && out.contains("residual_at_k"), "{out}");
    assert!(!out.contains("sum_capacity"));

    let bc = linfb(&["sum-capacity", "--channel", "bc", "--h1", "0.3", "--h2", "1.2", "--power", "4"]);
    assert_eq!(value(&stdout(&bc), "sum_capacity"), mac_siso_sum_capacity(0.3, 1.2, 4.0).unwrap());
}

#[test]
fn miso_with_norm_gain_equals_siso() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "miso.csv"), path(dir.path(), "siso.csv"));
    assert!(linfb(&["region", "--model", "miso", "--h1", "3,4", "--h2", "1", "--power", "2", "--output", &a]).status.success());
    assert!(linfb(&["region", "--h1", "5", "--h2", "1", "--power", "2", "--output", &b]).status.success());
    let ra = parse_region(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let rb = parse_region(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(ra.len(), rb.len());
    for (p, q) in ra.points.iter().zip(&rb.points) {
        assert!((p.0 - q.0).abs() < 1e-10 && (p.1 - q.1).abs() < 1e-10);
    }
}

#[test]
fn bc_region_files_match_dual_mac_files() {
    let dir = tempfile::tempdir().unwrap();
    for (bc_model, mac_model, h1, h2) in [("siso", "siso", "0.6", "1.3"), ("miso", "simo", "1,0.5", "0.2,-1"), ("simo", "miso", "1,2", "0.5")] {
        let (a, b) = (path(dir.path(), "bc.csv"), path(dir.path(), "mac.csv"));
        let common = ["--h1", h1, "--h2", h2, "--power", "3", "--alpha-grid", "21", "--rho-grid", "21"];
        assert!(linfb(&[&["region", "--channel", "bc", "--model", bc_model, "--output", &a][..], &common].concat()).status.success());
        assert!(linfb(&[&["region", "--channel", "mac", "--model", mac_model, "--output", &b][..], &common].concat()).status.success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{bc_model}");
    }
    let o = linfb(&["region", "--channel", "bc", "--h1", "1", "--h2", "1", "--power", "3", "--format", "json"]);
    let f = parse_region(&stdout(&o)).unwrap();
    assert_eq!(f.meta.get("via").map(String::as_str), Some("duality"));
}

#[test]
fn region_files_round_trip_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["csv", "json"] {
        let a = path(dir.path(), &format!("a.{fmt}"));
        let b = path(dir.path(), &format!("b.{fmt}"));
        let args = ["region", "--h1", "0.7", "--h2", "1.1", "--power", "6", "--format", fmt, "--output", &a];
        assert!(linfb(&args).status.success());
        assert!(linfb(&["convert", "--input", &a, "--format", fmt, "--output", &b]).status.success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{fmt}");
    }
    let csv = std::fs::read_to_string(path(dir.path(), "a.csv")).unwrap();
    assert!(csv.starts_with("R1,R2\n"));
    for field in csv.lines().skip(2).take(5).flat_map(|l| l.split(',')) {
        let significant = field.trim_start_matches(['0', '.']).chars().filter(char::is_ascii_digit).count();
        assert_eq!(significant, 12, "{field}");
    }
}

#[test]
fn svg_output_has_a_frontier_polyline() {
    let o = linfb(&["region", "--h1", "1", "--h2", "1", "--power", "10", "--format", "svg", "--alpha-grid", "11"]);
    let svg = stdout(&o);
    assert!(svg.contains("<svg") && svg.contains("version=\"1.1\"") && svg.contains("<polyline"));
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn duality_check_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = path(dir.path(), "report.json");
    let o = linfb(&["duality-check", "--eta", "1", "--trials", "10", "--output", &report]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    for run in r["runs"].as_array().unwrap() {
        let w = &run["batch"]["worst"];
        for key in ["residual_s_eq_eqe", "residual_channel_identity", "residual_trace_equality"] {
            assert_eq!(w[key].as_f64().unwrap(), 0.0, "{key}");
        }
    }

    let o = linfb(&["duality-check", "--eta", "3", "--trials", "5", "--corrupt"]);
    assert_eq!(o.status.code(), Some(1));
    let worst = stdout(&o).lines().find_map(|l| l.strip_prefix("worst: ").map(str::to_string)).unwrap();
    let (name, rest) = worst.split_once(" = ").unwrap();
    assert!(["s_eq_eqe", "channel_identity", "trace_equality"].contains(&name), "{worst}");
    assert!(rest.split_whitespace().next().unwrap().parse::<f64>().unwrap() > 1e-6);
}

#[test]
fn search_is_reproducible_and_simulate_accepts_its_design() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let d = path(dir.path(), sub);
        let o = linfb(&["search", "--h1", "1", "--h2", "0.8", "--power", "5", "--eta", "2", "--trials", "20", "--seed", "3", "--output-dir", &d]);
        assert!(o.status.success(), "{}", stderr(&o));
        d
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["design.json", "frontier.csv", "frontier.json"] {
        let fa = std::fs::read(Path::new(&a).join(f)).unwrap();
        assert_eq!(fa, std::fs::read(Path::new(&b).join(f)).unwrap(), "{f}");
    }
    let design = path(Path::new(&a), "design.json");
    let o = linfb(&["simulate", "--h1", "1", "--h2", "0.8", "--power", "5", "--design", &design, "--trials", "20000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(value(&stdout(&o), "identity_residual") < 1e-9);
}

#[test]
fn simulate_checks_output_feedback_designs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ChannelSpec::new(
        linfb_core::DenseMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.4, 0.8]),
        linfb_core::DenseMatrix::from_row_slice(1, 2, &[0.6, 1.0]),
        2.0,
        Direction::Bc,
    )
    .unwrap();
    let d = random_design(&spec, 3, DesignForm::A, 0.3, 7).unwrap();
    let file = path(dir.path(), "a.json");
    std::fs::write(&file, d.to_json()).unwrap();
    let report = path(dir.path(), "report.json");
    let args = ["simulate", "--channel", "bc", "--h1", "1,0.3;-0.4,0.8", "--h2", "0.6,1", "--power", "2"];
    let o = linfb(&[&args[..], &["--design", &file, "--trials", "20000", "--output", &report]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(value(&stdout(&o), "recursion_max_error") < 1e-10);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["power"]["form"], "A");

    // same file against a channel of the wrong shape
    let o = linfb(&["simulate", "--channel", "bc", "--h1", "1", "--h2", "1", "--power", "2", "--design", &file]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--design"), "{}", stderr(&o));
}
