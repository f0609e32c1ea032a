use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn meso(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meso"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn table2() -> String {
    data("table2.json").to_string_lossy().into_owned()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn metrics_prints_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = meso(&["metrics", &table2()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.starts_with("epsilon=0.0343 d="), "{line}");
    assert!(line.trim_end().ends_with("N=27"), "{line}");
}

#[test]
fn generate_writes_the_retained_cells() {
    let dir = tempfile::tempdir().unwrap();
    let o = meso(&["generate", "--n1", "1000", "--beta", "0.09", "--material", "Aluminum", "-o", "c.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("c.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["inclusions"].as_array().unwrap().len(), 304);
    let m = meso(&["metrics", "c.json"], dir.path());
    assert!(stdout(&m).trim_end().ends_with("N=304"));
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = meso(&["metrics", "--bogus", &table2()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(meso(&["metrics", "missing.json"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("bad.json"), "{\n  \"domain\": 3,\n}").unwrap();
    let o = meso(&["metrics", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    let o = meso(&["generate", "--n1", "1000", "--beta", "0.09", "--material", "Unobtainium"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(meso(&[], dir.path()).status.code(), Some(2));
}

#[test]
fn inadmissible_clusters_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let overlap = r#"{
  "domain": {"type": "full_space", "matrix_material": "Structural Steel"},
  "inclusions": [
    {"center": [0, 0, 0], "radius": 0.2, "material": "Aluminum"},
    {"center": [0.3, 0, 0], "radius": 0.2, "material": "Aluminum"}
  ],
  "background": {"type": "linear_x"}
}"#;
    fs::write(dir.path().join("o.json"), overlap).unwrap();
    assert_eq!(meso(&["validate", "o.json"], dir.path()).status.code(), Some(1));
    assert_eq!(meso(&["solve", "o.json"], dir.path()).status.code(), Some(1));
    let o = meso(&["generate", "--n1", "999", "--beta", "0.09", "--material", "Aluminum"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_reports_admissible_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let o = meso(&["validate", &table2()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = meso(&["validate", &table2(), "--ratio", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn outputs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = table2();
    for (threads, tag) in [("1", "a"), ("3", "b")] {
        let coeffs = format!("c_{tag}.csv");
        let o = meso(&["--threads", threads, "solve", &t2, "-o", &coeffs], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let plane = format!("p_{tag}.csv");
        let args = [
            "--threads", threads, "eval-plane", &t2, &coeffs, "--axis", "z", "--offset", "2.5", "--bounds", "x:1.5:3.5",
            "y:1.5:3.5", "--res", "10x10", "-o", &plane,
        ];
        assert_eq!(meso(&args, dir.path()).status.code(), Some(0));
        let neumann = format!("n_{tag}.csv");
        let o = meso(&["--threads", threads, "solve", &t2, "--method", "neumann", "-o", &neumann], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["c", "p", "n"] {
        let a = fs::read(dir.path().join(format!("{name}_a.csv"))).unwrap();
        let b = fs::read(dir.path().join(format!("{name}_b.csv"))).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let plane = fs::read_to_string(dir.path().join("p_a.csv")).unwrap();
    let mut lines = plane.lines();
    assert_eq!(lines.next(), Some("x,y,z,u,gx,gy,gz,gnorm,region"));
    assert_eq!(lines.count(), 100);
    let coeffs = fs::read_to_string(dir.path().join("c_a.csv")).unwrap();
    assert!(coeffs.starts_with("index,cx,cy,cz,method,residual\n0,"));
    assert_eq!(coeffs.lines().count(), 28);
}

#[test]
fn line_outside_the_ball_is_nan() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = table2();
    assert_eq!(meso(&["solve", &t2, "-o", "c.csv"], dir.path()).status.code(), Some(0));
    let o = meso(&["eval-line", &t2, "c.csv", "--from", "-8,0,0", "--to", "0,0,0", "--samples", "9"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0], "-8,0,0,nan,nan,nan,nan,nan,nan");
    assert!(rows[8].ends_with(",-1"));
}

#[test]
fn check_passes_solved_and_fails_perturbed_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = table2();
    assert_eq!(meso(&["solve", &t2, "-o", "c.csv"], dir.path()).status.code(), Some(0));
    let o = meso(&["check", &t2, "c.csv", "--samples", "50"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["n"], 27);

    let text = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let perturbed = text.replacen("\n0,-", "\n0,-1", 1);
    assert_ne!(perturbed, text);
    fs::write(dir.path().join("bad.csv"), perturbed).unwrap();
    let o = meso(&["check", &t2, "bad.csv", "--samples", "50"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let short: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("short.csv"), short).unwrap();
    assert_eq!(meso(&["check", &t2, "short.csv"], dir.path()).status.code(), Some(1));
}

#[test]
fn dumped_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--dump-config", "generate", "--n1", "1000", "--beta", "0.05", "--material", "Copper", "-o", "g.json"];
    let o = meso(&args, dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join("g.json").exists());
    fs::write(dir.path().join("run.json"), stdout(&o)).unwrap();
    assert_eq!(meso(&["--config", "run.json"], dir.path()).status.code(), Some(0));
    let from_config = fs::read(dir.path().join("g.json")).unwrap();
    let direct = meso(&["generate", "--n1", "1000", "--beta", "0.05", "--material", "Copper"], dir.path());
    assert_eq!(direct.stdout, from_config);
}

#[test]
fn bundled_generator_configs_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = data("generate_n1000.json");
    let o = meso(&["--config", config.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("cluster_n1000.json").exists());
    for n in ["5832", "13824"] {
        let text = fs::read_to_string(data(&format!("generate_n{n}.json"))).unwrap();
        assert!(text.contains(&format!("\"n1\": {n}")));
    }
}

#[test]
fn homog_compare_reports_sup_gap() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["homog-compare", "--n1", "1000", "--beta", "0.09", "--material", "Aluminum", "--samples", "101", "-o", "cmp.csv"];
    let o = meso(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("sup_gap="));
    let text = fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x1,u_minus_wf_system,u_minus_wf_homog");
    assert_eq!(lines.len(), 103);
    assert!(lines[1].starts_with("-1.5,"));
    assert!(lines[102].starts_with("sup_gap="));
}

#[test]
fn help_lists_subcommands_and_units() {
    let dir = tempfile::tempdir().unwrap();
    let o = meso(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let help = stdout(&o);
    for sub in ["metrics", "generate", "validate", "solve", "eval-plane", "eval-line", "homog-compare", "check"] {
        assert!(help.contains(sub), "missing {sub}");
    }
    assert!(help.contains("GPa"));
}
