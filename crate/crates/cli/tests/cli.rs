use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistkit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn twist_on_brauer_line_passes() {
    let o = run(&["twist", "--fixture", "brauer_line_3_p2", "--J", "1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("result: PASS"));
}

#[test]
fn circle_closes_and_reports_witness() {
    let o = run(&["circle", "--fixture", "brauer_line_3_p2", "--J", "1,2", "--steps", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("ISOMORPHIC"));
    let j = run(&["circle", "--fixture", "brauer_line_3_p2", "--J", "1,2", "--steps", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert!(v["witness"].is_array());
}

#[test]
fn corrupted_differential_is_located() {
    let o = run(&["resolve", "--fixture", "kxn_p3_n2", "--period", "2", "--corrupt", "-1,0,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("first failure: exactness: not exact at degree"), "{}", stdout(&o));
    assert!(stderr(&o).contains("exactness"));
}

#[test]
fn wrong_sigma_fails_on_a_projective() {
    let o = run(&["twist", "--fixture", "brauer_line_3_p2", "--J", "1,2", "--sigma", "1:1,2:2"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("first failure: X⊗P1 ≅ P1[2]"), "{out}");
}

#[test]
fn wrong_period_fails_the_approximation_criterion() {
    let o = run(&["circle", "--fixture", "brauer_line_3_p2", "--J", "1,2", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("FAIL") && l.contains("approximation criterion at P3")), "{out}");
}

#[test]
fn malformed_relation_reports_position() {
    let dir = std::env::temp_dir().join(format!("twistkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        "[algebra]\nname = \"bad\"\np = 2\n\n[quiver]\nvertices = [\"1\"]\narrows = [[\"x\", \"1\", \"1\"]]\nmax_path_len = 4\nrelations = [\n  \"x*x*q\",\n]\n",
    )
    .unwrap();
    let o = run(&["algebra-check", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 10, column 3"), "{}", stderr(&o));
}

#[test]
fn algebra_check_from_file_finds_the_form() {
    let dir = std::env::temp_dir().join(format!("twistkit-cli-ok-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dual.toml");
    std::fs::write(
        &path,
        "[algebra]\nname = \"dual\"\np = 3\n\n[quiver]\nvertices = [\"1\"]\narrows = [[\"x\", \"1\", \"1\"]]\nmax_path_len = 3\nrelations = [\"x*x\"]\n",
    )
    .unwrap();
    let o = run(&["algebra-check", "--file", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cartan"], serde_json::json!([[2]]));
    assert!(v["gram"].is_array());
}

#[test]
fn bad_subset_is_an_input_error() {
    let o = run(&["twist", "--fixture", "brauer_line_3_p2", "--J", "7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn braid_via_compose() {
    let o = run(&["compose", "--fixture", "brauer_line_3_p3", "--J", "1", "--with-J", "2", "--then-J", "1", "--compare-J", "2,1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn out_writes_the_file() {
    let dir = std::env::temp_dir().join(format!("twistkit-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tilt.json");
    let o = run(&["tilt", "--fixture", "brauer_line_3_p2", "--J", "1,2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["dim"], 12);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["twist", "--fixture", "kxn_p2_n1", "--J", "1", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
