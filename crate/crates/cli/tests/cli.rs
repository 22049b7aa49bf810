use std::process::Command;

use accs_cli::{run, ModelFile, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_PARSE};
use serde_json::Value;

fn accs(args: &[&str]) -> (i32, String) {
    let out = run(std::iter::once("accs").chain(args.iter().copied()));
    assert!(out.code != EXIT_OK || out.stderr.is_empty(), "{}", out.stderr);
    (out.code, out.stdout)
}

fn json(args: &[&str]) -> Value {
    let (code, out) = accs(args);
    assert_eq!(code, EXIT_OK, "{args:?}");
    serde_json::from_str(&out).unwrap()
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("accs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn analyze_examples() {
    let r = json(&["analyze", "--model", "planar_body", "--zero-velocity"]);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["report"]["verdicts"]["accessible"], "yes");
    assert_eq!(r["report"]["method"], "zero-velocity-LM97");

    let r = json(&[
        "analyze",
        "--model",
        "rolling_disk",
        "--inputs",
        "Y1",
        "--velocity-in",
        "span:1.0",
    ]);
    assert_eq!(r["report"]["verdicts"]["accessible"], "no");

    let r = json(&[
        "analyze",
        "--model",
        "rolling_disk",
        "--inputs",
        "Y1,Y2",
        "--velocity-in",
        "span:0.3,0.4",
    ]);
    assert_eq!(r["report"]["verdicts"]["accessible"], "yes");
    assert_eq!(r["report"]["verdicts"]["configuration_accessible"], "yes");
    assert_eq!(r["settings"]["inputs"], serde_json::json!(["Y1", "Y2"]));
    assert_eq!(r["settings"]["caps"]["adz_power"], 8);
}

#[test]
fn explicit_points_and_text_output() {
    let (code, out) = accs(&[
        "analyze",
        "--model",
        "planar_body",
        "--q",
        "0.1,-0.2,0.3",
        "--v",
        "0,1,0",
        "--format",
        "text",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("theta=0.1"), "{out}");
    assert!(out.contains("accessible: yes"), "{out}");
    assert!(out.contains("method: nonzero-restricted"), "{out}");

    let r = json(&["analyze", "--model", "planar_body", "--param", "h=0", "--zero-velocity"]);
    assert_eq!(r["report"]["ranks"]["sym"], 2);
    assert_eq!(r["report"]["parameters"]["h"], 0.0);
    assert!(!r["report"]["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn closure_examples() {
    let r = json(&["closure", "sym", "--model", "planar_body"]);
    assert_eq!(r["rank"], 3);
    let labels: Vec<&str> = r["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["Y1", "Y2", "<Y1:Y2>"]);
    assert_eq!(r["generators"][2]["provenance"]["kind"], "symmetric");

    let r = json(&["closure", "sym", "--model", "rolling_disk", "--inputs", "Y1"]);
    assert_eq!(r["generators"].as_array().unwrap().len(), 1);

    let r = json(&["closure", "lie-of-sym", "--model", "rolling_disk"]);
    assert_eq!(r["rank"], 4);
    let r = json(&["closure", "lie", "--model", "rolling_disk", "--inputs", "Y1"]);
    assert_eq!(r["rank"], 1);
}

#[test]
fn bracket_split_at_a_point() {
    let r = json(&[
        "bracket",
        "[Z,Y1^V]",
        "--model",
        "planar_body",
        "--q",
        "0,0,0",
        "--zero-velocity",
        "--symbolic",
    ]);
    // [Z, Y^V] = -Y^H at rest on a flat connection.
    let hor: Vec<f64> = r["horizontal"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(hor, [0.0, -1.0, 0.0]);
    assert!(r["vertical"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x.as_f64().unwrap() == 0.0));
    assert_eq!(r["symbolic"]["horizontal"][1], "-cos(theta)/m");

    let (code, _) = accs(&["bracket", "[Z,Y9^V]", "--model", "planar_body"]);
    assert_eq!(code, EXIT_PARSE);
    let r = json(&[
        "bracket",
        "<Y1:Y2>^V",
        "--model",
        "planar_body",
        "--q",
        "0,0,0",
        "--zero-velocity",
    ]);
    assert_eq!(r["word"], "<Y1:Y2>^V");
}

#[test]
fn reach_examples() {
    let r = json(&[
        "reach",
        "--model",
        "planar_body",
        "--zero-velocity",
        "--samples",
        "64",
        "--horizon",
        "0.5",
    ]);
    assert_eq!(r["dim_tq"], 6);
    assert_eq!(r["dim_q"], 3);

    let csv = std::env::temp_dir().join(format!("accs-reach-{}.csv", std::process::id()));
    let r = json(&[
        "reach",
        "--model",
        "rolling_disk",
        "--inputs",
        "Y1",
        "--velocity-in",
        "span:1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(r["dim_tq"].as_u64().unwrap() <= 2);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,y,theta,phi,v_x,v_y,v_theta,v_phi");
    assert_eq!(text.lines().count(), 65);
    std::fs::remove_file(csv).ok();

    let file = write_temp(
        "still.toml",
        r#"
name = "still"
coordinates = [{ name = "a" }, { name = "b" }]
christoffels = []
"#,
    );
    let r = json(&[
        "reach",
        "--model",
        file.to_str().unwrap(),
        "--zero-velocity",
        "--samples",
        "8",
    ]);
    assert_eq!(r["dim_tq"], 0);
}

#[test]
fn export_parse_analyze_round_trip() {
    for name in ["planar_body", "rolling_disk"] {
        let (code, text) = accs(&["models", "export", name]);
        assert_eq!(code, EXIT_OK);
        let parsed = ModelFile::parse(&text).unwrap();
        assert_eq!(parsed.to_toml(), text);
        let path = write_temp(&format!("{name}.toml"), &text);
        for point in [vec!["--zero-velocity"], vec!["--velocity-in", "span:0.3,0.4"]] {
            let mut a = vec!["analyze", "--model", name];
            a.extend(&point);
            let mut b = vec!["analyze", "--model", path.to_str().unwrap()];
            b.extend(&point);
            assert_eq!(accs(&a), accs(&b), "{name} {point:?}");
        }
    }
}

#[test]
fn christoffel_file_with_named_points() {
    // Polar-plane connection: Γ^r_{θθ} = -r, Γ^θ_{rθ} = Γ^θ_{θr} = 1/r.
    let file = write_temp(
        "polar.toml",
        r#"
name = "polar"
coordinates = [{ name = "r" }, { name = "th", angle = true }]
parameters = [{ name = "k", default = 2.0 }]

[[christoffels]]
upper = 0
lower = [1, 1]
value = "-r"

[[christoffels]]
upper = 1
lower = [0, 1]
value = "1/r"

[[christoffels]]
upper = 1
lower = [1, 0]
value = "1/r"

[[inputs]]
name = "radial"
field = ["k", "0"]

[[points]]
name = "here"
q = [1.5, 0.2]
v = [0.0, 0.0]
"#,
    );
    let path = file.to_str().unwrap();
    let r = json(&["analyze", "--model", path, "--point", "here"]);
    assert_eq!(r["report"]["point"]["q"]["r"], 1.5);
    assert_eq!(r["report"]["parameters"]["k"], 2.0);
    assert_eq!(r["report"]["ranks"]["sym"], 1);
    assert_eq!(r["report"]["verdicts"]["accessible"], "no");

    let back = ModelFile::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    let system = back.build().unwrap();
    let again = ModelFile::export(&system);
    assert_eq!(again.christoffels.as_ref().unwrap().len(), 3);

    let (code, _) = accs(&["analyze", "--model", path, "--point", "nowhere"]);
    assert_eq!(code, EXIT_PARSE);
    let (code, _) = accs(&["analyze", "--model", path, "--param", "q=1"]);
    assert_eq!(code, EXIT_PARSE);
}

#[test]
fn malformed_inputs_exit_with_parse_code() {
    let bad = write_temp(
        "bad.toml",
        "name = \"x\"\ncoordinates = [{ name = \"a\" }]\nmetric = [[\"1\"]]\nfoo = 1\n",
    );
    let (code, _) = accs(&["analyze", "--model", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_PARSE);
    let two = write_temp(
        "two.toml",
        "name = \"x\"\ncoordinates = [{ name = \"a\" }]\nmetric = [[\"1\"]]\nchristoffels = []\n",
    );
    let (code, _) = accs(&["analyze", "--model", two.to_str().unwrap()]);
    assert_eq!(code, EXIT_PARSE);
    let expr = write_temp(
        "expr.toml",
        "name = \"x\"\ncoordinates = [{ name = \"a\" }]\nmetric = [[\"1 +\"]]\n",
    );
    let (code, _) = accs(&["analyze", "--model", expr.to_str().unwrap()]);
    assert_eq!(code, EXIT_PARSE);

    for args in [
        vec!["analyze", "--model", "planar_body", "--q", "1,2"],
        vec!["analyze", "--model", "planar_body", "--velocity-in", "1,2"],
        vec!["analyze", "--model", "planar_body", "--velocity-in", "span:1,2,3,4"],
        vec!["analyze", "--model", "planar_body", "--inputs", "Y7"],
        vec!["analyze", "--model", "planar_body", "--zero-velocity", "--v", "0,0,0"],
        vec!["analyze"],
        vec!["models", "export", "hovercraft"],
    ] {
        assert_eq!(accs(&args).0, EXIT_PARSE, "{args:?}");
    }
}

#[test]
fn inconclusive_only_reports_exit_three() {
    // v outside the symmetric closure: rank-only method, and with the
    // bracket caps at zero nothing reaches full rank.
    let (code, out) = accs(&[
        "analyze",
        "--model",
        "rolling_disk",
        "--inputs",
        "Y1",
        "--q",
        "0,0,0.3,0",
        "--v",
        "1,0,0,0",
        "--adz-cap",
        "1",
        "--bracket-cap",
        "1",
    ]);
    assert_eq!(code, EXIT_INCONCLUSIVE, "{out}");
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["report"]["method"], "rank-only");
}

#[test]
fn seed_comes_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_accs");
    let run_with = |seed: Option<&str>| {
        let mut c = Command::new(bin);
        c.args(["analyze", "--model", "planar_body", "--zero-velocity"]);
        match seed {
            Some(s) => c.env("ACCS_SEED", s),
            None => c.env_remove("ACCS_SEED"),
        };
        let out = c.output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run_with(Some("17"));
    let r: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(r["settings"]["seed"], 17);
    assert_eq!(a, run_with(Some("17")));
    assert_ne!(a, run_with(None));

    let out = Command::new(bin).args(["models", "export", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PARSE));
}
