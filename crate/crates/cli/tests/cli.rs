use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_expfam-div"));
    c.env_remove("EXPFAM_DIV_SEED");
    c
}

fn write_job(dir: &TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("job.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], job: Option<&str>) -> (Output, TempDir) {
    let dir = TempDir::new().unwrap();
    let mut c = bin();
    c.args(args);
    if let Some(body) = job {
        c.arg(write_job(&dir, body));
    }
    (c.output().unwrap(), dir)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn grid(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(String::from).collect())
        .collect()
}

const EXPONENTIAL: &str = r#"{"family": "exponential",
    "densities": [{"name": "l1", "params": {"rate": 1}}, {"name": "l3", "params": {"rate": 3}}],
    "measures": [{"kind": "bhat"}]}"#;

#[test]
fn lists_the_catalog() {
    let (o, _d) = run(&["list-families"], None);
    assert!(o.status.success());
    let ids: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert!(ids.len() >= 14);
    for id in ["poisson", "gaussian1d", "mvn", "wishart"] {
        assert!(ids.iter().any(|i| i == id), "{id}");
    }
}

#[test]
fn coefficient_of_two_exponentials() {
    let (o, _d) = run(&["compute"], Some(EXPONENTIAL));
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "value").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][col], "0.866025403784");
}

#[test]
fn verify_one_family() {
    let (o, _d) = run(&["verify", "--family", "poisson"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
    let (o, _d) = run(&["verify", "--family", "nope"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn self_divergence_matrix_is_zero() {
    let job = r#"{"family": "exponential", "densities": [{"name": "x", "params": {"rate": 2.5}}], "measures": [{"kind": "kl"}]}"#;
    let (o, _d) = run(&["matrix"], Some(job));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "kl,x\nx,0\n");
}

const GAMMAS: &str = r#"{"family": "gamma",
    "densities": [{"name": "a", "params": {"shape": 1.5, "rate": 2}},
                  {"name": "b", "params": {"shape": 3, "rate": 0.5}},
                  {"name": "c", "params": {"shape": 0.7, "rate": 1}},
                  {"name": "d", "params": {"shape": 9, "rate": 4}}],
    "measures": [{"kind": "hellinger"}, {"kind": "bhat"}, {"kind": "kl"}]}"#;

#[test]
fn matrices_have_the_documented_structure() {
    let (o, _d) = run(&["matrix"], Some(GAMMAS));
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let blocks: Vec<&str> = text.split("\n\n").collect();
    assert_eq!(blocks.len(), 3);
    assert!(blocks[0].starts_with("hellinger,a,b,c,d\n"));
    let h = grid(blocks[0]);
    let b = grid(blocks[1]);
    let k = grid(blocks[2]);
    for i in 0..4 {
        assert_eq!(b[i][i], "1");
        assert_eq!(k[i][i], "0");
        for (j, row) in h.iter().enumerate() {
            assert_eq!(h[i][j], row[i]);
        }
    }
    assert_ne!(k[0][1], k[1][0]);
    // rerunning gives byte-identical output
    let (again, _d) = run(&["matrix"], Some(GAMMAS));
    assert_eq!(stdout(&again), text);
}

#[test]
fn kl_cells_read_row_to_column() {
    let job = r#"{"family": "exponential", "densities": [{"name": "a", "params": {"rate": 1}}, {"name": "b", "params": {"rate": 2}}],
                  "measures": [{"kind": "kl"}]}"#;
    let (o, _d) = run(&["matrix"], Some(job));
    let k = grid(&stdout(&o));
    // D[Exp(1) : Exp(2)] = 1 − log 2
    assert_eq!(k[0][1], "0.30685281944");
    assert_eq!(k[1][0], "0.19314718056");
}

#[test]
fn json_output_mirrors_results() {
    let job = r#"{"family": "poisson", "densities": [{"name": "a", "params": {"rate": 1}}, {"name": "b", "params": {"rate": 4}}],
                  "measures": [{"kind": "bhat"}, {"kind": "kl", "method": "limit"}], "output": {"format": "json"}}"#;
    let (o, _d) = run(&["compute"], Some(job));
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["results"];
    assert_eq!(v["family"], "poisson");
    assert_eq!(r[0]["measure"], "bhat");
    assert_eq!(r[0]["value"].as_f64().unwrap(), 0.606530659713);
    assert_eq!(r[0]["method"], "closed_form");
    assert_eq!(r[0]["alpha_used"].as_f64().unwrap(), 0.5);
    assert_eq!(r[0]["omega_used"][0].as_f64().unwrap(), 0.0);
    assert_eq!(r[1]["method"], "limit");
    assert!(r[1]["residual"].is_number());
    for key in ["value", "method", "alpha_used", "omega_used", "residual"] {
        assert!(r[1].get(key).is_some(), "{key}");
    }
}

#[test]
fn output_path_is_written() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.csv");
    let job = EXPONENTIAL.replace(
        r#""measures""#,
        &format!(r#""output": {{"path": {:?}}}, "measures""#, out.display().to_string()),
    );
    let o = bin().arg("compute").arg(write_job(&dir, &job)).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    assert!(std::fs::read_to_string(out).unwrap().contains("0.866025403784"));
}

#[test]
fn bad_input_exits_2_with_the_json_path() {
    let cases = [
        (
            r#"{"family": "exponential", "densities": [{"name": "a", "params": {"rate": -1}}], "measures": [{"kind": "kl"}]}"#,
            "densities[0].params",
        ),
        (
            r#"{"family": "exponential", "densities": [{"name": "a", "params": {"rate": 1}}, {"name": "b", "params": {"rate": 2}}], "measures": [{"kind": "bhat", "alpha": 0}]}"#,
            "measures[0].alpha",
        ),
        (
            r#"{"family": "exponential", "densities": [{"name": "a", "params": {"rat": 1}}], "measures": []}"#,
            "densities[0].params.rat",
        ),
        (
            r#"{"family": "mvn", "densities": [{"name": "a", "params": {"mean": [0], "covariance": [1]}}], "measures": [{"kind": "kl"}]}"#,
            "densities[0].params.mean",
        ),
        (
            r#"{"family": "exponential", "densities": [], "measures": [], "extra": 1}"#,
            "extra",
        ),
        (
            r#"{"family": "exponential", "densities": [{"name": "a", "params": {"rate": 1}}], "measures": [{"kind": "kl", "oracle": {"mc_samples": 5}}]}"#,
            "measures[0].oracle",
        ),
        (
            r#"{"family": "exponential", "densities": [{"name": "a", "params": {"rate": 1}}], "measures": [{"kind": "hellinger", "omega": -1}]}"#,
            "measures[0].omega",
        ),
        ("{not json", "$"),
    ];
    for (job, path) in cases {
        let (o, _d) = run(&["compute"], Some(job));
        assert_eq!(o.status.code(), Some(2), "{job}");
        assert!(stderr(&o).contains(path), "{path} not in {}", stderr(&o));
    }
    let (o, _d) = run(&["compute", "/nonexistent/job.json"], None);
    assert_eq!(o.status.code(), Some(2));
    let (o, _d) = run(&["frobnicate"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_3() {
    let job = r#"{"family": "gamma", "densities": [{"name": "a", "params": {"shape": 0.3, "rate": 2}}, {"name": "b", "params": {"shape": 40, "rate": 0.1}}],
                  "measures": [{"kind": "kl", "method": "quadrature", "oracle": {"max_subdivisions": 1}}]}"#;
    let (o, _d) = run(&["compute"], Some(job));
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn seed_variable_drives_monte_carlo_measures() {
    let job = r#"{"family": "exponential", "densities": [{"name": "a", "params": {"rate": 1}}, {"name": "b", "params": {"rate": 3}}],
                  "measures": [{"kind": "jsd", "oracle": {"mc_samples": 2000}}]}"#;
    let dir = TempDir::new().unwrap();
    let path = write_job(&dir, job);
    let with = |seed: Option<&str>| {
        let mut c = bin();
        if let Some(s) = seed {
            c.env("EXPFAM_DIV_SEED", s);
        }
        c.arg("compute").arg(&path).output().unwrap()
    };
    let (base, a, a2, b) = (with(None), with(Some("7")), with(Some("7")), with(Some("8")));
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&a2));
    assert_ne!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&base));
    assert_eq!(with(Some("seven")).status.code(), Some(2));
}

#[test]
fn help_documents_the_direction_convention() {
    let (o, _d) = run(&["matrix", "--help"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("kl(a,b) = D_KL[p_a : p_b]"));
}
