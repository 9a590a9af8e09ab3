use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use tcvm::{normal, parse_spec, CriticalValueTable, Provenance, QuadratureConfig, ScaleEstimator};

fn tcvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcvm"))
        .args(args)
        .env_remove("TCVM_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_values(dir: &Path, name: &str, values: &[f64]) -> String {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    for v in values {
        writeln!(f, "{v}").unwrap();
    }
    path.to_str().unwrap().to_string()
}

/// Field `name` of a two-line CSV report.
fn field(csv: &str, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].to_string()
}

fn draws(spec: &str, n: usize, seed: u64) -> Vec<f64> {
    parse_spec(spec)
        .unwrap()
        .sample(n, seed)
        .unwrap()
        .into_values()
}

#[test]
fn tables_prints_embedded_rows() {
    let out = tcvm(&["tables"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 197);
    assert_eq!(lines[0], "n,0.15,0.1,0.075,0.05,0.025,0.01,0.001,a_n,C_n");
    assert_eq!(
        lines[1],
        "10,0.7547,0.8525,0.9259,1.0203,1.1917,1.4128,1.9025,1.2816,28.5798"
    );
    assert!(lines
        .iter()
        .find(|l| l.starts_with("200,"))
        .unwrap()
        .ends_with(",2.5758,6160.6415"));
    assert_eq!(text, stdout(&tcvm(&["tables"])));

    let back =
        CriticalValueTable::from_csv(&text, Provenance::Published, ScaleEstimator::Unbiased)
            .unwrap();
    assert_eq!(&back, CriticalValueTable::embedded());
}

#[test]
fn tables_json() {
    let out = tcvm(&["tables", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["scale"], "unbiased");
    assert_eq!(v["provenance"]["kind"], "published");
}

#[test]
fn lognormal_sample_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_values(dir.path(), "ln.txt", &draws("Lognormal", 50, 7));
    let out = tcvm(&["test", &file]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "reject"), "true");
    assert_eq!(field(&text, "n"), "50");
    assert_eq!(field(&text, "critical_value"), "1.6897");
    assert_eq!(text, stdout(&tcvm(&["test", &file])));
}

#[test]
fn acceptance_is_also_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_values(dir.path(), "n.txt", &draws("Normal", 40, 3));
    let out = tcvm(&["test", &file, "--alpha", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(field(&stdout(&out), "reject"), "false");
}

#[test]
fn location_scale_does_not_change_t_star() {
    let dir = tempfile::tempdir().unwrap();
    let x = draws("Normal(5,2)", 50, 11);
    let mean = x.iter().sum::<f64>() / 50.0;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 50.0).sqrt();
    let y: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
    let a = stdout(&tcvm(&["test", &write_values(dir.path(), "x.txt", &x)]));
    let b = stdout(&tcvm(&["test", &write_values(dir.path(), "y.txt", &y)]));
    let (ta, tb): (f64, f64) = (
        field(&a, "t_star").parse().unwrap(),
        field(&b, "t_star").parse().unwrap(),
    );
    assert!((ta - tb).abs() < 1e-9 * ta.abs().max(1.0), "{ta} vs {tb}");
    assert_eq!(field(&a, "k"), field(&b, "k"));
}

#[test]
fn csv_input_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let x = draws("Normal", 30, 5);
    let plain = write_values(dir.path(), "plain.txt", &x);
    let path = dir.path().join("with_header.csv");
    let mut body = String::from("value\n");
    for v in &x {
        body.push_str(&format!("{v},\n"));
    }
    std::fs::write(&path, body).unwrap();
    assert_eq!(
        stdout(&tcvm(&["test", &plain])),
        stdout(&tcvm(&["test", path.to_str().unwrap()]))
    );
}

#[test]
fn non_numeric_line_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "value\n1.0\n2.0\n3.5\nabc\n4.0\n").unwrap();
    let out = tcvm(&["test", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));
}

#[test]
fn degenerate_inputs_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let constant = write_values(dir.path(), "c.txt", &[2.0; 20]);
    assert_eq!(tcvm(&["test", &constant]).status.code(), Some(3));
    let tiny = write_values(dir.path(), "t.txt", &[1.0, 2.0]);
    assert_eq!(tcvm(&["test", &tiny]).status.code(), Some(3));
    let short = write_values(dir.path(), "s.txt", &[1.0, 2.0, 4.0, 3.0, 7.0]);
    let out = tcvm(&["test", &short]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("--simulate"));
}

#[test]
fn simulate_covers_small_samples() {
    let dir = tempfile::tempdir().unwrap();
    let short = write_values(dir.path(), "s.txt", &[1.0, 2.0, 4.0, 3.0, 7.0, 5.5]);
    let args = [
        "test",
        short.as_str(),
        "--simulate",
        "--reps",
        "2000",
        "--seed",
        "4",
    ];
    let out = tcvm(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "critical_source"), "simulated");
    assert_eq!(text, stdout(&tcvm(&args)));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tcvm(&["test"]).status.code(), Some(2));
    assert_eq!(
        tcvm(&["test", "/nonexistent/file.txt"]).status.code(),
        Some(2)
    );
    assert_eq!(
        tcvm(&["critvals", "--n-range", "12..10"]).status.code(),
        Some(2)
    );
    assert_eq!(
        tcvm(&["critvals", "--n-range", "ten"]).status.code(),
        Some(2)
    );
    let out = tcvm(&["power", "--alt", "Cauchy(1)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown distribution family"));
    assert_eq!(
        tcvm(&["power", "--alt", "Beta(-1,2)"]).status.code(),
        Some(2)
    );
}

#[test]
fn user_table_overrides_embedded() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.csv");
    std::fs::write(
        &table,
        "n,0.05,a_n,C_n\n30,100,1.8339,222.7\n40,101,1.96,300\n",
    )
    .unwrap();
    let data = write_values(dir.path(), "x.txt", &draws("Lognormal", 30, 1));
    let out = tcvm(&["test", &data, "--table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "critical_value"), "100");
    assert_eq!(field(&text, "reject"), "false");

    std::fs::write(&table, "n,0.05,a_n,C_n\n30,oops,1.8339,222.7\n").unwrap();
    let out = tcvm(&["test", &data, "--table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn critvals_shape_and_deterministic_columns() {
    let args = [
        "critvals",
        "--n-range",
        "10..12",
        "--reps",
        "1000",
        "--seed",
        "9",
    ];
    let text = stdout(&tcvm(&args));
    assert_eq!(text, stdout(&tcvm(&args)));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.split(',').count() == 10));
    let other = stdout(&tcvm(&[
        "critvals",
        "--n-range",
        "10..12",
        "--reps",
        "500",
        "--seed",
        "1",
    ]));

    let cfg = QuadratureConfig::default();
    for (line, other) in lines[1..].iter().zip(other.lines().skip(1)) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let n = cells[0] as usize;
        assert_eq!(cells[8], normal::endpoint(n).unwrap().a_n);
        assert_eq!(cells[9], normal::c_n(n, &cfg).unwrap());
        let tail: Vec<&str> = line.split(',').skip(8).collect();
        let other_tail: Vec<&str> = other.split(',').skip(8).collect();
        assert_eq!(tail, other_tail);
    }
}

#[test]
fn seed_from_environment() {
    let flag = stdout(&tcvm(&[
        "critvals", "--n", "15", "--reps", "500", "--seed", "77",
    ]));
    let env = Command::new(env!("CARGO_BIN_EXE_tcvm"))
        .args(["critvals", "--n", "15", "--reps", "500"])
        .env("TCVM_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(flag, stdout(&env));
    let wins = Command::new(env!("CARGO_BIN_EXE_tcvm"))
        .args(["critvals", "--n", "15", "--reps", "500", "--seed", "77"])
        .env("TCVM_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(flag, stdout(&wins));
}

#[test]
fn critvals_n50_matches_printed_cell() {
    let text = stdout(&tcvm(&[
        "critvals",
        "--n",
        "50",
        "--reps",
        "50000",
        "--alphas",
        "0.05",
        "--scale",
        "population",
    ]));
    let v: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - 1.6897).abs() <= 0.02, "{v}");
}

#[test]
fn power_under_the_null_is_near_alpha() {
    let args = [
        "power",
        "--alt",
        "Normal(0,1)",
        "--reps",
        "4000",
        "--null-reps",
        "20000",
        "--seed",
        "3",
    ];
    let text = stdout(&tcvm(&args));
    assert_eq!(text, stdout(&tcvm(&args)));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alternative,TCVM,CVM,BCMR,AD,SW");
    assert!(lines[1].starts_with("\"Normal(0,1)\","));
    for cell in lines[1].rsplitn(6, ',').take(5) {
        let rate: f64 = cell.parse().unwrap();
        assert!((rate - 0.05).abs() < 0.015, "{text}");
    }
}

#[test]
fn power_json_has_standard_errors() {
    let out = tcvm(&[
        "power",
        "--alt",
        "LoConN(0.5,4)",
        "--alt",
        "Unif",
        "--tests",
        "tcvm,sw",
        "--reps",
        "1000",
        "--null-reps",
        "5000",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["spec"], "LoConN(0.5,4)");
    assert_eq!(rows[1]["spec"], "Unif(0,1)");
    let rate = rows[0]["rates"]["TCVM"].as_f64().unwrap();
    let se = rows[0]["se"]["TCVM"].as_f64().unwrap();
    assert!(rate > 0.8);
    assert!((se - (rate * (1.0 - rate) / 1000.0).sqrt()).abs() < 1e-12);
    assert!(rows[0]["rates"].get("AD").is_none());
}

#[test]
fn moments_and_constant_reports() {
    let text = stdout(&tcvm(&[
        "verify-moments",
        "--x",
        "0",
        "--y",
        "0",
        "--reps",
        "20000",
    ]));
    assert_eq!(
        field(&text, "exact").parse::<f64>().unwrap(),
        3.0 / 16.0 - 1.0 / 160.0
    );
    let z: f64 = field(&text, "z").parse().unwrap();
    assert!(z.abs() < 5.0);

    let text = stdout(&tcvm(&["constant-c", "--n", "200", "--reps", "100"]));
    assert_eq!(text.lines().count(), 2);
    assert_eq!(field(&text, "n"), "200");
    assert_eq!(
        tcvm(&["constant-c", "--n", "50", "--reps", "100"])
            .status
            .code(),
        Some(2)
    );
}
