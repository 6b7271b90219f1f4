use nuceft::cli::{run, CSV_HEADER};
use std::io::Write;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("nuceft").chain(args.iter().copied()), &mut o, &mut e);
    Out { code, stdout: String::from_utf8(o).unwrap(), stderr: String::from_utf8(e).unwrap() }
}

const REF: &[&str] = &[
    "--model", "pionless", "--encoding", "vc", "--task", "evolve", "--L", "10", "--aL-fm", "2.2", "--Ekin-MeV", "10",
    "--eps", "0.1", "--order", "1",
];

fn with(extra: &[&'static str]) -> Vec<&'static str> {
    REF.iter().copied().chain(extra.iter().copied()).collect()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    rd.records().map(|r| r.unwrap()).collect()
}

fn col(rows: &[csv::StringRecord], name: &str) -> Vec<f64> {
    let i = CSV_HEADER.iter().position(|h| *h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn estimate_example() {
    let mut a = vec!["estimate"];
    a.extend(with(&["--eta", "40", "--convention", "fault-tolerant"]));
    let out = cli(&a);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let depth = v["depth_total"].as_f64().unwrap();
    assert!(depth > 6.2e8 / 2.0 && depth < 6.2e8 * 2.0, "{depth}");
    assert_eq!(v["qubits"], 6000);
}

#[test]
fn missing_eta_names_field() {
    let mut a = vec!["estimate"];
    a.extend(REF);
    let out = cli(&a);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("eta"), "{}", out.stderr);
}

#[test]
fn domain_errors_exit_two() {
    let out = cli(&["estimate", "--model", "dynpi", "--L", "10", "--aL-fm", "1.4", "--eta", "40", "--Ekin-MeV", "10", "--eps", "0.1"]);
    assert_eq!(out.code, 2, "{}", out.stderr);
    let mut a = vec!["estimate"];
    a.extend(with(&["--eta=-3"]));
    assert_eq!(cli(&a).code, 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["frobnicate"]).code, 1);
    assert_eq!(cli(&["verify", "everything"]).code, 1);
    assert_eq!(cli(&["estimate", "--model", "quarks"]).code, 1);
    let mut a = vec!["sweep", "--axis", "eta", "--from", "40", "--to", "2", "--step", "2"];
    a.extend(REF);
    assert_eq!(cli(&a).code, 1);
    let mut a = vec!["sweep", "--axis", "colour", "--values", "1,2"];
    a.extend(REF);
    assert_eq!(cli(&a).code, 1);
    let help = cli(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("estimate"));
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"model\": \"pionless\",\n  \"colour\": 3\n}\n").unwrap();
    let out = cli(&["estimate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("colour") && out.stderr.contains("line 3"), "{}", out.stderr);

    let good = dir.path().join("good.json");
    let mut f = std::fs::File::create(&good).unwrap();
    write!(f, r#"{{"model":"pionless","encoding":"vc","L":10,"a_fm":2.2,"eta":40,"e_kin":10,"eps":0.1}}"#).unwrap();
    drop(f);
    let from_file = cli(&["estimate", "--config", good.to_str().unwrap()]);
    let mut a = vec!["estimate"];
    a.extend(with(&["--eta", "40"]));
    assert_eq!(from_file.code, 0);
    assert_eq!(from_file.stdout, cli(&a).stdout);

    let over = cli(&["estimate", "--config", good.to_str().unwrap(), "--eta", "20"]);
    let v: serde_json::Value = serde_json::from_str(&over.stdout).unwrap();
    let base: serde_json::Value = serde_json::from_str(&from_file.stdout).unwrap();
    assert!(v["r"].as_f64().unwrap() < base["r"].as_f64().unwrap());
}

#[test]
fn output_file_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    let mut a = vec!["estimate", "--format", "csv", "-o", p.to_str().unwrap()];
    a.extend(with(&["--eta", "40"]));
    let out = cli(&a);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let rows = csv_rows(&std::fs::read_to_string(&p).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(col(&rows, "qubits"), vec![6000.0]);
}

#[test]
fn eta_sweep_twenty_rows_and_deterministic() {
    let mut a = vec!["sweep", "--axis", "eta", "--from", "2", "--to", "40", "--step", "2", "--jobs", "3"];
    a.extend(REF);
    let one = cli(&a);
    assert_eq!(one.code, 0, "{}", one.stderr);
    let rows = csv_rows(&one.stdout);
    assert_eq!(rows.len(), 20);
    assert_eq!(col(&rows, "value"), (1..=20).map(|i| 2.0 * i as f64).collect::<Vec<_>>());
    assert!(one.stdout.contains("\r\n"));
    assert_eq!(one.stdout, cli(&a).stdout);
    let mut serial = a.clone();
    *serial.iter_mut().find(|s| **s == "3").unwrap() = "1";
    assert_eq!(one.stdout, cli(&serial).stdout);
}

#[test]
fn epsilon_log_sweep_monotone() {
    let mut a = vec!["sweep", "--axis", "epsilon", "--from", "0.5", "--to", "0.001", "--log-points", "12", "--eta", "40"];
    a.extend(REF);
    let out = cli(&a);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows = csv_rows(&out.stdout);
    let r = col(&rows, "r");
    assert_eq!(r.len(), 12);
    assert!(r.windows(2).all(|w| w[1] >= w[0]), "{r:?}");
}

#[test]
fn error_rows_do_not_stop_sweep() {
    let mut a = vec!["sweep", "--axis", "eta", "--values", "4,-1,8", "--eta", "40"];
    a.extend(REF);
    let out = cli(&a);
    assert_eq!(out.code, 0);
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 3);
    assert!(rows[1][2].is_empty() && rows[1][8].starts_with("error"));
    assert!(!rows[2][2].is_empty());
}

#[test]
fn csv_numbers_round_trip() {
    let mut a = vec!["sweep", "--axis", "eta", "--values", "3,17,40", "--convention", "fault-tolerant"];
    a.extend(REF);
    *a.iter_mut().find(|s| **s == "pionless").unwrap() = "ope";
    let out = cli(&a);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows = csv_rows(&out.stdout);
    for (i, eta) in [3.0, 17.0, 40.0].into_iter().enumerate() {
        let mut s = nuceft::task::TaskSpec::crossing_reference(
            nuceft::models::ModelKind::Ope,
            nuceft::encodings::Encoding::VerstraeteCirac,
            nuceft::trotter::Convention::FaultTolerant,
        );
        s.eta = eta;
        let rep = nuceft::task::estimate(&s).unwrap();
        let close = |x: f64, y: f64| ((x - y) / y).abs() < 1e-11;
        assert!(close(col(&rows, "depth")[i], rep.depth_total));
        assert!(close(col(&rows, "T")[i], rep.t_count.unwrap()));
        assert!(close(col(&rows, "r")[i], rep.r));
        assert_eq!(col(&rows, "ell_or_nb")[i], rep.ell.unwrap() as f64);
    }
}

#[test]
fn verify_encodings_passes() {
    let out = cli(&["verify", "encodings"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.lines().all(|l| l.starts_with("PASS ")));
}
