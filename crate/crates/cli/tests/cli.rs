use balanced_gaps_cli::{run_at, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn call(args: &[&str]) -> Run {
    let mut argv = vec!["balanced-gaps"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_at(argv, 1_700_000_000, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn json(args: &[&str]) -> Value {
    let r = call(args);
    assert_eq!(r.code, EXIT_OK, "stderr: {}", r.err);
    serde_json::from_str(&r.out).unwrap()
}

fn csv_body(out: &str) -> Vec<Vec<String>> {
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: {"));
    let rest: String = lines.map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(rest.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

#[test]
fn density_r2() {
    let v = json(&["density", "--r", "2", "--eps", "0.1"]);
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 0.200_166_917_113_965_25).abs() < 1e-15);
    assert_eq!(v["result"]["method"], "closed_form");
    assert_eq!(v["manifest"]["subcommand"], "density");
    assert_eq!(v["manifest"]["parameters"]["eps"], "0.1");
}

#[test]
fn classify_prime_square() {
    let v = json(&["classify", "--n", "49"]);
    assert_eq!(v["result"]["threshold"].as_f64(), Some(0.0));
    assert_eq!(v["result"]["omega"], 2);
    let r = call(&["classify", "--n", "49", "--format", "csv"]);
    let rows = csv_body(&r.out);
    assert_eq!(rows, vec![vec!["49", "2", "0", "false", "7^2", ""]]);
}

#[test]
fn classify_window_rows() {
    let r = call(&["classify", "--n-window", "10", "--eps", "0.5", "--format", "csv"]);
    assert_eq!(r.code, EXIT_OK);
    let rows = csv_body(&r.out);
    assert_eq!(rows.len(), 10);
    // 15 = 3·5: 1 − ln 3/ln 5 ≈ 0.317, so balanced at ε = 0.5
    let row15 = rows.iter().find(|r| r[0] == "15").unwrap();
    assert_eq!(row15[5], "true");
    let row14 = rows.iter().find(|r| r[0] == "14").unwrap();
    assert_eq!(row14[5], "false");
}

#[test]
fn constants_reference() {
    let v = json(&["constants", "--theta", "0.971"]);
    assert_eq!(v["result"]["reference"]["k0"], 6);
    assert_eq!(v["result"]["reference"]["gap"], 16);
    assert_eq!(v["result"]["formula"]["k0"], 25);
    let v = json(&["constants", "--delta", "0.05"]);
    assert_eq!(v["result"]["formula"]["k0"], 441);
    assert!(v["result"]["reference"].is_null());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["density", "--eps", "0.1", "--bogus"],
        &["density"],
        &["density", "--eps", "1.5"],
        &["constants", "--theta", "0.9", "--delta", "0.1"],
        &["moments", "--variant", "lemma2", "--n-window", "1000", "--tuple", "0,2", "--l", "1"],
        &["weights", "--l", "1", "--big-r", "10", "--n-window", "100"],
        &["density", "--eps", "0.1", "--threads", "0"],
    ] {
        let r = call(args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}");
        assert!(r.out.is_empty());
        assert!(!r.err.is_empty());
    }
}

#[test]
fn help_exits_0() {
    let r = call(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("count-star"));
}

#[test]
fn budget_is_a_computation_error() {
    // R = 10⁹ with k = 2 needs far more residue classes than the budget allows
    let r = call(&["weights", "--tuple", "0,2", "--l", "1", "--big-r", "1e9", "--n-window", "100", "--len", "2"]);
    assert_eq!(r.code, EXIT_COMPUTE, "{}", r.err);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let base = ["density", "--r", "4", "--eps", "0.2", "--samples", "300000", "--seed", "7"];
    let a = call(&base);
    let mut with_threads = base.to_vec();
    with_threads.extend(["--threads", "1"]);
    let b = call(&with_threads);
    let c = call(&base);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.out, b.out);
    assert_eq!(a.out, c.out);
    let mut other_seed = base.to_vec();
    other_seed[8] = "8";
    assert_ne!(call(&other_seed).out, a.out);
}

#[test]
fn csv_cells_are_finite_with_15_digits() {
    let r = call(&["density", "--eps", "0.05", "--tail-r-max", "6", "--samples", "100000", "--format", "csv"]);
    assert_eq!(r.code, EXIT_OK);
    for row in csv_body(&r.out) {
        for cell in [&row[2], &row[4], &row[5]] {
            let x: f64 = cell.parse().unwrap();
            assert!(x.is_finite());
            let digits = cell.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            let leading = cell.chars().take_while(|c| *c == '0' || *c == '.').filter(char::is_ascii_digit).count();
            assert!(digits - leading <= 15, "{cell}");
        }
    }
}

#[test]
fn out_file_and_tuple_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let tuples = dir.path().join("t.txt");
    let out = dir.path().join("out.csv");
    let r = call(&["tuple", "--k", "4", "--write-tuples", tuples.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&tuples).unwrap().trim(), "0,2,6,8");

    std::fs::write(&tuples, "# twins and a non-admissible pair\n0,2\n0,1\n").unwrap();
    let r = call(&[
        "singular-series",
        "--tuple-file",
        tuples.to_str().unwrap(),
        "--p-max",
        "1000",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.is_empty());
    let rows = csv_body(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 2);
    assert!((rows[0][3].parse::<f64>().unwrap() - 1.32).abs() < 1e-3);
    assert_eq!(rows[1][3], "0");
}

#[test]
fn weights_naive_column_matches() {
    let r = call(&[
        "weights", "--tuple", "0,2,6", "--l", "1", "--big-r", "50", "--n-window", "1000", "--len", "50", "--naive",
        "--format", "csv",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    for row in csv_body(&r.out) {
        let (a, b): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-3), "{row:?}");
    }
}

#[test]
fn moment_and_discrepancy_subcommands() {
    let v = json(&["moments", "--variant", "lemma1", "--n-window", "10000", "--tuple", "0,2,6", "--l", "1"]);
    let ratio = v["result"]["ratio"].as_f64().unwrap();
    assert!((ratio - 0.3107).abs() < 1e-3, "{ratio}");
    assert_eq!(v["result"]["variant"], "lemma1");

    let v = json(&["s-stat", "--n-window", "10000", "--tuple", "0,2,6", "--l", "1", "--r", "2", "--eps", "0.3"]);
    assert!(v["result"]["empirical"].as_f64().unwrap().is_finite());

    let v = json(&["bv", "--n", "10000", "--q-max", "10"]);
    assert_eq!(v["result"]["per_q"].as_array().unwrap().len(), 10);
    assert_eq!(v["result"]["set_size"].as_f64(), Some(1229.0));

    let v = json(&["bv-star", "--n-window", "10000", "--r", "2", "--eps", "0.3", "--log-power", "1"]);
    assert_eq!(v["result"]["set_size"].as_f64(), Some(217.0));
    assert_eq!(v["manifest"]["parameters"]["q_max"], "10");

    let v = json(&["bv-weighted", "--n", "10000", "--q-max", "5", "--alpha", "0.5", "--f", "const1"]);
    assert_eq!(v["result"]["per_q"].as_array().unwrap().len(), 5);
}

#[test]
fn count_star_summary() {
    let v = json(&["count-star", "--n-window", "10000", "--r", "2", "--eps", "0.3"]);
    assert_eq!(v["result"]["count"], 217);
}
