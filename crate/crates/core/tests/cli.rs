use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pauli-volume"))
        .args(args)
        .env_remove("PV_MAX_D")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ratios_table_for_maximal_bases() {
    let o = run(&["ratios", "--d", "2..5", "--n-mode", "max", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["d", "N", "class", "num", "den", "decimal"]);
    let fractions: Vec<String> = rows[1..].iter().map(|r| format!("{}/{}", r[3], r[4])).collect();
    assert_eq!(
        fractions,
        [
            "1/3", "3/16", "1/3", "1/8", "64/243", "1/4", "1/30", "1215/4096", "1/5", "1/144",
            "24576/78125", "1/6"
        ]
    );
}

#[test]
fn three_bases_match_maximal_for_qutrits() {
    let three = run(&["ratios", "--d", "3", "--n-mode", "3", "--format", "csv"]);
    let max = run(&["ratios", "--d", "3", "--n-mode", "max", "--format", "csv"]);
    let strip_n = |o: &Output| {
        stdout(o)
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{}", f[2], f[3], f[4], f[5])
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip_n(&three), strip_n(&max));
}

#[test]
fn ratios_json_uses_fraction_strings() {
    let o = run(&["ratios", "--d", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["cp_over_p"], "1/3");
    assert_eq!(v[0]["N"], 3);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["ratios", "--d", "1"]).status.code(), Some(2));
    assert_eq!(run(&["ratios", "--d", "2", "--unknown"]).status.code(), Some(2));
    assert_eq!(run(&["ratios", "--d", "5", "--n-mode", "4"]).status.code(), Some(2));
    assert_eq!(run(&["volume", "--d", "5", "--n-mode", "3", "--class", "xx"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--d", "2", "--lambdas", "1/0,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["mub-verify", "--d", "4"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn dimension_cap_follows_environment() {
    let capped = Command::new(env!("CARGO_BIN_EXE_pauli-volume"))
        .args(["volume", "--d", "5", "--class", "cp"])
        .env("PV_MAX_D", "4")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("PV_MAX_D"));
    let raised = Command::new(env!("CARGO_BIN_EXE_pauli-volume"))
        .args(["check-conjectures", "--d", "9", "--format", "csv"])
        .env("PV_MAX_D", "9")
        .output()
        .unwrap();
    assert_eq!(raised.status.code(), Some(0));
    assert!(stdout(&raised).contains("9,10,V_CP/V_P,1,403200,"));
    assert_eq!(run(&["ratios", "--d", "9"]).status.code(), Some(2));
}

#[test]
fn conjecture_check_succeeds() {
    let o = run(&["check-conjectures", "--d", "2..5", "--n-mode", "max"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["all_hold"], true);
    let o = run(&["check-conjectures", "--d", "3..6", "--n-mode", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn classify_examples() {
    let get = |lambdas: &str| -> serde_json::Value {
        let o = run(&["classify", "--d", "2", "--lambdas", lambdas]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_slice(&o.stdout).unwrap()
    };
    let zero = get("0,0,0");
    for key in ["positive_necessary", "completely_positive", "generator_achievable"] {
        assert_eq!(zero[key], true);
    }
    assert_eq!(zero["entanglement_breaking"]["holds"], true);
    let ones = get(r#"["1/1","1/1","1/1"]"#);
    assert_eq!(ones["completely_positive"], true);
    assert_eq!(ones["entanglement_breaking"]["holds"], false);
    let mixed = get("1,1,-1");
    assert_eq!(mixed["positive_necessary"], true);
    assert_eq!(mixed["completely_positive"], false);
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = ["mc", "--d", "2", "--class", "cp", "--samples", "1000000", "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v[0]["consistent"], true);
}

#[test]
fn mub_verification_passes() {
    let o = run(&["mub-verify", "--d", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["passed"], true);
    let o = run(&["mub-verify", "--d", "2..7"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ds: Vec<u64> = v.as_array().unwrap().iter().map(|r| r["d"].as_u64().unwrap()).collect();
    assert_eq!(ds, [2, 3, 5, 7]);
}

#[test]
fn output_file_and_regions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("regions.json");
    let o = run(&[
        "dump-regions", "--d", "4", "--n-mode", "3", "--class", "cp,eb", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["chains"].as_array().unwrap().len(), 16);
    assert_eq!(v[1]["chains"].as_array().unwrap().len(), 4);
    assert_eq!(v[0]["symmetry_factor"], 6);
}

#[test]
fn volume_csv_lists_lambda_volumes() {
    let o = run(&["volume", "--d", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("d,N,class,num,den,decimal\n"));
    assert!(text.contains("2,3,CP,8,3,"));
    assert!(text.contains("2,3,P,8,1,"));
}
