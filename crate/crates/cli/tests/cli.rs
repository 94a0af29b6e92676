use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wreathlab"))
        .args(args)
        .env_remove("WREATHLAB_CAP")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (v, out.status.code().unwrap())
}

fn find<'a>(v: &'a Value, name: &str, k: Option<u64>) -> &'a Value {
    v["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name && r.get("k").and_then(Value::as_u64) == k)
        .unwrap_or_else(|| panic!("no row {name} {k:?} in {v}"))
}

fn ratio(row: &Value) -> String {
    let num = row["rational"]["num"].as_str().unwrap();
    let den = row["rational"]["den"].as_str().unwrap();
    format!("{num}/{den}")
}

#[test]
fn stats_reports_exact_spectra() {
    let (v, code) = json(&["stats", "S(4)"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "stats");
    assert_eq!(v["status"], "ok");
    assert_eq!(ratio(find(&v, "order", None)), "24/1");
    assert_eq!(ratio(find(&v, "delta", Some(0))), "3/8");
    assert_eq!(find(&v, "delta", Some(0))["decimal"], "0.375000000000000");

    let (v, _) = json(&["stats", "wrP(S(2),C(2))"]);
    assert_eq!(ratio(find(&v, "delta", Some(0))), "5/8");

    let (v, code) = json(&["stats", "A(4)", "--rank", "--cycle-index"]);
    assert_eq!(code, 0);
    assert_eq!(ratio(find(&v, "rank", None)), "2/1");
    assert!(find(&v, "Z", None)["text"].as_str().unwrap().contains("x1^4"));
}

#[test]
fn cap_and_parse_errors_have_distinct_exit_codes() {
    let out = run(&["stats", "S(100)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));

    let out = run(&["stats", "S(4"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["density", "cyclic", "--deltaA", "0.5", "--target", "1/2", "--eps", "1/10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let (v, code) = json(&["--cap", "100", "stats", "S(5)"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "error");
}

#[test]
fn cap_can_come_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_wreathlab"))
        .args(["stats", "S(5)"])
        .env("WREATHLAB_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_compares_formula_and_oracle() {
    let (v, code) = json(&["verify", "wrI", "S(3)", "C(2)", "--all-k"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "EQUAL");
    assert_eq!(v["results"].as_array().unwrap().len(), 3 * 7);

    let (v, code) = json(&["verify", "wrP", "S(3)", "C(3)", "--k", "0"]);
    assert_eq!(code, 0);
    assert_eq!(ratio(find(&v, "formula", Some(0))), "37/81");
    assert_eq!(ratio(find(&v, "oracle", Some(0))), "37/81");

    let (v, code) = json(&["verify", "prodI", "S(2)", "S(2)", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(ratio(find(&v, "oracle", Some(2))), "1/2");

    let (_, code) = json(&["verify", "prodP", "C(2)", "C(3)", "S(2)"]);
    assert_eq!(code, 0);
}

#[test]
fn bounds_with_sandwich() {
    let (v, code) = json(&["bounds", "wrP(S(3),S(2))", "--sandwich", "C=A(3)"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "PASS");
    assert_eq!(find(&v, "sandwich", None)["text"], "PASS");

    let (v, code) = json(&["bounds", "evenWr(4,C(2),power)", "--sandwich", "C=A(4)"]);
    assert_eq!(code, 0);
    assert_eq!(ratio(find(&v, "sandwich_lower", None)), "11/32");
    assert_eq!(ratio(find(&v, "sandwich_upper", None)), "5/8");

    let out = run(&["bounds", "prodI(S(2),S(2))"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not transitive"));

    let out = run(&["bounds", "S(4)", "--sandwich", "C=A(4)"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["bounds", "wrP(S(4),S(2))", "--sandwich", "C=gens(4;(1 2))"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn density_searches_emit_witnesses() {
    let (v, code) = json(&["density", "imprimitive", "--deltaA", "1/3", "--target", "1/2", "--eps", "1/20"]);
    assert_eq!(code, 0);
    assert_eq!(find(&v, "family", None)["text"], "imprimitive-agl-chain");
    assert_eq!(ratio(find(&v, "value", None)), "41/81");
    assert_eq!(find(&v, "contract", None)["text"], "PASS");

    let (v, code) = json(&[
        "density", "imprimitive", "--base", "S(3)", "--target", "1/2", "--eps", "1/20", "--verify-oracle",
    ]);
    assert_eq!(code, 0);
    assert_eq!(find(&v, "oracle", None)["text"], "PASS");

    let (v, code) = json(&["density", "cyclic", "--deltaA", "1/2", "--target", "9/10", "--eps", "1/20"]);
    assert_eq!(code, 0);
    assert_eq!(find(&v, "primes", None)["text"], "2,3,5,7,11,13,17");

    let (v, code) = json(&["density", "primitive", "--top", "C(2)", "--target", "1/2", "--eps", "1/100"]);
    assert!(code == 0 || code == 2);
    assert!(v["status"] == "ok" || v["status"] == "infeasible");

    let (v, code) = json(&["density", "primitive", "--top", "C(2)", "--target", "1/2", "--eps", "1/100000000"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "infeasible");
    assert!(find(&v, "reason", None)["text"].as_str().unwrap().contains("catalog"));

    let (_, code) = json(&["density", "cyclic", "--deltaA", "0", "--target", "1/2", "--eps", "1/10"]);
    assert_eq!(code, 2);
}

#[test]
fn formula_and_index_commands() {
    let (v, code) = json(&["formula", "sharp", "5", "4", "--k", "0"]);
    assert_eq!(code, 0);
    assert_eq!(ratio(find(&v, "delta", Some(0))), "11/30");

    let (v, _) = json(&["formula", "agl1", "5"]);
    assert_eq!(ratio(find(&v, "coefficient", Some(5))), "1/20");

    let (v, _) = json(&["formula", "step", "1/2", "2", "3"]);
    let (a, _) = json(&["formula", "cyclic-power", "1/2", "6"]);
    let (b, _) = json(&["formula", "cyclic-power", "1/2", "2"]);
    let parse = |s: String| {
        let (n, d) = s.split_once('/').unwrap();
        (n.parse::<i128>().unwrap(), d.parse::<i128>().unwrap())
    };
    let (dn, dd) = parse(ratio(find(&v, "D", None)));
    let (an, ad) = parse(ratio(find(&a, "delta", None)));
    let (bn, bd) = parse(ratio(find(&b, "delta", None)));
    assert_eq!(dn * ad * bd, (an * bd - bn * ad) * dd);

    let (v, code) = json(&["index", "S(3)"]);
    assert_eq!(code, 0);
    assert_eq!(ratio(find(&v, "x1^3", None)), "1/6");
    assert_eq!(ratio(find(&v, "x1*x2", None)), "1/2");
    assert_eq!(ratio(find(&v, "x3", None)), "1/3");

    let (v, code) = json(&["limits", "--n", "12"]);
    assert_eq!(code, 0);
    assert_eq!(find(&v, "lower_bound_holds", None)["text"], "PASS");
}

#[test]
fn csv_has_one_row_per_k() {
    let out = run(&["--csv", "stats", "S(3)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,k,num,den,decimal,text"));
    let deltas: Vec<&str> = text.lines().filter(|l| l.starts_with("delta,")).collect();
    assert_eq!(deltas, vec!["delta,0,1,3,0.333333333333333,", "delta,1,1,2,0.500000000000000,", "delta,2,0,1,0,", "delta,3,1,6,0.166666666666667,"]);
}
