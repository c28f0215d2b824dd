use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn fdcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdcalc"))
        .args(args)
        .env_remove("FDCALC_SEED")
        .output()
        .expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn sizes(cells: &Value) -> Vec<(String, usize)> {
    cells
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| (k.clone(), v.as_array().unwrap().len()))
        .collect()
}

#[test]
fn validate_prints_canonical_form() {
    let o = fdcalc(&["validate", "presheaf", &data("phi_arr.json")]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["elems"]["1"], serde_json::json!(["y", "z"]));
    // canonical output validates to itself
    let dir = std::env::temp_dir().join(format!("fdcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let again = dir.join("canon.json");
    std::fs::write(&again, &o.stdout).unwrap();
    let o2 = fdcalc(&["validate", "presheaf", again.to_str().unwrap()]);
    assert_eq!(o.stdout, o2.stdout);
}

#[test]
fn schema_errors_carry_a_pointer() {
    let o = fdcalc(&["validate", "presheaf", &data("bad_action.json")]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("/action/e/x"), "{}", err);
}

#[test]
fn compose_matches_matrix_product() {
    let o = fdcalc(&["compose", "--q", &data("p_discrete.json"), "--p", &data("p_discrete.json")]);
    assert_eq!(code(&o), 0);
    // P as a matrix is [[1, 2], [0, 1]]; its square is [[1, 4], [0, 1]]
    let got = sizes(&json_out(&o)["cells"]);
    let want = [("(a0,a0)", 1), ("(a0,a1)", 4), ("(a1,a0)", 0), ("(a1,a1)", 1)];
    for (k, n) in want {
        assert!(got.contains(&(k.to_string(), n)), "{:?}", got);
    }
}

#[test]
fn difference_of_a_square() {
    // Δ_0[X × X](Φ)(b) counts pairs with at least one new coordinate:
    // (|Φ(b)| + r(b))² − |Φ(b)|² with r = A(0, −)
    let o = fdcalc(&[
        "diff",
        "--functor",
        &data("square_arr.json"),
        "--at",
        &data("phi_arr.json"),
        "--object",
        "0",
    ]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    let d = &v["difference"]["elems"];
    assert_eq!(d["0"].as_array().unwrap().len(), 2 * 2 - 1);
    assert_eq!(d["1"].as_array().unwrap().len(), 3 * 3 - 2 * 2);
    assert_eq!(v["certificate"]["tense"], true);
}

#[test]
fn higher_difference_orders_agree() {
    let (f, at) = (data("square_arr.json"), data("phi_arr.json"));
    let run = |seq: &str, iterated: bool| {
        let mut args = vec!["higher-diff", "--functor", &f, "--at", &at, "--sequence", seq];
        if iterated {
            args.push("--iterated");
        }
        let o = fdcalc(&args);
        assert_eq!(code(&o), 0);
        sizes(&json_out(&o)["difference"]["elems"])
    };
    let a = run("0,1", false);
    assert_eq!(a, run("1,0", false));
    assert_eq!(a, run("0,1", true));
}

#[test]
fn newton_counit_on_a_pullback_is_reported() {
    let o = fdcalc(&[
        "newton",
        "--functor",
        &data("pullback.json"),
        "--max-arity",
        "3",
        "--check",
        "counit",
        "--at",
        &data("glued.json"),
    ]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["counit"]["iso"], false);
    assert_eq!(v["idempotent"], true);
    // representables over the cospan never agree at z, so every cell is empty
    assert!(v["cells"].as_array().unwrap().iter().all(|n| n == 0));
    assert!(v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn newton_unit_on_a_square() {
    let o = fdcalc(&["newton", "--functor", &data("square_arr.json"), "--max-arity", "2", "--check", "unit"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["unit"]["iso"], true);
}

#[test]
fn chain_rule_on_given_functors() {
    let o = fdcalc(&[
        "verify",
        "chain-rule",
        "--F",
        &data("square_arr.json"),
        "--G",
        &data("square_arr.json"),
        "--at",
        &data("phi_arr.json"),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json_out(&o)["passed"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&fdcalc(&["verify"])), 2);
    assert_eq!(code(&fdcalc(&["verify", "no-such-suite"])), 2);
    assert_eq!(code(&fdcalc(&["verify", "clairaut", "--F", &data("square_arr.json")])), 2);
    assert_eq!(code(&fdcalc(&["frobnicate"])), 2);
}

#[test]
fn verify_is_deterministic_and_seed_falls_back_to_env() {
    let args = ["verify", "boolean-factorization", "--cases", "5", "--format", "json"];
    let with_flag = fdcalc(&[&args[..], &["--seed", "9"]].concat());
    assert_eq!(code(&with_flag), 0);
    assert_eq!(with_flag.stdout, fdcalc(&[&args[..], &["--seed", "9"]].concat()).stdout);
    let from_env = Command::new(env!("CARGO_BIN_EXE_fdcalc"))
        .args(args)
        .env("FDCALC_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(with_flag.stdout, from_env.stdout);
    let other = fdcalc(&[&args[..], &["--seed", "10"]].concat());
    assert_ne!(with_flag.stdout, other.stdout);
}

#[test]
fn report_exit_code_follows_the_laws() {
    let o = fdcalc(&["verify", "clairaut", "--cases", "3", "--seed", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let dir = std::env::temp_dir().join(format!("fdcalc-report-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, &o.stdout).unwrap();
    let r = fdcalc(&["report", good.to_str().unwrap()]);
    assert_eq!(code(&r), 0);
    assert!(String::from_utf8_lossy(&r.stdout).contains("result  PASS"));

    let mut v = json_out(&o);
    v["reports"][0]["laws"][0]["failed"] = 1.into();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, serde_json::to_vec(&v).unwrap()).unwrap();
    let r = fdcalc(&["report", bad.to_str().unwrap()]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stdout).contains("suites fail: clairaut"));

    let empty = dir.join("empty.json");
    std::fs::write(&empty, r#"{"passed": true, "reports": []}"#).unwrap();
    assert_eq!(code(&fdcalc(&["report", empty.to_str().unwrap()])), 2);
}
