use serde_json::Value;
use tiltkit_cli::{run, Outcome, EXIT_FAILS, EXIT_HOLDS, EXIT_LIMIT, EXIT_USAGE};

fn tk(args: &[&str]) -> Outcome {
    run(std::iter::once("tiltkit").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut v = vec!["--json"];
    v.extend_from_slice(args);
    let out = tk(&v);
    (serde_json::from_str(&out.stdout).expect(&out.stdout), out.code)
}

#[test]
fn sharp_of_uniformizer_flat() {
    let out = tk(&["sharp", "--ring", "Zp[p^(1/p^2)] p=3 M=4", "--seq", "3,x^3,x"]);
    assert_eq!(out.code, EXIT_HOLDS);
    assert!(out.stdout.lines().next().unwrap().trim().starts_with('3'), "{}", out.stdout);
}

#[test]
fn proot_failure_names_witness() {
    let out = tk(&["check", "proot", "--ring", "Fp[t^2,t^3] p=5", "--uniformizer", "t^2"]);
    assert_eq!(out.code, EXIT_FAILS);
    let (v, code) = json(&["check", "proot", "--ring", "Fp[t^2,t^3] p=5", "--uniformizer", "t^2"]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(v["witness"]["b"], "t");
}

#[test]
fn almost_integral_multiplier() {
    let (v, code) = json(&["check", "almost-integral", "--ring", "Fp[t^2,t^3] p=5", "--elem", "t", "--uniformizer", "t^2"]);
    assert_eq!(code, EXIT_HOLDS);
    assert_eq!(v["details"]["multiplier"], "t^2");
}

#[test]
fn exit_codes_for_errors() {
    assert_eq!(tk(&["sharp", "--ring", "Zp p=9 M=2", "--seq", "1"]).code, EXIT_USAGE);
    assert_eq!(tk(&["frobnicate"]).code, EXIT_USAGE);
    let out = tk(&["demo", "nope"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("monoid-lemma"));
    assert_eq!(tk(&["tilt", "add", "--ring", "Zp p=5 M=2", "--seq", "1,1", "--seq2", "1,1", "--target", "3"]).code, EXIT_LIMIT);
    assert_eq!(tk(&["tilt", "injective", "--ring", "Zq q=81 M=6", "--depth", "6"]).code, EXIT_LIMIT);
}

#[test]
fn mt2_audit_of_zmod_fails_on_p_in_w_pow_p() {
    let (v, code) = json(&["check", "mt2", "--ring", "Zp p=3 M=4", "--uniformizer", "3"]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(v["details"]["failed"][0], "p in w^p A");
}

#[test]
fn krull_rank2_value() {
    let (v, code) = json(&["krull", "--xi", "(0,-3)"]);
    assert_eq!(code, EXIT_HOLDS);
    assert_eq!(v["details"]["c_as_power_of_t"], 1);
    assert_eq!(tk(&["krull", "--xi", "(-1,5)"]).code, EXIT_FAILS);
}

#[test]
fn demos_run_and_json_is_stable() {
    for name in tiltkit_cli::demo::DEMOS {
        let a = tk(&["--json", "demo", name]);
        assert_eq!(a.code, EXIT_HOLDS, "{name}: {}", a.stderr);
        assert_eq!(a, tk(&["--json", "demo", name]));
        serde_json::from_str::<Value>(&a.stdout).unwrap();
    }
}
