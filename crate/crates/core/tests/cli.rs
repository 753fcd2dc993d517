use std::path::Path;

use twogen::cli;

fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let cache = dir.join("factors.txt");
    let mut full = vec![
        "twogen".to_string(),
        "--factor-cache".to_string(),
        cache.display().to_string(),
    ];
    full.extend(args.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn run(args: &[&str]) -> (i32, String, String) {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

#[test]
fn count_examples() {
    let (code, out, _) = run(&["count", "--genus", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out, "n(4,2) = 2\n");
    let (_, out, _) = run(&["count", "--prime", "5", "--power", "9"]);
    assert_eq!(out, "n(5^9,2) = 5\n");
    let (_, out, _) = run(&["count", "--genus", "7", "--witnesses"]);
    assert!(out.contains("{2, 7} -> <3,8>"));
}

#[test]
fn modulus_line() {
    let (code, out, _) = run(&["modulus", "--k", "5"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "M(5) = 255 = 3·5·17"), "{out}");
    assert!(out.starts_with("  i"));
}

#[test]
fn derive_factored_k9() {
    let (code, out, _) = run(&["derive", "--k", "9", "--style", "factored"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.trim(),
        "1+2X_{3,5}(p)+X_{9,17}(p)+X_{128,257}(p)+X_{2,3}(p)(3+X_{2,11}(p)+X_{8,43}(p))"
    );
    let (_, out, _) = run(&["derive", "--k", "2", "--style", "case-table"]);
    assert_eq!(out, "3\n");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["count"][..],
        &["count", "--prime", "4", "--power", "2"],
        &["count", "--genus", "0"],
        &["derive", "--k", "0"],
        &["frobnicate"],
        &["modulus", "--k", "3", "--bogus"],
        &["reduce", "--alpha", "0", "--beta", "3"],
        &["xreduce", "--a", "1", "--q", "1"],
        &["--prime-bound", "0", "verify", "--k", "3"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_and_version_exit_0() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("minimal-modulus"));
    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("twogen"));
}

#[test]
fn enumeration_cap_exits_3() {
    let (code, _, err) = run(&["enumerate", "--genus", "40", "--count-only"]);
    assert_eq!(code, 3);
    assert!(err.contains("cap"));
}

#[test]
fn verification_commands() {
    let (code, out, _) = run(&["verify", "--k", "9"]);
    assert_eq!(code, 0);
    assert!(out.contains("302 odd primes p <= 2000: 0 mismatches"));
    let (code, out, _) = run(&["--prime-bound", "3000", "verify-dependence", "--k", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("violations: 0"));
    let (code, out, _) = run(&["reduce", "--alpha", "7", "--beta", "2", "--verify"]);
    assert_eq!(code, 0);
    assert!(out.contains("= gcd(p - 8, 129)"));
    let (_, out, _) = run(&["minimal-modulus", "--k", "4"]);
    assert!(out.contains(": 7 = 7 "), "{out}");
}

#[test]
fn xreduce_output() {
    let (code, out, _) = run(&["xreduce", "--a", "8", "--q", "17", "--s", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "X_{8,17}(p^2) = X_{5,17}(p)X_{12,17}(p)\n");
    let (_, out, _) = run(&["xreduce", "--a", "-1", "--q", "3", "--s", "2"]);
    assert_eq!(out, "X_{-1,3}(p^2) = 1\n");
}

#[test]
fn json_shapes() {
    let parse = |args: &[&str]| -> serde_json::Value {
        let mut full = vec!["--json"];
        full.extend_from_slice(args);
        let (code, out, _) = run(&full);
        assert_eq!(code, 0, "{args:?}");
        serde_json::from_str(&out).unwrap()
    };
    let v = parse(&["minimal-modulus", "--k", "10"]);
    assert_eq!(v["k"], 10);
    assert_eq!(v["constant"], 7);
    assert_eq!(v["natural_modulus"], "1103249");
    assert!(v["minimal_modulus"].is_string());
    let first = &v["terms"][0][0];
    assert_eq!(
        (first["a"].as_u64(), first["q"].as_u64()),
        (Some(3), Some(7))
    );

    let v = parse(&["derive", "--k", "9"]);
    assert_eq!(v["terms"].as_array().unwrap().len(), 9);
    assert!(v.get("minimal_modulus").is_none());

    let v = parse(&["modulus", "--k", "10"]);
    assert_eq!(v["modulus"], "16548735");
    assert_eq!(v["status"], "complete");
    assert_eq!(v["per_i"].as_array().unwrap().len(), 10);

    let v = parse(&["count", "--genus", "7", "--witnesses"]);
    assert_eq!(v["count"], 2);
    assert_eq!(v["witnesses"][1]["u"], "2");

    let v = parse(&["verify", "--k", "3"]);
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);

    let v = parse(&["enumerate", "--genus", "5", "--count-only"]);
    assert_eq!(v[5]["total"], 12);

    let v = parse(&["reduce", "--alpha", "5", "--beta", "4", "--verify"]);
    assert_eq!(v["congruence"]["modulus"], "33");
    assert!(v["verification"]["counterexample"].is_null());
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["derive", "--k", "10", "--style", "case-table"][..],
        &["--json", "modulus", "--k", "9"],
        &["--threads", "3", "verify", "--k", "7"],
        &["enumerate", "--genus", "6"],
    ] {
        let first = run_in(dir.path(), args);
        let second = run_in(dir.path(), args);
        assert_eq!(first, second, "{args:?}");
    }
}

#[test]
fn cache_written_only_when_asked_or_present() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("factors.txt");
    // an explicit path is created when new factorizations are found
    let (code, _, _) = run_in(dir.path(), &["count", "--genus", "123456789012345"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("246913578024690 = "));
    // and reloaded on the next run
    let cache = twogen::FactorCache::load(&path).unwrap();
    assert!(!cache.is_empty());
}

#[test]
fn corrupt_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("factors.txt"), "12 = 2 * 5\n").unwrap();
    let (code, _, err) = run_in(dir.path(), &["modulus", "--k", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1"), "{err}");
}
