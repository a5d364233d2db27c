use std::process::Command;

fn stacksort(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_stacksort"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/tests/golden/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

fn strip_elapsed(s: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
    v["payload"].as_object_mut().unwrap().remove("elapsed_ms");
    v.to_string()
}

#[test]
fn apply() {
    assert_eq!(
        stacksort(&["apply", "abcac"]),
        ("cbcaa\n".into(), String::new(), 0)
    );
    assert_eq!(
        stacksort(&["apply", "abcabc", "--iterations", "3"]).0,
        "aaccbb\n"
    );
    assert_eq!(stacksort(&["apply", ""]).0, "\n");
    assert_eq!(
        stacksort(&["apply", "1,2,1,2", "--sigma", "ab"]).0,
        "abab\n"
    );
    let (out, _, code) = stacksort(&[
        "apply",
        "abcabc",
        "--iterations",
        "3",
        "--format",
        "records",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("apply_abcabc_3.json"));
}

#[test]
fn trace() {
    let (out, _, _) = stacksort(&["trace", "abcac"]);
    assert_eq!(out, golden("trace_abcac.txt"));
    assert_eq!(
        stacksort(&["trace", "abcac", "--format", "records"]).0,
        golden("trace_abcac.json")
    );
    assert_eq!(stacksort(&["trace", "aa"]).0.lines().count(), 4 + 1);
    let (out, _, _) = stacksort(&["trace", "abcabc"]);
    assert_eq!(
        out.lines()
            .filter(|l| l.starts_with("PUSH") || l.starts_with("POP"))
            .count(),
        12
    );
    assert!(out.ends_with("output=cbcbaa\n"));
    let (csv, _, _) = stacksort(&["trace", "abcac", "--format", "csv"]);
    assert_eq!(csv.lines().nth(4), Some("4,pop,c,ab,c"));
}

#[test]
fn depth() {
    assert_eq!(stacksort(&["depth", "abcabc"]).0, "3\n");
    assert_eq!(stacksort(&["depth", "aabb"]).0, "0\n");
    assert_eq!(
        stacksort(&["depth", "abab", "--sigma", "ab"]),
        ("never-sorts (cycle)\n".into(), String::new(), 0)
    );
    assert_eq!(
        stacksort(&["depth", "abab", "--sigma", "ab", "--strict"]).2,
        1
    );
    assert_eq!(
        stacksort(&["depth", "abab", "--sigma", "ab", "--format", "records"]).0,
        golden("depth_abab_ab.json")
    );
    let (out, _, code) = stacksort(&["depth", "abcabc", "--cap", "1"]);
    assert_eq!((out.as_str(), code), ("indeterminate (cap)\n", 3));
}

#[test]
fn stats() {
    let (out, _, _) = stacksort(&["stats", "aaabcdbd"]);
    assert!(out.contains("C=2\n") && out.contains("nc=b\n") && out.contains("sorted=false\n"));
    let (out, _, _) = stacksort(&["stats", "aabbcc"]);
    assert!(out.contains("C=3\n") && out.contains("sorted=true\n") && out.contains("nc=none\n"));
    assert_eq!(
        stacksort(&["stats", "abcac", "--format", "records"]).0,
        golden("stats_abcac.json")
    );
    let (out, _, _) = stacksort(&["stats", "3,1,3,2,1"]);
    assert!(out.contains("canonical=abacb\n"));
}

#[test]
fn enumerate() {
    assert_eq!(
        stacksort(&["enumerate", "--n", "3", "--length", "6"]).0,
        "N=3 L=6 total=90 witnesses=1\n"
    );
    let (out, _, _) = stacksort(&["enumerate", "--n", "3", "--length", "6", "--witnesses"]);
    assert!(out.lines().nth(1).unwrap().starts_with("abcabc "));
    assert_eq!(
        stacksort(&["enumerate", "--n", "3", "--length", "7"]).0,
        "N=3 L=7 total=301 witnesses=12\n"
    );
    assert_eq!(
        stacksort(&["enumerate", "--n", "3", "--length", "3"]).0,
        "N=3 L=3 total=1 witnesses=0\n"
    );
    let (out, _, _) = stacksort(&[
        "enumerate",
        "--n",
        "3",
        "--length",
        "7",
        "--witnesses",
        "--format",
        "records",
    ]);
    assert_eq!(
        strip_elapsed(&out),
        strip_elapsed(&golden("enumerate_3_7.json"))
    );
    assert_eq!(
        stacksort(&["enumerate", "--n", "3", "--n-max", "4", "--format", "csv"]).0,
        golden("table_3_4.csv")
    );
    assert_eq!(stacksort(&["enumerate", "--n", "4", "--length", "3"]).2, 2);
}

#[test]
fn structured_output_is_deterministic() {
    let args = [
        "enumerate",
        "--n",
        "4",
        "--length",
        "9",
        "--witnesses",
        "--format",
        "records",
    ];
    let a = stacksort(&args).0;
    let b = stacksort(&[&args[..], &["--jobs", "1"]].concat()).0;
    assert_eq!(strip_elapsed(&a), strip_elapsed(&b));
}

#[test]
fn verify() {
    let (out, _, code) = stacksort(&["verify", "all", "--n-max", "4", "--corpus-len", "8"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("0 failed\n"));
    let (out, _, code) = stacksort(&["verify", "theorem-count", "--n", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("count 35"));
    let (_, err, code) = stacksort(&["verify", "bogus"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown suite"));
    let (out, _, code) = stacksort(&["verify", "probe", "--sigma", "ab", "--lmax", "4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("found aba"));
    assert_eq!(stacksort(&["verify", "probe", "--sigma", "aba"]).2, 2);
    let (out, _, _) = stacksort(&["verify", "family-counts", "--n", "3", "--format", "records"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(
        v["payload"]["checks"][0]["detail"],
        "tail-heavy=3 prefix-heavy=3 head-triple=6"
    );
}

#[test]
fn usage_errors() {
    assert_eq!(stacksort(&["apply", "ab,1"]).2, 2);
    assert_eq!(stacksort(&["apply", "abc", "--sigma", ""]).2, 2);
    assert_eq!(stacksort(&["frobnicate"]).2, 2);
    assert_eq!(stacksort(&["apply", "abc", "--jobs", "0"]).2, 2);
    let (_, err, _) = stacksort(&["stats", "a?b"]);
    assert!(err.contains("\"?\""));
}

#[test]
fn emitted_words_round_trip() {
    let (out, _, _) = stacksort(&["enumerate", "--n", "4", "--length", "9", "--witnesses"]);
    for line in out.lines().skip(1) {
        let w = line.split(' ').next().unwrap();
        let (again, _, _) = stacksort(&["stats", w]);
        assert!(again.starts_with(&format!("word={w}\n")));
    }
}
