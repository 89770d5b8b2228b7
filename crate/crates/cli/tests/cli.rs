use std::fs;
use std::process::{Command, Output};

fn subsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subsum")).args(args).env_remove("SUBSUM_CAP").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn certificate(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn build_writes_vertex_table_and_edges() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = subsum(&["build", "--n", "3", "--p", "2", "--m", "1", "--format", "edge-list", "--out", d]);
    assert!(out.status.success(), "{}", stderr(&out));
    let vertices = fs::read_to_string(dir.path().join("vertices.tsv")).unwrap();
    assert_eq!(vertices.lines().count(), 15);
    assert!(vertices.starts_with("id\tdim\tbasis\n1\t1\t"));
    let edges = fs::read_to_string(dir.path().join("graph.tsv")).unwrap();
    assert_eq!(edges.lines().count(), 49);
    assert!(edges.lines().all(|l| {
        let (a, b) = l.split_once('\t').unwrap();
        a.parse::<usize>().unwrap() < b.parse::<usize>().unwrap()
    }));
}

#[test]
fn build_dot_to_stdout() {
    let out = subsum(&["build", "--n", "2", "--p", "2", "--format", "dot"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("complete graph"));
    let text = stdout(&out);
    assert!(text.contains("graph subspace_sum {"));
    assert_eq!(text.matches(" -- ").count(), 3);
}

#[test]
fn build_rejects_dimension_one() {
    let out = subsum(&["build", "--n", "1", "--p", "2", "--m", "1"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("vertex set is empty"));
}

#[test]
fn bad_parameters_fail() {
    for args in [
        &["build", "--n", "3", "--p", "4"][..],
        &["degrees", "--n", "0", "--p", "2"],
        &["build", "--n", "3", "--p", "2", "--format", "svg"],
    ] {
        let out = subsum(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn cap_override_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_subsum"))
        .args(["build", "--n", "3", "--p", "2"])
        .env("SUBSUM_CAP", "vertices=10")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("exceeds cap 10"));
}

#[test]
fn degree_tables() {
    let out = subsum(&["degrees", "--n", "3", "--p", "2", "--m", "1"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "k\tcount\tdirect\tformula\tcorrected\tmatch\n1\t7\t4\t4\t4\tmatch\n2\t7\t10\t6\t10\tMISMATCH\n"
    );
    let out = subsum(&["degrees", "--n", "2", "--p", "2", "--m", "1"]);
    assert!(stdout(&out).ends_with("1\t3\t2\t2\t2\tmatch\n"));
}

#[test]
fn aut_count_and_limit() {
    let out = subsum(&["aut-count", "--n", "3", "--p", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "168");
    let out = subsum(&["aut-count", "--n", "3", "--p", "2", "--limit", "20"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("search limit of 20 nodes"));
}

#[test]
fn verify_theorem_reports() {
    let out = subsum(&["verify-theorem", "--n", "3", "--p", "2", "--m", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "brute 168 == closed-form 168; 168/168 decomposed; PASS");
    let out = subsum(&["verify-theorem", "--n", "3", "--p", "2", "--m", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("brute 120960 == closed-form 120960;"));
    assert!(stdout(&out).trim().ends_with("PASS"));
    let out = subsum(&["verify-theorem", "--n", "2", "--p", "2", "--m", "1"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("theorem requires n ≥ 3"));
}

#[test]
fn random_auto_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let base = ["--n", "3", "--p", "3", "--m", "1"];
    let out = subsum(&[&["random-auto"][..], &base, &["--seed", "42", "--out", d]].concat());
    assert!(out.status.success(), "{}", stderr(&out));
    let truth = fs::read_to_string(dir.path().join("truth.txt")).unwrap();
    let perm = dir.path().join("perm.tsv");
    let cert = dir.path().join("cert.json");
    let out = subsum(
        &[&["decompose"][..], &base, &[perm.to_str().unwrap(), "--out", cert.to_str().unwrap()]].concat(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let json = certificate(&fs::read_to_string(&cert).unwrap());
    assert_eq!(json["verified"], true);
    assert_eq!(format!("A={};s={}", json["A"].as_str().unwrap(), json["s"]), truth.trim());

    // Same seed, same bytes.
    let again = tempfile::tempdir().unwrap();
    let out = subsum(&[&["random-auto"][..], &base, &["--seed", "42", "--out", again.path().to_str().unwrap()]].concat());
    assert!(out.status.success());
    for f in ["perm.tsv", "truth.txt"] {
        assert_eq!(fs::read(dir.path().join(f)).unwrap(), fs::read(again.path().join(f)).unwrap());
    }
}

#[test]
fn identity_decomposes_to_identity() {
    let dir = tempfile::tempdir().unwrap();
    let perm = dir.path().join("id.tsv");
    fs::write(&perm, (1..=14).map(|i| format!("{i}\t{i}\n")).collect::<String>()).unwrap();
    let out = subsum(&["decompose", "--n", "3", "--p", "2", perm.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json = certificate(&stdout(&out));
    assert_eq!(json["verified"], true);
    assert_eq!(json["A"], "1,0,0;0,1,0;0,0,1");
    assert_eq!(json["s"], 0);
}

#[test]
fn decompose_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.tsv");
    fs::write(&missing, (1..=13).map(|i| format!("{i}\t{i}\n")).collect::<String>()).unwrap();
    let out = subsum(&["decompose", "--n", "3", "--p", "2", missing.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 14"), "{}", stderr(&out));

    // Swapping two lines is not an automorphism: certificate, not an error.
    let swapped = dir.path().join("swapped.tsv");
    let mut text: String = (3..=14).map(|i| format!("{i}\t{i}\n")).collect();
    text.push_str("1\t2\n2\t1\n");
    fs::write(&swapped, text).unwrap();
    let out = subsum(&["decompose", "--n", "3", "--p", "2", swapped.to_str().unwrap()]);
    assert!(out.status.success());
    let json = certificate(&stdout(&out));
    assert_eq!(json["verified"], false);
    assert_eq!(json["rejection_stage"], "check_automorphism");
    assert!(json["A"].is_null());
}
