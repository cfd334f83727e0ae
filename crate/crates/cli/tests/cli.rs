//! End-to-end runs of the `twcoe` binary: outputs, exit codes and reproducibility.

use std::process::{Command, Output};

fn twcoe(cache: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twcoe")).args(args).env("TWCOE_CACHE_DIR", cache).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn moment_outputs_and_exit_codes() {
    let cache = tempfile::tempdir().unwrap();
    let o = twcoe(cache.path(), &["moment", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3(N^3+3N^2-N-2)/((N-1)(N+1)(N+3))"));
    assert!(stdout(&o).contains("series: 3 + 3/N^3 + ..."));

    let o = twcoe(cache.path(), &["moment", "--k", "2", "--eval", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("M_2(10) = 2"));

    let o = twcoe(cache.path(), &["moment", "--k", "3", "--eval", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pole at N = 1"));

    let o = twcoe(cache.path(), &["moment", "--k", "1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = twcoe(cache.path(), &["moment", "--k", "6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_and_cache() {
    let cache = tempfile::tempdir().unwrap();
    let first = twcoe(cache.path(), &["wg", "--ensemble", "coe", "--k", "3", "--type", "3"]);
    let manifest_line = stderr(&first).lines().find(|l| l.starts_with("manifest: ")).unwrap().to_string();
    let manifest: serde_json::Value = serde_json::from_str(manifest_line.trim_start_matches("manifest: ")).unwrap();
    assert_eq!(manifest["subcommand"], "wg");
    assert_eq!(manifest["cache"]["misses"], 3);
    let second = twcoe(cache.path(), &["wg", "--ensemble", "coe", "--k", "3", "--type", "3"]);
    assert!(stderr(&second).contains("\"hits\":3"));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn json_output_is_reproducible() {
    let cache = tempfile::tempdir().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let mut all: Vec<&str> = args.to_vec();
        let p = path.to_str().unwrap().to_string();
        all.push("--json");
        all.push(&p);
        assert!(twcoe(cache.path(), &all).status.success());
        std::fs::read(&path).unwrap()
    };
    assert_eq!(read("a.json", &["moment", "--k", "3"]), read("b.json", &["moment", "--k", "3"]));
    let mc = ["mc", "--k", "2", "--n", "9", "--samples", "1500", "--seed", "3"];
    assert_eq!(read("c.json", &mc), read("d.json", &mc));
    let single = read("e.json", &[&mc[..], &["--threads", "1"]].concat());
    assert_eq!(read("c.json", &mc), single);
}

#[test]
fn wg_examples() {
    let cache = tempfile::tempdir().unwrap();
    let o = twcoe(cache.path(), &["wg", "--ensemble", "coe", "--k", "2", "--type", "2"]);
    assert_eq!(stdout(&o).trim(), "-1/(N(N+1)(N+3))");
    let o = twcoe(cache.path(), &["wg", "--ensemble", "cue", "--k", "1", "--type", "1"]);
    assert_eq!(stdout(&o).trim(), "1/N");
    let o = twcoe(cache.path(), &["wg", "--ensemble", "coe", "--k", "3", "--type", "3", "--expand", "1"]);
    assert!(stdout(&o).contains("series: 2/N^5 + ..."));
    let o = twcoe(cache.path(), &["wg", "--ensemble", "coe", "--k", "3", "--type", "2,1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_examples() {
    let cache = tempfile::tempdir().unwrap();
    let o = twcoe(cache.path(), &["classify", "--k", "4", "--verify", "--count"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all clauses pass"));
    let o = twcoe(cache.path(), &["classify", "--k", "5", "--alpha", "1,1,1,1,1", "--beta", "3,1,1", "--count"]);
    assert!(stdout(&o).contains("Irreg(id; 3) 25"));
    let o = twcoe(cache.path(), &["classify", "--k", "3", "--alpha", "bogus", "--beta", "1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = twcoe(cache.path(), &["classify", "--k", "3", "--alpha", "1,1,1", "--beta", "2,1", "--list"]);
    let listed = stdout(&o).lines().filter(|l| l.starts_with("Irreg (")).count();
    assert_eq!(listed, 9);
}

#[test]
fn phi_examples() {
    let cache = tempfile::tempdir().unwrap();
    let o = twcoe(cache.path(), &["phi", "--k", "3", "--omega", "(1 ~1)", "--oracle", "--n", "7", "--perm", "grand"]);
    assert_eq!(stdout(&o).trim(), "chi=1 m=2 phi=N^2 oracle=49 OK");
    let o = twcoe(cache.path(), &["phi", "--k", "6", "--omega", "(2 ~3)(~2 3)(4 ~5)(~4 5)"]);
    assert_eq!(stdout(&o).trim(), "chi=0 phi=0");
    let o = twcoe(cache.path(), &["phi", "--k", "2", "--omega", "(1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position"));
}

#[test]
fn mc_examples() {
    let cache = tempfile::tempdir().unwrap();
    let o = twcoe(cache.path(), &["mc", "--k", "2", "--n", "16", "--samples", "5000", "--seed", "7", "--twist", "grand"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ensemble,twist,k,n,samples,seed,mean,std_error,reference,z\ncoe,grand,2,16,5000,7,"));
    let o = twcoe(cache.path(), &["mc", "--k", "2", "--n", "3", "--samples", "500", "--twist", "grand"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("exact reference withheld"));
    let o = twcoe(cache.path(), &["mc", "--k", "2", "--n", "8", "--twist", "stride"]);
    assert_eq!(o.status.code(), Some(2));
}
