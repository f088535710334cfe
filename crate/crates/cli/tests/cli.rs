use std::path::Path;
use std::process::{Command, Output};

fn dedekind(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dedekind"))
        .arg("--cache-path")
        .arg(cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    assert_eq!(code(&dedekind(&["dprime", "D(8)"], &cache)), 0);
    assert_eq!(code(&dedekind(&["dprime", "S(3)"], &cache)), 2);
    assert_eq!(code(&dedekind(&["dprime", "D(8) x"], &cache)), 2);
    assert_eq!(code(&dedekind(&["dprime", "M(2,2)"], &cache)), 3);
    assert_eq!(code(&dedekind(&["dprime", "G(2,5,2)"], &cache)), 3);
    assert_eq!(code(&dedekind(&["dprime", "C(600)"], &cache)), 4);
    assert_eq!(code(&dedekind(&["dstar", "C(300)"], &cache)), 4);
    assert_eq!(
        code(&dedekind(
            &["--max-order", "4096", "dprime", "C(2)"],
            &cache
        )),
        3
    );
    assert_eq!(code(&dedekind(&["verify", "no-such-suite"], &cache)), 3);
    assert_eq!(code(&dedekind(&["density", "3", "2", "0.01"], &cache)), 3);
    assert_eq!(
        code(&dedekind(
            &[
                "density",
                "1",
                "2",
                "1/1000000000000",
                "--prime-budget",
                "5"
            ],
            &cache
        )),
        4
    );
}

#[test]
fn values_in_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    assert_eq!(stdout(&dedekind(&["dprime", "He(3)"], &cache)), "11/19\n");
    assert_eq!(
        stdout(&dedekind(&["dstar", "C(2) x D(8)"], &cache)),
        "27/35\n"
    );
    assert_eq!(
        stdout(&dedekind(&["dstar", "--exhaustive", "D(8)"], &cache)),
        "4/5\n"
    );
    assert_eq!(stdout(&dedekind(&["dprime", "Q(8)"], &cache)), "1/1\n");
    let out = dedekind(&["--json", "dprime", "M(2,4)"], &cache);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["d_prime"], serde_json::json!({ "num": 10, "den": 11 }));
    assert_eq!(v["spec"], "M(2,4)");
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let first = dedekind(&["--json", "info", "He(3)"], &cache);
    assert_eq!(code(&first), 0);
    assert!(cache.exists());
    let second = dedekind(&["--json", "info", "He(3)"], &cache);
    assert_eq!(first.stdout, second.stdout);

    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("ms");
        v
    };
    let uncached = dedekind(&["--no-cache", "--json", "info", "He(3)"], &cache);
    assert_eq!(strip(&first), strip(&uncached));

    let stored: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&cache).unwrap()).unwrap();
    let entry = &stored["entries"][format!("He(3)@{}", dedekind_version())];
    assert_eq!(entry["spec"], "He(3)");
    assert_eq!(
        entry["report"]["d_prime"],
        serde_json::json!({ "num": 11, "den": 19 })
    );
    assert!(!dir.path().join("cache.json.lock").exists());
}

fn dedekind_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

#[test]
fn stale_cache_entries_are_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let bogus = serde_json::json!({ "entries": { "D(8)@0.0.0-old": {
        "spec": "D(8)", "engine_version": "0.0.0-old", "timestamp": 0,
        "report": { "spec": "D(8)", "order": 8, "lattice_size": 10, "k_prime": 1, "normal_count": 1, "nu": 0,
            "d_prime": { "num": 1, "den": 10 }, "d_star": null,
            "flags": { "abelian": true, "dedekind": true, "nilpotent": true, "iwasawa": true, "modular_lattice": true, "schmidt": false },
            "ms": 0 } } } });
    std::fs::write(&cache, bogus.to_string()).unwrap();
    assert_eq!(stdout(&dedekind(&["dprime", "D(8)"], &cache)), "4/5\n");
}

#[test]
fn lattice_dot_output() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let out = stdout(&dedekind(&["lattice", "--dot", "D(6)"], &cache));
    assert!(out.starts_with("digraph lattice {\n"));
    assert!(out.ends_with("}\n"));
    assert_eq!(out.matches(" [label=").count(), 6);
    assert_eq!(out.matches(" -> ").count(), 8);
    assert_eq!(out.matches("doublecircle").count(), 3);
    assert_eq!(out.matches("style=filled").count(), 4);
}

#[test]
fn lattice_json_lists_every_subgroup() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let out = dedekind(&["--json", "lattice", "D(8)"], &cache);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["subgroups"].as_array().unwrap().len(), 10);
}

#[test]
fn density_reaches_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let out = dedekind(&["--json", "density", "2", "3", "0.01"], &cache);
    assert_eq!(code(&out), 0);
    let steps: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let last = steps.last().unwrap();
    let gap = &last["gap"];
    let (n, d) = (gap["num"].as_i64().unwrap(), gap["den"].as_i64().unwrap());
    assert!(100 * n < d);
}

#[test]
fn formulas_and_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    assert_eq!(
        stdout(&dedekind(&["formula", "modular", "2", "4"], &cache)),
        "10/11\n"
    );
    assert_eq!(
        stdout(&dedekind(&["formula", "heisenberg", "3"], &cache)),
        "11/19\n"
    );
    assert_eq!(
        stdout(&dedekind(&["formula", "ea-subgroups", "2", "3"], &cache)),
        "16\n"
    );
    let out = dedekind(&["--json", "sweep", "dihedral", "3", "6"], &cache);
    assert_eq!(code(&out), 0);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["match"] == true));
}

#[test]
fn verify_lists_suites() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let out = stdout(&dedekind(&["verify", "--list"], &cache));
    assert_eq!(out.lines().count(), 12);
    assert!(out.lines().any(|l| l == "properties"));
}
