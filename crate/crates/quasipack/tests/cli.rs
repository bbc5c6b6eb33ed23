//! Black-box tests of the binary: exit-code contract, determinism, file
//! formats, and the JSON report mirror.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quasipack"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, contents).unwrap();
    p
}

const CYCLE: &str = "3 6 4\n0 1 2\n1 2 3\n3 4 5\n0 4 5\n";
const K4: &str = "3 4 4\n0 1 2\n0 1 3\n0 2 3\n1 2 3\n";

#[test]
fn gen_is_deterministic_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let h1 = path(&dir, "h1.kg");
    let c1 = path(&dir, "c1.col");
    let h2 = path(&dir, "h2.kg");
    let c2 = path(&dir, "c2.col");
    let base = [
        "gen", "--construction", "a", "--k", "3", "--n", "24", "--seed", "7",
    ];
    let out = run(&[&base[..], &["--out", &h1, "--coloring", &c1]].concat());
    assert_eq!(code(&out), 0, "{out:?}");
    let out = run(&[&base[..], &["--out", &h2, "--coloring", &c2]].concat());
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(&h1).unwrap(), std::fs::read(&h2).unwrap());
    assert_eq!(std::fs::read(&c1).unwrap(), std::fs::read(&c2).unwrap());

    let out = run(&[
        "verify-construction", "--construction", "a", "--k", "3", "--n", "24",
        "--seed", "7", "--h", &h1, "--coloring", &c1,
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verified"));

    // a different seed must not verify
    let out = run(&[
        "verify-construction", "--construction", "a", "--k", "3", "--n", "24",
        "--seed", "8", "--h", &h1, "--coloring", &c1,
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn check_disc_witness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = path(&dir, "h.kg");
    let c = path(&dir, "c.col");
    let w = path(&dir, "w.lay");
    run(&[
        "gen", "--construction", "a", "--k", "3", "--n", "24", "--seed", "3",
        "--out", &h, "--coloring", &c,
    ]);
    // the zero-color layout of the coloring violates the condition
    let out = run(&[
        "check-disc", "--h", &h, "--i", "1,2|1,3|2,3", "--p", "2/3", "--mu",
        "1/1000", "--witness", &c, "--witness-out", &w,
    ]);
    assert_eq!(code(&out), 1, "{out:?}");
    assert!(stdout(&out).starts_with("status violated"));
    assert!(Path::new(&w).exists());
    // the emitted witness layout re-checks to the same verdict
    let again = run(&[
        "check-disc", "--h", &h, "--i", "1,2|1,3|2,3", "--p", "2/3", "--mu",
        "1/1000", "--witness", &w,
    ]);
    assert_eq!(code(&again), 1);
    assert_eq!(stdout(&again), stdout(&out));
}

#[test]
fn check_disc_exhaustive_and_search() {
    let dir = tempfile::tempdir().unwrap();
    // complete 2-graph on 4 vertices: satisfied over the whole layout space
    let h = write(&dir, "k4.kg", "2 4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let out = run(&[
        "check-disc", "--h", &h, "--i", "1|2", "--p", "1/2", "--mu", "1/10",
        "--exhaustive",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).starts_with("status satisfied-exhaustive"));
    // empty host at high p: the search finds a violating layout
    let e = write(&dir, "e.kg", "2 6 0\n");
    let out = run(&[
        "check-disc", "--h", &e, "--i", "1|2", "--p", "9/10", "--mu", "1/100",
        "--seed", "5",
    ]);
    assert_eq!(code(&out), 1);
    // complete host: search cannot find anything, undetermined
    let out = run(&[
        "check-disc", "--h", &h, "--i", "1|2", "--p", "1/2", "--mu", "1/10",
        "--seed", "5",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_adapted_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = write(&dir, "cycle.kg", CYCLE);
    let k4 = write(&dir, "k4.kg", K4);
    let cert = path(&dir, "cert.txt");

    let out = run(&[
        "check-adapted", "--f", &cycle, "--i", "1,2|3", "--j", "e",
        "--cert-out", &cert,
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("special"));
    assert!(std::fs::read_to_string(&cert).unwrap().contains("edge"));

    let out = run(&["check-adapted", "--f", &k4, "--i", "1|2|3"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not-adapted"));

    let out = run(&["check-adapted", "--f", &k4, "--i", "1|2|3", "--budget", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("budget-exceeded"));
}

#[test]
fn count_and_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let edge = write(&dir, "edge.kg", "3 3 1\n0 1 2\n");
    let k4 = write(&dir, "k4.kg", K4);

    // single 3-edge into K_4^(3): 3! * 4 = 24 embeddings
    let out = run(&["count", "--f", &edge, "--h", &k4]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "count 24\n");

    let out = run(&["count", "--f", &edge, "--h", &k4, "--pin", "0=0"]);
    assert_eq!(stdout(&out), "count 6\n");

    // --json carries the schema marker and the same number
    let out = run(&["count", "--f", &edge, "--h", &k4, "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], "quasipack/1");
    assert_eq!(v["count"], "24");

    // estimate is deterministic per seed
    let a = run(&["estimate", "--f", &edge, "--h", &k4, "--samples", "5000", "--seed", "11"]);
    let b = run(&["estimate", "--f", &edge, "--h", &k4, "--samples", "5000", "--seed", "11"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn pack_exit_codes_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(&dir, "k4.kg", K4);
    let mut k8 = String::from("3 8 56\n");
    for a in 0..8 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                k8.push_str(&format!("{a} {b} {c}\n"));
            }
        }
    }
    let k8 = write(&dir, "k8.kg", &k8);
    let pk = path(&dir, "out.pk");
    let out = run(&["pack", "--h", &k8, "--f", &k4, "--exact", "--out", &pk]);
    assert_eq!(code(&out), 0, "{out:?}");
    let packing = std::fs::read_to_string(&pk).unwrap();
    assert_eq!(packing.lines().count(), 2); // two disjoint K4 copies

    // no packing in an empty host of matching order
    let empty = write(&dir, "empty.kg", "3 8 0\n");
    let out = run(&["pack", "--h", &empty, "--f", &k4, "--exact"]);
    assert_eq!(code(&out), 1);

    // divisibility failure is also "none"
    let seven = write(&dir, "seven.kg", "3 7 0\n");
    let out = run(&["pack", "--h", &seven, "--f", &k4]);
    assert_eq!(code(&out), 1);
}

#[test]
fn absorb_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let edge = write(&dir, "edge.kg", "3 3 1\n0 1 2\n");
    let mut k12 = String::new();
    let mut m = 0;
    for a in 0..12 {
        for b in a + 1..12 {
            for c in b + 1..12 {
                k12.push_str(&format!("{a} {b} {c}\n"));
                m += 1;
            }
        }
    }
    let k12 = write(&dir, "k12.kg", &format!("3 12 {m}\n{k12}"));

    let out = run(&["absorb", "--h", &k12, "--f", &edge, "--b", "0,1,2", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{out:?}");
    let first = stdout(&out).lines().next().unwrap().to_string();
    let absorber: Vec<&str> = first.split_whitespace().collect();
    assert_eq!(absorber.len(), 6); // f² − f

    // checking that reported absorber confirms it
    let out = run(&[
        "absorb", "--h", &k12, "--f", &edge, "--a", &absorber.join(","), "--b", "0,1,2",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("absorbs"));

    // an empty host has no absorbers for any b-set
    let empty = write(&dir, "empty.kg", "3 12 0\n");
    let out = run(&["absorb", "--h", &empty, "--f", &edge, "--b", "0,1,2", "--seed", "1"]);
    assert_eq!(code(&out), 1);

    let gout = path(&dir, "grid.kg");
    let out = run(&["grid", "--f", &edge, "--out", &gout, "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["vertices"], 9);
    assert_eq!(v["column_copies"], 3);
    assert_eq!(v["row_copies"], 2);
    assert_eq!(v["zeroth_row"], serde_json::json!([0, 1, 2]));
}

#[test]
fn usage_and_io_errors() {
    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 3);

    let out = run(&["count", "--f", "/no/such/file.kg", "--h", "/no/such/other.kg"]);
    assert_eq!(code(&out), 4);

    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.kg", "not a graph\n");
    let out = run(&["count", "--f", &bad, "--h", &bad]);
    assert_eq!(code(&out), 3);

    // bad rational is a usage error
    let edge = write(&dir, "edge.kg", "3 3 1\n0 1 2\n");
    let out = run(&[
        "check-disc", "--h", &edge, "--i", "e", "--p", "x/y", "--mu", "1/10",
    ]);
    assert_eq!(code(&out), 3);

    // --json errors still produce a schema-tagged object
    let out = bin()
        .args(["count", "--f", "/no/such/file.kg", "--h", "/none", "--json"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], "quasipack/1");
    assert_eq!(v["error"], "io");
}
