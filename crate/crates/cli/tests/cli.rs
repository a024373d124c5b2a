use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tour_patrol::scenario::ScenarioFile;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tour-patrol"));
    c.env_remove("PATROL_OPT_CAP");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn load(p: &Path) -> ScenarioFile {
    ScenarioFile::from_json(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn solved_wd(p: &Path) -> f64 {
    load(p).solution.unwrap().worst_delay
}

/// Column `name` of the single data row of a CSV text.
fn field(csv_text: &str, name: &str) -> f64 {
    let mut lines = csv_text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].parse().unwrap()
}

#[test]
fn generate_kinds_have_expected_sizes() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "g.json");
    let out = ok(&[
        "generate",
        "grid",
        "--w",
        "20",
        "--h",
        "60",
        "--n",
        "8",
        "--rcom",
        "1",
        "--seed",
        "7",
        "-o",
        s(&g),
    ]);
    assert!(out.starts_with("n=8 "));
    assert_eq!(load(&g).tours.len(), 8);

    let c = path(&dir, "c.json");
    ok(&[
        "generate",
        "chainarms",
        "--k",
        "6",
        "--big",
        "1000",
        "--small",
        "0.1",
        "-o",
        s(&c),
    ]);
    assert_eq!(load(&c).tours.len(), 1 + 6 + 6 * 6);

    let f = path(&dir, "f.json");
    ok(&["generate", "3sat", "--formula", "example", "-o", s(&f)]);
    // 4 variables + 3 clauses + 3 hub tours
    assert_eq!(load(&f).tours.len(), 10);
}

#[test]
fn solve_on_a_tree_agrees_across_methods() {
    let dir = TempDir::new().unwrap();
    let t = path(&dir, "t.json");
    ok(&["generate", "random", "--n", "6", "--seed", "4", "--tree", "-o", s(&t)]);
    let mut wds = Vec::new();
    for m in ["sp", "cg", "opt"] {
        let o = path(&dir, &format!("{m}.json"));
        ok(&["solve", s(&t), "--method", m, "-o", s(&o)]);
        wds.push(solved_wd(&o));
    }
    assert!(wds.iter().all(|&w| (w - wds[0]).abs() < 1e-9), "{wds:?}");
}

#[test]
fn solve_three_sat_example_reaches_bound() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "f.json");
    ok(&["generate", "3sat", "--formula", "example", "-o", s(&f)]);
    let out = ok(&["solve", s(&f), "--method", "opt"]);
    assert!(out.contains("WD=4 "), "{out}");
    assert_eq!(solved_wd(&f), 4.0);
}

#[test]
fn cg_beats_sp_on_chain_arms() {
    let dir = TempDir::new().unwrap();
    let c = path(&dir, "c.json");
    ok(&[
        "generate",
        "chainarms",
        "--k",
        "6",
        "--big",
        "1000",
        "--small",
        "0.1",
        "-o",
        s(&c),
    ]);
    let (sp, cg) = (path(&dir, "sp.json"), path(&dir, "cg.json"));
    ok(&["solve", s(&c), "--method", "sp", "-o", s(&sp)]);
    ok(&["solve", s(&c), "--method", "cg", "-o", s(&cg)]);
    assert!(solved_wd(&cg) < solved_wd(&sp));
}

#[test]
fn size_cap_refusal_and_env_override() {
    let dir = TempDir::new().unwrap();
    let c = path(&dir, "c.json");
    ok(&[
        "generate",
        "chainarms",
        "--k",
        "6",
        "--big",
        "1000",
        "--small",
        "0.1",
        "-o",
        s(&c),
    ]);
    let out = run(&["solve", s(&c), "--method", "opt"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));

    let f = path(&dir, "f.json");
    ok(&["generate", "3sat", "--formula", "example", "-o", s(&f)]);
    let out = bin()
        .args(["solve", s(&f), "--method", "opt"])
        .env("PATROL_OPT_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "f.json");
    let out = run(&["generate", "3sat", "--formula", "x1 x2", "-o", s(&f)]);
    assert_eq!(out.status.code(), Some(2));
    ok(&["generate", "3sat", "--formula", "example", "-o", s(&f)]);
    // no solution yet
    assert_eq!(run(&["simulate", s(&f)]).status.code(), Some(2));
    // no grid embedding
    assert_eq!(run(&["export", s(&f), "--format", "ascii-map"]).status.code(), Some(2));
}

#[test]
fn simulate_matches_analytic_and_replays() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "g.json");
    ok(&[
        "generate",
        "grid",
        "--w",
        "20",
        "--h",
        "60",
        "--n",
        "8",
        "--rcom",
        "1",
        "--seed",
        "7",
        "-o",
        s(&g),
    ]);
    ok(&["solve", s(&g), "--method", "cg"]);
    let plain = ok(&["simulate", s(&g)]);
    assert_eq!(field(&plain, "WI_measured"), field(&plain, "WI_analytic"));
    assert_eq!(field(&plain, "WD_measured"), field(&plain, "WD_analytic"));

    let trace = path(&dir, "trace.csv");
    let disturbed = ok(&[
        "simulate",
        s(&g),
        "--disturb",
        "tour=5,t=300,dt=2",
        "--trace",
        s(&trace),
    ]);
    assert!(field(&disturbed, "convergence_time") > field(&plain, "convergence_time"));
    assert_eq!(field(&disturbed, "WD_measured"), field(&disturbed, "WD_analytic"));
    let replayed = ok(&["simulate", s(&g), "--replay", s(&trace)]);
    assert_eq!(replayed, disturbed);

    let text = std::fs::read_to_string(&trace).unwrap();
    let tampered = path(&dir, "tampered.csv");
    std::fs::write(&tampered, text.replace("disturb,", "arrive,")).unwrap();
    assert_ne!(
        run(&["simulate", s(&g), "--replay", s(&tampered)]).status.code(),
        Some(0)
    );
}

#[test]
fn compare_corridor_is_deterministic_and_ordered() {
    let dir = TempDir::new().unwrap();
    let c = path(&dir, "c.json");
    ok(&["generate", "corridor", "-o", s(&c)]);
    let first = ok(&["compare", s(&c), "--methods", "sp,cg,singlehop"]);
    assert_eq!(first, ok(&["compare", s(&c), "--methods", "sp,cg,singlehop"]));
    let rows: Vec<Vec<&str>> = first.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let wi = |m: &str| -> f64 { rows.iter().find(|r| r[0] == m).unwrap()[3].parse().unwrap() };
    assert!(wi("sp") < wi("singlehop"));
    assert!(wi("cg") < wi("singlehop"));
}

#[test]
fn exports_are_stable() {
    let dir = TempDir::new().unwrap();
    let r = path(&dir, "r.json");
    ok(&[
        "generate",
        "random",
        "--n",
        "3",
        "--seed",
        "1",
        "--extra",
        "1",
        "-o",
        s(&r),
    ]);
    let lp = ok(&["export", s(&r), "--format", "lp"]);
    assert_eq!(lp, ok(&["export", s(&r), "--format", "lp"]));
    let card = lp.lines().find(|l| l.trim_start().starts_with("tree_card:")).unwrap();
    assert!(card.trim_end().ends_with("= 3"), "{card}");

    ok(&["solve", s(&r), "--method", "cg"]);
    let dot = ok(&["export", s(&r), "--format", "dot"]);
    assert_eq!(dot.matches("style=bold").count(), 3);
    assert_eq!(dot.matches("style=dashed").count(), 1);

    let c = path(&dir, "c.json");
    ok(&["generate", "corridor", "-o", s(&c)]);
    let map = ok(&["export", s(&c), "--format", "ascii-map"]);
    assert_eq!(map.lines().count(), 20);
    assert!(map.lines().all(|l| l.len() == 40));
}

#[test]
fn scenario_files_round_trip_through_solve() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "g.json");
    ok(&[
        "generate",
        "grid",
        "--w",
        "10",
        "--h",
        "10",
        "--n",
        "3",
        "--seed",
        "2",
        "-o",
        s(&g),
    ]);
    ok(&["solve", s(&g), "--method", "sp"]);
    let text = std::fs::read_to_string(&g).unwrap();
    assert_eq!(ScenarioFile::from_json(&text).unwrap().to_json(), text);
}
