//! Acceptance suite: drives the `dk` binary and prints one PASS/FAIL line
//! per criterion. Exits non-zero if any criterion fails.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use serde_json::Value;

const DK: &str = env!("CARGO_BIN_EXE_dk");

struct Run {
    code: i32,
    stdout: String,
    json: Value,
}

thread_local! {
    /// Every machine report seen during the suite.
    static REPORTS: RefCell<Vec<Value>> = const { RefCell::new(Vec::new()) };
}

fn dk(args: &[&str]) -> Run {
    let out = Command::new(DK).arg("--json").args(args).output().expect("dk runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 output");
    let json: Value = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    REPORTS.with(|r| r.borrow_mut().push(json.clone()));
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout,
        json,
    }
}

fn usizes(v: &Value) -> Vec<usize> {
    v.as_array()
        .map(|a| a.iter().filter_map(|x| x.as_u64().map(|n| n as usize)).collect())
        .unwrap_or_default()
}

fn ok(run: &Run) -> bool {
    run.code == 0 && run.json["passed"] == Value::Bool(true)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `x_n = Σ_j C(n,j)·d_j` for every `n`.
fn binomial_identity(x: &[usize], d: &[usize]) -> bool {
    x.len() == d.len() && (0..x.len()).all(|n| x[n] == (0..=n).map(|j| binomial(n, j) * d[j]).sum::<usize>())
}

fn axiom_suite(failures: &mut Vec<String>) {
    for (preset, diagonal) in [
        ("delta-min:2", false),
        ("delta-max:2", false),
        ("gamma:2", true),
        ("fi-sharp:2", true),
    ] {
        let r = dk(&["validate", "--triple", preset]);
        if !ok(&r) {
            failures.push(format!("{preset} does not validate"));
        }
        let checks: Vec<&str> = r.json["checks"]
            .as_array()
            .into_iter()
            .flatten()
            .filter(|c| c["pass"] == Value::Bool(true))
            .filter_map(|c| c["name"].as_str())
            .collect();
        for axiom in ["T1", "T2", "T3", "T4", "T5"] {
            if !checks.contains(&axiom) {
                failures.push(format!("{preset}: {axiom} not passed"));
            }
        }
        if r.json["data"]["diagonalizable"] != Value::Bool(diagonal) {
            failures.push(format!("{preset}: diagonalizable should be {diagonal}"));
        }
    }
    let r = dk(&["validate", "--triple", "delta-min:2"]);
    let grid = r.json["data"]["pairings"]
        .as_array()
        .and_then(|ps| ps.iter().find(|p| p["object"] == "[2]"))
        .cloned()
        .unwrap_or(Value::Null);
    let pairs: BTreeSet<(String, String)> = grid["iso_pairs"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|p| (p[0].as_str().unwrap_or("").to_string(), p[1].as_str().unwrap_or("").to_string()))
        .collect();
    let expected: BTreeSet<(String, String)> = [
        ("(012)", "0"),
        ("0(12)", "01"),
        ("0(12)", "02"),
        ("(01)2", "02"),
        ("012", "012"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    if pairs != expected {
        failures.push(format!("delta-min:2 grid at [2] is {pairs:?}"));
    }
    let rows: Vec<&str> = grid["rows"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    let cols: Vec<&str> = grid["cols"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    if rows != ["(012)", "0(12)", "(01)2", "012"] || cols != ["0", "01", "02", "012"] {
        failures.push(format!("grid rows {rows:?} cols {cols:?}"));
    }
}

fn corrupted_triple_fails(dir: &Path, failures: &mut Vec<String>) {
    let good = dir.join("delta-min-2.json");
    let r = dk(&["preset", "delta-min:2", "--out", good.to_str().unwrap()]);
    if !ok(&r) {
        failures.push("preset file not written".into());
        return;
    }
    let mut t: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    let all: Vec<Value> = t["category"]["arrows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["id"].clone())
        .collect();
    t["epis"] = Value::Array(all);
    let bad = dir.join("corrupt.json");
    std::fs::write(&bad, serde_json::to_string(&t).unwrap()).unwrap();
    let r = dk(&["validate", "--triple", bad.to_str().unwrap()]);
    let t1 = r.json["data"]["verdicts"]
        .as_array()
        .and_then(|vs| vs.iter().find(|v| v["axiom"] == "T1"))
        .cloned()
        .unwrap_or(Value::Null);
    if r.code != 1 || t1["pass"] != Value::Bool(false) || t1["counterexample"].as_array().is_none_or(Vec::is_empty) {
        failures.push("corrupted triple not rejected at T1 with a counterexample".into());
    }
}

const SIMPLICIAL: [(&str, &str); 6] = [
    ("delta:0", "2"),
    ("delta:1", "2"),
    ("delta:2", "2"),
    ("boundary:2", "2"),
    ("s1", "2"),
    ("delta:1", "3"),
];

fn chain_report(variant: &str, name: &str, k: &str) -> Run {
    dk(&["dk", "--preset", &format!("delta-{variant}:{k}"), "--simplicial", name])
}

fn moore_oracle(failures: &mut Vec<String>) {
    for (name, k) in SIMPLICIAL {
        let r = chain_report("min", name, k);
        let d = &r.json["data"];
        if !ok(&r) || d["normalized"]["dims"] != d["moore"]["dims"] || d["homology"] != d["moore_homology"] {
            failures.push(format!("{name} at k={k} disagrees with the Moore complex"));
        }
    }
    let s1 = chain_report("min", "s1", "2");
    if usizes(&s1.json["data"]["normalized"]["dims"]) != [1, 1, 0] || usizes(&s1.json["data"]["homology"]) != [1, 1, 0] {
        failures.push("S1 values".into());
    }
    let i = chain_report("min", "delta:1", "3");
    if usizes(&i.json["data"]["normalized"]["dims"]) != [2, 1, 0, 0] || usizes(&i.json["data"]["homology"]) != [1, 0, 0, 0]
    {
        failures.push("interval at k=3 values".into());
    }
}

fn min_max(failures: &mut Vec<String>) {
    for (name, k) in SIMPLICIAL {
        let a = chain_report("min", name, k);
        let b = chain_report("max", name, k);
        let (a, b) = (&a.json["data"], &b.json["data"]);
        if a["normalized"]["dims"] != b["normalized"]["dims"] || a["homology"] != b["homology"] || b.is_null() {
            failures.push(format!("{name} at k={k}: min and max differ"));
        }
    }
}

fn concentrated(preset: &str, failures: &mut Vec<String>) {
    let r = dk(&["normalize", "--triple", preset, "--diagram", "span-action"]);
    let x = usizes(&r.json["data"]["input_dims"]);
    let d = usizes(&r.json["data"]["normalized_dims"]);
    if !ok(&r) || d != [0, 1, 0, 0] {
        failures.push(format!("{preset}: normalized dims {d:?}"));
    }
    if !binomial_identity(&x, &d) {
        failures.push(format!("{preset}: binomial identity fails for {x:?} and {d:?}"));
    }
}

const TRIPLES: [&str; 4] = ["delta-min:2", "delta-max:2", "gamma:2", "fi-sharp:2"];

fn round_trips(failures: &mut Vec<String>) {
    for preset in TRIPLES {
        for ring in ["Q", "Fp:3"] {
            let r = dk(&["--ring", ring, "roundtrip", "--triple", preset]);
            let runs = r.json["data"]["runs"].as_array().cloned().unwrap_or_default();
            if !ok(&r) || runs.len() != 3 || runs.iter().any(|x| x["iso_natural"] != Value::Bool(true)) {
                failures.push(format!("{preset} over {ring}: round trip failed"));
            }
        }
    }
}

fn conservation_everywhere(failures: &mut Vec<String>) {
    // run a few extra normalizations, then scan every report of the suite
    for preset in TRIPLES {
        for spec in ["zero", "const:2", "rep:0"] {
            let r = dk(&["normalize", "--triple", preset, "--diagram", spec]);
            if r.code == 2 {
                failures.push(format!("{preset} {spec}: unreadable"));
            }
        }
    }
    let mut seen = 0;
    REPORTS.with(|reports| {
        for rep in reports.borrow().iter() {
            for c in rep["checks"].as_array().into_iter().flatten() {
                let name = c["name"].as_str().unwrap_or("");
                if name.starts_with("dimension conservation") || name.starts_with("witness identities") {
                    seen += 1;
                    if c["pass"] != Value::Bool(true) {
                        failures.push(format!("{} in {}: {name}", rep["command"], rep["inputs"]));
                    }
                }
            }
        }
    });
    if seen < 40 {
        failures.push(format!("only {seen} conservation checks observed"));
    }
}

fn audits(failures: &mut Vec<String>) {
    for (preset, spec) in [("delta-min:2", "simplicial:s1"), ("gamma:2", "span-action")] {
        let r = dk(&["audit", "--triple", preset, "--diagram", spec]);
        let audits = r.json["data"]["audits"].as_array().cloned().unwrap_or_default();
        if !ok(&r) || audits.len() != 3 {
            failures.push(format!("{preset} {spec}: audit failed"));
        }
        for a in &audits {
            let agrees = a["agrees"] == Value::Bool(true)
                && a["composite_invertible"] == Value::Bool(true)
                && a["complement_iso"] == Value::Bool(true);
            if !agrees {
                failures.push(format!("{preset} {spec}: audit at {}", a["object"]));
            }
        }
    }
}

fn kan(failures: &mut Vec<String>) {
    let cases = [("simplicial:delta:1", "1", true), ("simplicial:delta:1", "0", false), ("const:1", "0", true)];
    for (spec, level, expect) in cases {
        let r = dk(&["kan-check", "--triple", "delta-min:3", "--diagram", spec, "--level", level]);
        let t = &r.json["data"]["truncation"];
        let verdicts = t["verdicts"].as_array().cloned().unwrap_or_default();
        let level: usize = level.parse().unwrap();
        // objects of Δ≤3 sit at level equal to their index
        let by_limit = verdicts
            .iter()
            .filter(|v| v["object"].as_u64().unwrap_or(0) as usize > level)
            .all(|v| v["limit_cone"] == Value::Bool(true));
        let agree = verdicts.iter().all(|v| v["normalized_vanishes"] == v["limit_cone"]);
        if !ok(&r) || t["truncated"] != Value::Bool(expect) || by_limit != expect || !agree || verdicts.len() != 4 {
            failures.push(format!("{spec} at level {level}: expected truncated={expect}"));
        }
    }
}

fn determinism(dir: &Path, failures: &mut Vec<String>) {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), "--triple".into(), "delta-min:2".into()],
        vec!["preset".into(), "gamma:2".into(), "--out".into(), p("gamma.json")],
        vec!["build".into(), "--triple".into(), "delta-min:3".into(), "--target".into(), "n0".into(), "--out".into(), p("n0.json")],
        vec!["build".into(), "--triple".into(), "gamma:2".into(), "--target".into(), "v".into(), "--out".into(), p("v.json")],
        vec![
            "normalize".into(),
            "--triple".into(),
            "gamma:2".into(),
            "--diagram".into(),
            "span-action".into(),
            "--out".into(),
            p("norm.json"),
        ],
        vec!["denormalize".into(), "--triple".into(), "gamma:2".into(), "--diagram".into(), p("norm.json"), "--out".into(), p("denorm.json")],
        vec!["roundtrip".into(), "--triple".into(), "fi-sharp:2".into()],
        vec!["audit".into(), "--triple".into(), "delta-min:2".into(), "--diagram".into(), "simplicial:s1".into()],
        vec![
            "kan-check".into(),
            "--triple".into(),
            "delta-min:3".into(),
            "--diagram".into(),
            "simplicial:delta:1".into(),
            "--level".into(),
            "1".into(),
        ],
        vec!["homology".into(), "--preset".into(), "s1".into(), "--k".into(), "2".into()],
        vec!["dk".into(), "--preset".into(), "delta-max:2".into(), "--simplicial".into(), "boundary:2".into()],
    ];
    let artifacts = ["gamma.json", "n0.json", "v.json", "norm.json", "norm.witness.json", "denorm.json"];
    let mut snapshot = || -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for (i, cmd) in commands.iter().enumerate() {
            let report = p(&format!("report-{i}.json"));
            let mut args: Vec<&str> = vec!["--report", &report];
            args.extend(cmd.iter().map(String::as_str));
            let r = dk(&args);
            if r.code != 0 {
                failures.push(format!("{} exited {}", cmd.join(" "), r.code));
            }
            out.push(r.stdout.into_bytes());
            out.push(std::fs::read(&report).unwrap_or_default());
        }
        for a in artifacts {
            out.push(std::fs::read(dir.join(a)).unwrap_or_default());
        }
        out
    };
    let first = snapshot();
    let second = snapshot();
    if first.iter().any(Vec::is_empty) {
        failures.push("a report or artifact is missing".into());
    }
    if first != second {
        failures.push("outputs differ between runs".into());
    }
}

fn main() -> ExitCode {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("scratch directory");

    type Criterion = (&'static str, Box<dyn Fn(&mut Vec<String>)>);
    let d1 = dir.clone();
    let d2 = dir.clone();
    let criteria: Vec<Criterion> = vec![
        (
            "axiom suite and pairing grid",
            Box::new(move |f| {
                axiom_suite(f);
                corrupted_triple_fails(&d1, f);
            }),
        ),
        ("normalized chains match the Moore complex", Box::new(moore_oracle)),
        ("min and max normalizations agree", Box::new(min_max)),
        ("reduced linearization over gamma:3", Box::new(|f| concentrated("gamma:3", f))),
        ("permutation modules over fi-sharp:3", Box::new(|f| concentrated("fi-sharp:3", f))),
        ("round trips on all representables", Box::new(round_trips)),
        ("dimension conservation and witness identities", Box::new(conservation_everywhere)),
        ("section-retraction audit", Box::new(audits)),
        ("Kan truncation detection", Box::new(kan)),
        ("deterministic reports and artifacts", Box::new(move |f| determinism(&d2, f))),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let mut failures = Vec::new();
        check(&mut failures);
        let pass = failures.is_empty();
        all &= pass;
        println!("{} criterion {:>2}: {name}", if pass { "PASS" } else { "FAIL" }, i + 1);
        for f in failures {
            println!("       {f}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
