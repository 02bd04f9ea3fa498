//! Acceptance criteria, one `PASS`/`FAIL` line each. Exits non-zero when
//! any criterion fails.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use fusion::driver::compile;
use fusion_core::testing::{self, PropResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::{fusion, program, stat, strongest_solutions_satisfy_definitions};

type Verdict = Result<String, String>;
type Prop = fn(&mut ChaCha8Rng, usize) -> PropResult;
type Criterion = fn() -> Verdict;

/// `check --json` on a file: the parsed report and the wall time.
fn check_json(file: &str, extra: &[&str]) -> (Value, Duration) {
    let start = Instant::now();
    let mut args = vec!["check", "--json", file];
    args.extend_from_slice(extra);
    let out = fusion(&args);
    let elapsed = start.elapsed();
    let report: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{file}: unparsable report ({e}): {}", common::stdout(&out)));
    assert_eq!(report["exit_code"].as_i64(), out.status.code().map(i64::from), "{file}");
    (report, elapsed)
}

fn located_unsafe(report: &Value) -> Option<String> {
    if report["status"] != "unsafe" {
        return None;
    }
    let d = report["diagnostics"].as_array()?.iter().find(|d| d["code"] == "unsafe")?;
    Some(format!("{}:{}", d["span"]["line"].as_u64()?, d["span"]["col"].as_u64()?))
}

fn worked_examples() -> Verdict {
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for ex in ["ex1", "ex2", "ex3", "ex4"] {
        let path = program(&format!("{ex}.lf"));
        let (r, t) = check_json(path.to_str().unwrap(), &[]);
        notes.push(format!("{ex} {} in {} ms", r["status"].as_str().unwrap_or("?"), t.as_millis()));
        if r["status"] != "safe" || t >= Duration::from_secs(5) {
            failures.push(format!("{ex} is {} after {} ms", r["status"], t.as_millis()));
        }
    }
    for (name, what) in [("ex1_bad", "ex1 with output {v | 1 <= v}"), ("ex3_swapped", "ex3 composed as fn . fp")] {
        let (r, _) = check_json(program(&format!("{name}.lf")).to_str().unwrap(), &[]);
        match located_unsafe(&r) {
            Some(at) => notes.push(format!("{name} unsafe at {at}")),
            None => failures.push(format!("{what} should be unsafe with a location, got {}", r["status"])),
        }
    }
    // Not part of the criterion: a variant that really leaves the naturals.
    let (r, _) = check_json(program("ex3_dec.lf").to_str().unwrap(), &[]);
    if let Some(at) = located_unsafe(&r) {
        notes.push(format!("ex3_dec (dec . dec) unsafe at {at}"));
    }
    if failures.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(format!("{} ({})", failures.join("; "), notes.join(", ")))
    }
}

fn constraint_shapes() -> Verdict {
    let read = |ex: &str| std::fs::read_to_string(program(ex)).expect("example exists");
    let ex1 = compile(&read("ex1.lf")).map_err(|e| e.to_string())?.generated.constraint.flatten();
    let ex2 = compile(&read("ex2.lf")).map_err(|e| e.to_string())?.generated.constraint.flatten();
    if ex1.len() != 2 || ex2.len() != 4 {
        return Err(format!("ex1 has {} clauses and ex2 {}, expected 2 and 4", ex1.len(), ex2.len()));
    }
    let shared = ex1[0].binders.first().filter(|b| ex1[1].binders.first() == Some(*b));
    match shared {
        Some(b) if b.name.as_str() == "x" => Ok(format!("ex1 2 clauses under one `{}` binder, ex2 4 clauses", b.name)),
        _ => Err("the ex1 clauses do not share the `x` binder".into()),
    }
}

fn seeded(seed: u64, n: usize, prop: Prop) -> PropResult {
    prop(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

fn elimination_oracle() -> Verdict {
    let start = Instant::now();
    let n = seeded(300, 250, testing::elimination_agrees_with_brute_force)?;
    let t = start.elapsed();
    if t >= Duration::from_secs(30) {
        return Err(format!("{n} instances took {} ms", t.as_millis()));
    }
    Ok(format!("{n} acyclic constraints agree in {} ms", t.as_millis()))
}

fn lemma_suite() -> Verdict {
    let props: [(&str, Prop); 5] = [
        ("Flattening", testing::flattening),
        ("Partition", testing::partition),
        ("Scoped-Definitions", testing::scoped_definitions),
        ("Elim-Acyclic", testing::elim_acyclic),
        ("kappa-removal", testing::kvar_removal),
    ];
    let mut notes = Vec::new();
    for (i, (name, prop)) in props.into_iter().enumerate() {
        let n = seeded(400 + i as u64, 150, prop).map_err(|e| format!("{name}: {e}"))?;
        notes.push(format!("{name} {n}"));
    }
    let n = strongest_solutions_satisfy_definitions(410, 120)
        .map_err(|e| format!("Strongest-Scoped-Sat-Definitions: {e}"))?;
    notes.push(format!("Strongest-Scoped-Sat-Definitions {n} (z3)"));
    Ok(notes.join(", "))
}

fn blowup() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |n: usize| {
        let path = dir.path().join(format!("letchain{n}.lf"));
        std::fs::File::create(&path).and_then(|mut f| f.write_all(common::let_chain(n).as_bytes())).expect("temp file");
        path.to_str().unwrap().to_owned()
    };
    let mut points = Vec::new();
    for n in [8usize, 16, 32, 64] {
        let file = write(n);
        let start = Instant::now();
        let out = fusion(&["stats", &file]);
        let t = start.elapsed();
        let atoms = stat(&out, "vc_atoms").ok_or_else(|| format!("n={n}: no atom count: {}", common::stdout(&out)))?;
        if out.status.code() != Some(0) || t >= Duration::from_secs(2) {
            return Err(format!("n={n} exits {:?} after {} ms", out.status.code(), t.as_millis()));
        }
        points.push((n as f64, atoms as f64, t));
    }
    let ratio = points[3].1 / points[0].1;
    let mean = |f: fn(&(f64, f64, Duration)) -> f64| points.iter().map(f).sum::<f64>() / points.len() as f64;
    let (mx, my) = (mean(|p| p.0), mean(|p| p.1));
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let max_residual = points.iter().map(|p| (p.1 - (my + slope * (p.0 - mx))).abs()).fold(0.0, f64::max);
    let scoped: Vec<String> =
        points.iter().map(|p| format!("n={} {} atoms {} ms", p.0, p.1, p.2.as_millis())).collect();
    if ratio > 10.0 {
        return Err(format!("atoms(64)/atoms(8) = {ratio:.2}: {}", scoped.join(", ")));
    }
    let out = fusion(&["stats", &write(16), "--no-scope"]);
    let unscoped = match stat(&out, "vc_atoms") {
        Some(a) if a > 1 << 16 => format!("--no-scope n=16 {a} atoms"),
        _ if common::stdout(&out).contains("exceeds the limit") => "--no-scope n=16 trips the fuse".into(),
        other => return Err(format!("--no-scope n=16 gives {other:?} atoms: {}", common::stdout(&out))),
    };
    Ok(format!(
        "{}; slope {slope:.2} atoms per binding, max residual {max_residual:.2}, ratio {ratio:.2}; {unscoped}",
        scoped.join(", ")
    ))
}

fn fixpoint_path() -> Verdict {
    let sum = program("sum.lf");
    let quals = program("sum.quals");
    let (with, _) = check_json(sum.to_str().unwrap(), &["--qualifiers", quals.to_str().unwrap()]);
    let (without, _) = check_json(sum.to_str().unwrap(), &[]);
    match (with["status"].as_str(), located_unsafe(&without)) {
        (Some("safe"), Some(at)) => Ok(format!("safe with {{0 <= v}}, unsafe at {at} without qualifiers")),
        (s, at) => Err(format!("with qualifiers {s:?}, without {at:?} ({})", without["status"])),
    }
}

fn skolemization() -> Verdict {
    let n = seeded(700, 150, testing::skolemization_preserves_validity)?;
    Ok(format!("{n} VCs keep their truth-table validity"))
}

fn main() {
    let criteria: [(&str, Criterion); 7] = [
        ("worked examples", worked_examples),
        ("constraint shapes", constraint_shapes),
        ("elimination oracle", elimination_oracle),
        ("lemma suite", lemma_suite),
        ("blowup benchmark", blowup),
        ("fixpoint path", fixpoint_path),
        ("skolemization", skolemization),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 7 criteria failed");
        std::process::exit(1);
    }
}
