//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Duration;

use fusion::smt::{SmtPool, SolverConfig};
use fusion_core::oracle::Verdict;
use fusion_core::testing::{self, PropResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn program(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs").join(name)
}

pub fn fusion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fusion")).args(args).output().expect("the binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// A `stats` field from the text report.
pub fn stat(o: &Output, key: &str) -> Option<u64> {
    stdout(o).lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(' ')?.trim().parse().ok())
}

/// The let-chain program of length `n`, `letchain8.lf` generalized: each
/// step copies the previous binder through `id`.
pub fn let_chain(n: usize) -> String {
    let mut s = String::from("exp :: Nat -> Nat\nexp x0 =\n  let x1 = id x0\n");
    for i in 2..=n {
        s.push_str(&format!("      x{i} = id x{}\n", i - 1));
    }
    s.push_str(&format!("  in x{n}\n"));
    s
}

/// Strongest scoped solutions satisfy their definitions, checked by the
/// solver on `n` random constraints that have definitions to check.
pub fn strongest_solutions_satisfy_definitions(seed: u64, n: usize) -> PropResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = SmtPool::new(SolverConfig::from_command("z3", Duration::from_secs(10)), Default::default(), 1);
    pool.probe().map_err(|e| e.to_string())?;
    let mut kept = 0;
    for _ in 0..100 * n {
        if kept == n {
            break;
        }
        let (env, obligations) = testing::strongest_solution_obligations(&mut rng);
        if obligations.is_empty() {
            continue;
        }
        pool.set_env(env);
        for p in &obligations {
            match pool.check_pred(p) {
                Verdict::Valid => {}
                other => return Err(format!("{other:?} for {p}")),
            }
        }
        kept += 1;
    }
    if kept < n {
        return Err(format!("only {kept} of {n} instances were generated"));
    }
    Ok(kept)
}
