use std::time::Duration;

use fusion::smt::{SmtPool, Solver, SolverConfig};
use fusion_core::constraint::{Bind, Constraint};
use fusion_core::lang::parse_pred;
use fusion_core::logic::{Pred, Sort, SortEnv};
use fusion_core::oracle::{ValidityOracle, Verdict};

fn pred(s: &str) -> Pred {
    parse_pred(s).unwrap()
}

fn pool(jobs: usize) -> SmtPool {
    let mut env = SortEnv::new();
    env.bind("n".into(), Sort::Int);
    SmtPool::new(SolverConfig::from_command("z3", Duration::from_secs(5)), env, jobs)
}

fn clause(hyp: &str, goal: &str) -> fusion_core::constraint::FlatClause {
    let c = Constraint::forall(Bind::new("x", Sort::Int, pred(hyp)), Constraint::goal(pred(goal), None));
    c.flatten().remove(0)
}

#[test]
fn valid_and_invalid_clauses() {
    let mut p = pool(1);
    p.probe().unwrap();
    assert_eq!(p.check(&clause("0 <= x", "0 <= x + 1")), Verdict::Valid);
    match p.check(&clause("0 <= x", "1 <= x")) {
        Verdict::Invalid(Some(m)) => assert_eq!(m, "x = 0"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn free_variables_come_from_the_sort_environment() {
    let mut p = pool(1);
    assert_eq!(p.check(&clause("x = n", "x - n = 0")), Verdict::Valid);
    assert!(matches!(p.check(&clause("x = m", "true || x = 0")), Verdict::Valid | Verdict::Unknown(_)));
}

#[test]
fn concurrent_checks_keep_input_order() {
    let mut p = pool(4);
    let clauses: Vec<_> = (0..40)
        .map(|i| if i % 3 == 0 { clause("0 <= x", "1 <= x") } else { clause(&format!("{i} <= x"), "0 <= x") })
        .collect();
    let verdicts = p.check_all(&clauses);
    for (i, v) in verdicts.iter().enumerate() {
        assert_eq!(v.is_valid(), i % 3 != 0, "clause {i}: {v:?}");
    }
}

#[test]
fn whole_constraints_and_skolemized_hypotheses() {
    let p = pool(1);
    let c = Constraint::forall(
        Bind::new("x", Sort::Int, pred("exists y:Int. 0 <= y && x = y + 1")),
        Constraint::goal(pred("1 <= x"), None),
    );
    assert_eq!(p.check_valid(&c), Verdict::Valid);
}

#[test]
fn solver_errors_are_unknown_and_the_process_survives() {
    let mut s = Solver::spawn(&SolverConfig::default()).unwrap();
    let bad = fusion::smt::Query { decls: vec![], defs: vec![], formula: "(<= 0 undeclared)".into() };
    assert!(matches!(s.check(&bad), Ok(Verdict::Unknown(_))));
    let good = fusion::smt::Query { decls: vec![], defs: vec![], formula: "(<= 0 1)".into() };
    assert_eq!(s.check(&good), Ok(Verdict::Valid));
}

#[test]
fn missing_solver_fails_the_probe() {
    let p = SmtPool::new(SolverConfig::from_command("/nonexistent/z3", Duration::from_secs(1)), SortEnv::new(), 1);
    assert!(p.probe().is_err());
}

mod common;

#[test]
fn strongest_scoped_solutions_satisfy_their_definitions() {
    assert_eq!(common::strongest_solutions_satisfy_definitions(11, 120), Ok(120));
}

#[test]
fn let_chain_helper_matches_the_checked_in_program() {
    let file = std::fs::read_to_string(common::program("letchain8.lf")).unwrap();
    let body: String = file.lines().filter(|l| !l.starts_with("--")).map(|l| format!("{l}\n")).collect();
    assert_eq!(common::let_chain(8), body);
}
