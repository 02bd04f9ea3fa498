//! A fixed set of solver processes shared by concurrent validity queries.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use fusion_core::constraint::{Constraint, FlatClause};
use fusion_core::logic::{Pred, SortEnv};
use fusion_core::oracle::{ValidityOracle, Verdict};

use super::emit::{clause_query, constraint_pred, validity_query, Query};
use super::solver::{Solver, SolverConfig, SolverError};

/// Checks validity with up to `jobs` solver processes, each started on
/// first use and restarted after it times out or dies.
pub struct SmtPool {
    config: SolverConfig,
    env: SortEnv,
    slots: Vec<Mutex<Option<Solver>>>,
    queries: AtomicUsize,
}

impl SmtPool {
    pub fn new(config: SolverConfig, env: SortEnv, jobs: usize) -> Self {
        let slots = (0..jobs.max(1)).map(|_| Mutex::new(None)).collect();
        SmtPool { config, env, slots, queries: AtomicUsize::new(0) }
    }

    /// Starts the first process so a missing or broken solver is reported
    /// before any checking.
    pub fn probe(&self) -> Result<(), SolverError> {
        let mut slot = self.slots[0].lock().unwrap_or_else(|e| e.into_inner());
        if slot.is_none() {
            *slot = Some(Solver::spawn(&self.config)?);
        }
        Ok(())
    }

    pub fn env(&self) -> &SortEnv {
        &self.env
    }

    pub fn set_env(&mut self, env: SortEnv) {
        self.env = env;
    }

    /// Validity queries sent so far.
    pub fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn check_pred(&self, p: &Pred) -> Verdict {
        self.run(0, validity_query(p, &self.env))
    }

    /// Validity of a whole κ-free constraint as one query.
    pub fn check_valid(&self, vc: &Constraint) -> Verdict {
        self.check_pred(&constraint_pred(vc))
    }

    fn check_on(&self, slot: usize, clause: &FlatClause) -> Verdict {
        self.run(slot, clause_query(clause, &self.env))
    }

    fn run(&self, slot: usize, q: Result<Query, super::EmitError>) -> Verdict {
        let q = match q {
            Ok(q) => q,
            Err(e) => return Verdict::Unknown(e.to_string()),
        };
        self.queries.fetch_add(1, Ordering::Relaxed);
        let mut guard = self.slots[slot].lock().unwrap_or_else(|e| e.into_inner());
        if guard.is_none() {
            match Solver::spawn(&self.config) {
                Ok(s) => *guard = Some(s),
                Err(e) => return Verdict::Unknown(e.to_string()),
            }
        }
        let solver = guard.as_mut().expect("spawned above");
        match solver.check(&q) {
            Ok(v) => v,
            Err(why) => {
                log::warn!("restarting solver: {why}");
                *guard = None;
                Verdict::Unknown(why)
            }
        }
    }
}

impl ValidityOracle for SmtPool {
    fn check(&mut self, clause: &FlatClause) -> Verdict {
        self.check_on(0, clause)
    }

    fn check_all(&mut self, clauses: &[FlatClause]) -> Vec<Verdict> {
        let workers = self.slots.len().min(clauses.len());
        if workers <= 1 {
            return clauses.iter().map(|c| self.check_on(0, c)).collect();
        }
        let next = AtomicUsize::new(0);
        let this = &*self;
        let mut done: Vec<(usize, Verdict)> = thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|slot| {
                    let next = &next;
                    s.spawn(move || {
                        let mut out = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            let Some(c) = clauses.get(i) else { break };
                            out.push((i, this.check_on(slot, c)));
                        }
                        out
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        });
        done.sort_by_key(|(i, _)| *i);
        done.into_iter().map(|(_, v)| v).collect()
    }
}
