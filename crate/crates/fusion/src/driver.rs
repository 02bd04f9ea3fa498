//! The checking pipeline from source text or a constraint file to a verdict.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use fusion_core::congen::{self, Generated};
use fusion_core::fixpoint::{self, Qualifier};
use fusion_core::fusion::{self as elim, Eliminate, SatError, SatOptions, SatReport};
use fusion_core::lang::{elaborate, parse_program, Elaborated, LangError, RType, PRELUDE};
use fusion_core::logic::{Pred, SortEnv};
use fusion_core::NameGen;

use crate::format::ConstraintFile;
use crate::smt::{SmtPool, SolverConfig};

#[derive(Clone, Debug)]
pub struct Options {
    pub eliminate: Eliminate,
    pub scoped: bool,
    /// Add qualifiers harvested from user signatures.
    pub scrape: bool,
    pub qualifiers: Vec<Qualifier>,
    pub solver: SolverConfig,
    pub jobs: usize,
    /// Treat refinement variables of signature holes as cuts.
    pub cut_toplevel: bool,
    pub atom_limit: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            eliminate: Eliminate::Cuts,
            scoped: true,
            scrape: false,
            qualifiers: Vec::new(),
            solver: SolverConfig::default(),
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cut_toplevel: true,
            atom_limit: SatOptions::default().atom_limit,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("{0}")]
    Parse(LangError),
    #[error("{0}")]
    Elab(LangError),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Sat(SatError),
}

impl DriverError {
    /// The stable diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            DriverError::Parse(_) => "parse",
            DriverError::Elab(_) => "elab",
            DriverError::Solver(_) | DriverError::Sat(SatError::Cyclic(_)) => "solver",
            DriverError::Sat(SatError::Fuse { .. }) => "fuse",
        }
    }
}

/// A program turned into a constraint.
pub struct Compiled {
    pub program: Elaborated,
    pub generated: Generated,
}

impl Compiled {
    /// Cut variables forced by the options.
    pub fn forced_cuts(&self, opts: &Options) -> BTreeSet<fusion_core::logic::KVar> {
        if opts.cut_toplevel {
            self.generated.toplevel.clone()
        } else {
            BTreeSet::new()
        }
    }

    pub fn constraint_file(&self, opts: &Options) -> ConstraintFile {
        let mut kvars: Vec<_> = self.generated.constraint.kvars().into_iter().collect();
        kvars.sort_by_key(|k| self.generated.kvars.iter().position(|j| j == k));
        ConstraintFile {
            env: self.generated.sort_env.clone(),
            kvars,
            cuts: self.forced_cuts(opts),
            constraint: self.generated.constraint.clone(),
        }
    }

    /// Atomic refinements of user signatures as qualifiers.
    pub fn scraped_qualifiers(&self) -> Vec<Qualifier> {
        let mut atoms = Vec::new();
        let env = self.generated.sort_env.clone();
        for (x, t) in &self.program.globals {
            if !self.program.prims.contains(x) {
                collect_refinements(t, &env, &mut atoms);
            }
        }
        fixpoint::scrape(atoms.iter().map(|(p, e)| (p, e)))
    }
}

fn collect_refinements(t: &RType, env: &SortEnv, out: &mut Vec<(Pred, SortEnv)>) {
    match t {
        RType::Base { v, base, pred } => {
            let mut env = env.clone();
            env.bind(v.clone(), base.sort());
            out.push((pred.clone(), env));
        }
        RType::Fun(x, a, b) => {
            collect_refinements(a, env, out);
            let mut env = env.clone();
            if let Some(s) = a.base_sort() {
                env.bind(x.clone(), s);
            }
            collect_refinements(b, &env, out);
        }
        RType::Forall(_, t) => collect_refinements(t, env, out),
        RType::Con(_, args) => args.iter().for_each(|a| collect_refinements(a, env, out)),
        RType::Var(_) | RType::Hole { .. } => {}
    }
}

/// Parses and elaborates `src` after the prelude and generates its
/// constraint.
pub fn compile(src: &str) -> Result<Compiled, DriverError> {
    let mut prog = parse_program(PRELUDE).expect("the prelude parses");
    prog.items.extend(parse_program(src).map_err(DriverError::Parse)?.items);
    let mut gen = NameGen::new();
    let program = elaborate(&prog, &mut gen).map_err(DriverError::Elab)?;
    let generated = congen::generate(&program, &mut gen).map_err(DriverError::Elab)?;
    Ok(Compiled { program, generated })
}

pub struct Checked {
    pub report: SatReport,
    pub env: SortEnv,
    pub elapsed: Duration,
}

pub fn check_source(src: &str, opts: &Options) -> Result<Checked, DriverError> {
    let start = Instant::now();
    let mut checked = check_compiled(&compile(src)?, opts)?;
    checked.elapsed = start.elapsed();
    Ok(checked)
}

pub fn check_compiled(compiled: &Compiled, opts: &Options) -> Result<Checked, DriverError> {
    let start = Instant::now();
    let file = compiled.constraint_file(opts);
    let mut opts = opts.clone();
    if opts.scrape {
        opts.qualifiers.extend(compiled.scraped_qualifiers());
    }
    let mut checked = solve(&file, &opts)?;
    checked.elapsed = start.elapsed();
    Ok(checked)
}

/// Stack reserved for solving. Unscoped elimination nests solutions inside
/// solutions, so formula depth can grow much faster than atom count; the
/// memory is only committed as recursion reaches it.
const SOLVER_STACK: usize = 1 << 30;

/// Decides a constraint, treating `file.cuts` as forced cuts.
pub fn solve(file: &ConstraintFile, opts: &Options) -> Result<Checked, DriverError> {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .name("solve".into())
            .stack_size(SOLVER_STACK)
            .spawn_scoped(s, || solve_here(file, opts))
            .map_err(|e| DriverError::Solver(format!("cannot start the solving thread: {e}")))?
            .join()
            .unwrap_or_else(|panic| std::panic::resume_unwind(panic))
    })
}

fn solve_here(file: &ConstraintFile, opts: &Options) -> Result<Checked, DriverError> {
    let start = Instant::now();
    let sat_opts = SatOptions {
        eliminate: opts.eliminate,
        scoped: opts.scoped,
        atom_limit: opts.atom_limit,
        forced_cuts: file.cuts.clone(),
    };
    // Plan first so cyclic or oversized constraints fail without a solver.
    elim::plan(&file.constraint, &sat_opts).map_err(DriverError::Sat)?;
    let mut pool = SmtPool::new(opts.solver.clone(), file.env.clone(), opts.jobs);
    let sat = |pool: &mut SmtPool| elim::sat(&file.constraint, &opts.qualifiers, &file.env, &sat_opts, pool);
    let report = match pool.probe() {
        Ok(()) => sat(&mut pool).map_err(DriverError::Sat)?,
        // Elimination alone may already exceed the fuse; report that first.
        Err(e) => match sat(&mut pool) {
            Err(fuse @ SatError::Fuse { .. }) => return Err(DriverError::Sat(fuse)),
            _ => return Err(DriverError::Solver(e.to_string())),
        },
    };
    Ok(Checked { report, env: file.env.clone(), elapsed: start.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_elaboration_errors_are_distinguished() {
        assert_eq!(compile("f :: Int ->\nf = 1").err().unwrap().code(), "parse");
        assert_eq!(compile("f :: Int -> Int\nf x = y").err().unwrap().code(), "elab");
    }

    #[test]
    fn scraping_generalizes_signature_atoms() {
        let c = compile("f :: x:Int -> {v:Int | x <= v && 0 <= v}\nf x = x").unwrap();
        let qs: Vec<String> = c.scraped_qualifiers().iter().map(|q| q.body.to_string()).collect();
        assert_eq!(qs.len(), 2, "{qs:?}");
    }

    #[test]
    fn forced_cuts_follow_the_option() {
        let c = compile("f :: x:Int -> {v:Int | _}\nf x = x").unwrap();
        assert_eq!(c.constraint_file(&Options::default()).cuts.len(), 1);
        let off = Options { cut_toplevel: false, ..Options::default() };
        assert!(c.constraint_file(&off).cuts.is_empty());
    }
}
