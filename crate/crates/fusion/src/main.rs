// Error reports are built at most once per run, so their size is moot.
#![allow(clippy::result_large_err)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use fusion::diag::{Diagnostic, Report, Status};
use fusion::driver::{self, Checked, Options};
use fusion::format;
use fusion::quals::parse_qualifiers;
use fusion::smt::{emit_smtlib, SolverConfig};
use fusion_core::fusion::Eliminate;

#[derive(Parser)]
#[command(name = "fusion", version, about = "Refinement type checking by scoped constraint elimination")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a program against its signatures.
    Check(Run),
    /// Check a program and print solver statistics.
    Stats(Run),
    /// Solve a constraint file in the format of `--dump-constraints`.
    Solve(Run),
}

#[derive(Clone, Copy, ValueEnum)]
enum ElimMode {
    All,
    Cuts,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct Run {
    file: PathBuf,
    /// Which refinement variables to eliminate before the fixpoint.
    #[arg(long, value_enum, default_value = "cuts")]
    eliminate: ElimMode,
    /// Compute solutions from the whole constraint instead of the scope.
    #[arg(long)]
    no_scope: bool,
    /// Add every atom of a user signature as a qualifier.
    #[arg(long)]
    scrape_quals: bool,
    /// Qualifier file, one `qualif Name(x:Int): (pred)` per line.
    #[arg(long, value_name = "FILE")]
    qualifiers: Option<PathBuf>,
    /// Solver command; a bare program name is run as `PROG -in -smt2`.
    #[arg(long, env = "FUSION_SMT", default_value = "z3")]
    smt: String,
    /// Per-query solver timeout in milliseconds.
    #[arg(long, value_name = "MS", default_value_t = 10_000)]
    timeout: u64,
    /// Solver processes for concurrent queries; defaults to the CPU count.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the generated constraint to FILE, or `-` for stdout.
    #[arg(long, value_name = "FILE")]
    dump_constraints: Option<PathBuf>,
    /// Write the verification condition after elimination as SMT-LIB2.
    #[arg(long, value_name = "FILE")]
    dump_vc: Option<PathBuf>,
    /// Print diagnostics as JSON.
    #[arg(long)]
    json: bool,
    /// Treat refinement variables of signature holes as cuts.
    #[arg(long, value_enum, default_value = "on")]
    cut_toplevel: Switch,
    /// Abort elimination past this many atoms.
    #[arg(long, default_value_t = 1_000_000)]
    atom_limit: u64,
}

fn error_report(file: &str, code: &'static str, message: String) -> Report {
    let d = Diagnostic { code, message, span: None, clause: None, countermodel: None };
    Report {
        file: file.to_owned(),
        status: Status::Error,
        exit_code: Status::Error.exit_code(),
        diagnostics: vec![d],
        stats: None,
    }
}

fn options(run: &Run, file: &str) -> Result<Options, Report> {
    let mut opts = Options {
        eliminate: match run.eliminate {
            ElimMode::All => Eliminate::All,
            ElimMode::Cuts => Eliminate::Cuts,
            ElimMode::None => Eliminate::None,
        },
        scoped: !run.no_scope,
        scrape: run.scrape_quals,
        solver: SolverConfig::from_command(&run.smt, Duration::from_millis(run.timeout)),
        cut_toplevel: matches!(run.cut_toplevel, Switch::On),
        atom_limit: run.atom_limit,
        ..Options::default()
    };
    if let Some(j) = run.jobs {
        opts.jobs = j.max(1);
    }
    if let Some(q) = &run.qualifiers {
        let src =
            fs::read_to_string(q).map_err(|e| error_report(file, "io", format!("cannot read {}: {e}", q.display())))?;
        opts.qualifiers =
            parse_qualifiers(&src).map_err(|e| error_report(file, "parse", format!("{}: {e}", q.display())))?;
    }
    Ok(opts)
}

fn dump(path: &Path, text: &str) -> std::io::Result<()> {
    if path == Path::new("-") {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(path, text)
    }
}

/// Runs the pipeline; `Err` carries a report for failures before solving.
fn execute(run: &Run, solve_file: bool) -> Result<(Report, Option<Checked>), Report> {
    let file = run.file.display().to_string();
    let src = fs::read_to_string(&run.file).map_err(|e| Report::io_error(&file, &e))?;
    let opts = options(run, &file)?;
    let start = Instant::now();
    let result = if solve_file {
        let mut cf = format::read(&src).map_err(|e| error_report(&file, "parse", e.to_string()))?;
        if !opts.cut_toplevel {
            cf.cuts.clear();
        }
        driver::solve(&cf, &opts)
    } else {
        let compiled = driver::compile(&src).map_err(|e| Report::from_error(&file, &e))?;
        if let Some(p) = &run.dump_constraints {
            dump(p, &format::write(&compiled.constraint_file(&opts)))
                .map_err(|e| error_report(&file, "io", format!("cannot write {}: {e}", p.display())))?;
        }
        driver::check_compiled(&compiled, &opts)
    };
    let result = result.map(|mut c| {
        c.elapsed = start.elapsed();
        c
    });
    if let (Some(p), Ok(c)) = (&run.dump_vc, &result) {
        let vc = c.report.vc.apply(&c.report.solution);
        let text = emit_smtlib(&vc, &c.env).map_err(|e| error_report(&file, "solver", e.to_string()))?;
        dump(p, &text).map_err(|e| error_report(&file, "io", format!("cannot write {}: {e}", p.display())))?;
    }
    let report = Report::from_result(&file, &result);
    Ok((report, result.ok()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (run, stats, solve) = match &cli.command {
        Command::Check(r) => (r, false, false),
        Command::Stats(r) => (r, true, false),
        Command::Solve(r) => (r, false, true),
    };
    let report = match execute(run, solve) {
        Ok((r, _)) | Err(r) => r,
    };
    let out = if run.json {
        format!("{}\n", report.json())
    } else if stats {
        format!("{}{}", report.stats_text(), report.text())
    } else {
        report.text()
    };
    let _ = std::io::stdout().write_all(out.as_bytes());
    ExitCode::from(report.exit_code as u8)
}
