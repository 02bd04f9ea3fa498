//! Diagnostics and statistics, rendered as text or JSON.
//!
//! The JSON shape is documented in `docs/diagnostics.md`; field names are
//! stable.

use serde::Serialize;

use fusion_core::fusion::{Outcome, SatError, SatStats};
use fusion_core::oracle::Verdict;
use fusion_core::Span;

use crate::driver::{Checked, DriverError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Safe,
    Unsafe,
    Unknown,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Safe => 0,
            Status::Unsafe => 1,
            Status::Unknown | Status::Error => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Location {
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl From<Span> for Location {
    fn from(s: Span) -> Self {
        Location { line: s.line, col: s.col, end_line: s.end_line, end_col: s.end_col }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// One of `unsafe`, `unknown`, `io`, `parse`, `elab`, `solver`, `fuse`,
    /// `warning`.
    pub code: &'static str,
    pub message: String,
    pub span: Option<Location>,
    /// The failing clause, for `unsafe` and `unknown`.
    pub clause: Option<String>,
    pub countermodel: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub kvars: usize,
    pub cuts: usize,
    pub eliminated: usize,
    pub clauses: u64,
    pub vc_atoms: u64,
    pub vc_clauses: u64,
    pub queries: u64,
    pub fixpoint_sweeps: usize,
    pub time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub file: String,
    pub status: Status,
    pub exit_code: i32,
    pub diagnostics: Vec<Diagnostic>,
    pub stats: Option<Stats>,
}

fn stats(s: &SatStats, time_ms: u64) -> Stats {
    Stats {
        kvars: s.kvars,
        cuts: s.cuts,
        eliminated: s.eliminated,
        clauses: s.clauses,
        vc_atoms: s.vc_atoms,
        vc_clauses: s.vc_clauses,
        queries: s.queries,
        fixpoint_sweeps: s.fixpoint_sweeps,
        time_ms,
    }
}

impl Report {
    fn new(file: &str, status: Status, diagnostics: Vec<Diagnostic>, stats: Option<Stats>) -> Self {
        Report { file: file.to_owned(), status, exit_code: status.exit_code(), diagnostics, stats }
    }

    pub fn io_error(file: &str, err: &std::io::Error) -> Self {
        let d = Diagnostic {
            code: "io",
            message: format!("cannot read {file}: {err}"),
            span: None,
            clause: None,
            countermodel: None,
        };
        Report::new(file, Status::Error, vec![d], None)
    }

    pub fn from_result(file: &str, result: &Result<Checked, DriverError>) -> Self {
        match result {
            Ok(c) => Report::from_checked(file, c),
            Err(e) => Report::from_error(file, e),
        }
    }

    pub fn from_error(file: &str, e: &DriverError) -> Self {
        let span = match e {
            DriverError::Parse(l) | DriverError::Elab(l) => Some(l.span.into()),
            _ => None,
        };
        let message = match e {
            DriverError::Parse(l) | DriverError::Elab(l) => l.message.clone(),
            other => other.to_string(),
        };
        let stats = match e {
            DriverError::Sat(SatError::Fuse { atoms, eliminated, .. }) => {
                Some(Stats { vc_atoms: *atoms, eliminated: *eliminated, ..Stats::default() })
            }
            _ => None,
        };
        let d = Diagnostic { code: e.code(), message, span, clause: None, countermodel: None };
        Report::new(file, Status::Error, vec![d], stats)
    }

    pub fn from_checked(file: &str, c: &Checked) -> Self {
        let r = &c.report;
        let (status, failures) = match &r.outcome {
            Outcome::Safe => (Status::Safe, &[][..]),
            Outcome::Unsafe(fs) => (Status::Unsafe, fs.as_slice()),
            Outcome::Unknown(fs) => (Status::Unknown, fs.as_slice()),
        };
        let mut diagnostics: Vec<Diagnostic> = failures
            .iter()
            .map(|f| {
                let (code, message, countermodel) = match &f.verdict {
                    Verdict::Invalid(m) => ("unsafe", "refinement check failed".to_owned(), m.clone()),
                    Verdict::Unknown(why) => ("unknown", format!("could not decide: {why}"), None),
                    Verdict::Valid => unreachable!("failures are not valid"),
                };
                Diagnostic {
                    code,
                    message,
                    span: f.clause.tag.map(Location::from),
                    clause: Some(f.clause.to_pred().to_string()),
                    countermodel,
                }
            })
            .collect();
        diagnostics.extend(r.warnings.iter().map(|w| Diagnostic {
            code: "warning",
            message: w.clone(),
            span: None,
            clause: None,
            countermodel: None,
        }));
        let ms = u64::try_from(c.elapsed.as_millis()).unwrap_or(u64::MAX);
        Report::new(file, status, diagnostics, Some(stats(&r.stats, ms)))
    }

    /// Human-readable rendering: one line per diagnostic, then the verdict.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for d in &self.diagnostics {
            let kind = if d.code == "warning" { "warning" } else { "error" };
            match d.span {
                Some(s) => out.push_str(&format!("{}:{}:{}: {kind}: {}\n", self.file, s.line, s.col, d.message)),
                None => out.push_str(&format!("{}: {kind}: {}\n", self.file, d.message)),
            }
            if let Some(c) = &d.clause {
                out.push_str(&format!("  clause: {c}\n"));
            }
            if let Some(m) = d.countermodel.as_deref().filter(|m| !m.is_empty()) {
                out.push_str(&format!("  counterexample: {m}\n"));
            }
        }
        let verdict = match self.status {
            Status::Safe => "SAFE",
            Status::Unsafe => "UNSAFE",
            Status::Unknown => "UNKNOWN",
            Status::Error => "ERROR",
        };
        out.push_str(&format!("{verdict}\n"));
        out
    }

    pub fn stats_text(&self) -> String {
        let Some(s) = &self.stats else { return String::new() };
        format!(
            "kvars {}\ncuts {}\neliminated {}\nclauses {}\nvc_atoms {}\nvc_clauses {}\nqueries {}\nfixpoint_sweeps {}\ntime_ms {}\n",
            s.kvars, s.cuts, s.eliminated, s.clauses, s.vc_atoms, s.vc_clauses, s.queries, s.fixpoint_sweeps, s.time_ms
        )
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_have_codes_and_spans() {
        let e = crate::driver::compile("f :: Int -> Int\nf x = y").err().unwrap();
        let r = Report::from_error("t.lf", &e);
        assert_eq!((r.status, r.exit_code), (Status::Error, 2));
        assert_eq!(r.diagnostics[0].code, "elab");
        assert_eq!(r.diagnostics[0].span.map(|s| s.line), Some(2));
        let json: serde_json::Value = serde_json::from_str(&r.json()).unwrap();
        assert_eq!(json["status"], "error");
        assert_eq!(json["diagnostics"][0]["code"], "elab");
        assert!(r.text().starts_with("t.lf:2:"), "{}", r.text());
    }

    #[test]
    fn io_errors_exit_with_two() {
        let e = std::io::Error::new(std::io::ErrorKind::NotFound, "no such file");
        let r = Report::io_error("missing.lf", &e);
        assert_eq!(r.exit_code, 2);
        assert_eq!(r.diagnostics[0].code, "io");
    }
}
