//! Qualifier files: one `qualif Name(x:Int, v:Int): (x <= v)` per line.
//!
//! A parameter sort of `_` matches any sort. `--` starts a comment.

use fusion_core::fixpoint::Qualifier;
use fusion_core::lang::parse_pred;
use fusion_core::logic::Sort;
use fusion_core::Name;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct QualError {
    pub line: usize,
    pub message: String,
}

pub fn parse_qualifiers(src: &str) -> Result<Vec<Qualifier>, QualError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let text = raw.split_once("--").map_or(raw, |(code, _)| code).trim();
        if text.is_empty() {
            continue;
        }
        let q = parse_line(text).map_err(|message| QualError { line: i + 1, message })?;
        if out.iter().any(|p: &Qualifier| p.name == q.name) {
            return Err(QualError { line: i + 1, message: format!("qualifier `{}` is defined twice", q.name) });
        }
        out.push(q);
    }
    Ok(out)
}

fn parse_line(text: &str) -> Result<Qualifier, String> {
    let rest = text.strip_prefix("qualif").filter(|r| r.starts_with(char::is_whitespace));
    let rest = rest.ok_or("expected `qualif Name(params): predicate`")?.trim_start();
    let (name, rest) = rest.split_once('(').ok_or("expected `(` after the qualifier name")?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(format!("bad qualifier name `{name}`"));
    }
    let (params, rest) = rest.split_once(')').ok_or("unclosed parameter list")?;
    let body = rest.trim_start().strip_prefix(':').ok_or("expected `:` before the predicate")?;
    let mut ps: Vec<(Name, Option<Sort>)> = Vec::new();
    for p in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (x, s) = p.split_once(':').ok_or_else(|| format!("parameter `{p}` needs a sort"))?;
        let x = Name::from(x.trim());
        if ps.iter().any(|(y, _)| *y == x) {
            return Err(format!("repeated parameter `{x}`"));
        }
        let s = match s.trim() {
            "_" => None,
            "Int" => Some(Sort::Int),
            "Bool" => Some(Sort::Bool),
            "Unit" => Some(Sort::Unit),
            s if s.starts_with(char::is_uppercase) => Some(Sort::Uninterp(s.into())),
            s => return Err(format!("unknown sort `{s}`")),
        };
        ps.push((x, s));
    }
    let body = parse_pred(body.trim()).map_err(|e| format!("in the predicate: {}", e.message))?;
    if let Some(x) = body.free_vars().into_iter().find(|x| ps.iter().all(|(y, _)| y != x)) {
        return Err(format!("`{x}` is not a parameter"));
    }
    Ok(Qualifier { name: name.into(), params: ps, body })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_back() {
        let src = "-- sign\nqualif Pos(v:Int): (0 <= v)\n\nqualif Ge(x:Int, v:_): (x <= v) -- bound\n";
        let qs = parse_qualifiers(src).unwrap();
        let printed: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
        assert_eq!(printed, ["qualif Pos(v:Int): (0 <= v)", "qualif Ge(x:Int, v:_): (x <= v)"]);
        assert_eq!(parse_qualifiers(&printed.join("\n")).unwrap(), qs);
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_qualifiers("qualif A(v:Int): (0 <= v)\nqualif B(v:Int): (0 <= w)").unwrap_err();
        assert_eq!(e.to_string(), "line 2: `w` is not a parameter");
        let e = parse_qualifiers("qualif A(v:int): v = 0").unwrap_err();
        assert!(e.message.contains("unknown sort"), "{e}");
        let e = parse_qualifiers("qualif A(v:Int): (0 <= v)\nqualif A(v:Int): (v <= 0)").unwrap_err();
        assert!(e.message.contains("twice"), "{e}");
        assert!(parse_qualifiers("qualifA(v:Int): v = 0").is_err());
    }
}
