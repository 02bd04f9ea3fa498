//! A reader for the s-expressions of SMT-LIB and the constraint file format.
//!
//! Symbols may be `|quoted|`; the quotes are not part of the symbol. Strings
//! are double-quoted with `""` as the escaped quote. `;` starts a comment.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    /// A symbol, keyword or numeral.
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs) => Some(xs),
            _ => None,
        }
    }

    /// The head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|xs| xs.first()).and_then(Sexp::atom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct SexpError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl Reader<'_> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, SexpError> {
        Err(SexpError { line: self.line, col: self.col, message: message.into() })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_space(&mut self) {
        while let Some(c) = self.peek() {
            if c == b';' {
                while !matches!(self.peek(), None | Some(b'\n')) {
                    self.bump();
                }
            } else if c.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn text(&self, from: usize) -> String {
        String::from_utf8_lossy(&self.src[from..self.pos]).into_owned()
    }

    fn read(&mut self) -> Result<Sexp, SexpError> {
        self.skip_space();
        match self.peek() {
            None => self.error("unexpected end of input"),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_space();
                    match self.peek() {
                        None => return self.error("unclosed `(`"),
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexp::List(items));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => self.error("unexpected `)`"),
            Some(b'|') => {
                self.bump();
                let start = self.pos;
                loop {
                    match self.peek() {
                        None => return self.error("unclosed `|`"),
                        Some(b'|') => break,
                        Some(_) => {
                            self.bump();
                        }
                    }
                }
                let s = self.text(start);
                self.bump();
                Ok(Sexp::Atom(s))
            }
            Some(b'"') => {
                self.bump();
                let mut out = Vec::new();
                loop {
                    match self.bump() {
                        None => return self.error("unclosed string"),
                        Some(b'"') if self.peek() == Some(b'"') => {
                            self.bump();
                            out.push(b'"');
                        }
                        Some(b'"') => break,
                        Some(c) => out.push(c),
                    }
                }
                Ok(Sexp::Str(String::from_utf8_lossy(&out).into_owned()))
            }
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || matches!(c, b'(' | b')' | b'|' | b'"' | b';') {
                        break;
                    }
                    self.bump();
                }
                Ok(Sexp::Atom(self.text(start)))
            }
        }
    }
}

/// Every top-level expression of `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut r = Reader { src: src.as_bytes(), pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        r.skip_space();
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

/// Characters allowed in an unquoted SMT-LIB symbol besides alphanumerics.
const SYMBOL_PUNCT: &str = "~!@$%^&*_-+=<>.?/";

/// `s` as a symbol, quoted when it contains other characters or could be
/// read as a numeral.
pub fn symbol(s: &str) -> String {
    let simple = !s.is_empty()
        && !s.as_bytes()[0].is_ascii_digit()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || SYMBOL_PUNCT.contains(c));
    if simple {
        s.to_owned()
    } else {
        format!("|{s}|")
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) if !a.is_empty() && a.bytes().all(|c| c.is_ascii_digit()) => f.write_str(a),
            Sexp::Atom(a) => f.write_str(&symbol(a)),
            Sexp::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Sexp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(s: &str) -> Sexp {
        Sexp::Atom(s.into())
    }

    #[test]
    fn quoted_symbols_lose_their_bars() {
        let xs = parse_all("(forall ((|x#1| Int)) (<= 0 |x#1|))").unwrap();
        assert_eq!(xs.len(), 1);
        let inner = xs[0].list().unwrap();
        assert_eq!(inner[0], atom("forall"));
        assert_eq!(inner[1], Sexp::List(vec![Sexp::List(vec![atom("x#1"), atom("Int")])]));
    }

    #[test]
    fn comments_and_strings() {
        let xs = parse_all("; header\n(echo \"a \"\"b\"\"\") ; trailing\nsat").unwrap();
        assert_eq!(xs, vec![Sexp::List(vec![atom("echo"), Sexp::Str("a \"b\"".into())]), atom("sat")]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_all("(a\n  (b c)").unwrap_err();
        assert_eq!(e.message, "unclosed `(`");
        let e = parse_all("a )").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
    }

    #[test]
    fn printing_round_trips() {
        let src = "(kapp |k#3| x |v#2|) \"q\"\"\" (- 5)";
        let xs = parse_all(src).unwrap();
        let printed: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
        assert_eq!(printed.join(" "), src);
        assert_eq!(symbol("1x"), "|1x|");
        assert_eq!(symbol("x.y!2"), "x.y!2");
    }
}
