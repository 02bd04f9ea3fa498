use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::LangError;
use crate::name::RESERVED;
use crate::span::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lower-case or `_`-initial identifier.
    Ident(String),
    /// Upper-case-initial identifier.
    Con(String),
    Int(i64),
    /// A run of operator characters.
    Op(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Backslash,
    Let,
    In,
    If,
    Then,
    Else,
    Data,
    Type,
    Primitive,
    Uninterpreted,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// First token on its line.
    pub bol: bool,
}

const OP_CHARS: &str = "!$%&*+./<=>?@^|-~:";

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "let" => Tok::Let,
        "in" => Tok::In,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "data" => Tok::Data,
        "type" => Tok::Type,
        "primitive" => Tok::Primitive,
        "uninterpreted" => Tok::Uninterpreted,
        _ => return None,
    })
}

pub fn lex(src: &str) -> Result<Vec<Token>, LangError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let mut bol = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            bol = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = (line, col);
        let begin = i;
        let tok = if c == RESERVED {
            return Err(LangError::new(
                Span::point(line, col),
                format!("`{RESERVED}` is reserved for generated names"),
            ));
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[begin..i].iter().collect();
            let n = text.parse::<i64>().map_err(|_| {
                LangError::new(Span::point(line, col), format!("integer literal `{text}` out of range"))
            })?;
            Tok::Int(n)
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let text: String = chars[begin..i].iter().collect();
            if let Some(k) = keyword(&text) {
                k
            } else if c.is_uppercase() {
                Tok::Con(text)
            } else {
                Tok::Ident(text)
            }
        } else if c == '\\' {
            i += 1;
            Tok::Backslash
        } else if OP_CHARS.contains(c) {
            while i < chars.len() && OP_CHARS.contains(chars[i]) {
                i += 1;
            }
            let text: String = chars[begin..i].iter().collect();
            if text.len() >= 2 && text.chars().all(|c| c == '-') {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                col += (i - begin) as u32;
                continue;
            }
            // `/\` introduces a type abstraction.
            if text == "/" && chars.get(i) == Some(&'\\') {
                i += 1;
                Tok::Op(String::from("/\\"))
            } else {
                Tok::Op(text)
            }
        } else {
            i += 1;
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                _ => return Err(LangError::new(Span::point(line, col), format!("unexpected character `{c}`"))),
            }
        };
        col += (i - begin) as u32;
        out.push(Token { tok, span: Span::new(start.0, start.1, line, col - 1), bol });
        bol = false;
    }
    out.push(Token { tok: Tok::Eof, span: Span::point(line, col), bol: true });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn refinement_braces_and_binders() {
        assert_eq!(
            toks("x:{v:Int | 0 <= v}"),
            [
                Tok::Ident("x".into()),
                Tok::Op(":".into()),
                Tok::LBrace,
                Tok::Ident("v".into()),
                Tok::Op(":".into()),
                Tok::Con("Int".into()),
                Tok::Op("|".into()),
                Tok::Int(0),
                Tok::Op("<=".into()),
                Tok::Ident("v".into()),
                Tok::RBrace,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_layout_flags() {
        let ts = lex("f x = 1 -- one\n  + 2\ng = 3").unwrap();
        let firsts: Vec<_> = ts.iter().filter(|t| t.bol).map(|t| (t.span.line, t.span.col)).collect();
        assert_eq!(firsts, [(1, 1), (2, 3), (3, 1), (3, 6)]);
    }

    #[test]
    fn reserved_character_is_rejected() {
        let e = lex("x#1").unwrap_err();
        assert_eq!((e.span.line, e.span.col), (1, 2));
    }
}
