//! A small C-family tokenizer shared by the header, class-description and
//! Objective-C interface parsers.
//!
//! Comments are dropped. Lines whose first non-blank character is `#` are
//! treated as preprocessor directives and skipped (including `\`
//! continuations); macros are never expanded.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Number(String),
    Str(String),
    /// Punctuation. Multi-character forms recognised: `::`, `...`, `->`.
    Punct(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// 1-based source line.
    pub line: usize,
    /// True when whitespace or a comment separated this token from the
    /// previous one.
    pub spaced: bool,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.kind, TokenKind::Punct(q) if q == p)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(&self.kind, TokenKind::Ident(i) if i == s)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Ident(i) => Some(i),
            _ => None,
        }
    }

    /// The token as it would be written in source.
    pub fn text(&self) -> String {
        match &self.kind {
            TokenKind::Ident(s) | TokenKind::Number(s) => s.clone(),
            TokenKind::Str(s) => {
                let mut out = String::with_capacity(s.len() + 2);
                out.push('"');
                out.push_str(s);
                out.push('"');
                out
            }
            TokenKind::Punct(p) => String::from(*p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub message: String,
}

const PUNCT: &[&str] = &[
    "...", "::", "->", "{", "}", "(", ")", "[", "]", "<", ">", ";", ":", ",", "*", "&", "=", "+",
    "-", "~", "!", "%", "^", "|", "/", "?", ".", "@",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut at_line_start = true;
    let mut spaced = true;

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            at_line_start = true;
            spaced = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            spaced = true;
            continue;
        }
        if c == '#' && at_line_start {
            // preprocessor directive, honouring backslash continuations
            while i < chars.len() && chars[i] != '\n' {
                if chars[i] == '\\' && chars.get(i + 1) == Some(&'\n') {
                    line += 1;
                    i += 2;
                    continue;
                }
                i += 1;
            }
            spaced = true;
            continue;
        }
        at_line_start = false;
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            spaced = true;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let start_line = line;
            i += 2;
            loop {
                if i + 1 >= chars.len() {
                    return Err(LexError {
                        line: start_line,
                        message: String::from("unterminated block comment"),
                    });
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            spaced = true;
            continue;
        }
        let tok_line = line;
        let kind = if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            TokenKind::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.') {
                i += 1;
            }
            TokenKind::Number(chars[start..i].iter().collect())
        } else if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(LexError {
                            line: tok_line,
                            message: String::from("unterminated string literal"),
                        })
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        s.push('\\');
                        if let Some(&n) = chars.get(i + 1) {
                            s.push(n);
                        }
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            TokenKind::Str(s)
        } else {
            let rest = &chars[i..];
            let p = PUNCT.iter().find(|p| {
                let pc: Vec<char> = p.chars().collect();
                rest.len() >= pc.len() && rest[..pc.len()] == pc[..]
            });
            match p {
                Some(p) => {
                    i += p.len();
                    TokenKind::Punct(p)
                }
                None => {
                    return Err(LexError {
                        line: tok_line,
                        message: alloc::format!("unexpected character {:?}", c),
                    })
                }
            }
        };
        out.push(Token {
            kind,
            line: tok_line,
            spaced,
        });
        spaced = false;
    }
    Ok(out)
}

/// Joins tokens back into text, writing a single space wherever the source
/// had any whitespace between two tokens.
pub fn join_spaced(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (k, t) in tokens.iter().enumerate() {
        if k > 0 && t.spaced {
            out.push(' ');
        }
        out.push_str(&t.text());
    }
    out
}

/// Splits text into a whitespace-insensitive token sequence for comparing
/// generated code against reference listings.
///
/// Comments are removed, runs of identifier characters form one token, and
/// every other non-blank character is its own token. String literal quotes
/// are ordinary punctuation here, so `"a ,b"` and `"a, b"` compare equal.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                i += 1;
            }
            i += 2;
        } else if c.is_whitespace() {
            i += 1;
        } else if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            out.push(String::from(c));
            i += 1;
        }
    }
    out
}
