use crate::error::{Error, Result};

use super::SourceSpan;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Weight text: a real number, `+inf` or `-inf`.
    Number(String),
    Dot,
    Colon,
    Arrow,
    Implies,
    Iff,
    Not,
    And,
    Or,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Lexer<'a> {
    fn span_from(&self, start: usize, line: usize, col: usize) -> SourceSpan {
        SourceSpan {
            start,
            end: self.pos,
            line,
            column: col,
        }
    }

    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    /// `inf` not followed by an identifier character.
    fn inf_at(&self, offset: usize) -> bool {
        self.src[self.pos + offset..].starts_with("inf")
            && !self
                .bytes
                .get(self.pos + offset + 3)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
    }

    fn number(&mut self) {
        if matches!(self.peek(0), Some(b'+' | b'-')) {
            self.pos += 1;
        }
        while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek(0) == Some(b'.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(0), Some(b'e' | b'E')) {
            let sign = usize::from(matches!(self.peek(1), Some(b'+' | b'-')));
            if self.peek(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1 + sign;
                while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
    }

    fn next_token(&mut self) -> Result<Token> {
        loop {
            match self.peek(0) {
                Some(b'\n') => {
                    self.pos += 1;
                    self.line += 1;
                    self.line_start = self.pos;
                }
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while self.peek(0).is_some_and(|c| c != b'\n') {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = self.pos;
        let line = self.line;
        let col = self.src[self.line_start..start].chars().count() + 1;
        let Some(c) = self.peek(0) else {
            return Ok(Token {
                tok: Tok::Eof,
                span: self.span_from(start, line, col),
            });
        };
        let fixed = [
            ("<->", Tok::Iff),
            ("=>", Tok::Arrow),
            ("->", Tok::Implies),
            (".", Tok::Dot),
            (":", Tok::Colon),
            ("~", Tok::Not),
            ("&", Tok::And),
            ("|", Tok::Or),
            ("(", Tok::LParen),
            (")", Tok::RParen),
        ];
        let tok = if c == b'+' || c == b'-' {
            if self.inf_at(1) {
                self.pos += 4;
                Tok::Number(self.src[start..self.pos].to_string())
            } else if self.peek(1).is_some_and(|d| d.is_ascii_digit())
                || (self.peek(1) == Some(b'.') && self.peek(2).is_some_and(|d| d.is_ascii_digit()))
            {
                self.number();
                Tok::Number(self.src[start..self.pos].to_string())
            } else if self.starts_with("->") {
                self.pos += 2;
                Tok::Implies
            } else {
                self.pos += 1;
                return Err(Error::Syntax {
                    message: format!("unexpected `{}`", c as char),
                    span: self.span_from(start, line, col),
                });
            }
        } else if c.is_ascii_digit() {
            self.number();
            Tok::Number(self.src[start..self.pos].to_string())
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .peek(0)
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
            {
                self.pos += 1;
            }
            Tok::Ident(self.src[start..self.pos].to_string())
        } else if let Some((text, tok)) = fixed.iter().find(|(t, _)| self.starts_with(t)) {
            self.pos += text.len();
            tok.clone()
        } else {
            let ch = self.src[start..].chars().next().unwrap_or('?');
            self.pos += ch.len_utf8();
            return Err(Error::Syntax {
                message: format!("unexpected character `{ch}`"),
                span: self.span_from(start, line, col),
            });
        };
        Ok(Token {
            tok,
            span: self.span_from(start, line, col),
        })
    }
}

/// Splits the input into tokens, ending with `Eof`.
pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        line: 1,
        line_start: 0,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next_token()?;
        let end = t.tok == Tok::Eof;
        out.push(t);
        if end {
            return Ok(out);
        }
    }
}
