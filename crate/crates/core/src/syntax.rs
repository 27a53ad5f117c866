//! Shared tokenizer and cursor for the line-oriented input formats
//! (category, net, model and free-arrow files).

use std::fmt;

use thiserror::Error;

/// A syntax error with its 1-based line number and the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message} (at `{token}`)")]
pub struct ParseError {
    pub line: usize,
    pub token: String,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError {
            line,
            token: token.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Int(String),
    Sym(&'static str),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) | Token::Int(s) => f.write_str(s),
            Token::Sym(s) => f.write_str(s),
        }
    }
}

const SYMBOLS: &[&str] = &[
    "<->", "↔", "->", "(", ")", "[", "]", "{", "}", "*", "+", ",", ";", ":", "=", "|", ".", "/",
    "-",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokenize one line (comments already stripped).
pub fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut rest = line;
    'outer: while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if is_ident_start(c) {
            let end = rest
                .find(|ch: char| !is_ident_char(ch))
                .unwrap_or(rest.len());
            out.push(Token::Ident(rest[..end].to_string()));
            rest = &rest[end..];
            continue;
        }
        if c.is_ascii_digit() {
            let end = rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            out.push(Token::Int(rest[..end].to_string()));
            rest = &rest[end..];
            continue;
        }
        for sym in SYMBOLS {
            if rest.starts_with(sym) {
                out.push(Token::Sym(sym));
                rest = &rest[sym.len()..];
                continue 'outer;
            }
        }
        return Err(ParseError::new(
            line_no,
            c.to_string(),
            "unexpected character",
        ));
    }
    Ok(out)
}

/// Iterate over the non-empty lines of a file as `(line number, tokens)`,
/// with `#` comments removed.
pub fn lines(text: &str) -> Result<Vec<(usize, Vec<Token>)>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks = tokenize(line, i + 1)?;
        if !toks.is_empty() {
            out.push((i + 1, toks));
        }
    }
    Ok(out)
}

/// A cursor over the tokens of a single line.
pub struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    pub line: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token], line: usize) -> Self {
        Cursor { toks, pos: 0, line }
    }

    pub fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + offset)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let token = self
            .peek()
            .map(|t| t.to_string())
            .unwrap_or_else(|| "end of line".to_string());
        ParseError::new(self.line, token, message)
    }

    pub fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Some(Token::Sym(s)) if *s == sym)
    }

    pub fn is_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token::Ident(s)) if s == word)
    }

    pub fn eat_sym(&mut self, sym: &str) -> bool {
        if self.is_sym(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{sym}`")))
        }
    }

    pub fn expect_keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.is_ident(word) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{word}`")))
        }
    }

    pub fn ident(&mut self) -> Result<&'a str, ParseError> {
        match self.peek() {
            Some(Token::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    pub fn int(&mut self) -> Result<&'a str, ParseError> {
        match self.peek() {
            Some(Token::Int(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected integer")),
        }
    }

    pub fn usize(&mut self) -> Result<usize, ParseError> {
        let line = self.line;
        let s = self.int()?;
        s.parse()
            .map_err(|_| ParseError::new(line, s, "integer out of range"))
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}
