use std::iter::Peekable;
use std::str::Chars;

use super::ast::CompOp;
use super::{Position, QueryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Match,
    Where,
    And,
    Return,
}

impl Keyword {
    fn lookup(word: &str) -> Option<Keyword> {
        [
            ("MATCH", Keyword::Match),
            ("WHERE", Keyword::Where),
            ("AND", Keyword::And),
            ("RETURN", Keyword::Return),
        ]
        .into_iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(word))
        .map(|(_, kw)| kw)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Match => "MATCH",
            Keyword::Where => "WHERE",
            Keyword::And => "AND",
            Keyword::Return => "RETURN",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    /// One of `( ) [ ] : , . * - ->`; the symbol is in `Token::text`.
    Punct,
    Str(String),
    Number(f64),
    Bool(bool),
    Comparator(CompOp),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text of the token.
    pub text: String,
    pub position: Position,
}

impl Token {
    pub fn is_punct(&self, symbol: &str) -> bool {
        self.kind == TokenKind::Punct && self.text == symbol
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Keyword(k) => format!("keyword {}", k.as_str()),
            TokenKind::Ident => format!("identifier `{}`", self.text),
            TokenKind::Punct => format!("'{}'", self.text),
            TokenKind::Str(_) => format!("string {}", self.text),
            TokenKind::Number(_) => format!("number {}", self.text),
            TokenKind::Bool(_) => format!("boolean {}", self.text),
            TokenKind::Comparator(_) => format!("comparator {}", self.text),
        }
    }
}

struct Lexer<'a> {
    chars: Peekable<Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn pos(&self) -> Position {
        Position::new(self.line, self.column)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn take_while(&mut self, text: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek().filter(|c| pred(*c)) {
            text.push(c);
            self.bump();
        }
    }

    fn string(&mut self, start: Position) -> Result<TokenKind, QueryError> {
        let mut value = String::new();
        loop {
            let escape_pos = self.pos();
            match self.bump() {
                None => {
                    return Err(QueryError::Lex {
                        position: start,
                        message: "unterminated string literal".into(),
                    })
                }
                Some('"') => return Ok(TokenKind::Str(value)),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        None => {
                            return Err(QueryError::Lex {
                                position: start,
                                message: "unterminated string literal".into(),
                            })
                        }
                        Some(other) => {
                            return Err(QueryError::Lex {
                                position: escape_pos,
                                message: format!("unknown escape sequence `\\{other}`"),
                            })
                        }
                    };
                    value.push(c);
                }
                Some(c) => value.push(c),
            }
        }
    }

    fn number(&mut self, text: &mut String, start: Position) -> Result<TokenKind, QueryError> {
        self.take_while(text, |c| c.is_ascii_digit());
        // A fraction needs a digit after the dot; otherwise the dot is punctuation.
        let mut ahead = self.chars.clone();
        if ahead.next() == Some('.') && ahead.next().is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.bump();
            self.take_while(text, |c| c.is_ascii_digit());
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(TokenKind::Number(v)),
            _ => Err(QueryError::Lex {
                position: start,
                message: format!("number `{text}` is out of range"),
            }),
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, QueryError> {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
        let position = self.pos();
        let Some(c) = self.bump() else {
            return Ok(None);
        };
        let mut text = String::from(c);
        let kind = match c {
            '(' | ')' | '[' | ']' | ':' | ',' | '.' | '*' => TokenKind::Punct,
            '-' if self.peek() == Some('>') => {
                text.push('>');
                self.bump();
                TokenKind::Punct
            }
            '-' if self.peek().is_some_and(|c| c.is_ascii_digit()) => self.number(&mut text, position)?,
            '-' => TokenKind::Punct,
            '=' => TokenKind::Comparator(CompOp::Eq),
            '<' | '>' => {
                let op = match (c, self.peek()) {
                    ('<', Some('>')) => Some(CompOp::Ne),
                    ('<', Some('=')) => Some(CompOp::Le),
                    ('>', Some('=')) => Some(CompOp::Ge),
                    _ => None,
                };
                match op {
                    Some(op) => {
                        text.push(self.bump().expect("peeked"));
                        TokenKind::Comparator(op)
                    }
                    None if c == '<' => TokenKind::Comparator(CompOp::Lt),
                    None => TokenKind::Comparator(CompOp::Gt),
                }
            }
            '"' => {
                let kind = self.string(position)?;
                text = match &kind {
                    TokenKind::Str(s) => {
                        let mut quoted = String::new();
                        super::ast::write_string_literal(&mut quoted, s).expect("write to string");
                        quoted
                    }
                    _ => unreachable!(),
                };
                kind
            }
            c if c.is_ascii_digit() => self.number(&mut text, position)?,
            c if c.is_alphabetic() || c == '_' => {
                self.take_while(&mut text, |c| c.is_alphanumeric() || c == '_');
                if let Some(kw) = Keyword::lookup(&text) {
                    TokenKind::Keyword(kw)
                } else if text.eq_ignore_ascii_case("true") {
                    TokenKind::Bool(true)
                } else if text.eq_ignore_ascii_case("false") {
                    TokenKind::Bool(false)
                } else {
                    TokenKind::Ident
                }
            }
            other => {
                return Err(QueryError::Lex {
                    position,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        Ok(Some(Token { kind, text, position }))
    }
}

/// Splits query text into tokens; also returns the position just past the
/// last character.
pub(crate) fn lex(text: &str) -> Result<(Vec<Token>, Position), QueryError> {
    let mut lexer = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        tokens.push(tok);
    }
    Ok((tokens, lexer.pos()))
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, QueryError> {
    lex(text).map(|(tokens, _)| tokens)
}
