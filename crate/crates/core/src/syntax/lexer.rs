use std::fmt;

use super::ast::is_ident_continue;
use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum TokenKind {
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Plus,
    Dot,
    ColonColon,
    Colon,
    /// `->`
    Normal,
    /// `=>`
    Persistent,
    /// `~>`
    Remanent,
    /// `+>`
    Activate,
    /// `-|`
    Inhibit,
    Lt,
    /// `><`
    Napprox,
    Tilde,
    Ident(String),
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::LBrace => "'{'",
            TokenKind::RBrace => "'}'",
            TokenKind::LBracket => "'['",
            TokenKind::RBracket => "']'",
            TokenKind::LParen => "'('",
            TokenKind::RParen => "')'",
            TokenKind::Comma => "','",
            TokenKind::Plus => "'+'",
            TokenKind::Dot => "'.'",
            TokenKind::ColonColon => "'::'",
            TokenKind::Colon => "':'",
            TokenKind::Normal => "'->'",
            TokenKind::Persistent => "'=>'",
            TokenKind::Remanent => "'~>'",
            TokenKind::Activate => "'+>'",
            TokenKind::Inhibit => "'-|'",
            TokenKind::Lt => "'<'",
            TokenKind::Napprox => "'><'",
            TokenKind::Tilde => "'~'",
            TokenKind::Ident(name) => return write!(f, "identifier '{name}'"),
            TokenKind::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let (start_line, start_column) = (line, column);
        let mut push = |kind: TokenKind, width: usize, i: &mut usize, column: &mut usize| {
            tokens.push(Token {
                kind,
                line: start_line,
                column: start_column,
            });
            *i += width;
            *column += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
            }
            '/' if next == Some('/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' => push(TokenKind::LBrace, 1, &mut i, &mut column),
            '}' => push(TokenKind::RBrace, 1, &mut i, &mut column),
            '[' => push(TokenKind::LBracket, 1, &mut i, &mut column),
            ']' => push(TokenKind::RBracket, 1, &mut i, &mut column),
            '(' => push(TokenKind::LParen, 1, &mut i, &mut column),
            ')' => push(TokenKind::RParen, 1, &mut i, &mut column),
            ',' => push(TokenKind::Comma, 1, &mut i, &mut column),
            '.' => push(TokenKind::Dot, 1, &mut i, &mut column),
            ':' if next == Some(':') => push(TokenKind::ColonColon, 2, &mut i, &mut column),
            ':' => push(TokenKind::Colon, 1, &mut i, &mut column),
            '-' if next == Some('>') => push(TokenKind::Normal, 2, &mut i, &mut column),
            '-' if next == Some('|') => push(TokenKind::Inhibit, 2, &mut i, &mut column),
            '=' if next == Some('>') => push(TokenKind::Persistent, 2, &mut i, &mut column),
            '~' if next == Some('>') => push(TokenKind::Remanent, 2, &mut i, &mut column),
            '~' => push(TokenKind::Tilde, 1, &mut i, &mut column),
            '+' if next == Some('>') => push(TokenKind::Activate, 2, &mut i, &mut column),
            '+' => push(TokenKind::Plus, 1, &mut i, &mut column),
            '>' if next == Some('<') => push(TokenKind::Napprox, 2, &mut i, &mut column),
            '<' => push(TokenKind::Lt, 1, &mut i, &mut column),
            c if c.is_alphabetic() => {
                let start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                column += i - start;
                tokens.push(Token {
                    kind: TokenKind::Ident(name),
                    line: start_line,
                    column: start_column,
                });
            }
            other => {
                return Err(SyntaxError {
                    line,
                    column,
                    expected: vec!["a token".into()],
                    found: format!("character {other:?}"),
                })
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        line,
        column,
    });
    Ok(tokens)
}
