//! Concrete syntax, AST and name discipline.

mod ast;
mod lexer;
mod parser;
mod render;

use std::fmt;

pub use ast::*;
pub use parser::{parse_program, parse_states};
pub use render::{
    render_attr_rel, render_behaviour, render_dependence, render_program, render_state,
    render_states,
};

/// Position and expectations of a parse failure. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for SyntaxError {}

impl SyntaxError {
    /// The offending source line with a caret under the error column.
    pub fn caret(&self, source: &str) -> String {
        let line = source.lines().nth(self.line.saturating_sub(1)).unwrap_or("");
        format!("{line}\n{}^", " ".repeat(self.column.saturating_sub(1)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("observation label `{0}` is used more than once")]
    DuplicateLabel(Ident),
}

/// Variables of `p`: every lowercase name, wherever it occurs.
pub fn free_variables(p: &Program) -> std::collections::BTreeSet<Ident> {
    p.free_variables()
}
