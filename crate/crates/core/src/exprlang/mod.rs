//! A small expression language over jet symbols.
//!
//! Text is parsed into an [`Expr`], printed back with minimal parentheses,
//! and bound against a geometry and field layout into a
//! [`ScalarJetFunction`](crate::invcat::ScalarJetFunction).

mod ast;
mod bind;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use ast::{BinOp, Expr};
pub use bind::{bind, BindError, Binding};
pub use parser::parse;

/// Byte range `[start, end)` in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at {span}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    /// The source line with a caret under the offending span.
    pub fn render(&self, src: &str) -> String {
        let start = self.span.start.min(src.len());
        let width = self.span.end.saturating_sub(self.span.start).max(1);
        format!("{src}\n{}{} {}", " ".repeat(src[..start].chars().count()), "^".repeat(width), self.message)
    }
}
