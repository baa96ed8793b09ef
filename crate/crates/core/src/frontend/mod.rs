//! Surface syntax for development files and tactic scripts, elaboration to
//! core syntax, and the interactive front ends.

pub mod ast;
pub mod elab;
pub mod lexer;
pub mod parser;
pub mod protocol;
pub mod server;
pub mod session;

use thiserror::Error;

pub use ast::{Command, DevFile, Item, SClause, SFormula, STerm, STy, Spanned, Tactic};
pub use elab::{elab_define, elab_statement, ElabError, Elaborator, FreeVars};
pub use lexer::Pos;
pub use parser::{parse_commands, parse_dev, parse_formula, parse_tactics, parse_term, parse_ty};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { pos, message: message.into() }
    }

    pub fn expected(pos: Pos, expected: &str, found: &str) -> Self {
        ParseError { pos, message: format!("expected {expected}, found {found}") }
    }
}
