//! The Carib language: AST, concrete syntax and validation.

pub mod ast;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod validate;

#[cfg(test)]
mod tests;

pub use ast::*;
pub use error::{LangError, SyntaxError};
pub use parser::{parse_unit, ParseMode};
pub use pretty::pretty;
pub use validate::validate;

/// Parses and validates a source program. `bottom` statements are rejected.
pub fn parse(src: &str) -> Result<Program, LangError> {
    let p = parse_unit(src, ParseMode::Source)?;
    validate(&p, false)?;
    Ok(p)
}

/// Parses and validates a transformed program, where `bottom` statements may occur.
pub fn parse_transformed(src: &str) -> Result<Program, LangError> {
    let p = parse_unit(src, ParseMode::Transformed)?;
    validate(&p, true)?;
    Ok(p)
}
